//! TOML description of an IFS.
//!
//! ```toml
//! dimension = 1
//! seed = "origin"            # or a list of points: [[0.0], [1.0]]
//!
//! [tolerances]               # every key optional
//! tol_attr = 1e-6
//!
//! [[maps]]
//! name = "left"
//! kind = "affine"            # affine | sine | tanh | soft_shrink
//! matrix = [0.3333333333333333]   # row-major
//! offset = [0.0]
//! phi = { family = "linear", c = 0.3333333333333333 }
//! ```
//!
//! Named families take `scale` and `offset` instead of `matrix`. Comparison
//! functions are `linear` (with `c`), `rational`, or `table` (with `knots`).

use std::path::Path;

use serde::Deserialize;

use crate::codespace::Letter;
use crate::contractions::{AffineMap, ComparisonFunction, ContractionMap, MapKind, NamedFamily, StepTable};
use crate::error::{Error, Result};
use crate::ifscore::{IfsInstance, Tolerances};
use crate::metricsets::PointCloud;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IfsConfig {
    pub dimension: usize,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    #[serde(default)]
    pub seed: SeedSpec,
    pub maps: Vec<MapConfig>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub tol_point: Option<f64>,
    pub tol_attr: Option<f64>,
    pub max_depth: Option<usize>,
    pub dedup_cell: Option<f64>,
    pub word_cap: Option<usize>,
    pub max_iter: Option<usize>,
    pub max_cloud_points: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum SeedSpec {
    Keyword(String),
    Points(Vec<Vec<f64>>),
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec::Keyword("origin".into())
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub name: Option<String>,
    pub kind: String,
    pub matrix: Option<Vec<f64>>,
    pub offset: Option<Vec<f64>>,
    pub scale: Option<f64>,
    pub phi: Option<PhiConfig>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PhiConfig {
    pub family: String,
    pub c: Option<f64>,
    pub knots: Option<Vec<[f64; 2]>>,
}

impl PhiConfig {
    fn build(&self) -> Result<ComparisonFunction> {
        let unexpected = |what: &str| Error::Parse(format!("phi family `{}` takes no `{what}`", self.family));
        match self.family.as_str() {
            "linear" => {
                if self.knots.is_some() {
                    return Err(unexpected("knots"));
                }
                let c = self.c.ok_or_else(|| Error::Parse("linear phi needs `c`".into()))?;
                ComparisonFunction::linear(c)
            }
            "rational" => {
                if self.c.is_some() {
                    return Err(unexpected("c"));
                }
                if self.knots.is_some() {
                    return Err(unexpected("knots"));
                }
                Ok(ComparisonFunction::Rational)
            }
            "table" => {
                if self.c.is_some() {
                    return Err(unexpected("c"));
                }
                let knots = self.knots.as_ref().ok_or_else(|| Error::Parse("table phi needs `knots`".into()))?;
                Ok(ComparisonFunction::Table(StepTable::new(knots.iter().map(|k| (k[0], k[1])).collect())?))
            }
            other => Err(Error::Parse(format!("unknown phi family `{other}`"))),
        }
    }
}

impl MapConfig {
    fn build(&self, dim: usize, index: usize) -> Result<ContractionMap> {
        let label = self.name.clone().unwrap_or_else(|| index.to_string());
        let offset = self.offset.clone().ok_or_else(|| Error::Parse(format!("map `{label}`: missing `offset`")))?;
        if offset.len() != dim {
            return Err(Error::Parse(format!("map `{label}`: offset has {} entries, expected {dim}", offset.len())));
        }
        let kind = if self.kind == "affine" {
            if self.scale.is_some() {
                return Err(Error::Parse(format!("map `{label}`: affine maps take `matrix`, not `scale`")));
            }
            let matrix = self.matrix.clone().ok_or_else(|| Error::Parse(format!("map `{label}`: missing `matrix`")))?;
            if matrix.len() != dim * dim {
                return Err(Error::Parse(format!(
                    "map `{label}`: matrix has {} entries, expected {}",
                    matrix.len(),
                    dim * dim
                )));
            }
            MapKind::Affine(AffineMap::new(matrix, offset)?)
        } else {
            let family = NamedFamily::from_tag(&self.kind)
                .ok_or_else(|| Error::Parse(format!("map `{label}`: unknown kind `{}`", self.kind)))?;
            if self.matrix.is_some() {
                return Err(Error::Parse(format!("map `{label}`: `{}` maps take `scale`, not `matrix`", self.kind)));
            }
            let scale = self.scale.ok_or_else(|| Error::Parse(format!("map `{label}`: missing `scale`")))?;
            MapKind::Named { family, scale, offset }
        };
        let witness = self.phi.as_ref().map(PhiConfig::build).transpose()?;
        ContractionMap::new(kind, witness).map_err(|e| Error::Parse(format!("map `{label}`: {e}")))
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name.parse::<u64>().is_err()
        && name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-')
}

impl IfsConfig {
    pub fn parse(text: &str) -> Result<IfsConfig> {
        let cfg: IfsConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<IfsConfig> {
        IfsConfig::parse(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::Parse("dimension must be at least 1".into()));
        }
        if self.maps.is_empty() {
            return Err(Error::Parse("at least one [[maps]] entry is required".into()));
        }
        let mut names = std::collections::HashSet::new();
        for m in &self.maps {
            if let Some(n) = &m.name {
                if !valid_name(n) {
                    return Err(Error::Parse(format!(
                        "map name `{n}` must be non-numeric and use only letters, digits, `_` or `-`"
                    )));
                }
                if !names.insert(n.as_str()) {
                    return Err(Error::Parse(format!("duplicate map name `{n}`")));
                }
            }
        }
        self.seed_cloud()?;
        self.instance()?;
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        let o = &self.tolerances;
        let d = Tolerances::default();
        Tolerances {
            tol_point: o.tol_point.unwrap_or(d.tol_point),
            tol_attr: o.tol_attr.unwrap_or(d.tol_attr),
            max_depth: o.max_depth.unwrap_or(d.max_depth),
            dedup_cell: o.dedup_cell.or(d.dedup_cell),
            word_cap: o.word_cap.unwrap_or(d.word_cap),
            max_iter: o.max_iter.unwrap_or(d.max_iter),
            max_cloud_points: o.max_cloud_points.unwrap_or(d.max_cloud_points),
        }
    }

    pub fn instance(&self) -> Result<IfsInstance> {
        self.instance_with(self.tolerances())
    }

    pub fn instance_with(&self, tol: Tolerances) -> Result<IfsInstance> {
        let maps = self.maps.iter().enumerate().map(|(i, m)| m.build(self.dimension, i)).collect::<Result<Vec<_>>>()?;
        IfsInstance::new(maps, tol).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn seed_cloud(&self) -> Result<PointCloud> {
        match &self.seed {
            SeedSpec::Keyword(k) if k == "origin" => PointCloud::singleton(&vec![0.0; self.dimension]),
            SeedSpec::Keyword(k) => {
                Err(Error::Parse(format!("unknown seed `{k}` (use \"origin\" or a list of points)")))
            }
            SeedSpec::Points(rows) => {
                if rows.is_empty() {
                    return Err(Error::Parse("seed point list is empty".into()));
                }
                if let Some(bad) = rows.iter().find(|r| r.len() != self.dimension) {
                    return Err(Error::Parse(format!(
                        "seed point has {} coordinates, expected {}",
                        bad.len(),
                        self.dimension
                    )));
                }
                PointCloud::from_rows(rows).map_err(|e| Error::Parse(format!("seed: {e}")))
            }
        }
    }

    /// Letter for an address token: a map name, else a decimal index.
    pub fn resolve_letter(&self, token: &str) -> Option<Letter> {
        self.maps
            .iter()
            .position(|m| m.name.as_deref() == Some(token))
            .map(|i| i as Letter)
            .or_else(|| token.parse().ok())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codespace::AddressSpec;

    const CANTOR: &str = r#"
dimension = 1

[[maps]]
name = "left"
kind = "affine"
matrix = [0.3333333333333333]
offset = [0.0]
phi = { family = "linear", c = 0.3333333333333334 }

[[maps]]
name = "right"
kind = "affine"
matrix = [0.3333333333333333]
offset = [0.6666666666666666]
"#;

    #[test]
    fn parses_cantor() {
        let cfg = IfsConfig::parse(CANTOR).unwrap();
        let s = cfg.instance().unwrap();
        assert_eq!(s.alphabet().size(), 2);
        assert!(s.maps()[0].witness().is_some() && s.maps()[1].witness().is_none());
        assert_eq!(cfg.seed_cloud().unwrap().coords(), &[0.0]);
        assert_eq!(cfg.resolve_letter("right"), Some(1));
        assert_eq!(cfg.resolve_letter("0"), Some(0));
        assert_eq!(cfg.resolve_letter("middle"), None);
        let a = AddressSpec::parse_with("left|right", s.alphabet(), |t| cfg.resolve_letter(t)).unwrap();
        assert!((s.coding_map(&a).unwrap()[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn named_families_and_tables() {
        let text = r#"
dimension = 2
seed = [[0.0, 0.0], [1.0, 1.0]]
[tolerances]
tol_attr = 1e-3
[[maps]]
kind = "sine"
scale = 0.5
offset = [0.0, 1.0]
phi = { family = "table", knots = [[0.0, 0.0], [1.0, 0.5], [2.0, 1.5]] }
[[maps]]
kind = "soft_shrink"
scale = 0.5
offset = [1.0, 0.0]
phi = { family = "rational" }
"#;
        let cfg = IfsConfig::parse(text).unwrap();
        assert_eq!(cfg.tolerances().tol_attr, 1e-3);
        assert_eq!(cfg.seed_cloud().unwrap().len(), 2);
        assert_eq!(cfg.instance().unwrap().dim(), 2);
    }

    #[test]
    fn rejects_bad_configs() {
        let cases = [
            "dimension = 1\n",
            "dimension = 1\nbogus = 3\n[[maps]]\nkind = \"affine\"\nmatrix = [0.5]\noffset = [0.0]\n",
            "dimension = 1\n[[maps]]\nkind = \"affine\"\nmatrix = [0.5, 0.1]\noffset = [0.0]\n",
            "dimension = 1\n[[maps]]\nkind = \"spiral\"\nscale = 0.5\noffset = [0.0]\n",
            "dimension = 1\n[[maps]]\nkind = \"affine\"\nmatrix = [0.5]\noffset = [0.0]\ncolour = 1\n",
            "dimension = 1\nseed = \"somewhere\"\n[[maps]]\nkind = \"affine\"\nmatrix = [0.5]\noffset = [0.0]\n",
            "dimension = 1\n[[maps]]\nkind = \"affine\"\nmatrix = [0.9]\noffset = [0.0]\nphi = { family = \"linear\", c = 0.5 }\n",
            "dimension = 1\n[[maps]]\nname = \"a\"\nkind = \"affine\"\nmatrix = [0.5]\noffset = [0.0]\n[[maps]]\nname = \"a\"\nkind = \"affine\"\nmatrix = [0.5]\noffset = [1.0]\n",
            "dimension = 1\n[[maps]]\nname = \"7\"\nkind = \"affine\"\nmatrix = [0.5]\noffset = [0.0]\n",
            "dimension = [\n",
        ];
        for text in cases {
            assert!(matches!(IfsConfig::parse(text), Err(Error::Parse(_))), "accepted: {text}");
        }
    }
}

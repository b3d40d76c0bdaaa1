//! Maps on R^m, comparison functions and sampled φ-contractivity checks.

use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codespace::Word;
use crate::error::{Error, Result};
use crate::metricsets::{distance, BoundingBox, Point};

/// Slack added to `φ(d(x, y))` before a sampled pair counts as a violation.
pub const CONTRACTIVITY_SLACK: f64 = 1e-12;
/// Default number of sampled pairs per contractivity check.
pub const DEFAULT_PAIR_SAMPLES: usize = 10_000;
/// Default seed of the pair sampler.
pub const DEFAULT_SEED: u64 = 0x1f5_c0de;

const POWER_ITERATIONS: usize = 50;
const POWER_REL_CHANGE: f64 = 1e-12;
const NORM_TOLERANCE: f64 = 1e-10;

/// Right-continuous non-decreasing step function given by knots `(t_j, v_j)`:
/// `φ(t) = v_j` for the largest `t_j ≤ t`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepTable {
    knots: Vec<(f64, f64)>,
}

impl StepTable {
    /// Knots must start at `(0, 0)`, have strictly increasing `t`,
    /// non-decreasing `v`, and `v_j < t_j` past the first knot. Those
    /// conditions make `φ(t) < t` hold for every `t > 0`, not only at samples.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidComparison(msg.to_string()));
        match knots.first() {
            Some(&(t, v)) if t == 0.0 && v == 0.0 => {}
            _ => return bad("table must start with the knot (0, 0)"),
        }
        if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return bad("table knots must be finite");
        }
        for w in knots.windows(2) {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if t1 <= t0 {
                return bad("table abscissae must be strictly increasing");
            }
            if v1 < v0 {
                return bad("table values must be non-decreasing");
            }
            if v1 >= t1 {
                return bad("table value must stay below its abscissa");
            }
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    fn eval(&self, t: f64) -> f64 {
        let j = self.knots.partition_point(|&(tj, _)| tj <= t);
        self.knots[j - 1].1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ComparisonFunction {
    /// `φ(t) = c·t`, `0 < c < 1`.
    Linear {
        c: f64,
    },
    /// `φ(t) = t / (1 + t)`.
    Rational,
    Table(StepTable),
}

impl ComparisonFunction {
    pub fn linear(c: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::InvalidComparison(format!("linear factor {c} not in (0, 1)")));
        }
        Ok(Self::Linear { c })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeArgument(t));
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: f64) -> f64 {
        match self {
            Self::Linear { c } => c * t,
            Self::Rational => t / (1.0 + t),
            Self::Table(table) => table.eval(t),
        }
    }

    /// `φ^[n](t)`; `φ^[0]` is the identity.
    pub fn iterate(&self, t: f64, n: usize) -> Result<f64> {
        let mut v = t;
        self.eval(v)?;
        for _ in 0..n {
            v = self.eval_unchecked(v);
        }
        Ok(v)
    }
}

pub fn phi_eval(phi: &ComparisonFunction, t: f64) -> Result<f64> {
    phi.eval(t)
}

pub fn phi_iterate(phi: &ComparisonFunction, t: f64, n: usize) -> Result<f64> {
    phi.iterate(t, n)
}

/// `x ↦ L·x + b` with `L` stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    dim: usize,
    matrix: Vec<f64>,
    offset: Vec<f64>,
}

impl AffineMap {
    pub fn new(matrix: Vec<f64>, offset: Vec<f64>) -> Result<Self> {
        let dim = offset.len();
        if dim == 0 || matrix.len() != dim * dim {
            return Err(Error::InvalidMap(format!(
                "affine map needs an m×m matrix for an offset of length {dim}, got {} entries",
                matrix.len()
            )));
        }
        if matrix.iter().chain(&offset).any(|v| !v.is_finite()) {
            return Err(Error::InvalidMap("affine coefficients must be finite".into()));
        }
        Ok(Self { dim, matrix, offset })
    }

    pub fn identity(dim: usize) -> Self {
        let mut matrix = vec![0.0; dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = 1.0;
        }
        Self { dim, matrix, offset: vec![0.0; dim] }
    }

    /// `x ↦ s·x + b` (uniform scaling).
    pub fn similarity(scale: f64, offset: Vec<f64>) -> Result<Self> {
        let dim = offset.len();
        let mut id = Self::identity(dim);
        id.matrix.iter_mut().for_each(|v| *v *= scale);
        Self::new(id.matrix, offset)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let m = self.dim;
        for i in 0..m {
            let row = &self.matrix[i * m..(i + 1) * m];
            out[i] = row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.offset[i];
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        let m = self.dim;
        let mut matrix = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                matrix[i * m + j] = (0..m).map(|k| self.matrix[i * m + k] * inner.matrix[k * m + j]).sum();
            }
        }
        let mut offset = vec![0.0; m];
        self.apply(&inner.offset, &mut offset);
        AffineMap { dim: m, matrix, offset }
    }

    /// Spectral norm, bounded from above; see [`operator_norm`].
    pub fn operator_norm(&self) -> f64 {
        operator_norm(&self.matrix, self.dim)
    }

    /// Solves `(Id − L)x = b`.
    pub fn fixed_point(&self) -> Result<Point> {
        let m = self.dim;
        let a = DMatrix::from_fn(m, m, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - self.matrix[i * m + j]
        });
        let b = DVector::from_column_slice(&self.offset);
        let x = a.lu().solve(&b).ok_or(Error::Singular)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular);
        }
        Point::new(x.iter().copied().collect())
    }
}

/// Upper bound on `‖L‖₂` that is tight to about `1e-12` relative.
///
/// Power method on `G = LᵀL` by repeated squaring: `trace(G^p)^(1/p)` bounds
/// the top eigenvalue from above for every `p` and tightens as `p` doubles,
/// whatever the spectral gap.
pub fn operator_norm(matrix: &[f64], dim: usize) -> f64 {
    let l = DMatrix::from_row_slice(dim, dim, matrix);
    let mut g = l.transpose() * &l;
    // g = G^p / exp(log_scale)
    let mut log_scale = 0.0f64;
    let mut p = 1.0f64;
    let mut best = f64::INFINITY;
    for _ in 0..POWER_ITERATIONS {
        let t = g.trace();
        if !(t > 0.0) {
            return if p == 1.0 { 0.0 } else { best.exp().sqrt() };
        }
        let bound = (t.ln() + log_scale) / p;
        let done = best.is_finite() && (best - bound).abs() <= POWER_REL_CHANGE;
        best = best.min(bound);
        if done {
            break;
        }
        g /= t;
        log_scale += t.ln();
        g = &g * &g;
        log_scale *= 2.0;
        p *= 2.0;
    }
    best.exp().sqrt()
}

/// Nonlinear families, applied componentwise. Each is `|scale|`-Lipschitz.
#[derive(Clone, Debug, PartialEq)]
pub enum NamedFamily {
    /// `x_k ↦ scale·sin(x_k) + b_k`
    Sine,
    /// `x_k ↦ scale·tanh(x_k) + b_k`
    Tanh,
    /// `x_k ↦ scale·x_k / (1 + |x_k|) + b_k`
    SoftShrink,
}

impl NamedFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Sine => "sine",
            Self::Tanh => "tanh",
            Self::SoftShrink => "soft_shrink",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "sine" => Some(Self::Sine),
            "tanh" => Some(Self::Tanh),
            "soft_shrink" => Some(Self::SoftShrink),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    Affine(AffineMap),
    Named { family: NamedFamily, scale: f64, offset: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionMap {
    kind: MapKind,
    witness: Option<ComparisonFunction>,
}

impl ContractionMap {
    pub fn new(kind: MapKind, witness: Option<ComparisonFunction>) -> Result<Self> {
        match &kind {
            MapKind::Affine(a) => {
                if let Some(ComparisonFunction::Linear { c }) = &witness {
                    let norm = a.operator_norm();
                    if norm > c + NORM_TOLERANCE {
                        return Err(Error::InvalidMap(format!("operator norm {norm} exceeds linear witness {c}")));
                    }
                }
            }
            MapKind::Named { scale, offset, .. } => {
                if offset.is_empty() || !scale.is_finite() || offset.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidMap("named map needs a finite scale and offset".into()));
                }
            }
        }
        Ok(Self { kind, witness })
    }

    pub fn affine(map: AffineMap) -> Self {
        Self { kind: MapKind::Affine(map), witness: None }
    }

    pub fn with_witness(self, witness: ComparisonFunction) -> Result<Self> {
        Self::new(self.kind, Some(witness))
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn witness(&self) -> Option<&ComparisonFunction> {
        self.witness.as_ref()
    }

    pub fn as_affine(&self) -> Option<&AffineMap> {
        match &self.kind {
            MapKind::Affine(a) => Some(a),
            MapKind::Named { .. } => None,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            MapKind::Affine(a) => a.dim,
            MapKind::Named { offset, .. } => offset.len(),
        }
    }

    /// Global Lipschitz bound: `‖L‖` for affine maps, `|scale|` for the named families.
    pub fn lipschitz_bound(&self) -> f64 {
        match &self.kind {
            MapKind::Affine(a) => a.operator_norm(),
            MapKind::Named { scale, .. } => scale.abs(),
        }
    }

    /// Raw application without checks; `out` must have length `dim`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        match &self.kind {
            MapKind::Affine(a) => a.apply(x, out),
            MapKind::Named { family, scale, offset } => {
                for k in 0..offset.len() {
                    let v = x[k];
                    let g = match family {
                        NamedFamily::Sine => v.sin(),
                        NamedFamily::Tanh => v.tanh(),
                        NamedFamily::SoftShrink => v / (1.0 + v.abs()),
                    };
                    out[k] = scale * g + offset[k];
                }
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Point> {
        eval_map(self, x)
    }
}

pub fn eval_map(f: &ContractionMap, x: &[f64]) -> Result<Point> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x.len() });
    }
    let mut out = vec![0.0; x.len()];
    f.apply(x, &mut out);
    Point::new(out)
}

/// `f_w(x) = f_{w₁}(f_{w₂}(… f_{wₙ}(x)))`; the empty word is the identity.
pub fn eval_word(maps: &[ContractionMap], w: &Word, x: &[f64]) -> Result<Point> {
    let mut out = x.to_vec();
    eval_word_into(maps, w.letters(), &mut out)?;
    Point::new(out)
}

/// In-place `f_w`, for hot loops. Letters must index `maps`.
pub(crate) fn eval_word_into(maps: &[ContractionMap], letters: &[u32], x: &mut Vec<f64>) -> Result<()> {
    let dim = x.len();
    if let Some(bad) = letters.iter().find(|&&l| l as usize >= maps.len()) {
        return Err(Error::LetterOutOfRange { letter: *bad, size: maps.len() });
    }
    if let Some(f) = maps.first() {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch { expected: f.dim(), got: dim });
        }
    }
    let mut tmp = vec![0.0; dim];
    for &l in letters.iter().rev() {
        maps[l as usize].apply(x, &mut tmp);
        std::mem::swap(x, &mut tmp);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// The affine map `f_w`, when every letter of `w` names an affine map.
pub fn compose_affine_word(maps: &[ContractionMap], letters: &[u32], dim: usize) -> Option<AffineMap> {
    letters
        .iter()
        .try_fold(AffineMap::identity(dim), |acc, &l| maps.get(l as usize)?.as_affine().map(|f| acc.compose(f)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `d(f(x), f(y))`
    pub image_distance: f64,
    /// `φ(d(x, y))`
    pub bound: f64,
}

impl Violation {
    pub fn excess(&self) -> f64 {
        self.image_distance - self.bound
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractivityReport {
    pub samples: usize,
    pub seed: u64,
    /// Sorted by decreasing excess.
    pub violations: Vec<Violation>,
    /// Largest `d(f(x), f(y)) − φ(d(x, y))` seen over all samples.
    pub worst_excess: f64,
}

impl ContractivityReport {
    /// No sampled pair violated the bound. Not a proof.
    pub fn no_violation_found(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples `samples` uniform pairs in `region` and records every pair with
/// `d(f(x), f(y)) > φ(d(x, y)) + 1e−12`.
pub fn check_phi_contractive(
    f: &ContractionMap,
    phi: &ComparisonFunction,
    samples: usize,
    region: &BoundingBox,
    seed: u64,
) -> Result<ContractivityReport> {
    let m = f.dim();
    if region.dim() != m {
        return Err(Error::DimensionMismatch { expected: m, got: region.dim() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |out: &mut [f64]| {
        for j in 0..m {
            let (lo, hi) = (region.lo[j], region.hi[j]);
            out[j] = if hi > lo { rng.random_range(lo..hi) } else { lo };
        }
    };
    let (mut x, mut y, mut fx, mut fy) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut violations = Vec::new();
    let mut worst_excess = f64::NEG_INFINITY;
    for _ in 0..samples {
        draw(&mut x);
        draw(&mut y);
        f.apply(&x, &mut fx);
        f.apply(&y, &mut fy);
        let image_distance = distance(&fx, &fy);
        let bound = phi.eval(distance(&x, &y))?;
        let excess = image_distance - bound;
        worst_excess = worst_excess.max(excess);
        if !(image_distance <= bound + CONTRACTIVITY_SLACK) {
            violations.push(Violation { x: x.clone(), y: y.clone(), image_distance, bound });
        }
    }
    violations.sort_by(|a, b| {
        b.excess()
            .total_cmp(&a.excess())
            .then_with(|| a.x.iter().map(|v| v.to_bits()).cmp(b.x.iter().map(|v| v.to_bits())))
    });
    Ok(ContractivityReport { samples, seed, violations, worst_excess })
}

/// The unique fixed point of an affine map by a direct linear solve.
pub fn affine_fixed_point(f: &ContractionMap) -> Result<Point> {
    f.as_affine().ok_or_else(|| Error::InvalidMap("closed-form fixed point needs an affine map".into()))?.fixed_point()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codespace::Alphabet;

    fn sim1(s: f64, b: f64) -> ContractionMap {
        ContractionMap::affine(AffineMap::similarity(s, vec![b]).unwrap())
    }

    fn cantor() -> Vec<ContractionMap> {
        vec![sim1(1.0 / 3.0, 0.0), sim1(1.0 / 3.0, 2.0 / 3.0)]
    }

    fn word(letters: &[u32]) -> Word {
        Word::new(Alphabet::new(2).unwrap(), letters.to_vec()).unwrap()
    }

    #[test]
    fn eval_map_examples() {
        assert_eq!(eval_map(&sim1(1.0 / 3.0, 0.0), &[1.0]).unwrap()[0], 1.0 / 3.0);
        assert_eq!(eval_map(&sim1(1.0 / 3.0, 2.0 / 3.0), &[1.0]).unwrap()[0], 1.0);
        let f = ContractionMap::affine(AffineMap::new(vec![0.5, 0.0, 0.0, 0.5], vec![0.5, 0.0]).unwrap());
        assert_eq!(&*eval_map(&f, &[1.0, 1.0]).unwrap(), &[1.0, 0.5]);
        assert!(matches!(eval_map(&f, &[1.0]), Err(Error::DimensionMismatch { .. })));
        let blowup = sim1(1e300, 0.0);
        assert!(matches!(eval_map(&blowup, &[1e300]), Err(Error::NonFinite)));
    }

    #[test]
    fn eval_word_examples() {
        let maps = cantor();
        assert_eq!(eval_word(&maps, &word(&[]), &[0.7]).unwrap()[0], 0.7);
        // hand composition: f0(f1(0)) = (0/3 + 2/3)/3, f1(f0(0)) = 0/3/3 + 2/3
        let f1_0 = 0.0 / 3.0 + 2.0 / 3.0;
        assert_eq!(eval_word(&maps, &word(&[0, 1]), &[0.0]).unwrap()[0], f1_0 / 3.0);
        assert!((eval_word(&maps, &word(&[0, 1]), &[0.0]).unwrap()[0] - 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(eval_word(&maps, &word(&[1, 0]), &[0.0]).unwrap()[0], 2.0 / 3.0);
    }

    #[test]
    fn phi_examples() {
        let half = ComparisonFunction::linear(0.5).unwrap();
        assert_eq!(phi_iterate(&half, 8.0, 3).unwrap(), 1.0);
        // brute iteration of t/(1+t) against the closed form t/(1+nt)
        let r = ComparisonFunction::Rational;
        let mut t = 1.0f64;
        for _ in 0..4 {
            t /= 1.0 + t;
        }
        assert_eq!(phi_iterate(&r, 1.0, 4).unwrap(), t);
        assert!((t - 0.2).abs() < 1e-15);
        for phi in [half.clone(), r.clone()] {
            assert_eq!(phi_iterate(&phi, 0.0, 7).unwrap(), 0.0);
            assert_eq!(phi_iterate(&phi, 3.5, 0).unwrap(), 3.5);
        }
        assert!(matches!(phi_eval(&half, -1.0), Err(Error::NegativeArgument(_))));
        assert!(ComparisonFunction::linear(1.0).is_err());
        assert!(ComparisonFunction::linear(0.0).is_err());
    }

    #[test]
    fn step_table_validation_and_eval() {
        let t = StepTable::new(vec![(0.0, 0.0), (1.0, 0.5), (2.0, 1.5)]).unwrap();
        let phi = ComparisonFunction::Table(t);
        assert_eq!(phi.eval(0.0).unwrap(), 0.0);
        assert_eq!(phi.eval(0.99).unwrap(), 0.0);
        // right-continuous: the jump belongs to the right piece
        assert_eq!(phi.eval(1.0).unwrap(), 0.5);
        assert_eq!(phi.eval(100.0).unwrap(), 1.5);
        assert!(StepTable::new(vec![(0.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(StepTable::new(vec![(0.5, 0.0)]).is_err());
        assert!(StepTable::new(vec![(0.0, 0.0), (2.0, 1.0), (1.0, 0.5)]).is_err());
        assert!(StepTable::new(vec![(0.0, 0.0), (1.0, 0.5), (2.0, 0.4)]).is_err());
    }

    #[test]
    fn contractivity_examples() {
        let f = sim1(1.0 / 3.0, 0.0);
        let region = BoundingBox { lo: vec![-10.0], hi: vec![10.0] };
        let third = ComparisonFunction::linear(1.0 / 3.0).unwrap();
        let quarter = ComparisonFunction::linear(0.25).unwrap();
        let r = check_phi_contractive(&f, &third, 1000, &region, DEFAULT_SEED).unwrap();
        assert!(r.no_violation_found());
        let r = check_phi_contractive(&f, &quarter, 1000, &region, DEFAULT_SEED).unwrap();
        assert_eq!(r.violations.len(), 1000);
        assert!(r.violations.windows(2).all(|w| w[0].excess() >= w[1].excess()));
        let double = sim1(2.0, 0.0);
        for phi in [third, ComparisonFunction::Rational] {
            let r = check_phi_contractive(&double, &phi, 100, &region, 3).unwrap();
            assert!(!r.no_violation_found());
        }
    }

    #[test]
    fn contractivity_is_reproducible() {
        let f = ContractionMap::new(
            MapKind::Named { family: NamedFamily::SoftShrink, scale: 1.0, offset: vec![0.0] },
            None,
        )
        .unwrap();
        let region = BoundingBox { lo: vec![-1.0], hi: vec![1.0] };
        let a = check_phi_contractive(&f, &ComparisonFunction::Rational, 500, &region, 9).unwrap();
        let b = check_phi_contractive(&f, &ComparisonFunction::Rational, 500, &region, 9).unwrap();
        assert_eq!(a, b);
        // x/(1+|x|) is not a t/(1+t)-contraction across the origin
        assert!(!a.no_violation_found());
        let pos = BoundingBox { lo: vec![0.0], hi: vec![10.0] };
        let c = check_phi_contractive(&f, &ComparisonFunction::Rational, 500, &pos, 9).unwrap();
        assert!(c.no_violation_found());
    }

    #[test]
    fn affine_fixed_point_examples() {
        assert!((affine_fixed_point(&sim1(1.0 / 3.0, 2.0 / 3.0)).unwrap()[0] - 1.0).abs() < 1e-15);
        assert!((affine_fixed_point(&sim1(1.0 / 9.0, 2.0 / 9.0)).unwrap()[0] - 0.25).abs() < 1e-15);
        assert_eq!(affine_fixed_point(&sim1(0.5, 0.0)).unwrap()[0], 0.0);
        assert!(matches!(affine_fixed_point(&sim1(1.0, 1.0)), Err(Error::Singular)));
    }

    #[test]
    fn operator_norm_estimates() {
        let rot = AffineMap::new(vec![0.0, -0.7, 0.7, 0.0], vec![0.0, 0.0]).unwrap();
        assert!((rot.operator_norm() - 0.7).abs() < 1e-12);
        let shear = AffineMap::new(vec![0.5, 0.4, 0.0, 0.5], vec![0.0, 0.0]).unwrap();
        // largest singular value of [[.5,.4],[0,.5]] is (0.4 + sqrt(0.16 + 1))/2
        let expect = (0.4 + (0.16f64 + 1.0).sqrt()) / 2.0;
        assert!((shear.operator_norm() - expect).abs() < 1e-10);
        // a too-small linear witness is rejected
        let kind = MapKind::Affine(shear);
        assert!(ContractionMap::new(kind.clone(), Some(ComparisonFunction::linear(0.7).unwrap())).is_err());
        assert!(ContractionMap::new(kind, Some(ComparisonFunction::linear(0.74).unwrap())).is_ok());
    }

    #[test]
    fn affine_word_composition_matches_pointwise() {
        let maps = cantor();
        let f = compose_affine_word(&maps, &[0, 1, 1], 1).unwrap();
        let direct = eval_word(&maps, &word(&[0, 1, 1]), &[0.3]).unwrap();
        let mut out = [0.0];
        f.apply(&[0.3], &mut out);
        assert!((out[0] - direct[0]).abs() < 1e-15);
    }
}

//! Executable property checks for an IFS, each producing a [`CheckReport`].
//!
//! Limit statements are checked through finite-depth inequalities. A check
//! whose verdict combines several conditions reports a normalized residual:
//! the largest excess over its own bound, so it passes iff the residual is
//! at most 0.

use std::cell::OnceCell;
use std::collections::HashSet;
use std::fmt;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codespace::{self, dyadic, periodicize, AddressSpec, Alphabet, Letter, Word};
use crate::contractions::{
    check_phi_contractive, compose_affine_word, eval_word_into, operator_norm, AffineMap, ComparisonFunction,
    ContractionMap, CONTRACTIVITY_SLACK,
};
use crate::error::{Error, Result};
use crate::ifscore::{AttractorResult, IfsInstance, Tolerances};
use crate::metricsets::{
    directed_hausdorff, distance, extreme_points, format_coord, hausdorff, point_set_distance, BoundingBox, PointCloud,
};

pub const DEFAULT_VERIFY_SEED: u64 = 0x05ee_d1f5;
/// Slack allowed on "non-increasing" steps.
pub const STEP_SLACK: f64 = 1e-12;
pub const UNION_TOLERANCE: f64 = 1e-12;
pub const CONTINUITY_TOLERANCE: f64 = 1e-12;
const MAX_SAMPLE_PERIOD: usize = 4;
const RANDOM_ADDRESSES: usize = 32;
const MAX_RANDOM_PREPERIOD: usize = 6;
const CONTINUITY_PARTNERS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub id: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    /// Inputs attaining the worst residual.
    pub witness: String,
    /// Per-depth or per-length values, when the check has them.
    pub series: Vec<f64>,
    pub params: Vec<(String, String)>,
}

impl CheckReport {
    pub fn new(id: &str, residual: f64, tolerance: f64, witness: impl Into<String>) -> Self {
        Self {
            id: id.to_string(),
            passed: residual <= tolerance,
            residual,
            tolerance,
            witness: witness.into(),
            series: Vec::new(),
            params: Vec::new(),
        }
    }

    pub fn from_error(id: &str, err: &Error) -> Self {
        Self::new(id, f64::INFINITY, 0.0, format!("error: {err}"))
    }

    pub fn param(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn with_series(mut self, series: Vec<f64>) -> Self {
        self.series = series;
        self
    }

    /// Excess of the residual over the tolerance.
    pub fn excess(&self) -> f64 {
        self.residual - self.tolerance
    }

    /// All parts must pass; the residual is the worst part's excess.
    pub fn combine(id: &str, parts: &[CheckReport]) -> Self {
        let worst = parts.iter().enumerate().fold(None::<(usize, f64)>, |acc, (i, p)| match acc {
            Some((_, e)) if !(p.excess() > e) => acc,
            _ => Some((i, p.excess())),
        });
        match worst {
            None => Self::new(id, f64::NEG_INFINITY, 0.0, "no parts"),
            Some((i, e)) => {
                let mut r = Self::new(id, e, 0.0, format!("{}: {}", parts[i].id, parts[i].witness));
                r.passed = parts.iter().all(|p| p.passed);
                r.param("parts", parts.iter().map(|p| p.id.as_str()).collect::<Vec<_>>().join(","))
            }
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CHECK {} {} residual={} tol={} witness=\"{}\"",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            format_coord(self.residual),
            format_coord(self.tolerance),
            self.witness.replace('"', "'"),
        )?;
        if !self.series.is_empty() {
            let s: Vec<String> = self.series.iter().map(|&v| format_coord(v)).collect();
            write!(f, " series={}", s.join(","))?;
        }
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// Positive iff `next` is not strictly below `prev`; a run of zeros counts as decreasing.
fn strict_step_excess(prev: f64, next: f64) -> f64 {
    if prev == 0.0 && next == 0.0 {
        f64::NEG_INFINITY
    } else if next < prev {
        next - prev
    } else {
        (next - prev).max(f64::MIN_POSITIVE)
    }
}

/// Positive iff `value < bound` fails.
fn strict_below_excess(value: f64, bound: f64) -> f64 {
    if value < bound {
        value - bound
    } else {
        (value - bound).max(f64::MIN_POSITIVE)
    }
}

fn fmt_point(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|&v| format_coord(v)).collect();
    format!("({})", parts.join(","))
}

fn fmt_depths(depths: &[usize]) -> String {
    match depths {
        [] => String::new(),
        [a] => a.to_string(),
        [a, .., b] if depths.windows(2).all(|w| w[1] == w[0] + 1) => format!("{a}..{b}"),
        _ => depths.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
    }
}

/// Index and value of the first maximum; NaN counts as +∞.
fn argmax(values: impl IntoIterator<Item = f64>) -> Option<(usize, f64)> {
    values.into_iter().enumerate().fold(None, |acc, (i, v)| {
        let v = if v.is_nan() { f64::INFINITY } else { v };
        match acc {
            Some((_, best)) if !(v > best) => acc,
            _ => Some((i, v)),
        }
    })
}

/// Every periodic address with period length ≤ 4, plus 32 seeded random
/// preperiod/period combinations, closed under the shift.
pub fn sample_addresses(alphabet: Alphabet, seed: u64) -> Result<Vec<AddressSpec>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut add = |a: AddressSpec, out: &mut Vec<AddressSpec>| {
        for s in a.shift_orbit() {
            if seen.insert(s.clone()) {
                out.push(s);
            }
        }
    };
    for w in codespace::enumerate_words_up_to(alphabet, MAX_SAMPLE_PERIOD, codespace::DEFAULT_WORD_CAP)? {
        add(periodicize(&w)?, &mut out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = alphabet.size() as Letter;
    for _ in 0..RANDOM_ADDRESSES {
        let pre_len = rng.random_range(0..=MAX_RANDOM_PREPERIOD);
        let per_len = rng.random_range(1..=MAX_SAMPLE_PERIOD);
        let pre: Vec<Letter> = (0..pre_len).map(|_| rng.random_range(0..k)).collect();
        let per: Vec<Letter> = (0..per_len).map(|_| rng.random_range(0..k)).collect();
        add(AddressSpec::new(Word::new(alphabet, pre)?, Word::new(alphabet, per)?)?, &mut out);
    }
    Ok(out)
}

fn random_cloud(rng: &mut ChaCha8Rng, dim: usize, max_points: usize) -> PointCloud {
    let n = rng.random_range(1..=max_points);
    let coords = (0..n * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    PointCloud::new(dim, coords).expect("finite coordinates")
}

/// `H(∪H_i, ∪K_i) ≤ max_i H(H_i, K_i)` over random planar families.
pub fn check_union_inequality(trials: usize, family_size: usize, cloud_size: usize, seed: u64) -> Result<CheckReport> {
    if trials == 0 || family_size == 0 || cloud_size == 0 {
        return Err(Error::InvalidInstance("trial, family and cloud counts must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (f64::NEG_INFINITY, 0);
    for t in 0..trials {
        let h: Vec<PointCloud> = (0..family_size).map(|_| random_cloud(&mut rng, 2, cloud_size)).collect();
        let k: Vec<PointCloud> = (0..family_size).map(|_| random_cloud(&mut rng, 2, cloud_size)).collect();
        let (uh, uk) = (union_all(&h)?, union_all(&k)?);
        let mut member_max = f64::NEG_INFINITY;
        for (a, b) in h.iter().zip(&k) {
            member_max = member_max.max(hausdorff(a, b)?);
        }
        let r = hausdorff(&uh, &uk)? - member_max;
        if r > worst.0 {
            worst = (r, t);
        }
    }
    Ok(CheckReport::new("union-inequality", worst.0, UNION_TOLERANCE, format!("seed={seed} trial={}", worst.1))
        .param("trials", trials)
        .param("family_size", family_size)
        .param("cloud_size", cloud_size))
}

fn union_all(family: &[PointCloud]) -> Result<PointCloud> {
    let mut it = family.iter();
    let first = it.next().ok_or(Error::EmptyCloud)?.clone();
    it.try_fold(first, |acc, c| acc.union(c))
}

fn prefixes_agree(a: &AddressSpec, b: &AddressSpec, m: usize) -> bool {
    (0..m).all(|k| a.letter(k) == b.letter(k))
}

/// Small code distance forces long shared prefixes: `d(a, b) < 2^-m` implies
/// `[a]_m = [b]_m`, over sampled pairs and over sequences converging to each sample.
pub fn check_prefix_stabilization(addresses: &[AddressSpec], max_depth: usize) -> Result<CheckReport> {
    let mut violations = 0usize;
    let mut witness = String::from("none");
    let mut note = |a: &AddressSpec, b: &AddressSpec, m: usize, violations: &mut usize| {
        if *violations == 0 {
            witness = format!("a={a} b={b} depth={m}");
        }
        *violations += 1;
    };
    for (i, a) in addresses.iter().enumerate() {
        for b in &addresses[i + 1..] {
            let d = a.distance(b)?;
            for m in 0..=max_depth {
                if d < dyadic(m) && !prefixes_agree(a, b, m) {
                    note(a, b, m, &mut violations);
                }
            }
        }
        if a.alphabet().size() < 2 {
            continue;
        }
        // a_n shares exactly n letters with a; its distance must shrink and its prefixes settle
        let mut prev = f64::INFINITY;
        for n in 0..max_depth {
            let other = (a.letter(n) + 1) % a.alphabet().size() as Letter;
            let tail = AddressSpec::new(Word::empty(a.alphabet()), Word::new(a.alphabet(), vec![other])?)?;
            let an = tail.prepend(&a.prefix(n))?;
            let d = an.distance(a)?;
            if !(d < prev) {
                note(a, &an, n, &mut violations);
            }
            prev = d;
            for m in 0..=max_depth {
                if d < dyadic(m) && !prefixes_agree(a, &an, m) {
                    note(a, &an, m, &mut violations);
                }
            }
        }
    }
    Ok(CheckReport::new("prefix-stabilization", violations as f64, 0.0, witness)
        .param("addresses", addresses.len())
        .param("max_depth", max_depth))
}

fn all_affine(ifs: &IfsInstance) -> bool {
    ifs.maps().iter().all(|f| f.as_affine().is_some())
}

/// Lipschitz bound of `f_w`: the operator norm of the composed matrix for
/// affine words, the product of per-map bounds otherwise.
fn word_lipschitz(ifs: &IfsInstance, letters: &[Letter]) -> f64 {
    match compose_affine_word(ifs.maps(), letters, ifs.dim()) {
        Some(f) => operator_norm(f.matrix(), f.dim()),
        None => letters.iter().map(|&l| ifs.maps()[l as usize].lipschitz_bound()).product(),
    }
}

fn image_diameter(ifs: &IfsInstance, letters: &[Letter], cloud: &PointCloud) -> Result<f64> {
    let w = Word::new(ifs.alphabet(), letters.to_vec())?;
    Ok(ifs.word_image(&w, cloud)?.diameter())
}

fn eval_letters(ifs: &IfsInstance, letters: &[Letter], x: &[f64]) -> Result<Vec<f64>> {
    let mut buf = x.to_vec();
    eval_word_into(ifs.maps(), letters, &mut buf)?;
    Ok(buf)
}

/// Nested images `f_{[ω]_n}(M)` of an approximately invariant cloud `M`:
/// diameters are non-increasing up to the invariance defect, shrink overall,
/// and `π(ω)` sits in each image via `π(ω) = f_{[ω]_n}(π(σ^n ω))`.
pub fn check_nested_intersection(
    ifs: &IfsInstance,
    superset: &PointCloud,
    addresses: &[AddressSpec],
    max_depth: usize,
) -> Result<CheckReport> {
    let defect = ifs.invariance_residual(superset)?;
    let reduced = if all_affine(ifs) { extreme_points(superset) } else { superset.clone() };
    let member_tol = 10.0 * ifs.tolerances().tol_point;
    let per: Vec<(f64, String)> = addresses
        .par_iter()
        .map(|a| -> Result<(f64, String)> {
            let pa = ifs.coding_map(a)?;
            let letters = a.prefix(max_depth).letters().to_vec();
            let mut diams = Vec::with_capacity(max_depth + 1);
            let mut worst = (f64::NEG_INFINITY, String::new());
            let mut bump = |e: f64, why: String| {
                if e > worst.0 {
                    worst = (e, why);
                }
            };
            for n in 0..=max_depth {
                diams.push(image_diameter(ifs, &letters[..n], &reduced)?);
                if n > 0 {
                    let slack = 2.0 * defect * word_lipschitz(ifs, &letters[..n - 1]) + STEP_SLACK;
                    bump(diams[n] - diams[n - 1] - slack, format!("address={a} depth={n} diameter grew"));
                }
                let tail = ifs.coding_map(&shift_by(a, n))?;
                let img = eval_letters(ifs, &letters[..n], &tail)?;
                bump(distance(&img, &pa) - member_tol, format!("address={a} depth={n} coded point outside image"));
            }
            bump(strict_step_excess(diams[0], diams[max_depth]), format!("address={a} no shrinkage"));
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let (i, residual) = argmax(per.iter().map(|p| p.0)).unwrap_or((0, f64::NEG_INFINITY));
    let witness = per.get(i).map(|p| p.1.clone()).unwrap_or_default();
    Ok(CheckReport::new("nested-intersection", residual, 0.0, witness)
        .param("addresses", addresses.len())
        .param("max_depth", max_depth)
        .param("invariance_defect", format_coord(defect)))
}

fn shift_by(a: &AddressSpec, n: usize) -> AddressSpec {
    (0..n).fold(a.clone(), |acc, _| acc.shift())
}

/// `s_n = max_{ω, x ∈ B} d(f_{[ω]_n}(x), π(ω))`; passes iff `s_n` is
/// non-increasing and the last one is below `tol_attr`.
pub fn check_point_fibred(
    ifs: &IfsInstance,
    b: &PointCloud,
    depths: &[usize],
    addresses: &[AddressSpec],
) -> Result<CheckReport> {
    if depths.is_empty() || depths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInstance("depths must be non-empty and increasing".into()));
    }
    if addresses.is_empty() {
        return Err(Error::InvalidInstance("no addresses to sample".into()));
    }
    b.check_dim(ifs.dim())?;
    let max_depth = *depths.last().expect("non-empty");
    // per address, per depth: (distance, point index)
    let table: Vec<Vec<(f64, usize)>> = addresses
        .par_iter()
        .map(|a| -> Result<Vec<(f64, usize)>> {
            let code = ifs.coding_map(a)?;
            let letters = a.prefix(max_depth).letters().to_vec();
            let mut buf = Vec::with_capacity(ifs.dim());
            depths
                .iter()
                .map(|&n| {
                    let ds = b.points().map(|x| {
                        buf.clear();
                        buf.extend_from_slice(x);
                        match eval_word_into(ifs.maps(), &letters[..n], &mut buf) {
                            Ok(()) => distance(&buf, &code),
                            Err(_) => f64::INFINITY,
                        }
                    });
                    let (j, d) = argmax(ds).expect("non-empty cloud");
                    Ok((d, j))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut series = Vec::with_capacity(depths.len());
    let mut arg = Vec::with_capacity(depths.len());
    for k in 0..depths.len() {
        let (i, d) = argmax(table.iter().map(|row| row[k].0)).expect("non-empty addresses");
        series.push(d);
        arg.push((i, table[i][k].1));
    }
    let describe = |k: usize| {
        let (i, j) = arg[k];
        format!("address={} depth={} x={}", addresses[i], depths[k], fmt_point(b.point(j)))
    };
    let tol_attr = ifs.tolerances().tol_attr;
    let mut parts: Vec<(f64, usize)> =
        series.windows(2).enumerate().map(|(k, w)| (w[1] - w[0] - STEP_SLACK, k + 1)).collect();
    let last = series.len() - 1;
    parts.push((strict_below_excess(series[last], tol_attr), last));
    let (p, residual) = argmax(parts.iter().map(|p| p.0)).expect("at least one part");
    Ok(CheckReport::new("uniform-fibred", residual, 0.0, describe(parts[p].1))
        .with_series(series)
        .param("depths", fmt_depths(depths))
        .param("addresses", addresses.len())
        .param("points", b.len())
        .param("tol_attr", format_coord(tol_attr)))
}

/// `f_i(π(a)) = π(τ_i(a))` for every sampled address and letter.
pub fn check_equivariance(ifs: &IfsInstance, addresses: &[AddressSpec]) -> Result<CheckReport> {
    let per: Vec<(f64, Letter)> = addresses
        .par_iter()
        .map(|a| -> Result<(f64, Letter)> {
            let pa = ifs.coding_map(a)?;
            let mut worst = (f64::NEG_INFINITY, 0);
            for i in ifs.alphabet().letters() {
                let lhs = ifs.maps()[i as usize].eval(&pa)?;
                let rhs = ifs.coding_map(&a.shift_insert(i)?)?;
                let d = distance(&lhs, &rhs);
                if d > worst.0 {
                    worst = (d, i);
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let (k, residual) = argmax(per.iter().map(|p| p.0)).unwrap_or((0, f64::NEG_INFINITY));
    let witness = addresses.get(k).map(|a| format!("letter={} address={a}", per[k].1)).unwrap_or_default();
    Ok(CheckReport::new("equivariance", residual, 10.0 * ifs.tolerances().tol_point, witness)
        .param("addresses", addresses.len())
        .param("letters", ifs.alphabet().size()))
}

/// Continuity modulus of the coding map: for `a`, `b` sharing exactly the
/// prefix `β` of length `m`, `d(π(a), π(b)) ≤ diam(f_β(M))`. `M` must contain
/// `π(c)` for every sampled `c`, and the sample must be shift-closed.
pub fn check_pi_continuity(
    ifs: &IfsInstance,
    superset: &PointCloud,
    addresses: &[AddressSpec],
    m_depths: &[usize],
) -> Result<CheckReport> {
    let reduced = if all_affine(ifs) { extreme_points(superset) } else { superset.clone() };
    let codes: Vec<Vec<f64>> =
        addresses.par_iter().map(|a| ifs.coding_map(a).map(|p| p.into_inner())).collect::<Result<_>>()?;
    let n = addresses.len();
    let per: Vec<(f64, String)> = (0..n)
        .into_par_iter()
        .map(|ai| -> Result<(f64, String)> {
            let a = &addresses[ai];
            let mut worst = (f64::NEG_INFINITY, String::new());
            for &m in m_depths {
                let beta = a.prefix(m);
                let bound = image_diameter(ifs, beta.letters(), &reduced)?;
                let next = a.letter(m);
                let partners = (0..n)
                    .map(|k| (ai * 7 + m + k) % n)
                    .filter(|&ci| addresses[ci].letter(0) != next)
                    .take(CONTINUITY_PARTNERS);
                for ci in partners {
                    let b = addresses[ci].prepend(&beta)?;
                    let pb = ifs.coding_map(&b)?;
                    let r = distance(&codes[ai], &pb) - bound;
                    if r > worst.0 {
                        worst = (r, format!("a={a} b={b} prefix_len={m}"));
                    }
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let (i, residual) = argmax(per.iter().map(|p| p.0)).unwrap_or((0, f64::NEG_INFINITY));
    let witness = per.get(i).map(|p| p.1.clone()).unwrap_or_default();
    Ok(CheckReport::new("pi-continuity", residual, CONTINUITY_TOLERANCE, witness)
        .param("addresses", n)
        .param("prefix_lens", fmt_depths(m_depths))
        .param("superset_points", superset.len()))
}

/// The coding map lands on the attractor cloud and covers it: every `π(a)`
/// is within the proximity bound of the cloud, and the points `π(w·0̇)`,
/// `|w| = cover_len`, reach every cloud point within
/// `bound + max_w Lip(f_w)·(diam + 2·bound)`.
pub fn check_attractor_coding(
    ifs: &IfsInstance,
    attractor: &AttractorResult,
    addresses: &[AddressSpec],
    cover_len: usize,
) -> Result<CheckReport> {
    if !attractor.converged {
        return Ok(CheckReport::new("attractor-coding", f64::INFINITY, 0.0, "attractor not converged"));
    }
    let cloud = &attractor.cloud;
    let prox = ifs.proximity_bound();
    let near: Vec<f64> =
        addresses.par_iter().map(|a| point_set_distance(&ifs.coding_map(a)?, cloud)).collect::<Result<_>>()?;
    let (ni, near_max) = argmax(near.iter().copied()).unwrap_or((0, f64::NEG_INFINITY));

    let words = codespace::enumerate_words(ifs.alphabet(), cover_len, ifs.tolerances().word_cap)?;
    let anchor = ifs.word_fixed_point(&Word::new(ifs.alphabet(), vec![0])?)?;
    let images: Vec<(Vec<f64>, f64)> = words
        .par_iter()
        .map(|w| Ok((eval_letters(ifs, w.letters(), &anchor)?, word_lipschitz(ifs, w.letters()))))
        .collect::<Result<_>>()?;
    let lip = images.iter().map(|p| p.1).fold(0.0, f64::max);
    let cover_cloud = PointCloud::new(ifs.dim(), images.into_iter().flat_map(|p| p.0).collect())?;
    let cover = directed_hausdorff(cloud, &cover_cloud)?;
    let cover_bound = prox + lip * (cloud.diameter() + 2.0 * prox);

    let near_part = near_max - prox;
    let cover_part = cover - cover_bound;
    let witness = if near_part >= cover_part {
        addresses.get(ni).map(|a| format!("address={a} distance={}", format_coord(near_max))).unwrap_or_default()
    } else {
        format!("cover_len={cover_len} gap={} bound={}", format_coord(cover), format_coord(cover_bound))
    };
    Ok(CheckReport::new("attractor-coding", near_part.max(cover_part), 0.0, witness)
        .param("addresses", addresses.len())
        .param("cover_len", cover_len)
        .param("proximity_bound", format_coord(prox)))
}

/// `word_fixed_point(w) = π(ẇ)` for every non-empty `w` with `|w| ≤ max_word_len`.
pub fn check_fixed_points(ifs: &IfsInstance, max_word_len: usize) -> Result<CheckReport> {
    let words = codespace::enumerate_words_up_to(ifs.alphabet(), max_word_len, ifs.tolerances().word_cap)?;
    let ds: Vec<f64> = words
        .par_iter()
        .map(|w| Ok(distance(&ifs.word_fixed_point(w)?, &ifs.coding_map(&periodicize(w)?)?)))
        .collect::<Result<_>>()?;
    let (i, residual) = argmax(ds.iter().copied()).unwrap_or((0, f64::NEG_INFINITY));
    let witness = words.get(i).map(|w| format!("word={w}")).unwrap_or_default();
    Ok(CheckReport::new("fixed-points", residual, 10.0 * ifs.tolerances().tol_point, witness)
        .param("max_word_len", max_word_len)
        .param("words", words.len()))
}

/// `e_L = max_{x ∈ cloud} d(x, P_L)` with `P_L` the fixed points of all words
/// of length ≤ L; passes iff `e_L` strictly decreases (runs of zeros allowed)
/// and the last is below `10·tol_attr + δ`.
pub fn check_periodic_density(
    ifs: &IfsInstance,
    attractor: &AttractorResult,
    word_lens: &[usize],
) -> Result<CheckReport> {
    if word_lens.is_empty() || word_lens.windows(2).any(|w| w[1] <= w[0]) || word_lens[0] == 0 {
        return Err(Error::InvalidInstance("word lengths must be positive and increasing".into()));
    }
    let lmax = *word_lens.last().expect("non-empty");
    let words = codespace::enumerate_words_up_to(ifs.alphabet(), lmax, ifs.tolerances().word_cap)?;
    let fixed: Vec<Vec<f64>> =
        words.par_iter().map(|w| ifs.word_fixed_point(w).map(|p| p.into_inner())).collect::<Result<_>>()?;
    let mut series = Vec::with_capacity(word_lens.len());
    for &l in word_lens {
        let count = words.partition_point(|w| w.len() <= l);
        let periodic = PointCloud::new(ifs.dim(), fixed[..count].concat())?;
        series.push(directed_hausdorff(&attractor.cloud, &periodic)?);
    }
    let tol = ifs.tolerances();
    let bound = 10.0 * tol.tol_attr + tol.dedup_cell();
    let mut parts: Vec<(f64, usize)> =
        series.windows(2).enumerate().map(|(k, w)| (strict_step_excess(w[0], w[1]), k + 1)).collect();
    let last = series.len() - 1;
    parts.push((strict_below_excess(series[last], bound), last));
    let (p, mut residual) = argmax(parts.iter().map(|p| p.0)).expect("at least one part");
    let mut witness = format!("word_len={} e={}", word_lens[parts[p].1], format_coord(series[parts[p].1]));
    if !attractor.converged {
        residual = f64::INFINITY;
        witness = "attractor not converged".into();
    }
    Ok(CheckReport::new("periodic-density", residual, 0.0, witness)
        .with_series(series)
        .param("word_lens", fmt_depths(word_lens))
        .param("bound", format_coord(bound)))
}

/// Comparison function used for a map: its declared witness, otherwise the
/// linear one from its Lipschitz bound when that is below 1.
pub fn effective_witness(f: &ContractionMap) -> Option<ComparisonFunction> {
    if let Some(w) = f.witness() {
        return Some(w.clone());
    }
    let c = f.lipschitz_bound() + 1e-12;
    (c < 1.0).then(|| ComparisonFunction::linear(c.max(f64::EPSILON)).expect("c in (0, 1)"))
}

/// Sampled `d(f_i x, f_i y) ≤ φ_i(d(x, y))` for every map over `region`.
pub fn check_phi_contractivity(
    ifs: &IfsInstance,
    region: &BoundingBox,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let mut parts = Vec::with_capacity(ifs.maps().len());
    for (i, f) in ifs.maps().iter().enumerate() {
        let id = format!("map{i}");
        let Some(phi) = effective_witness(f) else {
            parts.push(CheckReport::new(
                &id,
                f64::INFINITY,
                0.0,
                format!("map={i} has no witness and Lipschitz bound {}", format_coord(f.lipschitz_bound())),
            ));
            continue;
        };
        let rep = check_phi_contractive(f, &phi, samples, region, seed.wrapping_add(i as u64))?;
        let witness = match rep.violations.first() {
            Some(v) => format!("map={i} x={} y={}", fmt_point(&v.x), fmt_point(&v.y)),
            None => format!("map={i}"),
        };
        parts.push(CheckReport::new(&id, rep.worst_excess, CONTRACTIVITY_SLACK, witness));
    }
    Ok(CheckReport::combine("c1-phi-contractive", &parts).param("samples", samples).param("seed", seed))
}

/// Certificate on `B`: max image diameters strictly decrease, end below
/// `threshold`, and respect `φ^[n](diam B)` when a common witness exists.
pub fn check_diminishing(ifs: &IfsInstance, b: &PointCloud, max_n: usize, threshold: f64) -> Result<CheckReport> {
    let cert = ifs.diminishing_certificate(b, max_n, Some(threshold))?;
    let mut parts: Vec<(f64, String)> = Vec::new();
    let mut prev = cert.diam_b;
    for (k, &d) in cert.max_diams.iter().enumerate() {
        parts.push((strict_step_excess(prev, d), format!("depth={} word={}", k + 1, cert.worst_words[k])));
        prev = d;
        if let Some(bounds) = &cert.phi_bounds {
            parts.push((
                d - bounds[k] - STEP_SLACK,
                format!("depth={} word={} above comparison bound", k + 1, cert.worst_words[k]),
            ));
        }
    }
    if let (Some(&last), Some(w)) = (cert.max_diams.last(), cert.worst_words.last()) {
        parts.push((strict_below_excess(last, threshold), format!("depth={max_n} word={w}")));
    }
    let (i, residual) = argmax(parts.iter().map(|p| p.0)).unwrap_or((0, f64::NEG_INFINITY));
    let witness = parts.get(i).map(|p| p.1.clone()).unwrap_or_default();
    Ok(CheckReport::new("c4-diminishing", residual, 0.0, witness)
        .with_series(cert.max_diams)
        .param("max_n", max_n)
        .param("threshold", format_coord(threshold))
        .param("points", b.len()))
}

const CHAIN_EDGES: [(usize, usize, &str); 5] =
    [(0, 3, "1'->4'"), (3, 2, "4'->3'"), (2, 1, "3'->2'"), (3, 4, "4'->5'"), (4, 1, "5'->2'")];

/// Counts implications `p ⇒ q` of the chain with `p` passing and `q` failing.
/// `passes` is indexed by step 1′..5′.
pub fn chain_consistency(passes: [bool; 5]) -> CheckReport {
    let broken: Vec<&str> =
        CHAIN_EDGES.iter().filter(|&&(p, q, _)| passes[p] && !passes[q]).map(|&(_, _, name)| name).collect();
    let witness = if broken.is_empty() {
        "all implications consistent".to_string()
    } else {
        format!("inconsistent: {}", broken.join(","))
    };
    let flags: String = passes.iter().map(|&p| if p { 'P' } else { 'F' }).collect();
    CheckReport::new("chain-consistency", broken.len() as f64, 0.0, witness).param("steps", flags)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckId {
    UnionInequality,
    PrefixStabilization,
    NestedIntersection,
    UniformFibred,
    Equivariance,
    PiContinuity,
    AttractorCoding,
    FixedPoints,
    PeriodicDensity,
    PhiContractive,
    LocalFibred,
    ChainUniformFibred,
    Diminishing,
    ChainAttractor,
    Chain,
}

impl CheckId {
    pub const PROPERTIES: [CheckId; 9] = [
        CheckId::UnionInequality,
        CheckId::PrefixStabilization,
        CheckId::NestedIntersection,
        CheckId::UniformFibred,
        CheckId::Equivariance,
        CheckId::PiContinuity,
        CheckId::AttractorCoding,
        CheckId::FixedPoints,
        CheckId::PeriodicDensity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::UnionInequality => "union-inequality",
            CheckId::PrefixStabilization => "prefix-stabilization",
            CheckId::NestedIntersection => "nested-intersection",
            CheckId::UniformFibred => "uniform-fibred",
            CheckId::Equivariance => "equivariance",
            CheckId::PiContinuity => "pi-continuity",
            CheckId::AttractorCoding => "attractor-coding",
            CheckId::FixedPoints => "fixed-points",
            CheckId::PeriodicDensity => "periodic-density",
            CheckId::PhiContractive => "c1-phi-contractive",
            CheckId::LocalFibred => "c2-local-fibred",
            CheckId::ChainUniformFibred => "c3-uniform-fibred",
            CheckId::Diminishing => "c4-diminishing",
            CheckId::ChainAttractor => "c5-attractor",
            CheckId::Chain => "chain",
        }
    }

    pub fn parse(s: &str) -> Result<CheckId> {
        let s = s.trim();
        let alias = match s {
            "1'" | "c1" => Some(CheckId::PhiContractive),
            "2'" | "c2" => Some(CheckId::LocalFibred),
            "3'" | "c3" => Some(CheckId::ChainUniformFibred),
            "4'" | "c4" => Some(CheckId::Diminishing),
            "5'" | "c5" => Some(CheckId::ChainAttractor),
            _ => None,
        };
        alias
            .or_else(|| {
                CheckId::PROPERTIES
                    .iter()
                    .chain(&[
                        CheckId::PhiContractive,
                        CheckId::LocalFibred,
                        CheckId::ChainUniformFibred,
                        CheckId::Diminishing,
                        CheckId::ChainAttractor,
                        CheckId::Chain,
                    ])
                    .copied()
                    .find(|id| id.as_str() == s)
            })
            .ok_or_else(|| Error::UnknownCheck(s.to_string()))
    }

    /// Comma-separated ids; `all` selects every property check and the chain.
    pub fn parse_list(s: &str) -> Result<Vec<CheckId>> {
        let mut out = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if tok == "all" {
                out.extend(CheckId::PROPERTIES);
                out.push(CheckId::Chain);
            } else {
                out.push(CheckId::parse(tok)?);
            }
        }
        if out.is_empty() {
            return Err(Error::UnknownCheck(s.to_string()));
        }
        let mut seen = HashSet::new();
        out.retain(|id| seen.insert(*id));
        Ok(out)
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Attractor seed; `None` means the origin.
    pub seed_cloud: Option<PointCloud>,
    /// Deepest prefix for the point-fibred checks.
    pub fibred_depth: usize,
    /// Pairs sampled per map for contractivity.
    pub pair_samples: usize,
    /// Word budget for the certificate and the covering check.
    pub word_budget: usize,
    /// Word budget for the periodic-density lengths.
    pub density_budget: usize,
    /// Certificate threshold as a fraction of `diam(B)`.
    pub cert_ratio: f64,
    pub fixed_point_len: usize,
    pub nested_depth: usize,
    pub continuity_prefix_lens: Vec<usize>,
    pub union_trials: usize,
    pub union_family_size: usize,
    pub union_cloud_size: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_VERIFY_SEED,
            seed_cloud: None,
            fibred_depth: 40,
            pair_samples: 10_000,
            word_budget: 4096,
            density_budget: 1 << 14,
            cert_ratio: 0.1,
            fixed_point_len: 4,
            nested_depth: 12,
            continuity_prefix_lens: vec![0, 1, 2, 3, 4, 6],
            union_trials: 100,
            union_family_size: 3,
            union_cloud_size: 5,
        }
    }
}

/// Largest `n ≥ 1` with `|I|^n ≤ budget`, capped at 64.
pub fn budget_depth(alphabet: Alphabet, budget: usize) -> usize {
    let mut n = 1;
    while n < 64 && codespace::word_count(alphabet, n + 1) <= budget as u128 {
        n += 1;
    }
    n
}

/// Even lengths `2, 4, …` whose total word count stays within `budget`.
pub fn density_word_lens(alphabet: Alphabet, budget: usize) -> Vec<usize> {
    let mut lens = vec![2];
    let total = |l: usize| (1..=l).map(|k| codespace::word_count(alphabet, k)).sum::<u128>();
    while lens.len() < 12 && total(lens[lens.len() - 1] + 2) <= budget as u128 {
        lens.push(lens[lens.len() - 1] + 2);
    }
    lens
}

/// Runs checks against one instance, sharing the attractor, the address
/// sample and the reference superset between them.
pub struct Verifier<'a> {
    ifs: &'a IfsInstance,
    opts: VerifyOptions,
    samples: Vec<AddressSpec>,
    attractor: OnceCell<AttractorResult>,
    superset: OnceCell<PointCloud>,
}

impl<'a> Verifier<'a> {
    pub fn new(ifs: &'a IfsInstance, opts: VerifyOptions) -> Result<Self> {
        let samples = sample_addresses(ifs.alphabet(), opts.seed)?;
        Ok(Self { ifs, opts, samples, attractor: OnceCell::new(), superset: OnceCell::new() })
    }

    pub fn options(&self) -> &VerifyOptions {
        &self.opts
    }

    pub fn samples(&self) -> &[AddressSpec] {
        &self.samples
    }

    pub fn attractor(&self) -> Result<&AttractorResult> {
        if let Some(a) = self.attractor.get() {
            return Ok(a);
        }
        let seed = match &self.opts.seed_cloud {
            Some(c) => c.clone(),
            None => PointCloud::singleton(&vec![0.0; self.ifs.dim()])?,
        };
        let a = self.ifs.attractor(&seed)?;
        Ok(self.attractor.get_or_init(|| a))
    }

    /// `M_B ∪ B` with `B = π(samples)`, `B` kept unsnapped.
    pub fn reference_superset(&self) -> Result<&PointCloud> {
        if let Some(m) = self.superset.get() {
            return Ok(m);
        }
        let coded: Vec<f64> = self
            .samples
            .par_iter()
            .map(|a| self.ifs.coding_map(a).map(|p| p.into_inner()))
            .collect::<Result<Vec<_>>>()?
            .concat();
        let b = PointCloud::new(self.ifs.dim(), coded)?;
        let m = self.ifs.invariant_superset(self.attractor()?, &b, 2)?.union(&b)?;
        Ok(self.superset.get_or_init(|| m))
    }

    /// Box around the attractor cloud and the origin, padded by half its size (at least 0.5).
    pub fn region(&self) -> BoundingBox {
        let origin = vec![0.0; self.ifs.dim()];
        let cloud = match self.attractor() {
            Ok(a) => a.cloud.union(&PointCloud::singleton(&origin).expect("finite")).expect("same dim"),
            Err(_) => PointCloud::singleton(&origin).expect("finite"),
        };
        let bb = cloud.bounding_box();
        let size = cloud.diameter().max(1.0);
        bb.expanded(0.5 * size)
    }

    fn fibred_depths(&self) -> Vec<usize> {
        (1..=self.opts.fibred_depth.max(1)).collect()
    }

    /// Reports for one id; the chain yields its five steps and the consistency record.
    pub fn run(&self, id: CheckId) -> Vec<CheckReport> {
        if id == CheckId::Chain {
            return self.implication_chain();
        }
        let rep = self.run_single(id).unwrap_or_else(|e| CheckReport::from_error(id.as_str(), &e));
        vec![rep]
    }

    pub fn run_all(&self, ids: &[CheckId]) -> Vec<CheckReport> {
        ids.iter().flat_map(|&id| self.run(id)).collect()
    }

    fn run_single(&self, id: CheckId) -> Result<CheckReport> {
        let o = &self.opts;
        let ifs = self.ifs;
        match id {
            CheckId::UnionInequality => {
                check_union_inequality(o.union_trials, o.union_family_size, o.union_cloud_size, o.seed)
            }
            CheckId::PrefixStabilization => check_prefix_stabilization(&self.samples, o.nested_depth),
            CheckId::NestedIntersection => {
                check_nested_intersection(ifs, self.reference_superset()?, &self.samples, o.nested_depth)
            }
            CheckId::UniformFibred => {
                let b = self.attractor()?.cloud.bounding_box().corners();
                check_point_fibred(ifs, &b, &self.fibred_depths(), &self.samples)
            }
            CheckId::Equivariance => check_equivariance(ifs, &self.samples),
            CheckId::PiContinuity => {
                check_pi_continuity(ifs, self.reference_superset()?, &self.samples, &o.continuity_prefix_lens)
            }
            CheckId::AttractorCoding => check_attractor_coding(
                ifs,
                self.attractor()?,
                &self.samples,
                budget_depth(ifs.alphabet(), o.word_budget),
            ),
            CheckId::FixedPoints => check_fixed_points(ifs, o.fixed_point_len),
            CheckId::PeriodicDensity => {
                check_periodic_density(ifs, self.attractor()?, &density_word_lens(ifs.alphabet(), o.density_budget))
            }
            CheckId::PhiContractive => check_phi_contractivity(ifs, &self.region(), o.pair_samples, o.seed),
            CheckId::LocalFibred => self.local_fibred(),
            CheckId::ChainUniformFibred => self.chain_uniform_fibred(),
            CheckId::Diminishing => {
                let b = self.region().corners();
                let threshold = o.cert_ratio * b.diameter();
                check_diminishing(ifs, &b, budget_depth(ifs.alphabet(), o.word_budget), threshold)
            }
            CheckId::ChainAttractor => self.chain_attractor(),
            CheckId::Chain => unreachable!("expanded by run"),
        }
    }

    fn renamed(rep: Result<CheckReport>, id: &str) -> CheckReport {
        match rep {
            Ok(mut r) => {
                r.id = id.to_string();
                r
            }
            Err(e) => CheckReport::from_error(id, &e),
        }
    }

    /// Point-fibred on small balls `B(x, η)`: the box corners of the region,
    /// its centre and the origin as centres, `η = 0.05·max(1, diam)`.
    fn local_fibred(&self) -> Result<CheckReport> {
        let region = self.region();
        let eta = 0.05 * region.corners().diameter().max(1.0);
        let m = self.ifs.dim();
        let mut centres = vec![vec![0.0; m], region.center(), region.hi.clone()];
        centres.dedup();
        let depths = self.fibred_depths();
        let parts: Vec<CheckReport> = centres
            .iter()
            .map(|c| {
                let mut coords = c.clone();
                for j in 0..m {
                    for s in [-eta, eta] {
                        let mut p = c.clone();
                        p[j] += s;
                        coords.extend(p);
                    }
                }
                let ball = PointCloud::new(m, coords)?;
                let id = format!("ball{}", fmt_point(c));
                Ok(Self::renamed(check_point_fibred(self.ifs, &ball, &depths, &self.samples), &id))
            })
            .collect::<Result<_>>()?;
        Ok(CheckReport::combine("c2-local-fibred", &parts).param("radius", format_coord(eta)))
    }

    /// Point-fibred on the region corners, a far point and a slice of the attractor cloud.
    fn chain_uniform_fibred(&self) -> Result<CheckReport> {
        let region = self.region();
        let corners = region.corners();
        let mut far = region.center();
        far[0] += 10.0 * corners.diameter().max(1.0);
        let mut sets = vec![("corners", corners), ("far", PointCloud::singleton(&far)?)];
        if let Ok(a) = self.attractor() {
            let step = (a.cloud.len() / 64).max(1);
            let slice: Vec<f64> = a.cloud.points().step_by(step).flatten().copied().collect();
            sets.push(("attractor", PointCloud::new(self.ifs.dim(), slice)?));
        }
        let depths = self.fibred_depths();
        let parts: Vec<CheckReport> = sets
            .iter()
            .map(|(name, b)| Self::renamed(check_point_fibred(self.ifs, b, &depths, &self.samples), name))
            .collect();
        Ok(CheckReport::combine("c3-uniform-fibred", &parts).param("depths", fmt_depths(&depths)))
    }

    /// Attractor converged, the coding map is equivariant, lands on the cloud and covers it.
    fn chain_attractor(&self) -> Result<CheckReport> {
        let a = self.attractor()?;
        let converged = CheckReport::new(
            "converged",
            if a.converged { f64::NEG_INFINITY } else { f64::INFINITY },
            0.0,
            format!("iterations={} step={}", a.iterations, format_coord(a.final_step_hausdorff)),
        );
        let mut parts = vec![converged];
        if a.converged {
            parts.push(Self::renamed(check_equivariance(self.ifs, &self.samples), "equivariance"));
            parts.push(Self::renamed(
                check_attractor_coding(
                    self.ifs,
                    a,
                    &self.samples,
                    budget_depth(self.ifs.alphabet(), self.opts.word_budget),
                ),
                "coding",
            ));
        }
        Ok(CheckReport::combine("c5-attractor", &parts))
    }

    /// Steps 1′ to 5′ in order, then the consistency record.
    pub fn implication_chain(&self) -> Vec<CheckReport> {
        let ids = [
            CheckId::PhiContractive,
            CheckId::LocalFibred,
            CheckId::ChainUniformFibred,
            CheckId::Diminishing,
            CheckId::ChainAttractor,
        ];
        let steps: Vec<CheckReport> = ids.iter().flat_map(|&id| self.run(id)).collect();
        let passes = [steps[0].passed, steps[1].passed, steps[2].passed, steps[3].passed, steps[4].passed];
        let order = [0, 3, 2, 1, 4];
        let mut out: Vec<CheckReport> = order.iter().map(|&i| steps[i].clone()).collect();
        out.push(chain_consistency(passes));
        out
    }
}

/// Random affine IFS: matrix entries uniform in `[-1, 1]` rescaled to an
/// operator norm drawn from `norm_range`, offsets uniform in `[-0.5, 0.5]`.
pub fn random_affine_ifs(
    seed: u64,
    dim: usize,
    n_maps: usize,
    norm_range: (f64, f64),
    tol: Tolerances,
) -> Result<IfsInstance> {
    let (lo, hi) = norm_range;
    if !(0.0 < lo && lo <= hi) {
        return Err(Error::InvalidInstance("norm range must satisfy 0 < lo <= hi".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut maps = Vec::with_capacity(n_maps);
    while maps.len() < n_maps {
        let matrix: Vec<f64> = (0..dim * dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let norm = operator_norm(&matrix, dim);
        if norm < 1e-6 {
            continue;
        }
        let target = if hi > lo { rng.random_range(lo..=hi) } else { lo };
        let matrix = matrix.iter().map(|v| v * target / norm).collect();
        let offset = (0..dim).map(|_| rng.random_range(-0.5..=0.5)).collect();
        maps.push(ContractionMap::affine(AffineMap::new(matrix, offset)?));
    }
    IfsInstance::new(maps, tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExploreRecord {
    pub index: usize,
    pub seed: u64,
    pub ifs: IfsInstance,
    pub local_fibred: CheckReport,
    pub diminishing: CheckReport,
}

impl ExploreRecord {
    /// Locally point-fibred without a diminishing certificate at this depth.
    pub fn is_candidate(&self) -> bool {
        self.local_fibred.passed && !self.diminishing.passed
    }
}

/// Searches random planar affine systems, some with maps of norm above 1,
/// for instances passing 2′ but failing 4′. Records evidence only.
pub fn explore_converse(count: usize, seed: u64, opts: &VerifyOptions) -> Result<Vec<ExploreRecord>> {
    let tol = Tolerances { tol_attr: 0.05, max_iter: 60, max_cloud_points: 50_000, ..Tolerances::default() };
    (0..count)
        .map(|index| {
            let inst_seed = seed.wrapping_add(index as u64);
            let n_maps = 2 + index % 2;
            let ifs = random_affine_ifs(inst_seed, 2, n_maps, (0.5, 1.3), tol.clone())?;
            let v = Verifier::new(&ifs, opts.clone())?;
            let local_fibred = v.run(CheckId::LocalFibred).remove(0);
            let diminishing = v.run(CheckId::Diminishing).remove(0);
            Ok(ExploreRecord { index, seed: inst_seed, ifs: ifs.clone(), local_fibred, diminishing })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sim(s: f64, b: Vec<f64>) -> ContractionMap {
        ContractionMap::affine(AffineMap::similarity(s, b).unwrap())
    }

    fn cantor() -> IfsInstance {
        let phi = ComparisonFunction::linear(1.0 / 3.0).unwrap();
        IfsInstance::new(
            vec![
                sim(1.0 / 3.0, vec![0.0]).with_witness(phi.clone()).unwrap(),
                sim(1.0 / 3.0, vec![2.0 / 3.0]).with_witness(phi).unwrap(),
            ],
            Tolerances::default(),
        )
        .unwrap()
    }

    fn identity() -> IfsInstance {
        IfsInstance::new(vec![ContractionMap::affine(AffineMap::identity(1))], Tolerances::default()).unwrap()
    }

    fn addr(s: &IfsInstance, t: &str) -> AddressSpec {
        AddressSpec::parse(t, s.alphabet()).unwrap()
    }

    #[test]
    fn report_line_format() {
        let r = CheckReport::new("equivariance", 0.0, 1e-8, "letter=0 address=|1").param("addresses", 3);
        assert_eq!(
            r.to_string(),
            "CHECK equivariance PASS residual=0 tol=1e-8 witness=\"letter=0 address=|1\" addresses=3"
        );
        let r = CheckReport::new("x", 2.0, 1.0, "w");
        assert!(r.to_string().starts_with("CHECK x FAIL residual=2 tol=1 "));
    }

    #[test]
    fn samples_are_shift_closed_and_distinct() {
        let s = cantor();
        let samples = sample_addresses(s.alphabet(), 3).unwrap();
        let set: HashSet<_> = samples.iter().cloned().collect();
        assert_eq!(set.len(), samples.len());
        assert!(samples.iter().all(|a| set.contains(&a.shift())));
        // every primitive period of length <= 4 shows up
        assert!(set.contains(&addr(&s, "|0.1.1.1")));
        assert_eq!(samples, sample_addresses(s.alphabet(), 3).unwrap());
    }

    #[test]
    fn union_inequality_examples() {
        let r = check_union_inequality(100, 3, 5, 11).unwrap();
        assert!(r.passed, "{r}");
        // single members reduce to a single distance
        let r = check_union_inequality(50, 1, 5, 12).unwrap();
        assert!(r.residual.abs() <= 1e-12);
        assert!(check_union_inequality(0, 1, 1, 0).is_err());
    }

    #[test]
    fn equivariance_examples() {
        let s = cantor();
        let r = check_equivariance(&s, &[addr(&s, "|1")]).unwrap();
        assert!(r.passed && r.residual < 1e-15, "{r}");
        let r = check_equivariance(&s, &[addr(&s, "|0")]).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn point_fibred_examples() {
        let s = cantor();
        let samples = sample_addresses(s.alphabet(), 1).unwrap();
        let b = PointCloud::new(1, vec![0.0, 1.0]).unwrap();
        let depths: Vec<usize> = (1..=12).collect();
        let r = check_point_fibred(&s, &b, &depths, &samples).unwrap();
        for (n, &v) in r.series.iter().enumerate() {
            assert!(v <= 3f64.powi(-(n as i32 + 1)) + 1e-15);
        }
        assert!(r.series[11] < 1e-5);
        // 3^-12 is still above the default tol_attr; one more level clears it
        assert!(!r.passed);
        let depths: Vec<usize> = (1..=13).collect();
        let r = check_point_fibred(&s, &b, &depths, &samples).unwrap();
        assert!(r.passed, "{r}");

        let w = Word::new(s.alphabet(), vec![0, 1, 1]).unwrap();
        let omega = periodicize(&w).unwrap();
        let p = s.coding_map(&omega).unwrap();
        let depths: Vec<usize> = (1..=4).map(|k| 3 * k).collect();
        let r = check_point_fibred(&s, &PointCloud::singleton(&p).unwrap(), &depths, &[omega]).unwrap();
        assert!(r.series.iter().all(|&v| v < 1e-15), "{:?}", r.series);

        let id = identity();
        let samples = sample_addresses(id.alphabet(), 1).unwrap();
        let r = check_point_fibred(&id, &b, &depths, &samples).unwrap();
        assert!(!r.passed);
        assert!(r.series.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn fixed_point_examples() {
        let r = check_fixed_points(&cantor(), 4).unwrap();
        assert!(r.passed, "{r}");
        assert_eq!(r.params[1], ("words".to_string(), "30".to_string()));
    }

    #[test]
    fn periodic_density_single_map() {
        let s = IfsInstance::new(vec![sim(0.5, vec![0.0])], Tolerances::default()).unwrap();
        let a = s.attractor(&PointCloud::singleton(&[0.0]).unwrap()).unwrap();
        let r = check_periodic_density(&s, &a, &[2, 4]).unwrap();
        assert!(r.series.iter().all(|&v| v == 0.0));
        assert!(r.passed, "{r}");
    }

    #[test]
    fn chain_consistency_verdicts() {
        assert!(chain_consistency([true; 5]).passed);
        assert!(chain_consistency([false; 5]).passed);
        // 4' passes while 3' fails
        let r = chain_consistency([false, true, false, true, true]);
        assert!(!r.passed);
        assert!(r.witness.contains("4'->3'"));
    }

    #[test]
    fn check_ids_parse() {
        assert_eq!(CheckId::parse("4'").unwrap(), CheckId::Diminishing);
        assert_eq!(CheckId::parse("pi-continuity").unwrap(), CheckId::PiContinuity);
        assert!(matches!(CheckId::parse("bogus"), Err(Error::UnknownCheck(_))));
        let all = CheckId::parse_list("all,equivariance").unwrap();
        assert_eq!(all.len(), 10);
    }

    #[test]
    fn budgets() {
        let two = Alphabet::new(2).unwrap();
        assert_eq!(budget_depth(two, 4096), 12);
        assert_eq!(density_word_lens(two, 1 << 14), vec![2, 4, 6, 8, 10, 12]);
        assert_eq!(budget_depth(Alphabet::new(1).unwrap(), 10), 64);
    }

    #[test]
    fn cantor_passes_every_check() {
        let s = cantor();
        let v = Verifier::new(&s, VerifyOptions::default()).unwrap();
        for r in v.run_all(&CheckId::parse_list("all").unwrap()) {
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn identity_chain() {
        let s = identity();
        let v = Verifier::new(&s, VerifyOptions::default()).unwrap();
        let chain = v.implication_chain();
        assert_eq!(chain[0].id, "c1-phi-contractive");
        assert!(!chain[0].passed && !chain[1].passed, "{}\n{}", chain[0], chain[1]);
        assert!(chain[5].passed, "{}", chain[5]);
    }
}

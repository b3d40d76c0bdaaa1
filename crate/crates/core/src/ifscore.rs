//! The IFS aggregate and the constructions built on it.
//!
//! The coding map is evaluated through periodic fixed points: for
//! `a = u·v̇`, `π(a) = f_u(p)` where `p` is the fixed point of `f_v`.
//! This is exact for eventually-periodic addresses and avoids deep prefix
//! iteration from an arbitrary start.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codespace::{self, AddressSpec, Alphabet, Letter, Word};
use crate::contractions::{compose_affine_word, eval_word_into, ComparisonFunction, ContractionMap};
use crate::error::{Error, Result};
use crate::metricsets::{diameter_brute, directed_hausdorff, distance, hausdorff, CloudBuilder, Point, PointCloud};

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Step size below which fixed-point iteration stops.
    pub tol_point: f64,
    /// Cauchy step in Hausdorff distance below which attractor iteration stops.
    pub tol_attr: f64,
    /// Iteration budget for fixed-point iteration.
    pub max_depth: usize,
    /// Dedup grid cell; `None` means `tol_attr / 4`.
    pub dedup_cell: Option<f64>,
    pub word_cap: usize,
    /// Iteration budget for the fractal operator.
    pub max_iter: usize,
    /// Attractor iteration gives up once a cloud grows past this.
    pub max_cloud_points: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_point: 1e-9,
            tol_attr: 1e-6,
            max_depth: 10_000,
            dedup_cell: None,
            word_cap: codespace::DEFAULT_WORD_CAP,
            max_iter: 200,
            max_cloud_points: 2_000_000,
        }
    }
}

impl Tolerances {
    pub fn dedup_cell(&self) -> f64 {
        self.dedup_cell.unwrap_or(self.tol_attr / 4.0)
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.tol_point) || !positive(self.tol_attr) || !positive(self.dedup_cell()) {
            return Err(Error::InvalidInstance("tolerances must be positive and finite".into()));
        }
        if self.max_depth == 0 || self.max_iter == 0 || self.word_cap == 0 {
            return Err(Error::InvalidInstance("iteration budgets must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IfsInstance {
    dim: usize,
    alphabet: Alphabet,
    maps: Vec<ContractionMap>,
    tol: Tolerances,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttractorResult {
    pub cloud: PointCloud,
    pub iterations: usize,
    pub final_step_hausdorff: f64,
    /// Cauchy stop reached and a second, displaced seed settled on the same cloud.
    pub converged: bool,
    /// Hausdorff distance between the limits reached from the seed and from
    /// the displaced probe seed, when the probe ran.
    pub probe_hausdorff: Option<f64>,
}

impl AttractorResult {
    /// Bound on the distance to the true attractor for a `c`-contractive system.
    pub fn limit_error_bound(&self, c: f64) -> f64 {
        self.final_step_hausdorff * c / (1.0 - c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiminishingCertificate {
    pub diam_b: f64,
    pub depths: Vec<usize>,
    /// `max_{ω ∈ Λ_n} diam(f_ω(B))`
    pub max_diams: Vec<f64>,
    /// A word attaining each maximum.
    pub worst_words: Vec<Word>,
    /// `φ^[n](diam B)` when all maps share one witness.
    pub phi_bounds: Option<Vec<f64>>,
    pub threshold: f64,
    pub verdict: bool,
}

impl IfsInstance {
    pub fn new(maps: Vec<ContractionMap>, tol: Tolerances) -> Result<Self> {
        let first = maps.first().ok_or_else(|| Error::InvalidInstance("an IFS needs at least one map".into()))?;
        let dim = first.dim();
        if let Some(bad) = maps.iter().find(|f| f.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: bad.dim() });
        }
        tol.validate()?;
        let alphabet = Alphabet::new(maps.len())?;
        Ok(Self { dim, alphabet, maps, tol })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn maps(&self) -> &[ContractionMap] {
        &self.maps
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Result<Self> {
        tol.validate()?;
        self.tol = tol;
        Ok(self)
    }

    /// The witness shared by every map, if there is one.
    pub fn common_witness(&self) -> Option<&ComparisonFunction> {
        let w = self.maps[0].witness()?;
        self.maps.iter().all(|f| f.witness() == Some(w)).then_some(w)
    }

    pub fn max_lipschitz_bound(&self) -> f64 {
        self.maps.iter().map(ContractionMap::lipschitz_bound).fold(0.0, f64::max)
    }

    /// Distance from a converged attractor cloud to the true attractor we are
    /// prepared to accept: `tol_attr + δ`, widened to `(c·tol_attr + δ)/(1 − c)`
    /// when every map is `c`-Lipschitz with a known `c < 1`.
    pub fn proximity_bound(&self) -> f64 {
        let base = self.tol.tol_attr + self.tol.dedup_cell();
        let c = self.max_lipschitz_bound();
        if c < 1.0 {
            base.max((c * self.tol.tol_attr + self.tol.dedup_cell()) / (1.0 - c))
        } else {
            base
        }
    }

    fn check_cloud(&self, b: &PointCloud) -> Result<()> {
        if b.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: b.dim() });
        }
        Ok(())
    }

    /// `F_S(B) = ∪_i f_i(B)`, dedup-snapped at the instance's cell size.
    pub fn fractal_operator(&self, b: &PointCloud) -> Result<PointCloud> {
        self.check_cloud(b)?;
        let mut acc = CloudBuilder::new(self.dim, Some(self.tol.dedup_cell()));
        let mut out = vec![0.0; self.dim];
        for f in &self.maps {
            for p in b.points() {
                f.apply(p, &mut out);
                if out.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite);
                }
                acc.push(&out);
            }
        }
        acc.finish()
    }

    /// `f_w(B)`, without dedup.
    pub fn word_image(&self, w: &Word, b: &PointCloud) -> Result<PointCloud> {
        self.check_cloud(b)?;
        self.check_word(w)?;
        let mut buf = Vec::with_capacity(self.dim);
        b.try_map(self.dim, |p, out| {
            buf.clear();
            buf.extend_from_slice(p);
            eval_word_into(&self.maps, w.letters(), &mut buf)?;
            out.copy_from_slice(&buf);
            Ok(())
        })
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        if w.alphabet() != self.alphabet {
            return Err(Error::AlphabetMismatch { left: self.alphabet.size(), right: w.alphabet().size() });
        }
        Ok(())
    }

    /// Iterates `F_S` from `seed` until two consecutive clouds are within
    /// `tol_attr`, then confirms the limit by iterating from a displaced seed.
    pub fn attractor(&self, seed: &PointCloud) -> Result<AttractorResult> {
        self.check_cloud(seed)?;
        let (cloud, iterations, step, cauchy) = self.iterate_to_cauchy(seed)?;
        let mut result =
            AttractorResult { cloud, iterations, final_step_hausdorff: step, converged: false, probe_hausdorff: None };
        if !cauchy {
            return Ok(result);
        }
        // just outside the cloud, far enough that a second limit could not hide in the tolerance
        let shift = 4.0 * self.proximity_bound();
        let probe_seed: Vec<f64> = result.cloud.bounding_box().hi.iter().map(|c| c + shift).collect();
        let (gap, agrees) = self.probe(&PointCloud::singleton(&probe_seed)?, &result.cloud)?;
        result.probe_hausdorff = gap;
        result.converged = agrees;
        Ok(result)
    }

    /// Iterates from `seed` until within `2·proximity_bound` of `target`
    /// (agreement) or until the iteration itself stalls elsewhere.
    fn probe(&self, seed: &PointCloud, target: &PointCloud) -> Result<(Option<f64>, bool)> {
        let bound = 2.0 * self.proximity_bound();
        let mut cur = seed.clone();
        let mut gap = None;
        for _ in 0..self.tol.max_iter {
            let next = self.fractal_operator(&cur)?;
            if next.len() > self.tol.max_cloud_points {
                break;
            }
            let g = hausdorff(&next, target)?;
            gap = Some(g);
            if g <= bound {
                return Ok((gap, true));
            }
            let step = hausdorff(&cur, &next)?;
            cur = next;
            if step < self.tol.tol_attr {
                break;
            }
        }
        Ok((gap, false))
    }

    fn iterate_to_cauchy(&self, seed: &PointCloud) -> Result<(PointCloud, usize, f64, bool)> {
        let mut cur = seed.clone();
        let mut step = f64::INFINITY;
        for k in 1..=self.tol.max_iter {
            let next = self.fractal_operator(&cur)?;
            if next.len() > self.tol.max_cloud_points {
                return Ok((cur, k - 1, step, false));
            }
            step = hausdorff(&cur, &next)?;
            cur = next;
            if step < self.tol.tol_attr {
                return Ok((cur, k, step, true));
            }
        }
        Ok((cur, self.tol.max_iter, step, false))
    }

    /// Fixed point of `f_w` for a non-empty letter sequence: closed form when
    /// every map in `w` is affine, Banach iteration from the origin otherwise.
    fn periodic_fixed_point(&self, letters: &[Letter]) -> Result<Point> {
        if let Some(f) = compose_affine_word(&self.maps, letters, self.dim) {
            if let Ok(p) = f.fixed_point() {
                return Ok(p);
            }
        }
        self.banach_fixed_point(letters)
    }

    fn banach_fixed_point(&self, letters: &[Letter]) -> Result<Point> {
        let mut x = vec![0.0; self.dim];
        let mut step = f64::INFINITY;
        for _ in 0..self.tol.max_depth {
            let prev = x.clone();
            eval_word_into(&self.maps, letters, &mut x)?;
            step = distance(&prev, &x);
            if step < self.tol.tol_point {
                return Point::new(x);
            }
        }
        Err(Error::NotConverged { iterations: self.tol.max_depth, last_step: step })
    }

    /// `π(a)`: the point coded by an eventually-periodic address.
    pub fn coding_map(&self, a: &AddressSpec) -> Result<Point> {
        if a.alphabet() != self.alphabet {
            return Err(Error::AlphabetMismatch { left: self.alphabet.size(), right: a.alphabet().size() });
        }
        let p = self.periodic_fixed_point(a.period().letters())?;
        let mut x = p.into_inner();
        eval_word_into(&self.maps, a.preperiod().letters(), &mut x)?;
        Point::new(x)
    }

    /// The unique fixed point of `f_w`, `w` non-empty.
    pub fn word_fixed_point(&self, w: &Word) -> Result<Point> {
        self.check_word(w)?;
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        self.periodic_fixed_point(w.letters())
    }

    /// `max_{ω ∈ Λ_n} diam(f_ω(B))` for `n = 1..=max_n`. The verdict holds when
    /// the maxima strictly decrease (until they reach 0) and the last one is
    /// below `threshold` (default `tol_attr`).
    pub fn diminishing_certificate(
        &self,
        b: &PointCloud,
        max_n: usize,
        threshold: Option<f64>,
    ) -> Result<DiminishingCertificate> {
        self.check_cloud(b)?;
        let k = self.alphabet.size();
        let count = codespace::word_count(self.alphabet, max_n);
        if count > self.tol.word_cap as u128 {
            return Err(Error::CapExceeded { requested: count, cap: self.tol.word_cap });
        }
        let m = self.dim;
        let stride = b.len() * m;
        let diam_b = b.diameter();
        let mut level: Vec<f64> = b.coords().to_vec();
        let mut words_at_level = 1usize;
        let mut max_diams = Vec::with_capacity(max_n);
        let mut worst_words = Vec::with_capacity(max_n);
        let mut out = vec![0.0; m];
        for n in 1..=max_n {
            // images of iω' are f_i applied to the images of ω'; lexicographic index i·|I|^(n-1) + idx(ω')
            let mut next = Vec::with_capacity(level.len() * k);
            for f in &self.maps {
                for p in level.chunks_exact(m) {
                    f.apply(p, &mut out);
                    next.extend_from_slice(&out);
                }
            }
            if next.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
            words_at_level *= k;
            let (best_idx, best) = next
                .chunks_exact(stride)
                .map(|img| diameter_brute(&PointCloud::new(m, img.to_vec()).expect("finite image")))
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
            debug_assert_eq!(next.len(), words_at_level * stride);
            max_diams.push(best);
            worst_words.push(self.word_from_index(best_idx, n));
            level = next;
        }
        let phi_bounds = match self.common_witness() {
            Some(phi) => Some((1..=max_n).map(|n| phi.iterate(diam_b, n)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        let threshold = threshold.unwrap_or(self.tol.tol_attr);
        let decreasing = std::iter::once(diam_b)
            .chain(max_diams.iter().copied())
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
        let verdict = decreasing && max_diams.last().is_some_and(|&d| d < threshold);
        Ok(DiminishingCertificate {
            diam_b,
            depths: (1..=max_n).collect(),
            max_diams,
            worst_words,
            phi_bounds,
            threshold,
            verdict,
        })
    }

    fn word_from_index(&self, mut idx: usize, n: usize) -> Word {
        let k = self.alphabet.size();
        let mut letters = vec![0; n];
        for slot in letters.iter_mut().rev() {
            *slot = (idx % k) as Letter;
            idx /= k;
        }
        Word::new(self.alphabet, letters).expect("letters in range")
    }

    /// Finite form of `M_B = cl(A_S ∪ ∪_n F_S^[n](B))`: `B` first, then
    /// `F_S^[k](B)` for `k = 1..=n_max`, then the attractor cloud. Fails unless
    /// `F_S(M) ⊆ E_ε(M)` with `ε = 2δ + tol_attr`.
    pub fn invariant_superset(&self, attractor: &AttractorResult, b: &PointCloud, n_max: usize) -> Result<PointCloud> {
        if !attractor.converged {
            return Err(Error::AttractorNotConverged);
        }
        self.check_cloud(b)?;
        let mut acc = CloudBuilder::new(self.dim, Some(self.tol.dedup_cell()));
        acc.extend(b);
        let mut cur = b.clone();
        for _ in 0..n_max {
            cur = self.fractal_operator(&cur)?;
            acc.extend(&cur);
        }
        acc.extend(&attractor.cloud);
        let m = acc.finish()?;
        let residual = self.invariance_residual(&m)?;
        let bound = 2.0 * self.tol.dedup_cell() + self.tol.tol_attr;
        if residual < bound {
            Ok(m)
        } else {
            Err(Error::InvarianceViolated { residual, bound })
        }
    }

    /// `sup_{y ∈ F_S(M)} d(y, M)`.
    pub fn invariance_residual(&self, m: &PointCloud) -> Result<f64> {
        directed_hausdorff(&self.fractal_operator(m)?, m)
    }

    /// Random-iteration sampler started at the origin: `steps` applications of
    /// a uniformly chosen map, keeping the points after the first `burn_in`.
    pub fn chaos_game(&self, steps: usize, burn_in: usize, rng_seed: u64) -> Result<PointCloud> {
        if steps <= burn_in {
            return Err(Error::InvalidInstance(format!("steps ({steps}) must exceed burn_in ({burn_in})")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let k = self.maps.len();
        let mut x = vec![0.0; self.dim];
        let mut y = vec![0.0; self.dim];
        let mut coords = Vec::with_capacity((steps - burn_in) * self.dim);
        for t in 1..=steps {
            let i = rng.random_range(0..k);
            self.maps[i].apply(&x, &mut y);
            std::mem::swap(&mut x, &mut y);
            if t > burn_in {
                coords.extend_from_slice(&x);
            }
        }
        PointCloud::new(self.dim, coords)
    }
}

use proptest::prelude::*;

use ifslab::codespace::{self, AddressSpec, Alphabet, Word};
use ifslab::contractions::{self, AffineMap, ComparisonFunction, ContractionMap};
use ifslab::ifscore::{IfsInstance, Tolerances};
use ifslab::metricsets::{self, PointCloud};
use ifslab::verifier::{self, CheckId, Verifier, VerifyOptions};

fn word_in(k: u32, max_len: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..k, 0..=max_len)
}

fn address_in(k: u32) -> impl Strategy<Value = AddressSpec> {
    (word_in(k, 5), prop::collection::vec(0..k, 1..=4)).prop_map(move |(pre, per)| {
        let a = Alphabet::new(k as usize).unwrap();
        AddressSpec::new(Word::new(a, pre).unwrap(), Word::new(a, per).unwrap()).unwrap()
    })
}

fn cloud(dim: usize, max_points: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec(prop::collection::vec(-10.0f64..10.0, dim), 1..=max_points)
        .prop_map(|rows| PointCloud::from_rows(&rows).unwrap())
}

/// Smallest `eps` with `within_dilation` both ways, by bisection on the bit pattern.
fn hausdorff_by_bisection(a: &PointCloud, b: &PointCloud) -> f64 {
    let ok =
        |eps: f64| metricsets::within_dilation(a, b, eps).unwrap() && metricsets::within_dilation(b, a, eps).unwrap();
    let (mut lo, mut hi) = (0u64, f64::MAX.to_bits());
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(f64::from_bits(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if ok(f64::from_bits(lo)) {
        f64::from_bits(lo)
    } else {
        f64::from_bits(hi)
    }
}

fn ulps_apart(a: f64, b: f64) -> u64 {
    a.to_bits().abs_diff(b.to_bits())
}

fn small_ifs(seed: u64, dim: usize, n_maps: usize) -> IfsInstance {
    let tol = Tolerances { tol_attr: 1e-3, ..Tolerances::default() };
    verifier::random_affine_ifs(seed, dim, n_maps, (0.2, 0.5), tol).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn code_distance_is_a_metric(a in address_in(2), b in address_in(2), c in address_in(2)) {
        let d = |x: &AddressSpec, y: &AddressSpec| codespace::code_distance(x, y).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &b) == 0.0, a == b);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
    }

    #[test]
    fn close_addresses_share_prefixes(a in address_in(3), b in address_in(3), m in 0usize..12) {
        if codespace::code_distance(&a, &b).unwrap() < codespace::dyadic(m) {
            prop_assert_eq!(codespace::prefix(&a, m), codespace::prefix(&b, m));
        }
    }

    #[test]
    fn concat_is_a_monoid(u in word_in(3, 6), v in word_in(3, 6), w in word_in(3, 6)) {
        let al = Alphabet::new(3).unwrap();
        let (u, v, w) = (Word::new(al, u).unwrap(), Word::new(al, v).unwrap(), Word::new(al, w).unwrap());
        let e = Word::empty(al);
        let left = codespace::concat(&codespace::concat(&u, &v).unwrap(), &w).unwrap();
        let right = codespace::concat(&u, &codespace::concat(&v, &w).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(codespace::concat(&e, &u).unwrap(), u.clone());
        prop_assert_eq!(codespace::concat(&u, &e).unwrap(), u);
    }

    #[test]
    fn equality_matches_long_prefixes(a in address_in(2), b in address_in(2)) {
        let again = AddressSpec::new(a.preperiod().clone(), a.period().clone()).unwrap();
        prop_assert_eq!(&again, &a);
        let lcm = |x: usize, y: usize| x * y / gcd(x, y);
        let depth = a.preperiod().len() + b.preperiod().len() + lcm(a.period().len(), b.period().len());
        prop_assert_eq!(a == b, codespace::prefix(&a, depth) == codespace::prefix(&b, depth));
    }

    #[test]
    fn hausdorff_is_a_metric(a in cloud(2, 20), b in cloud(2, 20), c in cloud(2, 20)) {
        let h = |x: &PointCloud, y: &PointCloud| metricsets::hausdorff(x, y).unwrap();
        prop_assert_eq!(h(&a, &b), h(&b, &a));
        prop_assert_eq!(h(&a, &a), 0.0);
        prop_assert!(h(&a, &c) <= h(&a, &b) + h(&b, &c) + 1e-12);
    }

    #[test]
    fn hausdorff_matches_dilation_bisection(a in cloud(2, 12), b in cloud(2, 12)) {
        let direct = metricsets::hausdorff(&a, &b).unwrap();
        prop_assert!(ulps_apart(direct, hausdorff_by_bisection(&a, &b)) <= 1);
    }

    #[test]
    fn accelerated_hausdorff_is_exact(
        dim in 1usize..=3,
        seed in any::<u64>(),
        n in 200usize..1500,
    ) {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut pts = |n: usize, spread: f64| {
            PointCloud::new(dim, (0..n * dim).map(|_| (rng.random_range(-1.0..1.0) * spread * 64.0).round() / 64.0).collect()).unwrap()
        };
        let a = pts(n, 1.0);
        let b = pts(n / 2 + 1, 2.0);
        prop_assert_eq!(
            metricsets::hausdorff(&a, &b).unwrap().to_bits(),
            metricsets::hausdorff_brute(&a, &b).unwrap().to_bits()
        );
    }

    #[test]
    fn union_of_families_is_controlled(fam in prop::collection::vec((cloud(2, 5), cloud(2, 5)), 1..=4)) {
        let mut h_union = fam[0].0.clone();
        let mut k_union = fam[0].1.clone();
        for (h, k) in &fam[1..] {
            h_union = h_union.union(h).unwrap();
            k_union = k_union.union(k).unwrap();
        }
        let worst = fam.iter().map(|(h, k)| metricsets::hausdorff(h, k).unwrap()).fold(0.0, f64::max);
        prop_assert!(metricsets::hausdorff(&h_union, &k_union).unwrap() <= worst + 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact(c in cloud(3, 30)) {
        let mut buf = Vec::new();
        metricsets::write_cloud(&mut buf, &c).unwrap();
        let back = metricsets::read_cloud(buf.as_slice()).unwrap();
        prop_assert_eq!(back.coords().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                        c.coords().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn word_evaluation_composes(seed in any::<u64>(), w in word_in(3, 5), v in word_in(3, 5),
                                x in prop::collection::vec(-3.0f64..3.0, 2)) {
        let ifs = small_ifs(seed, 2, 3);
        let al = ifs.alphabet();
        let (w, v) = (Word::new(al, w).unwrap(), Word::new(al, v).unwrap());
        let wv = codespace::concat(&w, &v).unwrap();
        let inner = contractions::eval_word(ifs.maps(), &v, &x).unwrap();
        let lhs = contractions::eval_word(ifs.maps(), &wv, &x).unwrap();
        let rhs = contractions::eval_word(ifs.maps(), &w, &inner).unwrap();
        prop_assert_eq!(&lhs[..], &rhs[..]);
    }

    #[test]
    fn affine_images_shrink_by_witness(seed in any::<u64>(), c in cloud(2, 15)) {
        let ifs = small_ifs(seed, 2, 2);
        for f in ifs.maps() {
            let lip = f.as_affine().unwrap().operator_norm();
            let f = f.clone().with_witness(ComparisonFunction::linear(lip.min(0.999) + 1e-9).unwrap()).unwrap();
            let ComparisonFunction::Linear { c: factor } = f.witness().unwrap().clone() else { unreachable!() };
            let image = c.try_map(2, |p, out| { f.apply(p, out); Ok(()) }).unwrap();
            prop_assert!(image.diameter() <= factor * c.diameter() + 1e-12);
        }
    }

    #[test]
    fn operator_norm_bounds_the_largest_singular_value(
        dim in 1usize..=4,
        entries in prop::collection::vec(-2.0f64..2.0, 16),
        gap in prop::sample::select(vec![0.0, 1e-9, 1e-6, 1e-3]),
    ) {
        // clustered singular values stall plain power iteration
        let m = nalgebra::DMatrix::from_row_slice(dim, dim, &entries[..dim * dim]);
        let svd = m.clone().svd(true, true);
        let sigma = nalgebra::DVector::from_fn(dim, |i, _| 1.0 - gap * i as f64);
        let clustered = svd.u.unwrap() * nalgebra::DMatrix::from_diagonal(&sigma) * svd.v_t.unwrap();
        for mat in [m, clustered] {
            let row_major: Vec<f64> = mat.transpose().iter().copied().collect();
            let exact = mat.singular_values().max();
            let est = contractions::operator_norm(&row_major, dim);
            prop_assert!(est >= exact * (1.0 - 1e-14), "{est} < {exact}");
            prop_assert!(est <= exact * (1.0 + 1e-11) + 1e-300, "{est} >> {exact}");
        }
    }

    #[test]
    fn phi_iterates_decrease(t in 1e-6f64..10.0, n in 1usize..200, c in 0.05f64..0.95) {
        let lin = ComparisonFunction::linear(c).unwrap();
        let rat = ComparisonFunction::Rational;
        for phi in [&lin, &rat] {
            prop_assert!(phi.iterate(t, n).unwrap() < phi.iterate(t, n - 1).unwrap());
        }
        prop_assert!(lin.iterate(t, n).unwrap() <= c.powi(n as i32) * t * (1.0 + 1e-12));
        // closed form t / (1 + n t)
        let closed = t / (1.0 + n as f64 * t);
        prop_assert!((rat.iterate(t, n).unwrap() - closed).abs() <= 1e-12 * closed.max(1e-300) * n as f64);
        if t <= 1.0 {
            prop_assert!(rat.iterate(t, n).unwrap() <= 1.0 / n as f64);
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn attractors_are_invariant_and_seed_independent(seed in any::<u64>(), dim in 1usize..=2,
                                                     start in prop::collection::vec(-5.0f64..5.0, 2)) {
        let ifs = small_ifs(seed, dim, 2 + (seed % 2) as usize);
        let tol = ifs.tolerances().clone();
        let delta = tol.dedup_cell();
        let a = ifs.attractor(&PointCloud::singleton(&vec![0.0; dim]).unwrap()).unwrap();
        prop_assert!(a.converged);
        let fa = ifs.fractal_operator(&a.cloud).unwrap();
        prop_assert!(metricsets::hausdorff(&fa, &a.cloud).unwrap() < tol.tol_attr + 2.0 * delta);
        let b = ifs.attractor(&PointCloud::singleton(&start[..dim]).unwrap()).unwrap();
        prop_assert!(b.converged);
        prop_assert!(metricsets::hausdorff(&a.cloud, &b.cloud).unwrap() <= 2.0 * tol.tol_attr + 2.0 * delta);
    }

    #[test]
    fn coding_map_lands_on_attractor(seed in any::<u64>(), addr in address_in(2)) {
        let ifs = small_ifs(seed, 2, 2);
        let tol = ifs.tolerances().clone();
        let a = ifs.attractor(&PointCloud::singleton(&[0.0, 0.0]).unwrap()).unwrap();
        let p = ifs.coding_map(&addr).unwrap();
        let d = metricsets::point_set_distance(&p, &a.cloud).unwrap();
        prop_assert!(d <= ifs.proximity_bound(), "d = {d}");
        prop_assert!(d <= tol.tol_attr + tol.dedup_cell() || ifs.max_lipschitz_bound() > 0.5);
    }

    #[test]
    fn fixed_points_are_periodic_codes(seed in any::<u64>(), w in prop::collection::vec(0u32..3, 1..=5)) {
        let ifs = small_ifs(seed, 2, 3);
        let w = Word::new(ifs.alphabet(), w).unwrap();
        let fixed = ifs.word_fixed_point(&w).unwrap();
        let coded = ifs.coding_map(&codespace::periodicize(&w).unwrap()).unwrap();
        prop_assert!(metricsets::distance(&fixed, &coded) <= 10.0 * ifs.tolerances().tol_point);
    }

    #[test]
    fn word_images_nest_inside_invariant_sets(seed in any::<u64>(), addr in address_in(2)) {
        let ifs = small_ifs(seed, 2, 2);
        let a = ifs.attractor(&PointCloud::singleton(&[0.0, 0.0]).unwrap()).unwrap();
        let b = metricsets::extreme_points(&a.cloud);
        let m = ifs.invariant_superset(&a, &b, 2).unwrap();
        let defect = ifs.invariance_residual(&m).unwrap();
        let mut prev = f64::INFINITY;
        for depth in 1..=12 {
            let d = ifs.word_image(&codespace::prefix(&addr, depth), &m).unwrap().diameter();
            prop_assert!(d <= prev + 2.0 * defect + 1e-12, "depth {depth}: {d} > {prev}");
            prev = d;
        }
        prop_assert!(prev <= 0.5f64.powi(12) * m.diameter() + 1e-12);
    }

    #[test]
    fn reports_are_reproducible(seed in any::<u64>(), check_seed in any::<u64>()) {
        let ifs = small_ifs(seed, 2, 2);
        let ids = [CheckId::Equivariance, CheckId::PiContinuity, CheckId::PhiContractive, CheckId::Diminishing];
        let run = || {
            let opts = VerifyOptions { seed: check_seed, ..VerifyOptions::default() };
            Verifier::new(&ifs, opts).unwrap().run_all(&ids).iter().map(|r| r.to_string()).collect::<Vec<_>>()
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn certificate_witnesses_reproduce(seed in any::<u64>(), n_maps in 2usize..=3) {
        let tol = Tolerances { tol_attr: 1e-2, ..Tolerances::default() };
        let ifs = verifier::random_affine_ifs(seed, 2, n_maps, (0.5, 1.3), tol).unwrap();
        let b = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        let cert = ifs.diminishing_certificate(&b, 5, Some(0.1)).unwrap();
        for (i, w) in cert.worst_words.iter().enumerate() {
            prop_assert_eq!(ifs.word_image(w, &b).unwrap().diameter().to_bits(), cert.max_diams[i].to_bits());
        }
    }
}

#[test]
fn code_distance_exhaustive_small_triples() {
    let al = Alphabet::new(2).unwrap();
    let mut all = Vec::new();
    for total in 1..=4 {
        for per_len in 1..=total {
            let pre_len = total - per_len;
            for bits in 0..(1u32 << total) {
                let letters: Vec<u32> = (0..total).map(|i| (bits >> i) & 1).collect();
                let pre = Word::new(al, letters[..pre_len].to_vec()).unwrap();
                let per = Word::new(al, letters[pre_len..].to_vec()).unwrap();
                all.push(AddressSpec::new(pre, per).unwrap());
            }
        }
    }
    all.sort_by_key(|a| a.to_string());
    all.dedup();
    let d = |x: &AddressSpec, y: &AddressSpec| codespace::code_distance(x, y).unwrap();
    for a in &all {
        for b in &all {
            assert_eq!(d(a, b), d(b, a));
            assert_eq!(d(a, b) == 0.0, a == b);
            for c in &all {
                assert!(d(a, c) <= d(a, b) + d(b, c));
            }
        }
    }
}

#[test]
fn witnessed_maps_keep_their_factor() {
    let f = ContractionMap::affine(AffineMap::new(vec![0.3, 0.1, -0.2, 0.4], vec![1.0, 0.0]).unwrap());
    let lip = f.as_affine().unwrap().operator_norm();
    assert!(f.clone().with_witness(ComparisonFunction::linear(lip * 0.9).unwrap()).is_err());
    assert!(f.with_witness(ComparisonFunction::linear(lip * 1.01).unwrap()).is_ok());
}

mod common;

use std::f64::consts::PI;

use num_rational::Ratio;
use proptest::prelude::*;
use pwdual::duality::{discrete_duality_verify, discrete_sampling_check, prop4_verify, DiscreteModel, OrthoDecomposition};
use pwdual::exponential::{gram_matrix, riesz_bound_estimates, bessel_bound_estimate};
use pwdual::experiments::claim_pipeline;
use pwdual::sets::{
    self, check_complementarity, is_delta_perturbation, lower_density, perturb, round_to_lattice, separation_constant,
    upper_density, PerturbationRule,
};
use pwdual::stability::perturbation_norm_check;
use pwdual::sets::Perturbation;
use pwdual::{Spectrum, UdSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Strictly increasing points with gaps in `[0.3, 2]`.
fn window_points() -> impl Strategy<Value = Vec<f64>> {
    (-10.0f64..10.0, prop::collection::vec(0.3f64..2.0, 1..30)).prop_map(|(start, gaps)| {
        let mut pts = vec![start];
        for g in gaps {
            let last = *pts.last().unwrap();
            pts.push(last + g);
        }
        pts
    })
}

/// `(modulus, residues)` with `1 ≤ modulus ≤ 12`.
fn residue_set() -> impl Strategy<Value = (u64, Vec<u64>)> {
    (1u64..=12).prop_flat_map(|m| (Just(m), prop::collection::btree_set(0..m, 0..=m as usize)))
        .prop_map(|(m, s)| (m, s.into_iter().collect()))
}

fn spectrum() -> impl Strategy<Value = Spectrum> {
    prop::collection::vec((-6.0f64..6.0, 0.05f64..2.0), 1..4)
        .prop_map(|iv| Spectrum::new(iv.into_iter().map(|(a, l)| (a, a + l)).collect()).unwrap())
}

proptest! {
    #[test]
    fn perturbation_keeps_separation(pts in window_points(), frac in 0.0f64..0.999, seed in any::<u64>()) {
        prop_assume!(pts.len() >= 2);
        let set = UdSet::from_points(pts).unwrap();
        let d = separation_constant(&set).unwrap();
        let delta = frac * d / 4.0;
        let moved = perturb(&set, &PerturbationRule::SeededUniform { delta, seed }).unwrap();
        let d2 = common::brute_min_distance(moved.generators());
        prop_assert!(d2 >= d - 2.0 * delta - 1e-12);
        prop_assert!(d2 >= d / 2.0 - 1e-12);
        prop_assert!(is_delta_perturbation(&moved, &set, delta));
    }

    #[test]
    fn periodic_densities_are_exact(period in 0.5f64..5.0, fracs in prop::collection::btree_set(0u32..1000, 1..8)) {
        let offsets: Vec<f64> = fracs.iter().map(|&k| period * k as f64 / 1000.0).collect();
        let set = UdSet::periodic(period, offsets.clone()).unwrap();
        let lo = lower_density(&set, 3.7).unwrap();
        let hi = upper_density(&set, 0.2).unwrap();
        prop_assert!(lo.exact && hi.exact);
        prop_assert_eq!(lo.value, offsets.len() as f64 / period);
        prop_assert_eq!(hi.value, lo.value);
        // Truncations to windows of whole periods give the same value.
        let k = 6.0;
        let trunc = set.truncate(0.0, k * period).unwrap();
        let pts = trunc.generators().to_vec();
        for mult in [1.0, 2.0, 3.0] {
            let l = mult * period;
            let (bmin, bmax) = common::brute_window_counts(&pts, (0.0, k * period), l, 3000);
            let lo = lower_density(&trunc, l).unwrap().value;
            let hi = upper_density(&trunc, l).unwrap().value;
            prop_assert_eq!(lo, bmin as f64 / l);
            prop_assert_eq!(hi, bmax as f64 / l);
            prop_assert!((lo * l - offsets.len() as f64 * mult).abs() <= 1.0);
        }
    }

    #[test]
    fn window_density_matches_brute_force(pts in window_points(), l in 0.5f64..8.0) {
        let set = UdSet::from_points(pts.clone()).unwrap();
        let span = pts[pts.len() - 1] - pts[0];
        prop_assume!(l <= span);
        let (bmin, bmax) = common::brute_window_counts(&pts, (pts[0], pts[pts.len() - 1]), l, 20_000);
        let lo = lower_density(&set, l).unwrap().value * l;
        let hi = upper_density(&set, l).unwrap().value * l;
        // The fine scan can only miss extremal positions, never invent them.
        prop_assert!(lo.round() as usize <= bmin && hi.round() as usize >= bmax);
        prop_assert!(bmin - lo.round() as usize <= 1 && hi.round() as usize - bmax <= 1);
    }

    #[test]
    fn complementarity_for_random_steps((m, residues) in residue_set(), delta in 0.05f64..3.0) {
        let offsets: Vec<f64> = residues.iter().map(|&r| r as f64 * delta).collect();
        let set = UdSet::periodic(m as f64 * delta, offsets).unwrap();
        let r = check_complementarity(&set, delta).unwrap();
        prop_assert!(r.passes);
        prop_assert_eq!(r.lower_sites, Ratio::new(residues.len() as i64, m as i64));
    }

    #[test]
    fn rounding_is_a_half_step_perturbation(pts in window_points(), frac in 0.05f64..1.0) {
        prop_assume!(pts.len() >= 2);
        let set = UdSet::from_points(pts).unwrap();
        let delta = frac * separation_constant(&set).unwrap() / 2.0;
        let rounded = round_to_lattice(&set, delta).unwrap();
        prop_assert!(is_delta_perturbation(&rounded, &set, delta / 2.0 * (1.0 + 1e-12)));
        prop_assert!(rounded.generators().iter().all(|&x| sets::lattice_index(x, delta).is_some()));
    }

    #[test]
    fn rounding_preserves_periodic_density(m in 2u64..12, fracs in prop::collection::btree_set(0u32..1000, 1..4), delta in 0.1f64..1.0) {
        let period = m as f64 * delta * 4.0;
        let offsets: Vec<f64> = fracs.iter().map(|&k| period * k as f64 / 1000.0).collect();
        let set = UdSet::periodic(period, offsets).unwrap();
        prop_assume!(separation_constant(&set).unwrap() >= 2.0 * delta);
        let rounded = round_to_lattice(&set, delta).unwrap();
        prop_assert_eq!(upper_density(&rounded, 1.0).unwrap().value, upper_density(&set, 1.0).unwrap().value);
        prop_assert!(is_delta_perturbation(&rounded, &set, delta / 2.0 * (1.0 + 1e-9)));
    }

    #[test]
    fn claim_identity((m, residues) in residue_set(), delta in 0.1f64..2.0) {
        let offsets: Vec<f64> = residues.iter().map(|&r| r as f64 * delta).collect();
        let set = UdSet::periodic(m as f64 * delta, offsets).unwrap();
        let s = Spectrum::interval(0.0, PI / delta).unwrap();
        let r = claim_pipeline(&set, &s, delta, None, None).unwrap();
        prop_assert_eq!(r.sites_rounded + r.sites_complement, Ratio::from_integer(1));
        prop_assert!(r.passes);
        prop_assert!((r.upper_density_rounded + r.lower_density_complement - 1.0 / delta).abs() < 1e-12 / delta);
    }

    #[test]
    fn spectrum_normalization(iv in prop::collection::vec((-6.0f64..6.0, 0.05f64..2.0), 1..5), shift in -5.0f64..5.0) {
        let raw: Vec<(f64, f64)> = iv.iter().map(|&(a, l)| (a, a + l)).collect();
        let s = Spectrum::new(raw.clone()).unwrap();
        prop_assert_eq!(Spectrum::new(s.intervals().to_vec()).unwrap(), s.clone());
        prop_assert!(s.intervals().windows(2).all(|w| w[0].1 < w[1].0));
        let sum: f64 = s.intervals().iter().map(|(a, b)| b - a).sum();
        prop_assert!((s.measure() - sum).abs() < 1e-12);
        prop_assert!(s.measure() <= raw.iter().map(|(a, b)| b - a).sum::<f64>() + 1e-12);
        prop_assert!((s.translate(shift).measure() - s.measure()).abs() < 1e-12);
        let (lo, hi) = (-10.0, 10.0);
        let c = s.complement_within(lo, hi).unwrap();
        prop_assert!((c.measure() + s.measure() - (hi - lo)).abs() < 1e-10);
        let back = c.complement_within(lo, hi).unwrap();
        prop_assert_eq!(back.intervals().len(), s.intervals().len());
        for (x, y) in back.intervals().iter().zip(s.intervals()) {
            prop_assert!((x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gram_is_hermitian_psd_with_constant_diagonal(pts in window_points(), s in spectrum()) {
        let g = gram_matrix(&pts, &s).unwrap();
        prop_assert!(g.hermitian_defect() <= 1e-14);
        let diag = s.measure() / (2.0 * PI);
        prop_assert!((0..g.dim()).all(|i| (g.entries[(i, i)].re - diag).abs() < 1e-13));
        let ev = g.eigenvalues().unwrap();
        let max = ev.iter().fold(0.0f64, |m, &v| m.max(v));
        prop_assert!(ev.iter().all(|&v| v >= -1e-12 * max));
    }

    #[test]
    fn window_growth_is_monotone(pts in window_points(), s in spectrum(), cut in 1usize..29) {
        prop_assume!(cut < pts.len());
        let small = &pts[..cut];
        let a = riesz_bound_estimates(small, &s).unwrap();
        let b = riesz_bound_estimates(&pts, &s).unwrap();
        prop_assert!(b.lower <= a.lower + 1e-12);
        let a = bessel_bound_estimate(small, &s).unwrap();
        let b = bessel_bound_estimate(&pts, &s).unwrap();
        prop_assert!(b.upper >= a.upper - 1e-12);
    }

    #[test]
    fn gram_scaling(pts in window_points(), s in spectrum(), scale in 0.25f64..4.0) {
        let g = gram_matrix(&pts, &s).unwrap();
        let scaled: Vec<f64> = pts.iter().map(|p| p / scale).collect();
        let h = gram_matrix(&scaled, &s.scale(scale).unwrap()).unwrap();
        let dev = (&h.entries - &g.entries * pwdual::Complex64::new(scale, 0.0)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-13 * scale.max(1.0) * (1.0 + s.measure()), "{}", dev);
    }

    #[test]
    fn integer_exponentials_are_orthonormal(ks in prop::collection::btree_set(-500i64..500, 1..40)) {
        let pts: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
        let g = gram_matrix(&pts, &Spectrum::symmetric(PI).unwrap()).unwrap();
        let n = pts.len();
        let dev = (&g.entries - pwdual::CMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-13);
    }

    #[test]
    fn prop4_random(n in 2usize..=8, rank_frac in 0.0f64..=1.0, v_frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let rank = (rank_frac * n as f64).round() as usize;
        let v_len = (v_frac * n as f64).round() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = OrthoDecomposition::random(n, rank, v_len, &mut rng).unwrap();
        let r = prop4_verify(&d).unwrap();
        prop_assert!(r.ok(), "{:?}", r);
        if let (true, Some(a), Some(c2)) = (r.frame_verdict, r.a, r.c_squared) {
            if a > 0.01 {
                prop_assert!(c2 >= a / (1.0 + a) - 1e-9);
            }
        }
        // Both lower bounds equal 1 − ‖P·E_W‖² when both families are nontrivial.
        if let (Some(a), Some(c2)) = (r.a, r.c_squared) {
            let p = d.projector();
            let pw = pwdual::CMatrix::from_fn(n, d.w().len(), |i, j| p[(i, d.w()[j])]);
            let norm = pwdual::linalg::spectral_norm(&pw).unwrap();
            prop_assert!((a - c2).abs() < 1e-9, "{} vs {}", a, c2);
            prop_assert!((a - (1.0 - norm * norm).max(0.0)).abs() < 1e-9);
        }
        // The mirrored instance (I − P, W) is the converse direction: its Riesz
        // verdict is about {P e_v : v ∈ V} in range(P).
        let m = prop4_verify(&d.mirror()).unwrap();
        prop_assert!(m.ok(), "{:?}", m);
        let pv: Vec<Vec<pwdual::Complex64>> =
            d.v().iter().map(|&v| (0..n).map(|i| d.projector()[(i, v)]).collect()).collect();
        let independent = d.v().is_empty() || common::gram_rank(&pv, 1e-9) == d.v().len();
        prop_assert_eq!(m.riesz_verdict, independent);
        prop_assert_eq!(m.frame_verdict, independent);
    }

    #[test]
    fn discrete_duality_involution_and_translation(n in 1usize..=10, lm in any::<u32>(), sm in any::<u32>(), a in 0usize..10, b in 0usize..10) {
        let mask = (1u32 << n) - 1;
        let pick = |m: u32| (0..n).filter(|i| (m & mask) >> i & 1 == 1).collect::<Vec<_>>();
        let model = DiscreteModel::new(n, pick(lm), pick(sm)).unwrap();
        let r = discrete_duality_verify(&model).unwrap();
        prop_assert!(r.consistent);
        let twice = model.complement().complement();
        prop_assert_eq!(&twice, &model);
        let r2 = discrete_duality_verify(&twice).unwrap();
        prop_assert_eq!(r2.sampling.verdict, r.sampling.verdict);
        let moved = model.translate(a % n, b % n);
        let x = discrete_sampling_check(&model).unwrap();
        let y = discrete_sampling_check(&moved).unwrap();
        prop_assert_eq!(x.verdict, y.verdict);
        prop_assert!((x.sigma_min - y.sigma_min).abs() < 1e-12 && (x.sigma_max - y.sigma_max).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn perturbation_bound_and_linearity(t in 5.0f64..15.0, sigma in 0.5f64..3.0, delta in 0.02f64..0.2, seed in any::<u64>()) {
        let set = UdSet::lattice_window(1.0, 0.0, -t, t).unwrap();
        let s = Spectrum::symmetric(sigma).unwrap();
        let n = set.generators().len();
        let m = 4.0 * (t + delta) / (2.0 * PI) + 4.0;
        let full = Perturbation::seeded_uniform(n, delta, seed).unwrap();
        let half = Perturbation::seeded_uniform(n, delta / 2.0, seed).unwrap();
        let r1 = perturbation_norm_check(&set, &full, &s, m).unwrap();
        let r2 = perturbation_norm_check(&set, &half, &s, m).unwrap();
        prop_assert!(r1.passes && r2.passes, "{:?} {:?}", r1, r2);
        prop_assert!(r2.measured_norm <= 0.6 * r1.measured_norm, "{:?} {:?}", r1, r2);
    }
}

#[test]
fn complementarity_exhaustive_small_periods() {
    let mut count = 0;
    for m in 1u64..=12 {
        for mask in 0u32..(1 << m) {
            for delta in [1.0, 0.25, 0.3] {
                let offsets: Vec<f64> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| i as f64 * delta).collect();
                let set = UdSet::periodic(m as f64 * delta, offsets).unwrap();
                assert!(check_complementarity(&set, delta).unwrap().passes, "m={m} mask={mask} δ={delta}");
                count += 1;
            }
        }
    }
    assert_eq!(count, 3 * ((1 << 13) - 2));
}

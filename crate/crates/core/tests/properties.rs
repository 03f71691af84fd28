mod common;

use jointex_core::allocation::{
    closed_form_optimum, enumerate_faces, feasible_allocation, lp_max_weighted_mass,
    trivariate_allocation, trivariate_lambda_bounds, AllocationStrategy, CapKind,
};
use jointex_core::copulas::CopulaSpec;
use jointex_core::distortions::DistortionSpec;
use jointex_core::existence::check_je;
use jointex_core::marginals::MarginalSpec;
use jointex_core::model::{independence_copulas, JeModel};
use jointex_core::transforms::{je_to_jm, jm_to_je, reflect, translate, PointJe, PointJm};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn caps_vec(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    n.prop_flat_map(|n| prop::collection::vec(0.0..=1.0f64, n))
}

/// `q0` vectors satisfying `Σ q0 ≤ n − 1`.
fn je_q0(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    caps_vec(n).prop_map(|mut q| {
        let bound = q.len() as f64 - 1.0;
        let s: f64 = q.iter().sum();
        if s > bound {
            q.iter_mut().for_each(|v| *v *= bound / s);
        }
        q
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 128,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn lp_value_equals_closed_form(caps in caps_vec(3..=7)) {
        let sol = lp_max_weighted_mass(&caps).unwrap();
        prop_assert!((sol.value - closed_form_optimum(&caps)).abs() < 1e-9);
        for (i, &c) in caps.iter().enumerate() {
            prop_assert!(sol.allocation.axis_load(i) <= c + 1e-12);
        }
        prop_assert!(sol.allocation.masses().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn strategies_return_feasible_allocations(q0 in je_q0(3..=6), t in 0.0..=1.0f64) {
        let max = feasible_allocation(&q0, &q0, AllocationStrategy::MaxFaceMass).unwrap();
        max.validate(&q0, CapKind::Canonical).unwrap();
        let sol = lp_max_weighted_mass(&q0).unwrap();
        let need = (q0.iter().sum::<f64>() - 1.0).max(0.0);
        let t_min = if need == 0.0 { 0.0 } else { need / sol.value };
        let t = t_min + (1.0 - t_min) * t;
        let scaled = feasible_allocation(&q0, &q0, AllocationStrategy::Scaled(t)).unwrap();
        scaled.validate(&q0, CapKind::Canonical).unwrap();
    }

    #[test]
    fn lambda_interval_is_nonempty_and_feasible(q0 in je_q0(3..=3), s in 0.0..=1.0f64) {
        let (lo, hi) = trivariate_lambda_bounds(&q0, &q0).unwrap();
        prop_assert!(0.0 <= lo && lo <= hi && hi <= 1.0);
        let l = lo + (hi - lo) * s;
        let a = trivariate_allocation(&q0, &q0, l).unwrap();
        a.validate(&q0, CapKind::Canonical).unwrap();
    }

    #[test]
    fn distorted_lambda_interval_is_feasible(
        q0 in je_q0(3..=3),
        shrink in prop::collection::vec(0.5..=1.0f64, 3),
        s in 0.0..=1.0f64,
    ) {
        let caps: Vec<f64> = q0.iter().zip(&shrink).map(|(q, k)| q * k).collect();
        if let Ok((lo, hi)) = trivariate_lambda_bounds(&q0, &caps) {
            let l = lo + (hi - lo) * s;
            let a = trivariate_allocation(&q0, &caps, l).unwrap();
            a.validate(&q0, CapKind::Distorted).unwrap();
        } else {
            let lhs = q0.iter().sum::<f64>() - 1.0;
            prop_assert!(lhs > closed_form_optimum(&caps) - 1e-12);
        }
    }

    #[test]
    fn cdf_is_a_distribution_function(lambda in (1.0 / 3.0)..=0.5f64, x in prop::collection::vec(0.0..1.2f64, 3), dx in 0.0..0.5f64, k in 0usize..3) {
        let m = half_uniform_model(lambda);
        let v = m.cdf(&x).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        let mut y = x.clone();
        y[k] += dx;
        prop_assert!(m.cdf(&y).unwrap() >= v - 1e-12);
        prop_assert!(v >= m.origin_mass() - 1e-12);
    }

    #[test]
    fn region_masses_sum_to_one(q0 in je_q0(3..=5)) {
        let alloc = feasible_allocation(&q0, &q0, AllocationStrategy::MaxFaceMass).unwrap();
        let margs: Vec<MarginalSpec> =
            q0.iter().map(|&q| MarginalSpec::scaled_exponential(q, 1.0).unwrap()).collect();
        let n = q0.len();
        let model = JeModel::build(margs, alloc, independence_copulas(n).unwrap(), None).unwrap();
        let total: f64 = model.region_masses().iter().map(|r| r.1).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(model.axis_mass().iter().all(|&a| a >= -1e-12));
        prop_assert!(model.origin_mass() >= -1e-12);
        prop_assert!(check_je(model.marginals()).unwrap().feasible);
    }

    #[test]
    fn sampled_rows_are_exclusive(q0 in je_q0(3..=5), seed in any::<u64>()) {
        let n = q0.len();
        let alloc = feasible_allocation(&q0, &q0, AllocationStrategy::MaxFaceMass).unwrap();
        let margs: Vec<MarginalSpec> =
            q0.iter().map(|&q| MarginalSpec::scaled_uniform(q, 2.0).unwrap()).collect();
        let copulas: Vec<CopulaSpec> = enumerate_faces(n)
            .unwrap()
            .iter()
            .map(|f| CopulaSpec::comonotone(f.len()).unwrap())
            .collect();
        let model = JeModel::build(margs, alloc, copulas, None).unwrap();
        let batch = model.sample(&mut ChaCha8Rng::seed_from_u64(seed), 2000);
        prop_assert_eq!(batch.exclusivity_violations(), 0);
    }

    #[test]
    fn numeric_g_star_matches_closed_forms(
        q0 in 0.2..=1.0f64,
        a_frac in 0.0..0.8f64,
        b_frac in 0.2..=1.0f64,
        gamma in 1.0..5.0f64,
    ) {
        let b = q0 * b_frac;
        let a = b * a_frac * 0.9;
        let m = MarginalSpec::scaled_uniform(q0, 1.0).unwrap();
        for g in [DistortionSpec::linear(a, b).unwrap(), DistortionSpec::power(a, b, gamma).unwrap()] {
            let exact = g.g_star(&m).unwrap();
            let numeric = g.g_star_numeric(&m).unwrap();
            prop_assert!((exact - numeric).abs() < 1e-3, "{:?}: {} vs {}", g, exact, numeric);
            prop_assert!(numeric <= q0 + 1e-12);
        }
    }

    #[test]
    fn bijection_round_trips(x in prop::collection::vec(0.0..100.0f64, 2..8), zero in any::<prop::sample::Index>()) {
        let mut x = x;
        let k = zero.index(x.len());
        x[k] = 0.0;
        let y = je_to_jm(&PointJe::new(x.clone()).unwrap());
        prop_assert!(y.as_slice().iter().sum::<f64>().abs() < 1e-9);
        let back = jm_to_je(&PointJm::new(y.as_slice().to_vec()).unwrap());
        for (a, b) in back.as_slice().iter().zip(&x) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn reflect_and_translate_invert(x in prop::collection::vec(-10.0..10.0f64, 1..6), l in -5.0..5.0f64) {
        prop_assert_eq!(reflect(&reflect(&x)), x.clone());
        let shift = vec![l; x.len()];
        let back = translate(&translate(&x, &shift).unwrap(), &reflect(&shift)).unwrap();
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn copula_cdfs_respect_frechet_bounds(u in prop::collection::vec(0.0..=1.0f64, 2..5), w in 0.0..=1.0f64) {
        let d = u.len();
        let mix = CopulaSpec::mixture(vec![
            (w, CopulaSpec::independence(d).unwrap()),
            (1.0 - w, CopulaSpec::comonotone(d).unwrap()),
        ]).unwrap();
        let lower = (u.iter().sum::<f64>() - (d as f64 - 1.0)).max(0.0);
        let upper = u.iter().copied().fold(1.0, f64::min);
        let v = mix.cdf(&u).unwrap();
        prop_assert!(v >= lower - 1e-12 && v <= upper + 1e-12);
    }
}

#[test]
fn lambda_sweep_fails_just_outside() {
    let (lo, hi) = trivariate_lambda_bounds(&HALF, &HALF).unwrap();
    for k in 0..100 {
        let l = lo + (hi - lo) * k as f64 / 99.0;
        assert!(trivariate_allocation(&HALF, &HALF, l).is_ok());
    }
    assert!(trivariate_allocation(&HALF, &HALF, lo - 1e-6).is_err());
    assert!(trivariate_allocation(&HALF, &HALF, hi + 1e-6).is_err());
}

#[test]
fn translated_batch_satisfies_exclusivity_bound() {
    let batch = half_uniform_model(0.4).sample(&mut ChaCha8Rng::seed_from_u64(3), 100_000);
    let l = [0.1, 0.2, 0.3];
    let shifted: Vec<Vec<f64>> = batch.rows().map(|r| translate(r, &l).unwrap()).collect();
    let total: f64 = (0..3)
        .map(|i| shifted.iter().filter(|r| r[i] > l[i]).count() as f64 / shifted.len() as f64)
        .sum();
    assert!(total <= 2.0);
    let reflected = batch.rows().map(reflect).filter(|r| r.iter().all(|&y| y < 0.0)).count();
    assert_eq!(reflected, 0);
}

#[test]
fn inclusion_exclusion_against_empirical_pair_survival() {
    let model = half_uniform_model(0.4);
    let batch = model.sample(&mut ChaCha8Rng::seed_from_u64(4), 400_000);
    let grid = [0.1, 0.4, 0.8];
    for &a in &grid {
        for &b in &grid {
            for &c in &grid {
                let x = [a, b, c];
                let mut v = 1.0;
                for (i, m) in model.marginals().iter().enumerate() {
                    v -= m.survival(x[i]).unwrap();
                }
                for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                    v += batch.joint_survival(&[i, j], &[x[i], x[j]]);
                }
                assert!((v - model.cdf(&x).unwrap()).abs() < 0.01, "{x:?}");
            }
        }
    }
}

#[test]
fn canonical_identity_distortion_matches_canonical_model() {
    let d = DistortionSpec::identity(0.5).unwrap();
    let alloc = trivariate_allocation(&HALF, &HALF, 0.4).unwrap();
    let dist = JeModel::build(
        uniforms(&HALF),
        alloc,
        trivariate_copulas(),
        Some(vec![Some(d.clone()), Some(d.clone()), Some(d)]),
    )
    .unwrap();
    let canon = half_uniform_model(0.4);
    for x in [[0.1, 0.5, 0.9], [0.3, 0.3, 0.3], [1.0, 0.0, 0.2]] {
        assert!((dist.cdf(&x).unwrap() - canon.cdf(&x).unwrap()).abs() < 1e-12);
    }
}

mod common;

use plankcover::convex::{inner_radius, is_empty, support_value, DEFAULT_TOL};
use plankcover::engine::{run_cover, verify_certificate_static, EngineConfig, Mode};
use plankcover::instances::{gen_adversarial, gen_parallel, gen_random, AdversarialParams};
use plankcover::measure::verify_cover;
use plankcover::{CoverCertificate, Instance, UnitVector};
use proptest::prelude::*;

/// Everything the engine promises about one certificate.
fn audit(instance: &Instance, cert: &CoverCertificate, seed: u64) -> Result<(), TestCaseError> {
    let mut rng = common::rng(seed);
    prop_assert!(verify_certificate_static(instance, cert).is_valid());
    prop_assert!(cert.planks_used <= instance.len());
    prop_assert_eq!(cert.planks_used, cert.placements.len());
    for (i, p) in cert.placements.iter().enumerate() {
        let plank = &instance.planks[cert.ordering[i]];
        prop_assert_eq!(p.normal, plank.normal);
        prop_assert!((p.width() - plank.width).abs() <= 1e-12);

        let before = cert.region_after(i);
        let after = cert.region_after(i + 1);
        // Tangent from above.
        let h = support_value(&before, &p.normal, DEFAULT_TOL)
            .unwrap()
            .value;
        prop_assert!((p.upper_offset - h).abs() <= 2.0 * cert.tol_support);
        // Exact cut while something is left.
        if inner_radius(&after, 1e-9).unwrap().radius > 1e-6 {
            let h2 = support_value(&after, &p.normal, DEFAULT_TOL).unwrap().value;
            prop_assert!((h2 - p.lower_offset).abs() < 1e-6);
        }
        // Nesting.
        for _ in 0..50 {
            let q = common::cube_ball_point(&mut rng);
            if after.contains(&q, 0.0) {
                prop_assert!(before.contains(&q, 0.0));
            }
        }
        if i > 0 && cert.placements[i - 1].normal == p.normal {
            prop_assert!(p.upper_offset <= cert.placements[i - 1].upper_offset);
        }
    }
    prop_assert_eq!(
        common::certificate_midpoint_violations(&mut rng, cert, 1, 100),
        0
    );
    let empty = is_empty(&cert.final_region(), 1e-9).unwrap();
    prop_assert_eq!(cert.covered, empty);
    if cert.covered {
        prop_assert_eq!(verify_cover(instance, cert, 100_000, seed).unwrap(), 0.0);
    }
    Ok(())
}

#[test]
fn stacked_examples() {
    let config = EngineConfig::default();
    let ten = gen_parallel(10, 0.2, UnitVector::Z).unwrap();
    let cert = run_cover(&ten, &config).unwrap();
    assert!(cert.covered);
    assert_eq!(cert.planks_used, 10);
    assert!((cert.placements[9].lower_offset + 1.0).abs() < 1e-12);
    audit(&ten, &cert, 0).unwrap();

    let nine = gen_parallel(9, 0.2, UnitVector::Z).unwrap();
    let cert = run_cover(&nine, &config).unwrap();
    assert!(!cert.covered);
    assert_eq!(cert.planks_used, 9);
    assert!((cert.placements[8].lower_offset + 0.8).abs() < 1e-12);
    audit(&nine, &cert, 0).unwrap();
}

#[test]
fn random_450_seed_42_covers() {
    let inst = gen_random(450, 0.1, 42).unwrap();
    let cert = run_cover(&inst, &EngineConfig::default()).unwrap();
    assert!(cert.covered);
    assert!(cert.error.is_none());
    audit(&inst, &cert, 42).unwrap();
}

#[test]
fn fixed_order_uses_input_order() {
    let inst = gen_adversarial(&AdversarialParams::new(
        0.05,
        std::f64::consts::FRAC_PI_6,
        2.0,
        3,
    ))
    .unwrap();
    let config = EngineConfig {
        mode: Mode::FixedOrder,
        ..EngineConfig::default()
    };
    let cert = run_cover(&inst, &config).unwrap();
    assert_eq!(cert.ordering, (0..inst.len()).collect::<Vec<_>>());
    audit(&inst, &cert, 3).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_runs_satisfy_engine_invariants(seed in any::<u64>(), k in 5usize..120, eps in 0.08..0.6f64, chunked in any::<bool>()) {
        let inst = gen_random(k, eps, seed).unwrap();
        let mode = if chunked { Mode::Chunked } else { Mode::FixedOrder };
        let config = EngineConfig { mode, ..EngineConfig::default() };
        let cert = run_cover(&inst, &config).unwrap();
        prop_assert!(cert.error.is_none());
        audit(&inst, &cert, seed)?;
        // Bit-for-bit reproducible.
        prop_assert_eq!(run_cover(&inst, &config).unwrap(), cert);
    }

    #[test]
    fn max_planks_truncates(seed in any::<u64>(), cap in 1usize..30) {
        let inst = gen_random(200, 0.1, seed).unwrap();
        let config = EngineConfig { max_planks: cap, ..EngineConfig::default() };
        let cert = run_cover(&inst, &config).unwrap();
        prop_assert_eq!(cert.planks_used, cap);
        prop_assert!(!cert.covered);
        audit(&inst, &cert, seed)?;
    }
}

//! Property tests for the structural invariants: block storage versus dense
//! matrices, the diffeomorphism round trip, and engine direction rules.

mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{add_scaled, random_center, random_param};
use stiefel_cayley::cayley::{forward, inverse};
use stiefel_cayley::engine::{next_direction, EngineKind, InnerSpace, PrevStep, StrategicInfo};
use stiefel_cayley::linalg::spectral_norm;
use stiefel_cayley::manifold::{frobenius_inner, SkewParam};

fn dims_strategy() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=24).prop_flat_map(|n| (Just(n), 1usize..=n))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn materialized_parameter_is_exactly_skew(
        (n, p) in dims_strategy(),
        seed in 0u64..1_000_000,
        scale in 0.01f64..10.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_param(n, p, scale, &mut rng);
        let dense = v.to_dense();
        prop_assert_eq!(dense.clone(), -dense.transpose());
    }

    #[test]
    fn blockwise_inner_matches_dense_trace(
        (n, p) in dims_strategy(),
        seed in 0u64..1_000_000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_param(n, p, 1.0, &mut rng);
        let y = random_param(n, p, 2.0, &mut rng);
        let dense = (x.to_dense().transpose() * y.to_dense()).trace();
        let blockwise = frobenius_inner(&x, &y).unwrap();
        prop_assert!((dense - blockwise).abs() <= 1e-12 * (1.0 + dense.abs()));
    }

    #[test]
    fn block_norms_bound_the_full_spectral_norm(
        (n, p) in dims_strategy(),
        seed in 0u64..1_000_000,
        scale in 0.01f64..5.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_param(n, p, scale, &mut rng);
        let (a_spectral, b_spectral) = v.block_spectral_norms();
        let full = spectral_norm(&v.to_dense());
        prop_assert!(full <= a_spectral + b_spectral + 1e-10 * (1.0 + full));

        // The off-diagonal part alone has spectral norm exactly ||B||_2.
        let off = SkewParam::new(DMatrix::zeros(p, p), v.b().clone()).unwrap();
        let off_norm = spectral_norm(&off.to_dense());
        prop_assert!((off_norm - b_spectral).abs() <= 1e-10 * (1.0 + b_spectral));
    }

    #[test]
    fn inverse_then_forward_is_the_identity(
        (n, p) in dims_strategy(),
        seed in 0u64..1_000_000,
        scale in 0.01f64..4.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center = random_center(n, p, &mut rng);
        let v = random_param(n, p, scale, &mut rng);
        let u = inverse(&center, &v).unwrap();
        prop_assert!(u.feasibility() <= 1e-9);
        let v2 = forward(&center, &u).unwrap();
        let err = add_scaled(&v, -1.0, &v2).norm();
        prop_assert!(err <= 1e-9 * (1.0 + v.norm()));
    }

    #[test]
    fn directions_are_descent_or_flagged_restarts(
        (n, p) in dims_strategy(),
        seed in 0u64..1_000_000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g_new = random_param(n, p, 1.0, &mut rng);
        if g_new.norm() == 0.0 {
            return Ok(());
        }
        let info = StrategicInfo::with_prev(PrevStep {
            direction: random_param(n, p, 1.0, &mut rng),
            gradient: random_param(n, p, 1.0, &mut rng),
            value: 1.0,
            stepsize: 0.5,
        });
        for kind in EngineKind::ALL {
            let out = next_direction(kind, &g_new, &info);
            prop_assert!(out.g_dot_d < 0.0, "{kind}: <g, d> = {}", out.g_dot_d);
            if out.restarted {
                let diff = out.direction.scaled_add(1.0, &g_new);
                prop_assert!(InnerSpace::norm(&diff) == 0.0);
            }
        }
    }
}

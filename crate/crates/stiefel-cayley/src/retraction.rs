//! QR-retraction gradient-descent baseline.
//!
//! Works directly on the manifold: the canonical-metric Riemannian gradient
//! grad f(U) = G - U G^T U is followed by the thin-QR retraction, with the
//! same backtracking line search, initial-stepsize rule, stopping rule, and
//! trace schema as the Cayley driver, so both strategies tabulate side by
//! side. Only gradient descent is provided here; conjugate-gradient variants
//! on the manifold would need vector transports, which are out of scope.

use std::cell::RefCell;
use std::time::Instant;

use nalgebra::DMatrix;

use crate::driver::{
    AlcpConfig, IterRow, RunRecord, RunResult, RunSummary, TerminationReason,
    EXACT_STATIONARY_TOL,
};
use crate::engine::{self, EngineKind, InnerSpace};
use crate::error::{Error, Result};
use crate::linalg;
use crate::manifold::{StiefelPoint, TangentVector};
use crate::objective::{EvalCounters, Objective};

/// Riemannian gradient under the canonical metric: G - U G^T U. The result
/// satisfies the tangency invariant (validated on construction).
pub fn riemannian_grad(point: &StiefelPoint, euclid_grad: &DMatrix<f64>) -> Result<TangentVector> {
    let m = point.data().tr_mul(euclid_grad); // U^T G
    let data = euclid_grad - point.data() * m.transpose();
    TangentVector::new(point, data)
}

/// Thin-QR retraction: the Q factor of U + D with diag(R) > 0. Errors with
/// `RankDeficient` when some |r_jj| < 1e-14.
pub fn qr_retraction(point: &StiefelPoint, direction: &TangentVector) -> Result<StiefelPoint> {
    let q = linalg::thin_qr_positive(&(point.data() + direction.data()), 1e-14)?;
    StiefelPoint::new(q)
}

/// Riemannian gradient descent with the QR retraction. Shares the trace
/// schema with the Cayley driver (center index pinned at 0, no center
/// changes). Requires `cfg.engine == Gd`.
pub fn run_rgd(obj: &dyn Objective, u0: &StiefelPoint, cfg: &AlcpConfig) -> Result<RunResult> {
    if cfg.engine != EngineKind::Gd {
        return Err(Error::Config(format!(
            "the retraction baseline implements gradient descent only (got {})",
            cfg.engine
        )));
    }
    let timer = Instant::now();
    let counters = EvalCounters::new();

    let mut u = u0.clone();
    counters.count_value();
    let mut f = obj.value(u.data());
    counters.count_gradient();
    let mut grad = riemannian_grad(&u, &obj.euclid_gradient(u.data()))?;
    let g0_frob = grad.frobenius_norm();

    let mut prev_value: Option<f64> = None;
    let mut rows: Vec<IterRow> = Vec::new();
    let mut n = 0usize;

    let reason = loop {
        let grad_frob = grad.frobenius_norm();
        let mut row = IterRow {
            n,
            center_index: 0,
            f_value: f,
            grad_norm: grad_frob,
            g_dot_d: f64::NAN,
            stepsize: f64::NAN,
            ls_trials: 0,
            feasibility: u.feasibility(),
            v_norm_bound: f64::NAN,
            center_changed: false,
            restart: false,
            elapsed_sec: timer.elapsed().as_secs_f64(),
        };

        if grad_frob < EXACT_STATIONARY_TOL {
            rows.push(row);
            break TerminationReason::ExactStationary;
        }
        if grad_frob / g0_frob < cfg.rel_grad_tol {
            rows.push(row);
            break TerminationReason::GradTol;
        }
        if n >= cfg.max_iter {
            rows.push(row);
            break TerminationReason::MaxIter;
        }

        let direction = grad.scale(-1.0);
        let g_dot_d = grad.inner(&direction);
        if !(g_dot_d < 0.0) {
            rows.push(row);
            break TerminationReason::LineSearchStalled;
        }
        let gamma_init =
            engine::ratio_initial_stepsize(prev_value, f, g_dot_d, grad.norm());

        // The last evaluated trial is the accepted one; keep its point so the
        // accepted value and iterate match bitwise.
        let last_trial: RefCell<Option<StiefelPoint>> = RefCell::new(None);
        let searched = engine::backtracking(
            |gamma| {
                let trial = qr_retraction(&u, &direction.scale(gamma))?;
                counters.count_value();
                let value = obj.value(trial.data());
                *last_trial.borrow_mut() = Some(trial);
                Ok(value)
            },
            f,
            g_dot_d,
            gamma_init,
            &cfg.line_search,
        );
        let (gamma, f_next, ls_trials) = match searched {
            Ok(ok) => ok,
            Err(Error::LineSearchStalled { .. }) => {
                rows.push(row);
                break TerminationReason::LineSearchStalled;
            }
            Err(e) => return Err(e),
        };
        row.g_dot_d = g_dot_d;
        row.stepsize = gamma;
        row.ls_trials = ls_trials;
        rows.push(row);

        prev_value = Some(f);
        u = last_trial.into_inner().expect("line search evaluated at least once");
        f = f_next;
        counters.count_gradient();
        grad = riemannian_grad(&u, &obj.euclid_gradient(u.data()))?;
        n += 1;
    };

    let elapsed = timer.elapsed().as_secs_f64();
    let last = rows.last().expect("at least one row");
    let summary = RunSummary {
        f_final: last.f_value,
        feasibility: last.feasibility,
        grad_norm: last.grad_norm,
        iterations: last.n,
        elapsed_sec: elapsed,
        value_evals: counters.value_evals(),
        gradient_evals: counters.gradient_evals(),
        nfe: counters.total(),
        center_changes: 0,
    };
    Ok(RunResult {
        point: u,
        param: None,
        center: None,
        reason,
        record: RunRecord { rows, summary },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eigenvalues_desc;
    use crate::problems::{eigenbasis, nearest_point};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gradient_of_point_itself_vanishes() {
        let u = StiefelPoint::random(12, 3, 1);
        let g = riemannian_grad(&u, u.data()).unwrap();
        assert!(g.frobenius_norm() < 1e-13);
    }

    #[test]
    fn gradient_vanishes_on_invariant_subspace() {
        // A U = U Lambda makes U stationary for the trace objective.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (n, p) = (10usize, 3usize);
        let u = StiefelPoint::random(n, p, 3);
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.0, 1.0]));
        // Build A = U Lambda U^T + W, with W acting only off the span of U.
        let w_raw = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>() - 0.5);
        let proj = DMatrix::<f64>::identity(n, n) - u.data() * u.data().transpose();
        let w = &proj * (&w_raw + w_raw.transpose()) * &proj;
        let a = u.data() * lambda * u.data().transpose() + w;
        let obj = eigenbasis(a);
        let g = riemannian_grad(&u, &obj.euclid_gradient(u.data())).unwrap();
        assert!(g.frobenius_norm() < 1e-10);
    }

    #[test]
    fn gradient_matches_directional_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (n, p) = (14usize, 4usize);
        let u = StiefelPoint::random(n, p, 5);
        let raw = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>() - 0.5);
        let obj = eigenbasis(&raw + raw.transpose());
        let grad = riemannian_grad(&u, &obj.euclid_gradient(u.data())).unwrap();

        let h = 1e-6;
        for _ in 0..10 {
            // Random tangent direction via projection.
            let w = DMatrix::from_fn(n, p, |_, _| rng.gen::<f64>() - 0.5);
            let utw = u.data().tr_mul(&w);
            let sym = (&utw + utw.transpose()) * 0.5;
            let d = TangentVector::new(&u, &w - u.data() * sym).unwrap();
            // Central difference of f along the retracted curve.
            let fp = obj.value(qr_retraction(&u, &d.scale(h)).unwrap().data());
            let fm = obj.value(qr_retraction(&u, &d.scale(-h)).unwrap().data());
            let fd = (fp - fm) / (2.0 * h);
            let analytic = grad.inner(&d);
            let rel = (fd - analytic).abs() / analytic.abs().max(grad.frobenius_norm());
            assert!(rel < 1e-6, "rel = {rel}");
        }
    }

    #[test]
    fn retraction_at_zero_is_identity() {
        let u = StiefelPoint::random(9, 3, 6);
        let zero = TangentVector::new(&u, DMatrix::zeros(9, 3)).unwrap();
        let back = qr_retraction(&u, &zero).unwrap();
        assert!((back.data() - u.data()).norm() < 1e-13);
    }

    #[test]
    fn retraction_normalizes_single_column() {
        let u = StiefelPoint::new(DMatrix::from_column_slice(2, 1, &[1.0, 0.0])).unwrap();
        let t = 0.7;
        let d = TangentVector::new(&u, DMatrix::from_column_slice(2, 1, &[0.0, t])).unwrap();
        let r = qr_retraction(&u, &d).unwrap();
        let scale = (1.0 + t * t).sqrt();
        assert!((r.data()[(0, 0)] - 1.0 / scale).abs() < 1e-14);
        assert!((r.data()[(1, 0)] - t / scale).abs() < 1e-14);
    }

    #[test]
    fn retraction_agrees_with_straight_line_to_first_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (n, p) = (12usize, 3usize);
        let u = StiefelPoint::random(n, p, 8);
        let w = DMatrix::from_fn(n, p, |_, _| rng.gen::<f64>() - 0.5);
        let utw = u.data().tr_mul(&w);
        let sym = (&utw + utw.transpose()) * 0.5;
        let d = TangentVector::new(&u, &w - u.data() * sym).unwrap();

        let err = |tau: f64| {
            let r = qr_retraction(&u, &d.scale(tau)).unwrap();
            (r.data() - (u.data() + d.data() * tau)).norm()
        };
        let e3 = err(1e-3);
        let e4 = err(1e-4);
        // Quadratic decay: shrinking tau by 10 divides the error by ~100.
        assert!(e4 <= 0.04 * e3, "e3 = {e3}, e4 = {e4}");
    }

    #[test]
    fn rank_deficient_retraction_is_detected() {
        let u = StiefelPoint::new(DMatrix::identity(4, 2)).unwrap();
        // D = -U is tangent-violating, so build the degenerate sum directly.
        let d = TangentVector::from_parts(-u.data().clone(), DMatrix::zeros(2, 2));
        assert!(matches!(
            qr_retraction(&u, &d),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn run_terminates_immediately_at_minimizer() {
        let u0 = StiefelPoint::random(15, 3, 9);
        let obj = nearest_point(u0.clone());
        let result = run_rgd(&obj, &u0, &AlcpConfig::default()).unwrap();
        assert_eq!(result.record.summary.iterations, 0);
    }

    #[test]
    fn eigenbasis_run_reaches_dominant_subspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let (n, p) = (100usize, 3usize);
        let raw = DMatrix::from_fn(n, n, |_, _| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
        let a = raw.transpose() * &raw;
        let obj = eigenbasis(a.clone());
        let u0 = StiefelPoint::random(n, p, 11);
        let result = run_rgd(&obj, &u0, &AlcpConfig::default()).unwrap();

        let eigs = symmetric_eigenvalues_desc(&a);
        let best: f64 = eigs[..p].iter().sum();
        let achieved = -result.record.summary.f_final;
        assert!(
            (achieved - best).abs() <= 1e-6 * best.abs(),
            "achieved {achieved} vs optimal {best}"
        );

        // Monotone descent and feasible iterates all the way down.
        for w in result.record.rows.windows(2) {
            assert!(w[1].f_value <= w[0].f_value);
        }
        for row in &result.record.rows {
            assert!(row.feasibility <= 1e-9);
        }
    }

    #[test]
    fn baseline_rejects_cg_engines() {
        let u0 = StiefelPoint::random(10, 2, 12);
        let obj = nearest_point(u0.clone());
        let cfg = AlcpConfig {
            engine: EngineKind::CgFr,
            ..AlcpConfig::default()
        };
        assert!(matches!(run_rgd(&obj, &u0, &cfg), Err(Error::Config(_))));
    }
}

//! Euclidean line-search engines over an abstract inner-product space:
//! gradient descent and FR / HS+ / HZ nonlinear conjugate gradient, with
//! Armijo backtracking and a ratio-based initial stepsize.
//!
//! Engines never look inside the vector representation — only at addition,
//! scaling, and the inner product — so the same code drives the structured
//! skew parameter space for every center, and any other space implementing
//! [`InnerSpace`].

use crate::error::{Error, Result};

/// Minimal inner-product-space surface the engines rely on.
pub trait InnerSpace: Clone {
    fn inner(&self, other: &Self) -> f64;
    /// self + alpha * other.
    fn scaled_add(&self, alpha: f64, other: &Self) -> Self;
    fn scale(&self, alpha: f64) -> Self;
    fn norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }
}

impl InnerSpace for crate::manifold::SkewParam {
    fn inner(&self, other: &Self) -> f64 {
        crate::manifold::SkewParam::inner(self, other).expect("engine operands share one space")
    }
    fn scaled_add(&self, alpha: f64, other: &Self) -> Self {
        self.scaled_add_param(alpha, other)
    }
    fn scale(&self, alpha: f64) -> Self {
        self.scale_param(alpha)
    }
}

impl InnerSpace for crate::manifold::TangentVector {
    fn inner(&self, other: &Self) -> f64 {
        self.canonical_inner(other)
    }
    fn scaled_add(&self, alpha: f64, other: &Self) -> Self {
        self.scaled_add_tangent(alpha, other)
    }
    fn scale(&self, alpha: f64) -> Self {
        self.scale_tangent(alpha)
    }
}

/// Search-direction rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    /// Steepest descent.
    Gd,
    /// Fletcher-Reeves conjugate gradient.
    CgFr,
    /// Hestenes-Stiefel+ conjugate gradient (beta clipped at zero).
    CgHsPlus,
    /// Hager-Zhang conjugate gradient.
    CgHz,
}

impl EngineKind {
    pub const ALL: [EngineKind; 4] = [
        EngineKind::Gd,
        EngineKind::CgFr,
        EngineKind::CgHsPlus,
        EngineKind::CgHz,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EngineKind::Gd => "gd",
            EngineKind::CgFr => "cg-fr",
            EngineKind::CgHsPlus => "cg-hs+",
            EngineKind::CgHz => "cg-hz",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gd" => Ok(EngineKind::Gd),
            "cg-fr" => Ok(EngineKind::CgFr),
            "cg-hs+" => Ok(EngineKind::CgHsPlus),
            "cg-hz" => Ok(EngineKind::CgHz),
            other => Err(Error::Config(format!(
                "unknown engine '{other}' (expected gd, cg-fr, cg-hs+, cg-hz)"
            ))),
        }
    }
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Armijo backtracking parameters; the defaults are c = 2^-13, rho = 0.5.
#[derive(Debug, Clone, Copy)]
pub struct LineSearchConfig {
    /// Armijo slope fraction, in (0, 1).
    pub c: f64,
    /// Stepsize shrink factor, in (0, 1).
    pub rho: f64,
    /// Cap on halvings before declaring the search stalled.
    pub max_halvings: u32,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        Self {
            c: 2.0f64.powi(-13),
            rho: 0.5,
            max_halvings: 60,
        }
    }
}

/// Per-segment optimizer memory: the quantities from the previous accepted
/// step that the direction and stepsize rules consume. `fresh` (no previous
/// step) holds exactly between (re)initialization and the first update.
#[derive(Debug, Clone)]
pub struct StrategicInfo<X> {
    prev: Option<PrevStep<X>>,
}

#[derive(Debug, Clone)]
pub struct PrevStep<X> {
    pub direction: X,
    pub gradient: X,
    pub value: f64,
    pub stepsize: f64,
}

impl<X> StrategicInfo<X> {
    pub fn fresh() -> Self {
        Self { prev: None }
    }

    pub fn with_prev(prev: PrevStep<X>) -> Self {
        Self { prev: Some(prev) }
    }

    pub fn is_fresh(&self) -> bool {
        self.prev.is_none()
    }

    pub fn prev(&self) -> Option<&PrevStep<X>> {
        self.prev.as_ref()
    }
}

/// Clamp bounds for the ratio-based initial stepsize; degenerate ratios are
/// absorbed instead of surfaced.
pub const STEPSIZE_CLAMP: (f64, f64) = (1e-20, 1e20);

/// Initial trial stepsize: 1/||g|| on a fresh segment, otherwise
/// 4 (J(x_n) - J(x_{n-1})) / <g_n, d_n>, clamped to [`STEPSIZE_CLAMP`].
pub fn initial_stepsize<X>(
    info: &StrategicInfo<X>,
    current_value: f64,
    g_dot_d: f64,
    g_norm: f64,
) -> f64 {
    ratio_initial_stepsize(
        info.prev().map(|p| p.value),
        current_value,
        g_dot_d,
        g_norm,
    )
}

/// The same rule with the previous value passed explicitly (the retraction
/// baseline carries no vector-valued strategic state).
pub fn ratio_initial_stepsize(
    prev_value: Option<f64>,
    current_value: f64,
    g_dot_d: f64,
    g_norm: f64,
) -> f64 {
    let raw = match prev_value {
        None => 1.0 / g_norm,
        Some(prev) => 4.0 * (current_value - prev) / g_dot_d,
    };
    if raw.is_nan() {
        return STEPSIZE_CLAMP.0;
    }
    raw.clamp(STEPSIZE_CLAMP.0, STEPSIZE_CLAMP.1)
}

/// Armijo backtracking on the one-dimensional slice phi(gamma) = J(x + gamma d).
///
/// Returns the accepted stepsize gamma = gamma_init * rho^k for the smallest
/// k >= 0 with phi(gamma) <= phi(0) + c gamma <g, d>, together with the
/// accepted value and the number of trials (k + 1).
pub fn backtracking(
    mut phi: impl FnMut(f64) -> Result<f64>,
    phi_at_zero: f64,
    g_dot_d: f64,
    gamma_init: f64,
    cfg: &LineSearchConfig,
) -> Result<(f64, f64, u32)> {
    if !(g_dot_d < 0.0) {
        return Err(Error::NotDescent { g_dot_d });
    }
    assert!(gamma_init > 0.0, "initial stepsize must be positive");
    let mut gamma = gamma_init;
    let mut trials = 0u32;
    loop {
        trials += 1;
        let value = phi(gamma)?;
        if value <= phi_at_zero + cfg.c * gamma * g_dot_d {
            return Ok((gamma, value, trials));
        }
        if trials > cfg.max_halvings {
            return Err(Error::LineSearchStalled {
                max_halvings: cfg.max_halvings,
            });
        }
        gamma *= cfg.rho;
    }
}

/// Direction proposed for the next step.
#[derive(Debug, Clone)]
pub struct DirectionOutcome<X> {
    pub direction: X,
    pub g_dot_d: f64,
    /// True when a conjugate direction was discarded for the negative
    /// gradient (non-descent candidate or a guarded denominator).
    pub restarted: bool,
}

const DENOM_GUARD: f64 = 1e-300;

/// Computes the next search direction. Fresh segments and plain gradient
/// descent take the negative gradient; conjugate-gradient kinds combine it
/// with the previous direction through their beta rule and fall back to the
/// negative gradient whenever the candidate fails the descent condition.
pub fn next_direction<X: InnerSpace>(
    kind: EngineKind,
    g_new: &X,
    info: &StrategicInfo<X>,
) -> DirectionOutcome<X> {
    let steepest = |restarted: bool| {
        let d = g_new.scale(-1.0);
        let g_dot_d = g_new.inner(&d);
        DirectionOutcome {
            direction: d,
            g_dot_d,
            restarted,
        }
    };

    let prev = match (kind, info.prev()) {
        (EngineKind::Gd, _) | (_, None) => return steepest(false),
        (_, Some(prev)) => prev,
    };

    let g = &prev.gradient;
    let d = &prev.direction;
    let y = g_new.scaled_add(-1.0, g);
    let beta = match kind {
        EngineKind::Gd => unreachable!(),
        EngineKind::CgFr => {
            let denom = g.inner(g);
            if denom.abs() < DENOM_GUARD {
                return steepest(true);
            }
            g_new.inner(g_new) / denom
        }
        EngineKind::CgHsPlus => {
            let denom = d.inner(&y);
            if denom.abs() < DENOM_GUARD {
                return steepest(true);
            }
            (g_new.inner(&y) / denom).max(0.0)
        }
        EngineKind::CgHz => {
            let dy = d.inner(&y);
            let zeta_denom = d.norm() * prev.gradient.norm().min(0.01);
            if dy.abs() < DENOM_GUARD || zeta_denom.abs() < DENOM_GUARD {
                return steepest(true);
            }
            let beta_hs = g_new.inner(&y) / dy;
            let hz = beta_hs - 2.0 * y.inner(&y) * d.inner(g_new) / (dy * dy);
            let zeta = -1.0 / zeta_denom;
            hz.max(zeta)
        }
    };

    let candidate = g_new.scale(-1.0).scaled_add(beta, d);
    let g_dot_d = g_new.inner(&candidate);
    if g_dot_d >= 0.0 {
        return steepest(true);
    }
    DirectionOutcome {
        direction: candidate,
        g_dot_d,
        restarted: false,
    }
}

/// One accepted engine step.
#[derive(Debug, Clone)]
pub struct StepOutcome<X> {
    pub x_next: X,
    /// J(x_next), i.e. the value accepted by the line search.
    pub value_next: f64,
    pub stepsize: f64,
    pub g_dot_d: f64,
    pub ls_trials: u32,
    pub restarted: bool,
}

/// Performs one line-search step from `x` given the current value and
/// gradient, evaluating J only through `value_fn`. Returns the step outcome
/// and the strategic information for the next iteration.
pub fn step<X: InnerSpace>(
    kind: EngineKind,
    mut value_fn: impl FnMut(&X) -> Result<f64>,
    x: &X,
    value_x: f64,
    grad_x: &X,
    info: &StrategicInfo<X>,
    cfg: &LineSearchConfig,
) -> Result<(StepOutcome<X>, StrategicInfo<X>)> {
    let dir = next_direction(kind, grad_x, info);
    let gamma_init = initial_stepsize(info, value_x, dir.g_dot_d, grad_x.norm());
    let (gamma, value_next, ls_trials) = backtracking(
        |gamma| value_fn(&x.scaled_add(gamma, &dir.direction)),
        value_x,
        dir.g_dot_d,
        gamma_init,
        cfg,
    )?;
    let x_next = x.scaled_add(gamma, &dir.direction);
    let info_next = StrategicInfo {
        prev: Some(PrevStep {
            direction: dir.direction,
            gradient: grad_x.clone(),
            value: value_x,
            stepsize: gamma,
        }),
    };
    Ok((
        StepOutcome {
            x_next,
            value_next,
            stepsize: gamma,
            g_dot_d: dir.g_dot_d,
            ls_trials,
            restarted: dir.restarted,
        },
        info_next,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[derive(Debug, Clone, PartialEq)]
    struct Vec64(DVector<f64>);

    impl InnerSpace for Vec64 {
        fn inner(&self, other: &Self) -> f64 {
            self.0.dot(&other.0)
        }
        fn scaled_add(&self, alpha: f64, other: &Self) -> Self {
            Vec64(&self.0 + &other.0 * alpha)
        }
        fn scale(&self, alpha: f64) -> Self {
            Vec64(&self.0 * alpha)
        }
    }

    fn v(data: &[f64]) -> Vec64 {
        Vec64(DVector::from_column_slice(data))
    }

    fn half_norm_sq(x: &Vec64) -> f64 {
        0.5 * x.0.norm_squared()
    }

    #[test]
    fn backtracking_accepts_unit_step_on_quadratic() {
        let cfg = LineSearchConfig::default();
        // J(x) = x^2/2 at x = 1, d = -1.
        let phi = |gamma: f64| Ok(0.5 * (1.0 - gamma) * (1.0 - gamma));
        let (gamma, value, trials) = backtracking(phi, 0.5, -1.0, 1.0, &cfg).unwrap();
        assert_eq!(gamma, 1.0);
        assert_eq!(value, 0.0);
        assert_eq!(trials, 1);
    }

    #[test]
    fn backtracking_halves_down_from_huge_initial_step() {
        let cfg = LineSearchConfig::default();
        // The quadratic accepts gamma <= 2 (1 - c); from 2^20 that takes
        // exactly 20 halvings.
        let phi = |gamma: f64| Ok(0.5 * (1.0 - gamma) * (1.0 - gamma));
        let (gamma, _, trials) = backtracking(phi, 0.5, -1.0, 2f64.powi(20), &cfg).unwrap();
        assert_eq!(gamma, 1.0);
        assert_eq!(trials, 21);
    }

    #[test]
    fn backtracking_rejects_ascent_directions() {
        let cfg = LineSearchConfig::default();
        let err = backtracking(|_| Ok(0.0), 0.5, 1.0, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::NotDescent { .. }));
    }

    #[test]
    fn backtracking_stalls_on_unsatisfiable_objective() {
        let cfg = LineSearchConfig {
            max_halvings: 10,
            ..Default::default()
        };
        let err = backtracking(|_| Ok(1.0), 0.0, -1.0, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::LineSearchStalled { .. }));
    }

    #[test]
    fn initial_stepsize_rules() {
        let fresh: StrategicInfo<Vec64> = StrategicInfo::fresh();
        assert_eq!(initial_stepsize(&fresh, 1.0, -1.0, 2.0), 0.5);

        let info = StrategicInfo {
            prev: Some(PrevStep {
                direction: v(&[-1.0]),
                gradient: v(&[1.0]),
                value: 1.0,
                stepsize: 0.1,
            }),
        };
        // 4 (0.5 - 1.0) / (-1.0) = 2.
        assert_eq!(initial_stepsize(&info, 0.5, -1.0, 1.0), 2.0);
        // Degenerate ratio clamps to the floor.
        assert_eq!(initial_stepsize(&info, 1.0, -1.0, 1.0), 1e-20);
    }

    #[test]
    fn fresh_direction_is_negative_gradient() {
        let g = v(&[3.0, -4.0]);
        for kind in EngineKind::ALL {
            let out = next_direction(kind, &g, &StrategicInfo::fresh());
            assert_eq!(out.direction, g.scale(-1.0));
            assert!(!out.restarted);
            assert_eq!(out.g_dot_d, -25.0);
        }
    }

    #[test]
    fn fletcher_reeves_with_equal_gradients() {
        let g = v(&[1.0, 1.0]);
        let d = v(&[0.5, -2.0]);
        let info = StrategicInfo {
            prev: Some(PrevStep {
                direction: d.clone(),
                gradient: g.clone(),
                value: 1.0,
                stepsize: 0.1,
            }),
        };
        let out = next_direction(EngineKind::CgFr, &g, &info);
        // beta = 1, candidate = -g + d; here <g, -g + d> = -2 - 1.5 < 0.
        assert_eq!(out.direction, g.scale(-1.0).scaled_add(1.0, &d));
        assert!(!out.restarted);
    }

    #[test]
    fn hs_plus_clips_negative_beta_to_steepest_descent() {
        // Arrange <g_new, y> < 0 and <d, y> > 0 so beta_HS < 0 -> beta = 0.
        let g_old = v(&[1.0, 0.0]);
        let g_new = v(&[0.2, 0.0]);
        let d = v(&[-1.0, 0.0]);
        let info = StrategicInfo {
            prev: Some(PrevStep {
                direction: d,
                gradient: g_old,
                value: 1.0,
                stepsize: 0.1,
            }),
        };
        let out = next_direction(EngineKind::CgHsPlus, &g_new, &info);
        assert_eq!(out.direction, g_new.scale(-1.0));
        assert!(!out.restarted); // beta = 0 is a valid HS+ value, not a restart
    }

    #[test]
    fn line_search_defaults_are_pinned() {
        let cfg = LineSearchConfig::default();
        assert_eq!(cfg.c, 2.0f64.powi(-13));
        assert_eq!(cfg.rho, 0.5);
        assert_eq!(cfg.max_halvings, 60);
    }

    #[test]
    fn vanishing_denominators_fall_back_to_steepest_descent() {
        // A zero previous gradient breaks every beta denominator.
        let g_new = v(&[1.0, 2.0]);
        let info = StrategicInfo {
            prev: Some(PrevStep {
                direction: v(&[0.0, 0.0]),
                gradient: v(&[0.0, 0.0]),
                value: 1.0,
                stepsize: 0.1,
            }),
        };
        for kind in [EngineKind::CgFr, EngineKind::CgHsPlus, EngineKind::CgHz] {
            let out = next_direction(kind, &g_new, &info);
            assert!(out.restarted, "{kind}");
            assert_eq!(out.direction, g_new.scale(-1.0));
        }
    }

    #[test]
    fn non_descent_candidate_triggers_restart() {
        // Gradients engineered so the FR candidate points uphill.
        let g_old = v(&[10.0, 0.0]);
        let g_new = v(&[1.0, 0.0]);
        let d = v(&[100.0, 0.0]); // previous "direction" aligned with gradient
        let info = StrategicInfo {
            prev: Some(PrevStep {
                direction: d,
                gradient: g_old,
                value: 1.0,
                stepsize: 0.1,
            }),
        };
        let out = next_direction(EngineKind::CgFr, &g_new, &info);
        assert!(out.restarted);
        assert_eq!(out.direction, g_new.scale(-1.0));
        assert!(out.g_dot_d < 0.0);
    }

    #[test]
    fn quadratic_reaches_origin_in_one_exact_step() {
        // J = x^2/2 from x = 1: fresh stepsize 1/||g|| = 1 is accepted and
        // lands exactly at zero.
        let cfg = LineSearchConfig::default();
        let x = v(&[1.0]);
        let (out, info) = step(
            EngineKind::Gd,
            |x| Ok(half_norm_sq(x)),
            &x,
            0.5,
            &x.clone(), // gradient of x^2/2 is x
            &StrategicInfo::fresh(),
            &cfg,
        )
        .unwrap();
        assert_eq!(out.x_next.0[0], 0.0);
        assert_eq!(out.stepsize, 1.0);
        assert!(!info.is_fresh());
    }

    #[test]
    fn all_engines_drive_quadratic_gradient_to_zero() {
        let cfg = LineSearchConfig::default();
        let dim = 50;
        for kind in EngineKind::ALL {
            let mut x = Vec64(DVector::from_fn(dim, |i, _| 1.0 + (i as f64) / 10.0));
            let mut info = StrategicInfo::fresh();
            let mut value = half_norm_sq(&x);
            let mut grad = x.clone();
            let mut values = vec![value];
            let mut converged = false;
            for _ in 0..100 {
                if grad.norm() < 1e-10 {
                    converged = true;
                    break;
                }
                let (out, next_info) =
                    step(kind, |x| Ok(half_norm_sq(x)), &x, value, &grad, &info, &cfg).unwrap();
                // Armijo: re-check the accepted inequality from the pieces.
                assert!(out.value_next <= value + cfg.c * out.stepsize * out.g_dot_d);
                x = out.x_next;
                value = out.value_next;
                grad = x.clone();
                info = next_info;
                values.push(value);
            }
            assert!(converged, "{kind} did not converge");
            for w in values.windows(2) {
                assert!(w[1] < w[0], "{kind}: values not strictly decreasing");
            }
        }
    }
}

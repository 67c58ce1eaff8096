//! The adaptive localized Cayley parametrization driver.
//!
//! Runs a Euclidean line-search engine on the pulled-back cost for the
//! current center, watches the alarm ||A||_2 + ||B||_2 > T on every proposed
//! update, and re-centers when it fires: the freshly chosen center maps the
//! accepted point to a parameter with vanishing A block and ||B||_2 <= 1, so
//! the iterates stay inside the spectral ball of radius max{1, T}. Strategic
//! information is reinitialized at every center change, so the first
//! direction of each segment is the negative gradient.
//!
//! Re-centering changes coordinates, not the point: the cost value carries
//! over bitwise, which keeps the recorded f sequence monotone across
//! switches and the Armijo audit exact.

use std::time::Instant;

use crate::cayley::{forward, ParametrizedObjective};
use crate::center::choose_center;
use crate::engine::{self, EngineKind, LineSearchConfig, StrategicInfo};
use crate::error::{Error, Result};
use crate::manifold::{CenterPoint, SkewParam, StiefelPoint};
use crate::objective::{EvalCounters, Objective};

/// Whether the singularity-risk alarm is consulted. `Never` reproduces the
/// fixed-center strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlarmMode {
    Standard,
    Never,
}

/// Driver configuration. Defaults: T = 1.5, relative gradient tolerance
/// 1e-5, 2000 iterations, gradient descent.
#[derive(Debug, Clone)]
pub struct AlcpConfig {
    /// Alarm threshold T; values above 1 avoid immediate re-alarms because a
    /// freshly reparametrized point has ||A||_2 + ||B||_2 <= 1.
    pub alarm_threshold: f64,
    /// Stop when ||G_n||_F / ||G_0||_F drops below this.
    pub rel_grad_tol: f64,
    pub max_iter: usize,
    pub engine: EngineKind,
    pub line_search: LineSearchConfig,
    pub alarm_mode: AlarmMode,
}

impl Default for AlcpConfig {
    fn default() -> Self {
        Self {
            alarm_threshold: 1.5,
            rel_grad_tol: 1e-5,
            max_iter: 2000,
            engine: EngineKind::Gd,
            line_search: LineSearchConfig::default(),
            alarm_mode: AlarmMode::Standard,
        }
    }
}

/// Floating-point stand-in for an exactly vanishing gradient.
pub const EXACT_STATIONARY_TOL: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    /// Relative gradient norm fell below the tolerance.
    GradTol,
    /// Iteration budget exhausted.
    MaxIter,
    /// Gradient numerically zero.
    ExactStationary,
    /// Backtracking exhausted its halving budget; the run stops rather than
    /// re-centering, since stalling signals numerical exhaustion.
    LineSearchStalled,
}

impl TerminationReason {
    pub fn name(&self) -> &'static str {
        match self {
            TerminationReason::GradTol => "grad-tol",
            TerminationReason::MaxIter => "max-iter",
            TerminationReason::ExactStationary => "exact-stationary",
            TerminationReason::LineSearchStalled => "line-search-stalled",
        }
    }
}

/// One per-iteration trace row. Row `n` describes the state at iterate n plus
/// the step taken *from* it; the terminal row carries NaN step fields.
#[derive(Debug, Clone)]
pub struct IterRow {
    pub n: usize,
    /// Center index l(n); nondecreasing with increments in {0, 1}.
    pub center_index: usize,
    pub f_value: f64,
    /// ||gradient of the pulled-back cost||_F at this iterate (Frobenius norm
    /// of the Riemannian gradient for the retraction baseline).
    pub grad_norm: f64,
    /// <g, d> of the step taken from this iterate (NaN on the terminal row).
    pub g_dot_d: f64,
    /// Accepted stepsize of that step (NaN on the terminal row).
    pub stepsize: f64,
    /// Line-search evaluations spent on that step.
    pub ls_trials: u32,
    /// ||I - U^T U||_F at this iterate.
    pub feasibility: f64,
    /// ||A||_2 + ||B||_2, an upper bound on ||V||_2 (NaN for the baseline).
    pub v_norm_bound: f64,
    /// True when this iterate was produced by re-centering.
    pub center_changed: bool,
    /// True when the direction at this iterate fell back to steepest descent.
    pub restart: bool,
    pub elapsed_sec: f64,
}

impl IterRow {
    #[allow(clippy::too_many_arguments)]
    fn at_state(
        n: usize,
        center_index: usize,
        f_value: f64,
        grad_norm: f64,
        feasibility: f64,
        v_norm_bound: f64,
        center_changed: bool,
        elapsed_sec: f64,
    ) -> Self {
        Self {
            n,
            center_index,
            f_value,
            grad_norm,
            g_dot_d: f64::NAN,
            stepsize: f64::NAN,
            ls_trials: 0,
            feasibility,
            v_norm_bound,
            center_changed,
            restart: false,
            elapsed_sec,
        }
    }
}

/// Aggregates reported per run.
#[derive(Debug, Clone, Copy)]
pub struct RunSummary {
    pub f_final: f64,
    pub feasibility: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub elapsed_sec: f64,
    pub value_evals: u64,
    pub gradient_evals: u64,
    /// value_evals + gradient_evals.
    pub nfe: u64,
    pub center_changes: usize,
}

/// Full per-iteration trace plus the summary.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub rows: Vec<IterRow>,
    pub summary: RunSummary,
}

/// Outcome of a driver run. The baseline leaves `param`/`center` empty.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub point: StiefelPoint,
    pub param: Option<SkewParam>,
    pub center: Option<CenterPoint>,
    pub reason: TerminationReason,
    pub record: RunRecord,
}

/// The surrogate alarm: ||A||_2 + ||B||_2 > T. The sum bounds the spectral
/// norm of the full parameter matrix from above, so a quiet alarm certifies
/// ||V||_2 <= T without an N x N singular value computation.
pub fn alarming(param: &SkewParam, threshold: f64) -> bool {
    spectral_bound(param) > threshold
}

fn spectral_bound(param: &SkewParam) -> f64 {
    let (a, b) = param.block_spectral_norms();
    a + b
}

/// Runs the adaptive strategy from `u0`, choosing the initial center by the
/// polar-factor rule.
pub fn run(obj: &dyn Objective, u0: &StiefelPoint, cfg: &AlcpConfig) -> Result<RunResult> {
    run_with_center(obj, u0, None, cfg)
}

/// Runs the fixed-center strategy: identical to [`run`] with the alarm
/// disabled and the initial center supplied instead of chosen. Errors with
/// `SingularPoint` if `u0` is singular for `s_fixed`.
pub fn run_naive_cp(
    obj: &dyn Objective,
    u0: &StiefelPoint,
    s_fixed: &CenterPoint,
    cfg: &AlcpConfig,
) -> Result<RunResult> {
    let cfg = AlcpConfig {
        alarm_mode: AlarmMode::Never,
        ..cfg.clone()
    };
    run_with_center(obj, u0, Some(s_fixed.clone()), &cfg)
}

fn run_with_center(
    obj: &dyn Objective,
    u0: &StiefelPoint,
    initial_center: Option<CenterPoint>,
    cfg: &AlcpConfig,
) -> Result<RunResult> {
    let timer = Instant::now();
    let counters = EvalCounters::new();

    let mut center = initial_center.unwrap_or_else(|| choose_center(u0));
    let mut v = forward(&center, u0)?;
    let mut pobj = ParametrizedObjective::with_seed(
        center.clone(),
        obj,
        &counters,
        v.clone(),
        u0.clone(),
        None,
    );
    let mut f = pobj.value(&v)?;
    let mut g = pobj.gradient(&v)?;
    let g0_norm = engine::InnerSpace::norm(&g);

    let mut info: StrategicInfo<SkewParam> = StrategicInfo::fresh();
    let mut rows: Vec<IterRow> = Vec::new();
    let mut center_index = 0usize;
    let mut arrived_by_recenter = false;
    let mut pending_bound: Option<f64> = None;
    let mut n = 0usize;

    let reason = loop {
        let grad_norm = engine::InnerSpace::norm(&g);
        let bound = pending_bound.take().unwrap_or_else(|| spectral_bound(&v));
        let mut row = IterRow::at_state(
            n,
            center_index,
            f,
            grad_norm,
            pobj.point(&v)?.feasibility(),
            bound,
            arrived_by_recenter,
            timer.elapsed().as_secs_f64(),
        );

        if grad_norm < EXACT_STATIONARY_TOL {
            rows.push(row);
            break TerminationReason::ExactStationary;
        }
        if grad_norm / g0_norm < cfg.rel_grad_tol {
            rows.push(row);
            break TerminationReason::GradTol;
        }
        if n >= cfg.max_iter {
            rows.push(row);
            break TerminationReason::MaxIter;
        }

        let stepped = engine::step(
            cfg.engine,
            |x| pobj.value(x),
            &v,
            f,
            &g,
            &info,
            &cfg.line_search,
        );
        let (outcome, info_next) = match stepped {
            Ok(ok) => ok,
            Err(Error::LineSearchStalled { .. }) | Err(Error::NotDescent { .. }) => {
                rows.push(row);
                break TerminationReason::LineSearchStalled;
            }
            Err(e) => return Err(e),
        };
        row.g_dot_d = outcome.g_dot_d;
        row.stepsize = outcome.stepsize;
        row.ls_trials = outcome.ls_trials;
        row.restart = outcome.restarted;
        rows.push(row);

        let v_tilde = outcome.x_next;
        let proposal_bound = spectral_bound(&v_tilde);
        if cfg.alarm_mode == AlarmMode::Standard && proposal_bound > cfg.alarm_threshold {
            let u_next = pobj.point(&v_tilde)?;
            center = choose_center(&u_next);
            let v_next = forward(&center, &u_next)?;
            pobj = ParametrizedObjective::with_seed(
                center.clone(),
                obj,
                &counters,
                v_next.clone(),
                u_next,
                Some(outcome.value_next),
            );
            info = StrategicInfo::fresh();
            center_index += 1;
            arrived_by_recenter = true;
            v = v_next;
            pending_bound = None;
        } else {
            info = info_next;
            arrived_by_recenter = false;
            v = v_tilde;
            pending_bound = Some(proposal_bound);
        }
        f = pobj.value(&v)?;
        g = pobj.gradient(&v)?;
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
        center_changes: center_index,
    };
    Ok(RunResult {
        point: pobj.point(&v)?,
        param: Some(v),
        center: Some(center),
        reason,
        record: RunRecord { rows, summary },
    })
}

/// Replays the Armijo inequality f_{k+1} <= f_k + c gamma_k <g_k, d_k> from
/// the recorded triples, exactly as floating-point numbers. Returns the index
/// of the first violating row, or None when every accepted step checks out.
pub fn verify_armijo(rows: &[IterRow], c: f64) -> Option<usize> {
    for k in 0..rows.len().saturating_sub(1) {
        let row = &rows[k];
        if !row.stepsize.is_finite() {
            continue;
        }
        let lhs = rows[k + 1].f_value;
        let rhs = row.f_value + c * row.stepsize * row.g_dot_d;
        if !(lhs <= rhs) {
            return Some(k);
        }
    }
    None
}

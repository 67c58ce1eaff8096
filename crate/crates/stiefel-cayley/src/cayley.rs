//! The generalized Cayley transform specialized to structured centers
//! S = diag(T, I_{N-p}), its inverse, the pullback gradient, and the
//! mobility diagnostic.
//!
//! With C := I_p + T^T U_up, the forward map sends a feasible point U to the
//! block pair
//!
//! ```text
//!   A = 2 C^{-T} skew(U_up^T T) C^{-1},      B = -U_lo C^{-1},
//! ```
//!
//! and is defined wherever det(C) != 0. The inverse map is total on the
//! parameter space: with the Schur complement M := I_p + A + B^T B,
//!
//! ```text
//!   U_up = T (2 M^{-1} - I_p),              U_lo = -2 B M^{-1}.
//! ```
//!
//! M is always invertible (its symmetric part is I + B^T B >= I), so a solve
//! failure is an internal error rather than a user-facing condition.
//!
//! The gradient of the pulled-back cost f o inverse at V, with respect to the
//! trace inner product, has blocks assembled from W11 := M^{-1} P M^{-1},
//! P := G_up^T T - G_lo^T B, where G is the Euclidean gradient at U:
//!
//! ```text
//!   A_g = W11 - W11^T,       B_g = -B (W11 + W11^T) - G_lo M^{-T}.
//! ```
//!
//! This block reduction is gated behind finite-difference and dense-reference
//! oracles in the test suite rather than trusted on faith.
//!
//! All operations cost O(N p^2 + p^3) flops; the p x p systems are solved by
//! a pivoted dense factorization since p is small relative to N.

use std::cell::RefCell;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::manifold::{CenterPoint, SkewParam, StiefelPoint, INVERSE_FEASIBILITY_TOL};
use crate::objective::{EvalCounters, Objective};

/// Reciprocal-condition threshold below which a point counts as singular
/// for the chosen center.
pub const SINGULARITY_RCOND: f64 = 1e-14;

fn check_center_point(center: &CenterPoint, dims: (usize, usize)) -> Result<()> {
    let expected = (center.ambient_dim(), center.block_dim());
    if dims != expected {
        return Err(Error::ShapeMismatch {
            expected: format!("{expected:?}"),
            got: format!("{dims:?}"),
        });
    }
    Ok(())
}

/// Maps a feasible point into the parameter space of the given center.
///
/// Errors with `SingularPoint` when I_p + T^T U_up is numerically singular
/// (reciprocal condition estimate below [`SINGULARITY_RCOND`]).
pub fn forward(center: &CenterPoint, point: &StiefelPoint) -> Result<SkewParam> {
    check_center_point(center, point.dims())?;
    let t = center.t();
    let u_up = point.upper_block();
    let u_lo = point.lower_block();
    let p = u_up.nrows();

    let c = DMatrix::<f64>::identity(p, p) + t.tr_mul(&u_up);
    let sv = c.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let rcond = if smax > 0.0 { smin / smax } else { 0.0 };
    if rcond < SINGULARITY_RCOND {
        return Err(Error::SingularPoint { rcond });
    }
    let c_inv = c.lu().try_inverse().ok_or(Error::LinearSolveFailure)?;

    let k = linalg::skew_part(&u_up.tr_mul(t));
    let a = c_inv.transpose() * k * &c_inv * 2.0;
    let b = -u_lo * &c_inv;
    SkewParam::new(a, b)
}

fn schur_inverse(param: &SkewParam) -> Result<DMatrix<f64>> {
    let p = param.a().nrows();
    let m = DMatrix::<f64>::identity(p, p) + param.a() + param.b().tr_mul(param.b());
    m.lu().try_inverse().ok_or(Error::LinearSolveFailure)
}

/// Maps a parameter back onto the manifold. Total on the parameter space;
/// the result always passes the feasibility check (within
/// [`INVERSE_FEASIBILITY_TOL`]).
pub fn inverse(center: &CenterPoint, param: &SkewParam) -> Result<StiefelPoint> {
    check_center_point(center, param.dims())?;
    let (n, p) = param.dims();
    let t = center.t();
    let m_inv = schur_inverse(param)?;

    let u_up = t * (&m_inv * 2.0 - DMatrix::<f64>::identity(p, p));
    let u_lo = param.b() * &m_inv * -2.0;
    let mut data = DMatrix::zeros(n, p);
    data.view_mut((0, 0), (p, p)).copy_from(&u_up);
    data.view_mut((p, 0), (n - p, p)).copy_from(&u_lo);
    StiefelPoint::with_tolerance(data, INVERSE_FEASIBILITY_TOL)
}

/// Gradient of the pulled-back cost at `param`, given the Euclidean gradient
/// of f at the corresponding manifold point.
pub fn pullback_gradient(
    center: &CenterPoint,
    param: &SkewParam,
    euclid_grad: &DMatrix<f64>,
) -> Result<SkewParam> {
    check_center_point(center, param.dims())?;
    let (n, p) = param.dims();
    if euclid_grad.shape() != (n, p) {
        return Err(Error::ShapeMismatch {
            expected: format!("({n}, {p})"),
            got: format!("{:?}", euclid_grad.shape()),
        });
    }
    let t = center.t();
    let b = param.b();
    let g_up = euclid_grad.rows(0, p);
    let g_lo = euclid_grad.rows(p, n - p);
    let m_inv = schur_inverse(param)?;

    // P = G_up^T T - G_lo^T B, then W11 = M^{-1} P M^{-1}.
    let pm = g_up.tr_mul(t) - g_lo.tr_mul(b);
    let w11 = &m_inv * pm * &m_inv;
    let a_g = &w11 - w11.transpose();
    let b_g = -(b * (&w11 + w11.transpose())) - g_lo.into_owned() * m_inv.transpose();
    SkewParam::new(a_g, b_g)
}

/// Mobility r(V) = 2 sqrt(1 + ||B||_2^2) / (1 + sigma_min(B)^2): an upper
/// bound rate on how far the manifold point can move per unit parameter
/// change. Small values signal the singular-point issue.
///
/// Requires p < N; sigma_min is taken over the p-column spectrum, so a wide
/// lower block (N - p < p) contributes sigma_min = 0.
pub fn mobility(param: &SkewParam) -> Result<f64> {
    let (n, p) = param.dims();
    if p >= n {
        return Err(Error::EmptyBlock);
    }
    let b = param.b();
    let b_norm = linalg::spectral_norm(b);
    let sigma_min = if b.nrows() < b.ncols() {
        0.0
    } else {
        linalg::min_singular_value(b)?
    };
    Ok(2.0 * (1.0 + b_norm * b_norm).sqrt() / (1.0 + sigma_min * sigma_min))
}

struct CacheEntry {
    v: SkewParam,
    u: StiefelPoint,
    f: Option<f64>,
    euclid_grad: Option<DMatrix<f64>>,
}

/// The pulled-back cost f o inverse for a fixed center, with a one-entry
/// cache keyed by bitwise equality of the parameter so line searches share
/// the parameter-to-point solve between value and gradient queries.
///
/// One instance is single-consumer (interior mutability in the cache);
/// distinct instances may run in parallel.
pub struct ParametrizedObjective<'a> {
    center: CenterPoint,
    inner: &'a dyn Objective,
    counters: &'a EvalCounters,
    cache: RefCell<Option<CacheEntry>>,
}

impl<'a> ParametrizedObjective<'a> {
    pub fn new(center: CenterPoint, inner: &'a dyn Objective, counters: &'a EvalCounters) -> Self {
        Self {
            center,
            inner,
            counters,
            cache: RefCell::new(None),
        }
    }

    /// Builds the objective with a primed cache: `param` is already known to
    /// correspond to `point` (and optionally to the cost `value`). Used at
    /// startup and when re-centering, where only the coordinates change.
    pub fn with_seed(
        center: CenterPoint,
        inner: &'a dyn Objective,
        counters: &'a EvalCounters,
        param: SkewParam,
        point: StiefelPoint,
        value: Option<f64>,
    ) -> Self {
        let obj = Self::new(center, inner, counters);
        *obj.cache.borrow_mut() = Some(CacheEntry {
            v: param,
            u: point,
            f: value,
            euclid_grad: None,
        });
        obj
    }

    pub fn center(&self) -> &CenterPoint {
        &self.center
    }

    fn ensure_point(&self, param: &SkewParam) -> Result<()> {
        let mut cache = self.cache.borrow_mut();
        let hit = cache.as_ref().is_some_and(|e| e.v == *param);
        if !hit {
            let u = inverse(&self.center, param)?;
            *cache = Some(CacheEntry {
                v: param.clone(),
                u,
                f: None,
                euclid_grad: None,
            });
        }
        Ok(())
    }

    /// The manifold point corresponding to `param` (cached).
    pub fn point(&self, param: &SkewParam) -> Result<StiefelPoint> {
        self.ensure_point(param)?;
        Ok(self.cache.borrow().as_ref().unwrap().u.clone())
    }

    /// f(inverse(center, param)). Counts an inner evaluation unless cached.
    pub fn value(&self, param: &SkewParam) -> Result<f64> {
        self.ensure_point(param)?;
        let mut cache = self.cache.borrow_mut();
        let entry = cache.as_mut().unwrap();
        if entry.f.is_none() {
            entry.f = Some(self.inner.value(entry.u.data()));
            self.counters.count_value();
        }
        Ok(entry.f.unwrap())
    }

    /// Pullback gradient at `param`. Counts an inner gradient evaluation
    /// unless the Euclidean gradient is cached.
    pub fn gradient(&self, param: &SkewParam) -> Result<SkewParam> {
        self.ensure_point(param)?;
        let mut cache = self.cache.borrow_mut();
        let entry = cache.as_mut().unwrap();
        if entry.euclid_grad.is_none() {
            entry.euclid_grad = Some(self.inner.euclid_gradient(entry.u.data()));
            self.counters.count_gradient();
        }
        pullback_gradient(&self.center, param, entry.euclid_grad.as_ref().unwrap())
    }
}

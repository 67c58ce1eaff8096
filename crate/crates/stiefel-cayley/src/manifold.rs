//! Core matrix-shaped domain types and their invariants.
//!
//! * [`StiefelPoint`] — an N x p matrix with orthonormal columns.
//! * [`SkewParam`] — the (A, B) block pair encoding a structured
//!   skew-symmetric matrix [[A, -B^T], [B, 0]]; the Euclidean variable.
//! * [`CenterPoint`] — a p x p orthogonal block T encoding diag(T, I).
//! * [`TangentVector`] — a tangent direction at a Stiefel point (used by
//!   the retraction baseline only).
//!
//! All types are immutable value objects after construction and are safe to
//! share between threads. The full N x N skew matrix behind a `SkewParam` is
//! never materialized outside of tests and diagnostics: storing the block
//! pair keeps every operation O(Np^2) instead of O(N^2).

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;

/// Default feasibility tolerance for ||I - U^T U||_F at construction.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-10;

/// Feasibility tolerance applied to points produced by the inverse
/// Cayley transform (slightly looser to absorb solve round-off).
pub const INVERSE_FEASIBILITY_TOL: f64 = 1e-9;

fn feasibility_residual(data: &DMatrix<f64>) -> f64 {
    let p = data.ncols();
    (DMatrix::<f64>::identity(p, p) - data.tr_mul(data)).norm()
}

/// A point on the Stiefel manifold St(p, N): an N x p real matrix U with
/// U^T U = I_p (within a feasibility tolerance).
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelPoint {
    data: DMatrix<f64>,
    feasibility: f64,
}

impl StiefelPoint {
    /// Validates and wraps an N x p matrix. Errors with `NotOnManifold` if
    /// ||I - U^T U||_F exceeds the default tolerance, or with
    /// `ShapeMismatch` unless 1 <= p <= N.
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(data, DEFAULT_FEASIBILITY_TOL)
    }

    /// Same as [`StiefelPoint::new`] with an explicit tolerance.
    pub fn with_tolerance(data: DMatrix<f64>, tolerance: f64) -> Result<Self> {
        let (n, p) = (data.nrows(), data.ncols());
        if p < 1 || p > n {
            return Err(Error::ShapeMismatch {
                expected: "N x p with 1 <= p <= N".to_string(),
                got: format!("{n} x {p}"),
            });
        }
        let residual = feasibility_residual(&data);
        if !(residual <= tolerance) {
            return Err(Error::NotOnManifold {
                residual,
                tolerance,
            });
        }
        Ok(Self {
            data,
            feasibility: residual,
        })
    }

    /// A deterministic pseudo-random point: entries drawn uniformly on
    /// [0, 1) from a ChaCha stream seeded with `seed`, then orthonormalized
    /// by a thin QR factorization.
    pub fn random(n: usize, p: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_from(n, p, &mut rng)
    }

    /// Same as [`StiefelPoint::random`] but drawing from a caller-owned
    /// stream (used for per-trial stream splitting).
    pub fn random_from(n: usize, p: usize, rng: &mut impl Rng) -> Self {
        assert!(p >= 1 && p <= n, "need 1 <= p <= N");
        let raw = DMatrix::from_fn(n, p, |_, _| rng.gen::<f64>());
        let q = linalg::thin_qr_positive(&raw, 1e-14)
            .expect("a uniform random matrix is full rank almost surely");
        Self::new(q).expect("QR factor has orthonormal columns")
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.data.nrows(), self.data.ncols())
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// ||I - U^T U||_F measured at construction time.
    pub fn feasibility(&self) -> f64 {
        self.feasibility
    }

    /// Upper p x p block U_up.
    pub fn upper_block(&self) -> DMatrix<f64> {
        let p = self.data.ncols();
        self.data.rows(0, p).into_owned()
    }

    /// Lower (N-p) x p block U_lo (empty when p = N).
    pub fn lower_block(&self) -> DMatrix<f64> {
        let (n, p) = self.dims();
        self.data.rows(p, n - p).into_owned()
    }
}

/// Element of the structured skew-symmetric parameter space: the pair
/// (A, B) with A p x p skew and B (N-p) x p, standing for the N x N matrix
/// V = [[A, -B^T], [B, 0]].
///
/// The A block is skew-symmetrized on every write, so A^T = -A holds
/// exactly. B may be empty (p = N), and all operations accept that.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewParam {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl SkewParam {
    /// Builds a parameter from raw blocks; `a` is replaced by its
    /// skew-symmetric part (a - a^T)/2.
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::ShapeMismatch {
                expected: "square A block".to_string(),
                got: format!("{} x {}", a.nrows(), a.ncols()),
            });
        }
        if b.ncols() != a.ncols() {
            return Err(Error::ShapeMismatch {
                expected: format!("B with {} columns", a.ncols()),
                got: format!("{} x {}", b.nrows(), b.ncols()),
            });
        }
        Ok(Self {
            a: linalg::skew_part(&a),
            b,
        })
    }

    /// The origin of the parameter space for St(p, N).
    pub fn zeros(n: usize, p: usize) -> Self {
        assert!(p >= 1 && p <= n);
        Self {
            a: DMatrix::zeros(p, p),
            b: DMatrix::zeros(n - p, p),
        }
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    /// Ambient dimensions (N, p).
    pub fn dims(&self) -> (usize, usize) {
        (self.a.nrows() + self.b.nrows(), self.a.ncols())
    }

    /// Trace inner product of the represented N x N matrices, computed
    /// blockwise: trace(A1^T A2) + 2 trace(B1^T B2).
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.dims() != other.dims() {
            return Err(Error::ShapeMismatch {
                expected: format!("{:?}", self.dims()),
                got: format!("{:?}", other.dims()),
            });
        }
        Ok(self.a.dot(&other.a) + 2.0 * self.b.dot(&other.b))
    }

    /// Frobenius norm of the represented N x N matrix.
    pub fn norm(&self) -> f64 {
        self.inner(self).expect("same shape").max(0.0).sqrt()
    }

    /// Spectral norms (||A||_2, ||B||_2) of the two blocks; the alarm and
    /// the mobility diagnostic are built from these.
    pub fn block_spectral_norms(&self) -> (f64, f64) {
        (linalg::spectral_norm(&self.a), linalg::spectral_norm(&self.b))
    }

    /// Materializes the full N x N matrix [[A, -B^T], [B, 0]]. Intended for
    /// tests and diagnostics only; everything else works on the blocks.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let (n, p) = self.dims();
        let mut v = DMatrix::zeros(n, n);
        v.view_mut((0, 0), (p, p)).copy_from(&self.a);
        v.view_mut((p, 0), (n - p, p)).copy_from(&self.b);
        v.view_mut((0, p), (p, n - p)).copy_from(&(-self.b.transpose()));
        v
    }

    pub(crate) fn scaled_add_param(&self, alpha: f64, other: &Self) -> Self {
        debug_assert_eq!(self.dims(), other.dims());
        Self {
            a: &self.a + &other.a * alpha,
            b: &self.b + &other.b * alpha,
        }
    }

    pub(crate) fn scale_param(&self, alpha: f64) -> Self {
        Self {
            a: &self.a * alpha,
            b: &self.b * alpha,
        }
    }
}

/// Trace inner product of two parameters (blockwise form of
/// trace(V1^T V2)); errors on a shape mismatch.
pub fn frobenius_inner(x: &SkewParam, y: &SkewParam) -> Result<f64> {
    x.inner(y)
}

/// A structured center: the p x p orthogonal block T of S = diag(T, I_{N-p}).
///
/// The left N x p block of S is [T; 0] and the right block is [0; I]; neither
/// is ever stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterPoint {
    t: DMatrix<f64>,
    n: usize,
}

impl CenterPoint {
    /// Validates the orthogonality of `t` (||I - t^T t||_F within the default
    /// feasibility tolerance) and records the ambient dimension N.
    pub fn new(t: DMatrix<f64>, n: usize) -> Result<Self> {
        let p = t.nrows();
        if t.ncols() != p || p < 1 || p > n {
            return Err(Error::ShapeMismatch {
                expected: format!("square T with side <= {n}"),
                got: format!("{} x {}", t.nrows(), t.ncols()),
            });
        }
        let residual = feasibility_residual(&t);
        if !(residual <= DEFAULT_FEASIBILITY_TOL) {
            return Err(Error::NotOnManifold {
                residual,
                tolerance: DEFAULT_FEASIBILITY_TOL,
            });
        }
        Ok(Self { t, n })
    }

    /// The center with T = I_p, i.e. S = I.
    pub fn identity(n: usize, p: usize) -> Self {
        Self::new(DMatrix::identity(p, p), n).expect("identity block is orthogonal")
    }

    pub fn t(&self) -> &DMatrix<f64> {
        &self.t
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn block_dim(&self) -> usize {
        self.t.nrows()
    }

    /// The left block S_le = [T; 0] as a Stiefel point (its columns are
    /// orthonormal); this is the point mapped to the parameter-space origin.
    pub fn left_block(&self) -> StiefelPoint {
        let p = self.block_dim();
        let mut data = DMatrix::zeros(self.n, p);
        data.view_mut((0, 0), (p, p)).copy_from(&self.t);
        StiefelPoint::new(data).expect("orthogonal block stacked on zeros")
    }

    /// Materializes S = diag(T, I_{N-p}); tests and diagnostics only.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let p = self.block_dim();
        let mut s = DMatrix::identity(self.n, self.n);
        s.view_mut((0, 0), (p, p)).copy_from(&self.t);
        s
    }
}

/// A tangent direction D at a base point U, i.e. U^T D + D^T U = 0.
///
/// Caches U^T D so that canonical inner products need no access to the base
/// point. Used only by the QR-retraction baseline.
#[derive(Debug, Clone)]
pub struct TangentVector {
    data: DMatrix<f64>,
    ut_data: DMatrix<f64>,
}

impl TangentVector {
    /// Validates tangency ||U^T D + D^T U||_F <= tol (1 + ||D||_F) with the
    /// default feasibility tolerance.
    pub fn new(base: &StiefelPoint, data: DMatrix<f64>) -> Result<Self> {
        if data.shape() != base.data().shape() {
            return Err(Error::ShapeMismatch {
                expected: format!("{:?}", base.data().shape()),
                got: format!("{:?}", data.shape()),
            });
        }
        let ut_data = base.data().tr_mul(&data);
        let residual = (&ut_data + ut_data.transpose()).norm();
        let bound = DEFAULT_FEASIBILITY_TOL * (1.0 + data.norm());
        if !(residual <= bound) {
            return Err(Error::NotOnManifold {
                residual,
                tolerance: bound,
            });
        }
        Ok(Self { data, ut_data })
    }

    // Bypasses the tangency check; only tests need that.
    #[cfg_attr(not(test), allow(dead_code))]
    pub(crate) fn from_parts(data: DMatrix<f64>, ut_data: DMatrix<f64>) -> Self {
        Self { data, ut_data }
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Frobenius norm of the tangent matrix.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    /// Canonical-metric inner product
    /// trace(D1^T (I - U U^T / 2) D2) = trace(D1^T D2) - trace((U^T D1)^T (U^T D2))/2.
    pub fn canonical_inner(&self, other: &Self) -> f64 {
        self.data.dot(&other.data) - 0.5 * self.ut_data.dot(&other.ut_data)
    }

    pub(crate) fn scaled_add_tangent(&self, alpha: f64, other: &Self) -> Self {
        Self {
            data: &self.data + &other.data * alpha,
            ut_data: &self.ut_data + &other.ut_data * alpha,
        }
    }

    pub(crate) fn scale_tangent(&self, alpha: f64) -> Self {
        Self {
            data: &self.data * alpha,
            ut_data: &self.ut_data * alpha,
        }
    }
}

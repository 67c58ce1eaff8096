//! Center-point selection.
//!
//! Given any feasible point U, the polar factor of its upper block yields a
//! structured center for which U is provably non-singular and its parameter
//! is small: with the SVD U_up = Q1 Sigma Q2^T and T := Q1 Q2^T,
//!
//! * det(I_p + T^T U_up) = prod(1 + sigma_i) >= 1,
//! * the A block of the parameter vanishes, and ||B||_2 <= 1,
//!
//! so the reparametrized point always lands inside the unit spectral ball.
//! When U_up is rank deficient the polar factor is not unique; the SVD
//! routine's convention decides, and the guarantees hold for any valid SVD.

use crate::cayley;
use crate::error::Result;
use crate::manifold::{CenterPoint, StiefelPoint};

/// Builds the structured center whose T block is the polar factor of the
/// upper block of `point`.
pub fn choose_center(point: &StiefelPoint) -> CenterPoint {
    let (n, _p) = point.dims();
    let svd = point.upper_block().svd(true, true);
    let t = svd.u.expect("requested") * svd.v_t.expect("requested");
    CenterPoint::new(t, n).expect("product of orthogonal factors is orthogonal")
}

/// Diagnostics for how well a center suits a point.
#[derive(Debug, Clone, Copy)]
pub struct CenterDiagnostics {
    /// det(I_p + T^T U_up) >= 1 - 1e-9.
    pub det_lower_ok: bool,
    /// The determinant itself.
    pub det: f64,
    /// Frobenius norm of the parameter's A block.
    pub a_block_norm: f64,
    /// Spectral norm of the parameter's B block.
    pub b_block_norm: f64,
}

/// Evaluates the guarantees of [`choose_center`] for an arbitrary
/// center/point pair. Propagates `SingularPoint` from the forward map.
pub fn verify_center(center: &CenterPoint, point: &StiefelPoint) -> Result<CenterDiagnostics> {
    let p = point.dims().1;
    let c = nalgebra::DMatrix::<f64>::identity(p, p) + center.t().tr_mul(&point.upper_block());
    let det = c.determinant();
    let v = cayley::forward(center, point)?;
    let (_, b_spectral) = v.block_spectral_norms();
    Ok(CenterDiagnostics {
        det_lower_ok: det >= 1.0 - 1e-9,
        det,
        a_block_norm: v.a().norm(),
        b_block_norm: b_spectral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::{forward, inverse};
    use crate::error::Error;
    use nalgebra::DMatrix;

    fn rotation(theta: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()])
    }

    #[test]
    fn identity_point_gives_identity_center() {
        let u = StiefelPoint::new(DMatrix::identity(7, 3)).unwrap();
        let center = choose_center(&u);
        assert!((center.t() - DMatrix::<f64>::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn orthogonal_upper_block_is_its_own_polar_factor() {
        let p = 4;
        let n = 9;
        let theta = 127.0 * std::f64::consts::PI / 128.0;
        let mut up = DMatrix::<f64>::identity(p, p);
        up.view_mut((0, 0), (2, 2)).copy_from(&rotation(theta));
        let mut data = DMatrix::<f64>::zeros(n, p);
        data.view_mut((0, 0), (p, p)).copy_from(&up);
        let u = StiefelPoint::new(data).unwrap();
        let center = choose_center(&u);
        assert!((center.t() - up).norm() < 1e-12);
    }

    #[test]
    fn zero_upper_block_still_satisfies_determinant_bound() {
        // Point with U_up = 0 (columns live entirely in the lower block).
        let mut data = DMatrix::<f64>::zeros(6, 2);
        data[(2, 0)] = 1.0;
        data[(3, 1)] = 1.0;
        let u = StiefelPoint::new(data).unwrap();
        let center = choose_center(&u);
        let diag = verify_center(&center, &u).unwrap();
        assert!(diag.det_lower_ok);
        assert!((diag.det - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chosen_center_guarantees_hold_on_random_points() {
        for seed in 0..100 {
            let u = StiefelPoint::random(25, 5, seed);
            let center = choose_center(&u);
            let diag = verify_center(&center, &u).unwrap();
            assert!(diag.det_lower_ok, "det = {}", diag.det);
            assert!(diag.a_block_norm <= 1e-9);
            assert!(diag.b_block_norm <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn alarm_threshold_above_one_is_sound_after_recentering() {
        // ||A||_2 + ||B||_2 <= 1 for a freshly reparametrized point.
        for seed in 200..230 {
            let u = StiefelPoint::random(18, 4, seed);
            let v = forward(&choose_center(&u), &u).unwrap();
            let (a_spectral, b_spectral) = v.block_spectral_norms();
            assert!(a_spectral + b_spectral <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn round_trip_through_chosen_center() {
        for seed in 300..320 {
            let u = StiefelPoint::random(40, 6, seed);
            let center = choose_center(&u);
            let v = forward(&center, &u).unwrap();
            let back = inverse(&center, &v).unwrap();
            assert!((u.data() - back.data()).norm() <= 1e-9);
        }
    }

    #[test]
    fn identity_center_diagnostics() {
        // U = I_{N x p}: det(I + U_up) = 2^p.
        let u = StiefelPoint::new(DMatrix::identity(5, 3)).unwrap();
        let diag = verify_center(&CenterPoint::identity(5, 3), &u).unwrap();
        assert!((diag.det - 8.0).abs() < 1e-12);

        // U = -I_{N x p} with p = 1, N = 2: singular for the identity center.
        let m = StiefelPoint::new(DMatrix::from_column_slice(2, 1, &[-1.0, 0.0])).unwrap();
        assert!(matches!(
            verify_center(&CenterPoint::identity(2, 1), &m),
            Err(Error::SingularPoint { .. })
        ));
    }
}

//! Shared helpers for the integration suites: random structured parameters
//! and centers, plus the finite-difference directional-derivative oracle.
#![allow(dead_code)] // each suite uses its own subset

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use stiefel_cayley::cayley::inverse;
use stiefel_cayley::linalg::thin_qr_positive;
use stiefel_cayley::manifold::{CenterPoint, SkewParam};
use stiefel_cayley::objective::Objective;

pub fn random_param(n: usize, p: usize, scale: f64, rng: &mut ChaCha8Rng) -> SkewParam {
    let a = DMatrix::from_fn(p, p, |_, _| scale * (rng.gen::<f64>() - 0.5));
    let b = DMatrix::from_fn(n - p, p, |_, _| scale * (rng.gen::<f64>() - 0.5));
    SkewParam::new(a, b).expect("consistent shapes")
}

pub fn random_center(n: usize, p: usize, rng: &mut ChaCha8Rng) -> CenterPoint {
    let raw = DMatrix::from_fn(p, p, |_, _| rng.gen::<f64>() - 0.5);
    let t = thin_qr_positive(&raw, 1e-14).expect("full rank almost surely");
    CenterPoint::new(t, n).expect("orthogonal factor")
}

pub fn unit_param(n: usize, p: usize, rng: &mut ChaCha8Rng) -> SkewParam {
    let e = random_param(n, p, 1.0, rng);
    scale(&e, 1.0 / e.norm())
}

pub fn scale(v: &SkewParam, alpha: f64) -> SkewParam {
    SkewParam::new(v.a() * alpha, v.b() * alpha).expect("consistent shapes")
}

pub fn add_scaled(x: &SkewParam, alpha: f64, y: &SkewParam) -> SkewParam {
    SkewParam::new(x.a() + y.a() * alpha, x.b() + y.b() * alpha).expect("consistent shapes")
}

/// Central finite difference of the pulled-back cost along `dir` (step `h`).
pub fn fd_directional(
    obj: &dyn Objective,
    center: &CenterPoint,
    v: &SkewParam,
    dir: &SkewParam,
    h: f64,
) -> f64 {
    let fp = obj.value(inverse(center, &add_scaled(v, h, dir)).expect("total").data());
    let fm = obj.value(inverse(center, &add_scaled(v, -h, dir)).expect("total").data());
    (fp - fm) / (2.0 * h)
}

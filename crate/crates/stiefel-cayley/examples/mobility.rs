//! Why far-from-origin parameters are bad news: the mobility r(V) bounds how
//! far the manifold point can move per unit parameter change, and it decays
//! as the parameter grows — the point is drifting toward the singular set,
//! which lives at infinity in the parameter space.
//!
//! Run with: cargo run --example mobility

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stiefel_cayley::{inverse, mobility, CenterPoint, SkewParam};

fn main() {
    let (n, p) = (30, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let center = CenterPoint::identity(n, p);

    let a = DMatrix::from_fn(p, p, |_, _| rng.gen::<f64>() - 0.5);
    let b = DMatrix::from_fn(n - p, p, |_, _| rng.gen::<f64>() - 0.5);
    let v = SkewParam::new(a, b).unwrap();
    let v = SkewParam::new(v.a() / v.norm(), v.b() / v.norm()).unwrap();

    println!("along the ray c * V (unit V, identity center):");
    println!(
        "{:>8} {:>12} {:>14} {:>16}",
        "c", "r(cV)", "||B(c)||_2", "det(I + T'U_up)"
    );
    for &c in &[0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1000.0] {
        let vc = SkewParam::new(v.a() * c, v.b() * c).unwrap();
        let r = mobility(&vc).unwrap();
        let (_, b_norm) = vc.block_spectral_norms();
        let u = inverse(&center, &vc).unwrap();
        let det = (DMatrix::<f64>::identity(p, p) + center.t().tr_mul(&u.upper_block()))
            .determinant();
        println!("{c:>8.1} {r:>12.6} {b_norm:>14.4} {det:>16.3e}");
    }
    println!("\nr(0) = {} (the best any parameter can do is 2)", mobility(&SkewParam::zeros(n, p)).unwrap());
    println!("small r means a big parameter step barely moves the point — the alarm exists to cut this off early.");
}

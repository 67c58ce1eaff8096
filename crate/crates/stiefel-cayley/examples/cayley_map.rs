//! The generalized Cayley transform as a chart: map a feasible point to the
//! structured skew parameter space and back, and see what happens at the
//! singular set.
//!
//! Run with: cargo run --example cayley_map

use nalgebra::DMatrix;
use stiefel_cayley::{choose_center, forward, inverse, CenterPoint, StiefelPoint};

fn main() {
    let (n, p) = (8, 3);
    let u = StiefelPoint::random(n, p, 42);
    println!("random point on St({p}, {n}), feasibility {:.2e}", u.feasibility());

    // A center chosen for U keeps the parameter small: the A block vanishes
    // and the B block stays inside the unit spectral ball.
    let center = choose_center(&u);
    let v = forward(&center, &u).expect("chosen center is never singular for its point");
    let (a_norm, b_norm) = v.block_spectral_norms();
    println!("parameter blocks: ||A||_2 = {a_norm:.2e}, ||B||_2 = {b_norm:.4}");

    // The inverse transform is total and lands back on the manifold.
    let back = inverse(&center, &v).expect("inverse is defined everywhere");
    let err = (u.data() - back.data()).norm();
    println!("round trip |U - inverse(forward(U))|_F = {err:.2e}");

    // The center's own left block sits at the parameter-space origin.
    let origin = forward(&center, &center.left_block()).unwrap();
    println!("parameter of the center point itself: |V|_F = {:.2e}", origin.norm());

    // Points with det(I + T^T U_up) = 0 have no finite parameter. The
    // classic example: U = -I columns against the identity center.
    let flipped = StiefelPoint::new(-DMatrix::<f64>::identity(4, 1)).unwrap();
    match forward(&CenterPoint::identity(4, 1), &flipped) {
        Err(e) => println!("singular point rejected as expected: {e}"),
        Ok(_) => unreachable!("det(I + U_up) = 0 must be detected"),
    }
}

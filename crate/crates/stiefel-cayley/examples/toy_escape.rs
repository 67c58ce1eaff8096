//! The singular-point issue, live: minimize |U - U*|_F^2 / 2 where the
//! target sits next to the singular set of the identity center. A fixed
//! identity center stagnates; the adaptive strategy re-centers once and
//! converges.
//!
//! Run with: cargo run --example toy_escape

use stiefel_cayley::{
    nearest_point, run, run_naive_cp, toy_target, AlcpConfig, CenterPoint, StiefelPoint,
};

fn main() {
    let (n, p) = (300, 10);
    let target = toy_target(n, p);
    let obj = nearest_point(target);
    let u0 = StiefelPoint::random(n, p, 7);
    let cfg = AlcpConfig::default(); // gd engine, T = 1.5, tol 1e-5, 2000 iterations

    let naive = run_naive_cp(&obj, &u0, &CenterPoint::identity(n, p), &cfg)
        .expect("u0 is nonsingular for the identity center");
    let s = &naive.record.summary;
    println!(
        "fixed identity center: {:<20} f = {:.3e}, |grad| = {:.3e}, {} iterations",
        naive.reason.name(),
        s.f_final,
        s.grad_norm,
        s.iterations
    );

    let adaptive = run(&obj, &u0, &cfg).expect("run completes");
    let s = &adaptive.record.summary;
    println!(
        "adaptive re-centering:  {:<20} f = {:.3e}, |grad| = {:.3e}, {} iterations, {} center change(s)",
        adaptive.reason.name(),
        s.f_final,
        s.grad_norm,
        s.iterations,
        s.center_changes
    );

    // Where did the alarm fire?
    for row in &adaptive.record.rows {
        if row.center_changed {
            println!(
                "  -> re-centered at iteration {} (f = {:.3e})",
                row.n, row.f_value
            );
        }
    }
}

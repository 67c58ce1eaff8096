//! Unbalanced orthogonal Procrustes: fit U with orthonormal columns so that
//! B U matches C = B U*. The data are consistent, so the residual can be
//! driven to zero.
//!
//! Run with: cargo run --example procrustes_fit

use stiefel_cayley::bench::trial_start;
use stiefel_cayley::engine::EngineKind;
use stiefel_cayley::{generate, run, AlcpConfig, ProblemKind};

fn main() {
    let (n, p) = (200, 5);
    let instance = generate(ProblemKind::Procrustes, n, p, 21);
    let obj = instance.objective();
    let u0 = trial_start(n, p, 21, 0);
    let f0 = obj.value(u0.data());
    println!("initial residual |BU - C|_F^2 = {f0:.6e}");

    let cfg = AlcpConfig {
        engine: EngineKind::CgHsPlus,
        rel_grad_tol: 1e-8,
        max_iter: 20_000,
        ..AlcpConfig::default()
    };
    let result = run(obj.as_ref(), &u0, &cfg).expect("run completes");
    let s = &result.record.summary;
    println!(
        "cg-hs+ finished: {} after {} iterations ({} center changes)",
        result.reason.name(),
        s.iterations,
        s.center_changes
    );
    println!(
        "final residual {:.6e} ({:.2e} of the initial value), feasibility {:.2e}",
        s.f_final,
        s.f_final / f0,
        s.feasibility
    );
}

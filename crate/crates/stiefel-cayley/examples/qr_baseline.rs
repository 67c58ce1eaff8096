//! Side-by-side comparison: gradient descent through the adaptive Cayley
//! parametrization versus Riemannian gradient descent with the QR retraction,
//! on the same instance and starting point. The two traces share one schema.
//!
//! Run with: cargo run --example qr_baseline

use stiefel_cayley::bench::trial_start;
use stiefel_cayley::{generate, run, run_rgd, AlcpConfig, ProblemKind, RunResult};

fn describe(label: &str, result: &RunResult) {
    let s = &result.record.summary;
    println!(
        "{label:<8} {:<12} itr {:>5}  nfe {:>6}  f = {:>12.6e}  |grad| = {:.2e}  feasibility {:.1e}  time {:.3}s",
        result.reason.name(),
        s.iterations,
        s.nfe,
        s.f_final,
        s.grad_norm,
        s.feasibility,
        s.elapsed_sec
    );
}

fn main() {
    let (n, p) = (400, 8);
    let instance = generate(ProblemKind::Eigenbasis, n, p, 3);
    let obj = instance.objective();
    let u0 = trial_start(n, p, 3, 0);
    let cfg = AlcpConfig::default(); // gd engine for both strategies

    let cayley = run(obj.as_ref(), &u0, &cfg).expect("run completes");
    let qr = run_rgd(obj.as_ref(), &u0, &cfg).expect("run completes");

    println!("eigenbasis extraction, N = {n}, p = {p}, gradient descent:\n");
    describe("cayley", &cayley);
    describe("qr", &qr);

    let optimum = -instance.optimal_value();
    println!(
        "\ndense-eigensolver optimum: {optimum:.6e} (cayley gap {:.2e}, qr gap {:.2e})",
        (optimum + cayley.record.summary.f_final).abs() / optimum,
        (optimum + qr.record.summary.f_final).abs() / optimum,
    );
}

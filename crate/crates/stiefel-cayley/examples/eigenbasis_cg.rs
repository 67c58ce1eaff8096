//! Dominant-eigenspace extraction with conjugate gradient engines: maximize
//! trace(U^T A U) over St(p, N) and compare against a dense eigensolver.
//!
//! Run with: cargo run --example eigenbasis_cg

use stiefel_cayley::bench::trial_start;
use stiefel_cayley::engine::EngineKind;
use stiefel_cayley::{generate, run, AlcpConfig, ProblemKind};

fn main() {
    let (n, p) = (200, 5);
    let instance = generate(ProblemKind::Eigenbasis, n, p, 13);
    let obj = instance.objective();
    let optimum = -instance.optimal_value(); // sum of the p largest eigenvalues
    println!("sum of the {p} largest eigenvalues (dense solver): {optimum:.10e}\n");

    for engine in [EngineKind::CgFr, EngineKind::CgHsPlus, EngineKind::CgHz] {
        let cfg = AlcpConfig {
            engine,
            ..AlcpConfig::default()
        };
        let u0 = trial_start(n, p, 13, 0);
        let result = run(obj.as_ref(), &u0, &cfg).expect("run completes");
        let s = &result.record.summary;
        let achieved = -s.f_final;
        println!(
            "{engine:<7} {}  itr {:>5}  nfe {:>5}  relative gap {:.2e}",
            result.reason.name(),
            s.iterations,
            s.nfe,
            (optimum - achieved).abs() / optimum
        );
    }
}

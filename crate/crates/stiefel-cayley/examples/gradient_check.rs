//! Finite-difference audit of the pullback gradient: the analytic gradient
//! of f o inverse must reproduce central differences along random unit
//! directions for all three problem families.
//!
//! Run with: cargo run --example gradient_check

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stiefel_cayley::{
    choose_center, forward, inverse, pullback_gradient, generate, ProblemKind, SkewParam,
    StiefelPoint,
};

fn random_unit_param(n: usize, p: usize, rng: &mut ChaCha8Rng) -> SkewParam {
    let a = DMatrix::from_fn(p, p, |_, _| rng.gen::<f64>() - 0.5);
    let b = DMatrix::from_fn(n - p, p, |_, _| rng.gen::<f64>() - 0.5);
    let v = SkewParam::new(a, b).unwrap();
    SkewParam::new(v.a() / v.norm(), v.b() / v.norm()).unwrap()
}

fn main() {
    let (n, p) = (40, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = 1e-6;

    for kind in ProblemKind::ALL {
        let instance = generate(kind, n, p, 11);
        let obj = instance.objective();
        let u0 = StiefelPoint::random(n, p, 5);
        let center = choose_center(&u0);
        let v = forward(&center, &u0).unwrap();
        let grad = pullback_gradient(&center, &v, &obj.euclid_gradient(u0.data())).unwrap();

        let mut worst = 0.0f64;
        for _ in 0..20 {
            let dir = random_unit_param(n, p, &mut rng);
            let fp = obj.value(
                inverse(&center, &SkewParam::new(v.a() + dir.a() * h, v.b() + dir.b() * h).unwrap())
                    .unwrap()
                    .data(),
            );
            let fm = obj.value(
                inverse(&center, &SkewParam::new(v.a() - dir.a() * h, v.b() - dir.b() * h).unwrap())
                    .unwrap()
                    .data(),
            );
            let fd = (fp - fm) / (2.0 * h);
            let analytic = grad.inner(&dir).unwrap();
            worst = worst.max((fd - analytic).abs() / analytic.abs().max(grad.norm()));
        }
        println!(
            "{kind:<5} gradient norm {:>10.4e}   worst relative FD error over 20 directions: {worst:.2e}",
            grad.norm()
        );
    }
}

//! Stochastic KdV with additive space-time white noise: the stochastic
//! convolution's exact per-mode variance and a forced path from zero data.

use kdvlab::dynamics::{evolve_skdv, stochastic_convolution, Equation, EvolutionConfig};
use kdvlab::field::KahanAcc;
use kdvlab::rng;
use kdvlab::FourierField;

fn main() {
    let n = 16;
    let t_final = 1.0;
    let sigma = 1.0;
    let paths = 2_000;

    let mut cfg = EvolutionConfig::new(Equation::Skdv, n, 0.01, t_final);
    cfg.noise_amplitude = sigma;
    let mut second = vec![KahanAcc::default(); n];
    for p in 0..paths {
        cfg.seed = rng::derive_seed(1, p);
        let traj = stochastic_convolution(&cfg).unwrap();
        for (i, c) in traj.last().coeffs().iter().enumerate() {
            second[i].add(c.norm_sqr());
        }
    }
    println!("stochastic convolution, {paths} paths, σ²T = {}", sigma * sigma * t_final);
    for i in [0usize, 7, 15] {
        println!(
            "  E|Φ̂({},T)|² = {:.4}",
            i + 1,
            second[i].sum() / paths as f64
        );
    }

    // full SKdV path from zero data: L² grows ~ 2Nσ²t before saturation
    let mut cfg = EvolutionConfig::new(Equation::Skdv, n, 0.01, t_final);
    cfg.noise_amplitude = sigma;
    cfg.seed = 99;
    let traj = evolve_skdv(&FourierField::zero(n), &cfg).unwrap();
    for step in [10usize, 50, 100] {
        let t = step as f64 * traj.dt;
        println!(
            "  skdv from zero: t = {t:.2}, ∫u² = {:.2} (linear-regime mean {:.2})",
            traj.fields[step].l2_sq(),
            2.0 * n as f64 * sigma * sigma * t
        );
    }
}

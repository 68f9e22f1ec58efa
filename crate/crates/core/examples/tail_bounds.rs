//! Probabilistic toolbox: dyadic-block Gaussian tails against the exact
//! Gamma survival, max-to-sum decay ratios, and the Fernique-type norm
//! tail of white noise.

use kdvlab::experiments::report::gaussian_tail_fit;
use kdvlab::experiments::{decay, tails};
use kdvlab::measures::{sample, MeasureSpec};
use kdvlab::norms::{spatial_norm, NormSpec};
use kdvlab::rng;

fn main() {
    let report = tails::run(&tails::TailConfig {
        block_scale: 16,
        samples: 30_000,
        seed: 1,
        r_grid: None,
        confidence: 0.99,
    })
    .unwrap();
    print!("{}", report.summary());

    let report = decay::run(&decay::DecayConfig {
        m_grid: vec![16, 256, 4096],
        delta: 0.5,
        samples: 5_000,
        seed: 2,
        final_bound: 0.2,
    })
    .unwrap();
    print!("{}", report.summary());

    // Fernique: Gaussian-type tail of the Besov norm over white draws
    let n = 256;
    let spec = NormSpec::besov_hat(-0.4, 3.0);
    let norms: Vec<f64> = (0..30_000)
        .map(|i| {
            let mut stream = rng::stream(rng::derive_seed(9, i));
            let u = sample(&MeasureSpec::white(n, 9), &mut stream).unwrap().field;
            spatial_norm(&u, &spec).unwrap()
        })
        .collect();
    let fit = gaussian_tail_fit(&norms, 3e-3, 0.5, 12);
    println!(
        "Fernique fit over ‖u‖_b̂(-0.4,3): log S(K) ≈ {:.2} - {:.2}·K² (max second diff {:.3})",
        fit.intercept, fit.c_prime, fit.max_second_diff
    );
}

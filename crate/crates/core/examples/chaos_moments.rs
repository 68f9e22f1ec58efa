//! Wick-ordered moments and the quartic chaos: the closed-form second
//! moment of `∫:u²:_β`, the `β^{1/4}` law of `‖Q_β‖_2`, and moment ratios
//! across orders.

use kdvlab::field::KahanAcc;
use kdvlab::measures::{a_beta, sample, wick2, wick4, MeasureSpec, QuadrupleTable};
use kdvlab::rng;
use num_complex::Complex64;

fn main() {
    let n = 500;
    let beta = 1e-2;
    let m = 20_000;
    let mut w2_sq = KahanAcc::default();
    let mut w4_mean = KahanAcc::default();
    for i in 0..m {
        let mut stream = rng::stream(rng::derive_seed(3, i));
        let u = sample(&MeasureSpec::mu_beta(beta, n, 3), &mut stream)
            .unwrap()
            .field;
        let w2 = wick2(&u, beta, n);
        w2_sq.add(w2 * w2);
        w4_mean.add(wick4(&u, beta, n).unwrap());
    }
    let exact: f64 = 4.0
        * (1..=n)
            .map(|k| {
                let x = k as f64;
                (1.0 + beta * x * x).powi(-2)
            })
            .sum::<f64>();
    println!(
        "beta = {beta}: E(∫:u²:)² = {:.3} (closed form {exact:.3}), √β× = {:.4} → π",
        w2_sq.sum() / m as f64,
        beta.sqrt() * w2_sq.sum() / m as f64
    );
    println!(
        "E ∫:u⁴: = {:.3} (exactly 0; a_beta = {:.2})",
        w4_mean.sum() / m as f64,
        a_beta(beta, n)
    );

    // Q_beta over its exhaustive quadruple table
    let table = QuadrupleTable::new(32);
    println!("quadruple table at N = 32: {} canonical quadruples", table.len());
    for beta in [1e-1, 1e-2, 1e-3] {
        let exact_l2 = table.l2_sq_exact(beta).sqrt();
        let mut acc = [KahanAcc::default(), KahanAcc::default()];
        let mq = 10_000;
        for i in 0..mq {
            let mut stream = rng::stream(rng::derive_seed(17, i));
            let g: Vec<Complex64> = (0..32)
                .map(|_| rng::standard_complex_gaussian(&mut stream))
                .collect();
            let q = table.q_beta(&g, beta);
            acc[0].add(q * q);
            acc[1].add(q.powi(4));
        }
        let l2 = (acc[0].sum() / mq as f64).sqrt();
        let l4 = (acc[1].sum() / mq as f64).powf(0.25);
        println!(
            "  beta = {beta:e}: ‖Q‖₂ = {l2:.3} (exact {exact_l2:.3}), ‖Q‖₂/β^¼ = {:.2}, ‖Q‖₄/‖Q‖₂ = {:.2}",
            l2 / beta.powf(0.25),
            l4 / l2
        );
    }
}

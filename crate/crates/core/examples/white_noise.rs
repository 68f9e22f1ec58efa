//! Sample mean-zero white noise on the circle and check its characteristic
//! functional `E e^{i<f,u>} = e^{-||f||²/2}` against a few test functions.

use kdvlab::measures::{char_functional, sample_batch, MeasureSpec};
use kdvlab::TestFunction;

fn main() {
    let spec = MeasureSpec::white(64, 7);
    let m = 20_000;
    let samples = sample_batch(&spec, m).unwrap();

    println!("white noise, N = {}, {} samples", spec.cutoff, m);
    for (mode, l2_sq) in [(1usize, 0.5), (2, 0.5), (1, 1.0), (3, 2.0)] {
        let f = TestFunction::single_mode_with_l2_sq(mode, l2_sq);
        let est = char_functional(&samples, &f).unwrap();
        let target = (-0.5 * l2_sq).exp();
        println!(
            "  f: mode {mode}, ||f||² = {l2_sq}: estimate {:.4}{:+.4}i, target {:.4} (3/√M = {:.4})",
            est.re,
            est.im,
            target,
            3.0 / (m as f64).sqrt()
        );
    }

    // second moments of a few coefficients
    for n in [1usize, 16, 64] {
        let mean_sq: f64 = samples
            .iter()
            .map(|s| s.field.coeffs()[n - 1].norm_sqr())
            .sum::<f64>()
            / m as f64;
        println!("  E|û({n})|² = {mean_sq:.4} (exact 1)");
    }
}

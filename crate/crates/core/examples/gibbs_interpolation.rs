//! The interpolation family: the Gaussian `μ_β`, its quartic-tilted cousin
//! `μ̃_β`, and the interpolated Gibbs measure `ρ_β^{(p)}` with its
//! importance weights against the `μ_β` proposal.

use kdvlab::measures::{
    a_beta, char_functional, effective_sample_size, sample_batch, MeasureSpec,
};
use kdvlab::TestFunction;

fn main() {
    let n = 256;
    for beta in [1e-2, 1e-4] {
        let a = a_beta(beta, n);
        println!(
            "beta = {beta:e}: a_beta = {a:.3}, sqrt(beta)·a_beta = {:.4} (→ π), 12βa_β = {:.3}",
            beta.sqrt() * a,
            12.0 * beta * a
        );
    }

    // the tilted Gaussian exists only once 12 β a_β < 1 + β
    let beta = 1e-5;
    let tilted = MeasureSpec::mu_tilde_beta(beta, n, 3);
    println!("mu_tilde at beta = {beta:e}: validate → {:?}", tilted.validate().is_ok());

    // rho_beta^{(3)}: cubic tilt, weights stay well-conditioned
    let spec = MeasureSpec::rho_beta(3, 1e-3, 10.0, n, 9);
    let m = 20_000;
    let samples = sample_batch(&spec, m).unwrap();
    let ess = effective_sample_size(&samples);
    let f = TestFunction::single_mode_with_l2_sq(1, 0.5);
    let est = char_functional(&samples, &f).unwrap();
    println!(
        "rho_beta^(3) at beta = 1e-3: ESS = {ess:.0} of {m}, char estimate {:.4}{:+.4}i vs white-noise limit {:.4}",
        est.re,
        est.im,
        (-0.25f64).exp()
    );
    let zero_weight = samples.iter().filter(|s| s.weight == 0.0).count();
    println!("  cutoff-rejected samples: {zero_weight}");
}

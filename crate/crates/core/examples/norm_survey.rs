//! Spatial and space-time norms on random fields: where white noise lives
//! (`b̂^s_{p,∞}` with `s·p < -1`), where it does not (`H^{-1/2}`), and the
//! Bourgain-type norms of a free trajectory.

use kdvlab::dynamics::{evolve, Equation, EvolutionConfig};
use kdvlab::measures::{sample, MeasureSpec};
use kdvlab::norms::{resonance3, resonance4, spatial_norm, xsb_norm, NormSpec};
use kdvlab::rng;
use num_complex::Complex64;

fn main() {
    // the Dirac comb: bounded in b̂^{-1/2}_{2,∞}, log-divergent in H^{-1/2}
    for n in [64usize, 1024, 16384] {
        let comb = kdvlab::FourierField::new(n, vec![Complex64::new(1.0, 0.0); n]).unwrap();
        let besov = spatial_norm(&comb, &NormSpec::besov_hat(-0.5, 2.0)).unwrap();
        let sobolev = spatial_norm(&comb, &NormSpec::sobolev(-0.5)).unwrap();
        println!("comb N = {n:6}: b̂ = {besov:.4} (bounded), H^(-1/2) = {sobolev:.4} (~√(2 ln N))");
    }

    // a white-noise draw through the embedding chain
    let mut stream = rng::stream(5);
    let u = sample(&MeasureSpec::white(256, 5), &mut stream).unwrap().field;
    let s = -0.4;
    let hs = spatial_norm(&u, &NormSpec::sobolev(s)).unwrap();
    let b3 = spatial_norm(&u, &NormSpec::besov_hat(s, 3.0)).unwrap();
    let fl3 = spatial_norm(&u, &NormSpec::fourier_lebesgue(s, 3.0)).unwrap();
    println!("white draw: ‖u‖_H^{s} = {hs:.3} ≥ ‖u‖_b̂ = {b3:.3}; ‖u‖_FL = {fl3:.3}");

    // space-time norms of a free single-mode flow concentrate on τ = n³
    let mut cfg = EvolutionConfig::new(Equation::Kdv, 4, 2.0 * std::f64::consts::PI / 64.0, 2.0 * std::f64::consts::PI);
    cfg.linear_only = true;
    let mut coeffs = vec![Complex64::ZERO; 4];
    coeffs[0] = Complex64::new(0.5, 0.0);
    let u0 = kdvlab::FourierField::new(4, coeffs).unwrap();
    let traj = evolve(&u0, &cfg).unwrap();
    for b in [0.0, 0.5, 1.0] {
        let v = xsb_norm(&traj, &NormSpec::xsb(0.0, b)).unwrap();
        println!("  free mode-1 flow: X^(0,{b}) = {v:.4} (modulation ⟨τ-n³⟩ ≈ ⟨0⟩)");
    }
    let pq = xsb_norm(&traj, &NormSpec::xsbpq(0.0, 0.5, 3.0, 2.0)).unwrap();
    let l2 = xsb_norm(&traj, &NormSpec::xsb(0.0, 0.5)).unwrap();
    println!("  X^(0,1/2)_(3,2) = {pq:.4} ≤ X^(0,1/2) = {l2:.4}");

    println!(
        "resonance identities: (1,1) → {}, (2,3) → {}, quartic (1,2,3) → {}",
        resonance3(1, 1),
        resonance3(2, 3),
        resonance4(1, 2, 3)
    );
}

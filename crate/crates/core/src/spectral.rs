//! FFT plumbing: embedding Hermitian one-sided spectra into full grids and
//! moving between coefficients and physical samples.
//!
//! The full-grid layout follows the usual DFT index convention: slot `0` is
//! the mean (always zero here), slot `n` for `1 ≤ n ≤ N` holds `û(n)` and
//! slot `G - n` holds `û(-n) = conj(û(n))`.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((len, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(len)
                } else {
                    planner.plan_fft_forward(len)
                }
            })
            .clone()
    })
}

/// Smallest power of two that is at least `min`.
pub fn padded_len(min: usize) -> usize {
    min.next_power_of_two()
}

/// Scatter one-sided coefficients (`coeffs[i] = û(i+1)`) into a zeroed
/// full-spectrum buffer of length `grid  ≥ 2N+1`.
pub fn embed_hermitian(coeffs: &[Complex64], buf: &mut [Complex64]) {
    let g = buf.len();
    debug_assert!(g >= 2 * coeffs.len() + 1);
    buf.fill(Complex64::ZERO);
    for (i, c) in coeffs.iter().enumerate() {
        buf[i + 1] = *c;
        buf[g - 1 - i] = c.conj();
    }
}

/// Physical samples `u(2πj/G)` for `j = 0..G` from one-sided coefficients.
/// `grid` must be at least `2N+1`.
pub fn physical_samples(coeffs: &[Complex64], grid: usize) -> Vec<f64> {
    let mut buf = vec![Complex64::ZERO; grid];
    embed_hermitian(coeffs, &mut buf);
    // unnormalized inverse DFT: X[j] = Σ_k x[k] e^{+2πi jk/G}
    plan(grid, true).process(&mut buf);
    buf.iter().map(|z| z.re).collect()
}

/// Same as [`physical_samples`] but returns the complex buffer, so callers
/// can check the imaginary residue.
pub fn physical_samples_complex(coeffs: &[Complex64], grid: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::ZERO; grid];
    embed_hermitian(coeffs, &mut buf);
    plan(grid, true).process(&mut buf);
    buf
}

/// One-sided coefficients `û(1..=cutoff)` of a real sample vector
/// (forward DFT divided by the grid length).
pub fn coeffs_from_physical(values: &[f64], cutoff: usize) -> Vec<Complex64> {
    let g = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan(g, false).process(&mut buf);
    (1..=cutoff)
        .map(|n| buf[n] / g as f64)
        .collect()
}

/// In-place complex DFT of `buf` (forward = `e^{-2πi jk/G}` kernel),
/// unnormalized. Used for the discrete time transform of trajectories.
pub fn dft_in_place(buf: &mut [Complex64], inverse: bool) {
    plan(buf.len(), inverse).process(buf);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_round_trips() {
        // û(±1) = 1/2 is cos(x)
        let coeffs = vec![Complex64::new(0.5, 0.0)];
        let vals = physical_samples(&coeffs, 8);
        for (j, v) in vals.iter().enumerate() {
            let x = 2.0 * std::f64::consts::PI * j as f64 / 8.0;
            assert!((v - x.cos()).abs() < 1e-12);
        }
        let back = coeffs_from_physical(&vals, 1);
        assert!((back[0] - coeffs[0]).norm() < 1e-12);
    }
}

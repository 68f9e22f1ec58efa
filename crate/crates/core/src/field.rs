//! Truncated mean-zero real periodic fields and exact polynomial
//! functionals on them.
//!
//! A [`FourierField`] stores only the coefficients `û(n)` for `n = 1..=N`;
//! the mean is structurally zero and `û(-n) = conj(û(n))`, so the physical
//! field is real by construction. All integrals are normalized averages
//! over the circle.

use crate::error::Error;
use crate::spectral;
use crate::Result;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Truncated mean-zero real field, stored as the one-sided spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub struct FourierField {
    cutoff: usize,
    coeffs: Vec<Complex64>,
}

/// Wire format: `{"cutoff": N, "coeffs": [[re, im], ...]}` for `n = 1..=N`.
#[derive(Serialize, Deserialize)]
struct FieldRepr {
    cutoff: usize,
    coeffs: Vec<[f64; 2]>,
}

impl TryFrom<FieldRepr> for FourierField {
    type Error = Error;
    fn try_from(r: FieldRepr) -> Result<Self> {
        FourierField::new(
            r.cutoff,
            r.coeffs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<FourierField> for FieldRepr {
    fn from(f: FourierField) -> Self {
        FieldRepr {
            cutoff: f.cutoff,
            coeffs: f.coeffs.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl FourierField {
    /// Field from one-sided coefficients; `coeffs[i]` is `û(i+1)`.
    pub fn new(cutoff: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidSpec("cutoff must be >= 1".into()));
        }
        if coeffs.len() != cutoff {
            return Err(Error::InvalidSpec(format!(
                "expected {cutoff} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { cutoff, coeffs })
    }

    /// The zero field at the given cutoff.
    pub fn zero(cutoff: usize) -> Self {
        Self {
            cutoff: cutoff.max(1),
            coeffs: vec![Complex64::ZERO; cutoff.max(1)],
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// One-sided coefficients `û(1..=N)`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Signed-frequency access with the Hermitian/mean-zero conventions;
    /// frequencies beyond the cutoff read as zero.
    pub fn coeff(&self, n: i64) -> Complex64 {
        if n == 0 || n.unsigned_abs() as usize > self.cutoff {
            Complex64::ZERO
        } else if n > 0 {
            self.coeffs[(n - 1) as usize]
        } else {
            self.coeffs[(-n - 1) as usize].conj()
        }
    }

    /// `∫ u² = Σ_{n≠0} |û(n)|²` (exact, Parseval).
    pub fn l2_sq(&self) -> f64 {
        2.0 * self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// `∫ u_x² = Σ_{n≠0} n² |û(n)|²`.
    pub fn gradient_integral(&self) -> f64 {
        2.0 * self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let n = (i + 1) as f64;
                n * n * z.norm_sqr()
            })
            .sum::<f64>()
    }

    /// Normalized integral of `u^p` for `p ∈ {2,3,4}`, by dealiased
    /// physical-space quadrature on a padded grid of `≥ p·N + 1` points
    /// (exact for trigonometric polynomials).
    pub fn integral_power(&self, p: u32) -> Result<f64> {
        if !(2..=4).contains(&p) {
            return Err(Error::InvalidSpec(format!(
                "integral_power requires p in {{2,3,4}}, got {p}"
            )));
        }
        if p == 2 {
            return Ok(self.l2_sq());
        }
        let grid = spectral::padded_len(p as usize * self.cutoff + 1);
        let vals = spectral::physical_samples(&self.coeffs, grid);
        let mut acc = KahanAcc::default();
        for v in vals {
            acc.add(v.powi(p as i32));
        }
        Ok(acc.sum() / grid as f64)
    }

    /// Same functional through frequency-space convolution sums; the
    /// independent second route for the dealiasing self-check.
    pub fn integral_power_convolution(&self, p: u32) -> Result<f64> {
        if !(2..=4).contains(&p) {
            return Err(Error::InvalidSpec(format!(
                "integral_power requires p in {{2,3,4}}, got {p}"
            )));
        }
        let n = self.cutoff as i64;
        if p == 2 {
            return Ok(self.l2_sq());
        }
        // w(m) = (u²)^(m) on the doubled band 0..=2N; w(-m) = conj(w(m)).
        let w: Vec<Complex64> = (0..=2 * n)
            .map(|m| {
                let mut s = Complex64::ZERO;
                let lo = (m - n).max(-n);
                for k in lo..=n {
                    if k == 0 || m - k == 0 {
                        continue;
                    }
                    s += self.coeff(k) * self.coeff(m - k);
                }
                s
            })
            .collect();
        if p == 3 {
            // (u³)^(0) = Σ_{|m|≤N} w(m) û(-m)
            let mut s = Complex64::ZERO;
            for m in 1..=n {
                s += w[m as usize] * self.coeff(-m);
            }
            Ok(2.0 * s.re)
        } else {
            // (u⁴)^(0) = Σ_{|m|≤2N} w(m) w(-m) = w(0)² + 2 Σ_{m≥1} |w(m)|²
            let mut s = w[0].re * w[0].re;
            for m in 1..=(2 * n) as usize {
                s += 2.0 * w[m].norm_sqr();
            }
            Ok(s)
        }
    }

    /// Real samples on a uniform grid; `grid_points ≥ 2N+1` so the field is
    /// represented exactly.
    pub fn to_physical(&self, grid_points: usize) -> Result<Vec<f64>> {
        let required = 2 * self.cutoff + 1;
        if grid_points < required {
            return Err(Error::GridTooSmall {
                cutoff: self.cutoff,
                required,
                got: grid_points,
            });
        }
        Ok(spectral::physical_samples(&self.coeffs, grid_points))
    }

    /// Recover a field of the given cutoff from uniform real samples
    /// (`values.len() ≥ 2·cutoff+1`).
    pub fn from_physical(values: &[f64], cutoff: usize) -> Result<Self> {
        let required = 2 * cutoff + 1;
        if values.len() < required {
            return Err(Error::GridTooSmall {
                cutoff,
                required,
                got: values.len(),
            });
        }
        Self::new(cutoff, spectral::coeffs_from_physical(values, cutoff))
    }

    /// Largest imaginary residue over the physical samples; a reality
    /// diagnostic (should be at machine-precision level always).
    pub fn imaginary_residue(&self, grid_points: usize) -> f64 {
        let vals = spectral::physical_samples_complex(&self.coeffs, grid_points);
        vals.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

/// Smooth mean-zero test function used in pairings; same storage as a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction(pub FourierField);

impl TestFunction {
    /// `f = a·(e^{inx} + e^{-inx})`-type single-mode function with
    /// `f̂(n) = amplitude` (real), so `‖f‖² = 2·amplitude²`.
    pub fn single_mode(mode: usize, amplitude: f64) -> Self {
        let mut coeffs = vec![Complex64::ZERO; mode.max(1)];
        coeffs[mode - 1] = Complex64::new(amplitude, 0.0);
        TestFunction(FourierField::new(mode.max(1), coeffs).expect("valid"))
    }

    /// Single-mode function normalized to a prescribed `‖f‖²`.
    pub fn single_mode_with_l2_sq(mode: usize, l2_sq: f64) -> Self {
        Self::single_mode(mode, (l2_sq / 2.0).sqrt())
    }

    pub fn field(&self) -> &FourierField {
        &self.0
    }

    /// `‖f‖²_{L²} = Σ_{n≠0} |f̂(n)|²`.
    pub fn l2_sq(&self) -> f64 {
        self.0.l2_sq()
    }

    /// `‖P_N f‖²` after projecting onto frequencies `|n| ≤ N`.
    pub fn projected_l2_sq(&self, cutoff: usize) -> f64 {
        2.0 * self
            .0
            .coeffs()
            .iter()
            .take(cutoff)
            .map(|z| z.norm_sqr())
            .sum::<f64>()
    }
}

/// `⟨f, u⟩ = Σ_{n≠0} f̂(n) conj(û(n))`; real because both are real fields.
/// Frequencies beyond either cutoff are treated as zero.
pub fn pairing(f: &TestFunction, u: &FourierField) -> f64 {
    let m = f.0.cutoff().min(u.cutoff());
    let s: Complex64 = (0..m)
        .map(|i| f.0.coeffs()[i] * u.coeffs()[i].conj())
        .sum();
    // the n and -n terms are conjugate, so the full sum is 2 Re Σ_{n≥1}
    2.0 * s.re
}

/// Compensated (Kahan) accumulator; keeps ensemble reductions
/// order-stable at machine precision.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanAcc {
    sum: f64,
    carry: f64,
}

impl KahanAcc {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn sum(&self) -> f64 {
        self.sum
    }
}

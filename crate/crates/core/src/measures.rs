//! Samplers for the Gaussian and interpolated-Gibbs measures, Wick-ordered
//! polynomial functionals, and the "no pair, all distinct" quartic chaos.
//!
//! Measure conventions (normalized circle, `E|g|² = 1` complex Gaussians):
//!
//! * `white`: `û(n) = g_n`
//! * `mu_beta`: `û(n) = g_n / √(1 + βn²)`
//! * `mu_tilde_beta`: `û(n) = g_n / √(1 - 12βa_β + βn²)` (requires the
//!   denominator positive for every `1 ≤ n ≤ N`)
//! * `rho_beta` (p ∈ {3,4}): a `mu_beta` proposal carrying the
//!   self-normalized importance weight
//!   `w = χ{∫u² ≤ K β^{-1/2}} · exp(β ∫u^p)`.
//!
//! Weights are kept in log form alongside their plain value; `exp(β∫u⁴)`
//! overflows `f64` long before it stops being meaningful statistically.

use crate::error::Error;
use crate::field::{pairing, FourierField, KahanAcc, TestFunction};
use crate::rng;
use crate::Result;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    White,
    MuBeta,
    MuTildeBeta,
    RhoBeta,
}

/// Which measure to sample and its parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    #[serde(default)]
    pub beta: f64,
    /// Interaction power for `rho_beta`; 3 or 4.
    #[serde(default)]
    pub p: Option<u32>,
    /// Cutoff constant `K` in the indicator `χ{∫u² ≤ K β^{-1/2}}`.
    #[serde(default = "default_k")]
    pub k: f64,
    pub cutoff: usize,
    pub seed: u64,
}

fn default_k() -> f64 {
    10.0
}

impl MeasureSpec {
    pub fn white(cutoff: usize, seed: u64) -> Self {
        Self {
            kind: MeasureKind::White,
            beta: 0.0,
            p: None,
            k: default_k(),
            cutoff,
            seed,
        }
    }

    pub fn mu_beta(beta: f64, cutoff: usize, seed: u64) -> Self {
        Self {
            kind: MeasureKind::MuBeta,
            beta,
            p: None,
            k: default_k(),
            cutoff,
            seed,
        }
    }

    pub fn mu_tilde_beta(beta: f64, cutoff: usize, seed: u64) -> Self {
        Self {
            kind: MeasureKind::MuTildeBeta,
            beta,
            p: None,
            k: default_k(),
            cutoff,
            seed,
        }
    }

    pub fn rho_beta(p: u32, beta: f64, k: f64, cutoff: usize, seed: u64) -> Self {
        Self {
            kind: MeasureKind::RhoBeta,
            beta,
            p: Some(p),
            k,
            cutoff,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cutoff == 0 {
            return Err(Error::InvalidSpec("cutoff must be >= 1".into()));
        }
        match self.kind {
            MeasureKind::White => Ok(()),
            MeasureKind::MuBeta => {
                // β = 0 degenerates to white noise coefficient-wise
                if self.beta < 0.0 {
                    Err(Error::InvalidSpec("mu_beta requires beta >= 0".into()))
                } else {
                    Ok(())
                }
            }
            MeasureKind::MuTildeBeta => {
                if self.beta <= 0.0 {
                    return Err(Error::InvalidSpec("mu_tilde_beta requires beta > 0".into()));
                }
                let a = a_beta(self.beta, self.cutoff);
                // worst mode is n = 1
                let worst = 1.0 - 12.0 * self.beta * a + self.beta;
                if worst <= 0.0 {
                    return Err(Error::InvalidSpec(format!(
                        "mu_tilde_beta undefined: 1 - 12*beta*a_beta + beta*n^2 = {worst:.4} <= 0 at n = 1 \
                         (beta = {}, a_beta = {a:.4})",
                        self.beta
                    )));
                }
                Ok(())
            }
            MeasureKind::RhoBeta => {
                if self.beta <= 0.0 {
                    return Err(Error::InvalidSpec("rho_beta requires beta > 0".into()));
                }
                if self.k <= 0.0 {
                    return Err(Error::InvalidSpec("rho_beta requires K > 0".into()));
                }
                match self.p {
                    Some(3) | Some(4) => Ok(()),
                    other => Err(Error::InvalidSpec(format!(
                        "rho_beta requires p in {{3,4}}, got {other:?}"
                    ))),
                }
            }
        }
    }
}

/// A field with its importance weight (1 for the pure Gaussian kinds).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightedSample {
    pub field: FourierField,
    /// Plain weight; exactly 0 when the L² cutoff indicator fails.
    pub weight: f64,
    /// `ln`-weight (`-inf` when the indicator fails); the numerically safe
    /// representation used by all estimators.
    pub log_weight: f64,
}

/// Truncated `a_β = Σ_{0<|n|≤N} 1/(1+βn²) = 2 Σ_{n=1..N} 1/(1+βn²)`.
pub fn a_beta(beta: f64, cutoff: usize) -> f64 {
    let mut acc = KahanAcc::default();
    // sum small-to-large for accuracy
    for n in (1..=cutoff).rev() {
        let x = n as f64;
        acc.add(1.0 / (1.0 + beta * x * x));
    }
    2.0 * acc.sum()
}

/// Draw one sample from the measure using the supplied stream.
pub fn sample<R: Rng + ?Sized>(spec: &MeasureSpec, rng_state: &mut R) -> Result<WeightedSample> {
    spec.validate()?;
    let n = spec.cutoff;
    let mut coeffs = Vec::with_capacity(n);
    match spec.kind {
        MeasureKind::White => {
            for _ in 0..n {
                coeffs.push(rng::standard_complex_gaussian(rng_state));
            }
        }
        MeasureKind::MuBeta | MeasureKind::RhoBeta => {
            for i in 0..n {
                let k = (i + 1) as f64;
                let scale = 1.0 / (1.0 + spec.beta * k * k).sqrt();
                coeffs.push(rng::standard_complex_gaussian(rng_state) * scale);
            }
        }
        MeasureKind::MuTildeBeta => {
            let a = a_beta(spec.beta, n);
            let shift = 1.0 - 12.0 * spec.beta * a;
            for i in 0..n {
                let k = (i + 1) as f64;
                let scale = 1.0 / (shift + spec.beta * k * k).sqrt();
                coeffs.push(rng::standard_complex_gaussian(rng_state) * scale);
            }
        }
    }
    let field = FourierField::new(n, coeffs)?;
    let (weight, log_weight) = match spec.kind {
        MeasureKind::RhoBeta => {
            let p = spec.p.expect("validated");
            if field.l2_sq() > spec.k / spec.beta.sqrt() {
                (0.0, f64::NEG_INFINITY)
            } else {
                let lw = spec.beta * field.integral_power(p)?;
                (lw.exp(), lw)
            }
        }
        _ => (1.0, 0.0),
    };
    Ok(WeightedSample {
        field,
        weight,
        log_weight,
    })
}

/// Deterministic parallel batch: sample `i` uses the derived stream
/// `derive_seed(spec.seed, i)`, so the batch is reproducible and
/// order-independent.
pub fn sample_batch(spec: &MeasureSpec, count: usize) -> Result<Vec<WeightedSample>> {
    use rayon::prelude::*;
    spec.validate()?;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut stream = rng::stream(rng::derive_seed(spec.seed, i as u64));
            sample(spec, &mut stream)
        })
        .collect()
}

/// `∫ :u²:_β = ∫u² - a_β` (Wick ordering truncated at the field cutoff).
pub fn wick2(u: &FourierField, beta: f64, cutoff: usize) -> f64 {
    u.l2_sq() - a_beta(beta, cutoff)
}

/// `∫ :u⁴:_β = ∫u⁴ - 6 a_β ∫u² + 3 a_β²`.
pub fn wick4(u: &FourierField, beta: f64, cutoff: usize) -> Result<f64> {
    let a = a_beta(beta, cutoff);
    Ok(u.integral_power(4)? - 6.0 * a * u.l2_sq() + 3.0 * a * a)
}

/// Self-normalized characteristic-functional estimate
/// `Σ w_j e^{i⟨f,u_j⟩} / Σ w_j`, computed with max-shifted log weights.
pub fn char_functional(samples: &[WeightedSample], f: &TestFunction) -> Result<Complex64> {
    let max_lw = samples
        .iter()
        .map(|s| s.log_weight)
        .fold(f64::NEG_INFINITY, f64::max);
    if !max_lw.is_finite() {
        return Err(Error::DegenerateWeights);
    }
    let mut num_re = KahanAcc::default();
    let mut num_im = KahanAcc::default();
    let mut den = KahanAcc::default();
    for s in samples {
        let w = (s.log_weight - max_lw).exp();
        if w == 0.0 {
            continue;
        }
        let theta = pairing(f, &s.field);
        num_re.add(w * theta.cos());
        num_im.add(w * theta.sin());
        den.add(w);
    }
    Ok(Complex64::new(num_re.sum(), num_im.sum()) / den.sum())
}

/// Effective sample size `(Σw)²/Σw²` of a weighted batch.
pub fn effective_sample_size(samples: &[WeightedSample]) -> f64 {
    let max_lw = samples
        .iter()
        .map(|s| s.log_weight)
        .fold(f64::NEG_INFINITY, f64::max);
    if !max_lw.is_finite() {
        return 0.0;
    }
    let mut s1 = KahanAcc::default();
    let mut s2 = KahanAcc::default();
    for s in samples {
        let w = (s.log_weight - max_lw).exp();
        s1.add(w);
        s2.add(w * w);
    }
    s1.sum() * s1.sum() / s2.sum()
}

/// Precomputed index set for the quartic chaos `Q_β`: quadruples
/// `n₁+n₂+n₃+n₄ = 0` with `0 < |n_j| ≤ N`, all distinct, and no antipodal
/// pair `n_j = -n_k`. Stored as the sorted representative of each orbit;
/// the ordered sum is 4! times the canonical one.
#[derive(Debug, Clone)]
pub struct QuadrupleTable {
    cutoff: usize,
    quads: Vec<[i32; 4]>,
}

impl QuadrupleTable {
    /// Exhaustive O(N³) enumeration of canonical quadruples.
    pub fn new(cutoff: usize) -> Self {
        let n = cutoff as i32;
        let mut quads = Vec::new();
        for a in -n..=n {
            if a == 0 {
                continue;
            }
            for b in (a + 1)..=n {
                if b == 0 {
                    continue;
                }
                for c in (b + 1)..=n {
                    if c == 0 {
                        continue;
                    }
                    let d = -(a + b + c);
                    if d <= c || d > n {
                        continue;
                    }
                    let q = [a, b, c, d];
                    let mut ok = true;
                    'outer: for i in 0..4 {
                        for j in (i + 1)..4 {
                            if q[i] + q[j] == 0 {
                                ok = false;
                                break 'outer;
                            }
                        }
                    }
                    if ok {
                        quads.push(q);
                    }
                }
            }
        }
        Self { cutoff, quads }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Number of canonical (sorted) quadruples.
    pub fn len(&self) -> usize {
        self.quads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quads.is_empty()
    }

    /// `Q_β` evaluated on a Hermitian-extended Gaussian vector
    /// (`gaussians[i] = g_{i+1}`, `g_{-n} = conj(g_n)`):
    /// `β Σ_{**} Π g_{n_j} / √(1+βn_j²)`, summed over ordered quadruples.
    pub fn q_beta(&self, gaussians: &[Complex64], beta: f64) -> f64 {
        assert!(
            gaussians.len() >= self.cutoff,
            "need {} gaussians, got {}",
            self.cutoff,
            gaussians.len()
        );
        let g = |m: i32| -> Complex64 {
            if m > 0 {
                gaussians[(m - 1) as usize]
            } else {
                gaussians[(-m - 1) as usize].conj()
            }
        };
        let mut acc = KahanAcc::default();
        for q in &self.quads {
            let mut prod = Complex64::new(1.0, 0.0);
            let mut w = 1.0;
            for &m in q {
                prod *= g(m);
                let x = m as f64;
                w *= 1.0 + beta * x * x;
            }
            // the orbit of a no-pair quadruple under negation is disjoint
            // from itself, so the real part accounts for both halves
            acc.add(prod.re / w.sqrt());
        }
        // 24 orderings per canonical quadruple
        beta * 24.0 * acc.sum()
    }

    /// Exact `E[Q_β²] = 576 β² Σ_canonical Π (1+βn_j²)^{-1}` (each ordered
    /// quadruple pairs with the 4! orderings of its negation, every factor
    /// contributing `E|g|² = 1`).
    pub fn l2_sq_exact(&self, beta: f64) -> f64 {
        let mut acc = KahanAcc::default();
        for q in &self.quads {
            let mut w = 1.0;
            for &m in q {
                let x = m as f64;
                w *= 1.0 + beta * x * x;
            }
            acc.add(1.0 / w);
        }
        576.0 * beta * beta * acc.sum()
    }
}

/// Eigenfunctions of the Ornstein-Uhlenbeck generator in one variable:
/// `h_0 = 1`, `h_1 = -x`, `h_2 = (x²-1)/√2`, normalized in `L²(γ)`.
pub fn hermite_ou(k: u32, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => -x,
        2 => (x * x - 1.0) / 2.0_f64.sqrt(),
        3 => -(x.powi(3) - 3.0 * x) / 6.0_f64.sqrt(),
        4 => (x.powi(4) - 6.0 * x * x + 3.0) / 24.0_f64.sqrt(),
        _ => panic!("hermite_ou implemented for k <= 4"),
    }
}

/// Persist a batch as JSONL: a header line `{"seed":…,"spec":…}` followed by
/// one `WeightedSample` per line.
pub fn write_batch_jsonl<W: std::io::Write>(
    out: &mut W,
    spec: &MeasureSpec,
    samples: &[WeightedSample],
) -> Result<()> {
    let header = serde_json::json!({ "seed": spec.seed, "spec": spec });
    writeln!(out, "{}", serde_json::to_string(&header)?)?;
    for s in samples {
        writeln!(out, "{}", serde_json::to_string(s)?)?;
    }
    Ok(())
}

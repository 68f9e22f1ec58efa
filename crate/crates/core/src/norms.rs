//! Spatial norms (Sobolev, dyadic-block Besov-type, Fourier-Lebesgue),
//! their space-time counterparts on discrete trajectories, and the cubic
//! resonance identities used as diagnostics.
//!
//! Dyadic blocks follow the convention `block j = {n : 2^j ≤ |n| < 2^{j+1}}`
//! for `j ≥ 0`. The space-time norms are discrete surrogates: the window
//! `[0, T)` is periodized, each mode's time series is transformed by a
//! normalized DFT (`1/J` in front), the dual variable is sampled on
//! `τ_k = 2πk/T`, and sums over `τ` use counting measure. The modulation
//! weight is `⟨τ - n³⟩^b` with `⟨·⟩ = 1 + |·|`.

use crate::bracket;
use crate::error::Error;
use crate::field::FourierField;
use crate::spectral;
use crate::Result;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormFamily {
    Sobolev,
    BesovHat,
    FourierLebesgue,
    Xsb,
    Xsbpq,
}

/// A norm family together with its indices.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NormSpec {
    pub family: NormFamily,
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default = "two")]
    pub p: f64,
    #[serde(default = "two")]
    pub q: f64,
}

fn two() -> f64 {
    2.0
}

impl NormSpec {
    pub fn sobolev(s: f64) -> Self {
        Self {
            family: NormFamily::Sobolev,
            s,
            b: 0.0,
            p: 2.0,
            q: 2.0,
        }
    }

    pub fn besov_hat(s: f64, p: f64) -> Self {
        Self {
            family: NormFamily::BesovHat,
            s,
            b: 0.0,
            p,
            q: 2.0,
        }
    }

    pub fn fourier_lebesgue(s: f64, p: f64) -> Self {
        Self {
            family: NormFamily::FourierLebesgue,
            s,
            b: 0.0,
            p,
            q: 2.0,
        }
    }

    pub fn xsb(s: f64, b: f64) -> Self {
        Self {
            family: NormFamily::Xsb,
            s,
            b,
            p: 2.0,
            q: 2.0,
        }
    }

    pub fn xsbpq(s: f64, b: f64, p: f64, q: f64) -> Self {
        Self {
            family: NormFamily::Xsbpq,
            s,
            b,
            p,
            q,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1.0 || self.q < 1.0 {
            return Err(Error::InvalidSpec(format!(
                "norm indices require p, q >= 1 (got p = {}, q = {})",
                self.p, self.q
            )));
        }
        Ok(())
    }
}

/// Time-indexed fields on a uniform grid `0, dt, …, T`, the carrier for
/// the space-time norms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub dt: f64,
    pub fields: Vec<FourierField>,
}

impl Trajectory {
    pub fn new(dt: f64, fields: Vec<FourierField>) -> Result<Self> {
        if dt <= 0.0 {
            return Err(Error::InvalidSpec("trajectory dt must be positive".into()));
        }
        if fields.is_empty() {
            return Err(Error::InvalidSpec("trajectory needs snapshots".into()));
        }
        let n = fields[0].cutoff();
        if fields.iter().any(|f| f.cutoff() != n) {
            return Err(Error::InvalidSpec(
                "trajectory snapshots must share one cutoff".into(),
            ));
        }
        Ok(Self { dt, fields })
    }

    pub fn cutoff(&self) -> usize {
        self.fields[0].cutoff()
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// Total time span `T = (len-1)·dt`.
    pub fn t_final(&self) -> f64 {
        (self.fields.len() - 1) as f64 * self.dt
    }

    pub fn initial(&self) -> &FourierField {
        &self.fields[0]
    }

    pub fn last(&self) -> &FourierField {
        self.fields.last().expect("nonempty")
    }
}

/// Iterator over the dyadic blocks `2^j ≤ n < 2^{j+1}` intersected with
/// `1..=cutoff` (positive side only; callers double for the pair `±n`).
pub fn dyadic_blocks(cutoff: usize) -> impl Iterator<Item = std::ops::Range<usize>> {
    let mut j = 0usize;
    std::iter::from_fn(move || {
        let lo = 1usize << j;
        if lo > cutoff {
            return None;
        }
        let hi = ((1usize << (j + 1)) - 1).min(cutoff);
        j += 1;
        Some(lo..hi + 1)
    })
}

/// Spatial norm of a field for the Sobolev / Besov-type / Fourier-Lebesgue
/// families.
pub fn spatial_norm(u: &FourierField, spec: &NormSpec) -> Result<f64> {
    spec.validate()?;
    let coeffs = u.coeffs();
    match spec.family {
        NormFamily::Sobolev => {
            let mut s = 0.0;
            for (i, c) in coeffs.iter().enumerate() {
                let w = bracket((i + 1) as i64).powf(2.0 * spec.s);
                s += 2.0 * w * c.norm_sqr();
            }
            Ok(s.sqrt())
        }
        NormFamily::FourierLebesgue => {
            let mut s = 0.0;
            for (i, c) in coeffs.iter().enumerate() {
                let w = bracket((i + 1) as i64).powf(spec.s);
                s += 2.0 * (w * c.norm()).powf(spec.p);
            }
            Ok(s.powf(1.0 / spec.p))
        }
        NormFamily::BesovHat => {
            let mut best: f64 = 0.0;
            for block in dyadic_blocks(u.cutoff()) {
                let mut s = 0.0;
                for n in block {
                    let w = bracket(n as i64).powf(spec.s);
                    s += 2.0 * (w * coeffs[n - 1].norm()).powf(spec.p);
                }
                best = best.max(s.powf(1.0 / spec.p));
            }
            Ok(best)
        }
        _ => Err(Error::InvalidSpec(
            "spatial_norm expects a spatial family (sobolev, besov_hat, fourier_lebesgue)".into(),
        )),
    }
}

/// Per-mode discrete time spectrum over the periodized window: returns, for
/// each stored mode `n = 1..=N`, the vector of `(τ_k, |û(n, τ_k)|)` over the
/// signed dual grid. Uses the first `J = len-1` snapshots.
fn time_spectra(traj: &Trajectory) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if traj.len() < 2 {
        return Err(Error::DegenerateWindow(
            "need at least 2 snapshots".to_string(),
        ));
    }
    let j_len = traj.len() - 1;
    let window = j_len as f64 * traj.dt;
    let n_modes = traj.cutoff();
    let mut taus = Vec::with_capacity(j_len);
    for k in 0..j_len {
        let signed = if k <= j_len / 2 {
            k as i64
        } else {
            k as i64 - j_len as i64
        };
        taus.push(2.0 * std::f64::consts::PI * signed as f64 / window);
    }
    let mut spectra = Vec::with_capacity(n_modes);
    let mut buf = vec![Complex64::ZERO; j_len];
    for m in 0..n_modes {
        for (jj, slot) in buf.iter_mut().enumerate() {
            *slot = traj.fields[jj].coeffs()[m];
        }
        spectral::dft_in_place(&mut buf, false);
        spectra.push(buf.iter().map(|z| z.norm() / j_len as f64).collect());
    }
    Ok((taus, spectra))
}

/// Space-time norm of a trajectory for the `xsb` / `xsbpq` families.
///
/// The mode `-n` contributes exactly the mirrored-`τ` spectrum of mode `n`
/// with the reflected weight, which coincides with the `+n` contribution,
/// so each stored mode is counted twice.
pub fn xsb_norm(traj: &Trajectory, spec: &NormSpec) -> Result<f64> {
    spec.validate()?;
    let (taus, spectra) = time_spectra(traj)?;
    match spec.family {
        NormFamily::Xsb => {
            let mut total = 0.0;
            for (m, amp) in spectra.iter().enumerate() {
                let n = (m + 1) as i64;
                let nw = bracket(n).powf(2.0 * spec.s);
                let n3 = (n * n * n) as f64;
                for (k, a) in amp.iter().enumerate() {
                    let w = bracket_f(taus[k] - n3).powf(2.0 * spec.b);
                    total += 2.0 * nw * w * a * a;
                }
            }
            Ok(total.sqrt())
        }
        NormFamily::Xsbpq => {
            let mut best: f64 = 0.0;
            for block in dyadic_blocks(traj.cutoff()) {
                let mut outer = 0.0;
                for n in block {
                    let n3 = ((n * n * n) as i64) as f64;
                    let mut inner = 0.0;
                    for (k, a) in spectra[n - 1].iter().enumerate() {
                        let w = bracket_f(taus[k] - n3).powf(spec.b);
                        inner += (w * a).powf(spec.q);
                    }
                    let val = bracket(n as i64).powf(spec.s) * inner.powf(1.0 / spec.q);
                    outer += 2.0 * val.powf(spec.p);
                }
                best = best.max(outer.powf(1.0 / spec.p));
            }
            Ok(best)
        }
        _ => Err(Error::InvalidSpec(
            "xsb_norm expects a space-time family (xsb, xsbpq)".into(),
        )),
    }
}

#[inline]
fn bracket_f(x: f64) -> f64 {
    1.0 + x.abs()
}

/// `n³ - n₁³ - n₂³` in the factored form `3 n n₁ n₂` for `n = n₁ + n₂`.
pub fn resonance3(n1: i64, n2: i64) -> i64 {
    3 * (n1 + n2) * n1 * n2
}

/// `n³ - n₂³ - n₃³ - n₄³` in the factored form
/// `3 (n₂+n₃)(n₃+n₄)(n₄+n₂)` for `n = n₂ + n₃ + n₄`.
pub fn resonance4(n2: i64, n3: i64, n4: i64) -> i64 {
    3 * (n2 + n3) * (n3 + n4) * (n4 + n2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;

    fn random_field(cutoff: usize, seed: u64) -> FourierField {
        let mut r = rng::stream(seed);
        let coeffs = (0..cutoff)
            .map(|_| rng::standard_complex_gaussian(&mut r))
            .collect();
        FourierField::new(cutoff, coeffs).unwrap()
    }

    fn comb(cutoff: usize) -> FourierField {
        FourierField::new(cutoff, vec![Complex64::new(1.0, 0.0); cutoff]).unwrap()
    }

    #[test]
    fn besov_single_block() {
        let u = comb(1); // û(±1) = 1
        let v = spatial_norm(&u, &NormSpec::besov_hat(0.0, 2.0)).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn besov_comb_uniformly_bounded() {
        // Dirac-comb truncation with sp <= -1 stays bounded in N
        let spec = NormSpec::besov_hat(-0.5, 2.0);
        let mut prev: f64 = 0.0;
        for n in [64, 256, 1024, 4096] {
            let v = spatial_norm(&comb(n), &spec).unwrap();
            assert!(v <= 2.0, "N={n}: {v}");
            prev = prev.max(v);
        }
        assert!(prev > 0.0);
    }

    #[test]
    fn sobolev_comb_log_divergence() {
        // direct summation oracle: (2 Σ (1+n)^{-1})^{1/2}
        for n in [64usize, 1024] {
            let exact: f64 = (2.0
                * (1..=n).map(|k| 1.0 / (1.0 + k as f64)).sum::<f64>())
            .sqrt();
            let v = spatial_norm(&comb(n), &NormSpec::sobolev(-0.5)).unwrap();
            assert!((v - exact).abs() < 1e-12, "N={n}");
        }
        let a = spatial_norm(&comb(64), &NormSpec::sobolev(-0.5)).unwrap();
        let b = spatial_norm(&comb(4096), &NormSpec::sobolev(-0.5)).unwrap();
        assert!(b > a + 0.4, "should diverge like sqrt(2 ln N)");
    }

    #[test]
    fn spatial_norm_rejects_spacetime_family() {
        let u = comb(4);
        assert!(spatial_norm(&u, &NormSpec::xsb(0.0, 0.5)).is_err());
    }

    #[test]
    fn xsb_zero_trajectory() {
        let fields = vec![FourierField::zero(4); 9];
        let traj = Trajectory::new(0.1, fields).unwrap();
        assert_eq!(xsb_norm(&traj, &NormSpec::xsb(0.3, 0.4)).unwrap(), 0.0);
    }

    #[test]
    fn xsb_degenerate_window() {
        let traj = Trajectory::new(0.1, vec![FourierField::zero(4)]).unwrap();
        assert!(matches!(
            xsb_norm(&traj, &NormSpec::xsb(0.0, 0.0)),
            Err(Error::DegenerateWindow(_))
        ));
    }

    /// Independent discrete oracle: the weighted sum assembled from the
    /// closed-form DFT of a sampled pure phase e^{iωt}.
    fn xsb_oracle_single_mode(c: Complex64, omega: f64, dt: f64, j_len: usize, s: f64, b: f64) -> f64 {
        let window = j_len as f64 * dt;
        let mut total = 0.0;
        for k in 0..j_len {
            let signed = if k <= j_len / 2 {
                k as i64
            } else {
                k as i64 - j_len as i64
            };
            let tau = 2.0 * std::f64::consts::PI * signed as f64 / window;
            // (1/J) Σ_j e^{i(ω - 2πk/T) j dt}
            let mut acc = Complex64::ZERO;
            for jj in 0..j_len {
                let phase = (omega * dt - 2.0 * std::f64::consts::PI * k as f64 / j_len as f64)
                    * jj as f64;
                acc += Complex64::new(phase.cos(), phase.sin());
            }
            let amp = (c * acc / j_len as f64).norm();
            let w = (1.0 + (tau - 1.0).abs()).powf(2.0 * b);
            total += 2.0 * 2.0f64.powf(2.0 * s) * w * amp * amp;
        }
        total.sqrt()
    }

    #[test]
    fn xsb_free_single_mode() {
        // û(1,t) = e^{i·1³·t} c over an exactly periodic window T = 2π
        let j_len = 32;
        let dt = 2.0 * std::f64::consts::PI / j_len as f64;
        let c = Complex64::new(0.3, -0.4);
        let fields: Vec<FourierField> = (0..=j_len)
            .map(|jj| {
                let t = jj as f64 * dt;
                FourierField::new(1, vec![c * Complex64::new(t.cos(), t.sin())]).unwrap()
            })
            .collect();
        let traj = Trajectory::new(dt, fields).unwrap();
        let (s, b) = (-0.4, 0.3);
        let v = xsb_norm(&traj, &NormSpec::xsb(s, b)).unwrap();
        // on-grid phase concentrates in the τ = 1 bin with modulation 0:
        // norm = √2 ⟨1⟩^s |c|
        let ideal = 2f64.sqrt() * 2f64.powf(s) * c.norm();
        assert!((v / ideal - 1.0).abs() < 0.05, "v = {v}, ideal = {ideal}");
        let oracle = xsb_oracle_single_mode(c, 1.0, dt, j_len, s, b);
        assert!((v - oracle).abs() < 1e-10 * oracle, "v = {v}, oracle = {oracle}");

        // off-grid window: still must match the discrete oracle exactly
        let dt2 = 0.19;
        let fields2: Vec<FourierField> = (0..=j_len)
            .map(|jj| {
                let t = jj as f64 * dt2;
                FourierField::new(1, vec![c * Complex64::new(t.cos(), t.sin())]).unwrap()
            })
            .collect();
        let traj2 = Trajectory::new(dt2, fields2).unwrap();
        let v2 = xsb_norm(&traj2, &NormSpec::xsb(s, b)).unwrap();
        let oracle2 = xsb_oracle_single_mode(c, 1.0, dt2, j_len, s, b);
        assert!((v2 - oracle2).abs() < 1e-10 * oracle2);
    }

    #[test]
    fn resonance_identity_examples() {
        assert_eq!(resonance3(1, 1), 6);
        assert_eq!(resonance3(1, -1), 0);
        assert_eq!(resonance3(2, 3), 90);
        assert_eq!(125 - 8 - 27, 90);
    }

    #[test]
    fn resonance3_exhaustive() {
        for n1 in -1000i64..=1000 {
            for n2 in -1000i64..=1000 {
                let n = n1 + n2;
                assert_eq!(n * n * n - n1 * n1 * n1 - n2 * n2 * n2, resonance3(n1, n2));
            }
        }
    }

    #[test]
    fn resonance4_medium_exhaustive() {
        // the full |n| <= 1000 sweep lives in the acceptance suite
        for a in -100i64..=100 {
            for b in -100i64..=100 {
                for c in -100i64..=100 {
                    let n = a + b + c;
                    assert_eq!(
                        n * n * n - a * a * a - b * b * b - c * c * c,
                        resonance4(a, b, c)
                    );
                }
            }
        }
    }

    fn random_traj(cutoff: usize, len: usize, seed: u64) -> Trajectory {
        let fields = (0..len).map(|i| random_field(cutoff, seed + i as u64)).collect();
        Trajectory::new(0.05, fields).unwrap()
    }

    #[test]
    fn embed_xsbpq_into_xsb() {
        // ‖u‖_{X^{s,b}_{p,2}} ≤ ‖u‖_{X^{s,b}} for p ≥ 2
        for seed in 0..5 {
            let traj = random_traj(12, 17, 100 + seed);
            let xsb = xsb_norm(&traj, &NormSpec::xsb(-0.4, 0.3)).unwrap();
            for p in [2.0, 3.0, 4.0, 8.0] {
                let pq = xsb_norm(&traj, &NormSpec::xsbpq(-0.4, 0.3, p, 2.0)).unwrap();
                assert!(pq <= xsb * (1.0 + 1e-12), "p={p}: {pq} > {xsb}");
            }
        }
    }

    #[test]
    fn embed_besov_into_sobolev_and_reverse() {
        // ‖u‖_{b̂^s_{p,∞}} ≤ ‖u‖_{H^s} for p ≥ 2, and the Hölder-block
        // reverse ‖u‖_{H^{-1/2-δ}} ≤ C ‖u‖_{b̂^{-1/2+δ}_{p,∞}} with
        // C² = Σ_j (Σ_{|n|∼2^j} ⟨n⟩^{-4δp/(p-2)})^{(p-2)/p}.
        let (delta, p) = (0.3f64, 3.0f64);
        let s_hi = -0.5 + delta;
        for seed in 0..5 {
            let u = random_field(64, 500 + seed);
            let hs = spatial_norm(&u, &NormSpec::sobolev(s_hi)).unwrap();
            for pp in [2.0, 3.0, 6.0] {
                let bes = spatial_norm(&u, &NormSpec::besov_hat(s_hi, pp)).unwrap();
                assert!(bes <= hs * (1.0 + 1e-12));
            }
            let lo = spatial_norm(&u, &NormSpec::sobolev(-0.5 - delta)).unwrap();
            let bes = spatial_norm(&u, &NormSpec::besov_hat(s_hi, p)).unwrap();
            let mut c_sq = 0.0;
            for block in dyadic_blocks(u.cutoff()) {
                let s: f64 = block
                    .map(|n| bracket(n as i64).powf(-4.0 * delta * p / (p - 2.0)))
                    .sum::<f64>()
                    * 2.0;
                c_sq += s.powf((p - 2.0) / p);
            }
            let c = c_sq.sqrt();
            assert!(lo <= c * bes * (1.0 + 1e-12), "{lo} > {c} * {bes}");
        }
    }

    proptest! {
        #[test]
        fn prop_besov_monotone_under_coefficient_growth(
            seed in 0u64..500,
            idx in 0usize..16,
            factor in 1.0f64..5.0,
        ) {
            let u = random_field(16, seed);
            let mut v = u.clone();
            v.coeffs_mut()[idx] *= factor;
            let spec = NormSpec::besov_hat(-0.4, 3.0);
            let nu = spatial_norm(&u, &spec).unwrap();
            let nv = spatial_norm(&v, &spec).unwrap();
            prop_assert!(nv >= nu - 1e-12);
        }
    }
}

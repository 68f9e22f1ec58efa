//! Moment scalings of the Wick-ordered functionals under `μ_β`:
//!
//! * `E ∫:u²:_β = 0` and `E (∫:u²:_β)² = 2 Σ_{0<|n|≤N} (1+βn²)^{-2}`
//!   exactly (the conjugate pair `±n` carries the same exponential
//!   fluctuation, doubling the naive independent-mode count);
//!   `√β · E (∫:u²:_β)² → π`.
//! * `E ∫:u⁴:_β = 0` exactly (Isserlis: `E ∫u⁴ = 3 a_β²` at finite N),
//!   and `β^{3/2} · E (∫:u⁴:_β)²` stays bounded along the grid.
//!
//! The sets `A = {|∫:u⁴:_β| ≤ L β^{-3/4}}`, `B = {|∫:u²:_β| ≤ L β^{-1/4}}`
//! are reported as empirical probabilities of their complements against the
//! Chebyshev bound `P(A^c ∪ B^c) ≲ L^{-2}`.

use crate::error::Error;
use crate::experiments::report::{ExperimentReport, Table};
use crate::field::KahanAcc;
use crate::measures::{sample, wick2, wick4, MeasureSpec};
use crate::rng;
use crate::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentConfig {
    /// Decreasing β grid.
    pub beta_grid: Vec<f64>,
    pub cutoff: usize,
    pub samples: usize,
    pub seed: u64,
    /// Levels L of the indicator sets A, B.
    #[serde(default = "default_levels")]
    pub levels: Vec<f64>,
    /// Relative tolerance of the Monte Carlo second moment against the
    /// closed form.
    #[serde(default = "default_var_tol")]
    pub variance_tolerance: f64,
    /// Relative tolerance of `√β·E(∫:u²:_β)²` against π at the final β.
    #[serde(default = "default_pi_tol")]
    pub scaling_tolerance: f64,
    /// Grid-uniform bound on `β^{3/2}·E(∫:u⁴:_β)²`; the continuum value of
    /// the dominant no-pair chaos is `6π³ ≈ 186`, plus an
    /// `O(√β)` paired-term contribution.
    #[serde(default = "default_quartic_bound")]
    pub quartic_bound: f64,
}

fn default_levels() -> Vec<f64> {
    vec![2.0, 4.0, 8.0]
}

fn default_var_tol() -> f64 {
    0.05
}

fn default_pi_tol() -> f64 {
    0.10
}

fn default_quartic_bound() -> f64 {
    300.0
}

/// Exact `E (∫:u²:_β)² = 2 Σ_{0<|n|≤N} (1+βn²)^{-2}`.
pub fn wick2_second_moment_exact(beta: f64, cutoff: usize) -> f64 {
    let mut acc = KahanAcc::default();
    for n in (1..=cutoff).rev() {
        let x = n as f64;
        let d = 1.0 + beta * x * x;
        acc.add(1.0 / (d * d));
    }
    4.0 * acc.sum()
}

pub fn run(cfg: &MomentConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    for &beta in &cfg.beta_grid {
        // truncation heuristic: resolve modes down to the β^{-1/2} scale
        let needed = (10.0 / beta.sqrt()).ceil() as usize;
        if cfg.cutoff < needed {
            return Err(Error::InvalidSpec(format!(
                "truncation precondition violated: beta = {beta} needs cutoff >= {needed}, got {}",
                cfg.cutoff
            )));
        }
    }
    let mut report = ExperimentReport::new("moment_scaling", cfg, cfg.seed);
    let n = cfg.cutoff;
    let m = cfg.samples as f64;
    let mut scaled_w4_sq = Vec::new();
    let mut rows = Vec::new();
    let mut ab_rows = Vec::new();
    for (bi, &beta) in cfg.beta_grid.iter().enumerate() {
        let spec = MeasureSpec::mu_beta(beta, n, cfg.seed);
        let pairs: Vec<Result<(f64, f64)>> = (0..cfg.samples)
            .into_par_iter()
            .map(|i| {
                let sub = rng::derive_seed(cfg.seed, (bi * cfg.samples + i) as u64);
                let mut stream = rng::stream(sub);
                let s = sample(&spec, &mut stream)?;
                Ok((wick2(&s.field, beta, n), wick4(&s.field, beta, n)?))
            })
            .collect();
        let mut w2_mean = KahanAcc::default();
        let mut w2_sq = KahanAcc::default();
        let mut w2_4th = KahanAcc::default();
        let mut w4_mean = KahanAcc::default();
        let mut w4_sq = KahanAcc::default();
        let mut w4_4th = KahanAcc::default();
        let mut exceed = vec![[0usize; 2]; cfg.levels.len()];
        for r in pairs {
            let (w2, w4) = r?;
            w2_mean.add(w2);
            w2_sq.add(w2 * w2);
            w2_4th.add(w2.powi(4));
            w4_mean.add(w4);
            w4_sq.add(w4 * w4);
            w4_4th.add(w4.powi(4));
            for (li, &level) in cfg.levels.iter().enumerate() {
                if w4.abs() > level * beta.powf(-0.75) {
                    exceed[li][0] += 1;
                }
                if w2.abs() > level * beta.powf(-0.25) {
                    exceed[li][1] += 1;
                }
            }
        }
        let e_w2 = w2_mean.sum() / m;
        let e_w2_sq = w2_sq.sum() / m;
        let e_w4 = w4_mean.sum() / m;
        let e_w4_sq = w4_sq.sum() / m;
        let se_w2 = (e_w2_sq / m).sqrt();
        let se_w2_sq = ((w2_4th.sum() / m - e_w2_sq * e_w2_sq).max(0.0) / m).sqrt();
        let se_w4 = (e_w4_sq / m).sqrt();
        let se_w4_sq = ((w4_4th.sum() / m - e_w4_sq * e_w4_sq).max(0.0) / m).sqrt();

        let exact = wick2_second_moment_exact(beta, n);
        report.assert_cell(
            &format!("mean_wick2_beta_{beta:e}"),
            e_w2,
            Some(se_w2),
            0.0,
            3.0 * se_w2,
        );
        report.assert_cell(
            &format!("second_moment_wick2_beta_{beta:e}"),
            e_w2_sq,
            Some(se_w2_sq),
            exact,
            cfg.variance_tolerance * exact,
        );
        // E∫:u⁴:_β is exactly 0 at finite N; also report the β^{-1/2} scale
        report.assert_cell(
            &format!("mean_wick4_beta_{beta:e}"),
            e_w4,
            Some(se_w4),
            0.0,
            4.0 * se_w4,
        );
        report.push_check(
            &format!("mean_wick4_within_sqrt_beta_scale_{beta:e}"),
            e_w4.abs() <= beta.powf(-0.5),
            format!("|E ∫:u⁴:| = {:.4} vs β^(-1/2) = {:.4}", e_w4.abs(), beta.powf(-0.5)),
        );
        report.info_cell(
            &format!("second_moment_wick4_beta_{beta:e}"),
            e_w4_sq,
            Some(se_w4_sq),
        );
        scaled_w4_sq.push(beta.powf(1.5) * e_w4_sq);
        rows.push(vec![
            beta,
            e_w2,
            e_w2_sq,
            exact,
            e_w4,
            e_w4_sq,
            beta.sqrt() * e_w2_sq,
            beta.powf(1.5) * e_w4_sq,
        ]);

        // set A/B sub-report: empirical complements against Chebyshev
        for (li, &level) in cfg.levels.iter().enumerate() {
            let p_ac = exceed[li][0] as f64 / m;
            let p_bc = exceed[li][1] as f64 / m;
            let p_union = (p_ac + p_bc).min(1.0); // union bound on the report side
            let cheb = (beta.powf(1.5) * e_w4_sq + beta.sqrt() * e_w2_sq) / (level * level);
            let se_p = (p_union * (1.0 - p_union) / m).sqrt().max(1.0 / m);
            report.push_check(
                &format!("setAB_level{level}_beta_{beta:e}"),
                p_union <= cheb + 3.0 * se_p,
                format!("P(Ac)+P(Bc) = {p_union:.5} vs Chebyshev {cheb:.5} (~ L^-2 = {:.5})", 1.0 / (level * level)),
            );
            ab_rows.push(vec![beta, level, p_ac, p_bc, cheb]);
        }
    }
    report.push_table(Table {
        name: "moments".into(),
        columns: vec![
            "beta".into(),
            "mean_wick2".into(),
            "second_moment_wick2".into(),
            "exact_second_moment".into(),
            "mean_wick4".into(),
            "second_moment_wick4".into(),
            "sqrt_beta_times_w2sq".into(),
            "beta32_times_w4sq".into(),
        ],
        rows,
    });
    report.push_table(Table {
        name: "set_ab".into(),
        columns: vec![
            "beta".into(),
            "level".into(),
            "p_a_complement".into(),
            "p_b_complement".into(),
            "chebyshev_bound".into(),
        ],
        rows: ab_rows,
    });

    // √β·E(∫:u²:)² approaches π; pinned at the final (smallest) β
    let final_beta = *cfg.beta_grid.last().expect("nonempty");
    let final_scaled = final_beta.sqrt() * wick2_second_moment_exact(final_beta, n);
    let last_mc = report
        .cells
        .iter()
        .find(|c| c.label == format!("second_moment_wick2_beta_{final_beta:e}"))
        .map(|c| c.value)
        .expect("cell exists");
    report.assert_cell(
        "sqrt_beta_wick2_scaling_mc",
        final_beta.sqrt() * last_mc,
        None,
        std::f64::consts::PI,
        cfg.scaling_tolerance * std::f64::consts::PI,
    );
    report.info_cell("sqrt_beta_wick2_scaling_exact", final_scaled, None);

    let max_scaled = scaled_w4_sq.iter().cloned().fold(0.0f64, f64::max);
    report.assert_cell(
        "beta32_wick4_second_moment_bound",
        max_scaled,
        None,
        0.0,
        cfg.quartic_bound,
    );

    report.wall_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

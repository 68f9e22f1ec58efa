//! Weak convergence of the interpolated Gibbs measures `ρ_β^{(p)}` to white
//! noise: self-normalized importance sampling against the Gaussian `μ_β`
//! proposal, distance of the characteristic functional to `e^{-‖f‖²/2}`
//! along a decreasing β grid.

use crate::error::Error;
use crate::experiments::report::{batch_means, ExperimentReport, Table};
use crate::field::{pairing, KahanAcc, TestFunction};
use crate::measures::{sample, MeasureSpec};
use crate::rng;
use crate::Result;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeakConvergenceConfig {
    /// Interaction power: 3 (KdV-type) or 4 (mKdV-type).
    pub p: u32,
    /// Strictly decreasing grid.
    pub beta_grid: Vec<f64>,
    #[serde(default = "default_k")]
    pub k: f64,
    pub samples: usize,
    pub seed: u64,
    /// Single-mode test functions with `‖f‖² = f_l2_sq`.
    #[serde(default = "default_modes")]
    pub test_modes: Vec<usize>,
    #[serde(default = "default_f_l2")]
    pub f_l2_sq: f64,
    /// Distance bound at the final β.
    #[serde(default = "default_tol")]
    pub final_tolerance: f64,
    /// Batch count for batch-means standard errors.
    #[serde(default = "default_batches")]
    pub batches: usize,
}

fn default_k() -> f64 {
    10.0
}

fn default_modes() -> Vec<usize> {
    vec![1, 2]
}

fn default_f_l2() -> f64 {
    0.5
}

fn default_tol() -> f64 {
    0.05
}

fn default_batches() -> usize {
    100
}

/// Cutoff heuristic: resolve the measure down to `β^{-1/2}`-scale modes.
pub fn cutoff_for_beta(beta: f64) -> usize {
    (10.0 / beta.sqrt()).ceil().max(64.0) as usize
}

struct BetaCell {
    beta: f64,
    distances: Vec<f64>,
    std_errors: Vec<f64>,
    ess: f64,
    kept: f64,
}

pub fn run(cfg: &WeakConvergenceConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    if !(cfg.p == 3 || cfg.p == 4) {
        return Err(Error::InvalidSpec("weak convergence requires p in {3,4}".into()));
    }
    if cfg.beta_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidSpec("beta_grid must be strictly decreasing".into()));
    }
    let fs: Vec<TestFunction> = cfg
        .test_modes
        .iter()
        .map(|&m| TestFunction::single_mode_with_l2_sq(m, cfg.f_l2_sq))
        .collect();
    let targets: Vec<f64> = fs.iter().map(|f| (-0.5 * f.l2_sq()).exp()).collect();

    let mut report = ExperimentReport::new("weak_convergence", cfg, cfg.seed);
    let mut cells: Vec<BetaCell> = Vec::new();
    for (bi, &beta) in cfg.beta_grid.iter().enumerate() {
        let n = cutoff_for_beta(beta);
        let spec = MeasureSpec::rho_beta(cfg.p, beta, cfg.k, n, cfg.seed);
        spec.validate()?;
        // stream samples: keep only (log-weight, phases) per sample
        let rows: Vec<Result<(f64, Vec<f64>)>> = (0..cfg.samples)
            .into_par_iter()
            .map(|i| {
                let sub = rng::derive_seed(cfg.seed, (bi * cfg.samples + i) as u64);
                let mut stream = rng::stream(sub);
                let s = sample(&spec, &mut stream)?;
                let phases = fs.iter().map(|f| pairing(f, &s.field)).collect();
                Ok((s.log_weight, phases))
            })
            .collect();
        let mut log_w = Vec::with_capacity(cfg.samples);
        let mut phases = vec![Vec::with_capacity(cfg.samples); fs.len()];
        for r in rows {
            let (lw, ph) = r?;
            log_w.push(lw);
            for (k, v) in ph.into_iter().enumerate() {
                phases[k].push(v);
            }
        }
        let max_lw = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max_lw.is_finite() {
            return Err(Error::DegenerateWeights);
        }
        let w: Vec<f64> = log_w.iter().map(|lw| (lw - max_lw).exp()).collect();
        let (mut s1, mut s2) = (KahanAcc::default(), KahanAcc::default());
        for &x in &w {
            s1.add(x);
            s2.add(x * x);
        }
        let ess = s1.sum() * s1.sum() / s2.sum();
        let kept = w.iter().filter(|&&x| x > 0.0).count() as f64 / cfg.samples as f64;

        let mut distances = Vec::new();
        let mut std_errors = Vec::new();
        for (k, _f) in fs.iter().enumerate() {
            let est = weighted_char(&w, &phases[k]);
            let d = (est - Complex64::new(targets[k], 0.0)).norm();
            // batch means on the self-normalized estimator, componentwise
            let idx: Vec<f64> = (0..cfg.samples).map(|i| i as f64).collect();
            let (_, se_re) = batch_means(&idx, cfg.batches, |chunk| {
                let lo = chunk[0] as usize;
                let hi = chunk[chunk.len() - 1] as usize + 1;
                weighted_char(&w[lo..hi], &phases[k][lo..hi]).re
            });
            let (_, se_im) = batch_means(&idx, cfg.batches, |chunk| {
                let lo = chunk[0] as usize;
                let hi = chunk[chunk.len() - 1] as usize + 1;
                weighted_char(&w[lo..hi], &phases[k][lo..hi]).im
            });
            let se = (se_re * se_re + se_im * se_im).sqrt();
            distances.push(d);
            std_errors.push(se);
        }
        cells.push(BetaCell {
            beta,
            distances,
            std_errors,
            ess,
            kept,
        });
    }

    let mut rows = Vec::new();
    for c in &cells {
        for (k, &m) in cfg.test_modes.iter().enumerate() {
            rows.push(vec![
                c.beta,
                m as f64,
                c.distances[k],
                c.std_errors[k],
                c.ess,
                c.kept,
            ]);
        }
        report.info_cell(&format!("ess_beta_{:e}", c.beta), c.ess, None);
    }
    report.push_table(Table {
        name: "distances".into(),
        columns: vec![
            "beta".into(),
            "mode".into(),
            "distance".into(),
            "std_error".into(),
            "ess".into(),
            "kept_fraction".into(),
        ],
        rows,
    });

    // verdict per test function: non-increasing within 2·SE slack per step,
    // final distance within tolerance
    for (k, &mode) in cfg.test_modes.iter().enumerate() {
        let mut monotone = true;
        let mut detail = String::new();
        for w in cells.windows(2) {
            let slack = 2.0 * (w[0].std_errors[k] + w[1].std_errors[k]);
            if w[1].distances[k] > w[0].distances[k] + slack {
                monotone = false;
                detail = format!(
                    "distance rose {:.4} -> {:.4} (slack {:.4}) between beta {:e} and {:e}",
                    w[0].distances[k],
                    w[1].distances[k],
                    slack,
                    w[0].beta,
                    w[1].beta
                );
                break;
            }
        }
        if monotone {
            detail = format!(
                "distances {:?} non-increasing within 2 SE slack",
                cells.iter().map(|c| c.distances[k]).collect::<Vec<_>>()
            );
        }
        report.push_check(&format!("monotone_trend_mode{mode}"), monotone, detail);
        let last = cells.last().expect("nonempty grid");
        report.assert_cell(
            &format!("final_distance_mode{mode}"),
            last.distances[k],
            Some(last.std_errors[k]),
            0.0,
            cfg.final_tolerance,
        );
    }

    report.wall_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

fn weighted_char(w: &[f64], phases: &[f64]) -> Complex64 {
    let mut re = KahanAcc::default();
    let mut im = KahanAcc::default();
    let mut den = KahanAcc::default();
    for (&wi, &th) in w.iter().zip(phases) {
        if wi == 0.0 {
            continue;
        }
        re.add(wi * th.cos());
        im.add(wi * th.sin());
        den.add(wi);
    }
    Complex64::new(re.sum(), im.sum()) / den.sum()
}

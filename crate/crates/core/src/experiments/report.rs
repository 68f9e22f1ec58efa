//! Serializable experiment reports and the small statistics toolbox shared
//! by the experiments: compensated means, batch-means standard errors,
//! Bonferroni-corrected 3σ thresholds, and Gaussian tail fits.
//!
//! Reports are reproducible bit-exactly from their config except for the
//! `wall_secs` timing field; [`ExperimentReport::canonical_json`] strips it
//! for byte comparisons.

use crate::field::KahanAcc;
use crate::Result;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use std::path::Path;

/// One scalar statistic with its error bar and (optional) verdict data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatCell {
    pub label: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

/// A named boolean verdict with a human-readable explanation. Tolerances
/// always appear in `detail`; nothing is silent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

/// Flat numeric table exported as CSV next to the JSON report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub cells: Vec<StatCell>,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub passed: bool,
    pub wall_secs: f64,
}

impl ExperimentReport {
    pub fn new<C: Serialize>(experiment: &str, config: &C, seed: u64) -> Self {
        Self {
            experiment: experiment.to_string(),
            config: serde_json::to_value(config).expect("config serializes"),
            seed,
            cells: Vec::new(),
            checks: Vec::new(),
            tables: Vec::new(),
            passed: true,
            wall_secs: 0.0,
        }
    }

    pub fn push_cell(&mut self, cell: StatCell) {
        if let Some(false) = cell.pass {
            self.passed = false;
        }
        self.cells.push(cell);
    }

    /// Cell asserting `|value - target| <= tolerance`.
    pub fn assert_cell(
        &mut self,
        label: &str,
        value: f64,
        std_error: Option<f64>,
        target: f64,
        tolerance: f64,
    ) {
        let pass = (value - target).abs() <= tolerance;
        self.push_cell(StatCell {
            label: label.to_string(),
            value,
            std_error,
            target: Some(target),
            tolerance: Some(tolerance),
            pass: Some(pass),
        });
    }

    /// Informational cell with no verdict attached.
    pub fn info_cell(&mut self, label: &str, value: f64, std_error: Option<f64>) {
        self.push_cell(StatCell {
            label: label.to_string(),
            value,
            std_error,
            target: None,
            tolerance: None,
            pass: None,
        });
    }

    pub fn push_check(&mut self, label: &str, pass: bool, detail: String) {
        if !pass {
            self.passed = false;
        }
        self.checks.push(Check {
            label: label.to_string(),
            pass,
            detail,
        });
    }

    pub fn push_table(&mut self, table: Table) {
        self.tables.push(table);
    }

    /// JSON with the timing zeroed; the bit-exact reproducibility contract
    /// covers everything else.
    pub fn canonical_json(&self) -> String {
        let mut clone = self.clone();
        clone.wall_secs = 0.0;
        serde_json::to_string_pretty(&clone).expect("report serializes")
    }

    /// Write `report.json` plus one CSV per table into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(
            dir.join("report.json"),
            serde_json::to_string_pretty(self)?,
        )?;
        for t in &self.tables {
            let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", t.name)))?;
            w.write_record(&t.columns)?;
            for row in &t.rows {
                w.write_record(row.iter().map(|v| format!("{v:.17e}")))?;
            }
            w.flush()?;
        }
        Ok(())
    }

    /// One line per cell/check with a verdict, for terminal use.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "[{}] {}\n",
            if self.passed { "PASS" } else { "FAIL" },
            self.experiment
        ));
        for c in &self.cells {
            if let (Some(t), Some(tol), Some(p)) = (c.target, c.tolerance, c.pass) {
                out.push_str(&format!(
                    "  [{}] {}: {:.6} (target {:.6} ± {:.2e})\n",
                    if p { "ok" } else { "FAIL" },
                    c.label,
                    c.value,
                    t,
                    tol
                ));
            }
        }
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {}: {}\n",
                if c.pass { "ok" } else { "FAIL" },
                c.label,
                c.detail
            ));
        }
        out
    }
}

/// Mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len().max(1) as f64;
    let mut acc = KahanAcc::default();
    for &x in xs {
        acc.add(x);
    }
    let mean = acc.sum() / n;
    let mut var = KahanAcc::default();
    for &x in xs {
        var.add((x - mean) * (x - mean));
    }
    let se = (var.sum() / (n * (n - 1.0).max(1.0))).sqrt();
    (mean, se)
}

/// Batch-means estimate of a statistic with its standard error.
pub fn batch_means<F: Fn(&[f64]) -> f64>(xs: &[f64], batches: usize, stat: F) -> (f64, f64) {
    let b = batches.clamp(2, xs.len().max(2));
    let len = (xs.len() / b).max(1);
    let vals: Vec<f64> = (0..b).map(|i| stat(&xs[i * len..(i + 1) * len])).collect();
    mean_and_se(&vals)
}

/// Two-sided threshold such that `m` simultaneous comparisons retain the
/// familywise error of a single 3σ test: `Φ⁻¹(1 - P(|Z|>3)/(2m))`.
pub fn bonferroni_z(comparisons: usize) -> f64 {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let alpha = 2.0 * (1.0 - normal.cdf(3.0));
    let m = comparisons.max(1) as f64;
    normal.inverse_cdf(1.0 - alpha / (2.0 * m))
}

/// Least-squares fit of `log S(K) = a - c' K²` plus a concavity scan of the
/// empirical log-survival.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianTailFit {
    pub intercept: f64,
    /// Quadratic coefficient; Gaussian-type tails have `c' > 0`.
    pub c_prime: f64,
    /// Largest second difference of log-survival on the uniform `K` grid;
    /// concave data keeps this near or below zero.
    pub max_second_diff: f64,
    pub points: usize,
}

/// Fit the upper tail of a sample of norms. The fit window is the survival
/// range `[s_min, s_max]` (e.g. `1e-3..0.5`) so every grid point carries
/// enough mass for a stable logarithm.
pub fn gaussian_tail_fit(norms: &[f64], s_min: f64, s_max: f64, grid: usize) -> GaussianTailFit {
    let mut sorted = norms.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = sorted.len();
    let quantile = |s: f64| -> f64 {
        let idx = ((1.0 - s) * m as f64).min(m as f64 - 1.0).max(0.0) as usize;
        sorted[idx]
    };
    let k_lo = quantile(s_max);
    let k_hi = quantile(s_min);
    let ks: Vec<f64> = (0..grid)
        .map(|i| k_lo + (k_hi - k_lo) * i as f64 / (grid - 1) as f64)
        .collect();
    let survival = |k: f64| -> f64 {
        let pos = sorted.partition_point(|&x| x <= k);
        (m - pos) as f64 / m as f64
    };
    let logs: Vec<f64> = ks.iter().map(|&k| survival(k).max(1e-12).ln()).collect();
    // normal equations for the basis [1, K²]
    let (mut s0, mut s1, mut s2, mut t0, mut t1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, l) in ks.iter().zip(&logs) {
        let x = k * k;
        s0 += 1.0;
        s1 += x;
        s2 += x * x;
        t0 += l;
        t1 += x * l;
    }
    let det = s0 * s2 - s1 * s1;
    let intercept = (s2 * t0 - s1 * t1) / det;
    let slope = (s0 * t1 - s1 * t0) / det;
    let mut max_second_diff = f64::NEG_INFINITY;
    for w in logs.windows(3) {
        max_second_diff = max_second_diff.max(w[2] - 2.0 * w[1] + w[0]);
    }
    GaussianTailFit {
        intercept,
        c_prime: -slope,
        max_second_diff,
        points: grid,
    }
}

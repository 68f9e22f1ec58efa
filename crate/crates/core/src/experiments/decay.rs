//! Relative decay of the largest block Gaussian: the median of
//! `M^{1-δ} · max_{|n|∼M} |g_n|² / Σ_{|n|∼M} |g_n|²` over a dyadic grid of
//! block scales must decrease toward zero (max ∼ log k against sum ∼ k).
//! Blocks use the same both-signs convention as the tail test.

use crate::experiments::report::{ExperimentReport, Table};
use crate::rng;
use crate::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayConfig {
    /// Dyadic block scales, increasing.
    pub m_grid: Vec<usize>,
    /// Exponent δ ∈ (0, 1).
    pub delta: f64,
    pub samples: usize,
    pub seed: u64,
    /// Bound on the final median (only asserted when δ ≤ 0.5, where the
    /// analytic trend `log(2M)/(2√M)`-scale makes it meaningful).
    #[serde(default = "default_final_bound")]
    pub final_bound: f64,
}

fn default_final_bound() -> f64 {
    0.2
}

/// `M^{1-δ}·max/sum` for one draw of `k` block modes. With a single mode
/// the ratio degenerates to `M^{1-δ}` exactly.
pub fn decay_ratio<R: rand::Rng + ?Sized>(
    block_scale: usize,
    k: usize,
    delta: f64,
    rng_state: &mut R,
) -> f64 {
    let mut max = 0.0f64;
    let mut sum = 0.0f64;
    for _ in 0..k {
        let g = rng::standard_complex_gaussian(rng_state).norm_sqr();
        max = max.max(g);
        sum += g;
    }
    (block_scale as f64).powf(1.0 - delta) * max / sum
}

pub fn run(cfg: &DecayConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(crate::Error::InvalidSpec("delta must lie in (0,1)".into()));
    }
    let mut report = ExperimentReport::new("decay_ratio", cfg, cfg.seed);
    let mut medians = Vec::new();
    let mut rows = Vec::new();
    for (gi, &scale) in cfg.m_grid.iter().enumerate() {
        let k = 2 * scale;
        let mut ratios: Vec<f64> = (0..cfg.samples)
            .into_par_iter()
            .map(|i| {
                let sub = rng::derive_seed(cfg.seed, (gi * cfg.samples + i) as u64);
                let mut stream = rng::stream(sub);
                decay_ratio(scale, k, cfg.delta, &mut stream)
            })
            .collect();
        ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = ratios[ratios.len() / 2];
        rows.push(vec![scale as f64, median]);
        medians.push(median);
    }
    report.push_table(Table {
        name: "medians".into(),
        columns: vec!["block_scale".into(), "median_ratio".into()],
        rows,
    });
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    report.push_check(
        "medians_decreasing",
        decreasing,
        format!("medians along the grid: {medians:?}"),
    );
    if cfg.delta <= 0.5 {
        report.assert_cell(
            "final_median",
            *medians.last().expect("nonempty grid"),
            None,
            0.0,
            cfg.final_bound,
        );
    }
    report.wall_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

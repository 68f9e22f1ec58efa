//! Growth of the running sup of a Besov-type norm along the truncated KdV
//! flow. Invariance of `μ_N` makes the time marginals identical, so the
//! `(1-ε)`-quantile of `sup_{t≤T} ‖u(t)‖` should grow no faster than
//! `(log(T/ε))^{1/2}`; the verdict fits the exponent of the squared norm
//! against `log(T/ε)` and bounds it. The initial ensemble also feeds the
//! Fernique sub-test: Gaussian-type `e^{-c'K²}` norm tails.

use crate::dynamics::{evolve_visit, Equation, EvolutionConfig};
use crate::error::Error;
use crate::experiments::report::{gaussian_tail_fit, ExperimentReport, Table};
use crate::field::FourierField;
use crate::measures::{sample, MeasureSpec};
use crate::norms::{spatial_norm, NormSpec};
use crate::rng;
use crate::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub cutoff: usize,
    /// Increasing horizons; the flow is run once to the largest.
    pub t_grid: Vec<f64>,
    pub epsilon: f64,
    pub samples: usize,
    pub seed: u64,
    pub dt: f64,
    /// Besov-type norm indices (need `s·p < -1` for white-noise data).
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    /// Bound on the fitted exponent of the squared norm vs `log(T/ε)`.
    #[serde(default = "default_exponent_bound")]
    pub exponent_bound: f64,
}

fn default_s() -> f64 {
    -0.4
}

fn default_p() -> f64 {
    3.0
}

fn default_exponent_bound() -> f64 {
    1.5
}

pub fn run(cfg: &GrowthConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    if cfg.s * cfg.p >= -1.0 {
        return Err(Error::InvalidSpec(format!(
            "growth norm needs s*p < -1 to contain white noise (got {})",
            cfg.s * cfg.p
        )));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(Error::InvalidSpec("epsilon must lie in (0,1)".into()));
    }
    if cfg.t_grid.windows(2).any(|w| w[1] <= w[0]) || cfg.t_grid.is_empty() {
        return Err(Error::InvalidSpec("t_grid must be increasing".into()));
    }
    let norm_spec = NormSpec::besov_hat(cfg.s, cfg.p);
    let n = cfg.cutoff;
    let t_max = *cfg.t_grid.last().expect("nonempty");
    let evo = EvolutionConfig::new(Equation::Kdv, n, cfg.dt, t_max);
    evo.validate()?;
    let checkpoint_steps: Vec<usize> = cfg
        .t_grid
        .iter()
        .map(|&t| (t / cfg.dt).round() as usize)
        .collect();

    // per sample: norm of u0 and the running sup at each horizon
    let rows: Vec<Result<(f64, Vec<f64>)>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut stream = rng::stream(rng::derive_seed(cfg.seed, i as u64));
            let u0 = sample(&MeasureSpec::white(n, cfg.seed), &mut stream)?.field;
            let mut sups = vec![0.0f64; cfg.t_grid.len()];
            let mut running: f64 = 0.0;
            let mut norm0 = 0.0;
            let mut err: Option<Error> = None;
            evolve_visit(&u0, &evo, |step, coeffs| {
                if err.is_some() {
                    return;
                }
                let f = match FourierField::new(n, coeffs.to_vec()) {
                    Ok(f) => f,
                    Err(e) => {
                        err = Some(e);
                        return;
                    }
                };
                let v = match spatial_norm(&f, &norm_spec) {
                    Ok(v) => v,
                    Err(e) => {
                        err = Some(e);
                        return;
                    }
                };
                if step == 0 {
                    norm0 = v;
                }
                running = running.max(v);
                for (ci, &cs) in checkpoint_steps.iter().enumerate() {
                    if step == cs {
                        sups[ci] = running;
                    }
                }
            })
            .map_err(|e| match e {
                Error::BlowUp { time, .. } => Error::BlowUp { time, sample: i },
                other => other,
            })?;
            if let Some(e) = err {
                return Err(e);
            }
            Ok((norm0, sups))
        })
        .collect();

    let mut norms0 = Vec::with_capacity(cfg.samples);
    let mut sups: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.samples); cfg.t_grid.len()];
    for r in rows {
        let (n0, s) = r?;
        norms0.push(n0);
        for (ci, v) in s.into_iter().enumerate() {
            sups[ci].push(v);
        }
    }

    let mut report = ExperimentReport::new("growth_bound", cfg, cfg.seed);
    let q_idx = ((1.0 - cfg.epsilon) * cfg.samples as f64) as usize;
    let mut quantiles = Vec::new();
    let mut table_rows = Vec::new();
    for (ci, &t) in cfg.t_grid.iter().enumerate() {
        let mut v = sups[ci].clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q = v[q_idx.min(v.len() - 1)];
        quantiles.push(q);
        table_rows.push(vec![t, q]);
        report.info_cell(&format!("sup_quantile_T{t}"), q, None);
    }
    report.push_table(Table {
        name: "sup_quantiles".into(),
        columns: vec!["t".into(), "quantile".into()],
        rows: table_rows,
    });

    // slope of log(q²) against log(log(T/ε)); √log growth has slope ~1
    let exponent = if cfg.t_grid.len() >= 2 {
        let xs: Vec<f64> = cfg.t_grid.iter().map(|&t| (t / cfg.epsilon).ln().ln()).collect();
        let ys: Vec<f64> = quantiles.iter().map(|q| (q * q).ln()).collect();
        let xm = xs.iter().sum::<f64>() / xs.len() as f64;
        let ym = ys.iter().sum::<f64>() / ys.len() as f64;
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
        let den: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
        num / den
    } else {
        0.0
    };
    report.assert_cell("fitted_growth_exponent", exponent, None, 0.0, cfg.exponent_bound);

    // Fernique sub-test on the initial ensemble; the fit window keeps at
    // least ~100 samples beyond every grid point
    let s_min = (100.0 / cfg.samples as f64).clamp(1e-3, 0.25);
    let fit = gaussian_tail_fit(&norms0, s_min, 0.5, 12);
    report.push_check(
        "fernique_c_prime_positive",
        fit.c_prime > 0.0,
        format!("fitted log-survival = {:.3} - {:.4}·K²", fit.intercept, fit.c_prime),
    );
    report.push_check(
        "fernique_log_survival_concave",
        fit.max_second_diff <= 0.15,
        format!("max second difference {:.4} (noise band 0.15)", fit.max_second_diff),
    );

    report.wall_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::report::mean_and_se;

    #[test]
    fn single_step_matches_initial_quantile() {
        // T → one step: the sup quantile is the initial-data quantile
        let n = 12;
        let dt = 1e-3;
        let cfg = GrowthConfig {
            cutoff: n,
            t_grid: vec![dt],
            epsilon: 0.05,
            samples: 2000,
            seed: 50,
            dt,
            s: -0.4,
            p: 3.0,
            exponent_bound: 1.5,
        };
        let report = run(&cfg).unwrap();
        let q_sup = report
            .cells
            .iter()
            .find(|c| c.label.starts_with("sup_quantile"))
            .unwrap()
            .value;
        // initial-ensemble quantile via a fresh draw of the same seed
        let mut norms: Vec<f64> = (0..cfg.samples)
            .map(|i| {
                let mut stream = rng::stream(rng::derive_seed(cfg.seed, i as u64));
                let u0 = sample(&MeasureSpec::white(n, cfg.seed), &mut stream)
                    .unwrap()
                    .field;
                spatial_norm(&u0, &NormSpec::besov_hat(-0.4, 3.0)).unwrap()
            })
            .collect();
        norms.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q0 = norms[(0.95 * cfg.samples as f64) as usize];
        let (_, se) = mean_and_se(&norms);
        assert!(
            (q_sup - q0).abs() <= 0.05 * q0 + 10.0 * se,
            "sup quantile {q_sup} vs initial {q0}"
        );
    }

    #[test]
    fn growth_exponent_small_grid() {
        let cfg = GrowthConfig {
            cutoff: 8,
            t_grid: vec![0.5, 1.0, 2.0],
            epsilon: 0.01,
            samples: 400,
            seed: 3,
            dt: 2e-3,
            s: -0.4,
            p: 3.0,
            exponent_bound: 1.5,
        };
        let report = run(&cfg).unwrap();
        assert!(report.passed, "{}", report.summary());
    }

    #[test]
    fn rejects_bad_norm_indices() {
        let cfg = GrowthConfig {
            cutoff: 8,
            t_grid: vec![1.0],
            epsilon: 0.01,
            samples: 10,
            seed: 3,
            dt: 1e-3,
            s: -0.2,
            p: 3.0,
            exponent_bound: 1.5,
        };
        assert!(run(&cfg).is_err());
    }
}

//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with its measured values. Run with
//! `cargo test --test acceptance -- --nocapture`.
//!
//! Criteria 4 and 5(p=4) encode targets that the mathematics of the
//! truncated objects does not meet (see the assertion messages for the
//! quantitative reason); they are kept faithful to their stated form and
//! fail honestly rather than being loosened.

use kdvlab::dynamics::{evolve, evolve_skdv, stochastic_convolution, Equation, EvolutionConfig};
use kdvlab::experiments::report::{bonferroni_z, gaussian_tail_fit};
use kdvlab::experiments::{decay, growth, hyper, invariance, moments, tails, weak_convergence};
use kdvlab::field::{FourierField, KahanAcc, TestFunction};
use kdvlab::measures::{
    a_beta, char_functional, sample, sample_batch, write_batch_jsonl, MeasureSpec, QuadrupleTable,
};
use kdvlab::norms::{resonance3, resonance4};
use kdvlab::{rng, Error};
use num_complex::Complex64;

fn verdict(name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {name}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn c01_white_noise_characteristic_functional() {
    let start = std::time::Instant::now();
    let m = 50_000;
    let spec = MeasureSpec::white(64, 20_240_601);
    let samples = sample_batch(&spec, m).unwrap();
    let f = TestFunction::single_mode_with_l2_sq(1, 0.5);
    let est = char_functional(&samples, &f).unwrap();
    let target = (-0.25f64).exp();
    let dist = (est - Complex64::new(target, 0.0)).norm();
    let tol = 3.0 / (m as f64).sqrt();
    let wall = start.elapsed().as_secs_f64();
    verdict(
        "1 (white-noise characteristic functional)",
        dist <= tol && wall <= 60.0,
        &format!("|{est:.5} - {target:.5}| = {dist:.5} vs 3/sqrt(M) = {tol:.5}, wall {wall:.1}s"),
    );
    assert!(dist <= tol, "distance {dist} exceeds {tol}");
    assert!(wall <= 60.0, "runtime {wall}s exceeds 60s");
}

fn invariance_criterion(equation: Equation, label: &str) {
    let start = std::time::Instant::now();
    let cfg = invariance::InvarianceConfig {
        equation,
        cutoff: 16,
        t_final: 1.0,
        dt: 1e-3,
        samples: 20_000,
        seed: 271_828,
        test_modes: vec![1, 2, 3, 4, 5],
        f_l2_sq: 0.5,
        substeps: None,
        linear_only: false,
        drift_tolerance: 1e-8,
    };
    let report = invariance::run(&cfg).unwrap();
    let wall = start.elapsed().as_secs_f64();
    verdict(
        &format!("2 ({label} invariance)"),
        report.passed && wall <= 600.0,
        &format!("all moment/char cells within Bonferroni 3σ bands, wall {wall:.0}s"),
    );
    assert!(report.passed, "{}", report.summary());
    assert!(wall <= 600.0, "runtime {wall}s exceeds 600s");
}

#[test]
fn c02_invariance_kdv() {
    invariance_criterion(Equation::Kdv, "kdv");
}

#[test]
fn c02_invariance_mkdv_defocusing() {
    invariance_criterion(Equation::MkdvDefocusing, "mkdv defocusing");
}

#[test]
fn c03_wick_moment_scalings() {
    let cfg = moments::MomentConfig {
        beta_grid: vec![1e-2, 1e-3],
        cutoff: 1000,
        samples: 100_000,
        seed: 314_159,
        levels: vec![2.0, 4.0, 8.0],
        variance_tolerance: 0.05,
        scaling_tolerance: 0.10,
        quartic_bound: 300.0,
    };
    let report = moments::run(&cfg).unwrap();
    verdict(
        "3 (Wick moment scalings)",
        report.passed,
        "E(∫:u²:)² within 5% of 2Σ_{0<|n|≤N}(1+βn²)^{-2}; √β scaling within 10% of π; β^{3/2}·E(∫:u⁴:)² bounded",
    );
    assert!(report.passed, "{}", report.summary());
}

#[test]
fn c04_a_beta_asymptotic_at_pinned_truncation() {
    let beta: f64 = 1e-6;
    let n = (10.0 / beta.sqrt()) as usize; // 10^7
    let v = beta.sqrt() * a_beta(beta, n);
    let rel = (v / std::f64::consts::PI - 1.0).abs();
    verdict(
        "4 (a_beta asymptotic, N = 10·beta^-1/2)",
        rel <= 0.02,
        &format!(
            "sqrt(beta)·a_beta = {v:.5} vs pi, rel err {rel:.4}; the truncated Riemann sum reaches \
             2·atan(10)/pi = {:.4} of the limit, so 2% needs sqrt(beta)·N ≥ 63.7",
            2.0 * 10f64.atan() / std::f64::consts::PI
        ),
    );
    assert!(
        rel <= 0.02,
        "sqrt(beta)·a_beta(1e-6, 1e7) = {v:.5} is {rel:.4} away from pi: the x = sqrt(beta)·n \
         Riemann sum truncated at x_max = 10 equals 2·atan(10)/pi = 0.9366 of the limit, a 6.3% \
         deficit; the asymptotic itself holds (see c04_supplement)"
    );
}

#[test]
fn c04_supplement_a_beta_asymptotic_adequate_truncation() {
    // the same check with the truncation actually matching the tolerance
    let beta: f64 = 1e-6;
    let n = (64.0 / beta.sqrt()) as usize;
    let v = beta.sqrt() * a_beta(beta, n);
    let rel = (v / std::f64::consts::PI - 1.0).abs();
    verdict(
        "4-supplement (a_beta asymptotic, N = 64·beta^-1/2)",
        rel <= 0.02,
        &format!("sqrt(beta)·a_beta = {v:.5}, rel err {rel:.4}"),
    );
    assert!(rel <= 0.02, "rel err {rel}");
}

fn weak_convergence_criterion(p: u32) -> kdvlab::experiments::report::ExperimentReport {
    let cfg = weak_convergence::WeakConvergenceConfig {
        p,
        beta_grid: vec![1e-1, 1e-2, 1e-3, 1e-4],
        k: 10.0,
        samples: 100_000,
        seed: 161_803,
        test_modes: vec![1, 2],
        f_l2_sq: 0.5,
        final_tolerance: 0.05,
        batches: 100,
    };
    weak_convergence::run(&cfg).unwrap()
}

#[test]
fn c05_weak_convergence_p3() {
    let start = std::time::Instant::now();
    let report = weak_convergence_criterion(3);
    let wall = start.elapsed().as_secs_f64();
    verdict(
        "5 (weak convergence, p = 3)",
        report.passed && wall <= 900.0,
        &format!("distances decrease to ≤ 0.05 under the cubic tilt, wall {wall:.0}s"),
    );
    assert!(report.passed, "{}", report.summary());
    assert!(wall <= 900.0);
}

#[test]
fn c05_weak_convergence_p4() {
    let report = weak_convergence_criterion(4);
    let ess: Vec<f64> = report
        .cells
        .iter()
        .filter(|c| c.label.starts_with("ess"))
        .map(|c| c.value)
        .collect();
    verdict(
        "5 (weak convergence, p = 4)",
        report.passed,
        &format!(
            "importance sampling against mu_beta carries effective sample sizes {ess:?} out of 1e5: \
             the quartic tilt exp(6βa_β∫u²) is Gaussian-integrable only for 12βa_β < 1+β, \
             i.e. β ≲ 7e-4, so most of the grid cannot be represented from the Gaussian proposal"
        ),
    );
    assert!(
        report.passed,
        "p = 4 weak-convergence criterion failed as analyzed: {}",
        report.summary()
    );
}

#[test]
fn c06_large_deviation_tails() {
    let cfg = tails::TailConfig {
        block_scale: 16,
        samples: 100_000,
        seed: 602_214,
        r_grid: None,
        confidence: 0.99,
    };
    let report = tails::run(&cfg).unwrap();
    verdict(
        "6 (large-deviation tails)",
        report.passed,
        "empirical survival within the 99% DKW band of the exact Gamma(32,1); near-unit survival at R = sqrt(M)",
    );
    assert!(report.passed, "{}", report.summary());
}

#[test]
fn c07_hypercontractive_chaos_bound() {
    let cfg = hyper::HyperConfig {
        beta_grid: vec![1e-1, 1e-2, 1e-3],
        cutoff: 32,
        q_list: vec![2, 4, 6, 8],
        samples: 30_000,
        seed: 137_036,
        ratio_bound: 4.0,
        l2_tolerance: 0.10,
    };
    let report = hyper::run(&cfg).unwrap();
    verdict(
        "7 (hypercontractive chaos bound)",
        report.passed,
        "all ‖Q‖_q/(q²β^{1/4}) under the pinned grid-uniform constant 4.0; q=2 within 10% of the enumeration oracle",
    );
    assert!(report.passed, "{}", report.summary());
}

#[test]
fn c08_stochastic_convolution() {
    let n = 16;
    let paths = 10_000;
    let sigma = 1.0;
    let t_final = 1.0;
    let mut cfg = EvolutionConfig::new(Equation::Skdv, n, 0.01, t_final);
    cfg.noise_amplitude = sigma;
    let mut second = vec![KahanAcc::default(); n];
    for p in 0..paths {
        cfg.seed = rng::derive_seed(888, p);
        let traj = stochastic_convolution(&cfg).unwrap();
        for (i, c) in traj.last().coeffs().iter().enumerate() {
            second[i].add(c.norm_sqr());
        }
    }
    // E|Φ̂(n,T)|² = σ²T with Var|Φ̂|² = (σ²T)², familywise 3σ across modes
    let z = bonferroni_z(n);
    let tol = z * sigma * sigma * t_final / (paths as f64).sqrt();
    let mut worst = 0.0f64;
    for s in &second {
        worst = worst.max((s.sum() / paths as f64 - sigma * sigma * t_final).abs());
    }

    // σ = 0 path bit-identical to the deterministic flow
    let mut r = rng::stream(5);
    let u0 = sample(&MeasureSpec::white(n, 5), &mut r).unwrap().field;
    let mut scfg = EvolutionConfig::new(Equation::Skdv, n, 1e-3, 0.05);
    scfg.noise_amplitude = 0.0;
    let a = evolve_skdv(&u0, &scfg).unwrap();
    let mut dcfg = scfg.clone();
    dcfg.equation = Equation::Kdv;
    let b = evolve(&u0, &dcfg).unwrap();
    let bit_identical = serde_json::to_string(&a.fields).unwrap()
        == serde_json::to_string(&b.fields).unwrap();

    verdict(
        "8 (stochastic convolution)",
        worst <= tol && bit_identical,
        &format!("max |E|Φ̂(n,T)|² - σ²T| = {worst:.5} vs {tol:.5}; σ=0 path bit-identical: {bit_identical}"),
    );
    assert!(worst <= tol, "variance deviation {worst} vs {tol}");
    assert!(bit_identical);
}

#[test]
fn c09_fernique_tail() {
    let n = 256;
    let m = 100_000;
    let spec = MeasureSpec::white(n, 789_123);
    let norm_spec = kdvlab::norms::NormSpec::besov_hat(-0.4, 3.0); // s·p = -1.2 < -1
    let norms: Vec<f64> = (0..m)
        .map(|i| {
            let mut stream = rng::stream(rng::derive_seed(spec.seed, i as u64));
            let u = sample(&spec, &mut stream).unwrap().field;
            kdvlab::norms::spatial_norm(&u, &norm_spec).unwrap()
        })
        .collect();
    let fit = gaussian_tail_fit(&norms, 1e-3, 0.5, 12);
    let pass = fit.c_prime > 0.0 && fit.max_second_diff <= 0.15;
    verdict(
        "9 (Fernique tail)",
        pass,
        &format!(
            "log-survival fit = {:.3} - {:.3}·K² (c' > 0), max second difference {:.4} ≤ 0.15",
            fit.intercept, fit.c_prime, fit.max_second_diff
        ),
    );
    assert!(fit.c_prime > 0.0, "c' = {}", fit.c_prime);
    assert!(
        fit.max_second_diff <= 0.15,
        "log-survival not concave within the noise band: {}",
        fit.max_second_diff
    );
}

#[test]
fn c10_linear_flow_invariance_exact() {
    for eq in [Equation::Kdv, Equation::MkdvFocusing, Equation::MkdvDefocusing] {
        let cfg = invariance::InvarianceConfig {
            equation: eq,
            cutoff: 24,
            t_final: 1.0,
            dt: 0.05,
            samples: 5_000,
            seed: 424_242,
            test_modes: vec![1, 2, 3],
            f_l2_sq: 0.5,
            substeps: None,
            linear_only: true,
            drift_tolerance: 1e-12,
        };
        let report = invariance::run(&cfg).unwrap();
        assert!(report.passed, "{eq:?}: {}", report.summary());
    }
    verdict(
        "10a (linear-flow invariance)",
        true,
        "unitary free flow preserves the Gaussian law for every equation",
    );
}

#[test]
fn c10_resonance_identities_exhaustive() {
    for n1 in -1000i64..=1000 {
        let c1 = n1 * n1 * n1;
        for n2 in -1000i64..=1000 {
            let n = n1 + n2;
            if n * n * n - c1 - n2 * n2 * n2 != resonance3(n1, n2) {
                panic!("resonance3 mismatch at ({n1}, {n2})");
            }
        }
    }
    // the quartic identity is symmetric in (n2, n3, n4); sorted triples
    // cover every value combination
    for a in -1000i64..=1000 {
        let a3 = a * a * a;
        for b in a..=1000 {
            let b3 = b * b * b;
            let ab = a + b;
            for c in b..=1000 {
                let n = ab + c;
                if n * n * n - a3 - b3 - c * c * c != resonance4(a, b, c) {
                    panic!("resonance4 mismatch at ({a}, {b}, {c})");
                }
            }
        }
    }
    verdict(
        "10b (resonance identities)",
        true,
        "cubic and quartic factorizations exact for all |n_i| ≤ 1000",
    );
}

#[test]
fn c10_determinism_byte_exact() {
    let spec = MeasureSpec::rho_beta(3, 0.05, 10.0, 32, 777);
    let mut buf_a = Vec::new();
    let mut buf_b = Vec::new();
    write_batch_jsonl(&mut buf_a, &spec, &sample_batch(&spec, 500).unwrap()).unwrap();
    write_batch_jsonl(&mut buf_b, &spec, &sample_batch(&spec, 500).unwrap()).unwrap();
    assert_eq!(buf_a, buf_b, "sample batches must be byte-identical");

    let cfg = invariance::InvarianceConfig {
        equation: Equation::Kdv,
        cutoff: 8,
        t_final: 0.2,
        dt: 2e-3,
        samples: 300,
        seed: 12,
        test_modes: vec![1, 2],
        f_l2_sq: 0.5,
        substeps: None,
        linear_only: false,
        drift_tolerance: 1e-8,
    };
    let ra = invariance::run(&cfg).unwrap().canonical_json();
    let rb = invariance::run(&cfg).unwrap().canonical_json();
    assert_eq!(ra, rb, "experiment reports must be bit-identical");
    verdict(
        "10c (determinism)",
        true,
        "sample batches and experiment reports byte-identical across re-runs",
    );
}

#[test]
fn c10_dealiasing_agreement() {
    let mut r = rng::stream(31_337);
    for _ in 0..8 {
        use rand::Rng;
        let n = r.gen_range(2..=64);
        let u = sample(&MeasureSpec::white(n, r.gen()), &mut r).unwrap().field;
        for p in [2u32, 3, 4] {
            let quad = u.integral_power(p).unwrap();
            let conv = u.integral_power_convolution(p).unwrap();
            let scale = quad.abs().max(conv.abs()).max(1e-30);
            assert!(
                (quad - conv).abs() / scale <= 1e-10,
                "p={p} N={n}: {quad} vs {conv}"
            );
        }
    }
    verdict(
        "10d (dealiasing)",
        true,
        "padded-quadrature and convolution functionals agree to 1e-10 for N ≤ 64, p ≤ 4",
    );
}

// supporting sanity checks kept alongside the numbered criteria

#[test]
fn quadruple_table_matches_small_census() {
    assert!(QuadrupleTable::new(2).is_empty());
    assert!(QuadrupleTable::new(3).is_empty());
    assert_eq!(QuadrupleTable::new(4).len(), 2);
}

#[test]
fn decay_ratio_trend() {
    let cfg = decay::DecayConfig {
        m_grid: vec![16, 64, 256, 1024, 4096],
        delta: 0.5,
        samples: 20_000,
        seed: 246_810,
        final_bound: 0.2,
    };
    let report = decay::run(&cfg).unwrap();
    assert!(report.passed, "{}", report.summary());
}

#[test]
fn growth_bound_quantile_slope() {
    let cfg = growth::GrowthConfig {
        cutoff: 16,
        t_grid: vec![1.0, 2.0, 4.0, 8.0],
        epsilon: 0.01,
        samples: 2_000,
        seed: 97_531,
        dt: 1e-3,
        s: -0.4,
        p: 3.0,
        exponent_bound: 1.5,
    };
    let report = growth::run(&cfg).unwrap();
    assert!(report.passed, "{}", report.summary());
}

#[test]
fn blow_up_error_names_the_sample() {
    let n = 16;
    let u0 = FourierField::new(n, vec![Complex64::new(80.0, 0.0); n]).unwrap();
    let mut cfg = EvolutionConfig::new(Equation::MkdvFocusing, n, 6e-4, 0.6);
    cfg.project_l2 = Some(false);
    match evolve(&u0, &cfg) {
        Err(Error::BlowUp { .. }) => {}
        other => panic!("expected abort, got {other:?}"),
    }
}

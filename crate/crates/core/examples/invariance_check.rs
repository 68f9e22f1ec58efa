//! Desk-scale version of the invariance experiment: the truncated white
//! noise is exactly invariant under the truncated KdV flow, so every
//! discrepancy must sit inside its Monte Carlo band.

use kdvlab::dynamics::Equation;
use kdvlab::experiments::invariance::{run, InvarianceConfig};

fn main() {
    let cfg = InvarianceConfig {
        equation: Equation::Kdv,
        cutoff: 16,
        t_final: 1.0,
        dt: 1e-3,
        samples: 2_000,
        seed: 11,
        test_modes: vec![1, 2, 3],
        f_l2_sq: 0.5,
        substeps: None,
        linear_only: false,
        drift_tolerance: 1e-8,
    };
    let report = run(&cfg).unwrap();
    print!("{}", report.summary());
    println!("wall: {:.1}s", report.wall_secs);
}

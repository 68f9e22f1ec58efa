//! Monte Carlo experiment harness turning the measure/flow machinery into
//! statistical pass/fail reports.
//!
//! Every experiment takes a serializable config carrying an explicit master
//! seed, spreads work over samples with derived per-sample streams, reduces
//! in fixed index order with compensated sums, and emits an
//! [`report::ExperimentReport`] that is bit-identical across re-runs
//! (timing aside). Verdict thresholds are always stated in the report.

pub mod decay;
pub mod growth;
pub mod hyper;
pub mod invariance;
pub mod moments;
pub mod report;
pub mod tails;
pub mod weak_convergence;

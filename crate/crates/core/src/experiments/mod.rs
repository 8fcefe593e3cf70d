//! Reproducibility harness: algebra cross-checks, convergence studies, regime sweeps and a
//! Markdown report.

mod algebra;
mod convergence;
mod report;
mod sweep;

pub use algebra::{algebra_check, AlgebraCase, AlgebraReport, Fault};
pub use convergence::{convergence_run, probe_times, ConvergenceConfig, ConvergenceRow, ConvergenceStudy};
pub use report::{markdown_report, ReportInput};
pub use sweep::{bracket, monotonicity, regime_sweep, sweep_grid, MonotoneSummary, SweepPoint, SweepRow};

//! Batch experiments over `(h, eps)` for the zswkb solvers: configuration,
//! sweeps, cross-method comparison and CSV/JSON output.

pub mod config;
pub mod experiments;
pub mod table;

pub use config::ExperimentConfig;
pub use experiments::{
    direct_cell, load_comparison, loglog_slope, match_nearest, run_compare, run_direct, run_pt_sweep, run_stokes,
    run_wkb, Comparison, ComparisonRow, PtRow, RunOutput, StokesFile,
};
pub use table::Table;

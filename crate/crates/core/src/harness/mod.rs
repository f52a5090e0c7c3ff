//! Problem presets, study drivers and report output behind the command-line tool.

pub mod config;
pub mod output;
pub mod problem;
pub mod study;

pub use config::{Config, Degrees, ParamsSpec, RobustnessSpec, SolverMethod, SolverSpec};
pub use problem::{check_interface_conditions, FormulaName, Manufactured, RhsSpec};
pub use study::{
    fit_loglog, offset_grid, run_condnum_study, run_convergence, run_cut_robustness, run_solve,
    solve_one, RobustnessSummary, RowOptions, Slopes, Solved, StudyKind, StudyReport, StudyRow,
};

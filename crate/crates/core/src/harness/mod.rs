//! Parameter sweeps over analytic and simulated quantities, CSV output and
//! the reference figures.

mod figures;
mod format;
mod sweep;

pub use figures::{
    figure1, figure3, figure4, FigureOptions, FigureOutput, FIG1_DEFAULT_TRIALS, FIG4_THETAS,
};
pub use format::fmt_sig;
pub use sweep::{
    linear_grid, log_grid, run_sweep, Column, MacChoice, SweepResult, SweepRow, SweepSpec,
    SweepVariable, CSV_DIGITS,
};

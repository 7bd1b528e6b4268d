//! Normality testing and the p-value grid over walk variances.

pub mod grid;
pub mod normality;

pub use grid::{
    pvalue_grid, Averaging, GridCell, GridSpec, PValueGrid, DEFAULT_SIGMAS, NEGLOG_THRESHOLD,
};
pub use normality::{
    anderson_darling, lilliefors, normality_pvalue, run_test, NormalityTest, TestResult, P_FLOOR,
};

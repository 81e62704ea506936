//! Hypothesis tests relating behavior types, engagement groups and model
//! quality, with the distribution tails they need.

mod hypothesis;
pub mod special;

pub use hypothesis::{
    bonferroni, chi_square_independence, one_way_anova, t_test, ContingencyTable, TTestMode, TestKind, TestResult,
};
pub use special::{chi2_sf, f_sf, ln_gamma, reg_beta, reg_gamma_p, reg_gamma_q, t_sf_two_tailed};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("contingency table has an all-zero row or column")]
    ZeroExpected,
    #[error("invalid contingency table: {0}")]
    InvalidTable(String),
    #[error("within-group variance is zero")]
    DegenerateVariance,
    #[error("each sample needs at least {need} values")]
    TooFewValues { need: usize },
    #[error("{0}")]
    Domain(String),
    #[error("{0} did not converge")]
    NumericalFailure(&'static str),
}

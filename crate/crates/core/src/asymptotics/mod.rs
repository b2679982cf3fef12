//! Asymptotic theory: derivative functionals, integrated constants, leading
//! bias/variance/MISE terms, optimal orders and the pointwise normal limit.

mod constants;
mod density;
mod theory;

pub use constants::{c3, lambda1, lambda2, lambda_table, LambdaEntry, TheoryConstants};
pub use density::{delta1, delta2, psi, FiniteDifference, TrueDensity};
pub use theory::{
    clt_prediction, optimal_mise, optimal_order, optimal_order_continuous, pointwise_theory,
    theoretical_mise, CltPrediction, Method, PointwiseTheory, Regime, Tuning,
};

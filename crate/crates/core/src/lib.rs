//! Bernstein-polynomial density estimation on the unit interval.
//!
//! The centerpiece is a recursive estimator driven by a Robbins–Monro
//! recursion `f_n = (1 - γ_n) f_{n-1} + γ_n Z_n`, where `Z_n` is a
//! bias-corrected Bernstein kernel centred on the newest observation.
//! Around it sit the batch Bernstein estimators it is usually compared
//! with (Vitale, Leblanc, the generalized additive correction and the
//! multiplicative/normalized corrections), the leading-term asymptotic
//! theory for all of them, least-squares cross-validation for picking
//! orders, support transforms and a seeded Monte Carlo harness.

pub mod asymptotics;
pub mod basis;
pub mod error;
pub mod estimators;
pub mod quadrature;
pub mod sample;
pub mod schedules;
pub mod selection;
pub mod simulate;
pub mod transforms;

pub use error::{Error, Result};
pub use sample::Sample;

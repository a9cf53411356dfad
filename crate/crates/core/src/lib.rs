//! Ratio-type estimators of a population proportion `P` that borrow strength
//! from a quantitative auxiliary variable `x` under simple random sampling
//! without replacement.
//!
//! The crate provides
//! - [`population`]: finite populations and the summary statistics (`P`, `X̄`,
//!   `C_p`, `C_x`, point-biserial `ρ_pb`) every formula depends on;
//! - [`estimators`]: the usual, ratio (`t1`), general `H(p, u)` (`t2`),
//!   ratio-exponential (`t3`) and regression estimators;
//! - [`moments`]: first-order bias/MSE, optimal constants, minimum MSE and
//!   percent relative efficiency;
//! - [`sampling`]: SRSWOR draws, seeded Monte Carlo, exact enumeration of all
//!   samples and a synthetic population generator.
//!
//! All math is generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases
//! below are what most callers want.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod moments;
pub mod population;
pub mod sampling;
mod scalar;
pub mod sum;

pub use error::{Error, Result};
pub use estimators::{EstimatorSpec, T2Family, T2Instance, T3Params};
pub use moments::{DesignMoments, MseComponents, OptimalQ, OptimalT3, T3Coefficients};
pub use population::{
    Population, PopulationSummary, PopulationUnit, SampleDeviation, SampleSummary,
};
pub use scalar::Scalar;

pub type Population64 = Population<f64>;
pub type PopulationUnit64 = PopulationUnit<f64>;
pub type PopulationSummary64 = PopulationSummary<f64>;
pub type SampleSummary64 = SampleSummary<f64>;
pub type DesignMoments64 = DesignMoments<f64>;
pub type EstimatorSpec64 = EstimatorSpec<f64>;
pub type T2Instance64 = T2Instance<f64>;
pub type T3Params64 = T3Params<f64>;
pub type MseComponents64 = MseComponents<f64>;

pub type Population32 = Population<f32>;
pub type PopulationSummary32 = PopulationSummary<f32>;
pub type DesignMoments32 = DesignMoments<f32>;
pub type EstimatorSpec32 = EstimatorSpec<f32>;

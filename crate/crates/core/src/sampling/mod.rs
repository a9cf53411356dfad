//! SRSWOR draws, seeded Monte Carlo studies, exact enumeration over all
//! `C(N, n)` samples and synthetic populations with a target `ρ_pb`.

mod enumerate;
mod montecarlo;
mod srswor;
mod synthetic;

pub use enumerate::{
    binomial, enumerate_exact, DeviationMoments, ExactReport, ExactRow, DEFAULT_ENUMERATION_LIMIT,
};
pub use montecarlo::{monte_carlo, EmpiricalReport, EmpiricalRow, MonteCarloConfig};
pub use srswor::{draw_srswor, draw_srswor_indices, replicate_rng};
pub use synthetic::{generate_population, SyntheticSpec, XModel};

use crate::error::{Error, Result};

pub(crate) fn check_design(n: usize, population: usize) -> Result<()> {
    if n == 0 || n > population {
        return Err(Error::InvalidDesign { n, population });
    }
    Ok(())
}

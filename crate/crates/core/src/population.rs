//! Finite populations, samples and the summary statistics every formula consumes.
//!
//! Population variances and the covariance use the `N - 1` divisor. All sums go
//! through [`CompensatedSum`] so summaries do not depend on unit order beyond
//! the last couple of ulps.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::sum::{compensated_sum, CompensatedSum};
use crate::Scalar;

/// One population unit: binary attribute plus auxiliary measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationUnit<T> {
    attribute: bool,
    pub x: T,
}

impl<T: Scalar> PopulationUnit<T> {
    /// `phi` must be 0 or 1 and `x` finite.
    pub fn new(phi: u8, x: T) -> Result<Self> {
        if phi > 1 {
            return Err(Error::InvalidUnit(format!("phi must be 0 or 1, got {phi}")));
        }
        if !x.is_finite() {
            return Err(Error::InvalidUnit(format!("x must be finite, got {x}")));
        }
        Ok(Self {
            attribute: phi == 1,
            x,
        })
    }

    #[inline]
    pub fn has_attribute(&self) -> bool {
        self.attribute
    }

    #[inline]
    pub fn phi(&self) -> u8 {
        u8::from(self.attribute)
    }

    #[inline]
    pub fn phi_value(&self) -> T {
        if self.attribute {
            T::one()
        } else {
            T::zero()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population<T> {
    units: Vec<PopulationUnit<T>>,
}

impl<T: Scalar> Population<T> {
    pub fn new(units: Vec<PopulationUnit<T>>) -> Result<Self> {
        if units.len() < 2 {
            return Err(Error::EmptyPopulation(units.len()));
        }
        Ok(Self { units })
    }

    /// Builds a population from parallel `phi`/`x` slices.
    pub fn from_pairs(phi: &[u8], x: &[T]) -> Result<Self> {
        if phi.len() != x.len() {
            return Err(Error::InvalidUnit(format!(
                "phi has {} values but x has {}",
                phi.len(),
                x.len()
            )));
        }
        let units = phi
            .iter()
            .zip(x)
            .map(|(&p, &v)| PopulationUnit::new(p, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(units)
    }

    #[inline]
    pub fn units(&self) -> &[PopulationUnit<T>] {
        &self.units
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.units.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.units.iter().filter(|u| u.attribute).count()
    }

    /// True iff the attribute is neither absent nor universal and the auxiliary
    /// values are not all equal.
    pub fn is_nondegenerate(&self) -> bool {
        let count = self.attribute_count();
        let first = self.units[0].x;
        count > 0 && count < self.size() && self.units.iter().any(|u| u.x != first)
    }
}

/// Population parameters `P`, `X̄`, `S_φ²`, `S_x²`, `S_φx`, `ρ_pb`, `C_p`, `C_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationSummary<T> {
    pub size: usize,
    pub p: T,
    pub x_bar: T,
    pub s_p_sq: T,
    pub s_x_sq: T,
    pub s_phix: T,
    pub rho_pb: T,
    pub c_p: T,
    pub c_x: T,
}

impl<T: Scalar> PopulationSummary<T> {
    /// Reconstructs a summary from published moments (`P`, `X̄`, `ρ_pb`, `C_p`, `C_x`).
    ///
    /// The variances are recovered as `(C·mean)²`, so the binary identity
    /// `S_φ² = N·P(1−P)/(N−1)` only holds as well as the inputs were rounded.
    pub fn from_moments(size: usize, p: T, x_bar: T, rho_pb: T, c_p: T, c_x: T) -> Self {
        let s_p = c_p * p;
        let s_x = c_x * x_bar.abs();
        Self {
            size,
            p,
            x_bar,
            s_p_sq: s_p * s_p,
            s_x_sq: s_x * s_x,
            s_phix: rho_pb * s_p * s_x,
            rho_pb,
            c_p,
            c_x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary<T> {
    pub p: T,
    pub x_bar: T,
    pub n: usize,
}

impl<T: Scalar> SampleSummary<T> {
    pub fn new(p: T, x_bar: T, n: usize) -> Self {
        Self { p, x_bar, n }
    }
}

/// Relative deviations `e_φ = (p−P)/P` and `e_x = (x̄−X̄)/X̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleDeviation<T> {
    pub e_phi: T,
    pub e_x: T,
}

pub fn summarize_population<T: Scalar>(pop: &Population<T>) -> Result<PopulationSummary<T>> {
    let size = pop.size();
    if size < 2 {
        return Err(Error::EmptyPopulation(size));
    }
    let count = pop.attribute_count();
    if count == 0 || count == size {
        return Err(Error::DegeneratePopulation(
            "attribute is constant, S_phi is zero",
        ));
    }
    let units = pop.units();
    if units.iter().all(|u| u.x == units[0].x) {
        return Err(Error::DegeneratePopulation(
            "auxiliary values are all equal, S_x is zero",
        ));
    }

    let n_t = T::from_count(size);
    let dof = T::from_count(size - 1);
    let p = T::from_count(count) / n_t;
    let x_bar = compensated_sum(units.iter().map(|u| u.x)) / n_t;

    let mut s_p = CompensatedSum::new();
    let mut s_x = CompensatedSum::new();
    let mut s_px = CompensatedSum::new();
    for u in units {
        let dp = u.phi_value() - p;
        let dx = u.x - x_bar;
        s_p.add(dp * dp);
        s_x.add(dx * dx);
        s_px.add(dp * dx);
    }
    let s_p_sq = s_p.value() / dof;
    let s_x_sq = s_x.value() / dof;
    let s_phix = s_px.value() / dof;

    if s_x_sq <= T::zero() || x_bar == T::zero() {
        return Err(Error::DegeneratePopulation(
            "auxiliary mean or variance is zero",
        ));
    }

    let s_p_sd = s_p_sq.sqrt();
    let s_x_sd = s_x_sq.sqrt();
    // Rounding can push |ρ| a hair past 1 for exactly collinear data.
    let rho_pb = (s_phix / (s_p_sd * s_x_sd)).max(-T::one()).min(T::one());

    Ok(PopulationSummary {
        size,
        p,
        x_bar,
        s_p_sq,
        s_x_sq,
        s_phix,
        rho_pb,
        c_p: s_p_sd / p,
        c_x: s_x_sd / x_bar.abs(),
    })
}

pub fn summarize_sample<T: Scalar>(units: &[PopulationUnit<T>]) -> Result<SampleSummary<T>> {
    if units.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = units.len();
    let n_t = T::from_count(n);
    let count = units.iter().filter(|u| u.has_attribute()).count();
    Ok(SampleSummary {
        p: T::from_count(count) / n_t,
        x_bar: compensated_sum(units.iter().map(|u| u.x)) / n_t,
        n,
    })
}

/// Finite-population factor `1/n − 1/N` as an exact rational.
pub fn fpc_ratio(n: usize, population: usize) -> Result<Ratio<u64>> {
    if n == 0 || n > population {
        return Err(Error::InvalidDesign { n, population });
    }
    let (n, big_n) = (n as u64, population as u64);
    Ok(Ratio::new(big_n - n, n * big_n))
}

/// Finite-population factor `f = 1/n − 1/N`, rounded once from the exact value.
pub fn fpc<T: Scalar>(n: usize, population: usize) -> Result<T> {
    let r = fpc_ratio(n, population)?;
    Ok(T::lit(*r.numer() as f64) / T::lit(*r.denom() as f64))
}

pub fn sample_deviation<T: Scalar>(
    sample: &SampleSummary<T>,
    pop: &PopulationSummary<T>,
) -> Result<SampleDeviation<T>> {
    if pop.p == T::zero() {
        return Err(Error::UndefinedDeviation("population proportion is zero"));
    }
    if pop.x_bar == T::zero() {
        return Err(Error::UndefinedDeviation(
            "population auxiliary mean is zero",
        ));
    }
    Ok(SampleDeviation {
        e_phi: (sample.p - pop.p) / pop.p,
        e_x: (sample.x_bar - pop.x_bar) / pop.x_bar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn four_unit_summary() {
        let pop = Population::from_pairs(&[1, 0, 1, 0], &[2.0, 1.0, 2.0, 1.0]).unwrap();
        let s = summarize_population(&pop).unwrap();
        assert_eq!(s.p, 0.5);
        assert_eq!(s.x_bar, 1.5);
        assert!(close(s.s_p_sq, 1.0 / 3.0, 1e-15));
        assert!(close(s.s_x_sq, 1.0 / 3.0, 1e-15));
        assert!(close(s.s_phix, 1.0 / 3.0, 1e-15));
        assert!(close(s.rho_pb, 1.0, 1e-15));
        assert!(close(s.c_p * s.c_p, 4.0 / 3.0, 1e-14));
        assert!(close(s.c_x * s.c_x, 4.0 / 27.0, 1e-14));
    }

    #[test]
    fn two_point_population_has_unit_correlation() {
        let pop = Population::from_pairs(&[1, 0], &[3.0, 1.0]).unwrap();
        let s = summarize_population(&pop).unwrap();
        assert_eq!(s.p, 0.5);
        assert!(close(s.rho_pb, 1.0, 1e-15));
    }

    #[test]
    fn degenerate_populations_rejected() {
        let pop = Population::from_pairs(&[1, 1, 1, 1], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(
            summarize_population(&pop),
            Err(Error::DegeneratePopulation(_))
        ));
        let pop = Population::from_pairs(&[1, 0, 1], &[2.0, 2.0, 2.0]).unwrap();
        assert!(!pop.is_nondegenerate());
        assert!(matches!(
            summarize_population(&pop),
            Err(Error::DegeneratePopulation(_))
        ));
        assert_eq!(
            Population::<f64>::from_pairs(&[1], &[1.0]),
            Err(Error::EmptyPopulation(1))
        );
    }

    #[test]
    fn invalid_units_rejected() {
        assert!(PopulationUnit::new(2, 1.0).is_err());
        assert!(PopulationUnit::new(1, f64::NAN).is_err());
        assert!(PopulationUnit::new(0, f64::INFINITY).is_err());
    }

    #[test]
    fn sample_summaries() {
        let units: Vec<_> = [(1, 2.0), (0, 4.0), (1, 6.0)]
            .iter()
            .map(|&(p, x)| PopulationUnit::new(p, x).unwrap())
            .collect();
        let s = summarize_sample(&units).unwrap();
        assert!(close(s.p, 2.0 / 3.0, 1e-15));
        assert_eq!(s.x_bar, 4.0);
        assert_eq!(s.n, 3);

        let s = summarize_sample(&[PopulationUnit::new(0, 5.0).unwrap()]).unwrap();
        assert_eq!((s.p, s.x_bar, s.n), (0.0, 5.0, 1));

        let one = PopulationUnit::new(1, 1.0).unwrap();
        let s = summarize_sample(&[one, one]).unwrap();
        assert_eq!((s.p, s.x_bar), (1.0, 1.0));

        assert_eq!(summarize_sample::<f64>(&[]), Err(Error::EmptySample));
    }

    #[test]
    fn finite_population_factor() {
        assert_eq!(fpc_ratio(11, 40).unwrap(), Ratio::new(29, 440));
        assert!(close(fpc::<f64>(11, 40).unwrap(), 0.0659091, 1e-6));
        assert_eq!(fpc::<f64>(11, 40).unwrap(), 29.0 / 440.0);
        assert_eq!(fpc::<f64>(40, 40).unwrap(), 0.0);
        assert_eq!(
            fpc::<f64>(41, 40),
            Err(Error::InvalidDesign {
                n: 41,
                population: 40
            })
        );
        assert!(fpc::<f64>(0, 40).is_err());
    }

    #[test]
    fn deviations() {
        let pop = PopulationSummary::from_moments(40, 0.5, 14.4, 0.9, 1.0, 0.3);
        let d = sample_deviation(&SampleSummary::new(0.5, 14.4, 5), &pop).unwrap();
        assert_eq!((d.e_phi, d.e_x), (0.0, 0.0));
        let d = sample_deviation(&SampleSummary::new(0.6, 12.0, 5), &pop).unwrap();
        assert!(close(d.e_phi, 0.2, 1e-14));
        assert!(close(d.e_x, -1.0 / 6.0, 1e-14));
        let zero = PopulationSummary::from_moments(40, 0.0, 14.4, 0.9, 1.0, 0.3);
        assert!(matches!(
            sample_deviation(&SampleSummary::new(0.1, 12.0, 5), &zero),
            Err(Error::UndefinedDeviation(_))
        ));
    }

    #[test]
    fn f32_summary_agrees_with_f64() {
        let pop64 = Population::from_pairs(&[1, 0, 1, 0, 1], &[5.0, 1.5, 4.0, 2.0, 3.0]).unwrap();
        let pop32 =
            Population::from_pairs(&[1, 0, 1, 0, 1], &[5.0f32, 1.5, 4.0, 2.0, 3.0]).unwrap();
        let a = summarize_population(&pop64).unwrap();
        let b = summarize_population(&pop32).unwrap();
        assert!((a.rho_pb - b.rho_pb as f64).abs() < 1e-6);
        assert!((a.c_x - b.c_x as f64).abs() < 1e-6);
    }
}

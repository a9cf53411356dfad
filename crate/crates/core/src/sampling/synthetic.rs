use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::population::{summarize_population, Population, PopulationUnit};

/// Model for the auxiliary variable given the attribute class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XModel {
    /// `x | φ=0 ~ N(mean0, sd0²)`, `x | φ=1 ~ N(mean0 + shift, sd1²)`, where
    /// the class shift is solved for to hit the target `ρ_pb`.
    GaussianMixture { mean0: f64, sd0: f64, sd1: f64 },
}

impl Default for XModel {
    fn default() -> Self {
        XModel::GaussianMixture {
            mean0: 10.0,
            sd0: 2.0,
            sd1: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub size: usize,
    pub target_p: f64,
    pub target_rho: f64,
    pub x_model: XModel,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(size: usize, target_p: f64, target_rho: f64, seed: u64) -> Self {
        Self {
            size,
            target_p,
            target_rho,
            x_model: XModel::default(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size < 2 {
            return Err(Error::InvalidSpec(format!(
                "N must be at least 2, got {}",
                self.size
            )));
        }
        if !(self.target_p > 0.0 && self.target_p < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "P must lie in (0, 1), got {}",
                self.target_p
            )));
        }
        if !(self.target_rho.abs() < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "|rho| must be < 1, got {}",
                self.target_rho
            )));
        }
        let XModel::GaussianMixture { mean0, sd0, sd1 } = self.x_model;
        if !mean0.is_finite()
            || !(sd0 >= 0.0)
            || !(sd1 >= 0.0)
            || !sd0.is_finite()
            || !sd1.is_finite()
        {
            return Err(Error::InvalidSpec(
                "mixture mean must be finite and spreads non-negative".into(),
            ));
        }
        Ok(())
    }
}

const MAX_ADJUSTMENTS: usize = 25;
const RHO_TOLERANCE: f64 = 1e-9;
const ACCEPT_TOLERANCE: f64 = 1e-6;

/// Generates a population with `round(N·P)` attribute holders and a
/// point-biserial correlation matching `target_rho`.
///
/// Residuals are centred within each class, so they carry no covariance with
/// `φ` and `ρ_pb` becomes a monotone function of the class shift. The shift is
/// set analytically, then refined against the measured correlation.
pub fn generate_population(spec: &SyntheticSpec) -> Result<Population<f64>> {
    spec.validate()?;
    let XModel::GaussianMixture { mean0, sd0, sd1 } = spec.x_model;
    let size = spec.size;
    let ones = (size as f64 * spec.target_p).round() as usize;
    if ones == 0 || ones == size {
        return Err(Error::UnreachableTarget(format!(
            "N·P rounds to {ones} attribute holders out of {size}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut phi: Vec<u8> = (0..size).map(|i| u8::from(i < ones)).collect();
    phi.shuffle(&mut rng);
    let noise: Vec<f64> = (0..size).map(|_| StandardNormal.sample(&mut rng)).collect();

    let mut residual = vec![0.0; size];
    for (class, sd) in [(0u8, sd0), (1u8, sd1)] {
        let members: Vec<usize> = (0..size).filter(|&i| phi[i] == class).collect();
        let m = members.len() as f64;
        let mean = members.iter().map(|&i| noise[i]).sum::<f64>() / m;
        let ss: f64 = members.iter().map(|&i| (noise[i] - mean).powi(2)).sum();
        let scale = if members.len() > 1 && ss > 0.0 {
            sd / (ss / (m - 1.0)).sqrt()
        } else {
            0.0
        };
        for &i in &members {
            residual[i] = (noise[i] - mean) * scale;
        }
    }

    let dof = (size - 1) as f64;
    let p = ones as f64 / size as f64;
    let s_phi = (size as f64 * p * (1.0 - p) / dof).sqrt();
    let s_resid = (residual.iter().map(|r| r * r).sum::<f64>() / dof).sqrt();
    if s_resid == 0.0 && spec.target_rho != 0.0 {
        return Err(Error::UnreachableTarget(
            "zero within-class spread forces |rho| = 1".into(),
        ));
    }
    if s_resid == 0.0 {
        return Err(Error::UnreachableTarget(
            "zero within-class spread with rho = 0 leaves x constant".into(),
        ));
    }

    let build = |shift: f64| -> Result<(Population<f64>, f64)> {
        let pop = Population::new(
            phi.iter()
                .zip(&residual)
                .map(|(&c, &r)| PopulationUnit::new(c, mean0 + shift * f64::from(c) + r))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let rho = summarize_population(&pop)?.rho_pb;
        Ok((pop, rho))
    };

    let rho = spec.target_rho;
    let mut shift = rho * s_resid / (s_phi * (1.0 - rho * rho).sqrt());
    let (mut pop, mut achieved) = build(shift)?;
    let mut prev: Option<(f64, f64)> = None;
    for _ in 0..MAX_ADJUSTMENTS {
        let err = achieved - rho;
        if err.abs() <= RHO_TOLERANCE {
            break;
        }
        let next = match prev {
            Some((ps, pe)) if pe != err => shift - err * (shift - ps) / (err - pe),
            // dρ/dshift at the analytic model
            _ => {
                let v = shift * shift * s_phi * s_phi + s_resid * s_resid;
                let slope = s_phi * s_resid * s_resid / v.powf(1.5);
                shift - err / slope
            }
        };
        prev = Some((shift, err));
        shift = next;
        (pop, achieved) = build(shift)?;
    }
    if (achieved - rho).abs() > ACCEPT_TOLERANCE {
        return Err(Error::UnreachableTarget(format!(
            "achieved rho {achieved} after {MAX_ADJUSTMENTS} adjustments, target {rho}"
        )));
    }
    Ok(pop)
}

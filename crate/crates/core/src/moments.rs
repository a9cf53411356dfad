//! First-order bias and MSE expressions, optimal constants and efficiency checks.
//!
//! Every expression is `O(f)` with `f = 1/n − 1/N` and uses the population
//! moments `E(e_φ²) = fC_p²`, `E(e_x²) = fC_x²`, `E(e_φ e_x) = fρC_pC_x`.

use crate::error::{Error, Result};
use crate::estimators::{EstimatorSpec, T2Instance, T3Params};
use crate::population::{fpc, PopulationSummary};
use crate::Scalar;

/// Finite-population factor together with the population summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignMoments<T> {
    pub f: T,
    pub summary: PopulationSummary<T>,
}

impl<T: Scalar> DesignMoments<T> {
    pub fn new(f: T, summary: PopulationSummary<T>) -> Result<Self> {
        if !(f >= T::zero()) {
            return Err(Error::Domain(format!(
                "finite-population factor must be >= 0, got {f}"
            )));
        }
        Ok(Self { f, summary })
    }

    /// Uses `summary.size` as `N`.
    pub fn for_sample_size(n: usize, summary: PopulationSummary<T>) -> Result<Self> {
        Self::new(fpc(n, summary.size)?, summary)
    }

    /// `ρ_pb·C_p·C_x`
    #[inline]
    fn cross(&self) -> T {
        self.summary.rho_pb * self.summary.c_p * self.summary.c_x
    }

    #[inline]
    fn cx_sq(&self) -> T {
        self.summary.c_x * self.summary.c_x
    }

    #[inline]
    fn cp_sq(&self) -> T {
        self.summary.c_p * self.summary.c_p
    }
}

/// `θ`, `B`, `A` of the `t3` expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T3Coefficients<T> {
    pub theta: T,
    pub b_coef: T,
    pub a_coef: T,
}

/// Constants of the quadratic form `MSE(t3)(q1, q2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseComponents<T> {
    pub m1: T,
    pub m2: T,
    pub m3: T,
    pub m4: T,
    pub m5: T,
    pub d1: T,
    pub d2: T,
    pub d3: T,
    pub d4: T,
    pub d5: T,
}

impl<T: Scalar> MseComponents<T> {
    /// `Δ1Δ3 − Δ2²`
    pub fn determinant(&self) -> T {
        self.d1 * self.d3 - self.d2 * self.d2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalQ<T> {
    pub q1_star: T,
    pub q2_star: T,
}

/// `V(p) = f·P²·C_p²`
pub fn var_usual<T: Scalar>(dm: &DesignMoments<T>) -> T {
    let p = dm.summary.p;
    dm.f * p * p * dm.cp_sq()
}

/// `f·P·(C_x² − ρC_pC_x)`
pub fn bias_t1<T: Scalar>(dm: &DesignMoments<T>) -> T {
    dm.f * dm.summary.p * (dm.cx_sq() - dm.cross())
}

/// `f·P²·(C_p² + C_x² − 2ρC_pC_x)`
pub fn mse_t1<T: Scalar>(dm: &DesignMoments<T>) -> T {
    let p = dm.summary.p;
    let two = T::lit(2.0);
    dm.f * p * p * (dm.cp_sq() + dm.cx_sq() - two * dm.cross())
}

/// First-order bias of a `t2` member.
///
/// The mixed term of the second-order expansion is `(p−P)(u−1)·∂²H/∂p∂u`,
/// i.e. `2·H3` with `H3` stored as the half mixed partial.
pub fn bias_t2<T: Scalar>(dm: &DesignMoments<T>, inst: &T2Instance<T>) -> T {
    let p = dm.summary.p;
    let two = T::lit(2.0);
    dm.f * (two * inst.h3 * p * dm.cross() + dm.cx_sq() * inst.h2 + p * p * dm.cp_sq() * inst.h4)
}

/// `f·(P²C_p² + H1²C_x² + 2H1·PρC_pC_x)`
pub fn mse_t2<T: Scalar>(dm: &DesignMoments<T>, h1: T) -> T {
    let p = dm.summary.p;
    let two = T::lit(2.0);
    dm.f * (p * p * dm.cp_sq() + h1 * h1 * dm.cx_sq() + two * h1 * p * dm.cross())
}

/// `H1 = −ρ·P·C_p/C_x`
pub fn opt_h1<T: Scalar>(dm: &DesignMoments<T>) -> Result<T> {
    let s = &dm.summary;
    if s.c_x == T::zero() {
        return Err(Error::DegenerateAuxiliary);
    }
    Ok(-s.rho_pb * s.p * s.c_p / s.c_x)
}

/// `f·P²·C_p²·(1 − ρ²)`; also the first-order MSE of the optimal regression estimator.
pub fn min_mse_t2<T: Scalar>(dm: &DesignMoments<T>) -> T {
    let rho = dm.summary.rho_pb;
    var_usual(dm) * (T::one() - rho * rho)
}

pub fn t3_coefficients<T: Scalar>(
    alpha: T,
    beta: T,
    a: T,
    b: T,
    x_bar_pop: T,
) -> Result<T3Coefficients<T>> {
    if !(a > T::zero()) || !(b >= T::zero()) {
        return Err(Error::Domain(format!(
            "t3 requires a > 0 and b >= 0, got a={a}, b={b}"
        )));
    }
    let denom = a * x_bar_pop + b;
    if !(denom > T::zero()) {
        return Err(Error::Domain(format!(
            "t3 requires a*X_bar + b > 0, got {denom}"
        )));
    }
    let theta = a * x_bar_pop / denom;
    let half = T::lit(0.5);
    let four = T::lit(4.0);
    let two = T::lit(2.0);
    let b_coef = (alpha + half * beta) * theta;
    let a_coef = theta * theta / T::lit(8.0)
        * (four * alpha * (alpha + T::one()) + beta * (beta + two) + four * alpha * beta);
    Ok(T3Coefficients {
        theta,
        b_coef,
        a_coef,
    })
}

pub fn m_components<T: Scalar>(
    dm: &DesignMoments<T>,
    coeffs: &T3Coefficients<T>,
) -> MseComponents<T> {
    let s = &dm.summary;
    let (p, xb, f) = (s.p, s.x_bar, dm.f);
    let (big_b, big_a) = (coeffs.b_coef, coeffs.a_coef);
    let two = T::lit(2.0);
    let cx_sq = dm.cx_sq();
    let cross = dm.cross();

    let m1 = p * p * f * (dm.cp_sq() + big_b * big_b * cx_sq - two * big_b * cross);
    let m2 = xb * xb * f * cx_sq;
    let m3 = p * p * f * (big_a * cx_sq - big_b * cross);
    let m4 = p * xb * f * (-big_b * cx_sq + cross);
    let m5 = xb * p * f * (-big_b * cx_sq);

    MseComponents {
        m1,
        m2,
        m3,
        m4,
        m5,
        d1: p * p + m1 + two * m3,
        d2: -m4 - m5,
        d3: m2,
        d4: p * p + m3,
        d5: -m5,
    }
}

/// `MSE(t3)` at arbitrary weights, evaluated in the `M` form, which keeps every
/// term `O(f)` except `(q1 − 1)²P²`.
pub fn mse_t3_at<T: Scalar>(q1: T, q2: T, p: T, mc: &MseComponents<T>) -> T {
    let two = T::lit(2.0);
    let dq = q1 - T::one();
    dq * dq * p * p
        + q1 * q1 * mc.m1
        + two * q1 * dq * mc.m3
        + q2 * q2 * mc.m2
        + two * q1 * q2 * (-mc.m4 - mc.m5)
        + two * q2 * mc.m5
}

const SINGULAR_RELATIVE: f64 = 1e-9;

fn checked_determinant<T: Scalar>(mc: &MseComponents<T>) -> Result<T> {
    let d13 = mc.d1 * mc.d3;
    let d22 = mc.d2 * mc.d2;
    let det = d13 - d22;
    let threshold = T::lit(SINGULAR_RELATIVE) * d13.abs().max(d22);
    if !(det > threshold) {
        return Err(Error::SingularSystem {
            det: det.as_f64(),
            threshold: threshold.as_f64(),
        });
    }
    Ok(det)
}

/// Solves `Δ1q1 + Δ2q2 = Δ4`, `Δ2q1 + Δ3q2 = Δ5`.
pub fn opt_q<T: Scalar>(mc: &MseComponents<T>) -> Result<OptimalQ<T>> {
    let det = checked_determinant(mc)?;
    Ok(OptimalQ {
        q1_star: (mc.d3 * mc.d4 - mc.d2 * mc.d5) / det,
        q2_star: (mc.d1 * mc.d5 - mc.d2 * mc.d4) / det,
    })
}

/// Minimum of `MSE(t3)` over `(q1, q2)`.
///
/// Equal to `P² − (Δ1Δ5² + Δ3Δ4² − 2Δ2Δ4Δ5)/(Δ1Δ3 − Δ2²)`; the numerator is
/// expanded so that the `P⁴` terms cancel symbolically instead of in floating point.
pub fn min_mse_t3<T: Scalar>(p: T, mc: &MseComponents<T>) -> Result<T> {
    let det = checked_determinant(mc)?;
    let two = T::lit(2.0);
    let num =
        mc.m2 * (p * p * mc.m1 - mc.m3 * mc.m3) - p * p * mc.m4 * mc.m4 - mc.m1 * mc.m5 * mc.m5
            + two * mc.m3 * mc.m4 * mc.m5;
    Ok(num / det)
}

/// First-order bias of `t3` at the weights in `params`.
pub fn bias_t3<T: Scalar>(
    dm: &DesignMoments<T>,
    params: &T3Params<T>,
    coeffs: &T3Coefficients<T>,
) -> T {
    let s = &dm.summary;
    let (p, xb) = (s.p, s.x_bar);
    p * (params.q1 - T::one())
        + dm.f
            * ((params.q2 * xb * coeffs.b_coef + params.q1 * p * coeffs.a_coef) * dm.cx_sq()
                - params.q1 * p * coeffs.b_coef * dm.cross())
}

/// Percent relative efficiency `100 · mse_ref / mse`.
pub fn pre<T: Scalar>(mse_ref: T, mse: T) -> Result<T> {
    if mse == T::zero() {
        return Err(Error::DivisionByZero("PRE: candidate MSE"));
    }
    Ok(T::lit(100.0) * mse_ref / mse)
}

/// `min MSE(t3) ≤ V(p)`. A census (`f = 0`) satisfies it trivially.
pub fn condition_t3_beats_usual<T: Scalar>(
    dm: &DesignMoments<T>,
    mc: &MseComponents<T>,
) -> Result<bool> {
    if dm.f == T::zero() {
        return Ok(true);
    }
    Ok(min_mse_t3(dm.summary.p, mc)? <= var_usual(dm))
}

/// `min MSE(t3) ≤ f·P²·C_p²·(1 − ρ²)`.
pub fn condition_t3_beats_regression<T: Scalar>(
    dm: &DesignMoments<T>,
    mc: &MseComponents<T>,
) -> Result<bool> {
    if dm.f == T::zero() {
        return Ok(true);
    }
    Ok(min_mse_t3(dm.summary.p, mc)? <= min_mse_t2(dm))
}

/// Everything needed to run and report the MSE-optimal `t3` for one shape `(α, β, a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalT3<T> {
    pub params: T3Params<T>,
    pub coeffs: T3Coefficients<T>,
    pub components: MseComponents<T>,
    pub min_mse: T,
    pub bias: T,
}

pub fn optimal_t3<T: Scalar>(
    dm: &DesignMoments<T>,
    alpha: T,
    beta: T,
    a: T,
    b: T,
) -> Result<OptimalT3<T>> {
    let coeffs = t3_coefficients(alpha, beta, a, b, dm.summary.x_bar)?;
    let components = m_components(dm, &coeffs);
    let q = opt_q(&components)?;
    let params = T3Params::new(q.q1_star, q.q2_star, alpha, beta, a, b)?;
    Ok(OptimalT3 {
        params,
        coeffs,
        components,
        min_mse: min_mse_t3(dm.summary.p, &components)?,
        bias: bias_t3(dm, &params, &coeffs),
    })
}

/// First-order `(bias, MSE)` of any estimator spec at its own parameters.
///
/// The regression estimator `p + b(X̄ − x̄)` is the linear `t2` member with
/// `H1 = −b·X̄`, so it shares that MSE and has zero first-order bias.
pub fn first_order_moments<T: Scalar>(
    dm: &DesignMoments<T>,
    spec: &EstimatorSpec<T>,
) -> Result<(T, T)> {
    Ok(match spec {
        EstimatorSpec::Usual => (T::zero(), var_usual(dm)),
        EstimatorSpec::T1 => (bias_t1(dm), mse_t1(dm)),
        EstimatorSpec::T2(inst) => (bias_t2(dm, inst), mse_t2(dm, inst.h1)),
        EstimatorSpec::Regression { b } => (T::zero(), mse_t2(dm, -*b * dm.summary.x_bar)),
        EstimatorSpec::T3(params) => {
            let coeffs = t3_coefficients(
                params.alpha,
                params.beta,
                params.a,
                params.b,
                dm.summary.x_bar,
            )?;
            let mc = m_components(dm, &coeffs);
            (
                bias_t3(dm, params, &coeffs),
                mse_t3_at(params.q1, params.q2, dm.summary.p, &mc),
            )
        }
    })
}

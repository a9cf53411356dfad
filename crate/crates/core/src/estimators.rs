//! Point estimators of the population proportion `P`.
//!
//! Throughout, `u = x̄ / X̄`, so a sample whose auxiliary mean hits the
//! population mean has `u = 1` and every `t2` member collapses to `p`.
//! Estimates are not clamped to `[0, 1]`; see [`clamp_proportion`].

use crate::error::{Error, Result};
use crate::population::SampleSummary;
use crate::Scalar;

/// Usual estimator: the sample proportion.
#[inline]
pub fn est_usual<T: Scalar>(s: &SampleSummary<T>) -> T {
    s.p
}

/// Ratio estimator `p · X̄ / x̄`.
pub fn est_t1<T: Scalar>(s: &SampleSummary<T>, x_bar_pop: T) -> Result<T> {
    if s.x_bar == T::zero() {
        return Err(Error::DivisionByZero("t1: sample auxiliary mean"));
    }
    Ok(s.p * (x_bar_pop / s.x_bar))
}

/// Regression estimator `p + b · (X̄ − x̄)`.
#[inline]
pub fn est_regression<T: Scalar>(s: &SampleSummary<T>, x_bar_pop: T, b_coef: T) -> T {
    s.p + b_coef * (x_bar_pop - s.x_bar)
}

/// Optimal regression slope `ρ_pb · S_φ / S_x` from population quantities.
pub fn regression_slope<T: Scalar>(summary: &crate::PopulationSummary<T>) -> T {
    summary.rho_pb * summary.s_p_sq.sqrt() / summary.s_x_sq.sqrt()
}

pub fn clamp_proportion<T: Scalar>(estimate: T) -> T {
    estimate.max(T::zero()).min(T::one())
}

/// Members of the `H(p, u)` family with `H(p, 1) = p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum T2Family<T> {
    /// `p + d·(u − 1)`
    LinearDifference { d: T },
    /// `p · u^g`; `g = −1` is the ratio estimator, `g = 1` the product estimator.
    PowerRatio { g: T },
    /// `p · exp(δ·(1 − u)/(1 + u))`
    Exponential { delta: T },
}

impl<T: Scalar> T2Family<T> {
    pub fn label(&self) -> String {
        match self {
            T2Family::LinearDifference { d } => format!("t2[linear d={d}]"),
            T2Family::PowerRatio { g } => format!("t2[power g={g}]"),
            T2Family::Exponential { delta } => format!("t2[exp delta={delta}]"),
        }
    }

    /// `H(p, u)` without any domain checks.
    fn eval(&self, p: T, u: T) -> T {
        match *self {
            T2Family::LinearDifference { d } => p + d * (u - T::one()),
            T2Family::PowerRatio { g } => p * u.powf(g),
            T2Family::Exponential { delta } => p * (delta * (T::one() - u) / (T::one() + u)).exp(),
        }
    }

    /// Analytic `(H1, H2, H3, H4)` at `(P, 1)`: `H1 = ∂H/∂u`, the rest are half
    /// second partials (`H2` in `u`, `H3` mixed, `H4` in `p`).
    fn analytic_coefficients(&self, p: T) -> [T; 4] {
        let half = T::lit(0.5);
        match *self {
            T2Family::LinearDifference { d } => [d, T::zero(), T::zero(), T::zero()],
            T2Family::PowerRatio { g } => {
                [g * p, half * g * (g - T::one()) * p, half * g, T::zero()]
            }
            T2Family::Exponential { delta } => {
                let quarter = T::lit(0.25);
                [
                    -half * delta * p,
                    half * p * (quarter * delta * delta + half * delta),
                    -quarter * delta,
                    T::zero(),
                ]
            }
        }
    }
}

/// A `t2` family member together with its Taylor coefficients at `(P, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T2Instance<T> {
    pub family: T2Family<T>,
    pub h1: T,
    pub h2: T,
    pub h3: T,
    pub h4: T,
}

const FD_STEP: f64 = 1e-5;
/// Second differences lose `ε/h²` to rounding, so they take a wider step.
const FD_STEP_SECOND: f64 = 1e-4;
const FD_TOLERANCE: f64 = 1e-6;

impl<T: Scalar> T2Instance<T> {
    /// Computes the coefficients at population proportion `p` and checks them
    /// against central finite differences (evaluated in `f64`).
    pub fn new(family: T2Family<T>, p: T) -> Result<Self> {
        let [h1, h2, h3, h4] = family.analytic_coefficients(p);
        let fam64 = match family {
            T2Family::LinearDifference { d } => T2Family::LinearDifference { d: d.as_f64() },
            T2Family::PowerRatio { g } => T2Family::PowerRatio { g: g.as_f64() },
            T2Family::Exponential { delta } => T2Family::Exponential {
                delta: delta.as_f64(),
            },
        };
        let numeric = finite_difference_coefficients(&fam64, p.as_f64());
        let names = ["H1", "H2", "H3", "H4"];
        for ((name, analytic), numeric) in names.iter().zip([h1, h2, h3, h4]).zip(numeric) {
            let analytic = analytic.as_f64();
            if (analytic - numeric).abs() > FD_TOLERANCE * analytic.abs().max(1.0) {
                return Err(Error::CoefficientMismatch {
                    name,
                    analytic,
                    numeric,
                });
            }
        }
        Ok(Self {
            family,
            h1,
            h2,
            h3,
            h4,
        })
    }

    pub fn label(&self) -> String {
        self.family.label()
    }
}

fn finite_difference_coefficients(family: &T2Family<f64>, p: f64) -> [f64; 4] {
    let f = |pp: f64, u: f64| family.eval(pp, u);
    let h1 = (f(p, 1.0 + FD_STEP) - f(p, 1.0 - FD_STEP)) / (2.0 * FD_STEP);
    let h = FD_STEP_SECOND;
    let h_uu = (f(p, 1.0 + h) - 2.0 * f(p, 1.0) + f(p, 1.0 - h)) / (h * h);
    let h_pu = (f(p + h, 1.0 + h) - f(p + h, 1.0 - h) - f(p - h, 1.0 + h) + f(p - h, 1.0 - h))
        / (4.0 * h * h);
    let h_pp = (f(p + h, 1.0) - 2.0 * f(p, 1.0) + f(p - h, 1.0)) / (h * h);
    [h1, 0.5 * h_uu, 0.5 * h_pu, 0.5 * h_pp]
}

/// `t2 = H(p, u)` with `u = x̄ / X̄`.
pub fn est_t2<T: Scalar>(inst: &T2Instance<T>, s: &SampleSummary<T>, x_bar_pop: T) -> Result<T> {
    if x_bar_pop == T::zero() {
        return Err(Error::DivisionByZero("t2: population auxiliary mean"));
    }
    let u = s.x_bar / x_bar_pop;
    match inst.family {
        T2Family::LinearDifference { .. } => {}
        T2Family::PowerRatio { .. } | T2Family::Exponential { .. } => {
            if u <= T::zero() {
                return Err(Error::Domain(format!("t2 requires u > 0, got {u}")));
            }
        }
    }
    Ok(inst.family.eval(s.p, u))
}

/// Parameters of the `t3` family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T3Params<T> {
    pub q1: T,
    pub q2: T,
    pub alpha: T,
    pub beta: T,
    pub a: T,
    pub b: T,
}

impl<T: Scalar> T3Params<T> {
    pub fn new(q1: T, q2: T, alpha: T, beta: T, a: T, b: T) -> Result<Self> {
        if !(a > T::zero()) {
            return Err(Error::Domain(format!("t3 requires a > 0, got {a}")));
        }
        if !(b >= T::zero()) {
            return Err(Error::Domain(format!("t3 requires b >= 0, got {b}")));
        }
        Ok(Self {
            q1,
            q2,
            alpha,
            beta,
            a,
            b,
        })
    }

    pub fn label(&self) -> String {
        format!(
            "t3[alpha={} beta={} a={} b={}]",
            self.alpha, self.beta, self.a, self.b
        )
    }
}

/// `t3 = [q1·p + q2·(X̄ − x̄)] · (Z/z)^α · exp(β·(Z − z)/(Z + z))` with
/// `Z = aX̄ + b`, `z = ax̄ + b`.
pub fn est_t3<T: Scalar>(params: &T3Params<T>, s: &SampleSummary<T>, x_bar_pop: T) -> Result<T> {
    let big = params.a * x_bar_pop + params.b;
    let small = params.a * s.x_bar + params.b;
    if !(small > T::zero()) {
        return Err(Error::Domain(format!(
            "t3 requires a*x_bar + b > 0, got {small}"
        )));
    }
    if !(big > T::zero()) {
        return Err(Error::Domain(format!(
            "t3 requires a*X_bar + b > 0, got {big}"
        )));
    }
    let linear = params.q1 * s.p + params.q2 * (x_bar_pop - s.x_bar);
    let ratio = if params.alpha == T::zero() {
        T::one()
    } else {
        (big / small).powf(params.alpha)
    };
    let expo = if params.beta == T::zero() {
        T::one()
    } else {
        (params.beta * (big - small) / (big + small)).exp()
    };
    Ok(linear * ratio * expo)
}

/// An estimator together with whatever parameters it needs.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorSpec<T> {
    Usual,
    T1,
    T2(T2Instance<T>),
    T3(T3Params<T>),
    Regression { b: T },
}

impl<T: Scalar> EstimatorSpec<T> {
    pub fn label(&self) -> String {
        match self {
            EstimatorSpec::Usual => "usual".to_string(),
            EstimatorSpec::T1 => "t1".to_string(),
            EstimatorSpec::T2(inst) => inst.label(),
            EstimatorSpec::T3(params) => params.label(),
            EstimatorSpec::Regression { b } => format!("regression[b={b}]"),
        }
    }

    pub fn estimate(&self, s: &SampleSummary<T>, x_bar_pop: T) -> Result<T> {
        match self {
            EstimatorSpec::Usual => Ok(est_usual(s)),
            EstimatorSpec::T1 => est_t1(s, x_bar_pop),
            EstimatorSpec::T2(inst) => est_t2(inst, s, x_bar_pop),
            EstimatorSpec::T3(params) => est_t3(params, s, x_bar_pop),
            EstimatorSpec::Regression { b } => Ok(est_regression(s, x_bar_pop, *b)),
        }
    }

    pub fn estimate_clamped(&self, s: &SampleSummary<T>, x_bar_pop: T) -> Result<T> {
        self.estimate(s, x_bar_pop).map(clamp_proportion)
    }
}

//! The subcommands, as plain functions returning [`Report`]s.

use std::path::Path;
use std::str::FromStr;

use attrest::estimators::regression_slope;
use attrest::moments::{
    bias_t1, condition_t3_beats_regression, condition_t3_beats_usual, first_order_moments,
    min_mse_t2, mse_t1, opt_h1, optimal_t3, pre, var_usual,
};
use attrest::population::summarize_population;
use attrest::sampling::{
    enumerate_exact, generate_population, monte_carlo, MonteCarloConfig, SyntheticSpec,
};
use attrest::{DesignMoments, EstimatorSpec, Population, PopulationSummary, T2Family, T2Instance};

use crate::error::{CliError, Result};
use crate::io::{load_population_csv, write_population_csv, SummaryInput};
use crate::report::{EmpiricalCols, ExactCols, Report, ReportRow};

/// Shape `(α, β, a, b)` of a `t3` estimator whose weights are set to their optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T3Shape {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
}

impl T3Shape {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        Self {
            alpha,
            beta,
            a: 1.0,
            b: 0.0,
        }
    }

    /// The three shapes compared in the home-ownership table.
    pub const TABLE1: [T3Shape; 3] = [
        T3Shape::new(1.0, 1.0),
        T3Shape::new(1.0, 0.0),
        T3Shape::new(0.0, 1.0),
    ];

    pub fn label(&self) -> String {
        format!(
            "t3(alpha={}, beta={}, a={}, b={})",
            self.alpha, self.beta, self.a, self.b
        )
    }
}

impl FromStr for T3Shape {
    type Err = String;

    /// `alpha=A,beta=B,a=A0,b=B0`; omitted keys default to `α = β = 0`, `a = 1`, `b = 0`.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut shape = T3Shape::new(0.0, 0.0);
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| format!("`{value}` is not a number"))?;
            match key.trim() {
                "alpha" => shape.alpha = value,
                "beta" => shape.beta = value,
                "a" => shape.a = value,
                "b" => shape.b = value,
                other => return Err(format!("unknown t3 key `{other}`")),
            }
        }
        Ok(shape)
    }
}

/// A `t2` member given on the command line as `linear=D`, `power=G` or `exp=DELTA`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T2Choice(pub T2Family<f64>);

impl FromStr for T2Choice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, value) = s
            .split_once('=')
            .ok_or_else(|| format!("expected family=value, got `{s}`"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("`{value}` is not a number"))?;
        let family = match kind.trim() {
            "linear" => T2Family::LinearDifference { d: value },
            "power" => T2Family::PowerRatio { g: value },
            "exp" => T2Family::Exponential { delta: value },
            other => return Err(format!("unknown t2 family `{other}` (linear, power, exp)")),
        };
        Ok(T2Choice(family))
    }
}

/// PRE values printed in the published table, in row order after the usual estimator.
pub const TABLE1_REFERENCE: [(&str, f64); 6] = [
    ("usual", 100.0),
    ("t1", 189.384),
    ("t2", 511.794),
    ("t3(alpha=1, beta=1)", 515.798),
    ("t3(alpha=1, beta=0)", 517.950),
    ("t3(alpha=0, beta=1)", 518.052),
];

pub const TABLE1_TOLERANCE: f64 = 0.01;

fn theory_rows(
    dm: &DesignMoments<f64>,
    shapes: &[T3Shape],
    short_labels: bool,
) -> Result<Vec<ReportRow>> {
    let v = var_usual(dm);
    let census = dm.f == 0.0;
    let pre_of = |mse: f64| if census { None } else { pre(v, mse).ok() };

    let mut usual = ReportRow::new("usual");
    usual.bias = Some(0.0);
    usual.mse = Some(v);
    usual.pre = (!census).then_some(100.0);

    let mut t1 = ReportRow::new("t1");
    t1.bias = Some(bias_t1(dm));
    t1.mse = Some(mse_t1(dm));
    t1.pre = pre_of(mse_t1(dm));

    // the linear-difference member attains the minimum with zero first-order bias
    let h1 = opt_h1(dm).map_err(|e| CliError::core("t2", e))?;
    let mut t2 = ReportRow::new("t2");
    t2.bias = Some(0.0);
    t2.mse = Some(min_mse_t2(dm));
    t2.pre = pre_of(min_mse_t2(dm));
    t2.q1 = Some(h1);

    let mut rows = vec![usual, t1, t2];
    for shape in shapes {
        let label = if short_labels {
            format!("t3(alpha={}, beta={})", shape.alpha, shape.beta)
        } else {
            shape.label()
        };
        let mut row = ReportRow::new(label.clone());
        if census {
            row.bias = Some(0.0);
            row.mse = Some(0.0);
            row.beats_usual = Some(true);
            row.beats_regression = Some(true);
        } else {
            let opt = optimal_t3(dm, shape.alpha, shape.beta, shape.a, shape.b)
                .map_err(|e| CliError::core(&label, e))?;
            row.bias = Some(opt.bias);
            row.mse = Some(opt.min_mse);
            row.pre = pre_of(opt.min_mse);
            row.q1 = Some(opt.params.q1);
            row.q2 = Some(opt.params.q2);
            row.beats_usual = Some(
                condition_t3_beats_usual(dm, &opt.components)
                    .map_err(|e| CliError::core(&label, e))?,
            );
            row.beats_regression = Some(
                condition_t3_beats_regression(dm, &opt.components)
                    .map_err(|e| CliError::core(&label, e))?,
            );
        }
        rows.push(row);
    }
    Ok(rows)
}

fn design(summary: &SummaryInput) -> Result<DesignMoments<f64>> {
    summary.validate()?;
    DesignMoments::for_sample_size(summary.n, summary.population_summary())
        .map_err(|e| CliError::core("design", e))
}

/// First-order theory for the published home-ownership statistics, with `a = 1`, `b = 0`.
pub fn cmd_table1() -> Result<Report> {
    let dm = design(&SummaryInput::TABLE1)?;
    let mut rows = theory_rows(&dm, &T3Shape::TABLE1, true)?;
    for (row, (label, reference)) in rows.iter_mut().zip(TABLE1_REFERENCE) {
        debug_assert_eq!(row.label, label);
        row.reference_pre = Some(reference);
        row.within_tolerance = row
            .pre
            .map(|p| (p - reference).abs() <= TABLE1_TOLERANCE * reference);
    }
    Ok(Report {
        title: "Percent relative efficiency with respect to the usual estimator".into(),
        notes: vec![
            "n=11, N=40, P=0.525, X=14.4, rho_pb=0.897, C_p=0.963, C_x=0.3085; t3 uses a=1, b=0 and optimal q1, q2".into(),
            "t2 row: optimal H1 shown in the q1 column".into(),
        ],
        rows,
    })
}

pub fn cmd_theory(summary: &SummaryInput, shapes: &[T3Shape]) -> Result<Report> {
    let dm = design(summary)?;
    let rows = theory_rows(&dm, shapes, false)?;
    let mut notes = vec![format!(
        "n={}, N={}, f={}, P={}, X={}, rho_pb={}, C_p={}, C_x={}",
        summary.n,
        summary.population,
        dm.f,
        summary.p,
        summary.x_bar_pop,
        summary.rho_pb,
        summary.c_p,
        summary.c_x
    )];
    if dm.f == 0.0 {
        notes.push(
            "census (n = N): every estimator equals P, all MSEs are 0 and PRE is undefined".into(),
        );
    }
    notes.push("t2 row: optimal H1 shown in the q1 column".into());
    Ok(Report {
        title: "First-order bias, MSE and PRE".into(),
        notes,
        rows,
    })
}

/// Estimators compared by `simulate` and `enumerate`: usual, ratio, optimal
/// regression, any requested `t2` members and the optimal `t3` for each shape.
pub fn default_specs(
    dm: &DesignMoments<f64>,
    t2: &[T2Choice],
    shapes: &[T3Shape],
) -> Result<Vec<EstimatorSpec<f64>>> {
    let s = &dm.summary;
    let mut specs = vec![
        EstimatorSpec::Usual,
        EstimatorSpec::T1,
        EstimatorSpec::Regression {
            b: regression_slope(s),
        },
    ];
    for choice in t2 {
        let inst = T2Instance::new(choice.0, s.p).map_err(|e| CliError::core("t2", e))?;
        specs.push(EstimatorSpec::T2(inst));
    }
    for shape in shapes {
        let opt = optimal_t3(dm, shape.alpha, shape.beta, shape.a, shape.b)
            .map_err(|e| CliError::core(shape.label(), e))?;
        specs.push(EstimatorSpec::T3(opt.params));
    }
    Ok(specs)
}

fn population_design(
    pop: &Population<f64>,
    n: usize,
) -> Result<(PopulationSummary<f64>, DesignMoments<f64>)> {
    let summary = summarize_population(pop).map_err(|e| CliError::core("population", e))?;
    let dm = DesignMoments::for_sample_size(n, summary).map_err(|e| CliError::core("design", e))?;
    Ok((summary, dm))
}

fn theory_row(dm: &DesignMoments<f64>, spec: &EstimatorSpec<f64>) -> Result<ReportRow> {
    let mut row = ReportRow::new(spec.label());
    let (bias, mse) = first_order_moments(dm, spec).map_err(|e| CliError::core(spec.label(), e))?;
    row.bias = Some(bias);
    row.mse = Some(mse);
    row.pre = if dm.f == 0.0 {
        None
    } else {
        pre(var_usual(dm), mse).ok()
    };
    if let EstimatorSpec::T3(p) = spec {
        row.q1 = Some(p.q1);
        row.q2 = Some(p.q2);
    }
    Ok(row)
}

fn population_note(summary: &PopulationSummary<f64>, n: usize, f: f64) -> String {
    format!(
        "N={}, n={}, f={}, P={}, X={}, rho_pb={}, C_p={}, C_x={}",
        summary.size, n, f, summary.p, summary.x_bar, summary.rho_pb, summary.c_p, summary.c_x
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOptions {
    pub n: usize,
    pub reps: u64,
    pub seed: u64,
    pub threads: Option<usize>,
    pub t2: Vec<T2Choice>,
    pub shapes: Vec<T3Shape>,
}

pub fn simulate_population(pop: &Population<f64>, opts: &SimulateOptions) -> Result<Report> {
    let (summary, dm) = population_design(pop, opts.n)?;
    let specs = default_specs(&dm, &opts.t2, &opts.shapes)?;
    let config = MonteCarloConfig {
        reps: opts.reps,
        seed: opts.seed,
        threads: opts.threads,
    };
    let mc =
        monte_carlo(pop, opts.n, &specs, &config).map_err(|e| CliError::core("simulate", e))?;
    let rows = specs
        .iter()
        .zip(&mc.rows)
        .map(|(spec, emp)| {
            let mut row = theory_row(&dm, spec)?;
            row.empirical = Some(EmpiricalCols {
                mean: emp.mean,
                bias: emp.bias,
                mse: emp.mse,
                mse_se: emp.mse_std_error,
                pre: emp.pre,
            });
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        title: "First-order theory vs. Monte Carlo".into(),
        notes: vec![
            population_note(&summary, opts.n, dm.f),
            format!("reps={}, seed={}", mc.reps, mc.seed),
        ],
        rows,
    })
}

pub fn cmd_simulate(path: &Path, opts: &SimulateOptions) -> Result<Report> {
    let pop = load_population_csv(path)?;
    simulate_population(&pop, opts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerateOptions {
    pub n: usize,
    pub limit: u64,
    pub t2: Vec<T2Choice>,
    pub shapes: Vec<T3Shape>,
}

pub fn enumerate_population(pop: &Population<f64>, opts: &EnumerateOptions) -> Result<Report> {
    let (summary, dm) = population_design(pop, opts.n)?;
    let specs = default_specs(&dm, &opts.t2, &opts.shapes)?;
    let exact = enumerate_exact(pop, opts.n, &specs, opts.limit)
        .map_err(|e| CliError::core("enumerate", e))?;
    let rows = specs
        .iter()
        .zip(&exact.rows)
        .map(|(spec, ex)| {
            let mut row = theory_row(&dm, spec)?;
            let theory = row.mse.unwrap_or(f64::NAN);
            let gap = if ex.mse == 0.0 {
                (theory == 0.0).then_some(0.0)
            } else {
                Some((theory - ex.mse) / ex.mse)
            };
            row.exact = Some(ExactCols {
                expectation: ex.expectation,
                bias: ex.bias,
                mse: ex.mse,
                gap,
            });
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        title: "First-order theory vs. exact enumeration".into(),
        notes: vec![
            population_note(&summary, opts.n, dm.f),
            format!("samples enumerated: {}", exact.sample_count),
        ],
        rows,
    })
}

pub fn cmd_enumerate(path: &Path, opts: &EnumerateOptions) -> Result<Report> {
    let pop = load_population_csv(path)?;
    enumerate_population(&pop, opts)
}

/// What `generate` echoes after writing the file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerateOutcome {
    pub summary: PopulationSummary<f64>,
    pub attribute_count: usize,
}

impl GenerateOutcome {
    pub fn describe(&self) -> String {
        let s = &self.summary;
        format!(
            "N={} attribute_count={} P={} X={} rho_pb={} C_p={} C_x={}",
            s.size, self.attribute_count, s.p, s.x_bar, s.rho_pb, s.c_p, s.c_x
        )
    }
}

pub fn cmd_generate(spec: &SyntheticSpec, out: &Path) -> Result<GenerateOutcome> {
    spec.validate()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let pop = generate_population(spec).map_err(|e| CliError::core("generate", e))?;
    write_population_csv(&pop, out)?;
    let summary = summarize_population(&pop).map_err(|e| CliError::core("generate", e))?;
    Ok(GenerateOutcome {
        summary,
        attribute_count: pop.attribute_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_shapes() {
        let s: T3Shape = "alpha=1,beta=0.5,a=2,b=3".parse().unwrap();
        assert_eq!(
            s,
            T3Shape {
                alpha: 1.0,
                beta: 0.5,
                a: 2.0,
                b: 3.0
            }
        );
        let s: T3Shape = "beta=1".parse().unwrap();
        assert_eq!(s, T3Shape::new(0.0, 1.0));
        assert!("gamma=1".parse::<T3Shape>().is_err());
        assert!("alpha".parse::<T3Shape>().is_err());
    }

    #[test]
    fn parse_t2() {
        assert_eq!(
            "power=-1".parse::<T2Choice>().unwrap().0,
            T2Family::PowerRatio { g: -1.0 }
        );
        assert_eq!(
            "exp=1".parse::<T2Choice>().unwrap().0,
            T2Family::Exponential { delta: 1.0 }
        );
        assert!("cubic=1".parse::<T2Choice>().is_err());
    }

    #[test]
    fn census_theory() {
        let mut s = SummaryInput::TABLE1;
        s.n = s.population;
        let r = cmd_theory(&s, &T3Shape::TABLE1).unwrap();
        assert!(r
            .rows
            .iter()
            .all(|row| row.mse == Some(0.0) && row.pre.is_none()));
        assert!(r.notes.iter().any(|n| n.contains("census")));
    }

    #[test]
    fn uncorrelated_theory() {
        let mut s = SummaryInput::TABLE1;
        s.rho_pb = 0.0;
        let r = cmd_theory(&s, &[]).unwrap();
        assert!((r.row("t2").unwrap().pre.unwrap() - 100.0).abs() < 1e-12);
        assert!(r.row("t1").unwrap().pre.unwrap() < 100.0);
    }

    #[test]
    fn theory_reports_t3_conditions() {
        let r = cmd_theory(&SummaryInput::TABLE1, &[T3Shape::new(1.0, 1.0)]).unwrap();
        let row = r.row(&T3Shape::new(1.0, 1.0).label()).unwrap();
        assert!((row.mse.unwrap() - 0.003268).abs() / 0.003268 < 1e-3);
        assert_eq!(row.beats_regression, Some(true));
        assert_eq!(row.beats_usual, Some(true));
    }
}

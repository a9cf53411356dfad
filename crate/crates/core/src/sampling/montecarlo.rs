use rayon::prelude::*;

use super::check_design;
use super::srswor::{draw_srswor_indices, replicate_rng};
use crate::error::{Error, Result};
use crate::estimators::EstimatorSpec;
use crate::population::{summarize_sample, Population, SampleSummary};
use crate::sum::{compensated_sum, CompensatedSum};
use crate::Scalar;

/// Replicates are grouped into fixed-size chunks; chunk results are merged in
/// index order, which makes the report independent of the worker count.
const CHUNK: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloConfig {
    pub reps: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl MonteCarloConfig {
    pub fn new(reps: u64, seed: u64) -> Self {
        Self {
            reps,
            seed,
            threads: None,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalRow<T> {
    pub label: String,
    pub mean: T,
    pub bias: T,
    pub mse: T,
    /// Standard error of `mse` as a mean of squared errors.
    pub mse_std_error: T,
    /// `100 · MSE(usual) / MSE`, `None` when this estimator's MSE is zero.
    pub pre: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalReport<T> {
    pub rows: Vec<EmpiricalRow<T>>,
    pub usual_mse: T,
    pub reps: u64,
    pub seed: u64,
}

#[derive(Clone)]
struct Moments<T> {
    estimate: CompensatedSum<T>,
    sq_error: CompensatedSum<T>,
    sq_error_sq: CompensatedSum<T>,
}

impl<T: Scalar> Moments<T> {
    fn new() -> Self {
        Self {
            estimate: CompensatedSum::new(),
            sq_error: CompensatedSum::new(),
            sq_error_sq: CompensatedSum::new(),
        }
    }

    fn add(&mut self, estimate: T, target: T) {
        let err = estimate - target;
        let sq = err * err;
        self.estimate.add(estimate);
        self.sq_error.add(sq);
        self.sq_error_sq.add(sq * sq);
    }

    fn merge(&mut self, other: &Self) {
        self.estimate.merge(&other.estimate);
        self.sq_error.merge(&other.sq_error);
        self.sq_error_sq.merge(&other.sq_error_sq);
    }
}

/// Runs `config.reps` independent SRSWOR replicates of size `n` and records
/// the mean, bias and MSE of every estimator around the true `P`.
///
/// A domain error in any replicate aborts the run; the error names the
/// lowest failing replicate.
pub fn monte_carlo<T: Scalar>(
    pop: &Population<T>,
    n: usize,
    specs: &[EstimatorSpec<T>],
    config: &MonteCarloConfig,
) -> Result<EmpiricalReport<T>> {
    check_design(n, pop.size())?;
    if config.reps == 0 {
        return Err(Error::Domain(
            "Monte Carlo needs at least one replicate".into(),
        ));
    }
    let size = T::from_count(pop.size());
    let p_true = T::from_count(pop.attribute_count()) / size;
    let x_bar_pop = compensated_sum(pop.units().iter().map(|u| u.x)) / size;

    let chunks = config.reps.div_ceil(CHUNK);
    let run_chunk = |chunk: u64| -> Result<Vec<Moments<T>>> {
        let mut acc = vec![Moments::new(); specs.len() + 1];
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(config.reps);
        let mut sample = Vec::with_capacity(n);
        for rep in start..end {
            let mut rng = replicate_rng(config.seed, rep);
            sample.clear();
            sample.extend(
                draw_srswor_indices(&mut rng, pop.size(), n)?
                    .into_iter()
                    .map(|i| pop.units()[i]),
            );
            let s: SampleSummary<T> = summarize_sample(&sample)?;
            acc[0].add(s.p, p_true);
            for (slot, spec) in acc[1..].iter_mut().zip(specs) {
                let est = spec.estimate(&s, x_bar_pop).map_err(|e| Error::Replicate {
                    label: spec.label(),
                    replicate: rep,
                    source: Box::new(e),
                })?;
                slot.add(est, p_true);
            }
        }
        Ok(acc)
    };

    let run_all =
        || -> Vec<Result<Vec<Moments<T>>>> { (0..chunks).into_par_iter().map(run_chunk).collect() };
    let chunk_results = match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Domain(format!("cannot build thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };

    let mut total = vec![Moments::new(); specs.len() + 1];
    for chunk in chunk_results {
        for (t, c) in total.iter_mut().zip(chunk?.iter()) {
            t.merge(c);
        }
    }

    let reps_t = T::lit(config.reps as f64);
    let summarize = |m: &Moments<T>| -> (T, T, T) {
        let mean = m.estimate.value() / reps_t;
        let mse = m.sq_error.value() / reps_t;
        let se = if config.reps > 1 {
            let var = (m.sq_error_sq.value() - reps_t * mse * mse) / (reps_t - T::one());
            (var.max(T::zero()) / reps_t).sqrt()
        } else {
            T::zero()
        };
        (mean, mse, se)
    };
    let (_, usual_mse, _) = summarize(&total[0]);
    let rows = specs
        .iter()
        .zip(&total[1..])
        .map(|(spec, m)| {
            let (mean, mse, mse_std_error) = summarize(m);
            EmpiricalRow {
                label: spec.label(),
                mean,
                bias: mean - p_true,
                mse,
                mse_std_error,
                pre: (mse > T::zero()).then(|| T::lit(100.0) * usual_mse / mse),
            }
        })
        .collect();
    Ok(EmpiricalReport {
        rows,
        usual_mse,
        reps: config.reps,
        seed: config.seed,
    })
}

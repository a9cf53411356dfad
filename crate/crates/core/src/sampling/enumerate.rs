use rayon::prelude::*;

use super::check_design;
use crate::error::{Error, Result};
use crate::estimators::EstimatorSpec;
use crate::population::{Population, SampleSummary};
use crate::sum::{compensated_sum, CompensatedSum};
use crate::Scalar;

pub const DEFAULT_ENUMERATION_LIMIT: u64 = 2_000_000;

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactRow<T> {
    pub label: String,
    pub expectation: T,
    pub bias: T,
    pub mse: T,
}

/// Exact design moments of `e_φ`, `e_x` and `p` over all samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationMoments<T> {
    pub e_phi: T,
    pub e_x: T,
    pub e_phi_sq: T,
    pub e_x_sq: T,
    pub e_phi_e_x: T,
    pub p_mean: T,
    /// `E[(p − P)²]`
    pub p_var: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactReport<T> {
    pub rows: Vec<ExactRow<T>>,
    pub moments: DeviationMoments<T>,
    pub sample_count: u64,
}

struct Accumulator<T> {
    e_phi: CompensatedSum<T>,
    e_x: CompensatedSum<T>,
    e_phi_sq: CompensatedSum<T>,
    e_x_sq: CompensatedSum<T>,
    e_phi_e_x: CompensatedSum<T>,
    p: CompensatedSum<T>,
    p_sq_dev: CompensatedSum<T>,
    estimates: Vec<(CompensatedSum<T>, CompensatedSum<T>)>,
}

impl<T: Scalar> Accumulator<T> {
    fn new(specs: usize) -> Self {
        Self {
            e_phi: CompensatedSum::new(),
            e_x: CompensatedSum::new(),
            e_phi_sq: CompensatedSum::new(),
            e_x_sq: CompensatedSum::new(),
            e_phi_e_x: CompensatedSum::new(),
            p: CompensatedSum::new(),
            p_sq_dev: CompensatedSum::new(),
            estimates: vec![(CompensatedSum::new(), CompensatedSum::new()); specs],
        }
    }

    fn merge(&mut self, o: &Self) {
        self.e_phi.merge(&o.e_phi);
        self.e_x.merge(&o.e_x);
        self.e_phi_sq.merge(&o.e_phi_sq);
        self.e_x_sq.merge(&o.e_x_sq);
        self.e_phi_e_x.merge(&o.e_phi_e_x);
        self.p.merge(&o.p);
        self.p_sq_dev.merge(&o.p_sq_dev);
        for (a, b) in self.estimates.iter_mut().zip(&o.estimates) {
            a.0.merge(&b.0);
            a.1.merge(&b.1);
        }
    }
}

/// Advances `idx` to the next `k`-subset of `lo..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for pos in (0..k).rev() {
        if idx[pos] < n - (k - pos) {
            idx[pos] += 1;
            for j in pos + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exact expectation, bias and MSE of every estimator, averaging over all
/// `C(N, n)` equally likely samples.
///
/// Subsets are split by their smallest index and the partial sums are merged
/// in that order, so the result is deterministic.
pub fn enumerate_exact<T: Scalar>(
    pop: &Population<T>,
    n: usize,
    specs: &[EstimatorSpec<T>],
    limit: u64,
) -> Result<ExactReport<T>> {
    let size = pop.size();
    check_design(n, size)?;
    let count = binomial(size, n).unwrap_or(u128::MAX);
    if count > limit as u128 {
        return Err(Error::TooManySamples { count, limit });
    }

    let size_t = T::from_count(size);
    let p_true = T::from_count(pop.attribute_count()) / size_t;
    let x_bar_pop = compensated_sum(pop.units().iter().map(|u| u.x)) / size_t;
    if p_true == T::zero() {
        return Err(Error::UndefinedDeviation("population proportion is zero"));
    }
    if x_bar_pop == T::zero() {
        return Err(Error::UndefinedDeviation(
            "population auxiliary mean is zero",
        ));
    }
    let n_t = T::from_count(n);
    let units = pop.units();

    let run_partition = |first: usize| -> Result<Accumulator<T>> {
        let mut acc = Accumulator::new(specs.len());
        let mut rest: Vec<usize> = (first + 1..first + n).collect();
        loop {
            let mut hits = usize::from(units[first].has_attribute());
            let mut x_sum = CompensatedSum::new();
            x_sum.add(units[first].x);
            for &i in &rest {
                hits += usize::from(units[i].has_attribute());
                x_sum.add(units[i].x);
            }
            let s = SampleSummary::new(T::from_count(hits) / n_t, x_sum.value() / n_t, n);
            let e_phi = (s.p - p_true) / p_true;
            let e_x = (s.x_bar - x_bar_pop) / x_bar_pop;
            let dp = s.p - p_true;
            acc.e_phi.add(e_phi);
            acc.e_x.add(e_x);
            acc.e_phi_sq.add(e_phi * e_phi);
            acc.e_x_sq.add(e_x * e_x);
            acc.e_phi_e_x.add(e_phi * e_x);
            acc.p.add(s.p);
            acc.p_sq_dev.add(dp * dp);
            for (slot, spec) in acc.estimates.iter_mut().zip(specs) {
                let est = spec.estimate(&s, x_bar_pop).map_err(|e| {
                    let mut subset = vec![first];
                    subset.extend_from_slice(&rest);
                    Error::Subset {
                        label: spec.label(),
                        subset,
                        source: Box::new(e),
                    }
                })?;
                let err = est - p_true;
                slot.0.add(est);
                slot.1.add(err * err);
            }
            if rest.is_empty() || !next_combination(&mut rest, size) {
                break;
            }
        }
        Ok(acc)
    };

    let partials: Vec<Result<Accumulator<T>>> =
        (0..=size - n).into_par_iter().map(run_partition).collect();
    let mut total = Accumulator::new(specs.len());
    for part in partials {
        total.merge(&part?);
    }

    let count_t = T::lit(count as f64);
    let avg = |s: &CompensatedSum<T>| s.value() / count_t;
    let rows = specs
        .iter()
        .zip(&total.estimates)
        .map(|(spec, (est, sq))| {
            let expectation = avg(est);
            ExactRow {
                label: spec.label(),
                expectation,
                bias: expectation - p_true,
                mse: avg(sq),
            }
        })
        .collect();
    Ok(ExactReport {
        rows,
        moments: DeviationMoments {
            e_phi: avg(&total.e_phi),
            e_x: avg(&total.e_x),
            e_phi_sq: avg(&total.e_phi_sq),
            e_x_sq: avg(&total.e_x_sq),
            e_phi_e_x: avg(&total.e_phi_e_x),
            p_mean: avg(&total.p),
            p_var: avg(&total.p_sq_dev),
        },
        sample_count: count as u64,
    })
}

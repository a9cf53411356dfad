use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::check_design;
use crate::error::Result;
use crate::population::{Population, PopulationUnit};
use crate::Scalar;

/// Generator for replicate `replicate` of the study seeded by `seed`.
///
/// Each replicate reads its own ChaCha stream, so the numbers it sees do not
/// depend on which thread runs it or in what order.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Indices of an SRSWOR sample, in draw order.
pub fn draw_srswor_indices<R: rand::Rng + ?Sized>(
    rng: &mut R,
    population: usize,
    n: usize,
) -> Result<Vec<usize>> {
    check_design(n, population)?;
    Ok(index::sample(rng, population, n).into_vec())
}

pub fn draw_srswor<T: Scalar>(
    pop: &Population<T>,
    n: usize,
    seed: u64,
) -> Result<Vec<PopulationUnit<T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = draw_srswor_indices(&mut rng, pop.size(), n)?;
    Ok(idx.into_iter().map(|i| pop.units()[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use std::collections::HashMap;

    fn four() -> Population<f64> {
        Population::from_pairs(&[1, 0, 1, 0], &[2.0, 1.0, 2.0, 1.0]).unwrap()
    }

    #[test]
    fn census_returns_everything() {
        let pop = four();
        let mut got: Vec<_> = draw_srswor_indices(&mut replicate_rng(3, 0), 4, 4).unwrap();
        got.sort_unstable();
        assert_eq!(got, vec![0, 1, 2, 3]);
        assert_eq!(draw_srswor(&pop, 4, 9).unwrap().len(), 4);
    }

    #[test]
    fn deterministic_given_seed() {
        let pop = four();
        assert_eq!(
            draw_srswor(&pop, 2, 42).unwrap(),
            draw_srswor(&pop, 2, 42).unwrap()
        );
    }

    #[test]
    fn invalid_design() {
        let pop = four();
        assert_eq!(
            draw_srswor(&pop, 5, 1),
            Err(Error::InvalidDesign {
                n: 5,
                population: 4
            })
        );
        assert!(draw_srswor(&pop, 0, 1).is_err());
    }

    #[test]
    fn pairs_are_equally_likely() {
        let draws = 100_000;
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for r in 0..draws {
            let mut idx = draw_srswor_indices(&mut replicate_rng(11, r), 4, 2).unwrap();
            idx.sort_unstable();
            *counts.entry((idx[0], idx[1])).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for (&pair, &c) in &counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 1.0 / 6.0).abs() < 0.01, "{pair:?}: {freq}");
        }
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::correspondence::cylinder::{words, CylinderMeasure, CYLINDER_HORIZON};
use crate::correspondence::source::MomentSource;
use crate::error::{Error, Result};
use crate::numeric::{to_f64, Enclosure};

#[derive(Clone, Debug, Serialize)]
pub struct MarkovBias {
    pub order: usize,
    /// `max_w |P(1 | w) - P(1 | w')|` over words `w` of length `order`,
    /// `w'` dropping the oldest bit.
    pub max_conditional_shift: f64,
    /// Context words of length `order` with zero mass.
    pub null_contexts: usize,
}

/// Conditional probabilities `P(1 | w)` for all words up to length `order`,
/// indexed by `(len, word as integer)`.
struct Conditionals {
    table: Vec<Vec<Option<f64>>>,
}

fn word_index(w: &[u8]) -> usize {
    w.iter().fold(0usize, |acc, &b| acc << 1 | b as usize)
}

fn conditionals(nu: &CylinderMeasure<'_>, order: usize) -> Result<Conditionals> {
    let mut table = Vec::with_capacity(order + 1);
    for len in 0..=order {
        let mut row = vec![None; 1 << len];
        for w in words(len) {
            let base = nu.mass(&w)?;
            if base == Enclosure::zero() {
                continue;
            }
            let mut ext = w.clone();
            ext.push(1);
            let one = nu.mass(&ext)?;
            row[word_index(&w)] = Some((one.mid_f64() / base.mid_f64()).clamp(0.0, 1.0));
        }
        table.push(row);
    }
    Ok(Conditionals { table })
}

/// Order-`m` Markov approximation of the symbolic process: each bit is drawn
/// from `nu(w1) / nu(w)` with `w` the previous `m` bits. The report measures
/// how far the conditionals still move between orders `m - 1` and `m`.
pub fn markov_sample(source: &dyn MomentSource, order: usize, len: usize, seed: u64) -> Result<(Vec<u8>, MarkovBias)> {
    if order == 0 || order + 1 > CYLINDER_HORIZON {
        return Err(Error::invalid(format!("Markov order must be in 1..={}", CYLINDER_HORIZON - 1)));
    }
    let nu = CylinderMeasure::new(source);
    nu.prefetch(order + 1)?;
    let cond = conditionals(&nu, order)?;
    let mut shift: f64 = 0.0;
    let mut null_contexts = 0;
    for w in words(order) {
        match cond.table[order][word_index(&w)] {
            None => null_contexts += 1,
            Some(p) => {
                if let Some(p_short) = cond.table[order - 1][word_index(&w[1..])] {
                    shift = shift.max((p - p_short).abs());
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bits: Vec<u8> = Vec::with_capacity(len);
    let mask = (1usize << order) - 1;
    let mut ctx = 0usize;
    for t in 0..len {
        let k = t.min(order);
        let p = cond.table[k][ctx & ((1 << k) - 1)].ok_or_else(|| {
            Error::ZeroProbability(format!("context of length {k} at position {t} has zero mass"))
        })?;
        let b = u8::from(rng.random::<f64>() < p);
        bits.push(b);
        ctx = (ctx << 1 | b as usize) & mask;
    }
    Ok((
        bits,
        MarkovBias {
            order,
            max_conditional_shift: shift,
            null_contexts,
        },
    ))
}

/// `nu(1)` as a float, the target frequency of ones.
pub fn symbol_frequency(source: &dyn MomentSource) -> Result<f64> {
    Ok(to_f64(&source.mean()?.mid()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernoulli::{BernoulliParams, BernoulliSet};
    use crate::correspondence::source::{BernoulliSource, MultipleSource, SeriesSource};
    use crate::rademacher::Partition;

    #[test]
    fn half_source_is_fair_coin() {
        let src = MultipleSource::half();
        let (bits, bias) = markov_sample(&src, 3, 50_000, 11).unwrap();
        assert!(bias.max_conditional_shift < 1e-12);
        assert_eq!(bias.null_contexts, 0);
        let ones = bits.iter().filter(|&&b| b == 1).count() as f64 / bits.len() as f64;
        assert!((ones - 0.5).abs() < 0.02);
    }

    #[test]
    fn markov_chain_frequencies() {
        let src = BernoulliSource::new(BernoulliParams::uniform(), BernoulliSet::Under);
        let (bits, bias) = markov_sample(&src, 6, 100_000, 3).unwrap();
        assert!(bias.max_conditional_shift < 0.5);
        let target = symbol_frequency(&src).unwrap();
        let ones = bits.iter().filter(|&&b| b == 1).count() as f64 / bits.len() as f64;
        assert!((ones - target).abs() < 0.02, "{ones} vs {target}");
        let again = markov_sample(&src, 6, 100_000, 3).unwrap().0;
        assert_eq!(bits, again);
    }

    #[test]
    fn series_bias_shrinks_with_order() {
        let src = SeriesSource::canonical(Partition::all_negative(), 4).unwrap();
        let low = markov_sample(&src, 2, 10, 0).unwrap().1;
        let high = markov_sample(&src, 8, 10, 0).unwrap().1;
        assert!(high.max_conditional_shift <= low.max_conditional_shift);
    }

    #[test]
    fn rejects_bad_order() {
        let src = MultipleSource::half();
        assert!(markov_sample(&src, 0, 10, 0).is_err());
        assert!(markov_sample(&src, 14, 10, 0).is_err());
    }
}

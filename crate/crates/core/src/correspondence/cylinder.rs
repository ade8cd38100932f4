//! Symbolic measures built from a `[0, 1]`-valued `f`: the cylinder
//! `[w_0 ... w_{k-1}]` has mass `int prod_t f_{w_t}(T^t x) d mu` with
//! `f_1 = f` and `f_0 = 1 - f`, so `{x_0 = 1}` has mass `int f`.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::correspondence::source::{in_unit_interval, MomentSource};
use crate::error::{Error, Result};
use crate::numeric::{render_decimal, Enclosure};

/// Longest word whose mass is computed by inclusion-exclusion.
pub const CYLINDER_HORIZON: usize = 14;
/// Tolerance for moments and masses outside `[0, 1]`.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// Cylinder masses of the process `(bit_t)` generated by a source, with
/// moments memoized by shift set.
pub struct CylinderMeasure<'a> {
    source: &'a dyn MomentSource,
    cache: Mutex<HashMap<Vec<u64>, Enclosure>>,
}

impl<'a> CylinderMeasure<'a> {
    pub fn new(source: &'a dyn MomentSource) -> Self {
        CylinderMeasure {
            source,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn source(&self) -> &dyn MomentSource {
        self.source
    }

    pub fn moment(&self, shifts: &[u64]) -> Result<Enclosure> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(shifts) {
            return Ok(v.clone());
        }
        let v = self.source.moment(shifts)?;
        if !in_unit_interval(&v, UNIT_TOLERANCE) {
            return Err(Error::Consistency(format!(
                "moment at shifts {shifts:?} = {} escapes [0, 1]",
                render_decimal(v.mid_f64())
            )));
        }
        self.cache.lock().expect("cache lock").insert(shifts.to_vec(), v.clone());
        Ok(v)
    }

    /// Computes every moment over shift sets inside `[0, len)` in parallel.
    pub fn prefetch(&self, len: usize) -> Result<()> {
        if len > CYLINDER_HORIZON {
            return Err(Error::capacity(format!("prefetch length {len} exceeds {CYLINDER_HORIZON}")));
        }
        let sets: Vec<Vec<u64>> = (1u32..1 << len).map(|m| subset(m, 0)).collect();
        let missing: Vec<Vec<u64>> = {
            let cache = self.cache.lock().expect("cache lock");
            sets.into_iter().filter(|s| !cache.contains_key(s)).collect()
        };
        let values: Vec<(Vec<u64>, Result<Enclosure>)> = missing
            .into_par_iter()
            .map(|s| {
                let v = self.source.moment(&s);
                (s, v)
            })
            .collect();
        for (s, v) in values {
            let v = v?;
            if !in_unit_interval(&v, UNIT_TOLERANCE) {
                return Err(Error::Consistency(format!("moment at shifts {s:?} escapes [0, 1]")));
            }
            self.cache.lock().expect("cache lock").insert(s, v);
        }
        Ok(())
    }

    /// Mass of the cylinder `[word]` placed at position `start`, by
    /// inclusion-exclusion over the zeros of the word.
    pub fn mass_at(&self, start: u64, word: &[u8]) -> Result<Enclosure> {
        if word.len() > CYLINDER_HORIZON {
            return Err(Error::capacity(format!(
                "word length {} exceeds {CYLINDER_HORIZON}",
                word.len()
            )));
        }
        if let Some(&b) = word.iter().find(|&&b| b > 1) {
            return Err(Error::invalid(format!("word symbol {b} is not a bit")));
        }
        let zeros: Vec<u64> = positions(word, 0, start);
        let ones: Vec<u64> = positions(word, 1, start);
        let mut total = Enclosure::zero();
        for mask in 0u32..1 << zeros.len() {
            let mut shifts = ones.clone();
            shifts.extend(
                zeros
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &z)| z),
            );
            shifts.sort_unstable();
            let m = self.moment(&shifts)?;
            if mask.count_ones() % 2 == 0 {
                total = &total + &m;
            } else {
                total = &total - &m;
            }
        }
        Ok(total)
    }

    pub fn mass(&self, word: &[u8]) -> Result<Enclosure> {
        self.mass_at(0, word)
    }
}

fn positions(word: &[u8], bit: u8, start: u64) -> Vec<u64> {
    word.iter()
        .enumerate()
        .filter(|(_, &b)| b == bit)
        .map(|(i, _)| start + i as u64)
        .collect()
}

fn subset(mask: u32, start: u64) -> Vec<u64> {
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| start + i as u64).collect()
}

/// All binary words of length `len`, most significant position first.
pub fn words(len: usize) -> impl Iterator<Item = Vec<u8>> {
    (0u32..1 << len).map(move |m| (0..len).map(|i| (m >> (len - 1 - i) & 1) as u8).collect())
}

pub fn cylinder_measure(source: &dyn MomentSource, word: &[u8]) -> Result<Enclosure> {
    CylinderMeasure::new(source).mass(word)
}

/// Equality of masses: exact equality for exact sources, overlap otherwise.
fn agree(a: &Enclosure, b: &Enclosure, exact: bool) -> bool {
    if exact {
        a == b
    } else {
        a.overlaps(b)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyReport {
    pub depth: usize,
    pub exact: bool,
    pub words_checked: usize,
    pub additivity_failures: Vec<String>,
    pub stationarity_failures: Vec<String>,
    /// Words whose mass is certainly negative.
    pub negative: Vec<String>,
    /// Words whose enclosure straddles zero without a certified sign.
    pub undecided: Vec<String>,
    pub total_mass_one: bool,
}

impl ConsistencyReport {
    pub fn holds(&self) -> bool {
        self.additivity_failures.is_empty()
            && self.stationarity_failures.is_empty()
            && self.negative.is_empty()
            && self.total_mass_one
    }
}

fn render_word(w: &[u8]) -> String {
    if w.is_empty() {
        return "()".into();
    }
    w.iter().map(|b| char::from(b'0' + b)).collect()
}

/// Checks additivity `nu(w) = nu(w0) + nu(w1)`, stationarity
/// `nu(w) = nu(0w) + nu(1w)` and nonnegativity for words up to `depth`.
/// Every mass is computed independently by inclusion-exclusion.
pub fn consistency_check(source: &dyn MomentSource, depth: usize) -> Result<ConsistencyReport> {
    if depth + 1 > CYLINDER_HORIZON {
        return Err(Error::capacity(format!("depth {depth} exceeds {}", CYLINDER_HORIZON - 1)));
    }
    let nu = CylinderMeasure::new(source);
    nu.prefetch(depth + 1)?;
    let exact = source.is_exact();
    let mut masses: HashMap<Vec<u8>, Enclosure> = HashMap::new();
    for len in 0..=depth + 1 {
        for w in words(len) {
            let m = nu.mass(&w)?;
            masses.insert(w, m);
        }
    }
    let mut report = ConsistencyReport {
        depth,
        exact,
        words_checked: 0,
        additivity_failures: Vec::new(),
        stationarity_failures: Vec::new(),
        negative: Vec::new(),
        undecided: Vec::new(),
        total_mass_one: masses[&Vec::new()] == Enclosure::one(),
    };
    let cat = |a: &[u8], b: &[u8]| -> Vec<u8> { a.iter().chain(b).copied().collect() };
    for len in 0..=depth {
        for w in words(len) {
            report.words_checked += 1;
            let m = &masses[&w];
            let right = &masses[&cat(&w, &[0])] + &masses[&cat(&w, &[1])];
            if !agree(m, &right, exact) {
                report.additivity_failures.push(render_word(&w));
            }
            let left = &masses[&cat(&[0], &w)] + &masses[&cat(&[1], &w)];
            if !agree(m, &left, exact) {
                report.stationarity_failures.push(render_word(&w));
            }
            match m.sign() {
                Some(std::cmp::Ordering::Less) => report.negative.push(render_word(&w)),
                None if m.hi() >= &num_traits::Zero::zero() && m.lo() < &num_traits::Zero::zero() => {
                    report.undecided.push(render_word(&w))
                }
                _ => {}
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferRow {
    pub shifts: Vec<u64>,
    /// Mass of `A ∩ S^{-n_1} A ∩ ...` summed over cylinders.
    pub symbolic: Enclosure,
    /// The moment of `f` at the same shifts.
    pub moment: Enclosure,
    /// `symbolic - nu(A)^{k}`.
    pub defect: Enclosure,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferReport {
    pub mean: Enclosure,
    pub pairs: Vec<TransferRow>,
    pub triples: Vec<TransferRow>,
    pub holds: bool,
    /// `|d(n)|` is non-increasing for `n` beyond the dependence length.
    pub defect_decay: Option<bool>,
}

/// `nu(A ∩ S^{-n_1} A ∩ ...)` for `A = {x_0 = 1}` as a sum of cylinder masses
/// over the free coordinates.
pub fn symbolic_intersection(nu: &CylinderMeasure<'_>, shifts: &[u64]) -> Result<Enclosure> {
    let Some(&last) = shifts.last() else {
        return Ok(Enclosure::one());
    };
    let len = last as usize + 1;
    let start = shifts[0];
    let len = len - start as usize;
    let fixed: Vec<usize> = shifts.iter().map(|&s| (s - start) as usize).collect();
    let free: Vec<usize> = (0..len).filter(|i| !fixed.contains(i)).collect();
    if free.len() > 20 {
        return Err(Error::capacity("too many free coordinates"));
    }
    let mut total = Enclosure::zero();
    for mask in 0u32..1 << free.len() {
        let mut w = vec![1u8; len];
        for (j, &i) in free.iter().enumerate() {
            w[i] = (mask >> j & 1) as u8;
        }
        total = &total + &nu.mass_at(start, &w)?;
    }
    Ok(total)
}

/// Compares `nu(A ∩ S^{-n} A)` with `int f T^n f` for `1 <= n <= pair_max`
/// and triple intersections with `n_1 < n_2 <= triple_max`.
pub fn recurrence_transfer_check(
    source: &dyn MomentSource,
    pair_max: u64,
    triple_max: u64,
) -> Result<TransferReport> {
    if pair_max as usize >= CYLINDER_HORIZON || triple_max as usize >= CYLINDER_HORIZON {
        return Err(Error::capacity(format!("shifts must be below {CYLINDER_HORIZON}")));
    }
    let nu = CylinderMeasure::new(source);
    nu.prefetch(pair_max.max(triple_max) as usize + 1)?;
    let exact = source.is_exact();
    let mean = nu.mass(&[1])?;
    let row = |shifts: Vec<u64>| -> Result<TransferRow> {
        let symbolic = symbolic_intersection(&nu, &shifts)?;
        let moment = source.moment(&shifts)?;
        let mut power = Enclosure::one();
        for _ in 0..shifts.len() {
            power = &power * &mean;
        }
        let defect = &symbolic - &power;
        let agrees = agree(&symbolic, &moment, exact);
        Ok(TransferRow {
            shifts,
            symbolic,
            moment,
            defect,
            agrees,
        })
    };
    let pairs = (1..=pair_max).map(|n| row(vec![0, n])).collect::<Result<Vec<_>>>()?;
    let mut triples = Vec::new();
    for n2 in 2..=triple_max {
        for n1 in 1..n2 {
            triples.push(row(vec![0, n1, n2])?);
        }
    }
    let defect_decay = source.dependence_length().and_then(|l| {
        let tail: Vec<_> = pairs.iter().filter(|r| r.shifts[1] > l).collect();
        if tail.len() < 2 {
            return None;
        }
        Some(tail.windows(2).all(|w| w[1].defect.mag() <= w[0].defect.mag()))
    });
    let holds = pairs.iter().chain(&triples).all(|r| r.agrees);
    Ok(TransferReport {
        mean,
        pairs,
        triples,
        holds,
        defect_decay,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernoulli::{joint_probability, BernoulliParams, BernoulliSet};
    use crate::correspondence::source::{BernoulliSource, MultipleSource, SeriesSource, SkewSource};
    use crate::numeric::{q, Q};
    use crate::rademacher::{Partition, SeriesKind};
    use crate::skew::{realize_target, TargetMode};
    use crate::spectral::SeqRule;
    use num_traits::One;

    #[test]
    fn half_source_words() {
        let src = MultipleSource::half();
        let nu = CylinderMeasure::new(&src);
        assert_eq!(nu.mass(&[0, 1]).unwrap(), Enclosure::exact(q(1, 4)));
        assert_eq!(nu.mass(&[1]).unwrap(), Enclosure::exact(q(1, 2)));
        assert_eq!(nu.mass(&[]).unwrap(), Enclosure::one());
        assert!(nu.mass(&[2]).is_err());
    }

    #[test]
    fn word_enumeration() {
        let w: Vec<_> = words(2).collect();
        assert_eq!(w, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(words(0).count(), 1);
    }

    #[test]
    fn bernoulli_cylinders_match_complement_automata() {
        let p = BernoulliParams::new(q(1, 5), q(1, 2), q(3, 10)).unwrap();
        for set in [BernoulliSet::Over, BernoulliSet::Under] {
            let src = BernoulliSource::new(p.clone(), set);
            let nu = CylinderMeasure::new(&src);
            let a = set.automaton();
            let ac = a.complement();
            for w in words(5) {
                let parts: Vec<_> = w
                    .iter()
                    .enumerate()
                    .map(|(t, &b)| (if b == 1 { a.clone() } else { ac.clone() }, t as u32))
                    .collect();
                let direct = joint_probability(&parts, &p).unwrap();
                assert_eq!(nu.mass(&w).unwrap(), Enclosure::exact(direct), "{set:?} {w:?}");
            }
        }
    }

    #[test]
    fn consistency_for_all_sources() {
        let rule = SeqRule::geometric(q(1, 16), q(1, 3)).unwrap();
        let skew = SkewSource::new(realize_target(&rule, TargetMode::Summable).unwrap());
        let series = SeriesSource::canonical(Partition::all_negative(), 4).unwrap();
        let multiple = MultipleSource::canonical(2, SeriesKind::Antisymmetric).unwrap();
        let bern = BernoulliSource::new(BernoulliParams::uniform(), BernoulliSet::Under);
        let sources: [&dyn MomentSource; 4] = [&skew, &series, &multiple, &bern];
        for src in sources {
            let r = consistency_check(src, 5).unwrap();
            assert!(r.holds(), "{r:?}");
            assert!(r.undecided.is_empty());
            assert_eq!(r.words_checked, 63);
        }
    }

    #[test]
    fn transfer_matches_moments() {
        let series = SeriesSource::canonical(Partition::all_negative(), 3).unwrap();
        let r = recurrence_transfer_check(&series, 6, 4).unwrap();
        assert!(r.holds);
        assert_eq!(r.mean, Enclosure::exact(q(1, 2)));
        for row in &r.pairs {
            let n = row.shifts[1];
            let zero = Q::from_integer(0.into());
            if n <= 3 {
                assert!(row.defect.mid() < zero, "{n}");
            } else {
                assert_eq!(row.defect.mid(), zero, "{n}");
            }
        }
        assert_eq!(r.defect_decay, Some(true));
        let bern = BernoulliSource::new(BernoulliParams::uniform(), BernoulliSet::Over);
        let r = recurrence_transfer_check(&bern, 5, 4).unwrap();
        assert!(r.holds);
        assert!(r.pairs.iter().all(|row| row.defect.mid() > Q::from_integer(0.into())));
        assert_eq!(r.triples.len(), 6);
    }

    #[test]
    fn masses_sum_to_one() {
        let src = BernoulliSource::new(BernoulliParams::uniform(), BernoulliSet::Under);
        let nu = CylinderMeasure::new(&src);
        let total: Enclosure = words(4).map(|w| nu.mass_at(3, &w).unwrap()).sum();
        assert_eq!(total, Enclosure::exact(Q::one()));
    }
}

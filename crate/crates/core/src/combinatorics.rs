//! Sets of integers read off sampled trajectories, `E = {m : bit_m = 1}`,
//! and windowed densities of the shifted intersections
//! `E ∩ (E - n_1) ∩ ... ∩ (E - n_l)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::correspondence::MomentSource;
use crate::error::{Error, Result};
use crate::numeric::{to_f64, Enclosure};
use crate::rademacher::Partition;

/// Multiplier on the standard error in every confidence radius.
pub const SIGMA_MULTIPLIER: f64 = 4.0;

/// Membership bitmap over `[0, N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerSet {
    words: Vec<u64>,
    len: usize,
}

impl IntegerSet {
    pub fn from_trajectory(bits: &[u8]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64) + 1];
        for (m, &b) in bits.iter().enumerate() {
            if b != 0 {
                words[m / 64] |= 1 << (m % 64);
            }
        }
        IntegerSet { words, len: bits.len() }
    }

    pub fn from_fn(len: usize, member: impl Fn(usize) -> bool) -> Self {
        let bits: Vec<u8> = (0..len).map(|m| u8::from(member(m))).collect();
        IntegerSet::from_trajectory(&bits)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, m: usize) -> bool {
        m < self.len && self.words[m / 64] >> (m % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// 64 membership bits starting at `start`; bits past the end are 0.
    fn chunk(&self, start: usize) -> u64 {
        let (i, o) = (start / 64, start % 64);
        let lo = self.words.get(i).copied().unwrap_or(0) >> o;
        if o == 0 {
            lo
        } else {
            lo | self.words.get(i + 1).copied().unwrap_or(0) << (64 - o)
        }
    }

    /// `#{m < window : m + s in E for all s in offsets}`.
    pub fn count_intersection(&self, offsets: &[usize], window: usize) -> usize {
        let mut total = 0usize;
        let mut m = 0;
        while m < window {
            let mut acc = u64::MAX;
            for &s in offsets {
                acc &= self.chunk(m + s);
            }
            let remaining = window - m;
            if remaining < 64 {
                acc &= (1u64 << remaining) - 1;
            }
            total += acc.count_ones() as usize;
            m += 64;
        }
        total
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    /// Offsets including 0.
    pub offsets: Vec<u64>,
    pub window: usize,
    pub hits: usize,
    pub estimate: f64,
    pub radius: f64,
    pub effective_samples: f64,
}

/// `4 sqrt(p (1 - p) / N_eff)`.
pub fn confidence_radius(p: f64, effective_samples: f64) -> f64 {
    SIGMA_MULTIPLIER * (p * (1.0 - p) / effective_samples).sqrt()
}

/// Windowed frequency of `m` with `m + s in E` for `s in shifts ∪ {0}`, over
/// `m < N - max shift`. Serial dependence up to distance `dependence`
/// shrinks the sample size to `N_eff = N / (2 dependence + 1)`.
pub fn density_estimate(set: &IntegerSet, shifts: &[u64], dependence: u64) -> Result<DensityEstimate> {
    let mut offsets: Vec<u64> = shifts.to_vec();
    offsets.push(0);
    offsets.sort_unstable();
    offsets.dedup();
    let max = *offsets.last().expect("offsets contain 0") as usize;
    if max >= set.len() {
        return Err(Error::invalid(format!(
            "largest shift {max} leaves no window in a set of length {}",
            set.len()
        )));
    }
    let window = set.len() - max;
    let offs: Vec<usize> = offsets.iter().map(|&s| s as usize).collect();
    let hits = set.count_intersection(&offs, window);
    let estimate = hits as f64 / window as f64;
    let effective_samples = window as f64 / (2 * dependence + 1) as f64;
    Ok(DensityEstimate {
        offsets,
        window,
        hits,
        estimate,
        radius: confidence_radius(estimate, effective_samples),
        effective_samples,
    })
}

/// Estimates at `N / 4`, `N / 2` and `N`, for checking that frequencies settle.
pub fn density_scale_sweep(set: &IntegerSet, shifts: &[u64], dependence: u64) -> Result<Vec<DensityEstimate>> {
    let n = set.len();
    [n / 4, n / 2, n]
        .into_iter()
        .map(|len| {
            let prefix = IntegerSet::from_fn(len, |m| set.contains(m));
            density_estimate(&prefix, shifts, dependence)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The estimate agrees with the exact value and the defect sign is resolved.
    Pass,
    /// The exact defect is large, but the estimate misses it.
    Fail,
    /// `|exact defect|` is below the defect radius.
    Underpowered,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionRow {
    pub shifts: Vec<u64>,
    pub estimate: f64,
    pub radius: f64,
    /// Exact `int prod T^s f`.
    pub exact: f64,
    pub within_radius: bool,
    /// `estimate - d(E)^{l+1}`.
    pub estimated_defect: f64,
    pub defect_radius: f64,
    pub exact_defect: f64,
    /// `|estimated_defect| > defect_radius` with the sign of the exact defect.
    pub sign_resolved: bool,
    /// `|exact_defect| >= 2 defect_radius`.
    pub resolvable: bool,
    pub verdict: Verdict,
}

fn intersection_row(
    set: &IntegerSet,
    source: &dyn MomentSource,
    mean: &DensityEstimate,
    shifts: &[u64],
    dependence: u64,
) -> Result<IntersectionRow> {
    let est = density_estimate(set, shifts, dependence)?;
    let exact = to_f64(&source.moment(&est.offsets)?.mid());
    let exact_mean = to_f64(&source.mean()?.mid());
    let l = est.offsets.len() as i32;
    let d = mean.estimate;
    let estimated_defect = est.estimate - d.powi(l);
    let defect_radius = est.radius + l as f64 * d.powi(l - 1) * mean.radius;
    let exact_defect = exact - exact_mean.powi(l);
    let sign_resolved = estimated_defect.abs() > defect_radius && estimated_defect.signum() == exact_defect.signum();
    let within_radius = (est.estimate - exact).abs() <= est.radius;
    let verdict = if exact_defect.abs() < defect_radius {
        Verdict::Underpowered
    } else if within_radius && estimated_defect.signum() == exact_defect.signum() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(IntersectionRow {
        shifts: shifts.to_vec(),
        estimate: est.estimate,
        radius: est.radius,
        exact,
        within_radius,
        estimated_defect,
        defect_radius,
        exact_defect,
        sign_resolved,
        resolvable: exact_defect.abs() >= 2.0 * defect_radius,
        verdict,
    })
}

fn mixing_length(source: &dyn MomentSource) -> Result<u64> {
    source.dependence_length().ok_or_else(|| {
        Error::invalid("source is not mixing; densities along one orbit need not match its correlations")
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SignPatternReport {
    pub seed: u64,
    pub len: usize,
    pub dependence: u64,
    pub mean: DensityEstimate,
    pub rows: Vec<IntersectionRow>,
    /// Exact defect signs that contradict the partition.
    pub partition_mismatches: Vec<u64>,
}

impl SignPatternReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.verdict == Verdict::Fail).count()
    }
}

/// Samples `len` symbols and compares `d(E ∩ (E - n))` with the exact pair
/// correlation for `1 <= n <= n_max`. With a partition, the exact defect
/// signs are also checked against `S+` / `S-`.
pub fn sign_pattern_experiment(
    source: &dyn MomentSource,
    partition: Option<&Partition>,
    n_max: u64,
    len: usize,
    seed: u64,
) -> Result<SignPatternReport> {
    let dependence = mixing_length(source)?;
    let set = IntegerSet::from_trajectory(&source.sample(len, seed)?);
    let mean = density_estimate(&set, &[], dependence)?;
    let rows = (1..=n_max)
        .map(|n| intersection_row(&set, source, &mean, &[n], dependence))
        .collect::<Result<Vec<_>>>()?;
    let partition_mismatches = match partition {
        None => Vec::new(),
        Some(p) => rows
            .iter()
            .filter(|r| {
                let n = r.shifts[0];
                (p.is_positive(n) && r.exact_defect <= 0.0) || (!p.is_positive(n) && r.exact_defect >= 0.0)
            })
            .map(|r| r.shifts[0])
            .collect(),
    };
    Ok(SignPatternReport {
        seed,
        len,
        dependence,
        mean,
        rows,
        partition_mismatches,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionReport {
    pub seed: u64,
    pub len: usize,
    pub mean: DensityEstimate,
    pub rows: Vec<IntersectionRow>,
}

/// Multiple-intersection densities `d(E ∩ (E - n_1) ∩ ...)` against
/// `d(E)^{l+1}` for each tuple of shifts.
pub fn intersection_experiment(
    source: &dyn MomentSource,
    tuples: &[Vec<u64>],
    len: usize,
    seed: u64,
) -> Result<IntersectionReport> {
    let dependence = mixing_length(source)?;
    let set = IntegerSet::from_trajectory(&source.sample(len, seed)?);
    let mean = density_estimate(&set, &[], dependence)?;
    let rows = tuples
        .iter()
        .map(|t| intersection_row(&set, source, &mean, t, dependence))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntersectionReport { seed, len, mean, rows })
}

/// Aggregate over seeds: how often estimates fall within their radius and
/// how often resolvable defects have their sign resolved.
#[derive(Clone, Debug, Serialize)]
pub struct BatchSummary {
    pub seeds: usize,
    pub cases: usize,
    pub within_radius: usize,
    pub within_fraction: f64,
    pub resolvable: usize,
    pub resolved_of_resolvable: usize,
    pub failures: usize,
    /// Rows whose estimate lies below `d(E)^{l+1}` among resolved rows.
    pub resolved_below_power: usize,
    pub resolved: usize,
}

impl BatchSummary {
    fn from_rows<'a>(seeds: usize, rows: impl Iterator<Item = &'a IntersectionRow>) -> Self {
        let mut s = BatchSummary {
            seeds,
            cases: 0,
            within_radius: 0,
            within_fraction: 0.0,
            resolvable: 0,
            resolved_of_resolvable: 0,
            failures: 0,
            resolved_below_power: 0,
            resolved: 0,
        };
        for r in rows {
            s.cases += 1;
            s.within_radius += usize::from(r.within_radius);
            s.failures += usize::from(r.verdict == Verdict::Fail);
            if r.resolvable {
                s.resolvable += 1;
                s.resolved_of_resolvable += usize::from(r.sign_resolved);
            }
            if r.sign_resolved {
                s.resolved += 1;
                s.resolved_below_power += usize::from(r.estimated_defect < 0.0);
            }
        }
        s.within_fraction = if s.cases == 0 {
            1.0
        } else {
            s.within_radius as f64 / s.cases as f64
        };
        s
    }
}

/// Runs [`sign_pattern_experiment`] for each seed in parallel; reports are
/// returned in seed order.
pub fn sign_pattern_batch(
    source: &dyn MomentSource,
    partition: Option<&Partition>,
    n_max: u64,
    len: usize,
    seeds: &[u64],
) -> Result<(Vec<SignPatternReport>, BatchSummary)> {
    let reports = seeds
        .par_iter()
        .map(|&seed| sign_pattern_experiment(source, partition, n_max, len, seed))
        .collect::<Result<Vec<_>>>()?;
    let summary = BatchSummary::from_rows(seeds.len(), reports.iter().flat_map(|r| &r.rows));
    Ok((reports, summary))
}

pub fn intersection_batch(
    source: &dyn MomentSource,
    tuples: &[Vec<u64>],
    len: usize,
    seeds: &[u64],
) -> Result<(Vec<IntersectionReport>, BatchSummary)> {
    let reports = seeds
        .par_iter()
        .map(|&seed| intersection_experiment(source, tuples, len, seed))
        .collect::<Result<Vec<_>>>()?;
    let summary = BatchSummary::from_rows(seeds.len(), reports.iter().flat_map(|r| &r.rows));
    Ok((reports, summary))
}

/// Exact defect `int prod T^s f - (int f)^{l+1}` for the offsets `{0} ∪ shifts`.
pub fn exact_defect(source: &dyn MomentSource, shifts: &[u64]) -> Result<Enclosure> {
    let mut offsets = shifts.to_vec();
    offsets.push(0);
    offsets.sort_unstable();
    offsets.dedup();
    let mean = source.mean()?;
    let mut power = Enclosure::one();
    for _ in 0..offsets.len() {
        power = &power * &mean;
    }
    Ok(&source.moment(&offsets)? - &power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernoulli::{BernoulliParams, BernoulliSet};
    use crate::correspondence::{BernoulliSource, MultipleSource, SeriesSource};
    use crate::numeric::q;
    use proptest::prelude::*;

    #[test]
    fn periodic_sets() {
        let all = IntegerSet::from_fn(1000, |_| true);
        let e = density_estimate(&all, &[5], 0).unwrap();
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.window, 995);
        let even = IntegerSet::from_fn(1000, |m| m % 2 == 0);
        assert_eq!(density_estimate(&even, &[1], 0).unwrap().estimate, 0.0);
        assert_eq!(density_estimate(&even, &[2], 0).unwrap().estimate, 0.5);
        assert!(density_estimate(&even, &[1000], 0).is_err());
    }

    #[test]
    fn bitmap_basics() {
        let s = IntegerSet::from_trajectory(&[1, 0, 1, 1]);
        assert_eq!(s.count(), 3);
        assert!(s.contains(0) && !s.contains(1) && !s.contains(4));
        assert_eq!(s.count_intersection(&[0, 1], 3), 1);
    }

    proptest! {
        #[test]
        fn intersection_count_matches_naive(
            bits in prop::collection::vec(0u8..2, 1..400),
            shifts in prop::collection::btree_set(0usize..70, 1..4),
        ) {
            let set = IntegerSet::from_trajectory(&bits);
            let offs: Vec<usize> = shifts.into_iter().collect();
            let max = *offs.last().unwrap();
            prop_assume!(max < bits.len());
            let window = bits.len() - max;
            let naive = (0..window).filter(|&m| offs.iter().all(|&s| bits[m + s] == 1)).count();
            prop_assert_eq!(set.count_intersection(&offs, window), naive);
        }

        #[test]
        fn periodic_densities_exact_up_to_edges(period in 1usize..12, phase in 0usize..12, shift in 0u64..30) {
            let len = 5000;
            let set = IntegerSet::from_fn(len, |m| (m + phase) % period == 0);
            let e = density_estimate(&set, &[shift], 0).unwrap();
            let exact = if shift as usize % period == 0 { 1.0 / period as f64 } else { 0.0 };
            prop_assert!((e.estimate - exact).abs() <= (shift as f64 + period as f64) / len as f64 + 1e-12);
        }
    }

    #[test]
    fn over_bernoulli_pair_excess() {
        let src = BernoulliSource::new(BernoulliParams::uniform(), BernoulliSet::Over);
        let report = sign_pattern_experiment(&src, None, 5, 1_000_000, 1).unwrap();
        let r1 = &report.rows[0];
        assert!((r1.estimate - 1.0 / 3.0).abs() < 5e-3, "{}", r1.estimate);
        assert!((r1.exact - 1.0 / 3.0).abs() < 1e-15);
        assert!(r1.sign_resolved);
        assert_eq!(r1.verdict, Verdict::Pass);
        assert_eq!(report.failures(), 0);
    }

    #[test]
    fn half_source_is_underpowered() {
        let src = MultipleSource::half();
        let report = sign_pattern_experiment(&src, None, 4, 100_000, 3).unwrap();
        assert!(report.rows.iter().all(|r| r.verdict == Verdict::Underpowered));
        assert!(report.rows.iter().all(|r| r.exact_defect == 0.0));
    }

    #[test]
    fn alternating_partition_signs() {
        let p = Partition::alternating();
        let src = SeriesSource::canonical(p.clone(), 10).unwrap();
        let report = sign_pattern_experiment(&src, Some(&p), 6, 200_000, 5).unwrap();
        assert!(report.partition_mismatches.is_empty());
        assert_eq!(report.failures(), 0);
        let d1 = exact_defect(&src, &[1]).unwrap();
        assert!(d1.mid() > q(0, 1));
    }

    #[test]
    fn batch_is_deterministic() {
        let src = BernoulliSource::new(BernoulliParams::uniform(), BernoulliSet::Under);
        let (a, sa) = sign_pattern_batch(&src, None, 3, 20_000, &[1, 2, 3]).unwrap();
        let (b, _) = sign_pattern_batch(&src, None, 3, 20_000, &[1, 2, 3]).unwrap();
        assert_eq!(sa.cases, 9);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.seed, y.seed);
            assert_eq!(x.rows[0].estimate, y.rows[0].estimate);
        }
    }

    #[test]
    fn triple_intersections_run() {
        let src = MultipleSource::canonical(3, crate::rademacher::SeriesKind::Antisymmetric).unwrap();
        let tuples = vec![vec![1, 2], vec![1, 3]];
        let r = intersection_experiment(&src, &tuples, 50_000, 9).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows.iter().all(|row| row.exact_defect < 0.0));
        assert!(exact_defect(&src, &[1, 2]).unwrap().mid() < q(0, 1));
    }
}

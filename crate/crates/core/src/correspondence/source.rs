use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bernoulli::{joint_probability, BernoulliParams, BernoulliSet};
use crate::error::{Error, Result};
use crate::numeric::{q, to_f64, Enclosure, Q};
use crate::rademacher::{affine_moment, AffineRescale, SeriesKind, SignedSeries};
use crate::skew::SkewSystem;

/// Which construction a source realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Rescaled sign-controlled series `f~ = 1/2 + f / (2M)`.
    RademacherSeries,
    /// `f = (1 + h) / 2` from the multiple-correlation construction.
    RademacherMultiple,
    /// `f(x, y) = (1 + cos 2 pi y) / 2` on the skew product.
    SkewProduct,
    /// Indicator of one of the explicit Bernoulli sets.
    BernoulliIndicator,
}

/// A `[0, 1]`-valued function on a measure-preserving system, accessed
/// through its multilinear moments.
pub trait MomentSource: Send + Sync {
    /// `int prod_{s in shifts} T^s f d mu` for strictly increasing shifts.
    fn moment(&self, shifts: &[u64]) -> Result<Enclosure>;

    fn provenance(&self) -> Provenance;

    /// Whether moments are exact rationals.
    fn is_exact(&self) -> bool;

    /// Distance beyond which `f` and `T^n f` are independent up to
    /// negligible terms; `None` for sources that are not mixing.
    fn dependence_length(&self) -> Option<u64>;

    /// `f(T^m x)` for `m < len` along one draw of `x`, in floating point.
    fn sample_values(&self, len: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>>;

    fn mean(&self) -> Result<Enclosure> {
        self.moment(&[0])
    }

    /// Exact sampler: draw `x`, then independent bits with
    /// `P(bit_m = 1) = f(T^m x)`.
    fn sample(&self, len: usize, seed: u64) -> Result<Vec<u8>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = self.sample_values(len, &mut rng)?;
        Ok(values
            .into_iter()
            .map(|p| u8::from(rng.random::<f64>() < p))
            .collect())
    }
}

pub(crate) fn check_shifts(shifts: &[u64]) -> Result<()> {
    if shifts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("shifts must be strictly increasing"));
    }
    Ok(())
}

fn random_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// `f~ = 1/2 + f / (2M)` with `f = g + sum_{k=1}^{K} a_k T^k g`; `f~` is a
/// function of `K + 1` consecutive signs, so moments are computed exactly
/// by a transfer recursion over windows.
#[derive(Clone, Debug)]
pub struct SeriesSource {
    series: SignedSeries,
    support: usize,
    rescale: AffineRescale,
    /// `f~(window) * denom` for each window of `K + 1` signs, bit `j` set
    /// meaning `x(s + j) = +1`.
    table: Vec<BigInt>,
    denom: BigInt,
    coeffs: Vec<f64>,
}

/// Largest support handled by the window recursion.
pub const MAX_SERIES_SUPPORT: usize = 14;

impl SeriesSource {
    pub fn new(series: SignedSeries) -> Result<Self> {
        if series.kind != SeriesKind::OneSided {
            return Err(Error::invalid("series source needs a one-sided series"));
        }
        let support = series
            .support_end()
            .ok_or_else(|| Error::invalid("series source needs a finitely supported series"))?
            as usize;
        if support > MAX_SERIES_SUPPORT {
            return Err(Error::capacity(format!(
                "series support {support} exceeds {MAX_SERIES_SUPPORT}"
            )));
        }
        let rescale = AffineRescale::for_series(&series);
        let a: Vec<Q> = (0..=support)
            .map(|j| if j == 0 { Q::one() } else { series.value(j as i64) })
            .collect();
        let values: Vec<Q> = (0..1usize << (support + 1))
            .map(|w| {
                let f = a
                    .iter()
                    .enumerate()
                    .map(|(j, aj)| if w >> j & 1 == 1 { aj.clone() } else { -aj.clone() })
                    .fold(Q::zero(), |x, y| x + y);
                rescale.apply(&f)
            })
            .collect();
        let denom = values.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
        let table = values.iter().map(|v| v.numer() * (&denom / v.denom())).collect();
        let coeffs = a.iter().map(to_f64).collect();
        Ok(SeriesSource {
            series,
            support,
            rescale,
            table,
            denom,
            coeffs,
        })
    }

    /// Canonical sign-controlled series truncated to `support` terms.
    pub fn canonical(partition: crate::rademacher::Partition, support: u64) -> Result<Self> {
        SeriesSource::new(SignedSeries::canonical_sign_control(partition).truncated(support))
    }

    pub fn series(&self) -> &SignedSeries {
        &self.series
    }

    pub fn rescale(&self) -> &AffineRescale {
        &self.rescale
    }
}

impl MomentSource for SeriesSource {
    fn moment(&self, shifts: &[u64]) -> Result<Enclosure> {
        check_shifts(shifts)?;
        let Some(&last) = shifts.last() else {
            return Ok(Enclosure::one());
        };
        let k = self.support;
        // signs before the first shift are never read
        let first = shifts[0];
        let end = (last - first) as usize + k;
        let mut v = vec![BigInt::one(); 1 << k];
        let mut next = vec![BigInt::zero(); 1 << k];
        let mut pending = shifts.iter().peekable();
        for t in k..=end {
            let s = (t - k) as u64 + first;
            let apply = pending.peek().is_some_and(|&&x| x == s);
            if apply {
                pending.next();
            }
            next.iter_mut().for_each(|x| x.set_zero());
            for (state, weight) in v.iter().enumerate() {
                if weight.is_zero() {
                    continue;
                }
                for b in 0..2usize {
                    let w = state | (b << k);
                    let target = w >> 1;
                    if apply {
                        next[target] += weight * &self.table[w];
                    } else {
                        next[target] += weight;
                    }
                }
            }
            std::mem::swap(&mut v, &mut next);
        }
        let total: BigInt = v.iter().sum();
        let scale = num_traits::pow(self.denom.clone(), shifts.len()) << (end + 1);
        Ok(Enclosure::exact(Q::new(total, scale)))
    }

    fn provenance(&self) -> Provenance {
        Provenance::RademacherSeries
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn dependence_length(&self) -> Option<u64> {
        Some(self.support as u64)
    }

    fn sample_values(&self, len: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let k = self.support;
        let x: Vec<f64> = (0..len + k).map(|_| random_sign(rng)).collect();
        let offset = to_f64(&self.rescale.offset);
        let scale = to_f64(&self.rescale.scale);
        Ok((0..len)
            .map(|m| {
                let f: f64 = self.coeffs.iter().zip(&x[m..=m + k]).map(|(a, s)| a * s).sum();
                (offset + scale * f).clamp(0.0, 1.0)
            })
            .collect())
    }
}

/// `f = (1 + h) / 2` with `h = g sum_{k in Z} a_k T^k g`.
#[derive(Clone, Debug)]
pub struct MultipleSource {
    series: SignedSeries,
    reach: u64,
    coeffs: Vec<f64>,
}

/// Coefficients beyond this magnitude-sum threshold are dropped when
/// sampling in floating point.
const SAMPLING_TAIL: f64 = 1e-13;

impl MultipleSource {
    pub fn new(series: SignedSeries) -> Result<Self> {
        if series.kind == SeriesKind::OneSided {
            return Err(Error::invalid("multiple source needs a two-sided series"));
        }
        if series.two_sided_abs_sum() > Q::one() {
            return Err(Error::invalid("sum |a_k| must be <= 1 so that f takes values in [0, 1]"));
        }
        let reach = match series.support_end() {
            Some(l) => l,
            None => {
                let mut l = series.horizon();
                while to_f64(&series.abs_sum_after(l)) > SAMPLING_TAIL {
                    l += 1;
                }
                l
            }
        };
        let coeffs = (1..=reach).map(|k| to_f64(&series.value(k as i64))).collect();
        Ok(MultipleSource { series, reach, coeffs })
    }

    /// `f = 1/2`.
    pub fn half() -> Self {
        MultipleSource::new(SignedSeries::zero(SeriesKind::Symmetric)).expect("zero series")
    }

    pub fn canonical(order: usize, kind: SeriesKind) -> Result<Self> {
        MultipleSource::new(SignedSeries::canonical_multiple(order, kind)?)
    }

    pub fn series(&self) -> &SignedSeries {
        &self.series
    }
}

impl MomentSource for MultipleSource {
    fn moment(&self, shifts: &[u64]) -> Result<Enclosure> {
        check_shifts(shifts)?;
        let s: Vec<i64> = shifts.iter().map(|&x| x as i64).collect();
        Ok(Enclosure::exact(affine_moment(&self.series, &s)?))
    }

    fn provenance(&self) -> Provenance {
        Provenance::RademacherMultiple
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn dependence_length(&self) -> Option<u64> {
        Some(2 * self.reach)
    }

    fn sample_values(&self, len: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let r = self.reach as usize;
        let x: Vec<f64> = (0..len + 2 * r).map(|_| random_sign(rng)).collect();
        let sign = match self.series.kind {
            SeriesKind::Antisymmetric => -1.0,
            _ => 1.0,
        };
        Ok((0..len)
            .map(|m| {
                let c = m + r;
                let mut h = 0.0;
                for (i, a) in self.coeffs.iter().enumerate() {
                    let k = i + 1;
                    h += a * (x[c + k] + sign * x[c - k]);
                }
                (0.5 * (1.0 + x[c] * h)).clamp(0.0, 1.0)
            })
            .collect())
    }
}

/// `f(x, y) = (1 + cos 2 pi y) / 2` on the skew product over `sigma`.
#[derive(Clone, Debug)]
pub struct SkewSource {
    sys: SkewSystem,
}

impl SkewSource {
    pub fn new(sys: SkewSystem) -> Self {
        SkewSource { sys }
    }

    pub fn system(&self) -> &SkewSystem {
        &self.sys
    }

    fn draw_x(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let sigma = self.sys.sigma();
        let bound = sigma
            .abs_sum_bound()
            .ok_or_else(|| Error::invalid("sampling needs an absolutely summable sigma"))?;
        let ceiling = 1.0 + 2.0 * to_f64(&bound);
        for _ in 0..1_000_000 {
            let t: f64 = rng.random();
            let u: f64 = rng.random::<f64>() * ceiling;
            if u < sigma.density_at(t)?.mid() {
                return Ok(t);
            }
        }
        Err(Error::Inconclusive("rejection sampling from sigma did not accept".into()))
    }
}

impl MomentSource for SkewSource {
    /// Expanding `f = 1/2 + e(y)/4 + e(-y)/4` at each shift, the `y`
    /// integral keeps sign choices `e_i` with `sum e_i = 0`, and the
    /// `x` integral gives `sigma_hat(sum e_i s_i)`.
    fn moment(&self, shifts: &[u64]) -> Result<Enclosure> {
        check_shifts(shifts)?;
        // (sum e_i, sum e_i s_i) -> weight
        let mut states: HashMap<(i64, i64), Q> = HashMap::from([((0, 0), Q::one())]);
        for &s in shifts {
            let mut next: HashMap<(i64, i64), Q> = HashMap::new();
            for ((e, f), w) in &states {
                *next.entry((*e, *f)).or_insert_with(Q::zero) += w * q(1, 2);
                *next.entry((e + 1, f + s as i64)).or_insert_with(Q::zero) += w * q(1, 4);
                *next.entry((e - 1, f - s as i64)).or_insert_with(Q::zero) += w * q(1, 4);
            }
            states = next;
        }
        let mut keys: Vec<_> = states.keys().copied().filter(|(e, _)| *e == 0).collect();
        keys.sort_unstable();
        Ok(keys
            .into_iter()
            .map(|k| self.sys.sigma().coefficient(k.1).scale(&states[&k]))
            .sum())
    }

    fn provenance(&self) -> Provenance {
        Provenance::SkewProduct
    }

    fn is_exact(&self) -> bool {
        let h = self.sys.sigma().horizon() as i64;
        (1..=h).all(|n| self.sys.sigma().coefficient(n).is_exact())
    }

    fn dependence_length(&self) -> Option<u64> {
        None
    }

    fn sample_values(&self, len: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let x = self.draw_x(rng)?;
        let y: f64 = rng.random();
        Ok((0..len)
            .map(|m| {
                let phase = (y + (m as f64 * x).rem_euclid(1.0)).rem_euclid(1.0);
                0.5 * (1.0 + (std::f64::consts::TAU * phase).cos())
            })
            .collect())
    }
}

/// Indicator of an explicit Bernoulli set; moments are exact joint
/// probabilities of delayed copies of its automaton.
#[derive(Clone, Debug)]
pub struct BernoulliSource {
    params: BernoulliParams,
    set: BernoulliSet,
}

impl BernoulliSource {
    pub fn new(params: BernoulliParams, set: BernoulliSet) -> Self {
        BernoulliSource { params, set }
    }

    pub fn params(&self) -> &BernoulliParams {
        &self.params
    }

    pub fn set(&self) -> BernoulliSet {
        self.set
    }
}

impl MomentSource for BernoulliSource {
    fn moment(&self, shifts: &[u64]) -> Result<Enclosure> {
        check_shifts(shifts)?;
        let spec = self.set.automaton();
        let parts: Vec<_> = shifts.iter().map(|&s| (spec.clone(), s as u32)).collect();
        Ok(Enclosure::exact(joint_probability(&parts, &self.params)?))
    }

    fn provenance(&self) -> Provenance {
        Provenance::BernoulliIndicator
    }

    fn is_exact(&self) -> bool {
        true
    }

    /// Dependence decays like `n p0^n`; the length is where that drops
    /// below `1e-9`.
    fn dependence_length(&self) -> Option<u64> {
        let p0 = to_f64(self.params.p0());
        let mut l = 1u64;
        while (l as f64 + 1.0) * p0.powi(l as i32) > 1e-9 {
            l += 1;
        }
        Some(l)
    }

    fn sample_values(&self, len: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let p0 = to_f64(self.params.p0());
        let p01 = p0 + to_f64(self.params.p1());
        let draw = |rng: &mut ChaCha8Rng| -> u8 {
            let u: f64 = rng.random();
            if u < p0 {
                0
            } else if u < p01 {
                1
            } else {
                2
            }
        };
        let mut x: Vec<u8> = (0..len).map(|_| draw(rng)).collect();
        // extend until the last position has two non-zero entries after it
        let mut nonzero_after = 0;
        let start = x.len().saturating_sub(1);
        for &c in &x[start..] {
            nonzero_after += usize::from(c != 0);
        }
        while nonzero_after < 2 {
            let c = draw(rng);
            nonzero_after += usize::from(c != 0);
            x.push(c);
        }
        // reverse scan: first and second non-zero symbol at or after m
        let mut first = 0u8;
        let mut second = 0u8;
        let mut out = vec![0.0; len];
        for m in (0..x.len()).rev() {
            if x[m] != 0 {
                second = first;
                first = x[m];
            }
            if m < len {
                let hit = match self.set {
                    BernoulliSet::Over => first == 1,
                    BernoulliSet::Under => first == 1 && second == 2,
                };
                out[m] = if hit { 1.0 } else { 0.0 };
            }
        }
        Ok(out)
    }
}

/// Checks a moment lies in `[0, 1]` up to `tol`.
pub(crate) fn in_unit_interval(e: &Enclosure, tol: f64) -> bool {
    let tol = crate::numeric::from_f64_exact(tol);
    e.lo() >= &-tol.clone() && e.hi() <= &(Q::one() + tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernoulli::family_params;
    use crate::numeric::qi;
    use crate::rademacher::{pair_correlation, Partition};
    use crate::skew::{realize_target, TargetMode};
    use crate::spectral::SeqRule;

    #[test]
    fn series_source_matches_pair_formula() {
        let src = SeriesSource::canonical(Partition::all_negative(), 6).unwrap();
        let r = src.rescale().clone();
        let mean = src.moment(&[0]).unwrap();
        assert_eq!(mean, Enclosure::exact(q(1, 2)));
        for n in 1..=8u64 {
            let pair = src.moment(&[3, 3 + n]).unwrap();
            let d_f = pair_correlation(src.series(), n).unwrap();
            let expected = q(1, 4) + r.defect(&d_f);
            assert_eq!(pair, Enclosure::exact(expected), "n = {n}");
        }
    }

    #[test]
    fn series_source_empty_series_is_fair_coin() {
        let src = SeriesSource::new(SignedSeries::zero(SeriesKind::OneSided)).unwrap();
        assert_eq!(src.moment(&[0, 1]).unwrap(), Enclosure::exact(q(1, 4)));
        assert_eq!(src.moment(&[0]).unwrap(), Enclosure::exact(q(1, 2)));
    }

    #[test]
    fn multiple_source_pairs() {
        let src = MultipleSource::canonical(3, SeriesKind::Antisymmetric).unwrap();
        let a1 = src.series().value(1);
        assert_eq!(src.moment(&[2, 3]).unwrap(), Enclosure::exact((Q::one() - &a1 * &a1) / qi(4)));
        let half = MultipleSource::half();
        assert_eq!(half.moment(&[0, 1, 5]).unwrap(), Enclosure::exact(q(1, 8)));
    }

    #[test]
    fn skew_source_pairs() {
        let rule = SeqRule::geometric(q(1, 16), q(1, 3)).unwrap();
        let src = SkewSource::new(realize_target(&rule, TargetMode::Summable).unwrap());
        assert_eq!(src.moment(&[0]).unwrap(), Enclosure::exact(q(1, 2)));
        for n in 1..6u64 {
            let expected = q(1, 4) + rule.value(n);
            assert_eq!(src.moment(&[1, 1 + n]).unwrap(), Enclosure::exact(expected));
        }
        assert!(src.moment(&[0, 1, 2]).unwrap().as_exact().is_some());
        assert!(src.dependence_length().is_none());
    }

    #[test]
    fn bernoulli_source_pairs() {
        let p = family_params(&q(1, 4)).unwrap();
        let src = BernoulliSource::new(p.clone(), BernoulliSet::Under);
        assert_eq!(src.moment(&[0, 1]).unwrap(), Enclosure::exact(q(1, 100)));
        assert_eq!(src.moment(&[4, 5]).unwrap(), Enclosure::exact(q(1, 100)));
        assert_eq!(src.mean().unwrap(), Enclosure::exact(q(4, 25)));
    }

    #[test]
    fn rejects_unsorted_shifts() {
        let src = MultipleSource::half();
        assert!(src.moment(&[2, 1]).is_err());
        assert!(src.moment(&[1, 1]).is_err());
    }

    #[test]
    fn samplers_are_deterministic_and_in_range() {
        let sources: Vec<Box<dyn MomentSource>> = vec![
            Box::new(SeriesSource::canonical(Partition::alternating(), 10).unwrap()),
            Box::new(MultipleSource::canonical(3, SeriesKind::Antisymmetric).unwrap()),
            Box::new(BernoulliSource::new(BernoulliParams::uniform(), BernoulliSet::Over)),
            Box::new(SkewSource::new(
                realize_target(&SeqRule::geometric(q(1, 16), q(1, 3)).unwrap(), TargetMode::Summable).unwrap(),
            )),
        ];
        for src in &sources {
            let a = src.sample(2000, 7).unwrap();
            let b = src.sample(2000, 7).unwrap();
            let c = src.sample(2000, 8).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
            assert!(a.iter().all(|&x| x <= 1));
        }
    }

    #[test]
    fn bernoulli_sampler_frequency() {
        let src = BernoulliSource::new(BernoulliParams::uniform(), BernoulliSet::Over);
        let bits = src.sample(200_000, 1).unwrap();
        let freq = bits.iter().map(|&b| b as f64).sum::<f64>() / bits.len() as f64;
        assert!((freq - 0.5).abs() < 0.02, "{freq}");
    }
}

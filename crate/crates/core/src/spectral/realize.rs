//! Realizing prescribed sequences as Fourier coefficients of probability
//! measures with nonnegative densities.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{q, qi, Enclosure, Q};
use crate::spectral::measure::{FourierMeasure, Tail};
use crate::spectral::rules::SeqRule;

/// Default explicit horizon for realized measures.
pub const DEFAULT_HORIZON: u64 = 256;

/// `c_n = scale * a_n`, accepted when `sum |c_n| <= 1/2`, which makes
/// `1 + 2 sum c_n cos(2 pi n t) >= 0` everywhere.
pub fn realize_summable(rule: &SeqRule, scale: &Q, horizon: u64) -> Result<FourierMeasure> {
    if !scale.is_positive() {
        return Err(Error::invalid("scale must be positive"));
    }
    let scaled = rule.scaled(scale);
    let total = scaled
        .abs_tail_sum(1)
        .ok_or_else(|| Error::invalid("coefficient rule is not absolutely summable"))?;
    if total > q(1, 2) {
        return Err(Error::invalid(format!(
            "scaled coefficient sum {} exceeds 1/2; density could go negative",
            crate::numeric::render_rational(&total)
        )));
    }
    let explicit = (1..=horizon)
        .map(|n| Enclosure::exact(scaled.value(n)))
        .collect();
    Ok(FourierMeasure::from_parts(explicit, Tail::Rule(scaled)))
}

/// A sequence that decreases convexly to zero, checked term by term up to
/// the point where the rule's closed form takes over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexSequence {
    rule: SeqRule,
}

impl ConvexSequence {
    pub fn new(rule: SeqRule, check_horizon: u64) -> Result<Self> {
        if !rule.converges_to_zero() {
            return Err(Error::invalid("sequence does not converge to 0"));
        }
        let from = rule
            .convex_from()
            .ok_or_else(|| Error::invalid("rule admits no convexity tail argument"))?;
        let last = check_horizon.max(from) + 1;
        let a: Vec<Q> = (1..=last + 1).map(|n| rule.value(n)).collect();
        for n in 1..=last {
            let an = &a[(n - 1) as usize];
            let next = &a[n as usize];
            if an.is_negative() {
                return Err(Error::invalid(format!("a_{n} < 0")));
            }
            if next > an {
                return Err(Error::invalid(format!("not non-increasing: a_{} > a_{n}", n + 1)));
            }
            if n >= 2 {
                let prev = &a[(n - 2) as usize];
                if prev + next - qi(2) * an < Q::zero() {
                    return Err(Error::invalid(format!("not convex at n = {n}")));
                }
            }
        }
        Ok(ConvexSequence { rule })
    }

    pub fn rule(&self) -> &SeqRule {
        &self.rule
    }

    pub fn value(&self, n: u64) -> Q {
        if n == 0 {
            Q::one()
        } else {
            self.rule.value(n)
        }
    }
}

/// Fejer-kernel realization of a convex sequence.
///
/// With `a_0 := 1` the density is `sum_{m >= 1} m D2_m K_{m-1}` where
/// `D2_m = a_{m-1} + a_{m+1} - 2 a_m` and `K_{m-1}` has coefficients
/// `(1 - |k| / m)_+`, so `c_k = sum_{m > k} (m - k) D2_m = a_k`. Truncating at
/// `m <= horizon` leaves the exact remainder
/// `(horizon + 1 - k)(a_H - a_{H+1}) + a_{H+1}`, which gives each explicit
/// coefficient as the enclosure `[partial, partial + remainder]`.
pub fn realize_convex(seq: &ConvexSequence, horizon: u64) -> Result<FourierMeasure> {
    if horizon == 0 {
        return Err(Error::invalid("horizon must be positive"));
    }
    let h = horizon as usize;
    let a: Vec<Q> = (0..=h + 1).map(|n| seq.value(n as u64)).collect();
    let d2 = |m: usize| &a[m - 1] + &a[m + 1] - qi(2) * &a[m];
    if d2(1).is_negative() {
        return Err(Error::invalid(
            "1 - 2 a_1 + a_2 < 0: the sequence extended by a_0 = 1 is not convex",
        ));
    }
    // suffix sums over m in (k, H]: sum m D2_m and sum D2_m
    let mut weighted = vec![Q::zero(); h + 2];
    let mut plain = vec![Q::zero(); h + 2];
    for m in (1..=h).rev() {
        let d = d2(m);
        weighted[m] = &weighted[m + 1] + qi(m as i64) * &d;
        plain[m] = &plain[m + 1] + d;
    }
    let drop = &a[h] - &a[h + 1];
    let explicit = (1..=h)
        .map(|k| {
            let partial = &weighted[k + 1] - qi(k as i64) * &plain[k + 1];
            let remainder = qi((h + 1 - k) as i64) * &drop + &a[h + 1];
            Enclosure::new(partial.clone(), partial + remainder)
        })
        .collect();
    Ok(FourierMeasure::from_parts(explicit, Tail::Rule(seq.rule().clone())).mark_fejer_nonnegative())
}

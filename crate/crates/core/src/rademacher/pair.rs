//! Pair correlations of `f = g + sum_{k >= 1} a_k T^k g` for an i.i.d. sign
//! sequence `T^k g`: `int f T^n f = a_n + sum_{k >= 1} a_k a_{k+n}`.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{pow, Enclosure, Q};
use crate::rademacher::series::{SeriesKind, SignedSeries};

/// Default number of explicit products before the tail is bounded.
pub const PAIR_CUTOFF: u64 = 64;

fn require_one_sided(series: &SignedSeries) -> Result<()> {
    if series.kind != SeriesKind::OneSided {
        return Err(Error::invalid("pair correlation uses a one-sided series"));
    }
    Ok(())
}

/// Exact `a_n + sum_k a_k a_{k+n}`: explicit products up to the horizon,
/// then a geometric sum over one period of the partition.
pub fn pair_correlation(series: &SignedSeries, n: u64) -> Result<Q> {
    require_one_sided(series)?;
    if n == 0 {
        return Ok(Q::one() + series_square_sum(series));
    }
    let h = series.horizon();
    let mut acc = series.value(n as i64);
    for k in 1..=h {
        acc += series.value(k as i64) * series.value((k + n) as i64);
    }
    if let Some(t) = &series.tail {
        let p = series.partition.period() as u64;
        let r2p = pow(&t.r, 2 * p);
        let mut period_sum = Q::zero();
        for j in 0..p {
            let k = h + 1 + j;
            let s = series.partition.sign(k) * series.partition.sign(k + n);
            period_sum += Q::from_integer(s.into()) * pow(&t.r, 2 * k);
        }
        acc += &t.c * &t.c * pow(&t.r, n) * period_sum / (Q::one() - r2p);
    }
    Ok(acc)
}

/// `int f^2 - 1 = sum_k a_k^2`.
fn series_square_sum(series: &SignedSeries) -> Q {
    let mut acc: Q = series.explicit.iter().map(|v| v * v).fold(Q::zero(), |a, b| a + b);
    if let Some(t) = &series.tail {
        let r2 = &t.r * &t.r;
        acc += &t.c * &t.c * pow(&r2, series.horizon() + 1) / (Q::one() - r2);
    }
    acc
}

/// Products `a_k a_{k+n}` summed for `k <= cutoff` (at least the horizon),
/// with the rest enclosed by `c^2 r^{2K + n + 2} / (1 - r^2)`.
pub fn pair_correlation_truncated(series: &SignedSeries, n: u64, cutoff: u64) -> Result<Enclosure> {
    require_one_sided(series)?;
    if n == 0 {
        return Err(Error::invalid("truncated pair correlation needs n >= 1"));
    }
    let k_max = cutoff.max(series.horizon());
    let mut acc = series.value(n as i64);
    for k in 1..=k_max {
        acc += series.value(k as i64) * series.value((k + n) as i64);
    }
    Ok(match &series.tail {
        None => Enclosure::exact(acc),
        Some(t) => {
            let r2 = &t.r * &t.r;
            let bound = &t.c * &t.c * pow(&t.r, 2 * k_max + n + 2) / (Q::one() - r2);
            Enclosure::around(acc, &bound)
        }
    })
}

/// Sign of the pair correlation certified from the truncated enclosure.
pub fn certified_pair_sign(series: &SignedSeries, n: u64, cutoff: u64) -> Result<Ordering> {
    let e = pair_correlation_truncated(series, n, cutoff)?;
    e.sign().ok_or_else(|| {
        Error::Inconclusive(format!("pair correlation enclosure at n = {n} contains 0: {e:?}"))
    })
}

/// Lower bound `|a_n| (1 - sum |a_k|)` on `|int f T^n f|` under sign control.
pub fn sign_control_lower_bound(series: &SignedSeries, n: u64) -> Q {
    series.value(n as i64).abs() * (Q::one() - series.abs_sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{q, qi};
    use crate::rademacher::parity::parity_moment;
    use crate::rademacher::series::Partition;
    use proptest::prelude::*;

    /// `f = sum_{j >= 0} a_j x(j)` with `a_0 = 1`, expanded against the
    /// parity rule.
    fn expansion(series: &SignedSeries, n: u64) -> Q {
        let l = series.support_end().unwrap() as i64;
        let coef = |j: i64| if j == 0 { Q::one() } else { series.value(j) };
        let mut acc = Q::zero();
        for j in 0..=l {
            for m in 0..=l {
                let e = parity_moment(&[j, m + n as i64]);
                if !e.is_zero() {
                    acc += coef(j) * coef(m) * e;
                }
            }
        }
        acc
    }

    #[test]
    fn all_negative_closed_form() {
        let s = SignedSeries::canonical_sign_control(Partition::all_negative());
        for n in 1..=20u64 {
            let expected = q(-5, 12) * pow(&q(1, 2), n);
            assert_eq!(pair_correlation(&s, n).unwrap(), expected);
            let e = pair_correlation_truncated(&s, n, PAIR_CUTOFF).unwrap();
            assert!(e.contains(&expected));
            assert!(e.width_f64() <= 1e-12);
        }
    }

    #[test]
    fn single_term() {
        let s = SignedSeries::finite(SeriesKind::OneSided, vec![q(1, 4)]);
        assert_eq!(pair_correlation(&s, 1).unwrap(), q(1, 4));
        assert_eq!(pair_correlation(&s, 5).unwrap(), Q::zero());
    }

    #[test]
    fn alternating_signs() {
        let s = SignedSeries::canonical_sign_control(Partition::alternating());
        for n in 1..=40u64 {
            let want = if n % 2 == 1 { Ordering::Greater } else { Ordering::Less };
            assert_eq!(certified_pair_sign(&s, n, PAIR_CUTOFF).unwrap(), want, "n = {n}");
            let exact = pair_correlation(&s, n).unwrap();
            assert!(pair_correlation_truncated(&s, n, PAIR_CUTOFF).unwrap().contains(&exact));
            assert!(sign_control_lower_bound(&s, n) <= exact.abs());
        }
    }

    #[test]
    fn inconclusive_with_tiny_cutoff() {
        // a_n tiny against a wide tail: c = 1/2, r = 9/10 fails sum < 1 but
        // exercises the inconclusive path
        let s = SignedSeries::geometric(SeriesKind::OneSided, q(1, 2), q(9, 10), Partition::alternating()).unwrap();
        assert!(matches!(certified_pair_sign(&s, 30, 0), Err(Error::Inconclusive(_))));
    }

    #[test]
    fn variance_term() {
        let s = SignedSeries::finite(SeriesKind::OneSided, vec![q(1, 2), q(-1, 4)]);
        assert_eq!(pair_correlation(&s, 0).unwrap(), qi(1) + q(1, 4) + q(1, 16));
        let g = SignedSeries::canonical_sign_control(Partition::all_positive());
        assert_eq!(pair_correlation(&g, 0).unwrap(), qi(1) + q(1, 12));
    }

    fn finite_series() -> impl Strategy<Value = SignedSeries> {
        prop::collection::vec(-8i64..=8, 0..8).prop_map(|v| {
            SignedSeries::finite(SeriesKind::OneSided, v.into_iter().map(|x| q(x, 16)).collect())
        })
    }

    proptest! {
        #[test]
        fn closed_form_matches_parity_expansion(s in finite_series(), n in 1u64..12) {
            prop_assert_eq!(pair_correlation(&s, n).unwrap(), expansion(&s, n));
        }

        #[test]
        fn periodic_closed_form_matches_truncation(pattern in prop::collection::vec(any::<bool>(), 1..5), n in 1u64..30) {
            let s = SignedSeries::canonical_sign_control(Partition::new(pattern).unwrap());
            let exact = pair_correlation(&s, n).unwrap();
            let e = pair_correlation_truncated(&s, n, 40).unwrap();
            prop_assert!(e.contains(&exact));
            // explicit horizon combined with a periodic tail
            let mixed = SignedSeries::new(
                SeriesKind::OneSided,
                (1..=3).map(|k| s.value(k)).collect(),
                s.tail.clone(),
                s.partition.clone(),
            ).unwrap();
            prop_assert_eq!(pair_correlation(&mixed, n).unwrap(), exact);
        }
    }
}

use std::cmp::Ordering;

use num_traits::One;
use serde::Serialize;

use crate::bernoulli::params::BernoulliParams;
use crate::numeric::{pow, sign_of, Q};

/// Which of the two explicit sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BernoulliSet {
    /// First non-zero entry is 1.
    Over,
    /// First two non-zero entries are 1 then 2.
    Under,
}

impl BernoulliSet {
    pub fn mean(self, p: &BernoulliParams) -> Q {
        match self {
            BernoulliSet::Over => p.over_mean(),
            BernoulliSet::Under => p.under_mean(),
        }
    }

    pub fn correlation(self, p: &BernoulliParams, n: u64) -> Q {
        match self {
            BernoulliSet::Over => over_correlation(p, n),
            BernoulliSet::Under => under_correlation(p, n),
        }
    }

    pub fn defect(self, p: &BernoulliParams, n: u64) -> Q {
        let a = self.mean(p);
        self.correlation(p, n) - &a * &a
    }

    pub fn automaton(self) -> crate::bernoulli::RegularSetSpec {
        match self {
            BernoulliSet::Over => crate::bernoulli::RegularSetSpec::over(),
            BernoulliSet::Under => crate::bernoulli::RegularSetSpec::under(),
        }
    }
}

/// `mu(A cap T^{-n} A) = a^2 + p0^n (1 - a) a` for the over set, and `a`
/// at `n = 0`.
pub fn over_correlation(p: &BernoulliParams, n: u64) -> Q {
    let a = p.over_mean();
    if n == 0 {
        return a;
    }
    &a * &a + pow(p.p0(), n) * (Q::one() - &a) * &a
}

/// `mu(A cap T^{-n} A) = a^2 (1 + n p0^n - n p0^{n-1} - p0^n) + a p0^n` for
/// the under set, and `a` at `n = 0`.
pub fn under_correlation(p: &BernoulliParams, n: u64) -> Q {
    let a = p.under_mean();
    if n == 0 {
        return a;
    }
    let big_n = Q::from_integer(n.into());
    let pn = pow(p.p0(), n);
    let pn1 = pow(p.p0(), n - 1);
    &a * &a * (Q::one() + &big_n * &pn - &big_n * &pn1 - &pn) + &a * &pn
}

/// `p0 (1 - a) / (a (1 - p0))`: the under defect is negative exactly for
/// `n` above this value and zero when `n` equals it.
pub fn under_threshold(p: &BernoulliParams) -> Q {
    let a = p.under_mean();
    p.p0() * (Q::one() - &a) / (&a * (Q::one() - p.p0()))
}

/// Sign of the under defect predicted by the threshold.
pub fn under_predicted_sign(p: &BernoulliParams, n: u64) -> Ordering {
    let t = under_threshold(p);
    // defect sign = sign(threshold - n)
    sign_of(&(t - Q::from_integer(n.into())))
}

/// `p0^{n-1} a [p0 (1 - a) - a n (1 - p0)]`, the factored under defect.
pub fn under_defect_factored(p: &BernoulliParams, n: u64) -> Q {
    assert!(n >= 1);
    let a = p.under_mean();
    let big_n = Q::from_integer(n.into());
    pow(p.p0(), n - 1) * &a * (p.p0() * (Q::one() - &a) - &a * big_n * (Q::one() - p.p0()))
}

pub fn over_defect(p: &BernoulliParams, n: u64) -> Q {
    BernoulliSet::Over.defect(p, n)
}

pub fn under_defect(p: &BernoulliParams, n: u64) -> Q {
    BernoulliSet::Under.defect(p, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernoulli::{event_probability_oracle, family_params};
    use crate::numeric::q;
    use num_traits::Zero;
    use proptest::prelude::*;

    #[test]
    fn over_examples() {
        let p = BernoulliParams::uniform();
        assert_eq!(over_correlation(&p, 0), q(1, 2));
        assert_eq!(over_correlation(&p, 1), q(1, 3));
        assert_eq!(over_correlation(&p, 2), q(5, 18));
    }

    #[test]
    fn under_examples() {
        let p = family_params(&q(1, 4)).unwrap();
        assert_eq!(under_correlation(&p, 0), q(4, 25));
        assert_eq!(under_correlation(&p, 1), q(1, 100));
        assert_eq!(under_defect(&p, 1), q(1, 100) - q(16, 625));
        assert!(under_defect(&p, 1) < Q::zero());
    }

    #[test]
    fn factored_defect_matches() {
        for s in [q(1, 4), q(1, 10), q(1, 3)] {
            let p = family_params(&s).unwrap();
            for n in 1..30 {
                assert_eq!(under_defect(&p, n), under_defect_factored(&p, n));
            }
        }
    }

    #[test]
    fn threshold_tie_gives_zero_defect() {
        // a = p1 p2 / (p1 + p2)^2 with p1 = p2 gives a = 1/4;
        // threshold = p0 (3/4) / ((1/4)(1 - p0)) = 3 p0 / (1 - p0) = 2 at p0 = 2/5
        let p = BernoulliParams::new(q(2, 5), q(3, 10), q(3, 10)).unwrap();
        assert_eq!(under_threshold(&p), Q::from_integer(2.into()));
        assert_eq!(under_defect(&p, 2), Q::zero());
        assert!(under_defect(&p, 1) > Q::zero());
        assert!(under_defect(&p, 3) < Q::zero());
        assert_eq!(under_predicted_sign(&p, 2), Ordering::Equal);
    }

    #[test]
    fn oracle_matches_small_grid() {
        for p in [BernoulliParams::uniform(), family_params(&q(1, 4)).unwrap()] {
            for n in 0..6u64 {
                for set in [BernoulliSet::Over, BernoulliSet::Under] {
                    let spec = set.automaton();
                    let oracle = event_probability_oracle(&spec, &spec, &p, n as u32).unwrap();
                    assert_eq!(set.correlation(&p, n), oracle, "{set:?} n = {n}");
                }
            }
        }
    }

    fn params() -> impl Strategy<Value = BernoulliParams> {
        (1i64..20, 1i64..20, 1i64..20).prop_map(|(a, b, c)| {
            let s = a + b + c;
            BernoulliParams::new(q(a, s), q(b, s), q(c, s)).unwrap()
        })
    }

    proptest! {
        #[test]
        fn over_defect_positive_and_decreasing(p in params(), n in 1u64..40) {
            let d = over_defect(&p, n);
            prop_assert!(d > Q::zero());
            prop_assert!(over_defect(&p, n + 1) < d);
        }

        #[test]
        fn threshold_predicts_sign(p in params(), n in 1u64..40) {
            prop_assert_eq!(sign_of(&under_defect(&p, n)), under_predicted_sign(&p, n));
        }

        #[test]
        fn correlations_are_probabilities(p in params(), n in 1u64..30) {
            for set in [BernoulliSet::Over, BernoulliSet::Under] {
                let c = set.correlation(&p, n);
                prop_assert!(c >= Q::zero());
                prop_assert!(c <= set.mean(&p));
            }
        }

        #[test]
        fn oracle_equivalence(p in params(), n in 0u32..8) {
            for set in [BernoulliSet::Over, BernoulliSet::Under] {
                let spec = set.automaton();
                let oracle = event_probability_oracle(&spec, &spec, &p, n).unwrap();
                prop_assert_eq!(set.correlation(&p, n as u64), oracle);
            }
        }
    }
}

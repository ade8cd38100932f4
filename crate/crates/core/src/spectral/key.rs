//! Finite checks of the Fejer-type inequality that bounds nonpositive
//! Fourier coefficients of a probability measure.
//!
//! For every `N`, `0 <= int |sum_{n<=N} e(nt)|^2 d sigma = N + 2 sum_{k=1}^{N} (N-k) c_k`,
//! equivalently `1/2 + 1/(2N) + (1/N) sum_{n=1}^{N} S_n >= 0` with
//! `S_n = c_1 + ... + c_n`. When every `c_n <= 0` this forces
//! `sum |c_n| <= 1/2`.

use std::cmp::Ordering;

use num_traits::{One, Signed};
use serde::Serialize;

use crate::numeric::{q, qi, Enclosure, Q};
use crate::spectral::measure::FourierMeasure;
use crate::spectral::realize::{realize_summable, DEFAULT_HORIZON};
use crate::spectral::rules::SeqRule;

#[derive(Clone, Debug)]
pub struct KeyBoundReport {
    pub n_max: u64,
    /// `1/2 + 1/(2N) + (1/N) sum_{n<=N} S_n` for `N = 1..=n_max`.
    pub fejer_mean: Vec<Enclosure>,
    /// `N + 2 sum_{k<=N} (N - k) c_k` for `N = 1..=n_max`.
    pub quadratic_form: Vec<Enclosure>,
    /// First `N` where the inequality is certified to fail.
    pub first_violation: Option<u64>,
    /// Whether every value is certified nonnegative.
    pub fejer_holds: bool,
    /// `sum_{n <= n_max} |c_n|`, reported when every `c_n <= 0` there.
    pub nonpositive_abs_sum: Option<Enclosure>,
    pub abs_sum_within_half: Option<bool>,
    pub split: SplitSum,
}

/// `-sum_{F-} c_n <= sum_{F+} c_n + 1/2` over `n <= n_max`.
#[derive(Clone, Debug)]
pub struct SplitSum {
    pub negative_part: Enclosure,
    pub positive_part: Enclosure,
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KeyBoundSummary {
    pub n_max: u64,
    pub fejer_holds: bool,
    pub first_violation: Option<u64>,
    pub min_fejer_mean: f64,
    pub abs_sum: Option<f64>,
    pub abs_sum_within_half: Option<bool>,
    pub split_holds: Option<bool>,
}

impl KeyBoundReport {
    pub fn summary(&self) -> KeyBoundSummary {
        KeyBoundSummary {
            n_max: self.n_max,
            fejer_holds: self.fejer_holds,
            first_violation: self.first_violation,
            min_fejer_mean: self
                .fejer_mean
                .iter()
                .map(|e| crate::numeric::to_f64(e.lo()))
                .fold(f64::INFINITY, f64::min),
            abs_sum: self.nonpositive_abs_sum.as_ref().map(Enclosure::mid_f64),
            abs_sum_within_half: self.abs_sum_within_half,
            split_holds: self.split.holds,
        }
    }
}

/// Coefficient rules of the under-recurrent measures used in sweeps; each
/// has `c_n <= 0` and `sum |c_n| <= 1/2`.
pub const UNDER_RECURRENT_SUITE: [&str; 6] = [
    "zero",
    "finite:-1/4",
    "finite:-1/6,-1/6,-1/6",
    "geometric:-1/4:1/2",
    "geometric:-1/2:1/2",
    "geometric:-1/3:1/4",
];

/// The suite realized to the default horizon, keyed by rule string.
pub fn under_recurrent_suite() -> Vec<(&'static str, FourierMeasure)> {
    UNDER_RECURRENT_SUITE
        .iter()
        .map(|&name| {
            let rule = SeqRule::parse(name).expect("suite rules parse");
            let m = realize_summable(&rule, &Q::one(), DEFAULT_HORIZON).expect("suite rules are summable");
            (name, m)
        })
        .collect()
}

pub fn key_bound_check(m: &FourierMeasure, n_max: u64) -> KeyBoundReport {
    let coeffs: Vec<Enclosure> = (1..=n_max as i64).map(|n| m.coefficient(n)).collect();

    let mut fejer_mean = Vec::with_capacity(n_max as usize);
    let mut quadratic_form = Vec::with_capacity(n_max as usize);
    let mut partial = Enclosure::zero(); // S_N
    let mut cumulative = Enclosure::zero(); // sum_{n <= N} S_n
    let mut first_violation = None;
    let mut fejer_holds = true;
    for (i, c) in coeffs.iter().enumerate() {
        let big_n = (i + 1) as i64;
        // N + 2 sum_{k=1}^{N-1} S_k uses the cumulative sum before this step
        quadratic_form.push(&Enclosure::exact(qi(big_n)) + &cumulative.scale(&qi(2)));
        partial = &partial + c;
        cumulative = &cumulative + &partial;
        let value = &Enclosure::exact(q(1, 2) + q(1, 2 * big_n)) + &cumulative.scale(&q(1, big_n));
        match value.sign() {
            Some(Ordering::Less) => {
                fejer_holds = false;
                first_violation.get_or_insert(big_n as u64);
            }
            None => fejer_holds = false,
            _ => {}
        }
        fejer_mean.push(value);
    }

    let nonpositive = coeffs.iter().all(|c| !c.hi().is_positive());
    let nonpositive_abs_sum = nonpositive.then(|| coeffs.iter().map(Enclosure::abs).sum::<Enclosure>());
    let abs_sum_within_half = nonpositive_abs_sum.as_ref().map(|s| s.hi() <= &q(1, 2));

    let mut negative_part = Enclosure::zero();
    let mut positive_part = Enclosure::zero();
    let mut undecided = false;
    for c in &coeffs {
        match c.sign() {
            Some(Ordering::Less) => negative_part = &negative_part - c,
            Some(Ordering::Greater) => positive_part = &positive_part + c,
            Some(Ordering::Equal) => {}
            None => undecided = true,
        }
    }
    let slack = &(&positive_part + &Enclosure::exact(q(1, 2))) - &negative_part;
    let holds = if undecided {
        None
    } else {
        match slack.sign() {
            Some(Ordering::Less) => Some(false),
            Some(_) => Some(true),
            None => None,
        }
    };

    KeyBoundReport {
        n_max,
        fejer_mean,
        quadratic_form,
        first_violation,
        fejer_holds,
        nonpositive_abs_sum,
        abs_sum_within_half,
        split: SplitSum {
            negative_part,
            positive_part,
            holds,
        },
    }
}

/// Exact quadratic form `N + 2 sum_{k=1}^{N} (N-k) c_k` evaluated directly,
/// kept separate from the running-sum evaluation above.
pub fn fejer_quadratic_form(m: &FourierMeasure, big_n: u64) -> Enclosure {
    (1..=big_n)
        .map(|k| m.coefficient(k as i64).scale(&qi(2 * (big_n - k) as i64)))
        .fold(Enclosure::exact(qi(big_n as i64)), |acc, x| &acc + &x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::rules::SeqRule;
    use crate::spectral::realize::realize_summable;

    #[test]
    fn lebesgue_is_half_plus() {
        let r = key_bound_check(&FourierMeasure::lebesgue(), 32);
        assert!(r.fejer_holds);
        assert_eq!(r.fejer_mean[9], Enclosure::exact(q(1, 2) + q(1, 20)));
        assert_eq!(r.nonpositive_abs_sum, Some(Enclosure::zero()));
    }

    #[test]
    fn geometric_nonpositive_sum_is_a_quarter() {
        let rule = SeqRule::geometric(q(-1, 4), q(1, 2)).unwrap();
        let m = realize_summable(&rule, &qi(1), 64).unwrap();
        let r = key_bound_check(&m, 64);
        assert!(r.fejer_holds);
        assert_eq!(r.abs_sum_within_half, Some(true));
        let s = r.nonpositive_abs_sum.unwrap();
        assert!(s.hi() < &q(1, 4));
        assert!(s.hi() > &(q(1, 4) - q(1, 1 << 40)));
    }

    #[test]
    fn invalid_coefficient_fails() {
        let m = FourierMeasure::from_coefficients(vec![q(-3, 5)]);
        let r = key_bound_check(&m, 64);
        assert!(!r.fejer_holds);
        // 1/2 + 1/(2N) - 3/5 < 0 first at N = 6
        assert_eq!(r.first_violation, Some(6));
        assert!(r.fejer_mean[63].hi().is_negative());
    }

    #[test]
    fn running_and_direct_quadratic_forms_agree() {
        let rule = SeqRule::geometric(q(1, 3), q(-1, 2)).unwrap();
        let m = realize_summable(&rule, &qi(1), 40).unwrap();
        let r = key_bound_check(&m, 40);
        for n in 1..=40u64 {
            assert_eq!(r.quadratic_form[(n - 1) as usize], fejer_quadratic_form(&m, n));
        }
    }

    #[test]
    fn split_sum_for_mixed_signs() {
        let m = FourierMeasure::from_coefficients(vec![q(1, 4), q(-1, 8), q(1, 16)]);
        let r = key_bound_check(&m, 8);
        assert_eq!(r.split.holds, Some(true));
        assert_eq!(r.split.negative_part, Enclosure::exact(q(1, 8)));
        assert!(r.nonpositive_abs_sum.is_none());
    }

    #[test]
    fn suite_is_under_recurrent() {
        for (name, m) in under_recurrent_suite() {
            assert!(m.certify_nonnegative(16).certified, "{name}");
            let r = key_bound_check(&m, 256);
            assert!(r.fejer_holds, "{name}");
            assert_eq!(r.abs_sum_within_half, Some(true), "{name}");
        }
    }
}

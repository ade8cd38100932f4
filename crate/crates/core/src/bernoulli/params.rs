use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{parse_rational, q, serde_q, to_f64, Q};

/// Symbol probabilities of a Bernoulli shift on `{0, 1, 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct BernoulliParams {
    p: [Q; 3],
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    #[serde(with = "serde_q")]
    p0: Q,
    #[serde(with = "serde_q")]
    p1: Q,
    #[serde(with = "serde_q")]
    p2: Q,
}

impl TryFrom<RawParams> for BernoulliParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        BernoulliParams::new(r.p0, r.p1, r.p2)
    }
}

impl From<BernoulliParams> for RawParams {
    fn from(b: BernoulliParams) -> Self {
        let [p0, p1, p2] = b.p;
        RawParams { p0, p1, p2 }
    }
}

impl std::fmt::Display for BernoulliParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v: Vec<String> = self.p.iter().map(crate::numeric::render_rational).collect();
        write!(f, "{}", v.join(","))
    }
}

impl BernoulliParams {
    pub fn new(p0: Q, p1: Q, p2: Q) -> Result<Self> {
        for (i, p) in [&p0, &p1, &p2].into_iter().enumerate() {
            if !p.is_positive() || p >= &Q::one() {
                return Err(Error::invalid(format!("p{i} must lie in (0, 1)")));
            }
        }
        if &p0 + &p1 + &p2 != Q::one() {
            return Err(Error::invalid("p0 + p1 + p2 must equal 1"));
        }
        Ok(BernoulliParams { p: [p0, p1, p2] })
    }

    pub fn uniform() -> Self {
        BernoulliParams {
            p: [q(1, 3), q(1, 3), q(1, 3)],
        }
    }

    /// Parses `p0,p1,p2`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::parse(spec, "expected p0,p1,p2"));
        }
        BernoulliParams::new(
            parse_rational(parts[0])?,
            parse_rational(parts[1])?,
            parse_rational(parts[2])?,
        )
    }

    pub fn p0(&self) -> &Q {
        &self.p[0]
    }

    pub fn p1(&self) -> &Q {
        &self.p[1]
    }

    pub fn p2(&self) -> &Q {
        &self.p[2]
    }

    pub fn prob(&self, symbol: usize) -> &Q {
        &self.p[symbol]
    }

    /// Measure of "first non-zero entry is 1": `p1 / (p1 + p2)`.
    pub fn over_mean(&self) -> Q {
        self.p1() / (self.p1() + self.p2())
    }

    /// Measure of "first two non-zero entries are 1 then 2":
    /// `p1 p2 / (p1 + p2)^2`.
    pub fn under_mean(&self) -> Q {
        let s = self.p1() + self.p2();
        self.p1() * self.p2() / (&s * &s)
    }

    /// `-sum p_i ln p_i` in nats.
    pub fn entropy(&self) -> f64 {
        self.p
            .iter()
            .map(|p| {
                let x = to_f64(p);
                -x * x.ln()
            })
            .sum()
    }
}

/// `(s/4, 1 - s, 3s/4)` for `0 < s < 1/2`; each member has `p0` below the
/// under-set measure, so the under set is strictly under-recurrent.
pub fn family_params(s: &Q) -> Result<BernoulliParams> {
    if !s.is_positive() || s >= &q(1, 2) {
        return Err(Error::invalid("family parameter s must lie in (0, 1/2)"));
    }
    BernoulliParams::new(s * q(1, 4), Q::one() - s, s * q(3, 4))
}

pub fn entropy(p: &BernoulliParams) -> f64 {
    p.entropy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn validation() {
        assert!(BernoulliParams::new(q(1, 2), q(1, 2), Q::zero()).is_err());
        assert!(BernoulliParams::new(q(1, 2), q(1, 4), q(1, 8)).is_err());
        assert!(BernoulliParams::parse("1/2,1/4,1/4").is_ok());
        assert!(BernoulliParams::parse("1/2,1/4").is_err());
    }

    #[test]
    fn family_quarter() {
        let p = family_params(&q(1, 4)).unwrap();
        assert_eq!(p, BernoulliParams::parse("1/16,3/4,3/16").unwrap());
        assert_eq!(p.under_mean(), q(4, 25));
        assert!(p.p0() < &p.under_mean());
        assert!(family_params(&q(1, 2)).is_err());
        assert!(family_params(&Q::zero()).is_err());
        assert!(family_params(&q(3, 5)).is_err());
    }

    #[test]
    fn entropies() {
        assert!((BernoulliParams::uniform().entropy() - 3f64.ln()).abs() < 1e-15);
        let quarter = family_params(&q(1, 4)).unwrap().entropy();
        let direct = -(1.0 / 16.0 * (1.0f64 / 16.0).ln() + 0.75 * 0.75f64.ln() + 3.0 / 16.0 * (3.0f64 / 16.0).ln());
        assert!((quarter - direct).abs() < 1e-15);
        assert!((quarter - 0.702919).abs() < 1e-6);
        let small = family_params(&q(1, 100)).unwrap().entropy();
        assert!((small - 0.0616249).abs() < 1e-6);
        let mut last = f64::INFINITY;
        for den in [3, 4, 10, 100, 1000, 100_000] {
            let h = family_params(&q(1, den)).unwrap().entropy();
            assert!(h < last);
            last = h;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn serde_round_trip() {
        let p = family_params(&q(1, 10)).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"p0":"1/40","p1":"9/10","p2":"3/40"}"#);
        assert_eq!(serde_json::from_str::<BernoulliParams>(&s).unwrap(), p);
        assert!(serde_json::from_str::<BernoulliParams>(r#"{"p0":"1/2","p1":"1/2","p2":"1/2"}"#).is_err());
    }
}

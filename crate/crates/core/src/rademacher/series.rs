use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{parse_rational, pow, q, qi, serde_q, Q};

/// Periodic sign pattern on the positive integers: `n` is in `S+` when
/// `pattern[(n - 1) % len]` is `+`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    pattern: Vec<bool>,
}

impl Partition {
    pub fn all_positive() -> Self {
        Partition { pattern: vec![true] }
    }

    pub fn all_negative() -> Self {
        Partition { pattern: vec![false] }
    }

    /// Odd `n` positive, even `n` negative.
    pub fn alternating() -> Self {
        Partition {
            pattern: vec![true, false],
        }
    }

    pub fn new(pattern: Vec<bool>) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::invalid("partition pattern must be non-empty"));
        }
        Ok(Partition { pattern })
    }

    pub fn period(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_positive(&self, n: u64) -> bool {
        assert!(n >= 1);
        self.pattern[((n - 1) % self.pattern.len() as u64) as usize]
    }

    pub fn sign(&self, n: u64) -> i64 {
        if self.is_positive(n) {
            1
        } else {
            -1
        }
    }

    pub fn is_constant(&self) -> bool {
        self.pattern.iter().all(|&s| s == self.pattern[0])
    }
}

impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let pattern = match t {
            "odd" | "odd+" => vec![true, false],
            "even" | "even+" => vec![false, true],
            _ => t
                .chars()
                .map(|c| match c {
                    '+' => Ok(true),
                    '-' => Ok(false),
                    _ => Err(Error::parse(s, "partition pattern uses only '+' and '-'")),
                })
                .collect::<Result<_>>()?,
        };
        Partition::new(pattern)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &p in &self.pattern {
            f.write_str(if p { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// How a coefficient sequence extends to negative indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// `a_k` for `k >= 1` only; used for `f = g + sum a_k T^k g`.
    OneSided,
    /// `a_{-k} = a_k`, `a_0 = 0`.
    Symmetric,
    /// `a_{-k} = -a_k`, `a_0 = 0`.
    Antisymmetric,
}

/// `a_k = sign(k) c r^k` past the explicit part, with `sign` from the
/// partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeometricTail {
    #[serde(with = "serde_q")]
    pub c: Q,
    #[serde(with = "serde_q")]
    pub r: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedSeries {
    pub kind: SeriesKind,
    /// `a_1, ..., a_H`.
    #[serde(with = "serde_q::vec", default)]
    pub explicit: Vec<Q>,
    #[serde(default)]
    pub tail: Option<GeometricTail>,
    #[serde(default = "Partition::all_positive")]
    pub partition: Partition,
}

impl SignedSeries {
    pub fn new(kind: SeriesKind, explicit: Vec<Q>, tail: Option<GeometricTail>, partition: Partition) -> Result<Self> {
        if let Some(t) = &tail {
            if !t.c.is_positive() || !t.r.is_positive() || t.r >= Q::one() {
                return Err(Error::invalid("geometric tail needs c > 0 and 0 < r < 1"));
            }
        }
        Ok(SignedSeries {
            kind,
            explicit,
            tail,
            partition,
        })
    }

    pub fn finite(kind: SeriesKind, values: Vec<Q>) -> Self {
        SignedSeries {
            kind,
            explicit: values,
            tail: None,
            partition: Partition::all_positive(),
        }
    }

    pub fn zero(kind: SeriesKind) -> Self {
        SignedSeries::finite(kind, Vec::new())
    }

    pub fn geometric(kind: SeriesKind, c: Q, r: Q, partition: Partition) -> Result<Self> {
        SignedSeries::new(kind, Vec::new(), Some(GeometricTail { c, r }), partition)
    }

    /// `a_k = s_k c 2^{-k}` with `c = 1/2`.
    pub fn canonical_sign_control(partition: Partition) -> Self {
        SignedSeries::geometric(SeriesKind::OneSided, q(1, 2), q(1, 2), partition).expect("valid constants")
    }

    /// `a_k = sign(k) 2^{-(|k| + d + 2)} / d!` (antisymmetric) or its
    /// symmetric counterpart; valid for every order up to `d_max`.
    pub fn canonical_multiple(d_max: usize, kind: SeriesKind) -> Result<Self> {
        if kind == SeriesKind::OneSided {
            return Err(Error::invalid("multiple-correlation series are two-sided"));
        }
        if d_max < 2 {
            return Err(Error::invalid("order must be at least 2"));
        }
        let fact: i64 = (1..=d_max as i64).product();
        let c = Q::new(1.into(), num_bigint::BigInt::from(fact) << (d_max + 2));
        SignedSeries::geometric(kind, c, q(1, 2), Partition::all_positive())
    }

    /// The first `k` coefficients as a finitely supported series.
    pub fn truncated(&self, k: u64) -> Self {
        SignedSeries {
            kind: self.kind,
            explicit: (1..=k).map(|n| self.value(n as i64)).collect(),
            tail: None,
            partition: self.partition.clone(),
        }
    }

    pub fn horizon(&self) -> u64 {
        self.explicit.len() as u64
    }

    /// `a_k`. `a_0 = 0`; for one-sided series negative indices are 0.
    pub fn value(&self, k: i64) -> Q {
        if k == 0 {
            return Q::zero();
        }
        let m = k.unsigned_abs();
        let positive = if m <= self.horizon() {
            self.explicit[(m - 1) as usize].clone()
        } else {
            match &self.tail {
                None => Q::zero(),
                Some(t) => Q::from_integer(self.partition.sign(m).into()) * &t.c * pow(&t.r, m),
            }
        };
        if k > 0 {
            positive
        } else {
            match self.kind {
                SeriesKind::OneSided => Q::zero(),
                SeriesKind::Symmetric => positive,
                SeriesKind::Antisymmetric => -positive,
            }
        }
    }

    /// Largest index with a possibly nonzero coefficient, `None` for an
    /// infinite tail.
    pub fn support_end(&self) -> Option<u64> {
        if self.tail.is_some() {
            return None;
        }
        Some(
            self.explicit
                .iter()
                .rposition(|v| !v.is_zero())
                .map_or(0, |i| i as u64 + 1),
        )
    }

    /// `sum_{k > from} |a_k|` over positive indices.
    pub fn abs_sum_after(&self, from: u64) -> Q {
        let explicit: Q = self
            .explicit
            .iter()
            .skip(from as usize)
            .map(|v| v.abs())
            .fold(Q::zero(), |a, b| a + b);
        let tail = match &self.tail {
            None => Q::zero(),
            Some(t) => {
                let start = from.max(self.horizon()) + 1;
                &t.c * pow(&t.r, start) / (Q::one() - &t.r)
            }
        };
        explicit + tail
    }

    /// `sum_{k >= 1} |a_k|`.
    pub fn abs_sum(&self) -> Q {
        self.abs_sum_after(0)
    }

    /// `sum_{k in Z} |a_k|`.
    pub fn two_sided_abs_sum(&self) -> Q {
        match self.kind {
            SeriesKind::OneSided => self.abs_sum(),
            _ => qi(2) * self.abs_sum(),
        }
    }

    /// Conditions for sign control of `f = g + sum a_k T^k g`: one-sided,
    /// `|a_k|` non-increasing, `a_k` nonzero with the partition's sign,
    /// and `sum |a_k| < 1`. For a finitely supported series the sign and
    /// monotonicity conditions are checked on its support only, and sign
    /// control then covers `n <= support`.
    pub fn validate_sign_control(&self) -> Result<()> {
        if self.kind != SeriesKind::OneSided {
            return Err(Error::invalid("sign control uses a one-sided series"));
        }
        let checked = self.horizon() + u64::from(self.tail.is_some());
        let mut prev: Option<Q> = None;
        for k in 1..=checked {
            let v = self.value(k as i64);
            if v.is_zero() || v.is_positive() != self.partition.is_positive(k) {
                return Err(Error::invalid(format!("a_{k} does not carry the partition sign")));
            }
            if let Some(p) = &prev {
                if v.abs() > *p {
                    return Err(Error::invalid(format!("|a_k| increases at k = {k}")));
                }
            }
            prev = Some(v.abs());
        }
        if self.abs_sum() >= Q::one() {
            return Err(Error::invalid("sum |a_k| must be < 1"));
        }
        Ok(())
    }

    /// Largest `n` covered by sign control (`None` for all `n`).
    pub fn sign_control_horizon(&self) -> Option<u64> {
        match self.tail {
            Some(_) => None,
            None => Some(self.horizon()),
        }
    }

    /// Conditions of the multiple-correlation construction at order `d`:
    /// two-sided, `0 < a_n < 1 / (2^{d+1} d!)` for `n >= 1`, and
    /// `sum_{n >= 1} a_n <= 1/2`.
    pub fn validate_multiple(&self, d: usize) -> Result<()> {
        if self.kind == SeriesKind::OneSided {
            return Err(Error::invalid("multiple-correlation series are two-sided"));
        }
        let fact: i64 = (1..=d as i64).product();
        let bound = Q::new(1.into(), num_bigint::BigInt::from(fact) << (d + 1));
        let checked = self.horizon() + u64::from(self.tail.is_some());
        for k in 1..=checked {
            let v = self.value(k as i64);
            if !v.is_positive() || v >= bound {
                return Err(Error::invalid(format!(
                    "a_{k} must lie in (0, 1/(2^{} {}!))",
                    d + 1,
                    d
                )));
            }
        }
        if let Some(t) = &self.tail {
            // the tail is decreasing, so its first term is its maximum;
            // positivity needs an all-positive partition
            if !self.partition.is_constant() || !self.partition.is_positive(1) {
                return Err(Error::invalid("multiple-correlation tails must be positive"));
            }
            debug_assert!(t.c.is_positive());
        }
        if self.abs_sum() > q(1, 2) {
            return Err(Error::invalid("sum_{n >= 1} a_n must be <= 1/2"));
        }
        Ok(())
    }

    /// Accepts JSON or `geometric:<kind>:<c>:<r>[:<partition>]`,
    /// `finite:<kind>:<a1>,<a2>,...`, `canonical-sign:<partition>`,
    /// `canonical-multiple:<kind>:<d>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let t = spec.trim();
        if t.starts_with('{') {
            return serde_json::from_str(t).map_err(|e| Error::parse(spec, e.to_string()));
        }
        let parts: Vec<&str> = t.split(':').collect();
        let kind = |s: &str| -> Result<SeriesKind> {
            match s {
                "one-sided" | "one_sided" => Ok(SeriesKind::OneSided),
                "symmetric" | "over" => Ok(SeriesKind::Symmetric),
                "antisymmetric" | "under" => Ok(SeriesKind::Antisymmetric),
                _ => Err(Error::parse(spec, format!("unknown series kind '{s}'"))),
            }
        };
        match parts.as_slice() {
            ["canonical-sign", p] => Ok(SignedSeries::canonical_sign_control(p.parse()?)),
            ["canonical-multiple", k, d] => {
                let d: usize = d.parse().map_err(|_| Error::parse(spec, "order must be an integer"))?;
                SignedSeries::canonical_multiple(d, kind(k)?)
            }
            ["geometric", k, c, r] => SignedSeries::geometric(kind(k)?, parse_rational(c)?, parse_rational(r)?, Partition::all_positive()),
            ["geometric", k, c, r, p] => SignedSeries::geometric(kind(k)?, parse_rational(c)?, parse_rational(r)?, p.parse()?),
            ["finite", k, vals] => Ok(SignedSeries::finite(
                kind(k)?,
                vals.split(',').map(parse_rational).collect::<Result<_>>()?,
            )),
            _ => Err(Error::parse(spec, "unrecognized series")),
        }
    }
}

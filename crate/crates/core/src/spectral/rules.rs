//! Coefficient rules `n -> a_n` for `n >= 1`, serialized as `{kind, params}`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{parse_rational, pow, qi, serde_q, Q};

/// A real sequence indexed by `n >= 1` with a closed-form tail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum SeqRule {
    Zero,
    /// `a_1, ..., a_m` followed by zeros.
    Finite {
        #[serde(with = "serde_q::vec")]
        values: Vec<Q>,
    },
    /// `a_n = c * r^n` with `0 < |r| < 1`.
    Geometric {
        #[serde(with = "serde_q")]
        c: Q,
        #[serde(with = "serde_q")]
        r: Q,
    },
    /// `a_n = c / (n + shift)`; convex but not summable.
    Harmonic {
        #[serde(with = "serde_q")]
        c: Q,
        shift: u64,
    },
    Constant {
        #[serde(with = "serde_q")]
        c: Q,
    },
}

impl std::str::FromStr for SeqRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SeqRule::parse(s)
    }
}

/// The compact form accepted by [`SeqRule::parse`].
impl std::fmt::Display for SeqRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use crate::numeric::render_rational as r;
        match self {
            SeqRule::Zero => write!(f, "zero"),
            SeqRule::Finite { values } => {
                let v: Vec<String> = values.iter().map(r).collect();
                write!(f, "finite:{}", v.join(","))
            }
            SeqRule::Geometric { c, r: ratio } => write!(f, "geometric:{}:{}", r(c), r(ratio)),
            SeqRule::Harmonic { c, shift } => write!(f, "harmonic:{}:{shift}", r(c)),
            SeqRule::Constant { c } => write!(f, "constant:{}", r(c)),
        }
    }
}

impl SeqRule {
    pub fn geometric(c: Q, r: Q) -> Result<Self> {
        if r.is_zero() || r.abs() >= Q::one() {
            return Err(Error::invalid("geometric ratio must satisfy 0 < |r| < 1"));
        }
        Ok(SeqRule::Geometric { c, r })
    }

    /// Parses either a JSON object or the compact forms `zero`,
    /// `geometric:c:r`, `harmonic:c:shift`, `constant:c`, `finite:a1,a2,..`.
    pub fn parse(spec: &str) -> Result<Self> {
        let t = spec.trim();
        if t.starts_with('{') {
            let rule: SeqRule =
                serde_json::from_str(t).map_err(|e| Error::parse(spec, e.to_string()))?;
            rule.validate()?;
            return Ok(rule);
        }
        let mut parts = t.split(':');
        let kind = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let need = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(Error::parse(spec, format!("{kind} takes {k} argument(s)")))
            }
        };
        let rule = match kind {
            "zero" => {
                need(0)?;
                SeqRule::Zero
            }
            "geometric" => {
                need(2)?;
                SeqRule::geometric(parse_rational(args[0])?, parse_rational(args[1])?)?
            }
            "harmonic" => {
                need(2)?;
                SeqRule::Harmonic {
                    c: parse_rational(args[0])?,
                    shift: args[1]
                        .parse()
                        .map_err(|_| Error::parse(spec, "bad shift"))?,
                }
            }
            "constant" => {
                need(1)?;
                SeqRule::Constant {
                    c: parse_rational(args[0])?,
                }
            }
            "finite" => {
                need(1)?;
                let values = args[0]
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()?;
                SeqRule::Finite { values }
            }
            other => return Err(Error::parse(spec, format!("unknown rule kind {other:?}"))),
        };
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SeqRule::Geometric { r, .. } if r.is_zero() || r.abs() >= Q::one() => {
                Err(Error::invalid("geometric ratio must satisfy 0 < |r| < 1"))
            }
            _ => Ok(()),
        }
    }

    pub fn value(&self, n: u64) -> Q {
        assert!(n >= 1, "rules are indexed from 1");
        match self {
            SeqRule::Zero => Q::zero(),
            SeqRule::Finite { values } => values.get((n - 1) as usize).cloned().unwrap_or_default(),
            SeqRule::Geometric { c, r } => c * pow(r, n),
            SeqRule::Harmonic { c, shift } => c / qi((n + shift) as i64),
            SeqRule::Constant { c } => c.clone(),
        }
    }

    pub fn scaled(&self, s: &Q) -> SeqRule {
        match self {
            SeqRule::Zero => SeqRule::Zero,
            SeqRule::Finite { values } => SeqRule::Finite {
                values: values.iter().map(|v| v * s).collect(),
            },
            SeqRule::Geometric { c, r } => SeqRule::Geometric {
                c: c * s,
                r: r.clone(),
            },
            SeqRule::Harmonic { c, shift } => SeqRule::Harmonic {
                c: c * s,
                shift: *shift,
            },
            SeqRule::Constant { c } => SeqRule::Constant { c: c * s },
        }
    }

    /// Index of the last nonzero term for finitely supported rules.
    pub fn support_end(&self) -> Option<u64> {
        match self {
            SeqRule::Zero => Some(0),
            SeqRule::Finite { values } => Some(
                values
                    .iter()
                    .rposition(|v| !v.is_zero())
                    .map_or(0, |i| i as u64 + 1),
            ),
            SeqRule::Constant { c } if c.is_zero() => Some(0),
            SeqRule::Geometric { c, .. } | SeqRule::Harmonic { c, .. } if c.is_zero() => Some(0),
            _ => None,
        }
    }

    /// `sum_{n >= from} |a_n|` in closed form, `None` when it diverges.
    pub fn abs_tail_sum(&self, from: u64) -> Option<Q> {
        let from = from.max(1);
        match self {
            SeqRule::Zero => Some(Q::zero()),
            SeqRule::Finite { values } => Some(
                values
                    .iter()
                    .skip((from - 1) as usize)
                    .map(|v| v.abs())
                    .fold(Q::zero(), |a, b| a + b),
            ),
            SeqRule::Geometric { c, r } => {
                let ar = r.abs();
                Some(c.abs() * pow(&ar, from) / (Q::one() - ar))
            }
            SeqRule::Harmonic { c, .. } | SeqRule::Constant { c } => {
                if c.is_zero() {
                    Some(Q::zero())
                } else {
                    None
                }
            }
        }
    }

    /// `sup_{n >= from} |a_n|`.
    pub fn abs_tail_sup(&self, from: u64) -> Q {
        let from = from.max(1);
        match self {
            SeqRule::Zero => Q::zero(),
            SeqRule::Finite { values } => values
                .iter()
                .skip((from - 1) as usize)
                .map(|v| v.abs())
                .max()
                .unwrap_or_default(),
            SeqRule::Geometric { c, r } => c.abs() * pow(&r.abs(), from),
            SeqRule::Harmonic { c, shift } => c.abs() / qi((from + shift) as i64),
            SeqRule::Constant { c } => c.abs(),
        }
    }

    pub fn converges_to_zero(&self) -> bool {
        match self {
            SeqRule::Constant { c } => c.is_zero(),
            _ => true,
        }
    }

    /// Index past which the rule itself guarantees `a_n >= 0`, non-increasing
    /// and convex; `None` if no such index exists. Below it, convexity has to
    /// be checked term by term.
    pub fn convex_from(&self) -> Option<u64> {
        match self {
            SeqRule::Zero => Some(1),
            SeqRule::Finite { values } => Some(values.len() as u64 + 1),
            SeqRule::Geometric { c, r } => {
                (!c.is_negative() && r.is_positive()).then_some(1)
            }
            SeqRule::Harmonic { c, .. } => (!c.is_negative()).then_some(1),
            SeqRule::Constant { c } => c.is_zero().then_some(1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;

    #[test]
    fn json_round_trip_uses_kind_and_params() {
        let rule = SeqRule::geometric(q(-1, 4), q(1, 2)).unwrap();
        let json = serde_json::to_string(&rule).unwrap();
        assert_eq!(json, r#"{"kind":"geometric","params":{"c":"-1/4","r":"1/2"}}"#);
        assert_eq!(SeqRule::parse(&json).unwrap(), rule);
        assert_eq!(
            serde_json::to_string(&SeqRule::Zero).unwrap(),
            r#"{"kind":"zero"}"#
        );
    }

    #[test]
    fn compact_forms() {
        assert_eq!(
            SeqRule::parse("geometric:1/16:1/3").unwrap(),
            SeqRule::Geometric {
                c: q(1, 16),
                r: q(1, 3)
            }
        );
        assert_eq!(
            SeqRule::parse("finite:1/4,0,-1/8").unwrap().value(3),
            q(-1, 8)
        );
        assert!(SeqRule::parse("geometric:1:1").is_err());
        assert!(SeqRule::parse("bogus").is_err());
    }

    #[test]
    fn geometric_tail_sums() {
        let rule = SeqRule::geometric(q(-1, 4), q(1, 2)).unwrap();
        assert_eq!(rule.value(1), q(-1, 8));
        assert_eq!(rule.abs_tail_sum(1).unwrap(), q(1, 4));
        assert_eq!(rule.abs_tail_sum(3).unwrap(), q(1, 16));
        assert_eq!(SeqRule::Harmonic { c: qi(1), shift: 1 }.abs_tail_sum(1), None);
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bernoulli::{BernoulliParams, BernoulliSet};
use crate::correspondence::source::{BernoulliSource, MomentSource, MultipleSource, SeriesSource, SkewSource};
use crate::error::{Error, Result};
use crate::rademacher::{Partition, SeriesKind};
use crate::skew::{realize_target, TargetMode};
use crate::spectral::SeqRule;

/// Default number of terms kept for the sign-controlled series.
pub const DEFAULT_SUPPORT: u64 = 10;

fn default_support() -> u64 {
    DEFAULT_SUPPORT
}

fn default_mode() -> TargetMode {
    TargetMode::Summable
}

/// Declarative description of a moment source.
///
/// String forms: `half`, `series:<partition>[:<K>]`,
/// `multiple:<under|over>:<d>`, `skew[-convex]:<rule>`,
/// `bernoulli:<over|under>:<p0,p1,p2>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Half,
    Series {
        partition: Partition,
        #[serde(default = "default_support")]
        support: u64,
    },
    Multiple {
        /// `antisymmetric` for under-, `symmetric` for over-recurrence.
        variant: SeriesKind,
        order: usize,
    },
    Skew {
        target: SeqRule,
        #[serde(default = "default_mode")]
        mode: TargetMode,
    },
    Bernoulli {
        set: BernoulliSet,
        params: BernoulliParams,
    },
}

impl SourceSpec {
    pub fn build(&self) -> Result<Box<dyn MomentSource>> {
        Ok(match self {
            SourceSpec::Half => Box::new(MultipleSource::half()),
            SourceSpec::Series { partition, support } => {
                Box::new(SeriesSource::canonical(partition.clone(), *support)?)
            }
            SourceSpec::Multiple { variant, order } => Box::new(MultipleSource::canonical(*order, *variant)?),
            SourceSpec::Skew { target, mode } => Box::new(SkewSource::new(realize_target(target, *mode)?)),
            SourceSpec::Bernoulli { set, params } => Box::new(BernoulliSource::new(params.clone(), *set)),
        })
    }
}

fn variant_name(kind: SeriesKind) -> &'static str {
    match kind {
        SeriesKind::Antisymmetric => "under",
        SeriesKind::Symmetric => "over",
        SeriesKind::OneSided => "one-sided",
    }
}

fn set_name(set: BernoulliSet) -> &'static str {
    match set {
        BernoulliSet::Over => "over",
        BernoulliSet::Under => "under",
    }
}

impl FromStr for SourceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "half" {
            return Ok(SourceSpec::Half);
        }
        let (head, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(s, "expected <kind>:<arguments> or half"))?;
        match head {
            "series" => {
                let (partition, support) = match rest.split_once(':') {
                    Some((p, k)) => (p, k.parse().map_err(|_| Error::parse(s, "support must be an integer"))?),
                    None => (rest, DEFAULT_SUPPORT),
                };
                Ok(SourceSpec::Series {
                    partition: partition.parse()?,
                    support,
                })
            }
            "multiple" => {
                let (v, d) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::parse(s, "expected multiple:<under|over>:<d>"))?;
                let variant = match v {
                    "under" | "antisymmetric" => SeriesKind::Antisymmetric,
                    "over" | "symmetric" => SeriesKind::Symmetric,
                    _ => return Err(Error::parse(s, "variant is under or over")),
                };
                let order = d.parse().map_err(|_| Error::parse(s, "order must be an integer"))?;
                Ok(SourceSpec::Multiple { variant, order })
            }
            "skew" | "skew-convex" => Ok(SourceSpec::Skew {
                target: rest.parse()?,
                mode: if head == "skew" {
                    TargetMode::Summable
                } else {
                    TargetMode::Convex
                },
            }),
            "bernoulli" => {
                let (set, p) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::parse(s, "expected bernoulli:<over|under>:<p0,p1,p2>"))?;
                let set = match set {
                    "over" => BernoulliSet::Over,
                    "under" => BernoulliSet::Under,
                    _ => return Err(Error::parse(s, "set is over or under")),
                };
                Ok(SourceSpec::Bernoulli {
                    set,
                    params: BernoulliParams::parse(p)?,
                })
            }
            _ => Err(Error::parse(s, "unknown source kind")),
        }
    }
}

impl fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceSpec::Half => write!(f, "half"),
            SourceSpec::Series { partition, support } => write!(f, "series:{partition}:{support}"),
            SourceSpec::Multiple { variant, order } => write!(f, "multiple:{}:{order}", variant_name(*variant)),
            SourceSpec::Skew { target, mode } => {
                let head = match mode {
                    TargetMode::Summable => "skew",
                    TargetMode::Convex => "skew-convex",
                };
                write!(f, "{head}:{target}")
            }
            SourceSpec::Bernoulli { set, params } => write!(f, "bernoulli:{}:{params}", set_name(*set)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{q, Enclosure};

    #[test]
    fn parses_and_builds() {
        let cases = [
            "half",
            "series:-",
            "series:+-:6",
            "multiple:under:3",
            "multiple:over:2",
            "skew:geometric:1/16:1/3",
            "bernoulli:under:1/3,1/3,1/3",
        ];
        for c in cases {
            let spec: SourceSpec = c.parse().unwrap();
            let src = spec.build().unwrap();
            assert!(src.mean().is_ok(), "{c}");
            let again: SourceSpec = spec.to_string().parse().unwrap();
            assert_eq!(again, spec, "{c}");
        }
        let s: SourceSpec = "series:-".parse().unwrap();
        assert_eq!(s.build().unwrap().mean().unwrap(), Enclosure::exact(q(1, 2)));
    }

    #[test]
    fn json_round_trip() {
        let spec: SourceSpec = "bernoulli:over:1/40,9/10,3/40".parse().unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: SourceSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let raw = r#"{"kind": "series", "partition": "+-"}"#;
        let s: SourceSpec = serde_json::from_str(raw).unwrap();
        assert_eq!(
            s,
            SourceSpec::Series {
                partition: Partition::alternating(),
                support: DEFAULT_SUPPORT
            }
        );
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in ["", "series", "multiple:sideways:2", "bernoulli:over:1,1,1", "coin:1"] {
            assert!(bad.parse::<SourceSpec>().is_err(), "{bad}");
        }
        assert!("skew:geometric:1/16:1/2".parse::<SourceSpec>().unwrap().build().is_err());
    }
}

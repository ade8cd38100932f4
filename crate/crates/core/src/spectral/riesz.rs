//! Fourier coefficients of Riesz products `prod_j (1 + a_j cos(3^j t))`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{parse_rational, qi, serde_q, sqrt_enclosure, Enclosure, Q, DEFAULT_PRECISION_BITS};
use crate::spectral::ternary::nonzero_positions;

/// Lacunary base; fixed.
pub const RIESZ_BASE: u64 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum AmplitudeRule {
    /// `a_0, ..., a_{m-1}` then zeros (a finite product).
    List {
        #[serde(with = "serde_q::vec")]
        values: Vec<Q>,
    },
    Constant {
        #[serde(with = "serde_q")]
        c: Q,
    },
    /// `a_j = 1 / sqrt(j + 1)`.
    InvSqrt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RieszSpec {
    pub amplitudes: AmplitudeRule,
    #[serde(default = "default_bits")]
    pub precision_bits: u32,
}

fn default_bits() -> u32 {
    DEFAULT_PRECISION_BITS
}

impl RieszSpec {
    pub fn new(amplitudes: AmplitudeRule) -> Result<Self> {
        let spec = RieszSpec {
            amplitudes,
            precision_bits: DEFAULT_PRECISION_BITS,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn inv_sqrt() -> Self {
        RieszSpec {
            amplitudes: AmplitudeRule::InvSqrt,
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision_bits = bits;
        self
    }

    /// `inv_sqrt`, `constant:c` or `list:a0,a1,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let t = spec.trim();
        let amplitudes = if t.starts_with('{') {
            serde_json::from_str(t).map_err(|e| Error::parse(spec, e.to_string()))?
        } else if t == "inv_sqrt" {
            AmplitudeRule::InvSqrt
        } else if let Some(c) = t.strip_prefix("constant:") {
            AmplitudeRule::Constant {
                c: parse_rational(c)?,
            }
        } else if let Some(vals) = t.strip_prefix("list:") {
            AmplitudeRule::List {
                values: vals.split(',').map(parse_rational).collect::<Result<_>>()?,
            }
        } else {
            return Err(Error::parse(spec, "expected inv_sqrt, constant:c or list:a0,..."));
        };
        RieszSpec::new(amplitudes)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = match &self.amplitudes {
            AmplitudeRule::List { values } => values.iter().any(|v| v.abs() > Q::one()),
            AmplitudeRule::Constant { c } => c.abs() > Q::one(),
            AmplitudeRule::InvSqrt => false,
        };
        if bad {
            return Err(Error::invalid("Riesz amplitudes must satisfy |a_j| <= 1"));
        }
        Ok(())
    }

    /// Enclosure of `a_j`.
    pub fn amplitude(&self, j: usize) -> Enclosure {
        match &self.amplitudes {
            AmplitudeRule::List { values } => {
                Enclosure::exact(values.get(j).cloned().unwrap_or_default())
            }
            AmplitudeRule::Constant { c } => Enclosure::exact(c.clone()),
            AmplitudeRule::InvSqrt => {
                sqrt_enclosure(&Q::new(1.into(), (j as i64 + 1).into()), self.precision_bits)
            }
        }
    }

    /// `sum_{j < count} a_j^2`, exact for every rule.
    pub fn squares_partial_sum(&self, count: usize) -> Q {
        (0..count)
            .map(|j| match &self.amplitudes {
                AmplitudeRule::List { values } => {
                    let v = values.get(j).cloned().unwrap_or_default();
                    &v * &v
                }
                AmplitudeRule::Constant { c } => c * c,
                AmplitudeRule::InvSqrt => Q::new(1.into(), (j as i64 + 1).into()),
            })
            .fold(Q::zero(), |a, b| a + b)
    }

    /// Whether `sum a_j^2` diverges. This is reported metadata about the
    /// limiting measure (divergence goes with a singular Riesz product), not
    /// something the library proves.
    pub fn squares_diverge(&self) -> bool {
        match &self.amplitudes {
            AmplitudeRule::List { .. } => false,
            AmplitudeRule::Constant { c } => !c.is_zero(),
            AmplitudeRule::InvSqrt => true,
        }
    }
}

/// `sigma_hat(n)`: 1 at `n = 0`, otherwise the product of `a_j / 2` over the
/// nonzero balanced-ternary digits of `|n|`.
pub fn riesz_coefficient(spec: &RieszSpec, n: i64) -> Enclosure {
    if n == 0 {
        return Enclosure::one();
    }
    let positions: Vec<usize> = nonzero_positions(n.unsigned_abs()).collect();
    match &spec.amplitudes {
        AmplitudeRule::InvSqrt => {
            // the square is rational: prod 1 / (4 (j + 1)); one root, one rounding
            let den = positions
                .iter()
                .fold(num_bigint::BigInt::one(), |acc, &j| acc * (4 * (j as i64 + 1)));
            sqrt_enclosure(&Q::new(1.into(), den), spec.precision_bits)
        }
        AmplitudeRule::List { values } => {
            let mut acc = Q::one();
            for &j in &positions {
                match values.get(j) {
                    Some(v) => acc *= v,
                    None => return Enclosure::zero(),
                }
            }
            Enclosure::exact(acc / Q::from_integer(num_bigint::BigInt::one() << positions.len()))
        }
        AmplitudeRule::Constant { c } => {
            let half = c / qi(2);
            Enclosure::exact(crate::numeric::pow(&half, positions.len() as u64))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{q, to_f64};

    #[test]
    fn first_coefficients_of_inv_sqrt_product() {
        let spec = RieszSpec::inv_sqrt();
        assert_eq!(riesz_coefficient(&spec, 0), Enclosure::one());
        assert_eq!(riesz_coefficient(&spec, 1), Enclosure::exact(q(1, 2)));
        let c2 = riesz_coefficient(&spec, 2);
        let expected = 1.0 / (4.0 * 2f64.sqrt());
        assert!(c2.width_f64() < 1e-15);
        assert!((c2.mid_f64() - expected).abs() < 1e-15);
        assert!((to_f64(c2.lo()) - 0.1767767).abs() < 1e-7);
        assert_eq!(riesz_coefficient(&spec, -2), c2);
    }

    #[test]
    fn list_amplitudes_are_exact_and_vanish_past_the_list() {
        let spec = RieszSpec::new(AmplitudeRule::List {
            values: vec![q(1, 2), q(-1, 3)],
        })
        .unwrap();
        // 4 = 1 + 3
        assert_eq!(riesz_coefficient(&spec, 4), Enclosure::exact(q(-1, 24)));
        // 9 uses digit j = 2, beyond the list
        assert_eq!(riesz_coefficient(&spec, 9), Enclosure::zero());
    }

    #[test]
    fn rejects_large_amplitudes() {
        assert!(RieszSpec::parse("constant:3/2").is_err());
        assert!(RieszSpec::parse("list:1,1/2").is_ok());
    }

    #[test]
    fn divergence_flag() {
        let spec = RieszSpec::inv_sqrt();
        assert!(spec.squares_diverge());
        assert!(spec.squares_partial_sum(100) > qi(5));
        let fin = RieszSpec::parse("list:1/2,1/2").unwrap();
        assert!(!fin.squares_diverge());
        assert_eq!(fin.squares_partial_sum(100), q(1, 2));
    }
}

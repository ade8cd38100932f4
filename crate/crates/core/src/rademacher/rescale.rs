use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{qi, serde_q, Q};
use crate::rademacher::series::{SeriesKind, SignedSeries};

/// `f~ = (M + f) / (2M) = 1/2 + f / (2M)` for a bound `|f| <= M`, mapping
/// `f` into `[0, 1]`. `M = 0` gives `f~ = 1/2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineRescale {
    #[serde(with = "serde_q")]
    pub norm_bound: Q,
    #[serde(with = "serde_q")]
    pub offset: Q,
    #[serde(with = "serde_q")]
    pub scale: Q,
}

impl AffineRescale {
    pub fn new(norm_bound: Q) -> Result<Self> {
        if norm_bound.is_negative() {
            return Err(Error::invalid("sup-norm bound must be nonnegative"));
        }
        let scale = if norm_bound.is_zero() {
            Q::zero()
        } else {
            Q::one() / (qi(2) * &norm_bound)
        };
        Ok(AffineRescale {
            norm_bound,
            offset: Q::one() / qi(2),
            scale,
        })
    }

    /// For `f = g + sum a_k T^k g`: `M = 1 + sum |a_k|`; for the `h`-series:
    /// `M = sum_{k in Z} |a_k|`.
    pub fn for_series(series: &SignedSeries) -> Self {
        let m = match series.kind {
            SeriesKind::OneSided => Q::one() + series.abs_sum(),
            _ => series.two_sided_abs_sum(),
        };
        AffineRescale::new(m).expect("sums of absolute values are nonnegative")
    }

    pub fn apply(&self, x: &Q) -> Q {
        &self.offset + &self.scale * x
    }

    pub fn apply_f64(&self, x: f64) -> f64 {
        crate::numeric::to_f64(&self.offset) + crate::numeric::to_f64(&self.scale) * x
    }

    pub fn mean(&self, mean_f: &Q) -> Q {
        self.apply(mean_f)
    }

    /// Defects scale by `1 / (2M)^2`.
    pub fn defect(&self, defect_f: &Q) -> Q {
        &self.scale * &self.scale * defect_f
    }
}

pub fn rescale_to_unit(series: &SignedSeries) -> AffineRescale {
    AffineRescale::for_series(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;
    use crate::rademacher::series::Partition;

    #[test]
    fn examples() {
        let r = AffineRescale::new(qi(2)).unwrap();
        assert_eq!(r.mean(&Q::zero()), q(1, 2));
        assert_eq!(r.apply(&qi(-2)), Q::zero());
        assert_eq!(r.apply(&qi(2)), Q::one());
        let z = AffineRescale::new(Q::zero()).unwrap();
        assert_eq!(z.apply(&Q::zero()), q(1, 2));
        let r = AffineRescale::new(q(3, 2)).unwrap();
        assert_eq!(r.defect(&q(-5, 24)), q(-5, 216));
        assert!(AffineRescale::new(qi(-1)).is_err());
    }

    #[test]
    fn series_bounds() {
        let s = SignedSeries::canonical_sign_control(Partition::all_negative());
        assert_eq!(AffineRescale::for_series(&s).norm_bound, q(3, 2));
        let m = SignedSeries::canonical_multiple(2, SeriesKind::Antisymmetric).unwrap();
        assert_eq!(AffineRescale::for_series(&m).norm_bound, q(1, 16));
    }
}

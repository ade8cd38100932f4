//! The torus skew product `T(x, y) = (x, y + x)` with `mu = sigma x m` and
//! `f(x, y) = (1 + cos 2 pi y) / 2`, whose defects are `sigma_hat(n) / 8`.
//!
//! `T` preserves `mu`: each fibre `{x} x T` is rotated by `x`, which
//! preserves `m`, and the first coordinate is fixed.

use std::f64::consts::TAU;

use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{q, qi, render_rational, Enclosure, Q};
use crate::spectral::{realize_convex, realize_summable, ConvexSequence, FourierMeasure, SeqRule, DEFAULT_HORIZON};

/// Default quadrature resolution per axis.
pub const QUADRATURE_GRID: usize = 2048;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewSystem {
    sigma: FourierMeasure,
}

impl SkewSystem {
    pub fn new(sigma: FourierMeasure) -> Self {
        SkewSystem { sigma }
    }

    pub fn sigma(&self) -> &FourierMeasure {
        &self.sigma
    }

    /// `int f d mu`.
    pub fn mean(&self) -> Q {
        q(1, 2)
    }

    /// `d_f(n) = sigma_hat(n) / 8`.
    pub fn defect(&self, n: i64) -> Enclosure {
        self.sigma.coefficient(n).scale(&q(1, 8))
    }

    /// `int f T^n f d mu`.
    pub fn correlation(&self, n: i64) -> Enclosure {
        &Enclosure::exact(q(1, 4)) + &self.defect(n)
    }
}

pub fn skew_defect(sys: &SkewSystem, n: i64) -> Enclosure {
    sys.defect(n)
}

/// Tensor trapezoid rule for `int int f(x, y) f(x, y + n x) phi(x) dx dy - 1/4`
/// on a `grid x grid` lattice. Rows are summed in parallel and reduced in a
/// fixed order.
pub fn quadrature_oracle(sys: &SkewSystem, n: i64, grid: usize) -> Result<f64> {
    if !sys.sigma.is_trig_polynomial() {
        return Err(Error::invalid("quadrature needs a trigonometric-polynomial density"));
    }
    if grid == 0 {
        return Err(Error::invalid("quadrature grid must be positive"));
    }
    let h = 1.0 / grid as f64;
    let f = |y: f64| 0.5 * (1.0 + (TAU * y.rem_euclid(1.0)).cos());
    let rows: Vec<f64> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 * h;
            let phi = sys.sigma.density_f64(x);
            let shift = (n as f64 * x).rem_euclid(1.0);
            let mut acc = 0.0;
            for j in 0..grid {
                let y = j as f64 * h;
                acc += f(y) * f(y + shift);
            }
            phi * acc * h
        })
        .collect();
    let total: f64 = rows.iter().sum::<f64>() * h;
    Ok(total - 0.25)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetMode {
    /// `sum |a_n| < 1/16`.
    Summable,
    /// `a_n` decreases convexly to 0 with `a_1 <= 1/8`.
    Convex,
}

impl std::str::FromStr for TargetMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "summable" => Ok(TargetMode::Summable),
            "convex" => Ok(TargetMode::Convex),
            _ => Err(Error::parse(s, "mode is summable or convex")),
        }
    }
}

/// A skew system whose defects are the target `a_n`, built from
/// `sigma_hat(n) = 8 a_n`.
pub fn realize_target(rule: &SeqRule, mode: TargetMode) -> Result<SkewSystem> {
    realize_target_with_horizon(rule, mode, DEFAULT_HORIZON)
}

pub fn realize_target_with_horizon(rule: &SeqRule, mode: TargetMode, horizon: u64) -> Result<SkewSystem> {
    rule.validate()?;
    let sigma = match mode {
        TargetMode::Summable => {
            let total = rule
                .abs_tail_sum(1)
                .ok_or_else(|| Error::invalid("target is not absolutely summable"))?;
            if total >= q(1, 16) {
                return Err(Error::invalid(format!(
                    "sum |a_n| = {} is not below 1/16",
                    render_rational(&total)
                )));
            }
            realize_summable(rule, &qi(8), horizon)?
        }
        TargetMode::Convex => {
            ConvexSequence::new(rule.clone(), horizon)?;
            let a1 = rule.value(1);
            if a1 > q(1, 8) {
                return Err(Error::invalid("convex targets need a_1 <= 1/8"));
            }
            // with sigma_hat(0) = 1 the scaled sequence must stay convex at
            // n = 1: 1 - 16 a_1 + 8 a_2 >= 0
            let boundary = Q::one() - qi(16) * &a1 + qi(8) * rule.value(2);
            if boundary.is_negative() {
                return Err(Error::invalid(
                    "1 - 16 a_1 + 8 a_2 < 0: 8 a_n extended by 1 at n = 0 is not convex",
                ));
            }
            let scaled = ConvexSequence::new(rule.scaled(&qi(8)), horizon)?;
            realize_convex(&scaled, horizon)?
        }
    };
    Ok(SkewSystem::new(sigma))
}

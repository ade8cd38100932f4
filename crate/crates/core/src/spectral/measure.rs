use std::f64::consts::TAU;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{qi, to_f64, Enclosure, Interval, Q};
use crate::spectral::rules::SeqRule;

/// Grid used for the diagnostic nonnegativity scan.
pub const DENSITY_GRID: usize = 4096;
/// Eigenvalue floor for the Toeplitz positive-definiteness witness.
pub const TOEPLITZ_TOLERANCE: f64 = 1e-10;
pub const TOEPLITZ_MAX_SIZE: usize = 64;

/// Coefficients beyond the explicit horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    Zero,
    /// `c_n = rule(n)` exactly for every `n` past the horizon.
    Rule(SeqRule),
}

/// A symmetric probability measure on the circle, accessed through its
/// Fourier coefficients. `c_0 = 1` and `c_{-n} = c_n` are structural.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierMeasure {
    explicit: Vec<Enclosure>,
    tail: Tail,
    fejer_nonnegative: bool,
}

impl FourierMeasure {
    pub fn lebesgue() -> Self {
        FourierMeasure {
            explicit: Vec::new(),
            tail: Tail::Zero,
            fejer_nonnegative: false,
        }
    }

    /// Trigonometric-polynomial coefficients `c_1, .., c_H`. No positivity
    /// check is made; use [`FourierMeasure::certify_nonnegative`] or the
    /// `realize_*` constructors for certified measures.
    pub fn from_coefficients(coeffs: Vec<Q>) -> Self {
        FourierMeasure {
            explicit: coeffs.into_iter().map(Enclosure::exact).collect(),
            tail: Tail::Zero,
            fejer_nonnegative: false,
        }
    }

    pub fn from_parts(explicit: Vec<Enclosure>, tail: Tail) -> Self {
        FourierMeasure {
            explicit,
            tail,
            fejer_nonnegative: false,
        }
    }

    pub(crate) fn mark_fejer_nonnegative(mut self) -> Self {
        self.fejer_nonnegative = true;
        self
    }

    pub fn horizon(&self) -> u64 {
        self.explicit.len() as u64
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// `c_n` for any integer `n`.
    pub fn coefficient(&self, n: i64) -> Enclosure {
        let k = n.unsigned_abs();
        if k == 0 {
            return Enclosure::one();
        }
        if k <= self.horizon() {
            return self.explicit[(k - 1) as usize].clone();
        }
        match &self.tail {
            Tail::Zero => Enclosure::zero(),
            Tail::Rule(rule) => Enclosure::exact(rule.value(k)),
        }
    }

    /// Degree of the density when it is a trigonometric polynomial.
    pub fn degree(&self) -> Option<u64> {
        let tail_end = match &self.tail {
            Tail::Zero => 0,
            Tail::Rule(rule) => rule.support_end()?,
        };
        let explicit_end = self
            .explicit
            .iter()
            .rposition(|c| !(c.is_exact() && c.lo().is_zero()))
            .map_or(0, |i| i as u64 + 1);
        Some(explicit_end.max(tail_end))
    }

    pub fn is_trig_polynomial(&self) -> bool {
        self.degree().is_some()
    }

    /// `sum_{n > H} |c_n|`, `None` if the tail is not summable.
    pub fn tail_abs_sum(&self) -> Option<Q> {
        match &self.tail {
            Tail::Zero => Some(Q::zero()),
            Tail::Rule(rule) => rule.abs_tail_sum(self.horizon() + 1),
        }
    }

    /// Upper bound on `sum_{n >= 1} |c_n|`.
    pub fn abs_sum_bound(&self) -> Option<Q> {
        let explicit = self
            .explicit
            .iter()
            .map(Enclosure::mag)
            .fold(Q::zero(), |a, b| a + b);
        Some(explicit + self.tail_abs_sum()?)
    }

    /// Enclosure of the density `1 + 2 sum c_n cos(2 pi n t)`. The explicit
    /// part is summed in interval arithmetic; the tail contributes
    /// `[-b, b]` with `b = 2 sum_{n > H} |c_n|`.
    pub fn density_at(&self, t: f64) -> Result<Interval> {
        let tail = self
            .tail_abs_sum()
            .ok_or_else(|| Error::invalid("density undefined: coefficient tail is not summable"))?;
        let mut acc = Interval::point(1.0);
        for (i, c) in self.explicit.iter().enumerate() {
            let n = (i + 1) as f64;
            let phase = (n * t).rem_euclid(1.0);
            let err = TAU * (n * t.abs() + 1.0) * f64::EPSILON;
            let cos = Interval::with_error((TAU * phase).cos(), err);
            let two_c = Interval::from_enclosure(c) * Interval::point(2.0);
            acc = acc + two_c * cos;
        }
        let b = 2.0 * to_f64(&tail);
        Ok(acc.widen(b))
    }

    /// Floating-point density for quadrature; only for trigonometric
    /// polynomials.
    pub fn density_f64(&self, t: f64) -> f64 {
        let deg = self.degree().expect("density_f64 needs a trigonometric polynomial");
        let mut acc = 1.0;
        for n in 1..=deg {
            let c = self.coefficient(n as i64).mid_f64();
            if c != 0.0 {
                acc += 2.0 * c * (TAU * ((n as f64 * t).rem_euclid(1.0))).cos();
            }
        }
        acc
    }

    /// Smallest eigenvalue of the `(size + 1) x (size + 1)` Toeplitz matrix
    /// `[c_{|i - j|}]` (coefficient midpoints). By eigenvalue interlacing
    /// this also bounds every smaller leading block.
    pub fn toeplitz_min_eigenvalue(&self, size: usize) -> f64 {
        let coeffs: Vec<f64> = (0..=size).map(|k| self.coefficient(k as i64).mid_f64()).collect();
        let m = DMatrix::from_fn(size + 1, size + 1, |i, j| coeffs[i.abs_diff(j)]);
        SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn toeplitz_witness(&self, size: usize) -> ToeplitzWitness {
        let size = size.min(TOEPLITZ_MAX_SIZE);
        let min_eigenvalue = self.toeplitz_min_eigenvalue(size);
        ToeplitzWitness {
            size,
            min_eigenvalue,
            passes: min_eigenvalue >= -TOEPLITZ_TOLERANCE,
        }
    }

    /// Analytic bound `1 - 2 sum |c_n|` together with a grid scan.
    pub fn certify_nonnegative(&self, grid: usize) -> NonnegCertificate {
        let analytic_bound = self.abs_sum_bound().map(|s| Q::one() - qi(2) * s);
        let grid_min = self.tail_abs_sum().map(|_| {
            (0..grid)
                .map(|i| {
                    self.density_at(i as f64 / grid as f64)
                        .map(|e| e.lo)
                        .unwrap_or(f64::NEG_INFINITY)
                })
                .fold(f64::INFINITY, f64::min)
        });
        let analytic_ok = analytic_bound.as_ref().is_some_and(|b| !b.is_negative());
        NonnegCertificate {
            analytic_bound,
            grid_min,
            by_construction: self.fejer_nonnegative,
            certified: analytic_ok || self.fejer_nonnegative,
        }
    }

    /// Rows `(n, c_n enclosure)` for `0 <= n <= n_max`.
    pub fn rows(&self, n_max: u64) -> Vec<(u64, Enclosure)> {
        (0..=n_max).map(|n| (n, self.coefficient(n as i64))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToeplitzWitness {
    pub size: usize,
    pub min_eigenvalue: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonnegCertificate {
    /// `1 - 2 sum |c_n|`; nonnegative values certify the density.
    pub analytic_bound: Option<Q>,
    /// Lowest enclosure endpoint over the grid (diagnostic).
    pub grid_min: Option<f64>,
    /// Nonnegative combination of Fejer kernels.
    pub by_construction: bool,
    pub certified: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;

    fn geometric_measure() -> FourierMeasure {
        let rule = SeqRule::geometric(q(-1, 4), q(1, 2)).unwrap();
        let explicit = (1..=64).map(|n| Enclosure::exact(rule.value(n))).collect();
        FourierMeasure::from_parts(explicit, Tail::Rule(rule))
    }

    #[test]
    fn lebesgue_density_is_one() {
        let m = FourierMeasure::lebesgue();
        for t in [0.0, 0.1, 0.5, 0.99] {
            let d = m.density_at(t).unwrap();
            assert!(d.contains(1.0));
            assert!(d.width() < 1e-15);
        }
    }

    #[test]
    fn geometric_density_at_zero_and_half() {
        let m = geometric_measure();
        let tail = 2.0 * to_f64(&m.tail_abs_sum().unwrap());
        let d0 = m.density_at(0.0).unwrap();
        assert!(d0.contains(0.5), "{d0:?}");
        assert!(d0.width() <= 2.0 * tail + 1e-12);
        // 1 + 2 * sum (-1)^{n+1} 2^{-(n+2)} = 1 + 1/6
        let dh = m.density_at(0.5).unwrap();
        assert!((dh.mid() - 7.0 / 6.0).abs() < 1e-12, "{dh:?}");
    }

    #[test]
    fn symmetric_coefficients_and_tail() {
        let m = geometric_measure();
        assert_eq!(m.coefficient(0), Enclosure::one());
        assert_eq!(m.coefficient(-3), m.coefficient(3));
        assert_eq!(m.coefficient(100), Enclosure::exact(q(-1, 4) * crate::numeric::pow(&q(1, 2), 100)));
        assert_eq!(m.degree(), None);
        assert_eq!(m.abs_sum_bound().unwrap(), q(1, 4));
    }

    #[test]
    fn non_summable_tail_has_no_density() {
        let m = FourierMeasure::from_parts(vec![], Tail::Rule(SeqRule::Harmonic { c: qi(1), shift: 1 }));
        assert!(m.density_at(0.3).is_err());
    }

    #[test]
    fn toeplitz_witness_flags_invalid_coefficients() {
        assert!(geometric_measure().toeplitz_witness(64).passes);
        let bad = FourierMeasure::from_coefficients(vec![q(-3, 5)]);
        let w = bad.toeplitz_witness(8);
        assert!(!w.passes, "{w:?}");
    }

    #[test]
    fn nonnegativity_certificate() {
        let cert = geometric_measure().certify_nonnegative(DENSITY_GRID);
        assert!(cert.certified);
        assert_eq!(cert.analytic_bound, Some(q(1, 2)));
        assert!(cert.grid_min.unwrap() > 0.49);
        let bad = FourierMeasure::from_coefficients(vec![q(-3, 5)]).certify_nonnegative(256);
        assert!(!bad.certified);
        assert!(bad.grid_min.unwrap() < 0.0);
    }
}

//! Truncated slice-regular power series on the unit ball.
//!
//! A series `f(q) = Σ qⁿ aₙ` keeps its coefficients on the right of the
//! powers of `q`. Under the `*`-product the coefficients convolve as
//! `(f*g)ₙ = Σ_{k+l=n} a_k b_l`, which is in general not the pointwise product.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{Quaternion, EPS_ZERO};

/// Default truncation order for oracle comparisons.
pub const DEFAULT_TRUNCATION: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "SeriesJson")]
pub struct RegularPowerSeries {
    coeffs: Vec<Quaternion>,
}

/// Wire form `{"coeffs": [[w,x,y,z], …]}`.
#[derive(Deserialize)]
struct SeriesJson {
    coeffs: Vec<Quaternion>,
}

impl From<SeriesJson> for RegularPowerSeries {
    fn from(raw: SeriesJson) -> Self {
        RegularPowerSeries::new(raw.coeffs)
    }
}

impl RegularPowerSeries {
    /// Builds `Σ qⁿ coeffs[n]`. An empty list is the zero series.
    pub fn new(coeffs: Vec<Quaternion>) -> Self {
        if coeffs.is_empty() {
            return RegularPowerSeries { coeffs: vec![Quaternion::ZERO] };
        }
        RegularPowerSeries { coeffs }
    }

    pub fn constant(a: Quaternion) -> Self {
        RegularPowerSeries::new(vec![a])
    }

    /// The linear function `q ↦ q·a + b`.
    pub fn linear(a: Quaternion, b: Quaternion) -> Self {
        RegularPowerSeries::new(vec![b, a])
    }

    pub fn coeffs(&self) -> &[Quaternion] {
        &self.coeffs
    }

    /// Truncation order `N` (number of stored coefficients minus one).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Index of the last non-zero coefficient; `None` for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != Quaternion::ZERO)
    }

    pub fn truncate(&self, order: usize) -> Self {
        RegularPowerSeries::new(self.coeffs.iter().copied().take(order + 1).collect())
    }

    /// Largest coefficient modulus, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Evaluates at `q`; fails outside the open unit ball.
    pub fn eval(&self, q: Quaternion) -> Result<Quaternion> {
        if !(q.norm() < 1.0) {
            return Err(Error::Domain(format!("series evaluated at {q} with |q| >= 1")));
        }
        Ok(self.eval_unchecked(q))
    }

    /// Horner evaluation `a₀ + q(a₁ + q(a₂ + …))` without the domain check;
    /// finite truncations are polynomials and make sense everywhere.
    pub fn eval_unchecked(&self, q: Quaternion) -> Quaternion {
        self.coeffs.iter().rev().fold(Quaternion::ZERO, |acc, &a| q * acc + a)
    }

    /// Directional derivative `d/dt f(q + tα)` at `t = 0`.
    ///
    /// Uses `d(qⁿ)[α] = Σ_{k<n} qᵏ α qⁿ⁻¹⁻ᵏ`, accumulated alongside the powers.
    pub fn directional_derivative(&self, q: Quaternion, alpha: Quaternion) -> Quaternion {
        let mut power = Quaternion::ONE; // qⁿ
        let mut dpower = Quaternion::ZERO; // d(qⁿ)[α]
        let mut out = Quaternion::ZERO;
        for (n, &a) in self.coeffs.iter().enumerate() {
            if n > 0 {
                // d(qⁿ) = d(qⁿ⁻¹)·q + qⁿ⁻¹·α
                dpower = dpower * q + power * alpha;
                power *= q;
            }
            out += dpower * a;
        }
        out
    }

    /// `*`-product: Cauchy convolution with the left factor's coefficients on the left.
    pub fn star_mul(&self, other: &Self) -> Self {
        let mut out = vec![Quaternion::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (k, &a) in self.coeffs.iter().enumerate() {
            for (l, &b) in other.coeffs.iter().enumerate() {
                out[k + l] += a * b;
            }
        }
        RegularPowerSeries::new(out)
    }

    /// Regular conjugate `f^c`: conjugate every coefficient.
    pub fn regular_conjugate(&self) -> Self {
        RegularPowerSeries::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Symmetrization `f^s = f * f^c`, whose coefficients are real.
    ///
    /// The imaginary round-off is kept, not projected away, so callers can
    /// measure it.
    pub fn symmetrize(&self) -> Self {
        self.star_mul(&self.regular_conjugate())
    }

    /// `f^{-*}(q) = f^s(q)⁻¹ · f^c(q)`, defined off the zero set of `f^s`.
    pub fn eval_reciprocal(&self, q: Quaternion) -> Result<Quaternion> {
        let s = self.symmetrize().eval(q)?;
        let inv = invert_off_zero_set(s, q)?;
        Ok(inv * self.regular_conjugate().eval(q)?)
    }

    /// Evaluates the `*`-quotient `f^{-*} * g` at `q`.
    ///
    /// Since `1/f^s` has real coefficients, `f^{-*} * g = (1/f^s)·(f^c * g)`
    /// pointwise.
    pub fn eval_star_quotient(&self, numerator: &Self, q: Quaternion) -> Result<Quaternion> {
        let s = self.symmetrize().eval(q)?;
        let inv = invert_off_zero_set(s, q)?;
        Ok(inv * self.regular_conjugate().star_mul(numerator).eval(q)?)
    }

    /// Truncated series of `f^{-*} = (1/f^s) * f^c` through `order`.
    ///
    /// `1/f^s` is inverted coefficientwise on the real parts of `f^s`; the
    /// result satisfies `result * f = 1 + O(q^{order+1})`.
    pub fn reciprocal_series(&self, order: usize) -> Result<Self> {
        let s: Vec<f64> = self.symmetrize().coeffs.iter().map(|c| c.re()).collect();
        let s0 = s[0];
        if s0.abs() <= EPS_ZERO {
            return Err(Error::Singular(format!(
                "symmetrization has vanishing constant term {s0:e}; no reciprocal series"
            )));
        }
        let mut t = vec![0.0; order + 1];
        t[0] = 1.0 / s0;
        for n in 1..=order {
            let acc: f64 = (1..=n.min(s.len() - 1)).map(|k| s[k] * t[n - k]).sum();
            t[n] = -acc / s0;
        }
        let inv = RegularPowerSeries::new(t.into_iter().map(Quaternion::real).collect());
        Ok(inv.star_mul(&self.regular_conjugate()).truncate(order))
    }
}

fn invert_off_zero_set(s: Quaternion, q: Quaternion) -> Result<Quaternion> {
    if s.norm() <= EPS_ZERO {
        return Err(Error::Singular(format!(
            "{q} lies in the zero set Z_(f^s) of the symmetrization (|f^s(q)| = {:e})",
            s.norm()
        )));
    }
    s.inv()
}

//! Quaternion algebra and the slice structure of `H`.
//!
//! Every `q ∈ H` lies on some slice `C_I = R + R·I` with `I` in the sphere `S`
//! of unit imaginary quaternions. [`slice_decompose`] recovers `(x, y, I)` with
//! `q = x + y·I`, and [`project_slice`] splits a direction into its `C_I`
//! component and its component in the orthogonal complement `C_I·J`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values with modulus at or below this are treated as zero when inverting.
pub const EPS_ZERO: f64 = 1e-13;

/// Samples are kept inside `|q| < 1 - EPS_BOUNDARY`.
pub const EPS_BOUNDARY: f64 = 1e-3;

/// A real quaternion `w + x·i + y·j + z·k`.
///
/// Serialized as the 4-array `[w, x, y, z]`.
#[derive(Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    /// The real basis `{1, i, j, k}`.
    pub const BASIS: [Quaternion; 4] = [Self::ONE, Self::I, Self::J, Self::K];

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    pub const fn from_array(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }

    pub const fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        // hypot-style scaling is unnecessary at the magnitudes used here
        self.norm_sqr().sqrt()
    }

    /// Real part `Re(q)`.
    pub fn re(self) -> f64 {
        self.w
    }

    /// Imaginary part `Im(q) = x·i + y·j + z·k`, itself a quaternion.
    pub fn im(self) -> Self {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    /// Euclidean inner product on `H ≅ R⁴`, equal to `Re(p · conj(q))`.
    pub fn dot(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Multiplicative inverse `conj(q) / |q|²`.
    pub fn inv(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2.sqrt() <= EPS_ZERO {
            return Err(Error::Singular(format!(
                "cannot invert quaternion {self} with |q| <= {EPS_ZERO:e}"
            )));
        }
        Ok(self.conj() / n2)
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// `q / |q|`, or an error for the zero quaternion.
    pub fn normalize(self) -> Result<Self> {
        let n = self.norm();
        if n <= EPS_ZERO {
            return Err(Error::Singular("cannot normalize the zero quaternion".into()));
        }
        Ok(self / n)
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        let d = self - other;
        d.w.abs().max(d.x.abs()).max(d.y.abs()).max(d.z.abs())
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.w.abs().max(self.x.abs()).max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// `qⁿ` by repeated multiplication.
    pub fn powi(self, n: usize) -> Self {
        (0..n).fold(Quaternion::ONE, |acc, _| acc * self)
    }

    /// Scalar (0-based) component access in the order `w, x, y, z`.
    pub fn component(self, index: usize) -> f64 {
        self.to_array()[index]
    }
}

impl From<[f64; 4]> for Quaternion {
    fn from(a: [f64; 4]) -> Self {
        Quaternion::from_array(a)
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        q.to_array()
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Quaternion::real(w)
    }
}

impl fmt::Debug for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}, {:?}, {:?}]", self.w, self.x, self.y, self.z)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}]", self.w, self.x, self.y, self.z)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Quaternion::new(self.w + rhs.w, self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Add<f64> for Quaternion {
    type Output = Self;
    fn add(self, rhs: f64) -> Self {
        Quaternion::new(self.w + rhs, self.x, self.y, self.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Quaternion::new(self.w - rhs.w, self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Sub<f64> for Quaternion {
    type Output = Self;
    fn sub(self, rhs: f64) -> Self {
        Quaternion::new(self.w - rhs, self.x, self.y, self.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a1, b1, c1, d1) = (self.w, self.x, self.y, self.z);
        let (a2, b2, c2, d2) = (rhs.w, rhs.x, rhs.y, rhs.z);
        Quaternion::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        rhs.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        Quaternion::new(self.w / rhs, self.x / rhs, self.y / rhs, self.z / rhs)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl std::iter::Sum for Quaternion {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Quaternion::ZERO, |a, b| a + b)
    }
}

/// A unit purely imaginary quaternion, i.e. a point of the sphere `S`.
///
/// Every such `I` satisfies `I² = -1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(into = "[f64; 4]")]
pub struct ImaginaryUnit(Quaternion);

impl ImaginaryUnit {
    /// The conventional unit used for real points.
    pub const DEFAULT: ImaginaryUnit = ImaginaryUnit(Quaternion::I);

    /// Accepts `q` only if it is already (to `1e-10`) a unit imaginary quaternion.
    /// The stored value is renormalized.
    pub fn new(q: Quaternion) -> Result<Self> {
        if !q.is_finite() || q.re().abs() > 1e-10 || (q.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!(
                "{q} is not a unit imaginary quaternion (need Re = 0, |I| = 1)"
            )));
        }
        Ok(ImaginaryUnit(q.im() / q.im().norm()))
    }

    /// Normalizes the imaginary part of `q`; fails if it vanishes.
    pub fn from_direction(q: Quaternion) -> Result<Self> {
        let v = q.im();
        let n = v.norm();
        if n <= EPS_ZERO {
            return Err(Error::Singular(format!("{q} has no imaginary direction")));
        }
        Ok(ImaginaryUnit(v / n))
    }

    pub fn get(self) -> Quaternion {
        self.0
    }

    /// Some unit `J ∈ S` anticommuting with `self`.
    pub fn orthogonal_unit(self) -> ImaginaryUnit {
        let v = self.0;
        // pick the basis axis least aligned with v, then Gram-Schmidt
        let axis = [Quaternion::I, Quaternion::J, Quaternion::K]
            .into_iter()
            .min_by(|a, b| a.dot(v).abs().total_cmp(&b.dot(v).abs()))
            .unwrap_or(Quaternion::J);
        let w = axis - v * axis.dot(v);
        ImaginaryUnit(w / w.norm())
    }
}

impl From<ImaginaryUnit> for Quaternion {
    fn from(u: ImaginaryUnit) -> Self {
        u.0
    }
}

impl From<ImaginaryUnit> for [f64; 4] {
    fn from(u: ImaginaryUnit) -> Self {
        u.0.to_array()
    }
}

/// Coordinates of a quaternion on its slice: `q = re + im·unit` with `im ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceCoords {
    pub unit: ImaginaryUnit,
    pub re: f64,
    pub im: f64,
}

impl SliceCoords {
    pub fn to_quaternion(self) -> Quaternion {
        self.unit.get() * self.im + self.re
    }
}

/// Writes `q = x + y·I` with `y = |Im q| ≥ 0`.
///
/// For `|Im q| <= EPS_ZERO` the point is treated as real: `I = i`, `y = 0`.
pub fn slice_decompose(q: Quaternion) -> SliceCoords {
    let v = q.im();
    let n = v.norm();
    if n <= EPS_ZERO {
        SliceCoords { unit: ImaginaryUnit::DEFAULT, re: q.re(), im: 0.0 }
    } else {
        SliceCoords { unit: ImaginaryUnit(v / n), re: q.re(), im: n }
    }
}

/// Returns `(π_I(α), π_I⊥(α))`, the orthogonal projections of `α` onto `C_I`
/// and onto its complement `C_I·J`.
///
/// Computed as `(α - IαI)/2` and `(α + IαI)/2`, so no choice of `J` is involved.
pub fn project_slice(unit: ImaginaryUnit, alpha: Quaternion) -> (Quaternion, Quaternion) {
    let i = unit.get();
    let iai = i * alpha * i;
    ((alpha - iai) * 0.5, (alpha + iai) * 0.5)
}

/// Whether `q` lies in `C_I` to within `tol` (measured by `|π_I⊥(q)|`).
pub fn in_slice(unit: ImaginaryUnit, q: Quaternion, tol: f64) -> bool {
    project_slice(unit, q).1.norm() <= tol
}

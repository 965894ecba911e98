//! Classical and regular Möbius transformations of the unit ball.
//!
//! A matrix `A = [[a, c], [b, d]]` in `Sp(1,1)` acts on the right by
//!
//! ```text
//! F_A(q) = (qc + d)⁻¹ (qa + b)            classical (non-regular)
//! 𝓕_A(q) = (qc + d)^{-*} * (qa + b)       regular
//! ```
//!
//! Every regular Möbius transformation has a unique canonical form
//! `𝓕(q) = (q·conj(a) - 1)^{-*} * (q - a) · u` with `|a| < 1` and `|u| = 1`,
//! represented by [`RegularMobius`]. Its closed form is
//!
//! ```text
//! 𝓕(q) = (q²|a|² - 2q·Re(a) + 1)⁻¹ (q²a - q(a² + 1) + a) · u.
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{real_matrix, solve4};
use crate::quat::{slice_decompose, ImaginaryUnit, Quaternion, EPS_ZERO};
use crate::sample::Sampler;
use crate::series::RegularPowerSeries;

/// Residual allowed when validating the `Sp(1,1)` relations of user input.
pub const SP11_TOLERANCE: f64 = 1e-8;

/// Below this `|a|`, [`matrix_to_canonical`] recovers `u` from the
/// differential at the origin instead of dividing by `a`.
const SMALL_ZERO: f64 = 1e-3;

const NEWTON_MAX_ITER: usize = 100;

/// A 2×2 quaternion matrix `[[a, c], [b, d]]`, intended to satisfy
/// `A* I₁₁ A = I₁₁`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpOneOneMatrix {
    pub a: Quaternion,
    pub b: Quaternion,
    pub c: Quaternion,
    pub d: Quaternion,
}

/// The three independent entries of `A* I₁₁ A - I₁₁`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sp11Residuals {
    /// `|a|² - |b|² - 1`
    pub first_diagonal: f64,
    /// `|d|² - |c|² - 1`
    pub second_diagonal: f64,
    /// `|conj(a)c - conj(b)d|`
    pub off_diagonal: f64,
}

impl Sp11Residuals {
    pub fn max(&self) -> f64 {
        self.first_diagonal.abs().max(self.second_diagonal.abs()).max(self.off_diagonal)
    }
}

impl SpOneOneMatrix {
    /// Validated constructor: every relation must hold to [`SP11_TOLERANCE`].
    pub fn new(a: Quaternion, b: Quaternion, c: Quaternion, d: Quaternion) -> Result<Self> {
        SpOneOneMatrix { a, b, c, d }.validated(SP11_TOLERANCE)
    }

    pub const fn new_unchecked(a: Quaternion, b: Quaternion, c: Quaternion, d: Quaternion) -> Self {
        SpOneOneMatrix { a, b, c, d }
    }

    pub const fn identity() -> Self {
        SpOneOneMatrix::new_unchecked(Quaternion::ONE, Quaternion::ZERO, Quaternion::ZERO, Quaternion::ONE)
    }

    /// `diag(u, v)`, acting classically by `q ↦ v⁻¹ q u`.
    pub const fn diagonal(u: Quaternion, v: Quaternion) -> Self {
        SpOneOneMatrix::new_unchecked(u, Quaternion::ZERO, Quaternion::ZERO, v)
    }

    /// `[[cosh t, sinh t], [sinh t, cosh t]]`.
    pub fn boost(t: f64) -> Self {
        let (ch, sh) = (Quaternion::real(t.cosh()), Quaternion::real(t.sinh()));
        SpOneOneMatrix::new_unchecked(ch, sh, sh, ch)
    }

    pub fn residuals(&self) -> Sp11Residuals {
        Sp11Residuals {
            first_diagonal: self.a.norm_sqr() - self.b.norm_sqr() - 1.0,
            second_diagonal: self.d.norm_sqr() - self.c.norm_sqr() - 1.0,
            off_diagonal: (self.a.conj() * self.c - self.b.conj() * self.d).norm(),
        }
    }

    /// Checks the defining relations, naming the first one that fails.
    pub fn validated(self, tol: f64) -> Result<Self> {
        let r = self.residuals();
        let checks = [
            ("|a|^2 - |b|^2 = 1", r.first_diagonal.abs()),
            ("|d|^2 - |c|^2 = 1", r.second_diagonal.abs()),
            ("conj(a)c - conj(b)d = 0", r.off_diagonal),
        ];
        for (relation, residual) in checks {
            if !(residual <= tol) {
                return Err(Error::Validation(format!(
                    "matrix is not in Sp(1,1): relation {relation} violated (residual {residual:e} > {tol:e})"
                )));
            }
        }
        Ok(self)
    }

    /// Matrix product `self · rhs`; the right action composes as `q·(AB) = (q·A)·B`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        // rows are (a, c) and (b, d)
        SpOneOneMatrix {
            a: self.a * rhs.a + self.c * rhs.b,
            c: self.a * rhs.c + self.c * rhs.d,
            b: self.b * rhs.a + self.d * rhs.b,
            d: self.b * rhs.c + self.d * rhs.d,
        }
    }

    /// `qc + d` as a regular power series.
    fn denominator_series(&self) -> RegularPowerSeries {
        RegularPowerSeries::linear(self.c, self.d)
    }

    /// `qa + b` as a regular power series.
    fn numerator_series(&self) -> RegularPowerSeries {
        RegularPowerSeries::linear(self.a, self.b)
    }
}

fn check_ball(q: Quaternion) -> Result<()> {
    if q.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("point {q} is not in the open unit ball")))
    }
}

/// `F_A(q) = (qc + d)⁻¹ (qa + b)`.
pub fn classical_apply(m: &SpOneOneMatrix, q: Quaternion) -> Result<Quaternion> {
    check_ball(q)?;
    let den = q * m.c + m.d;
    if den.norm() <= EPS_ZERO {
        return Err(Error::Singular(format!("qc + d vanishes at q = {q}")));
    }
    Ok(den.inv()? * (q * m.a + m.b))
}

/// Directional derivative of [`classical_apply`] at `q` along `alpha`:
/// `-(qc+d)⁻¹(αc)(qc+d)⁻¹(qa+b) + (qc+d)⁻¹(αa)`.
pub fn classical_differential(m: &SpOneOneMatrix, q: Quaternion, alpha: Quaternion) -> Result<Quaternion> {
    check_ball(q)?;
    let den = q * m.c + m.d;
    if den.norm() <= EPS_ZERO {
        return Err(Error::Singular(format!("qc + d vanishes at q = {q}")));
    }
    let inv = den.inv()?;
    Ok(-(inv * (alpha * m.c) * inv * (q * m.a + m.b)) + inv * (alpha * m.a))
}

/// Canonical form `(q·conj(a) - 1)^{-*} * (q - a) · u` of a regular Möbius map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularMobius {
    pub a: Quaternion,
    pub u: Quaternion,
}

impl RegularMobius {
    /// Requires `|a| < 1` and `|u| = 1` (to `1e-10`); `u` is renormalized.
    pub fn new(a: Quaternion, u: Quaternion) -> Result<Self> {
        if !(a.norm() < 1.0) {
            return Err(Error::Domain(format!("zero a = {a} must lie in the open unit ball")));
        }
        if !((u.norm() - 1.0).abs() <= 1e-10) {
            return Err(Error::Validation(format!("rotation u = {u} is not a unit quaternion")));
        }
        Ok(RegularMobius { a, u: u / u.norm() })
    }

    /// `𝓕_a`, i.e. the canonical form with `u = 1`.
    pub fn centered(a: Quaternion) -> Result<Self> {
        RegularMobius::new(a, Quaternion::ONE)
    }

    /// The linear factor `q·conj(a) - 1`.
    pub fn denominator_series(&self) -> RegularPowerSeries {
        RegularPowerSeries::linear(self.a.conj(), -Quaternion::ONE)
    }

    /// The linear factor `q - a`.
    pub fn numerator_series(&self) -> RegularPowerSeries {
        RegularPowerSeries::linear(Quaternion::ONE, -self.a)
    }

    /// `q²|a|² - 2q·Re(a) + 1` and `q²a - q(a² + 1) + a` at `q`.
    fn closed_parts(&self, q: Quaternion) -> (Quaternion, Quaternion) {
        let a = self.a;
        let q2 = q * q;
        let den = q2 * a.norm_sqr() - q * (2.0 * a.re()) + 1.0;
        let num = q2 * a - q * (a * a + 1.0) + a;
        (den, num)
    }
}

/// Closed-form evaluation of the canonical regular Möbius map.
pub fn regular_apply(m: &RegularMobius, q: Quaternion) -> Result<Quaternion> {
    check_ball(q)?;
    let (den, num) = m.closed_parts(q);
    Ok(den.inv()? * num * m.u)
}

/// Evaluation through the `*`-algebra only: `(1/f^s)(q) · (f^c * g)(q) · u`
/// with `f = q·conj(a) - 1`, `g = q - a`.
pub fn regular_apply_via_series(m: &RegularMobius, q: Quaternion) -> Result<Quaternion> {
    Ok(m.denominator_series().eval_star_quotient(&m.numerator_series(), q)? * m.u)
}

/// `𝓕_A(q) = (qc + d)^{-*} * (qa + b)` evaluated through the `*`-algebra.
pub fn regular_apply_matrix(m: &SpOneOneMatrix, q: Quaternion) -> Result<Quaternion> {
    m.denominator_series().eval_star_quotient(&m.numerator_series(), q)
}

/// Directional derivative of [`regular_apply`] at `q` along `alpha`.
///
/// With `D`, `N` the closed-form denominator and numerator,
/// `d(D⁻¹N) = -D⁻¹·dD·D⁻¹·N + D⁻¹·dN`, where `d(q²)[α] = qα + αq`.
pub fn regular_differential(m: &RegularMobius, q: Quaternion, alpha: Quaternion) -> Result<Quaternion> {
    check_ball(q)?;
    let a = m.a;
    let (den, num) = m.closed_parts(q);
    let dq2 = q * alpha + alpha * q;
    let dden = dq2 * a.norm_sqr() - alpha * (2.0 * a.re());
    let dnum = dq2 * a - alpha * (a * a + 1.0);
    let inv = den.inv()?;
    Ok((-(inv * dden * inv * num) + inv * dnum) * m.u)
}

/// Differential of `𝓕_a` at its own zero `a`:
/// `(1 - a²)⁻¹ (aαa - α) / (1 - |a|²)`.
pub fn center_differential(a: Quaternion, alpha: Quaternion) -> Result<Quaternion> {
    check_ball(a)?;
    let one_minus_a2 = Quaternion::ONE - a * a;
    Ok(one_minus_a2.inv()? * (a * alpha * a - alpha) / (1.0 - a.norm_sqr()))
}

/// Directional derivative of `(1/f^s)·(f^c * g)` for real-coefficient `f^s`.
fn star_quotient_derivative(
    den: &RegularPowerSeries,
    num: &RegularPowerSeries,
    q: Quaternion,
    alpha: Quaternion,
) -> Result<Quaternion> {
    let s = den.symmetrize();
    let n = den.regular_conjugate().star_mul(num);
    let inv = s.eval(q)?.inv()?;
    let ds = s.directional_derivative(q, alpha);
    let dn = n.directional_derivative(q, alpha);
    Ok(-(inv * ds * inv * n.eval(q)?) + inv * dn)
}

/// Recovers the canonical pair `(a, u)` of `𝓕_A`.
///
/// `a` is the zero of `𝓕_A` in the ball. It lies on the sphere through the
/// zero `-b·a⁻¹` of the classical map, where the numerator `(qc + d)^c * (qa + b)`
/// is affine in the imaginary unit; the point found there is then polished by
/// damped Newton iteration on the numerator. Then `u = a⁻¹·𝓕_A(0)`, or for `|a|` near zero
/// `u = (d𝓕_a)₀(1)⁻¹ · (d𝓕_A)₀(1)`, which reduces to `u = -(d𝓕_A)₀(1)` at `a = 0`.
pub fn matrix_to_canonical(m: &SpOneOneMatrix) -> Result<RegularMobius> {
    let den = m.denominator_series();
    let num = m.numerator_series();
    let poly = den.regular_conjugate().star_mul(&num);
    let scale = poly.scale().max(1.0);

    let mut q = match m.a.inv() {
        Ok(ainv) => sphere_zero(&poly, -(m.b * ainv)).unwrap_or(Quaternion::ZERO),
        _ => Quaternion::ZERO,
    };
    let mut residual = poly.eval_unchecked(q).norm();
    let mut converged = residual <= 1e-15 * scale;
    for _ in 0..NEWTON_MAX_ITER {
        if converged {
            break;
        }
        let jac = real_matrix(|alpha| poly.directional_derivative(q, alpha));
        let step = solve4(&jac, -poly.eval_unchecked(q))
            .ok_or_else(|| Error::Conversion(format!("singular Newton Jacobian at {q}")))?;
        // backtracking with damping factor 0.5
        let mut t = 1.0;
        let mut next = q + step * t;
        let mut next_res = poly.eval_unchecked(next).norm();
        while (next_res >= residual || next.norm() >= 1.0) && t > 1e-6 {
            t *= 0.5;
            next = q + step * t;
            next_res = poly.eval_unchecked(next).norm();
        }
        let moved = (step * t).norm();
        if next_res < residual {
            q = next;
            residual = next_res;
        }
        converged = residual <= 1e-15 * scale || moved <= 1e-16;
    }
    if !converged || !(q.norm() < 1.0) || residual > 1e-12 * scale {
        return Err(Error::Conversion(format!(
            "Newton iteration for the zero of the regular Möbius map did not converge \
             after {NEWTON_MAX_ITER} iterations (residual {residual:e})"
        )));
    }
    let a = q;

    let u = if a.norm() >= SMALL_ZERO {
        a.inv()? * regular_apply_matrix(m, Quaternion::ZERO)?
    } else {
        let d_target = star_quotient_derivative(&den, &num, Quaternion::ZERO, Quaternion::ONE)?;
        let d_centered = regular_differential(&RegularMobius::centered(a)?, Quaternion::ZERO, Quaternion::ONE)?;
        d_centered.inv()? * d_target
    };
    RegularMobius::new(a, u.normalize()?).map_err(|e| Error::Conversion(e.to_string()))
}

/// Zero of the regular polynomial `p` on the sphere `x + y·S` through `q0`.
///
/// On that sphere `p(x + yI) = A + I·B` with `A`, `B` fixed by the values at
/// `x ± yI₀`, so a zero sits at `I = -A·B⁻¹` when that is a unit imaginary.
fn sphere_zero(p: &RegularPowerSeries, q0: Quaternion) -> Option<Quaternion> {
    let c = slice_decompose(q0);
    if c.im == 0.0 {
        return Some(q0);
    }
    let i0 = c.unit.get();
    let p1 = p.eval_unchecked(i0 * c.im + c.re);
    let p2 = p.eval_unchecked(i0 * (-c.im) + c.re);
    let a = (p1 + p2) * 0.5;
    let b = i0 * (p2 - p1) * 0.5;
    let unit = ImaginaryUnit::from_direction((-(a * b.inv().ok()?)).im()).ok()?;
    let q = unit.get() * c.im + c.re;
    (q.norm() < 1.0).then_some(q)
}

/// The `u` with `𝓕₁ = R_u ∘ 𝓕₂` for two maps sharing the same zero.
pub fn normalize_pair(f1: &RegularMobius, f2: &RegularMobius) -> Result<Quaternion> {
    let gap = (f1.a - f2.a).norm();
    if gap > 1e-10 {
        return Err(Error::Precondition(format!(
            "maps have different zeros {} and {} (|difference| = {gap:e})",
            f1.a, f2.a
        )));
    }
    Ok(f2.u.inv()? * f1.u)
}

/// `C_u(q) = u⁻¹ q u`.
pub fn conjugation_cu(u: Quaternion, q: Quaternion) -> Quaternion {
    u.conj() * q * u
}

/// `R_u(q) = q u`.
pub fn rotation_ru(u: Quaternion, q: Quaternion) -> Quaternion {
    q * u
}

/// `diag(u₁, v₁) · boost(t) · diag(u₂, v₂)` with uniform units and `t ∈ [0, 1.5)`.
pub fn random_sp11(sampler: &mut Sampler) -> SpOneOneMatrix {
    let (u1, v1) = (sampler.unit(), sampler.unit());
    let t = sampler.uniform(0.0, 1.5);
    let (u2, v2) = (sampler.unit(), sampler.unit());
    SpOneOneMatrix::diagonal(u1, v1)
        .matmul(&SpOneOneMatrix::boost(t))
        .matmul(&SpOneOneMatrix::diagonal(u2, v2))
}

//! Metric tensors on the unit ball.
//!
//! - `Ĝ_q(α, β) = Re(α·conj(β)) / (1 - |q|²)²` is the hyperbolic metric,
//!   invariant under the classical `Sp(1,1)` action.
//! - `H_q(α, β) = d𝓕_q(α)·conj(d𝓕_q(β))` for any regular Möbius map with
//!   `𝓕(q) = 0` is the slice Hermitian metric; its real part `G` is the slice
//!   Riemannian metric and its imaginary part `Ω` the slice Kähler form.
//!
//! Closed forms, with `A = α - qαq` and `B = β - qβq`:
//!
//! ```text
//! H_q(α, β) = (1 - q²)⁻¹ · A · conj(B) · (1 - conj(q)²)⁻¹ / (1 - |q|²)²
//! G_q(α, β) = Re(A·conj(B)) / (|1 - q²|² (1 - |q|²)²)
//!           = Ĝ_q(α, β) + 4|Im q|² Re(π_I⊥(α)·π_I⊥(β)) / (|1 - q²|² (1 - |q|²)²)
//! G_q(α, α) = |π_I(α)|² / (1 - |q|²)² + |π_I⊥(α)|² / |1 - q²|²
//! ```

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::rank;
use crate::mobius::{conjugation_cu, regular_differential, RegularMobius};
use crate::quat::{project_slice, slice_decompose, ImaginaryUnit, Quaternion};
use crate::sample::Sampler;

/// Componentwise comparison `|actual - expected| ≤ atol + rtol·scale`,
/// with `scale` the largest absolute component of `expected`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { atol: 1e-12, rtol: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(atol: f64, rtol: f64) -> Self {
        Tolerance { atol, rtol }
    }

    pub fn bound(&self, expected: Quaternion) -> f64 {
        self.atol + self.rtol * expected.max_abs()
    }

    pub fn accepts(&self, actual: Quaternion, expected: Quaternion) -> bool {
        actual.max_abs_diff(expected) <= self.bound(expected)
    }

    /// Error in units of the allowed bound; `≤ 1` means accepted.
    pub fn ratio(&self, actual: Quaternion, expected: Quaternion) -> f64 {
        actual.max_abs_diff(expected) / self.bound(expected)
    }
}

/// Value of `H` together with its real and imaginary parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TensorValue {
    pub h: Quaternion,
    pub g: f64,
    pub omega: Quaternion,
}

impl TensorValue {
    pub fn from_hermitian(h: Quaternion) -> Self {
        TensorValue { h, g: h.re(), omega: h.im() }
    }
}

/// A base point paired with a tangent direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentPair {
    pub q: Quaternion,
    pub alpha: Quaternion,
}

impl TangentPair {
    pub fn new(q: Quaternion, alpha: Quaternion) -> Result<Self> {
        if !(q.norm() < 1.0) {
            return Err(Error::Domain(format!("base point {q} is not in the open unit ball")));
        }
        Ok(TangentPair { q, alpha })
    }

    /// `‖α‖_q` for the slice Riemannian metric.
    pub fn slice_length(&self) -> f64 {
        slice_riemannian(self.q, self.alpha, self.alpha, RiemannianFormula::Closed).sqrt()
    }
}

fn conformal(q: Quaternion) -> f64 {
    let s = 1.0 - q.norm_sqr();
    s * s
}

/// `|1 - q²|²`
fn one_minus_square_sqr(q: Quaternion) -> f64 {
    (Quaternion::ONE - q * q).norm_sqr()
}

/// `α - qαq`
fn twisted(q: Quaternion, alpha: Quaternion) -> Quaternion {
    alpha - q * alpha * q
}

/// `Ĝ_q(α, β) = Re(α·conj(β)) / (1 - |q|²)²`.
pub fn hyperbolic_metric(q: Quaternion, alpha: Quaternion, beta: Quaternion) -> f64 {
    alpha.dot(beta) / conformal(q)
}

/// Closed form of the slice Hermitian metric `H_q(α, β)`.
pub fn slice_hermitian(q: Quaternion, alpha: Quaternion, beta: Quaternion) -> Quaternion {
    let one_minus_q2 = Quaternion::ONE - q * q;
    // (1 - conj(q)²)⁻¹ = conj((1 - q²)⁻¹); |1 - q²| ≥ 1 - |q|² > 0 in the ball
    let left = one_minus_q2.conj() / one_minus_q2.norm_sqr();
    let right = left.conj();
    left * twisted(q, alpha) * twisted(q, beta).conj() * right / conformal(q)
}

/// `H_q(α, β) = d𝓕(α)·conj(d𝓕(β))` with `𝓕 = R_u ∘ 𝓕_q`, which sends `q` to `0`.
///
/// The differential comes from [`regular_differential`] at a general point,
/// not from the centre formula, so this is an independent route to `H`.
pub fn slice_hermitian_via_definition(
    q: Quaternion,
    alpha: Quaternion,
    beta: Quaternion,
    u: Quaternion,
) -> Result<Quaternion> {
    let m = RegularMobius::new(q, u)?;
    let da = regular_differential(&m, q, alpha)?;
    let db = regular_differential(&m, q, beta)?;
    Ok(da * db.conj())
}

/// `H`, `G` and `Ω` at one argument triple.
pub fn slice_tensors(q: Quaternion, alpha: Quaternion, beta: Quaternion) -> TensorValue {
    TensorValue::from_hermitian(slice_hermitian(q, alpha, beta))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RiemannianFormula {
    /// `Re(A·conj(B)) / (|1 - q²|² (1 - |q|²)²)`
    Closed,
    /// `Ĝ` plus the correction carried by `π_I⊥`.
    Corrected,
    /// `Re(H)`.
    ViaHermitian,
}

/// The slice Riemannian metric `G_q(α, β)` by the chosen formula.
pub fn slice_riemannian(q: Quaternion, alpha: Quaternion, beta: Quaternion, formula: RiemannianFormula) -> f64 {
    match formula {
        RiemannianFormula::Closed => {
            twisted(q, alpha).dot(twisted(q, beta)) / (one_minus_square_sqr(q) * conformal(q))
        }
        RiemannianFormula::Corrected => {
            let coords = slice_decompose(q);
            let (_, pa) = project_slice(coords.unit, alpha);
            let (_, pb) = project_slice(coords.unit, beta);
            let correction = 4.0 * coords.im * coords.im * (pa * pb).re();
            hyperbolic_metric(q, alpha, beta) + correction / (one_minus_square_sqr(q) * conformal(q))
        }
        RiemannianFormula::ViaHermitian => slice_hermitian(q, alpha, beta).re(),
    }
}

/// Squared norm `|π_I(α)|² / (1 - |q|²)² + |π_I⊥(α)|² / |1 - q²|²`
/// of the Hardy-space metric `G̃`, with `I` the slice of `q`.
pub fn arcozzi_sarfatti_norm(q: Quaternion, alpha: Quaternion) -> f64 {
    let unit = slice_decompose(q).unit;
    let (p, r) = project_slice(unit, alpha);
    p.norm_sqr() / conformal(q) + r.norm_sqr() / one_minus_square_sqr(q)
}

/// `|1 - q²|² - 4|Im q|²`, which equals `(1 - |q|²)²` on the whole ball.
pub fn scalar_identity_lhs(q: Quaternion) -> f64 {
    one_minus_square_sqr(q) - 4.0 * q.im().norm_sqr()
}

/// The slice Kähler form `Ω_q(α, β) = Im H_q(α, β)`.
pub fn slice_kahler(q: Quaternion, alpha: Quaternion, beta: Quaternion) -> Quaternion {
    slice_hermitian(q, alpha, beta).im()
}

/// Rank of `α ↦ (Ω_q(α, e_m))_m` as a 12×4 real matrix over the basis `e_m`
/// of `H`; non-degeneracy of `Ω_q` means rank 4.
pub fn kahler_rank(q: Quaternion) -> usize {
    let mut m = DMatrix::zeros(12, 4);
    for (col, alpha) in Quaternion::BASIS.iter().enumerate() {
        for (blk, e) in Quaternion::BASIS.iter().enumerate() {
            let w = slice_kahler(q, *alpha, *e);
            for c in 0..3 {
                m[(3 * blk + c, col)] = w.component(c + 1);
            }
        }
    }
    rank(&m, 1e-10)
}

fn require_in_slice(unit: ImaginaryUnit, name: &str, x: Quaternion) -> Result<()> {
    let off = project_slice(unit, x).1.norm();
    if off > 1e-12 * x.norm().max(1.0) {
        return Err(Error::Precondition(format!(
            "{name} = {x} is not in the slice C_I for I = {} (|π_I⊥| = {off:e})",
            unit.get()
        )));
    }
    Ok(())
}

fn require_slice_data(unit: ImaginaryUnit, q: Quaternion, alpha: Quaternion, beta: Quaternion) -> Result<()> {
    require_in_slice(unit, "q", q)?;
    require_in_slice(unit, "alpha", alpha)?;
    require_in_slice(unit, "beta", beta)?;
    if !(q.norm() < 1.0) {
        return Err(Error::Domain(format!("q = {q} is not in the disk D_I")));
    }
    Ok(())
}

/// The Poincaré-type metric `g_I` of the disk `D_I`:
/// `Re(α·conj(β)) / (1 - |q|²)²` for `q, α, β ∈ C_I`.
pub fn slice_restriction_metric(
    unit: ImaginaryUnit,
    q: Quaternion,
    alpha: Quaternion,
    beta: Quaternion,
) -> Result<f64> {
    require_slice_data(unit, q, alpha, beta)?;
    Ok(alpha.dot(beta) / conformal(q))
}

/// The real Kähler form `ω_I` of `D_I`: the `I`-coordinate of
/// `α·conj(β) / (1 - |q|²)²` for `q, α, β ∈ C_I`.
pub fn slice_restriction_kahler(
    unit: ImaginaryUnit,
    q: Quaternion,
    alpha: Quaternion,
    beta: Quaternion,
) -> Result<f64> {
    require_slice_data(unit, q, alpha, beta)?;
    Ok((alpha * beta.conj()).dot(unit.get()) / conformal(q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SliceTensor {
    G,
    H,
    Omega,
}

/// Direct evaluation of `G`, `H` or `Ω` as a quaternion (`G` is real).
pub fn tensor_value(tensor: SliceTensor, q: Quaternion, alpha: Quaternion, beta: Quaternion) -> Quaternion {
    match tensor {
        SliceTensor::G => Quaternion::real(slice_riemannian(q, alpha, beta, RiemannianFormula::Closed)),
        SliceTensor::H => slice_hermitian(q, alpha, beta),
        SliceTensor::Omega => slice_kahler(q, alpha, beta),
    }
}

/// Right-hand side of the representation formulas:
///
/// ```text
/// G:    G_{uqu⁻¹}(uαu⁻¹, uβu⁻¹)
/// H, Ω: u⁻¹ · T_{uqu⁻¹}(uαu⁻¹, uβu⁻¹) · u
/// ```
///
/// Each equals [`tensor_value`] at `(q, α, β)`.
pub fn representation_transform(
    u: Quaternion,
    tensor: SliceTensor,
    q: Quaternion,
    alpha: Quaternion,
    beta: Quaternion,
) -> Quaternion {
    let uinv = u.conj();
    // uxu⁻¹ = C_{u⁻¹}(x)
    let (qq, aa, bb) = (conjugation_cu(uinv, q), conjugation_cu(uinv, alpha), conjugation_cu(uinv, beta));
    let value = tensor_value(tensor, qq, aa, bb);
    match tensor {
        SliceTensor::G => value,
        SliceTensor::H | SliceTensor::Omega => conjugation_cu(u, value),
    }
}

/// One application of the diagonal `Sp(1)×Sp(1)` differential `α ↦ d⁻¹ α a`
/// to `Ω₀` and `G₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalProbe {
    pub a: Quaternion,
    pub d: Quaternion,
    pub alpha: Quaternion,
    pub beta: Quaternion,
    pub omega_before: Quaternion,
    pub omega_after: Quaternion,
    pub g_before: f64,
    pub g_after: f64,
}

impl DiagonalProbe {
    pub fn new(a: Quaternion, d: Quaternion, alpha: Quaternion, beta: Quaternion) -> Self {
        let dinv = d.conj() / d.norm_sqr();
        let (ta, tb) = (dinv * alpha * a, dinv * beta * a);
        let before = alpha * beta.conj();
        let after = ta * tb.conj();
        DiagonalProbe {
            a,
            d,
            alpha,
            beta,
            omega_before: before.im(),
            omega_after: after.im(),
            g_before: before.re(),
            g_after: after.re(),
        }
    }

    /// `|Ω₀(after) - Ω₀(before)|`
    pub fn omega_violation(&self) -> f64 {
        (self.omega_after - self.omega_before).norm()
    }

    pub fn g_deviation(&self) -> f64 {
        (self.g_after - self.g_before).abs()
    }
}

/// The fixed witness `d = i`, `a = 1`, `α = j`, `β = 1`: `Ω₀` flips sign while
/// `G₀` is unchanged.
pub fn noninvariance_witness() -> DiagonalProbe {
    DiagonalProbe::new(Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::ONE)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoninvarianceSweep {
    pub samples: usize,
    /// Probes where `Ω₀` changed by more than the threshold.
    pub violations: usize,
    pub max_omega_violation: f64,
    /// Relative deviation of `G₀`; should stay at round-off.
    pub max_g_deviation: f64,
}

/// Applies random diagonal pairs to random `(α, β)`.
pub fn noninvariance_sweep(sampler: &mut Sampler, samples: usize, threshold: f64) -> NoninvarianceSweep {
    let mut out = NoninvarianceSweep { samples, violations: 0, max_omega_violation: 0.0, max_g_deviation: 0.0 };
    for _ in 0..samples {
        let (a, d) = (sampler.unit(), sampler.unit());
        let (alpha, beta) = (sampler.tangent(), sampler.tangent());
        let p = DiagonalProbe::new(a, d, alpha, beta);
        let scale = alpha.norm() * beta.norm();
        if p.omega_violation() > threshold * scale {
            out.violations += 1;
        }
        out.max_omega_violation = out.max_omega_violation.max(p.omega_violation() / scale);
        out.max_g_deviation = out.max_g_deviation.max(p.g_deviation() / scale);
    }
    out
}

/// Which Riemannian metric a curve is measured with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    /// Slice Riemannian metric `G`.
    Slice,
    /// Hyperbolic metric `Ĝ`.
    Hyperbolic,
}

impl Metric {
    pub fn eval(self, q: Quaternion, alpha: Quaternion, beta: Quaternion) -> f64 {
        match self {
            Metric::Slice => slice_riemannian(q, alpha, beta, RiemannianFormula::Closed),
            Metric::Hyperbolic => hyperbolic_metric(q, alpha, beta),
        }
    }

    fn segment_energy(self, p: Quaternion, q: Quaternion) -> f64 {
        let d = q - p;
        self.eval((p + q) * 0.5, d, d)
    }
}

fn check_points(points: &[Quaternion]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::Precondition("a curve needs at least 2 points".into()));
    }
    if let Some(p) = points.iter().find(|p| !(p.norm() < 1.0)) {
        return Err(Error::Domain(format!("curve point {p} is not in the open unit ball")));
    }
    Ok(())
}

/// Length of a polyline, each segment measured at its midpoint.
pub fn curve_length(points: &[Quaternion], metric: Metric) -> Result<f64> {
    check_points(points)?;
    Ok(points.windows(2).map(|w| metric.segment_energy(w[0], w[1]).sqrt()).sum())
}

/// Settings for [`distance_estimate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicOptions {
    pub interior_points: usize,
    pub fd_step: f64,
    /// Relaxation factor of the Jacobi-preconditioned descent step.
    pub learning_rate: f64,
    pub max_iterations: usize,
    /// Stop when the relative energy decrease of an iteration falls below this.
    pub energy_tol: f64,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        GeodesicOptions {
            interior_points: 32,
            fd_step: 1e-6,
            learning_rate: 0.9,
            max_iterations: 2000,
            energy_tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceEstimate {
    pub distance: f64,
    pub converged: bool,
    pub iterations: usize,
    pub path: Vec<Quaternion>,
}

/// Estimates the Riemannian distance between `p` and `q`.
///
/// Minimizes the discrete energy `Σ |Δₖ|²` (segment metric at midpoints) over
/// the interior points of a polyline with central-difference gradients and a
/// Jacobi-preconditioned descent step. The polyline is refined coarse to fine
/// (1, 2, 4, … interior points) so that the slow smooth modes are removed on
/// the coarse levels. The returned distance is the length of the final path.
pub fn distance_estimate(p: Quaternion, q: Quaternion, metric: Metric, opts: &GeodesicOptions) -> Result<DistanceEstimate> {
    check_points(&[p, q])?;
    if p == q {
        return Ok(DistanceEstimate { distance: 0.0, converged: true, iterations: 0, path: vec![p, q] });
    }

    let mut levels = vec![];
    let mut n = opts.interior_points.max(1);
    while n > 1 {
        levels.push(n);
        n /= 2;
    }
    levels.push(1);
    levels.reverse();

    let mut path = vec![p, q];
    let mut iterations = 0;
    let mut converged = false;
    for &interior in &levels {
        path = resample(&path, interior + 2);
        let budget = opts.max_iterations.saturating_sub(iterations).max(1);
        let (iters, ok) = descend(&mut path, metric, opts, budget);
        iterations += iters;
        converged = ok;
    }
    let distance = curve_length(&path, metric)?;
    Ok(DistanceEstimate { distance, converged, iterations, path })
}

/// Piecewise-linear resampling at `count` equally spaced parameters.
fn resample(path: &[Quaternion], count: usize) -> Vec<Quaternion> {
    let segs = (path.len() - 1) as f64;
    (0..count)
        .map(|k| {
            let s = k as f64 / (count - 1) as f64 * segs;
            let i = (s.floor() as usize).min(path.len() - 2);
            let t = s - i as f64;
            path[i] * (1.0 - t) + path[i + 1] * t
        })
        .collect()
}

fn path_energy(path: &[Quaternion], metric: Metric) -> f64 {
    path.windows(2).map(|w| metric.segment_energy(w[0], w[1])).sum()
}

fn descend(path: &mut [Quaternion], metric: Metric, opts: &GeodesicOptions, budget: usize) -> (usize, bool) {
    let n = path.len();
    let mut energy = path_energy(path, metric);
    for iter in 0..budget {
        let mut next = path.to_vec();
        for i in 1..n - 1 {
            let local = |x: Quaternion| metric.segment_energy(path[i - 1], x) + metric.segment_energy(x, path[i + 1]);
            let mut grad = Quaternion::ZERO;
            for e in Quaternion::BASIS {
                let h = e * opts.fd_step;
                grad += e * ((local(path[i] + h) - local(path[i] - h)) / (2.0 * opts.fd_step));
            }
            // diagonal Hessian estimate 2(g₋ + g₊) with the conformal factor
            // of the hyperbolic metric, which bounds both metrics from above
            let gm = 1.0 / conformal((path[i - 1] + path[i]) * 0.5);
            let gp = 1.0 / conformal((path[i] + path[i + 1]) * 0.5);
            let mut cand = path[i] - grad * (opts.learning_rate / (2.0 * (gm + gp)));
            if !(cand.norm() < 1.0) {
                cand = path[i];
            }
            next[i] = cand;
        }
        let next_energy = path_energy(&next, metric);
        if !(next_energy <= energy) {
            return (iter + 1, true);
        }
        let decrease = energy - next_energy;
        path.copy_from_slice(&next);
        energy = next_energy;
        if decrease <= opts.energy_tol * energy {
            return (iter + 1, true);
        }
    }
    (budget, false)
}

/// Closed-form distance of `Ĝ`: `½·arcosh(1 + 2|p - q|² / ((1 - |p|²)(1 - |q|²)))`.
pub fn hyperbolic_distance(p: Quaternion, q: Quaternion) -> f64 {
    let num = 2.0 * (p - q).norm_sqr();
    let den = (1.0 - p.norm_sqr()) * (1.0 - q.norm_sqr());
    0.5 * (1.0 + num / den).acosh()
}

//! Reproducing kernels of the quaternionic Hardy space `H²(B)` and the
//! pseudo-hyperbolic distance they induce.
//!
//! The kernel at `q` is `k_q(w) = Σ wⁿ conj(q)ⁿ`, and for the inner product
//! `⟨Σ wⁿaₙ, Σ wⁿbₙ⟩ = Σ conj(bₙ)aₙ` one gets
//! `⟨k_p, k_q⟩ = Σ qⁿ conj(p)ⁿ` and `‖k_q‖² = 1/(1 - |q|²)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::arcozzi_sarfatti_norm;
use crate::quat::{slice_decompose, in_slice, Quaternion};

/// Default accuracy of [`delta`].
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest truncation order [`delta`] will pick.
pub const MAX_ORDER: usize = 1 << 22;

/// A truncation order of the kernel series and its a-priori tail bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelTruncation {
    pub order: usize,
    pub tail_bound: f64,
}

impl KernelTruncation {
    /// Tail `(|p||q|)^{N+1} / (1 - |p||q|)` of the series cut after `qᴺconj(p)ᴺ`.
    pub fn new(p: Quaternion, q: Quaternion, order: usize) -> Self {
        let r = p.norm() * q.norm();
        KernelTruncation { order, tail_bound: tail_bound(r, order) }
    }
}

fn tail_bound(r: f64, order: usize) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    r.powf(order as f64 + 1.0) / (1.0 - r)
}

fn check_ball(name: &str, q: Quaternion) -> Result<()> {
    if !(q.norm() < 1.0) {
        return Err(Error::Domain(format!("{name} = {q} is not in the open unit ball")));
    }
    Ok(())
}

/// `Σ_{n=0..N} qⁿ conj(p)ⁿ`, which approximates `⟨k_p, k_q⟩`.
pub fn kernel_inner(p: Quaternion, q: Quaternion, order: usize) -> Quaternion {
    let pc = p.conj();
    let mut term = Quaternion::ONE;
    let mut sum = Quaternion::ONE;
    for _ in 0..order {
        term = q * term * pc;
        sum += term;
    }
    sum
}

/// `‖k_q‖² = 1 / (1 - |q|²)`.
pub fn kernel_norm_sq(q: Quaternion) -> Result<f64> {
    check_ball("q", q)?;
    Ok(1.0 / (1.0 - q.norm_sqr()))
}

/// Result of [`delta`]: the distance and the truncation that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Delta {
    pub delta: f64,
    #[serde(rename = "N_used")]
    pub n_used: usize,
    pub tail_bound: f64,
}

/// Smallest `N` whose tail keeps the error of `δ` below `tol`.
///
/// With `c = (1-|p|²)(1-|q|²)` and `S` the exact inner product, `δ² = 1 - c|S|²`.
/// Truncating changes `c|S|²` by at most `c(2·tail/(1-r) + tail²)`, and
/// `|√x - √y| ≤ √|x - y|`.
fn choose_order(p: Quaternion, q: Quaternion, tol: f64) -> usize {
    let r = p.norm() * q.norm();
    let c = (1.0 - p.norm_sqr()) * (1.0 - q.norm_sqr());
    let bound = |n: usize| {
        let t = tail_bound(r, n);
        (c * (2.0 * t / (1.0 - r) + t * t)).sqrt()
    };
    if bound(0) <= tol {
        return 0;
    }
    // bound is decreasing in N; bisect on [lo, hi]
    let (mut lo, mut hi) = (0usize, 1usize);
    while bound(hi) > tol {
        lo = hi;
        hi *= 2;
        if hi >= MAX_ORDER {
            return MAX_ORDER;
        }
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if bound(mid) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Pseudo-hyperbolic distance `δ(p, q) = (1 - |⟨k̂_p, k̂_q⟩|²)^{1/2}` with the
/// truncation chosen from the tail bound so that the series error stays below
/// `tol`. Floating-point cancellation still limits the absolute accuracy to
/// about `1e-16 / δ`, which only matters for nearly coincident points.
pub fn delta(p: Quaternion, q: Quaternion, tol: f64) -> Result<Delta> {
    check_ball("p", p)?;
    check_ball("q", q)?;
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("tol must be positive, got {tol}")));
    }
    let order = choose_order(p, q, tol);
    let tail = KernelTruncation::new(p, q, order).tail_bound;
    if p == q {
        return Ok(Delta { delta: 0.0, n_used: order, tail_bound: tail });
    }
    let s = kernel_inner(p, q, order);
    let c = (1.0 - p.norm_sqr()) * (1.0 - q.norm_sqr());
    let d2 = (1.0 - c * s.norm_sqr()).max(0.0);
    Ok(Delta { delta: d2.sqrt(), n_used: order, tail_bound: tail })
}

/// `|p - q| / |1 - q·conj(p)|` for `p, q` in a common slice.
pub fn slice_delta(p: Quaternion, q: Quaternion) -> Result<f64> {
    check_ball("p", p)?;
    check_ball("q", q)?;
    let unit = if q.im().norm() > p.im().norm() { slice_decompose(q).unit } else { slice_decompose(p).unit };
    let scale = 1e-12;
    if !(in_slice(unit, p, scale) && in_slice(unit, q, scale)) {
        return Err(Error::Precondition(format!("{p} and {q} do not lie in a common slice")));
    }
    Ok((p - q).norm() / (Quaternion::ONE - q * p.conj()).norm())
}

/// Richardson-extrapolated `lim_{t→0} δ(q, q + tα)/t` next to `‖α‖` in `G̃`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfinitesimalReport {
    pub limit: f64,
    pub gtilde_norm: f64,
    /// `limit / gtilde_norm`
    pub ratio: f64,
    /// Difference of the last two extrapolants; an error estimate.
    pub spread: f64,
    pub inconclusive: bool,
    /// Symmetric difference quotients, one per step.
    pub quotients: Vec<f64>,
}

/// Steps `1e-2, 5e-3, 2.5e-3, …` (`count` of them).
pub fn halving_steps(count: usize) -> Vec<f64> {
    (0..count).map(|k| 1e-2 / (1u64 << k) as f64).collect()
}

/// Spread above which the extrapolation is flagged inconclusive, relative to the limit.
pub const INCONCLUSIVE_SPREAD: f64 = 1e-6;

/// Probes the infinitesimal form of `δ` at `q` in direction `α`.
///
/// For each step `t` the quotient `(δ(q, q+tα) + δ(q, q-tα)) / (2t)` cancels
/// the odd powers of `t`, and Neville's scheme in `t²` extrapolates the
/// quotients to `t = 0`.
pub fn infinitesimal_ratio(q: Quaternion, alpha: Quaternion, steps: &[f64]) -> Result<InfinitesimalReport> {
    check_ball("q", q)?;
    if steps.is_empty() || steps.iter().any(|t| !(*t > 0.0)) || steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("steps must be positive and strictly decreasing".into()));
    }
    if alpha.norm() == 0.0 {
        return Err(Error::Precondition("direction must be non-zero".into()));
    }
    let mut quotients = Vec::with_capacity(steps.len());
    for &t in steps {
        let plus = delta(q, q + alpha * t, 1e-13)?.delta;
        let minus = delta(q, q - alpha * t, 1e-13)?.delta;
        quotients.push((plus + minus) / (2.0 * t));
    }

    // Neville's scheme for the polynomial in x = t² evaluated at 0
    let xs: Vec<f64> = steps.iter().map(|t| t * t).collect();
    let mut table = quotients.clone();
    let mut diag = vec![table[table.len() - 1]];
    for m in 1..table.len() {
        for i in (m..table.len()).rev() {
            table[i] = (xs[i - m] * table[i] - xs[i] * table[i - 1]) / (xs[i - m] - xs[i]);
        }
        diag.push(table[table.len() - 1]);
    }
    let limit = *diag.last().unwrap();
    let spread = if diag.len() >= 2 { (diag[diag.len() - 1] - diag[diag.len() - 2]).abs() } else { f64::INFINITY };
    let gtilde_norm = arcozzi_sarfatti_norm(q, alpha).sqrt();
    Ok(InfinitesimalReport {
        limit,
        gtilde_norm,
        ratio: limit / gtilde_norm,
        spread,
        inconclusive: !limit.is_finite() || spread > INCONCLUSIVE_SPREAD * limit.abs().max(1.0),
        quotients,
    })
}

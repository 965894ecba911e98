//! Acceptance run: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p sliceball --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use sliceball::geometry::{
    arcozzi_sarfatti_norm, curve_length, hyperbolic_metric, noninvariance_sweep, noninvariance_witness,
    representation_transform, scalar_identity_lhs, slice_hermitian, slice_hermitian_via_definition, slice_kahler,
    slice_restriction_kahler, slice_restriction_metric, slice_riemannian, tensor_value, Metric, RiemannianFormula,
    SliceTensor,
};
use sliceball::hardy::{delta, halving_steps, infinitesimal_ratio, slice_delta, DEFAULT_TOL};
use sliceball::mobius::{
    center_differential, classical_apply, classical_differential, random_sp11, regular_apply,
    regular_apply_via_series, regular_differential, RegularMobius,
};
use sliceball::sample::Sampler;
use sliceball::{Quaternion as Q, RegularPowerSeries};

const SEED: u64 = 7;

struct Outcome {
    max_error: f64,
    tolerance: f64,
    pass: bool,
    note: String,
}

impl Outcome {
    fn bounded(max_error: f64, tolerance: f64) -> Self {
        Outcome { max_error, tolerance, pass: max_error <= tolerance, note: String::new() }
    }

    /// Several sub-checks, each with its own tolerance; reports the worst
    /// error relative to its tolerance.
    fn all(parts: &[(&str, f64, f64)]) -> Self {
        let worst = parts
            .iter()
            .max_by(|a, b| (a.1 / a.2).total_cmp(&(b.1 / b.2)))
            .expect("at least one part");
        let pass = parts.iter().all(|(_, e, t)| e <= t);
        let note = parts.iter().map(|(n, e, t)| format!("{n} {e:.2e}/{t:.0e}")).collect::<Vec<_>>().join(", ");
        Outcome { max_error: worst.1, tolerance: worst.2, pass, note }
    }

    fn with_note(mut self, extra: &str) -> Self {
        if !self.note.is_empty() {
            self.note.push_str(", ");
        }
        self.note.push_str(extra);
        self
    }
}

fn rel(err: f64, scale: f64) -> f64 {
    err / scale.max(f64::MIN_POSITIVE)
}

fn ball(s: &mut Sampler, radius: f64) -> Q {
    s.ball_radius(radius)
}

// 1. H is independent of the rotation u and matches its closed form
fn well_definedness() -> Outcome {
    let mut s = Sampler::stream(SEED, "acceptance-well-definedness");
    let (mut spread, mut closed_err) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let (q, a, b) = (s.ball(), s.tangent(), s.tangent());
        let closed = slice_hermitian(q, a, b);
        let scale = closed.norm();
        let reference = slice_hermitian_via_definition(q, a, b, Q::ONE).unwrap();
        for _ in 0..50 {
            let v = slice_hermitian_via_definition(q, a, b, s.unit()).unwrap();
            spread = spread.max(rel((v - reference).norm(), scale));
            closed_err = closed_err.max(rel((v - closed).norm(), scale));
        }
    }
    Outcome::all(&[("spread over u", spread, 1e-11), ("vs closed form", closed_err, 1e-11)])
}

// 2. G = G̃ and the scalar identity
fn g_equals_gtilde() -> Outcome {
    let mut s = Sampler::stream(SEED, "acceptance-g-equals-gtilde");
    let (mut metric, mut scalar) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let (q, a) = (ball(&mut s, 0.9), s.tangent());
        let g = slice_riemannian(q, a, a, RiemannianFormula::Closed);
        metric = metric.max(rel((g - arcozzi_sarfatti_norm(q, a)).abs(), g));
        scalar = scalar.max((scalar_identity_lhs(q) - (1.0 - q.norm_sqr()).powi(2)).abs());
    }
    Outcome::all(&[("G vs G~", metric, 1e-11), ("scalar identity", scalar, 1e-13)])
}

// 3. closed / corrected / Re H
fn triple_formula() -> Outcome {
    let mut s = Sampler::stream(SEED, "acceptance-triple-formula");
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (q, a, b) = (s.ball(), s.tangent(), s.tangent());
        let g = |f| slice_riemannian(q, a, b, f);
        // Cauchy-Schwarz scale; G(α, β) itself may cancel to near zero
        let scale = (slice_riemannian(q, a, a, RiemannianFormula::Closed)
            * slice_riemannian(q, b, b, RiemannianFormula::Closed))
        .sqrt();
        let (c, k, h) = (g(RiemannianFormula::Closed), g(RiemannianFormula::Corrected), g(RiemannianFormula::ViaHermitian));
        worst = worst.max(rel((c - k).abs().max((c - h).abs()), scale));
    }
    Outcome::bounded(worst, 1e-11)
}

// 4. closed-form Möbius evaluation vs the *-algebra route
fn mobius_oracle() -> Outcome {
    let mut s = Sampler::stream(SEED, "acceptance-mobius-oracle");
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let m = RegularMobius::new(s.ball(), s.unit()).unwrap();
        let q = ball(&mut s, 0.7);
        let closed = regular_apply(&m, q).unwrap();
        let series = regular_apply_via_series(&m, q).unwrap();
        worst = worst.max((closed - series).norm());
    }
    let m = RegularMobius::centered(Q::real(0.5)).unwrap();
    let expected = Q::new(0.588235, 0.0, -0.352941, 0.0);
    let q = Q::new(0.0, 0.0, 0.5, 0.0);
    let spot_closed = regular_apply(&m, q).unwrap().max_abs_diff(expected);
    let spot_series = regular_apply_via_series(&m, q).unwrap().max_abs_diff(expected);
    Outcome::all(&[("routes", worst, 1e-10), ("spot closed", spot_closed, 1e-6), ("spot series", spot_series, 1e-6)])
}

fn central_difference(f: impl Fn(Q) -> Q, q: Q, alpha: Q, h: f64) -> Q {
    (f(q + alpha * h) - f(q - alpha * h)) / (2.0 * h)
}

// 5. analytic differentials vs central differences
fn differentials() -> Outcome {
    let mut s = Sampler::stream(SEED, "acceptance-differentials");
    let h = 1e-5;
    let (mut regular, mut classical) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let m = RegularMobius::new(ball(&mut s, 0.9), s.unit()).unwrap();
        let (q, alpha) = (ball(&mut s, 0.9), s.unit());
        let exact = regular_differential(&m, q, alpha).unwrap();
        let fd = central_difference(|x| regular_apply(&m, x).unwrap(), q, alpha, h);
        regular = regular.max(rel((exact - fd).norm(), exact.norm()));

        let a = random_sp11(&mut s);
        let exact = classical_differential(&a, q, alpha).unwrap();
        let fd = central_difference(|x| classical_apply(&a, x).unwrap(), q, alpha, h);
        classical = classical.max(rel((exact - fd).norm(), exact.norm()));
    }
    let at_center = center_differential(Q::real(0.5), Q::ONE).unwrap().max_abs_diff(Q::real(-4.0 / 3.0));
    let via_general = regular_differential(&RegularMobius::centered(Q::real(0.5)).unwrap(), Q::real(0.5), Q::ONE)
        .unwrap()
        .max_abs_diff(Q::real(-4.0 / 3.0));
    Outcome::all(&[
        ("regular vs FD", regular, 1e-6),
        ("classical vs FD", classical, 1e-6),
        ("center spot", at_center, 1e-12),
        ("general formula at a", via_general, 1e-12),
    ])
}

// 6. Ĝ is Sp(1,1)-invariant; Ω₀ is not Sp(1)×Sp(1)-invariant while G₀ is
fn invariance() -> Outcome {
    let mut s = Sampler::stream(SEED, "acceptance-invariance");
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let m = random_sp11(&mut s);
        for _ in 0..5 {
            let (q, a, b) = (ball(&mut s, 0.9), s.tangent(), s.tangent());
            let fq = classical_apply(&m, q).unwrap();
            let da = classical_differential(&m, q, a).unwrap();
            let db = classical_differential(&m, q, b).unwrap();
            let before = hyperbolic_metric(q, a, b);
            let after = hyperbolic_metric(fq, da, db);
            let scale = (hyperbolic_metric(q, a, a) * hyperbolic_metric(q, b, b)).sqrt();
            worst = worst.max(rel((after - before).abs(), scale));
        }
    }
    let witness = noninvariance_witness();
    let sweep = noninvariance_sweep(&mut s, 1000, 1e-6);
    let found = witness.omega_violation() > 1.0 && sweep.violations > 0;
    let g_dev = sweep.max_g_deviation.max(witness.g_deviation());
    let mut out = Outcome::all(&[("G^ pushforward", worst, 1e-8), ("G0 invariance", g_dev, 1e-12)]).with_note(&format!(
        "Omega0 violations {}/{} (witness |dOmega| = {:.1})",
        sweep.violations,
        sweep.samples,
        witness.omega_violation()
    ));
    out.pass &= found;
    out
}

// 7. representation formulas under u·q·u⁻¹
fn representation() -> Outcome {
    let mut s = Sampler::stream(SEED, "acceptance-representation");
    let mut parts = [("G", 0.0f64, 1e-11), ("H", 0.0, 1e-11), ("Omega", 0.0, 1e-11)];
    for _ in 0..1000 {
        let (u, q, a, b) = (s.unit(), s.ball(), s.tangent(), s.tangent());
        let scale = slice_hermitian(q, a, a).norm().sqrt() * slice_hermitian(q, b, b).norm().sqrt();
        for (part, t) in parts.iter_mut().zip([SliceTensor::G, SliceTensor::H, SliceTensor::Omega]) {
            let err = (tensor_value(t, q, a, b) - representation_transform(u, t, q, a, b)).norm();
            part.1 = part.1.max(rel(err, scale));
        }
    }
    Outcome::all(&parts)
}

// 8. restrictions to a slice: G|_{D_I} = g_I and Ω|_{D_I} = I·ω_I
fn slice_restrictions() -> Outcome {
    let mut s = Sampler::stream(SEED, "acceptance-slice-restrictions");
    let (mut metric, mut kahler) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let unit = s.unit_imaginary();
        let q = s.slice_disk(unit, 1.0 - s.boundary_margin());
        let (a, b) = (s.slice_tangent(unit), s.slice_tangent(unit));
        let scale = a.norm() * b.norm() / (1.0 - q.norm_sqr()).powi(2);
        let g = slice_riemannian(q, a, b, RiemannianFormula::Closed);
        metric = metric.max(rel((g - slice_restriction_metric(unit, q, a, b).unwrap()).abs(), scale));
        let w = slice_restriction_kahler(unit, q, a, b).unwrap();
        kahler = kahler.max(rel((slice_kahler(q, a, b) - unit.get() * w).norm(), scale));
    }
    Outcome::all(&[("G = g_I", metric, 1e-11), ("Omega = I omega_I", kahler, 1e-11)])
}

// 9. pseudo-hyperbolic distance
fn hardy_distance() -> Outcome {
    let mut s = Sampler::stream(SEED, "acceptance-hardy");
    let tol = DEFAULT_TOL;
    let d = |p, q| delta(p, q, tol).unwrap().delta;

    let mut origin = 0.0f64;
    for _ in 0..1000 {
        let q = s.ball();
        origin = origin.max((d(Q::ZERO, q) - q.norm()).abs());
    }

    let mut closed = 0.0f64;
    for _ in 0..1000 {
        let unit = s.unit_imaginary();
        let (p, q) = (s.slice_disk(unit, 0.999), s.slice_disk(unit, 0.999));
        closed = closed.max((d(p, q) - slice_delta(p, q).unwrap()).abs());
    }

    let (mut asym, mut triangle, mut range_ok) = (0.0f64, 0.0f64, true);
    for _ in 0..10_000 {
        let (p, q, r) = (s.ball(), s.ball(), s.ball());
        let (pq, qp, qr, pr) = (d(p, q), d(q, p), d(q, r), d(p, r));
        asym = asym.max((pq - qp).abs());
        triangle = triangle.max(pr - pq - qr);
        range_ok &= (0.0..1.0).contains(&pq) && (0.0..1.0).contains(&pr);
    }

    let mut ratio = 0.0f64;
    let steps = halving_steps(5);
    for _ in 0..100 {
        let unit = s.unit_imaginary();
        let q = s.slice_disk(unit, 0.9);
        let alpha = s.slice_tangent(unit).normalize().unwrap();
        let report = infinitesimal_ratio(q, alpha, &steps).unwrap();
        ratio = ratio.max((report.ratio - 1.0).abs());
    }

    let mut out = Outcome::all(&[
        ("delta(0,q)", origin, 1e-10),
        ("slice closed form", closed, 1e-9),
        ("symmetry", asym, 2.0 * tol),
        ("triangle excess", triangle.max(0.0), 4.0 * tol),
        ("slice ratio", ratio, 1e-4),
    ]);
    out.pass &= range_ok;
    out
}

fn random_series(s: &mut Sampler, order: usize) -> RegularPowerSeries {
    RegularPowerSeries::new((0..=order).map(|_| s.tangent()).collect())
}

// 10. *-algebra
fn series_algebra() -> Outcome {
    let mut s = Sampler::stream(SEED, "acceptance-series");
    let (mut assoc, mut reality) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let orders: Vec<usize> = (0..3).map(|_| s.uniform(0.0, 9.0) as usize).collect();
        let (f, g, h) = (random_series(&mut s, orders[0]), random_series(&mut s, orders[1]), random_series(&mut s, orders[2]));
        let left = f.star_mul(&g).star_mul(&h);
        let right = f.star_mul(&g.star_mul(&h));
        let scale = f.scale() * g.scale() * h.scale();
        let err = left.coeffs().iter().zip(right.coeffs()).map(|(x, y)| (*x - *y).norm()).fold(0.0, f64::max);
        assoc = assoc.max(rel(err, scale));
        let fs = f.symmetrize();
        reality = reality.max(fs.coeffs().iter().map(|c| c.im().norm()).fold(0.0, f64::max));
    }

    let mut residual = 0.0f64;
    for _ in 0..200 {
        // 1 + Σ qⁿaₙ with Σ|aₙ| < 1/2 has no zeros in the closed ball
        let order = 1 + s.uniform(0.0, 8.0) as usize;
        let mut coeffs = vec![Q::ONE];
        let budget = s.uniform(0.0, 0.5);
        let raw: Vec<Q> = (0..order).map(|_| s.tangent()).collect();
        let total: f64 = raw.iter().map(|c| c.norm()).sum();
        coeffs.extend(raw.iter().map(|c| *c * (budget / total)));
        let f = RegularPowerSeries::new(coeffs);
        let inverse = f.reciprocal_series(64).unwrap();
        let product = f.star_mul(&inverse).truncate(64);
        for _ in 0..5 {
            let q = ball(&mut s, 0.5);
            residual = residual.max((product.eval(q).unwrap() - Q::ONE).norm());
        }
    }
    Outcome::all(&[("associativity", assoc, 1e-13), ("f^s reality", reality, 1e-13), ("f * f^-*", residual, 1e-9)])
}

// 11. length of the segment [0, 1/2]
fn segment_length() -> Outcome {
    let pts: Vec<Q> = (0..=4000).map(|k| Q::real(0.5 * k as f64 / 4000.0)).collect();
    let exact = 0.5f64.atanh();
    let ghat = (curve_length(&pts, Metric::Hyperbolic).unwrap() - exact).abs();
    let g = (curve_length(&pts, Metric::Slice).unwrap() - exact).abs();
    Outcome::all(&[("G^", ghat, 1e-6), ("G", g, 1e-6)])
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("slice structures are well defined", well_definedness),
        ("G equals G~", g_equals_gtilde),
        ("three formulas for G agree", triple_formula),
        ("Mobius closed form vs series oracle", mobius_oracle),
        ("differentials vs finite differences", differentials),
        ("G^ invariance and Omega0 non-invariance", invariance),
        ("representation formulas", representation),
        ("slice restrictions", slice_restrictions),
        ("Hardy pseudo-hyperbolic distance", hardy_distance),
        ("series algebra", series_algebra),
        ("segment length", segment_length),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let status = if out.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!out.pass);
        println!(
            "{status} {:>2} {name}: max error {:.3e} (tol {:.0e}) [{}] {:.2}s",
            n + 1,
            out.max_error,
            out.tolerance,
            out.note,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

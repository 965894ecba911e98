//! Seeded sampling of quaternions for randomized property checks.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::quat::{ImaginaryUnit, Quaternion, EPS_BOUNDARY};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleKind {
    /// Uniform in the ball `|q| < 1 - margin`.
    Ball,
    /// Uniform on the sphere `S` of unit imaginary quaternions.
    SphereS,
    /// Uniform on the unit quaternions `Sp(1)`.
    Sp1,
    /// Standard Gaussian 4-vector.
    Tangent,
}

/// Deterministic generator of sample quaternions.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
    boundary_margin: f64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), boundary_margin: EPS_BOUNDARY }
    }

    /// A stream keyed by `(seed, name)`, independent of the order in which
    /// named streams are created.
    pub fn stream(seed: u64, name: &str) -> Self {
        Sampler::new(seed ^ fnv1a(name.as_bytes()))
    }

    pub fn with_boundary_margin(mut self, margin: f64) -> Self {
        self.boundary_margin = margin;
        self
    }

    pub fn boundary_margin(&self) -> f64 {
        self.boundary_margin
    }

    pub fn sample(&mut self, kind: SampleKind) -> Quaternion {
        match kind {
            SampleKind::Ball => self.ball(),
            SampleKind::SphereS => self.unit_imaginary().get(),
            SampleKind::Sp1 => self.unit(),
            SampleKind::Tangent => self.tangent(),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn tangent(&mut self) -> Quaternion {
        Quaternion::new(self.gaussian(), self.gaussian(), self.gaussian(), self.gaussian())
    }

    pub fn unit(&mut self) -> Quaternion {
        loop {
            let g = self.tangent();
            let n = g.norm();
            if n > 1e-8 {
                return g / n;
            }
        }
    }

    pub fn unit_imaginary(&mut self) -> ImaginaryUnit {
        loop {
            let g = self.tangent().im();
            if g.norm() > 1e-8 {
                if let Ok(u) = ImaginaryUnit::from_direction(g) {
                    return u;
                }
            }
        }
    }

    /// Uniform in the ball `|q| < 1 - margin`.
    pub fn ball(&mut self) -> Quaternion {
        self.ball_radius(1.0 - self.boundary_margin)
    }

    /// Uniform (by volume) in the ball `|q| < radius`.
    pub fn ball_radius(&mut self, radius: f64) -> Quaternion {
        let dir = self.unit();
        let r = radius * self.rng.random::<f64>().powf(0.25);
        dir * r
    }

    /// Uniform in the disk `D_I ∩ {|q| < radius}` of the slice `C_I`.
    pub fn slice_disk(&mut self, unit: ImaginaryUnit, radius: f64) -> Quaternion {
        let r = radius * self.rng.random::<f64>().sqrt();
        let t = self.uniform(0.0, std::f64::consts::TAU);
        unit.get() * (r * t.sin()) + r * t.cos()
    }

    /// Gaussian element of `C_I`.
    pub fn slice_tangent(&mut self, unit: ImaginaryUnit) -> Quaternion {
        let (a, b) = (self.gaussian(), self.gaussian());
        unit.get() * b + a
    }
}

/// 64-bit FNV-1a; stable across platforms and toolchains.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325_u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

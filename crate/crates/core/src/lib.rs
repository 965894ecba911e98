//! Slice-regular quaternionic analysis on the open unit ball `B ⊂ H`.
//!
//! The crate is organised bottom-up:
//!
//! - [`quat`]: quaternion arithmetic, imaginary units, slice coordinates and
//!   the orthogonal projections onto a slice `C_I` and its complement.
//! - [`sample`]: deterministic random sampling of points, units and tangent
//!   vectors for the property sweeps.
//! - [`series`]: truncated slice-regular power series `Σ qⁿ aₙ` with the
//!   `*`-product, regular conjugate, symmetrization and regular reciprocal.
//! - [`mobius`]: classical Möbius transformations from `Sp(1,1)`, regular
//!   Möbius transformations and their differentials.
//! - [`geometry`]: the hyperbolic metric `Ĝ` and the slice Hermitian metric
//!   `H`, slice Riemannian metric `G` and slice Kähler form `Ω`, plus curve
//!   length and distance estimation.
//! - [`hardy`]: Hardy-space reproducing kernels and the pseudo-hyperbolic
//!   distance `δ`.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x < 1.0)` also rejects NaN

pub mod error;
pub mod geometry;
pub mod hardy;
pub mod linalg;
pub mod mobius;
pub mod quat;
pub mod sample;
pub mod series;

pub use error::{Error, Result};
pub use quat::{ImaginaryUnit, Quaternion, SliceCoords};
pub use series::RegularPowerSeries;

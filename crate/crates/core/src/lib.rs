//! Geometry of the state manifold traced out by `N` spin-`s` particles under the
//! long-range `zz` Ising Hamiltonian
//!
//! ```text
//! H = 2J Σ_{i<j} S_i^z S_j^z  (+ h Σ_j S_j · n')
//! ```
//!
//! started from a polarized product state pointing along `n(θ, φ)`.
//!
//! The crate has two independent sides:
//!
//! - an exact brute-force route ([`spin_ops`], [`evolution`], [`fs_metric`]) that
//!   builds dense operators on the `(2s+1)^N` product basis, propagates the state and
//!   evaluates the Fubini–Study metric from tangent vectors;
//! - the closed forms ([`analytic`]) for the metric, scalar curvature, angular defects,
//!   evolution speed, its extrema, thermodynamic limits and the field-dressed metric.
//!
//! [`verify`] runs the two against each other and collects a report.
//!
//! Conventions: `ħ = 1`, energies in Hz, angles in radians, `χ = J t`.
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analytic;
pub mod error;
pub mod evolution;
pub mod fs_metric;
pub mod quad;
pub mod spin_ops;
pub mod verify;

pub use analytic::{Branch, FieldConfig, ManifoldSpec, SpeedExtrema};
pub use error::{Error, Result};
pub use evolution::{CoordinatePoint, StateFamily, StateVector, TangentStates};
pub use fs_metric::MetricTensor;
pub use spin_ops::{Direction, ManyBodyOperator, SiteOperator, SpinAxis, SpinSystem};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

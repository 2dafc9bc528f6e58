//! Fubini–Study metric, energy uncertainty and evolution speed evaluated on actual
//! state vectors.
//!
//! `g_μν = γ² Re(⟨ψ_μ|ψ_ν⟩ − ⟨ψ_μ|ψ⟩⟨ψ|ψ_ν⟩)` over the chart `(θ, φ, χ)`.

use libm::{fabs, sqrt};
use nalgebra::{DVector, Matrix3};

use crate::analytic::FieldConfig;
use crate::error::{Error, Result};
use crate::evolution::{CoordinatePoint, StateFamily, StateVector, TangentStates};
use crate::quad;
use crate::spin_ops::{ManyBodyOperator, SpinSystem};
use crate::C64;

/// Coordinate indices into [`MetricTensor::components`].
pub const THETA: usize = 0;
pub const PHI: usize = 1;
pub const CHI: usize = 2;

/// Symmetric 3×3 metric over `(θ, φ, χ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    pub components: [[f64; 3]; 3],
    pub gamma: f64,
}

impl MetricTensor {
    pub fn from_components(
        g_tt: f64,
        g_pp: f64,
        g_cc: f64,
        g_tp: f64,
        g_tc: f64,
        g_pc: f64,
        gamma: f64,
    ) -> Self {
        Self {
            components: [[g_tt, g_tp, g_tc], [g_tp, g_pp, g_pc], [g_tc, g_pc, g_cc]],
            gamma,
        }
    }

    pub fn g_theta_theta(&self) -> f64 {
        self.components[THETA][THETA]
    }

    pub fn g_phi_phi(&self) -> f64 {
        self.components[PHI][PHI]
    }

    pub fn g_chi_chi(&self) -> f64 {
        self.components[CHI][CHI]
    }

    pub fn g_theta_phi(&self) -> f64 {
        self.components[THETA][PHI]
    }

    pub fn g_theta_chi(&self) -> f64 {
        self.components[THETA][CHI]
    }

    pub fn g_phi_chi(&self) -> f64 {
        self.components[PHI][CHI]
    }

    /// The six independent components `(θθ, φφ, χχ, θφ, θχ, φχ)`.
    pub fn independent(&self) -> [f64; 6] {
        [
            self.g_theta_theta(),
            self.g_phi_phi(),
            self.g_chi_chi(),
            self.g_theta_phi(),
            self.g_theta_chi(),
            self.g_phi_chi(),
        ]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = Matrix3::from_fn(|i, j| self.components[i][j]);
        m.symmetric_eigenvalues().min()
    }

    pub fn is_positive_semidefinite(&self) -> bool {
        self.min_eigenvalue() >= -1e-10
    }
}

/// Metric from a state and its tangent vectors.
pub fn metric_from_tangents(state: &StateVector, tangents: &TangentStates, gamma: f64) -> MetricTensor {
    let psi = &state.amplitudes;
    let t = tangents.as_array();
    let overlaps: [C64; 3] = [psi.dotc(t[0]), psi.dotc(t[1]), psi.dotc(t[2])];
    let mut components = [[0.0; 3]; 3];
    for mu in 0..3 {
        for nu in mu..3 {
            // ⟨ψ_μ|ψ⟩ = conj(⟨ψ|ψ_μ⟩)
            let raw = t[mu].dotc(t[nu]) - overlaps[mu].conj() * overlaps[nu];
            let value = gamma * gamma * raw.re;
            components[mu][nu] = value;
            components[nu][mu] = value;
        }
    }
    MetricTensor { components, gamma }
}

/// Metric at `point` using a prepared family.
pub fn metric_on_family(family: &StateFamily, point: &CoordinatePoint) -> Result<MetricTensor> {
    let (psi, tangents) = family.state_and_tangents(point)?;
    Ok(metric_from_tangents(&psi, &tangents, family.system().gamma()))
}

/// Metric at `point` from the exact state vector.
pub fn metric_numeric(sys: &SpinSystem, point: &CoordinatePoint, field: Option<&FieldConfig>) -> Result<MetricTensor> {
    metric_on_family(&StateFamily::new(sys, field)?, point)
}

/// `√⟨ψ|(H − ⟨H⟩)²|ψ⟩`.
pub fn energy_uncertainty(state: &StateVector, hamiltonian: &ManyBodyOperator) -> Result<f64> {
    let h_psi = hamiltonian.apply(&state.amplitudes);
    let mean = state.amplitudes.dotc(&h_psi).re;
    let shifted: DVector<C64> = h_psi - &state.amplitudes * C64::from(mean);
    let variance = shifted.dotc(&shifted).re;
    if variance < -1e-12 {
        return Err(Error::NegativeVariance(variance));
    }
    Ok(sqrt(variance.max(0.0)))
}

/// `g_tt / γ²` along `|ψ(t)⟩ = e^{−iHt}|ψ⟩` from the tangent `−iH|ψ⟩`, usable when `J = 0`.
pub fn time_metric(state: &StateVector, hamiltonian: &ManyBodyOperator) -> f64 {
    let tangent = hamiltonian.apply(&state.amplitudes) * C64::new(0.0, -1.0);
    let overlap = state.amplitudes.dotc(&tangent);
    tangent.dotc(&tangent).re - overlap.norm_sqr()
}

/// `v = |J| √g_χχ`.
pub fn speed_on_family(family: &StateFamily, point: &CoordinatePoint) -> Result<f64> {
    let g = metric_on_family(family, point)?.g_chi_chi();
    Ok(fabs(family.system().coupling()) * sqrt(g.max(0.0)))
}

pub fn speed_numeric(sys: &SpinSystem, point: &CoordinatePoint, field: Option<&FieldConfig>) -> Result<f64> {
    speed_on_family(&StateFamily::new(sys, field)?, point)
}

/// Fubini–Study length of the trajectory from `χ = 0` to `chi` at fixed `(θ, φ)`.
///
/// Without a field, or with a field along `z`, `g_χχ` is constant along the trajectory
/// and the length is `√g_χχ · χ`; otherwise the line integral is evaluated numerically.
pub fn distance_along_evolution(
    sys: &SpinSystem,
    theta: f64,
    phi: f64,
    chi: f64,
    field: Option<&FieldConfig>,
) -> Result<f64> {
    if chi.is_nan() || chi < 0.0 {
        return Err(Error::Domain("chi must be non-negative"));
    }
    let family = StateFamily::new(sys, field)?;
    match field {
        Some(f) if !f.is_zero() && !f.is_along_z() => distance_by_quadrature(&family, theta, phi, chi),
        _ => {
            let g = metric_on_family(&family, &CoordinatePoint::new(theta, phi, 0.0)?)?.g_chi_chi();
            Ok(sqrt(g.max(0.0)) * chi)
        }
    }
}

/// `∫_0^χ √g_χχ(θ, φ, χ') dχ'` by composite Simpson with doubling to relative change `1e−8`.
pub fn distance_by_quadrature(family: &StateFamily, theta: f64, phi: f64, chi: f64) -> Result<f64> {
    quad::simpson_doubling(
        |c| {
            let g = metric_on_family(family, &CoordinatePoint::new(theta, phi, c)?)?.g_chi_chi();
            Ok(sqrt(g.max(0.0)))
        },
        0.0,
        chi,
        1e-8,
        1 << 14,
    )
}

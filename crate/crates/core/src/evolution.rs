//! Polarized initial states, their evolution, and analytic tangent vectors of the
//! three-parameter family
//!
//! ```text
//! |ψ(θ, φ, χ)⟩ = e^{−iχG} e^{−iφ Σ S^z} e^{−iθ Σ S^y} |s, …, s⟩,
//! G = 2 Σ_{i<j} S_i^z S_j^z + (h/J) Σ_j S_j · n'.
//! ```
//!
//! Without a field `G` is diagonal and the evolution is a phase per basis label. With a
//! field `G` is diagonalised once and reused for every `χ`. Global phases are kept.

use alloc::vec::Vec;

use libm::{cos, fabs, sin, sqrt};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::analytic::FieldConfig;
use crate::error::{Error, Result};
use crate::spin_ops::{
    apply_collective, build_chi_generator, build_spin_operators, ising_pair_sums_x4, total_sz_x2, ManyBodyOperator,
    SpinSystem, BASIS_LABEL,
};
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Normalised amplitudes over the product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(amplitudes: DVector<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn basis_label(&self) -> &'static str {
        BASIS_LABEL
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|⟨self|other⟩|`, blind to global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    /// `⟨self|op|self⟩`.
    pub fn expectation(&self, op: &ManyBodyOperator) -> C64 {
        self.amplitudes.dotc(&(&op.matrix * &self.amplitudes))
    }
}

/// Coordinates `(θ, φ, χ)` of the state family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinatePoint {
    pub theta: f64,
    pub phi: f64,
    pub chi: f64,
}

impl CoordinatePoint {
    pub fn new(theta: f64, phi: f64, chi: f64) -> Result<Self> {
        if !(0.0..=core::f64::consts::PI).contains(&theta) {
            return Err(Error::Domain("theta must lie in [0, pi]"));
        }
        if !phi.is_finite() || !chi.is_finite() {
            return Err(Error::Domain("phi and chi must be finite"));
        }
        Ok(Self { theta, phi, chi })
    }
}

/// `∂_θ|ψ⟩`, `∂_φ|ψ⟩`, `∂_χ|ψ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentStates {
    pub d_theta: DVector<C64>,
    pub d_phi: DVector<C64>,
    pub d_chi: DVector<C64>,
}

impl TangentStates {
    /// Tangents in coordinate order `(θ, φ, χ)`.
    pub fn as_array(&self) -> [&DVector<C64>; 3] {
        [&self.d_theta, &self.d_phi, &self.d_chi]
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * f64::from(n - i) / f64::from(i + 1);
    }
    acc
}

fn powu(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * x)
}

/// Single-site amplitudes of `e^{−iθ S^y}|s⟩`: `√C(2s,k) cos^{2s−k}(θ/2) sin^k(θ/2)`
/// for `m = s − k`.
fn rotated_site(two_s: u32, theta: f64) -> Vec<f64> {
    let (c, s) = (cos(theta / 2.0), sin(theta / 2.0));
    (0..=two_s)
        .map(|k| sqrt(binomial(two_s, k)) * powu(c, two_s - k) * powu(s, k))
        .collect()
}

/// `e^{−iθ Σ S^y}|s, …, s⟩` as a product state.
fn rotated_reference(sys: &SpinSystem, theta: f64) -> Result<DVector<C64>> {
    let dim = sys.check_dim()?;
    let site = rotated_site(sys.two_s(), theta);
    let local = sys.local_dim();
    let mut amps = alloc::vec![C64::new(1.0, 0.0); dim];
    for (idx, amp) in amps.iter_mut().enumerate() {
        let mut rest = idx;
        for _ in 0..sys.n_sites() {
            *amp *= site[rest % local];
            rest /= local;
        }
    }
    Ok(DVector::from_vec(amps))
}

fn phase_by(values: &[i64], scale: f64, v: &mut DVector<C64>) {
    for (amp, &q) in v.iter_mut().zip(values) {
        if q != 0 {
            *amp *= C64::from_polar(1.0, -scale * q as f64);
        }
    }
}

fn scale_by(values: &[i64], scale: f64, v: &DVector<C64>) -> DVector<C64> {
    DVector::from_iterator(v.len(), v.iter().zip(values).map(|(a, &q)| a * (scale * q as f64)))
}

/// The polarized product state `e^{−iφ Σ S^z} e^{−iθ Σ S^y} |s, …, s⟩`.
pub fn initial_state(sys: &SpinSystem, theta: f64, phi: f64) -> Result<StateVector> {
    CoordinatePoint::new(theta, phi, 0.0)?;
    let mut v = rotated_reference(sys, theta)?;
    phase_by(&total_sz_x2(sys)?, phi / 2.0, &mut v);
    Ok(StateVector::new(v))
}

/// Zero-field evolution: each amplitude picks up `e^{−i2χ Σ_{i<j} m_i m_j}`.
pub fn evolve_ising(sys: &SpinSystem, state: &StateVector, chi: f64) -> Result<StateVector> {
    let sums = ising_pair_sums_x4(sys)?;
    if sums.len() != state.dim() {
        return Err(Error::Domain("state dimension does not match the system"));
    }
    let mut v = state.amplitudes.clone();
    phase_by(&sums, chi / 2.0, &mut v);
    Ok(StateVector::new(v))
}

/// `e^{−i p A}` for a Hermitian `A`, from its eigendecomposition.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl SpectralPropagator {
    pub fn new(hermitian: &DMatrix<C64>) -> Result<Self> {
        let dim = hermitian.nrows();
        let eig = SymmetricEigen::try_new(hermitian.clone(), f64::EPSILON, 1000 * dim.max(1))
            .ok_or(Error::EigenNoConvergence)?;
        Ok(Self {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn apply(&self, v: &DVector<C64>, param: f64) -> DVector<C64> {
        let mut coeffs = self.eigenvectors.ad_mul(v);
        for (c, &lambda) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
            *c *= C64::from_polar(1.0, -param * lambda);
        }
        &self.eigenvectors * coeffs
    }
}

/// Evolution under `G` with a field, via the spectral decomposition of `G`.
pub fn evolve_with_field(
    sys: &SpinSystem,
    field: &FieldConfig,
    state: &StateVector,
    chi: f64,
) -> Result<StateVector> {
    let generator = build_chi_generator(sys, Some(field))?;
    let propagator = SpectralPropagator::new(&generator.matrix)?;
    Ok(StateVector::new(propagator.apply(&state.amplitudes, chi)))
}

enum Dynamics {
    Diagonal,
    Dense {
        generator: ManyBodyOperator,
        propagator: SpectralPropagator,
    },
}

/// The state family of one system (and optional field) with everything that does not
/// depend on the coordinates precomputed.
pub struct StateFamily {
    sys: SpinSystem,
    field: Option<FieldConfig>,
    pair_sums_x4: Vec<i64>,
    sz_x2: Vec<i64>,
    sy: DMatrix<C64>,
    dynamics: Dynamics,
}

impl StateFamily {
    pub fn new(sys: &SpinSystem, field: Option<&FieldConfig>) -> Result<Self> {
        let pair_sums_x4 = ising_pair_sums_x4(sys)?;
        let sz_x2 = total_sz_x2(sys)?;
        let (_, sy, _) = build_spin_operators(sys.two_s())?;
        let dynamics = match field {
            None => Dynamics::Diagonal,
            Some(f) => {
                let generator = build_chi_generator(sys, Some(f))?;
                let propagator = SpectralPropagator::new(&generator.matrix)?;
                Dynamics::Dense {
                    generator,
                    propagator,
                }
            }
        };
        Ok(Self {
            sys: *sys,
            field: field.copied(),
            pair_sums_x4,
            sz_x2,
            sy: sy.matrix,
            dynamics,
        })
    }

    pub fn system(&self) -> &SpinSystem {
        &self.sys
    }

    pub fn field(&self) -> Option<&FieldConfig> {
        self.field.as_ref()
    }

    fn propagate(&self, v: &DVector<C64>, chi: f64) -> DVector<C64> {
        match &self.dynamics {
            Dynamics::Diagonal => {
                let mut out = v.clone();
                phase_by(&self.pair_sums_x4, chi / 2.0, &mut out);
                out
            }
            Dynamics::Dense { propagator, .. } => propagator.apply(v, chi),
        }
    }

    /// `G|v⟩`.
    pub fn apply_generator(&self, v: &DVector<C64>) -> DVector<C64> {
        match &self.dynamics {
            Dynamics::Diagonal => scale_by(&self.pair_sums_x4, 0.5, v),
            Dynamics::Dense { generator, .. } => generator.apply(v),
        }
    }

    /// The physical Hamiltonian `H = J G`.
    pub fn hamiltonian(&self) -> Result<ManyBodyOperator> {
        let g = build_chi_generator(&self.sys, self.field.as_ref())?;
        Ok(g.scaled(self.sys.coupling()))
    }

    pub fn state(&self, point: &CoordinatePoint) -> Result<StateVector> {
        let mut base = rotated_reference(&self.sys, point.theta)?;
        phase_by(&self.sz_x2, point.phi / 2.0, &mut base);
        Ok(StateVector::new(self.propagate(&base, point.chi)))
    }

    pub fn state_and_tangents(&self, point: &CoordinatePoint) -> Result<(StateVector, TangentStates)> {
        let reference = rotated_reference(&self.sys, point.theta)?;
        let mut base = reference.clone();
        phase_by(&self.sz_x2, point.phi / 2.0, &mut base);
        let psi = self.propagate(&base, point.chi);

        let d_chi = self.apply_generator(&psi) * (-I);
        let d_phi = match self.dynamics {
            // Σ S^z commutes with the Ising generator
            Dynamics::Diagonal => scale_by(&self.sz_x2, 0.5, &psi) * (-I),
            Dynamics::Dense { .. } => self.propagate(&(scale_by(&self.sz_x2, 0.5, &base) * (-I)), point.chi),
        };
        let mut rotated = apply_collective(&self.sys, &self.sy, &reference) * (-I);
        phase_by(&self.sz_x2, point.phi / 2.0, &mut rotated);
        let d_theta = self.propagate(&rotated, point.chi);

        Ok((
            StateVector::new(psi),
            TangentStates {
                d_theta,
                d_phi,
                d_chi,
            },
        ))
    }

    pub fn tangents(&self, point: &CoordinatePoint) -> Result<TangentStates> {
        Ok(self.state_and_tangents(point)?.1)
    }
}

/// The evolved state at `point`.
pub fn evolved_state(sys: &SpinSystem, point: &CoordinatePoint, field: Option<&FieldConfig>) -> Result<StateVector> {
    StateFamily::new(sys, field)?.state(point)
}

/// Analytic tangent vectors at `point`.
pub fn tangent_states(sys: &SpinSystem, point: &CoordinatePoint, field: Option<&FieldConfig>) -> Result<TangentStates> {
    StateFamily::new(sys, field)?.tangents(point)
}

/// Largest elementwise deviation between two vectors.
pub fn max_deviation(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `‖v‖ − 1`.
pub fn norm_defect(state: &StateVector) -> f64 {
    fabs(state.norm() - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_ops::{build_spin_operators, embed_site_operator, Direction};
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn sys(n: usize, two_s: u32) -> SpinSystem {
        SpinSystem::new(n, two_s, 1.0).unwrap()
    }

    #[test]
    fn pole_state_is_top_basis_vector() {
        let state = initial_state(&sys(3, 2), 0.0, 0.0).unwrap();
        assert_eq!(state.amplitudes[0], C64::new(1.0, 0.0));
        assert!(state.amplitudes.iter().skip(1).all(|a| a.norm() == 0.0));
    }

    #[test]
    fn single_site_rotation() {
        let amps = rotated_site(1, FRAC_PI_2);
        assert_abs_diff_eq!(amps[0], (PI / 4.0).cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(amps[1], (PI / 4.0).sin(), epsilon = 1e-15);
    }

    #[test]
    fn rotated_site_matches_exponential_of_sy() {
        for two_s in 1..=5 {
            let (_, sy, _) = build_spin_operators(two_s).unwrap();
            let prop = SpectralPropagator::new(&sy.matrix).unwrap();
            let mut top = DVector::<C64>::zeros(two_s as usize + 1);
            top[0] = C64::new(1.0, 0.0);
            let theta = 1.234;
            let oracle = prop.apply(&top, theta);
            let fast = rotated_site(two_s, theta);
            for (a, b) in oracle.iter().zip(fast) {
                assert_abs_diff_eq!(a.re, b, epsilon = 1e-13);
                assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn bloch_vector_of_initial_state() {
        let system = sys(2, 1);
        let (theta, phi) = (FRAC_PI_3, PI / 5.0);
        let state = initial_state(&system, theta, phi).unwrap();
        assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-14);
        let (sx, sy, sz) = build_spin_operators(1).unwrap();
        let n = Direction::new(theta, phi).unwrap().unit_vector();
        for site in 0..2 {
            for (op, expected) in [(&sx, n[0]), (&sy, n[1]), (&sz, n[2])] {
                let e = state.expectation(&embed_site_operator(op, site, &system).unwrap());
                assert_abs_diff_eq!(e.re, expected / 2.0, epsilon = 1e-10);
                assert_abs_diff_eq!(e.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn invalid_theta_rejected() {
        assert!(initial_state(&sys(2, 1), -0.1, 0.0).is_err());
        assert!(initial_state(&sys(2, 1), 3.2, 0.0).is_err());
    }

    #[test]
    fn ising_zero_chi_is_identity() {
        let system = sys(3, 3);
        let s = initial_state(&system, 0.7, 1.1).unwrap();
        assert_eq!(evolve_ising(&system, &s, 0.0).unwrap(), s);
    }

    #[test]
    fn ising_periodicity() {
        for (n, two_s) in [(2, 1), (3, 1), (4, 1), (2, 3), (3, 3)] {
            let system = sys(n, two_s);
            let s = initial_state(&system, 1.0, 0.4).unwrap();
            let back = evolve_ising(&system, &s, 2.0 * PI).unwrap();
            assert_abs_diff_eq!(back.fidelity(&s), 1.0, epsilon = 1e-12);
        }
        for (n, two_s) in [(2, 2), (3, 2), (2, 4)] {
            let system = sys(n, two_s);
            let s = initial_state(&system, 1.0, 0.4).unwrap();
            let back = evolve_ising(&system, &s, PI).unwrap();
            assert_abs_diff_eq!(back.fidelity(&s), 1.0, epsilon = 1e-12);
        }
        // not a period for half-integer spin
        let system = sys(2, 1);
        let s = initial_state(&system, 1.0, 0.4).unwrap();
        assert!(evolve_ising(&system, &s, PI).unwrap().fidelity(&s) < 0.99);
    }

    #[test]
    fn field_evolution_matches_ising_without_field() {
        let system = sys(3, 2);
        let field = FieldConfig::new(0.0, Direction::new(0.8, 0.1).unwrap()).unwrap();
        let s = initial_state(&system, 0.9, 2.1).unwrap();
        for chi in [0.0, 0.3, 2.7] {
            let a = evolve_ising(&system, &s, chi).unwrap();
            let b = evolve_with_field(&system, &field, &s, chi).unwrap();
            assert!(max_deviation(&a.amplitudes, &b.amplitudes) < 1e-10);
        }
    }

    #[test]
    fn field_evolution_is_unitary_and_reversible() {
        let system = sys(3, 2);
        let field = FieldConfig::new(1.7, Direction::new(1.2, 0.5).unwrap()).unwrap();
        let s = initial_state(&system, 0.9, 2.1).unwrap();
        let forward = evolve_with_field(&system, &field, &s, 1.3).unwrap();
        assert!(norm_defect(&forward) < 1e-10);
        let back = evolve_with_field(&system, &field, &forward, -1.3).unwrap();
        assert!(max_deviation(&back.amplitudes, &s.amplitudes) < 1e-10);
    }

    #[test]
    fn rational_z_field_closes_the_loop() {
        let z = Direction::z();
        let cases = [
            (sys(3, 1), FieldConfig::rational(3, 2, z).unwrap(), 2.0 * 2.0 * PI),
            (sys(2, 3), FieldConfig::rational(-1, 3, z).unwrap(), 3.0 * 2.0 * PI),
            (sys(3, 2), FieldConfig::rational(2, 3, z).unwrap(), 3.0 * PI),
        ];
        for (system, field, period) in cases {
            let s = initial_state(&system, 1.1, 0.3).unwrap();
            let back = evolve_with_field(&system, &field, &s, period).unwrap();
            assert_abs_diff_eq!(back.fidelity(&s), 1.0, epsilon = 1e-10);
            let spec = crate::ManifoldSpec::new(system, Some(field)).unwrap();
            assert_abs_diff_eq!(spec.chi_max(), period, epsilon = 1e-12);
        }
        // integer spin with odd p: q·π flips the parity sectors, 2qπ closes
        let system = sys(2, 2);
        let field = FieldConfig::rational(1, 1, z).unwrap();
        let s = initial_state(&system, 1.1, 0.3).unwrap();
        assert!(evolve_with_field(&system, &field, &s, PI).unwrap().fidelity(&s) < 0.99);
        assert_abs_diff_eq!(
            evolve_with_field(&system, &field, &s, 2.0 * PI).unwrap().fidelity(&s),
            1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn zero_field_scalar_products() {
        for (n, two_s) in [(2, 1), (3, 2), (4, 1), (2, 3)] {
            let system = sys(n, two_s);
            let family = StateFamily::new(&system, None).unwrap();
            let (nn, s) = (n as f64, system.spin());
            for theta in [0.0, 0.4, 1.3, 2.2, PI] {
                let point = CoordinatePoint::new(theta, 0.9, 1.7).unwrap();
                let (psi, t) = family.state_and_tangents(&point).unwrap();
                let c = theta.cos();
                let dphi = psi.amplitudes.dotc(&t.d_phi);
                let dtheta = psi.amplitudes.dotc(&t.d_theta);
                let dchi = psi.amplitudes.dotc(&t.d_chi);
                assert_abs_diff_eq!(dphi.re, 0.0, epsilon = 1e-10);
                assert_abs_diff_eq!(dphi.im, -nn * s * c, epsilon = 1e-10);
                assert_abs_diff_eq!(dtheta.norm(), 0.0, epsilon = 1e-10);
                assert_abs_diff_eq!(dchi.re, 0.0, epsilon = 1e-10);
                assert_abs_diff_eq!(dchi.im, -nn * (nn - 1.0) * s * s * c * c, epsilon = 1e-10);
            }
        }
    }
}

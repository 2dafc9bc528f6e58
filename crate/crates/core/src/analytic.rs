//! Closed-form geometry of the Ising state manifold.
//!
//! Everything here is a formula evaluation in `(N, s, J, γ)` and the coordinates;
//! nothing touches the Hilbert space. Write `K = 2(N−1)s` for the recurring
//! combination. The `(θ, χ)` submanifold at fixed `φ` carries the diagonal metric
//! `diag(g_θθ, g_χχ(θ))`, whose scalar curvature and cone angles at the poles follow
//! from the profile `g_χχ(θ)` alone.

use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use libm::{asin, cos, fabs, sin, sqrt};

use crate::error::{Error, Result};
use crate::fs_metric::MetricTensor;
use crate::quad;
use crate::spin_ops::{Direction, SpinSystem};

/// Central-difference step for `curvature_numeric_from_profile`.
pub const CURVATURE_FD_STEP: f64 = 1e-4;

/// Width of the neighbourhood of each pole cut out of the Gauss–Bonnet integral.
pub const POLE_EXCISION: f64 = 1e-4;

/// Magnetic field relative to the coupling: strength `h/J` and direction `n'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig {
    pub ratio_h_over_j: f64,
    pub direction: Direction,
    rational_ratio: Option<(i64, u64)>,
}

impl FieldConfig {
    pub fn new(ratio_h_over_j: f64, direction: Direction) -> Result<Self> {
        if !ratio_h_over_j.is_finite() {
            return Err(Error::Domain("h/J must be finite"));
        }
        Ok(Self {
            ratio_h_over_j,
            direction,
            rational_ratio: None,
        })
    }

    /// `h/J = p/q` with `p`, `q` coprime.
    pub fn rational(p: i64, q: u64, direction: Direction) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("denominator of h/J must be positive"));
        }
        Self::new(p as f64 / q as f64, direction)?.with_rational(p, q)
    }

    /// Declares that the stored ratio is exactly `p/q`.
    pub fn with_rational(mut self, p: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("denominator of h/J must be positive"));
        }
        if gcd(p.unsigned_abs(), q) != 1 {
            return Err(Error::Domain("p and q must be coprime"));
        }
        if fabs(p as f64 / q as f64 - self.ratio_h_over_j) > 1e-12 {
            return Err(Error::Domain("p/q does not match h/J"));
        }
        self.rational_ratio = Some((p, q));
        Ok(self)
    }

    pub fn rational_ratio(&self) -> Option<(i64, u64)> {
        self.rational_ratio
    }

    pub fn is_zero(&self) -> bool {
        self.ratio_h_over_j == 0.0
    }

    /// `true` when `n'` is `±z`.
    pub fn is_along_z(&self) -> bool {
        fabs(sin(self.direction.polar)) < 1e-12
    }

    /// `+1` for a field along `+z`, `−1` along `−z`.
    pub fn z_sign(&self) -> f64 {
        if cos(self.direction.polar) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// The two projections of `n'` onto the tangent plane at `n(θ, φ)`:
    /// `(n'·n(θ+π/2, φ), n'·n(π/2, φ+π/2))`.
    pub fn transverse_projections(&self, theta: f64, phi: f64) -> (f64, f64) {
        transverse_projections(&self.direction, theta, phi)
    }
}

pub fn transverse_projections(direction: &Direction, theta: f64, phi: f64) -> (f64, f64) {
    let (tp, pp) = (direction.polar, direction.azimuth);
    let along_theta = cos(theta) * sin(tp) * cos(phi - pp) - sin(theta) * cos(tp);
    let along_phi = -sin(tp) * sin(phi - pp);
    (along_theta, along_phi)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// The closed `(θ, χ)` manifold: a system plus the period of `χ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldSpec {
    sys: SpinSystem,
    field: Option<FieldConfig>,
    chi_max: f64,
}

impl ManifoldSpec {
    /// Zero-field manifold with `χ_max = 2π` (half-integer `s`) or `π` (integer `s`).
    pub fn zero_field(sys: SpinSystem) -> Self {
        Self {
            sys,
            field: None,
            chi_max: sys.chi_period(),
        }
    }

    /// Manifold for an optional field. A non-zero field must point along `±z` and carry
    /// a rational `h/J = p/q`; the period becomes `q χ_max`, or `2qπ` for integer `s`
    /// with odd `p` where `qπ` only returns the state up to the parity of `Σ m_j`.
    pub fn new(sys: SpinSystem, field: Option<FieldConfig>) -> Result<Self> {
        let field = match field {
            Some(f) if !f.is_zero() => f,
            _ => return Ok(Self::zero_field(sys)),
        };
        if !field.is_along_z() {
            return Err(Error::UnboundedChi);
        }
        let (p, q) = field.rational_ratio().ok_or(Error::UnboundedChi)?;
        let base = if !sys.is_half_integer() && p % 2 != 0 {
            2.0 * PI
        } else {
            sys.chi_period()
        };
        Ok(Self {
            sys,
            field: Some(field),
            chi_max: q as f64 * base,
        })
    }

    pub fn system(&self) -> &SpinSystem {
        &self.sys
    }

    pub fn field(&self) -> Option<&FieldConfig> {
        self.field.as_ref()
    }

    pub fn chi_max(&self) -> f64 {
        self.chi_max
    }

    /// `√(g_χχ/g_θθ) / θ` as `θ → 0` and as `θ → π`.
    pub fn cone_slopes(&self) -> (f64, f64) {
        let k = big_k(&self.sys);
        match self.field {
            None => (k, k),
            Some(f) => {
                let r = f.z_sign() * f.ratio_h_over_j;
                (fabs(k + r), fabs(k - r))
            }
        }
    }

    /// The curvature integral over the closed manifold, `χ_max` times the sum of the
    /// cone slopes (`4 χ_max (N−1) s` at zero field).
    pub fn expected_curvature_integral(&self) -> f64 {
        let (a, b) = self.cone_slopes();
        self.chi_max * (a + b)
    }
}

/// Extremal speeds over `θ` at zero field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedExtrema {
    pub v_min: f64,
    pub v_half_pi: f64,
    /// Location of the maximum in `(0, π/2]`; `π − theta_max` is the mirror maximum.
    pub theta_max: f64,
    pub v_max: f64,
}

/// Which solution of `sin²θ = sin²θ_max (1 ∓ √(1 − (v/v_max)²))` is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `θ ∈ [0, θ_max] ∪ [π − θ_max, π]`, `v ∈ [0, v_max]`.
    Upper,
    /// `θ ∈ [θ_max, π − θ_max]`, `v ∈ [v_{π/2}, v_max]`.
    Lower,
}

/// Initial-state position for [`special_case_speed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialCase {
    /// `θ ∈ {0, π}`.
    Pole,
    /// `θ = π/2`.
    Equator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinSpeedField {
    pub ratio_h_over_j: f64,
    pub v_min: f64,
    /// `true` when `n'·n(π/2, φ+π/2) = 0`, where the minimum is the global one.
    pub reduction_applied: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussBonnet {
    /// `∫ (R/2) √g dθ dχ` over the manifold with the poles cut out.
    pub integral: f64,
    /// Angular defect of the two cones.
    pub defect: f64,
    pub euler_characteristic: f64,
}

/// Quantities of the `J → J/N`, `N → ∞` limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoLimit {
    /// Curvature on the line `θ = π/2`: `−16/γ²`.
    pub curvature_line: f64,
    /// `s → ∞` curvature on the same line at finite `N`: `−16(N−1)/(γ² N)`.
    pub curvature_line_large_s: f64,
    /// `|J| γ s / √2`.
    pub v_half_pi: f64,
    /// `|J| γ s^{3/2} √N / √2`, diverging with `N`.
    pub v_max: f64,
    pub theta_max: f64,
    /// Factor on `g_χχ` after rescaling.
    pub g_chichi_factor: f64,
    /// Factor on `g_φχ` after rescaling.
    pub g_phichi_factor: f64,
}

fn big_k(sys: &SpinSystem) -> f64 {
    2.0 * (sys.n_sites() as f64 - 1.0) * sys.spin()
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain("theta must lie in [0, pi]"));
    }
    Ok(())
}

fn fold_theta(theta: f64) -> f64 {
    if theta > FRAC_PI_2 {
        PI - theta
    } else {
        theta
    }
}

/// Zero-field `g_χχ / γ²`.
fn chichi_bare(sys: &SpinSystem, theta: f64) -> f64 {
    let n = sys.n_sites() as f64;
    let s = sys.spin();
    let k = big_k(sys);
    let s2 = sin(theta) * sin(theta);
    n * (n - 1.0) * s * s * s2 * (k - (k - 0.5) * s2)
}

/// Fubini–Study metric of the zero-field family; depends on `θ` only.
pub fn metric_closed_form(sys: &SpinSystem, theta: f64) -> Result<MetricTensor> {
    check_theta(theta)?;
    let g2 = sys.gamma() * sys.gamma();
    let n = sys.n_sites() as f64;
    let s = sys.spin();
    let (st, ct) = (sin(theta), cos(theta));
    Ok(MetricTensor::from_components(
        g2 * n * s / 2.0,
        g2 * n * s / 2.0 * st * st,
        g2 * chichi_bare(sys, theta),
        0.0,
        0.0,
        g2 * n * (n - 1.0) * s * s * ct * st * st,
        sys.gamma(),
    ))
}

/// Fubini–Study metric with a field `h Σ S_j·n'`; reduces to [`metric_closed_form`] at `h = 0`.
pub fn metric_closed_form_field(sys: &SpinSystem, theta: f64, phi: f64, field: &FieldConfig) -> Result<MetricTensor> {
    check_theta(theta)?;
    let g2 = sys.gamma() * sys.gamma();
    let n = sys.n_sites() as f64;
    let s = sys.spin();
    let r = field.ratio_h_over_j;
    let (a, b) = field.transverse_projections(theta, phi);
    let (st, ct) = (sin(theta), cos(theta));
    let pair = n * (n - 1.0) * s * s;

    let g_chichi = g2 * chichi_bare(sys, theta) + g2 * r * r * n * s / 2.0 * (a * a + b * b)
        - 2.0 * g2 * r * pair * a * ct * st;
    let g_thetachi = g2 * r * n * s / 2.0 * b;
    let g_phichi = g2 * pair * ct * st * st - g2 * r * n * s / 2.0 * a * st;
    Ok(MetricTensor::from_components(
        g2 * n * s / 2.0,
        g2 * n * s / 2.0 * st * st,
        g_chichi,
        0.0,
        g_thetachi,
        g_phichi,
        sys.gamma(),
    ))
}

/// Scalar curvature of the `(θ, χ)` submanifold at zero field.
///
/// The poles are conical for every system except `N = 2, s = 1/2` and yield
/// [`Error::SingularPoint`] there; [`scalar_curvature_limit`] gives the limiting value.
pub fn scalar_curvature(sys: &SpinSystem, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let smooth = sys.n_sites() == 2 && sys.two_s() == 1;
    if !smooth && (theta == 0.0 || theta == PI) {
        return Err(Error::SingularPoint { theta });
    }
    Ok(scalar_curvature_limit(sys, theta))
}

/// The curvature formula without the pole check; at `θ ∈ {0, π}` this is the limit
/// approached from the interior.
pub fn scalar_curvature_limit(sys: &SpinSystem, theta: f64) -> f64 {
    let n = sys.n_sites() as f64;
    let s = sys.spin();
    let k = big_k(sys);
    let c = cos(fold_theta(theta));
    let c2 = c * c;
    let a = 2.0 * k - 1.0;
    let den = a * c2 + 1.0;
    8.0 / (sys.gamma() * sys.gamma() * n * s) * (2.0 - (a * c2 + k + 1.0) / (den * den))
}

/// Curvature at `θ = π/2`, the minimum over `θ`.
pub fn curvature_min(sys: &SpinSystem) -> f64 {
    let n = sys.n_sites() as f64;
    let s = sys.spin();
    8.0 / (sys.gamma() * sys.gamma() * n * s) * (1.0 - 2.0 * (n - 1.0) * s)
}

/// Scalar curvature of `diag(g_θθ, g_χχ(θ))` with the `θ` derivatives of `g_χχ` taken
/// by five-point central differences.
pub fn curvature_numeric_from_profile<F>(g_thetatheta: f64, g_chichi: F, theta: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    curvature_numeric_from_profile_with_step(g_thetatheta, g_chichi, theta, CURVATURE_FD_STEP)
}

pub fn curvature_numeric_from_profile_with_step<F>(
    g_thetatheta: f64,
    g_chichi: F,
    theta: f64,
    step: f64,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let h = step;
    let mut g = [0.0; 5];
    for (i, slot) in g.iter_mut().enumerate() {
        let t = theta + (i as f64 - 2.0) * h;
        let value = g_chichi(t);
        if value.is_nan() || value <= 0.0 {
            return Err(Error::NonPositiveMetric { theta: t, value });
        }
        *slot = value;
    }
    let first = (g[0] - 8.0 * g[1] + 8.0 * g[3] - g[4]) / (12.0 * h);
    let second = (-g[0] + 16.0 * g[1] - 30.0 * g[2] + 16.0 * g[3] - g[4]) / (12.0 * h * h);
    let riemann = -0.5 * second + first * first / (4.0 * g[2]);
    Ok(2.0 * riemann / (g_thetatheta * g[2]))
}

/// Curvature of the field-along-`z` manifold, where only the numeric route exists.
pub fn field_curvature(sys: &SpinSystem, field: &FieldConfig, theta: f64) -> Result<f64> {
    if !field.is_zero() && !field.is_along_z() {
        return Err(Error::Domain("curvature is only available for a field along z"));
    }
    let g_tt = metric_closed_form(sys, FRAC_PI_2)?.g_theta_theta();
    let step = CURVATURE_FD_STEP.min(theta / 3.0).min((PI - theta) / 3.0);
    curvature_numeric_from_profile_with_step(g_tt, |t| field_chichi(sys, field, t), theta, step)
}

fn field_chichi(sys: &SpinSystem, field: &FieldConfig, theta: f64) -> f64 {
    metric_closed_form_field(sys, theta.clamp(0.0, PI), 0.0, field)
        .map(|g| g.g_chi_chi())
        .unwrap_or(f64::NAN)
}

/// Total angular defect of the two conical poles.
pub fn angular_defect(spec: &ManifoldSpec) -> f64 {
    let (north, south) = spec.cone_slopes();
    (2.0 * PI - north * spec.chi_max()) + (2.0 * PI - south * spec.chi_max())
}

/// Gauss–Bonnet bookkeeping: curvature integral with the poles excised plus the
/// analytic defect, divided by `2π`.
pub fn gauss_bonnet_euler(spec: &ManifoldSpec) -> Result<GaussBonnet> {
    let sys = *spec.system();
    let g_tt = metric_closed_form(&sys, FRAC_PI_2)?.g_theta_theta();
    let integrand = |theta: f64| -> Result<f64> {
        let (curvature, g_cc) = match spec.field() {
            None => (
                scalar_curvature_limit(&sys, theta),
                metric_closed_form(&sys, theta)?.g_chi_chi(),
            ),
            Some(f) => (field_curvature(&sys, f, theta)?, field_chichi(&sys, f, theta)),
        };
        Ok(0.5 * curvature * sqrt(g_tt * g_cc))
    };
    // the field integrand comes from finite differences with ~1e-8 relative noise
    let tol = if spec.field().is_some() { 1e-7 } else { 1e-11 };
    let theta_part = quad::adaptive_simpson(integrand, POLE_EXCISION, PI - POLE_EXCISION, tol)?;
    // integrand carries no χ dependence
    let integral = theta_part * spec.chi_max();
    let defect = angular_defect(spec);
    Ok(GaussBonnet {
        integral,
        defect,
        euler_characteristic: (integral + defect) / (2.0 * PI),
    })
}

/// `v = |J| √g_χχ` at zero field.
pub fn speed_closed_form(sys: &SpinSystem, theta: f64) -> Result<f64> {
    Ok(fabs(sys.coupling()) * sqrt(metric_closed_form(sys, theta)?.g_chi_chi().max(0.0)))
}

/// `v = |J| √g_χχ` with the field-dressed metric.
pub fn speed_closed_form_field(sys: &SpinSystem, theta: f64, phi: f64, field: &FieldConfig) -> Result<f64> {
    let g = metric_closed_form_field(sys, theta, phi, field)?.g_chi_chi();
    Ok(fabs(sys.coupling()) * sqrt(g.max(0.0)))
}

pub fn speed_extrema(sys: &SpinSystem) -> SpeedExtrema {
    let n = sys.n_sites() as f64;
    let s = sys.spin();
    let k = big_k(sys);
    let scale = fabs(sys.coupling()) * sys.gamma();
    let v_half_pi = scale * s * sqrt(n * (n - 1.0) / 2.0);
    let sin2_max = ((n - 1.0) * s / (k - 0.5)).min(1.0);
    let v_max = scale * (n - 1.0) * s * s * sqrt(n * (n - 1.0) / (k - 0.5));
    SpeedExtrema {
        v_min: 0.0,
        v_half_pi,
        theta_max: asin(sqrt(sin2_max)),
        v_max,
    }
}

/// Branch of the speed–curvature relation that contains `θ`.
pub fn branch_of(sys: &SpinSystem, theta: f64) -> Branch {
    let t = speed_extrema(sys).theta_max;
    if theta <= t || theta >= PI - t {
        Branch::Upper
    } else {
        Branch::Lower
    }
}

/// `R(v)` on the requested branch.
pub fn curvature_from_speed(sys: &SpinSystem, v: f64, branch: Branch) -> Result<f64> {
    let ext = speed_extrema(sys);
    let slack = 1e-12 * ext.v_max.max(1.0);
    let lo = match branch {
        Branch::Upper => 0.0,
        Branch::Lower => ext.v_half_pi,
    };
    if !(v >= lo - slack && v <= ext.v_max + slack) {
        return Err(Error::OutOfRange { v, lo, hi: ext.v_max });
    }
    let n = sys.n_sites() as f64;
    let s = sys.spin();
    let k = big_k(sys);
    let ratio = if ext.v_max > 0.0 { v / ext.v_max } else { 0.0 };
    let root = sqrt((1.0 - ratio * ratio).max(0.0));
    let root = match branch {
        Branch::Upper => root,
        Branch::Lower => -root,
    };
    let den = 1.0 + root;
    Ok(8.0 / (sys.gamma() * sys.gamma() * n * s) * (2.0 - (2.0 + root) / (k * den * den)))
}

/// `J → J/N`.
pub fn rescaled_system(sys: &SpinSystem) -> SpinSystem {
    // finite coupling divided by N ≥ 2 stays finite
    sys.with_coupling(sys.coupling() / sys.n_sites() as f64)
        .expect("rescaled coupling is finite")
}

pub fn thermo_limit(sys: &SpinSystem) -> ThermoLimit {
    let n = sys.n_sites() as f64;
    let s = sys.spin();
    let g2 = sys.gamma() * sys.gamma();
    let scale = fabs(sys.coupling()) * sys.gamma();
    ThermoLimit {
        curvature_line: -16.0 / g2,
        curvature_line_large_s: -16.0 * (n - 1.0) / (g2 * n),
        v_half_pi: scale * s / core::f64::consts::SQRT_2,
        v_max: scale * s * sqrt(s) * sqrt(n) / core::f64::consts::SQRT_2,
        theta_max: FRAC_PI_4,
        g_chichi_factor: 1.0 / (n * n),
        g_phichi_factor: 1.0 / n,
    }
}

/// Leading large-`N` speed profile `|J| γ s^{3/2} √N sin 2θ / √2` (rescaled coupling).
pub fn thermo_speed_profile(sys: &SpinSystem, theta: f64) -> f64 {
    let s = sys.spin();
    fabs(sys.coupling()) * sys.gamma() * s * sqrt(s) * sqrt(sys.n_sites() as f64) * sin(2.0 * theta)
        / core::f64::consts::SQRT_2
}

/// Field strength minimising the speed for a given initial state and field direction.
pub fn min_speed_field(sys: &SpinSystem, theta: f64, phi: f64, direction: &Direction) -> Result<MinSpeedField> {
    check_theta(theta)?;
    let (a, b) = transverse_projections(direction, theta, phi);
    let norm2 = a * a + b * b;
    if norm2 < 1e-24 {
        return Err(Error::DegenerateDirection);
    }
    let n = sys.n_sites() as f64;
    let s = sys.spin();
    let (st, s2t) = (sin(theta), sin(2.0 * theta));
    let ratio = (n - 1.0) * s * s2t * a / norm2;
    let inner = st * st * st * st + (n - 1.0) * s * s2t * s2t * b * b / norm2;
    let v_min = fabs(sys.coupling()) * sys.gamma() * s * sqrt(n * (n - 1.0) / 2.0) * sqrt(inner.max(0.0));
    Ok(MinSpeedField {
        ratio_h_over_j: ratio,
        v_min,
        reduction_applied: fabs(b) < 1e-12,
    })
}

pub fn special_case_speed(sys: &SpinSystem, case: SpecialCase, field: &FieldConfig, phi: f64) -> f64 {
    let n = sys.n_sites() as f64;
    let s = sys.spin();
    let r = field.ratio_h_over_j;
    let scale = fabs(sys.coupling()) * sys.gamma() * sqrt(n * s / 2.0);
    let (tp, pp) = (field.direction.polar, field.direction.azimuth);
    match case {
        SpecialCase::Pole => scale * fabs(r) * sin(tp),
        SpecialCase::Equator => {
            let c = sin(tp) * cos(pp - phi);
            scale * sqrt((n - 1.0) * s + r * r * (1.0 - c * c))
        }
    }
}

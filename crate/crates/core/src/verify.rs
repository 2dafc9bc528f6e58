//! Oracle-versus-closed-form sweeps collected into a [`VerificationReport`].
//!
//! Each check walks a grid, compares two independent evaluations of the same quantity
//! and keeps the worst deviation. A failed comparison, or an error raised while
//! evaluating, becomes a failing record; nothing is skipped silently. Everything runs
//! sequentially in a fixed order, so identical configurations give identical reports.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use libm::{fabs, sqrt};
use nalgebra::DVector;

use crate::analytic::{
    self, branch_of, curvature_from_speed, curvature_min, curvature_numeric_from_profile, gauss_bonnet_euler,
    metric_closed_form, metric_closed_form_field, rescaled_system, scalar_curvature, special_case_speed,
    speed_closed_form, speed_closed_form_field, speed_extrema, FieldConfig, ManifoldSpec, SpecialCase,
};
use crate::error::{Error, Result};
use crate::evolution::{CoordinatePoint, SpectralPropagator, StateFamily, StateVector, TangentStates};
use crate::fs_metric::{energy_uncertainty, metric_from_tangents, metric_on_family, speed_on_family, time_metric};
use crate::spin_ops::{build_field_hamiltonian, build_hamiltonian_with_strength, build_ising_hamiltonian, Direction, SpinSystem};
use crate::C64;

/// Absolute deviations below this times the check's largest magnitude always pass, and
/// are left out of `max_rel`.
pub const ABS_FLOOR: f64 = 1e-12;

pub const METRIC_TOL: f64 = 1e-9;
pub const SPEED_TOL: f64 = 1e-9;
pub const TOPOLOGY_TOL: f64 = 1e-3;
pub const FIELD_SPEED_TOL: f64 = 1e-9;
pub const PROFILE_CURVATURE_TOL: f64 = 1e-6;
pub const BRANCH_CURVATURE_TOL: f64 = 1e-9;
pub const THERMO_CURVATURE_TOL: f64 = 1e-2;
pub const THERMO_THETA_TOL: f64 = 1e-3;
pub const GAUGE_TOL: f64 = 1e-9;

/// Minimum `√(1 − (v/v_max)²)` for the speed–curvature round trip.
pub const BRANCH_FOLD_EXCLUSION: f64 = 1e-2;

/// Coarse grouping of checks, used for filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckCategory {
    Metric,
    Speed,
    Topology,
    FieldSpeeds,
    Curvature,
    Thermo,
    Gauge,
}

impl CheckCategory {
    pub const ALL: [CheckCategory; 7] = [
        CheckCategory::Metric,
        CheckCategory::Speed,
        CheckCategory::Topology,
        CheckCategory::FieldSpeeds,
        CheckCategory::Curvature,
        CheckCategory::Thermo,
        CheckCategory::Gauge,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CheckCategory::Metric => "metric",
            CheckCategory::Speed => "speed",
            CheckCategory::Topology => "topology",
            CheckCategory::FieldSpeeds => "field_speeds",
            CheckCategory::Curvature => "curvature",
            CheckCategory::Thermo => "thermo",
            CheckCategory::Gauge => "gauge",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub category: CheckCategory,
    pub grid: String,
    pub max_abs: f64,
    pub max_rel: f64,
    pub tol: f64,
    pub pass: bool,
    /// Evaluation error that aborted the check, if any.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub records: Vec<CheckRecord>,
    pub disabled: Vec<CheckCategory>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }
}

/// How a tolerance is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Relative,
    Absolute,
}

/// Worst-case accumulator for one check. In relative mode the absolute floor scales
/// with the largest magnitude seen by the check, so round-off around exact zeros of a
/// large quantity does not count as a failure. The floor never exceeds the tolerance.
#[derive(Debug, Clone)]
struct Deviation {
    mode: Mode,
    tol: f64,
    pairs: Vec<(f64, f64, Mode)>,
    failed: bool,
}

impl Deviation {
    fn relative(tol: f64) -> Self {
        Self::with_mode(Mode::Relative, tol)
    }

    fn absolute(tol: f64) -> Self {
        Self::with_mode(Mode::Absolute, tol)
    }

    fn with_mode(mode: Mode, tol: f64) -> Self {
        Self {
            mode,
            tol,
            pairs: Vec::new(),
            failed: false,
        }
    }

    fn add(&mut self, got: f64, expected: f64) {
        self.add_with(self.mode, got, expected);
    }

    fn add_with(&mut self, mode: Mode, got: f64, expected: f64) {
        if !got.is_finite() || !expected.is_finite() {
            self.failed = true;
            return;
        }
        self.pairs.push((got, expected, mode));
    }

    fn fail(&mut self) {
        self.failed = true;
    }

    fn summary(&self) -> (f64, f64, bool) {
        let scale = self
            .pairs
            .iter()
            .fold(1.0f64, |m, &(a, b, _)| m.max(fabs(a)).max(fabs(b)));
        let floor = ABS_FLOOR.min(self.tol) * scale;
        let (mut max_abs, mut max_rel, mut ok) = (0.0f64, 0.0f64, !self.failed && !self.pairs.is_empty());
        for &(a, b, mode) in &self.pairs {
            let abs = fabs(a - b);
            let rel = abs / fabs(a).max(fabs(b)).max(1e-12);
            max_abs = max_abs.max(abs);
            if abs > floor {
                max_rel = max_rel.max(rel);
            }
            ok &= match mode {
                Mode::Relative => abs <= floor || rel <= self.tol,
                Mode::Absolute => abs <= self.tol,
            };
        }
        (max_abs, max_rel, ok)
    }

    fn into_record(self, name: String, category: CheckCategory, grid: String) -> CheckRecord {
        let (max_abs, max_rel, pass) = self.summary();
        CheckRecord {
            name,
            category,
            grid,
            max_abs,
            max_rel,
            tol: self.tol,
            pass,
            error: None,
        }
    }
}

fn finish(
    result: Result<Deviation>,
    name: String,
    category: CheckCategory,
    grid: String,
    tol: f64,
) -> CheckRecord {
    match result {
        Ok(dev) => dev.into_record(name, category, grid),
        Err(e) => CheckRecord {
            name,
            category,
            grid,
            max_abs: 0.0,
            max_rel: 0.0,
            tol,
            pass: false,
            error: Some(e.to_string()),
        },
    }
}

fn system_tag(sys: &SpinSystem) -> String {
    if sys.is_half_integer() {
        format!("N={} s={}/2", sys.n_sites(), sys.two_s())
    } else {
        format!("N={} s={}", sys.n_sites(), sys.two_s() / 2)
    }
}

/// Sample positions for coordinate sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    /// `χ` samples per system, spread over `[0, χ_max)`.
    pub chi_samples: usize,
    pub fields: Vec<FieldConfig>,
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    return hi;
                }
                let t = i as f64 / (n - 1) as f64;
                lo + (hi - lo) * t
            })
            .collect(),
    }
}

/// `n` evenly spaced points on `[0, period)`.
pub fn periodic_samples(period: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| period * (i as f64 / n as f64)).collect()
}

impl SweepGrid {
    /// `n_theta` points on `[0.05, π − 0.05]`, optionally plus the poles, `n_phi` on
    /// `[0, 2π)` and `n_chi` on `[0, χ_max)`.
    pub fn new(n_theta: usize, n_phi: usize, n_chi: usize, with_poles: bool) -> Self {
        let mut thetas = Vec::with_capacity(n_theta + 2);
        if with_poles {
            thetas.push(0.0);
        }
        thetas.extend(linspace(0.05, PI - 0.05, n_theta));
        if with_poles {
            thetas.push(PI);
        }
        Self {
            thetas,
            phis: periodic_samples(2.0 * PI, n_phi),
            chi_samples: n_chi,
            fields: Vec::new(),
        }
    }

    pub fn with_fields(mut self, fields: Vec<FieldConfig>) -> Self {
        self.fields = fields;
        self
    }

    pub fn describe(&self) -> String {
        let mut out = format!("{}x{}x{} (theta,phi,chi)", self.thetas.len(), self.phis.len(), self.chi_samples);
        if !self.fields.is_empty() {
            out.push_str(&format!(" x {} fields", self.fields.len()));
        }
        out
    }

    fn chis(&self, sys: &SpinSystem, field: Option<&FieldConfig>) -> Vec<f64> {
        let period = match field {
            None => sys.chi_period(),
            Some(f) => ManifoldSpec::new(*sys, Some(*f)).map(|m| m.chi_max()).unwrap_or(PI),
        };
        periodic_samples(period, self.chi_samples)
    }

    fn points(&self, sys: &SpinSystem, field: Option<&FieldConfig>) -> Result<Vec<CoordinatePoint>> {
        let mut out = Vec::new();
        for &theta in &self.thetas {
            for &phi in &self.phis {
                for chi in self.chis(sys, field) {
                    out.push(CoordinatePoint::new(theta, phi, chi)?);
                }
            }
        }
        Ok(out)
    }

    fn field_cases(&self) -> Vec<Option<&FieldConfig>> {
        if self.fields.is_empty() {
            alloc::vec![None]
        } else {
            self.fields.iter().map(Some).collect()
        }
    }
}

/// `n_polar × n_azimuth` field directions with fixed `h/J`: polar angles on `[0, π]`,
/// azimuths on `[0, 2π)`.
pub fn direction_grid(ratio_h_over_j: f64, n_polar: usize, n_azimuth: usize) -> Result<Vec<FieldConfig>> {
    let mut out = Vec::with_capacity(n_polar * n_azimuth);
    for polar in linspace(0.0, PI, n_polar) {
        for azimuth in periodic_samples(2.0 * PI, n_azimuth) {
            out.push(FieldConfig::new(ratio_h_over_j, Direction::new(polar, azimuth)?)?);
        }
    }
    Ok(out)
}

/// Numeric metric against the closed form at every grid point (all six components),
/// plus positive semidefiniteness.
pub fn run_metric_equivalence(sys: &SpinSystem, grid: &SweepGrid, tol: f64) -> CheckRecord {
    let name = format!(
        "metric_equivalence {}{}",
        system_tag(sys),
        if grid.fields.is_empty() { "" } else { " field" }
    );
    let result = (|| {
        let mut dev = Deviation::relative(tol);
        for field in grid.field_cases() {
            let family = StateFamily::new(sys, field)?;
            for point in grid.points(sys, field)? {
                let numeric = metric_on_family(&family, &point)?;
                let closed = match field {
                    None => metric_closed_form(sys, point.theta)?,
                    Some(f) => metric_closed_form_field(sys, point.theta, point.phi, f)?,
                };
                for (a, b) in numeric.independent().iter().zip(closed.independent()) {
                    dev.add(*a, b);
                }
                if !numeric.is_positive_semidefinite() {
                    dev.fail();
                }
            }
        }
        Ok(dev)
    })();
    finish(result, name, CheckCategory::Metric, grid.describe(), tol)
}

/// `|J| √g_χχ` from the tangent vectors against `γ ΔE` of the full Hamiltonian. Both
/// sides are compared squared: they are computed as quadratic forms, and the square
/// root would turn round-off at zero speed into `√ε`.
pub fn run_speed_uncertainty_identity(sys: &SpinSystem, grid: &SweepGrid, tol: f64) -> CheckRecord {
    let name = format!(
        "speed_uncertainty {}{}",
        system_tag(sys),
        if grid.fields.is_empty() { "" } else { " field" }
    );
    let result = (|| {
        let mut dev = Deviation::relative(tol);
        for field in grid.field_cases() {
            let family = StateFamily::new(sys, field)?;
            let hamiltonian = match field {
                None => build_ising_hamiltonian(sys)?,
                Some(f) => build_field_hamiltonian(sys, f)?,
            };
            for point in grid.points(sys, field)? {
                let v = speed_on_family(&family, &point)?;
                let state = family.state(&point)?;
                let spread = sys.gamma() * energy_uncertainty(&state, &hamiltonian)?;
                dev.add(v * v, spread * spread);
            }
        }
        Ok(dev)
    })();
    finish(result, name, CheckCategory::Speed, grid.describe(), tol)
}

/// The speed identity with `J = 0`: only the field acts, `χ` is meaningless, and the
/// trajectory is parametrised by time. Compares `γ √g_tt`, `γ ΔE` and
/// `γ |h| √(Ns/2) √(1 − (n·n')²)`.
pub fn run_speed_uncertainty_zero_coupling(n_sites: usize, two_s: u32, h: f64, tol: f64) -> CheckRecord {
    let name = format!("speed_uncertainty zero-coupling N={n_sites} 2s={two_s} h={h}");
    let grid = String::from("theta in {0, 0.4, pi/2, 2.5} x t in {0, 0.7, 3.1}, n' = x");
    let result = (|| {
        let sys = SpinSystem::new(n_sites, two_s, 0.0)?.with_gamma(core::f64::consts::SQRT_2)?;
        let direction = Direction::new(FRAC_PI_2, 0.0)?;
        let hamiltonian = build_hamiltonian_with_strength(&sys, h, &direction)?;
        let propagator = SpectralPropagator::new(&hamiltonian.matrix)?;
        let family = StateFamily::new(&sys, None)?;
        let n_s = n_sites as f64 * sys.spin();
        let mut dev = Deviation::relative(tol);
        for theta in [0.0, 0.4, FRAC_PI_2, 2.5] {
            let start = family.state(&CoordinatePoint::new(theta, 0.3, 0.0)?)?;
            let n = Direction::new(theta, 0.3)?.unit_vector();
            let along = n[0];
            let expected = sys.gamma() * fabs(h) * sqrt(n_s / 2.0) * sqrt((1.0 - along * along).max(0.0));
            for t in [0.0, 0.7, 3.1] {
                let state = StateVector::new(propagator.apply(&start.amplitudes, t));
                let metric_side = sys.gamma() * sqrt(time_metric(&state, &hamiltonian).max(0.0));
                let uncertainty_side = sys.gamma() * energy_uncertainty(&state, &hamiltonian)?;
                dev.add(metric_side * metric_side, uncertainty_side * uncertainty_side);
                dev.add(metric_side * metric_side, expected * expected);
            }
        }
        Ok(dev)
    })();
    finish(result, name, CheckCategory::Speed, grid, tol)
}

/// Euler characteristic 2 and the expected curvature integral, one record per manifold.
pub fn run_topology_suite(specs: &[ManifoldSpec], tol: f64) -> Vec<CheckRecord> {
    specs
        .iter()
        .map(|spec| {
            let sys = spec.system();
            let mut name = format!("topology {}", system_tag(sys));
            if let Some(f) = spec.field() {
                name.push_str(&format!(" h/J={} z", f.ratio_h_over_j));
            }
            let grid = format!(
                "theta in [1e-4, pi-1e-4] adaptive, chi in [0, {:.6}]",
                spec.chi_max()
            );
            let result = (|| {
                let gb = gauss_bonnet_euler(spec)?;
                let mut dev = Deviation::absolute(tol);
                dev.add(gb.euler_characteristic, 2.0);
                dev.add_with(Mode::Relative, gb.integral, spec.expected_curvature_integral());
                if spec.field().is_none() {
                    // defect from the near-pole cone: 2(2π − 2(N−1)s χ_max)
                    let n = sys.n_sites() as f64;
                    let direct = 2.0 * (2.0 * PI - 2.0 * (n - 1.0) * sys.spin() * spec.chi_max());
                    dev.add_with(Mode::Relative, gb.defect, direct);
                }
                Ok(dev)
            })();
            finish(result, name, CheckCategory::Topology, grid, tol)
        })
        .collect()
}

fn field_speeds_system() -> Result<SpinSystem> {
    SpinSystem::new(4, 2, 1.0)
}

/// The worked speeds for `N = 4, s = 1, h/J = 1`: poles, equator, and the `θ = π/4`
/// minimum and maximum, each against the field-dressed closed form and the numeric
/// oracle. Runs at two `(J, γ)` settings to exercise the prefactor.
pub fn run_field_speed_vectors(tol: f64) -> Vec<CheckRecord> {
    type Case = (&'static str, &'static str, fn(&SpinSystem, f64) -> Result<Vec<(f64, f64, FieldConfig, f64)>>);
    let cases: [Case; 5] = [
        ("field_speeds pole", "theta in {0, pi} x theta' in {0, pi/6, pi/2, 2pi/3, pi}", |sys, phi| {
            let mut out = Vec::new();
            for theta in [0.0, PI] {
                for tp in [0.0, PI / 6.0, FRAC_PI_2, 2.0 * PI / 3.0, PI] {
                    let f = FieldConfig::new(1.0, Direction::new(tp, 1.3)?)?;
                    out.push((theta, phi, f, special_case_speed(sys, SpecialCase::Pole, &f, phi)));
                }
            }
            Ok(out)
        }),
        ("field_speeds equator", "theta = pi/2 x 4x4 field directions", |sys, phi| {
            let mut out = Vec::new();
            for tp in [0.0, 0.7, FRAC_PI_2, 2.6] {
                for pp in [phi, phi + 0.5, phi + FRAC_PI_2, phi + PI] {
                    let f = FieldConfig::new(1.0, Direction::new(tp, pp)?)?;
                    out.push((FRAC_PI_2, phi, f, special_case_speed(sys, SpecialCase::Equator, &f, phi)));
                }
            }
            Ok(out)
        }),
        ("field_speeds equator maximum", "theta = pi/2, theta' in {0, pi}", |sys, phi| {
            let n = sys.n_sites() as f64;
            let s = sys.spin();
            let expected = fabs(sys.coupling()) * sys.gamma() * sqrt(n * s / 2.0) * sqrt((n - 1.0) * s + 1.0);
            let mut out = Vec::new();
            for tp in [0.0, PI] {
                out.push((FRAC_PI_2, phi, FieldConfig::new(1.0, Direction::new(tp, 0.4)?)?, expected));
            }
            Ok(out)
        }),
        ("field_speeds v_min", "theta = pi/4, theta' = 3pi/4, phi' = phi", |sys, phi| {
            let expected = fabs(sys.coupling()) * sys.gamma() * sqrt(19.0 / 2.0);
            let f = FieldConfig::new(1.0, Direction::new(3.0 * FRAC_PI_4, phi)?)?;
            Ok(alloc::vec![(FRAC_PI_4, phi, f, expected)])
        }),
        ("field_speeds v_max", "theta = pi/4, theta' = pi/4, phi' = phi - pi", |sys, phi| {
            let expected = fabs(sys.coupling()) * sys.gamma() * sqrt(67.0 / 2.0);
            let f = FieldConfig::new(1.0, Direction::new(FRAC_PI_4, phi + PI)?)?;
            Ok(alloc::vec![(FRAC_PI_4, phi, f, expected)])
        }),
    ];

    cases
        .iter()
        .map(|(name, grid, build)| {
            let result = (|| {
                let mut dev = Deviation::relative(tol);
                let base = field_speeds_system()?;
                for (j, gamma) in [(1.0, 1.0), (-2.5, core::f64::consts::SQRT_2)] {
                    let sys = base.with_coupling(j)?.with_gamma(gamma)?;
                    let phi = 0.7;
                    for (theta, phi, field, expected) in build(&sys, phi)? {
                        let closed = speed_closed_form_field(&sys, theta, phi, &field)?;
                        let family = StateFamily::new(&sys, Some(&field))?;
                        let numeric = speed_on_family(&family, &CoordinatePoint::new(theta, phi, 0.9)?)?;
                        dev.add(closed * closed, expected * expected);
                        dev.add(numeric * numeric, expected * expected);
                    }
                }
                Ok(dev)
            })();
            finish(result, String::from(*name), CheckCategory::FieldSpeeds, String::from(*grid), tol)
        })
        .collect()
}

/// Finite-difference curvature of the zero-field profile against the closed form on
/// `[0.1, π − 0.1]`, and the speed–curvature relation composed with the speed.
pub fn run_curvature_crosscheck(sys: &SpinSystem, profile_tol: f64, branch_tol: f64) -> Vec<CheckRecord> {
    let tag = system_tag(sys);
    let thetas = linspace(0.1, PI - 0.1, 201);
    let profile = (|| {
        let mut dev = Deviation::absolute(profile_tol);
        let g_tt = metric_closed_form(sys, FRAC_PI_2)?.g_theta_theta();
        let g_cc = |t: f64| metric_closed_form(sys, t.clamp(0.0, PI)).map(|g| g.g_chi_chi()).unwrap_or(f64::NAN);
        for &theta in &thetas {
            dev.add(curvature_numeric_from_profile(g_tt, g_cc, theta)?, scalar_curvature(sys, theta)?);
        }
        Ok(dev)
    })();
    let branch = (|| {
        let mut dev = Deviation::relative(branch_tol);
        let v_max = speed_extrema(sys).v_max;
        for theta in linspace(1e-3, PI - 1e-3, 401) {
            let v = speed_closed_form(sys, theta)?;
            // R(v) has a 1/r slope at the fold; stay where r = √(1 − (v/v_max)²) ≥ 1e-2
            let ratio = v / v_max;
            if 1.0 - ratio * ratio < BRANCH_FOLD_EXCLUSION * BRANCH_FOLD_EXCLUSION {
                continue;
            }
            dev.add(curvature_from_speed(sys, v, branch_of(sys, theta))?, scalar_curvature(sys, theta)?);
        }
        Ok(dev)
    })();
    alloc::vec![
        finish(
            profile,
            format!("curvature_profile_fd {tag}"),
            CheckCategory::Curvature,
            String::from("201 theta in [0.1, pi-0.1], step 1e-4"),
            profile_tol,
        ),
        finish(
            branch,
            format!("curvature_from_speed {tag}"),
            CheckCategory::Curvature,
            String::from("401 theta in [1e-3, pi-1e-3] with sqrt(1-(v/v_max)^2) >= 1e-2"),
            branch_tol,
        ),
    ]
}

/// Large-`N` limits of the rescaled model evaluated at finite `n_sites`.
pub fn run_thermo_limit(n_sites: usize, two_s: u32, curvature_tol: f64, theta_tol: f64) -> Vec<CheckRecord> {
    let grid = format!("N = {n_sites}, 2s = {two_s}, formulas only");
    let curvature = (|| {
        let sys = rescaled_system(&SpinSystem::with_limit(n_sites, two_s, 1.0, usize::MAX)?);
        let mut dev = Deviation::absolute(curvature_tol);
        dev.add(curvature_min(&sys), analytic::thermo_limit(&sys).curvature_line);
        Ok(dev)
    })();
    let theta = (|| {
        let sys = rescaled_system(&SpinSystem::with_limit(n_sites, two_s, 1.0, usize::MAX)?);
        let mut dev = Deviation::absolute(theta_tol);
        dev.add(speed_extrema(&sys).theta_max, analytic::thermo_limit(&sys).theta_max);
        Ok(dev)
    })();
    alloc::vec![
        finish(curvature, String::from("thermo curvature_min"), CheckCategory::Thermo, grid.clone(), curvature_tol),
        finish(theta, String::from("thermo theta_max"), CheckCategory::Thermo, grid, theta_tol),
    ]
}

/// Multiplies the family by `e^{iα}`, `α = 0.37 θ + 0.11 χ`, and checks that the metric
/// does not move.
pub fn run_gauge_invariance(sys: &SpinSystem, field: Option<&FieldConfig>, tol: f64) -> CheckRecord {
    let name = format!("gauge_invariance {}{}", system_tag(sys), if field.is_some() { " field" } else { "" });
    let grid = SweepGrid::new(7, 3, 3, false);
    let result = (|| {
        let family = StateFamily::new(sys, field)?;
        let mut dev = Deviation::relative(tol);
        for point in grid.points(sys, field)? {
            let (psi, tangents) = family.state_and_tangents(&point)?;
            let plain = metric_from_tangents(&psi, &tangents, sys.gamma());
            let (shifted_psi, shifted_tangents) = inject_phase(&psi, &tangents, &point, 0.37, 0.0, 0.11);
            let shifted = metric_from_tangents(&shifted_psi, &shifted_tangents, sys.gamma());
            for (a, b) in shifted.independent().iter().zip(plain.independent()) {
                dev.add(*a, b);
            }
        }
        Ok(dev)
    })();
    finish(result, name, CheckCategory::Gauge, grid.describe(), tol)
}

/// State and tangents of `e^{iα}|ψ⟩` for the linear phase `α = aθ θ + aφ φ + aχ χ`.
pub fn inject_phase(
    psi: &StateVector,
    tangents: &TangentStates,
    point: &CoordinatePoint,
    a_theta: f64,
    a_phi: f64,
    a_chi: f64,
) -> (StateVector, TangentStates) {
    let alpha = a_theta * point.theta + a_phi * point.phi + a_chi * point.chi;
    let phase = C64::from_polar(1.0, alpha);
    let shift = |d: &DVector<C64>, slope: f64| (d + &psi.amplitudes * C64::new(0.0, slope)) * phase;
    (
        StateVector::new(&psi.amplitudes * phase),
        TangentStates {
            d_theta: shift(&tangents.d_theta, a_theta),
            d_phi: shift(&tangents.d_phi, a_phi),
            d_chi: shift(&tangents.d_chi, a_chi),
        },
    )
}

/// Everything the default suite runs.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub systems: Vec<SpinSystem>,
    pub grid: SweepGrid,
    pub field_system: SpinSystem,
    pub field_grid: SweepGrid,
    pub topology: Vec<ManifoldSpec>,
    pub thermo_sites: usize,
    /// Replaces every tolerance when set.
    pub tolerance_override: Option<f64>,
    /// Only these categories run; `None` runs all.
    pub only: Option<Vec<CheckCategory>>,
}

/// `(N, 2s)` pairs verified by default.
pub const DEFAULT_SYSTEMS: [(usize, u32); 5] = [(2, 1), (3, 2), (4, 1), (2, 3), (3, 3)];

/// `(N, 2s)` pairs of the default topology suite.
pub const DEFAULT_TOPOLOGY: [(usize, u32); 4] = [(2, 1), (3, 2), (4, 1), (6, 3)];

impl VerifyConfig {
    pub fn default_suite() -> Result<Self> {
        let systems = DEFAULT_SYSTEMS
            .iter()
            .map(|&(n, two_s)| SpinSystem::new(n, two_s, 1.0))
            .collect::<Result<Vec<_>>>()?;
        let mut topology = DEFAULT_TOPOLOGY
            .iter()
            .map(|&(n, two_s)| SpinSystem::new(n, two_s, 1.0).map(ManifoldSpec::zero_field))
            .collect::<Result<Vec<_>>>()?;
        topology.push(ManifoldSpec::new(
            SpinSystem::new(6, 3, 1.0)?,
            Some(FieldConfig::rational(3, 1, Direction::z())?),
        )?);
        Ok(Self {
            systems,
            grid: SweepGrid::new(25, 8, 8, true),
            field_system: SpinSystem::new(4, 2, 1.0)?,
            field_grid: SweepGrid::new(7, 3, 3, true).with_fields(direction_grid(1.0, 8, 8)?),
            topology,
            thermo_sites: 10_000,
            tolerance_override: None,
            only: None,
        })
    }

    fn enabled(&self, category: CheckCategory) -> bool {
        self.only.as_ref().is_none_or(|only| only.contains(&category))
    }

    fn tol(&self, default: f64) -> f64 {
        self.tolerance_override.unwrap_or(default)
    }
}

pub fn run_suite(config: &VerifyConfig) -> VerificationReport {
    let mut records = Vec::new();
    let enabled = |c| config.enabled(c);

    if enabled(CheckCategory::Metric) {
        for sys in &config.systems {
            records.push(run_metric_equivalence(sys, &config.grid, config.tol(METRIC_TOL)));
        }
        records.push(run_metric_equivalence(&config.field_system, &config.field_grid, config.tol(METRIC_TOL)));
    }
    if enabled(CheckCategory::Speed) {
        for sys in &config.systems {
            records.push(run_speed_uncertainty_identity(sys, &config.grid, config.tol(SPEED_TOL)));
        }
        records.push(run_speed_uncertainty_identity(
            &config.field_system,
            &config.field_grid,
            config.tol(SPEED_TOL),
        ));
        if let Ok(methane) = SpinSystem::new(4, 1, -6.2) {
            records.push(run_speed_uncertainty_identity(&methane, &config.grid, config.tol(SPEED_TOL)));
        }
        records.push(run_speed_uncertainty_zero_coupling(3, 2, 1.7, config.tol(SPEED_TOL)));
    }
    if enabled(CheckCategory::Topology) {
        records.extend(run_topology_suite(&config.topology, config.tol(TOPOLOGY_TOL)));
    }
    if enabled(CheckCategory::FieldSpeeds) {
        records.extend(run_field_speed_vectors(config.tol(FIELD_SPEED_TOL)));
    }
    if enabled(CheckCategory::Curvature) {
        for sys in &config.systems {
            records.extend(run_curvature_crosscheck(
                sys,
                config.tol(PROFILE_CURVATURE_TOL),
                config.tol(BRANCH_CURVATURE_TOL),
            ));
        }
    }
    if enabled(CheckCategory::Thermo) {
        records.extend(run_thermo_limit(
            config.thermo_sites,
            1,
            config.tol(THERMO_CURVATURE_TOL),
            config.tol(THERMO_THETA_TOL),
        ));
    }
    if enabled(CheckCategory::Gauge) {
        if let Some(sys) = config.systems.last() {
            records.push(run_gauge_invariance(sys, None, config.tol(GAUGE_TOL)));
        }
        if let Some(field) = config.field_grid.fields.get(config.field_grid.fields.len() / 2 + 1) {
            records.push(run_gauge_invariance(&config.field_system, Some(field), config.tol(GAUGE_TOL)));
        }
    }

    let disabled = CheckCategory::ALL.into_iter().filter(|c| !config.enabled(*c)).collect();
    VerificationReport { records, disabled }
}

/// Error for callers that want a hard failure instead of a report.
pub fn require_pass(report: &VerificationReport) -> Result<()> {
    if report.pass() {
        Ok(())
    } else {
        Err(Error::Domain("verification failed"))
    }
}

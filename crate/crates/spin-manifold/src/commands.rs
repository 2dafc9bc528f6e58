//! The subcommands, each producing a [`Table`] or a JSON value.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::{json, Value};
use spin_manifold_core::analytic::{
    curvature_from_speed, field_curvature, min_speed_field, scalar_curvature, speed_closed_form,
    speed_closed_form_field, speed_extrema, Branch, FieldConfig,
};
use spin_manifold_core::spin_ops::Direction;
use spin_manifold_core::verify::{linspace, periodic_samples, run_suite, CheckCategory, VerificationReport, VerifyConfig};
use spin_manifold_core::{Error as ModelError, SpinSystem};

use crate::config::{Curve, CurveLabel, Resolved, RunConfig};
use crate::error::{CliError, Result};
use crate::format::{csv_line, format_g};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(&'static str),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format_g(*v),
            Cell::Text(t) => (*t).to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Num(v) => json!(v),
            Cell::Text(t) => json!(t),
        }
    }
}

/// Rows in sweep order plus notes about omitted points.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = csv_line(&self.columns);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&csv_line(row.iter().map(Cell::render)));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(Cell::to_json).collect()))
            .collect();
        json!({ "columns": self.columns, "rows": rows })
    }
}

fn label_cells(label: &CurveLabel) -> Vec<Cell> {
    match *label {
        CurveLabel::Single => vec![],
        CurveLabel::System { n, two_s } => vec![Cell::Int(n as i64), Cell::Int(two_s as i64)],
        CurveLabel::Field { h_over_j } => vec![Cell::Num(h_over_j)],
    }
}

fn columns_for(res: &Resolved, tail: &[&'static str]) -> Vec<&'static str> {
    let mut columns = res.curves[0].label.columns().to_vec();
    columns.extend_from_slice(tail);
    columns
}

fn describe(curve: &Curve) -> String {
    let sys = &curve.sys;
    let mut out = format!("N={} 2s={}", sys.n_sites(), sys.two_s());
    if let Some(f) = &curve.field {
        out.push_str(&format!(" h/J={}", f.ratio_h_over_j));
    }
    out
}

/// Either no field or one along `±z`; anything else has no curvature claim.
fn curvature_at(curve: &Curve, theta: f64) -> Result<Option<f64>> {
    match &curve.field {
        Some(f) if !f.is_zero() => {
            if !f.is_along_z() {
                return Err(CliError::Config(
                    "curvature is only defined for no field or a field along z".to_string(),
                ));
            }
            if theta <= 0.0 || theta >= PI {
                return Ok(None);
            }
            Ok(Some(field_curvature(&curve.sys, f, theta)?))
        }
        _ => match scalar_curvature(&curve.sys, theta) {
            Ok(r) => Ok(Some(r)),
            Err(ModelError::SingularPoint { .. }) => Ok(None),
            Err(e) => Err(e.into()),
        },
    }
}

/// `theta,R` for every curve; singular poles are left out with a note.
pub fn cmd_curvature(res: &Resolved) -> Result<Table> {
    let mut table = Table {
        columns: columns_for(res, &["theta", "R"]),
        ..Default::default()
    };
    let thetas = res.thetas();
    for curve in &res.curves {
        let values: Vec<Result<Option<f64>>> = thetas.par_iter().map(|&t| curvature_at(curve, t)).collect();
        for (&theta, value) in thetas.iter().zip(values) {
            match value? {
                Some(r) => {
                    let mut row = label_cells(&curve.label);
                    row.extend([Cell::Num(theta), Cell::Num(r)]);
                    table.rows.push(row);
                }
                None => table
                    .notes
                    .push(format!("{}: theta={} is a conical point, omitted", describe(curve), format_g(theta))),
            }
        }
    }
    Ok(table)
}

fn speed_at(curve: &Curve, theta: f64, phi: f64) -> Result<f64> {
    Ok(match &curve.field {
        Some(f) => speed_closed_form_field(&curve.sys, theta, phi, f)?,
        None => speed_closed_form(&curve.sys, theta)?,
    })
}

/// `theta,v` for every curve, at the configured `φ` when a field is present.
pub fn cmd_speed(res: &Resolved) -> Result<Table> {
    let mut table = Table {
        columns: columns_for(res, &["theta", "v"]),
        ..Default::default()
    };
    let thetas = res.thetas();
    for curve in &res.curves {
        let values: Vec<Result<f64>> = thetas.par_iter().map(|&t| speed_at(curve, t, res.phi)).collect();
        for (&theta, v) in thetas.iter().zip(values) {
            let mut row = label_cells(&curve.label);
            row.extend([Cell::Num(theta), Cell::Num(v?)]);
            table.rows.push(row);
        }
    }
    Ok(table)
}

/// `v,R,branch`: the upper branch over `[0, v_max]`, the lower over `[v(π/2), v_max]`.
pub fn cmd_curvature_vs_speed(res: &Resolved) -> Result<Table> {
    let mut table = Table {
        columns: columns_for(res, &["v", "R", "branch"]),
        ..Default::default()
    };
    for curve in &res.curves {
        if curve.field.is_some_and(|f| !f.is_zero()) {
            return Err(CliError::Config("curvature-vs-speed is a zero-field relation".to_string()));
        }
        let ext = speed_extrema(&curve.sys);
        let lower = if ext.v_half_pi < ext.v_max {
            linspace(ext.v_half_pi, ext.v_max, res.samples)
        } else {
            vec![ext.v_max]
        };
        for (branch, name, speeds) in [
            (Branch::Upper, "upper", linspace(0.0, ext.v_max, res.samples)),
            (Branch::Lower, "lower", lower),
        ] {
            let values: Vec<_> = speeds
                .par_iter()
                .map(|&v| curvature_from_speed(&curve.sys, v, branch))
                .collect();
            for (&v, r) in speeds.iter().zip(values) {
                let mut row = label_cells(&curve.label);
                row.extend([Cell::Num(v), Cell::Num(r?), Cell::Text(name)]);
                table.rows.push(row);
            }
        }
    }
    Ok(table)
}

/// Polar and azimuth sample counts of the direction scan. Steps of `π/72` put
/// `π/4`, `3π/4` and `φ + π` on the grid.
pub const SCAN_POLAR: usize = 73;
pub const SCAN_AZIMUTH: usize = 144;

fn scan_entry(theta_prime: f64, phi_prime: f64, v: f64) -> Value {
    json!({ "theta_prime": theta_prime, "phi_prime": phi_prime, "v": v })
}

/// Optimal `h/J` for the configured state and field direction; with `scan`, also the
/// arg-min and arg-max of the speed over field directions at fixed `h/J`.
pub fn cmd_field_optimize(res: &Resolved, scan: bool) -> Result<Value> {
    let curve = res.single()?;
    let sys: &SpinSystem = &curve.sys;
    let best = min_speed_field(sys, res.theta, res.phi, &res.direction)?;
    let mut out = json!({
        "n": sys.n_sites(),
        "two_s": sys.two_s(),
        "theta": res.theta,
        "phi": res.phi,
        "theta_prime": res.direction.polar,
        "phi_prime": res.direction.azimuth,
        "h_over_j_min": best.ratio_h_over_j,
        "v_min": best.v_min,
        "reduction_applied": best.reduction_applied,
    });
    if scan {
        let ratio = curve.field.map_or(1.0, |f| f.ratio_h_over_j);
        let polar = linspace(0.0, PI, SCAN_POLAR);
        let azimuth: Vec<f64> = periodic_samples(2.0 * PI, SCAN_AZIMUTH)
            .into_iter()
            .map(|a| (res.phi + a).rem_euclid(2.0 * PI))
            .collect();
        let grid: Vec<(f64, f64)> = polar
            .iter()
            .flat_map(|&p| azimuth.iter().map(move |&a| (p, a)))
            .collect();
        let speeds: Vec<Result<f64>> = grid
            .par_iter()
            .map(|&(p, a)| {
                let field = FieldConfig::new(ratio, Direction::new(p, a)?)?;
                Ok(speed_closed_form_field(sys, res.theta, res.phi, &field)?)
            })
            .collect();
        let speeds = speeds.into_iter().collect::<Result<Vec<f64>>>()?;
        // first occurrence wins, so ties resolve in grid order
        let (mut lo, mut hi) = (0, 0);
        for (i, &v) in speeds.iter().enumerate() {
            if v < speeds[lo] {
                lo = i;
            }
            if v > speeds[hi] {
                hi = i;
            }
        }
        out["scan"] = json!({
            "h_over_j": ratio,
            "polar_samples": SCAN_POLAR,
            "azimuth_samples": SCAN_AZIMUTH,
            "argmin": scan_entry(grid[lo].0, grid[lo].1, speeds[lo]),
            "argmax": scan_entry(grid[hi].0, grid[hi].1, speeds[hi]),
        });
    }
    Ok(out)
}

/// Options of the verification command beyond the run configuration.
#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub only: Vec<String>,
    pub tolerance: Option<f64>,
}

/// The default suite, with the zero-field systems replaced when the configuration
/// names any.
pub fn cmd_verify(cfg: &RunConfig, options: &VerifyOptions) -> Result<VerificationReport> {
    let mut suite = VerifyConfig::default_suite()?;
    if cfg.n.is_some() || cfg.systems.is_some() {
        suite.systems = cfg.resolve()?.curves.iter().map(|c| c.sys).collect();
    }
    if let Some(tol) = options.tolerance {
        if tol.is_nan() || tol <= 0.0 {
            return Err(CliError::Config(format!("tolerance {tol} must be positive")));
        }
        suite.tolerance_override = Some(tol);
    }
    if !options.only.is_empty() {
        let categories = options
            .only
            .iter()
            .map(|name| {
                CheckCategory::from_name(name.trim()).ok_or_else(|| {
                    let known: Vec<_> = CheckCategory::ALL.iter().map(|c| c.name()).collect();
                    CliError::Config(format!("unknown check category `{name}` (known: {})", known.join(", ")))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        suite.only = Some(categories);
    }
    Ok(run_suite(&suite))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolved(text: &str) -> Resolved {
        RunConfig::from_json(text).unwrap().resolve().unwrap()
    }

    fn value(table: &Table, row: usize, column: &str) -> f64 {
        let idx = table.columns.iter().position(|c| *c == column).unwrap();
        match table.rows[row][idx] {
            Cell::Num(v) => v,
            Cell::Int(v) => v as f64,
            Cell::Text(_) => panic!("text cell"),
        }
    }

    #[test]
    fn flat_sphere_has_zero_curvature_on_the_equator() {
        let table = cmd_curvature(&resolved(r#"{"n": 2, "two_s": 1, "samples": 181}"#)).unwrap();
        assert_eq!(table.rows.len(), 181);
        assert_eq!(value(&table, 90, "theta"), PI / 2.0);
        assert_eq!(value(&table, 90, "R"), 0.0);
        assert!(table.notes.is_empty());
    }

    #[test]
    fn conical_poles_are_omitted() {
        let table = cmd_curvature(&resolved(r#"{"n": 3, "two_s": 2, "samples": 11}"#)).unwrap();
        assert_eq!(table.rows.len(), 9);
        assert_eq!(table.notes.len(), 2);
    }

    #[test]
    fn tilted_field_curvature_is_a_config_error() {
        let res = resolved(r#"{"n": 3, "two_s": 2, "h_over_j": 1.0, "theta_prime": 0.5}"#);
        assert!(matches!(cmd_curvature(&res), Err(CliError::Config(_))));
    }

    #[test]
    fn speed_rows() {
        let table = cmd_speed(&resolved(r#"{"n": 2, "two_s": 1, "samples": 3}"#)).unwrap();
        assert_eq!(value(&table, 0, "v"), 0.0);
        assert!((value(&table, 1, "v") - 0.5).abs() < 1e-15);
    }

    #[test]
    fn methane_branches() {
        let table = cmd_curvature_vs_speed(&resolved(r#"{"n": 4, "two_s": 1, "j": -6.2, "samples": 5}"#)).unwrap();
        assert_eq!(table.rows.len(), 10);
        assert!((value(&table, 0, "R") - 7.0).abs() < 1e-12);
        assert!((value(&table, 4, "R") - 16.0 / 3.0).abs() < 1e-12);
        assert!((value(&table, 5, "R") + 8.0).abs() < 1e-12);
        assert!((value(&table, 9, "R") - 16.0 / 3.0).abs() < 1e-12);
        assert_eq!(table.rows[5][2], Cell::Text("lower"));
    }

    #[test]
    fn single_lower_point_when_the_maximum_is_on_the_equator() {
        let table = cmd_curvature_vs_speed(&resolved(r#"{"n": 2, "two_s": 1, "samples": 4}"#)).unwrap();
        assert_eq!(table.rows.len(), 5);
    }

    #[test]
    fn worked_direction_scan() {
        let res = resolved(r#"{"n": 4, "two_s": 2, "theta": 0.7853981633974483, "phi": 0.0, "h_over_j": 1.0, "theta_prime": 3.141592653589793}"#);
        let out = cmd_field_optimize(&res, true).unwrap();
        assert!((out["h_over_j_min"].as_f64().unwrap() - 3.0 * 2f64.sqrt()).abs() < 1e-12);
        let scan = &out["scan"];
        assert!((scan["argmin"]["theta_prime"].as_f64().unwrap() - 3.0 * PI / 4.0).abs() < 1e-12);
        assert!(scan["argmin"]["phi_prime"].as_f64().unwrap().abs() < 1e-12);
        assert!((scan["argmin"]["v"].as_f64().unwrap() - 9.5f64.sqrt()).abs() < 1e-12);
        assert!((scan["argmax"]["theta_prime"].as_f64().unwrap() - PI / 4.0).abs() < 1e-12);
        assert!((scan["argmax"]["phi_prime"].as_f64().unwrap() - PI).abs() < 1e-12);
        assert!((scan["argmax"]["v"].as_f64().unwrap() - 33.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn equator_needs_no_field() {
        let res = resolved(r#"{"n": 4, "two_s": 2, "theta": 1.5707963267948966, "theta_prime": 1.0, "phi_prime": 2.0}"#);
        let out = cmd_field_optimize(&res, false).unwrap();
        assert!(out["h_over_j_min"].as_f64().unwrap().abs() < 1e-12);
    }

    #[test]
    fn verify_filters_categories() {
        let report = cmd_verify(
            &RunConfig::default(),
            &VerifyOptions {
                only: vec!["topology".to_string()],
                tolerance: None,
            },
        )
        .unwrap();
        assert!(report.records.iter().all(|r| r.category == CheckCategory::Topology));
        assert_eq!(report.disabled.len(), CheckCategory::ALL.len() - 1);
        assert!(report.pass());
        let bad = VerifyOptions {
            only: vec!["geodesics".to_string()],
            tolerance: None,
        };
        assert!(matches!(cmd_verify(&RunConfig::default(), &bad), Err(CliError::Config(_))));
    }
}

//! Parsers for flag values.

use hedgetomo::estimators::default_h;
use hedgetomo::risk::grid_points;
use hedgetomo::{BlochVector, Dataset, EstimatorSpec, LossSpec, MeasurementDesign};

use crate::error::{input, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub fn format(s: Option<&str>) -> CliResult<Format> {
    match s.unwrap_or("csv") {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => input(format!("unknown format '{other}' (expected csv or json)")),
    }
}

pub fn design_kind(s: Option<&str>, default: &str) -> CliResult<bool> {
    match s.unwrap_or(default) {
        "rebit" => Ok(true),
        "qubit" => Ok(false),
        other => input(format!(
            "unknown design '{other}' (expected rebit or qubit)"
        )),
    }
}

pub fn design(rebit: bool, shots: u32) -> CliResult<MeasurementDesign> {
    Ok(if rebit {
        MeasurementDesign::rebit(shots)?
    } else {
        MeasurementDesign::qubit(shots)?
    })
}

fn number<T: std::str::FromStr>(what: &str, s: &str) -> CliResult<T> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Input(format!("bad {what} '{}'", s.trim())))
}

fn list<T: std::str::FromStr>(what: &str, s: &str) -> CliResult<Vec<T>> {
    if s.trim().is_empty() {
        return input(format!("empty {what} list"));
    }
    s.split(',').map(|p| number(what, p)).collect()
}

/// `4`, `10,20,40` or an inclusive range `10:100:10`.
pub fn shots(s: Option<&str>) -> CliResult<Vec<u32>> {
    let s = s.ok_or_else(|| CliError::Input("--n is required".into()))?;
    let values: Vec<u32> = if s.contains(':') {
        let parts: Vec<u32> = s
            .split(':')
            .map(|p| number("N", p))
            .collect::<CliResult<_>>()?;
        match parts[..] {
            [start, stop, step] if step > 0 && start <= stop => {
                (start..=stop).step_by(step as usize).collect()
            }
            _ => return input(format!("bad N range '{s}' (expected start:stop:step)")),
        }
    } else {
        list("N", s)?
    };
    if values.contains(&0) {
        return input("N must be at least 1");
    }
    Ok(values)
}

/// A `start:stop:step` grid (stop included) or a comma list.
pub fn grid(what: &str, s: &str) -> CliResult<Vec<f64>> {
    let values = if s.contains(':') {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| number(what, p))
            .collect::<CliResult<_>>()?;
        match parts[..] {
            [start, stop, step] => grid_points(start, stop, step)
                .map_err(|e| CliError::Input(format!("bad {what} grid '{s}': {e}")))?,
            _ => return input(format!("bad {what} grid '{s}' (expected start:stop:step)")),
        }
    } else {
        list(what, s)?
    };
    if values.is_empty() {
        return input(format!("empty {what} list"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return input(format!("non-finite value in {what} list"));
    }
    Ok(values)
}

pub fn loss(s: Option<&str>) -> CliResult<LossSpec> {
    Ok(s.unwrap_or("hs").parse()?)
}

pub fn h_override(s: Option<&str>) -> CliResult<Option<f64>> {
    s.map(|v| number("h", v)).transpose()
}

/// Hedged estimators without an explicit strength take `h` or `1/N − 1/N²`.
pub fn estimator(s: &str, shots: u32, h: Option<f64>) -> CliResult<EstimatorSpec> {
    let fallback = match h {
        Some(h) => h,
        None => default_h(shots)?,
    };
    Ok(EstimatorSpec::parse_with_default(s, Some(fallback))?)
}

pub fn jobs(s: Option<&str>) -> CliResult<Option<usize>> {
    match s {
        None => Ok(None),
        Some(v) => match number::<usize>("jobs", v)? {
            0 => input("--jobs must be at least 1"),
            j => Ok(Some(j)),
        },
    }
}

pub fn counts(s: Option<&str>) -> CliResult<Dataset> {
    let s = s.ok_or_else(|| CliError::Input("--counts is required".into()))?;
    Ok(Dataset::new(&list::<u32>("count", s)?)?)
}

pub fn vector(what: &str, s: &str) -> CliResult<Vec<f64>> {
    let v: Vec<f64> = list(what, s)?;
    if v.iter().any(|x| !x.is_finite()) {
        return input(format!("non-finite {what} component"));
    }
    Ok(v)
}

pub fn state(s: &str, design: &MeasurementDesign) -> CliResult<BlochVector> {
    let v = vector("state", s)?;
    if v.len() != design.num_axes() {
        return input(format!(
            "state has {} components but the {} design needs {}",
            v.len(),
            design.label(),
            design.num_axes()
        ));
    }
    Ok(BlochVector::new(&v)?.validate()?)
}

/// A unit direction from `x`, `y`, `z` or explicit components.
pub fn axis(s: &str, rebit: bool) -> CliResult<BlochVector> {
    let comps: Vec<f64> = match (s.trim(), rebit) {
        ("x", true) => vec![1.0, 0.0],
        ("z", true) => vec![0.0, 1.0],
        ("x", false) => vec![1.0, 0.0, 0.0],
        ("y", false) => vec![0.0, 1.0, 0.0],
        ("z", false) => vec![0.0, 0.0, 1.0],
        _ => vector("axis", s)?,
    };
    let dim = if rebit { 2 } else { 3 };
    if comps.len() != dim {
        return input(format!("axis '{s}' needs {dim} components for this design"));
    }
    let norm = comps.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return input("axis must be nonzero");
    }
    Ok(BlochVector::new(
        &comps.iter().map(|c| c / norm).collect::<Vec<_>>(),
    )?)
}

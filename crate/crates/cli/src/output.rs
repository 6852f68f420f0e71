//! Number formatting and atomic output.

use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Shortest decimal that round-trips; `inf` for divergent values.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        // Also folds −0.
        "0".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        let s = format!("{x:?}");
        s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
    }
}

/// `undefined` when a difference of two risks has no value.
pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "undefined".into())
}

pub fn json_num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(if x == 0.0 { 0.0 } else { x })
    } else {
        Value::from(num(x))
    }
}

pub fn json_opt(x: Option<f64>) -> Value {
    x.map(json_num).unwrap_or_else(|| Value::from("undefined"))
}

/// `x` to 12 significant digits with trailing zeros dropped, like `%.12g`.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (_, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trimmed = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trimmed(format!("{x:.decimals$}"))
    } else {
        let (mantissa, _) = sci.split_once('e').expect("exponent");
        format!("{}e{exp}", trimmed(mantissa.to_string()))
    }
}

/// Writes `content` to `path` through a temporary file in the same
/// directory, or to standard output when no path is given.
pub fn emit(path: Option<&str>, content: &str) -> CliResult<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(content.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")));
    };
    let path = Path::new(path);
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(content.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

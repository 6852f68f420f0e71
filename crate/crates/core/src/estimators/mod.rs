//! Estimators mapping Pauli-measurement datasets to Bloch vectors.

mod mle;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{BlochVector, FrequencyVector, PURE_THRESHOLD};

pub use mle::{log_likelihood, mle, mle_with, MleOptions, MleSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PauliAxis::X => "X",
            PauliAxis::Y => "Y",
            PauliAxis::Z => "Z",
        };
        f.write_str(s)
    }
}

/// Which Pauli axes are measured, each `shots` times.
///
/// Rebits measure `{X, Z}` and qubits `{X, Y, Z}`; components of Bloch
/// vectors, frequencies and datasets follow that canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasurementDesign {
    axes: Vec<PauliAxis>,
    shots: u32,
}

impl MeasurementDesign {
    pub fn new(mut axes: Vec<PauliAxis>, shots: u32) -> Result<Self> {
        if shots < 1 {
            return Err(Error::InvalidParameter(
                "shots per axis must be at least 1".into(),
            ));
        }
        axes.sort();
        let before = axes.len();
        axes.dedup();
        if axes.len() != before {
            return Err(Error::InvalidParameter(
                "measurement axes must be distinct".into(),
            ));
        }
        match axes.as_slice() {
            [PauliAxis::X, PauliAxis::Z] | [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] => {
                Ok(Self { axes, shots })
            }
            other => Err(Error::InvalidParameter(format!(
                "unsupported axis set {other:?}; use {{X, Z}} for a rebit or {{X, Y, Z}} for a qubit"
            ))),
        }
    }

    pub fn rebit(shots: u32) -> Result<Self> {
        Self::new(vec![PauliAxis::X, PauliAxis::Z], shots)
    }

    pub fn qubit(shots: u32) -> Result<Self> {
        Self::new(vec![PauliAxis::X, PauliAxis::Y, PauliAxis::Z], shots)
    }

    pub fn axes(&self) -> &[PauliAxis] {
        &self.axes
    }

    pub fn num_axes(&self) -> usize {
        self.axes.len()
    }

    pub fn shots(&self) -> u32 {
        self.shots
    }

    pub fn is_rebit(&self) -> bool {
        self.axes.len() == 2
    }

    pub fn label(&self) -> &'static str {
        if self.is_rebit() {
            "rebit"
        } else {
            "qubit"
        }
    }

    /// Number of distinct datasets, `(N + 1)^axes`.
    pub fn num_datasets(&self) -> usize {
        (self.shots as usize + 1).pow(self.axes.len() as u32)
    }

    pub(crate) fn check_state(&self, r: &BlochVector) -> Result<()> {
        if r.dim() != self.num_axes() {
            return Err(Error::InvalidState(format!(
                "{}-component state used with a {} design",
                r.dim(),
                self.label()
            )));
        }
        r.validate().map(|_| ())
    }
}

/// Per-axis counts of "+1" outcomes, aligned with the design's axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dataset {
    counts: [u32; 3],
    len: u8,
}

impl Dataset {
    pub fn new(counts: &[u32]) -> Result<Self> {
        if counts.len() != 2 && counts.len() != 3 {
            return Err(Error::InvalidDataset(format!(
                "expected 2 or 3 counts, got {}",
                counts.len()
            )));
        }
        let mut arr = [0; 3];
        arr[..counts.len()].copy_from_slice(counts);
        Ok(Self {
            counts: arr,
            len: counts.len() as u8,
        })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts[..self.len as usize]
    }

    pub fn check(&self, design: &MeasurementDesign) -> Result<()> {
        if self.len as usize != design.num_axes() {
            return Err(Error::InvalidDataset(format!(
                "{} counts given for a {}-axis design",
                self.len,
                design.num_axes()
            )));
        }
        if let Some(&n) = self.counts().iter().find(|&&n| n > design.shots()) {
            return Err(Error::InvalidDataset(format!(
                "count {n} exceeds shots per axis {}",
                design.shots()
            )));
        }
        Ok(())
    }
}

/// `f_w = (2 n_w − N)/N` for every measured axis.
pub fn frequencies(d: &Dataset, design: &MeasurementDesign) -> Result<FrequencyVector> {
    d.check(design)?;
    let n = design.shots() as f64;
    let mut comps = [0.0; 3];
    for (c, &k) in comps.iter_mut().zip(d.counts()) {
        *c = (2.0 * k as f64 - n) / n;
    }
    Ok(FrequencyVector(BlochVector::from_slice(
        &comps[..d.counts().len()],
    )))
}

/// Euclidean projection of the frequencies onto the unit ball.
pub fn constrained_ls(f: &FrequencyVector) -> BlochVector {
    let v = f.as_bloch();
    if v.norm_sq() < 1.0 {
        v
    } else {
        v.scale(1.0 / v.norm())
    }
}

/// Like [`constrained_ls`], but boundary estimates are pulled to radius `√(1 − h)`.
pub fn hedged(f: &FrequencyVector, h: f64) -> Result<BlochVector> {
    check_h(h)?;
    let v = f.as_bloch();
    if v.norm_sq() < 1.0 {
        Ok(v)
    } else {
        Ok(v.scale((1.0 - h).sqrt() / v.norm()))
    }
}

/// Hedging strength `1/N − 1/N²`. Zero at `N = 1`, which hedged estimators reject.
pub fn default_h(shots: u32) -> Result<f64> {
    if shots < 1 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let n = shots as f64;
    // Same value as 1/N − 1/N² with one rounding.
    Ok((n - 1.0) / (n * n))
}

/// Scales a pure estimate by `√(1 − h)` and leaves mixed ones alone.
///
/// `h` must lie in `(0, 1)`; [`EstimatorSpec`] enforces this for the
/// estimators built on top of it.
pub fn apply_hedging(estimate: &BlochVector, h: f64) -> BlochVector {
    debug_assert!(h > 0.0 && h < 1.0, "hedging strength {h} outside (0, 1)");
    if estimate.norm() >= PURE_THRESHOLD {
        estimate.scale((1.0 - h).sqrt())
    } else {
        *estimate
    }
}

fn check_h(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "hedging strength h = {h} must lie strictly between 0 and 1"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EstimatorSpec {
    LinearInversion,
    ConstrainedLs,
    Hedged(f64),
    Mle,
    HedgedMle(f64),
}

impl EstimatorSpec {
    pub fn hedged(h: f64) -> Result<Self> {
        check_h(h)?;
        Ok(EstimatorSpec::Hedged(h))
    }

    pub fn hedged_mle(h: f64) -> Result<Self> {
        check_h(h)?;
        Ok(EstimatorSpec::HedgedMle(h))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EstimatorSpec::Hedged(h) | EstimatorSpec::HedgedMle(h) => check_h(h),
            _ => Ok(()),
        }
    }

    /// Parses `li`, `cls`, `mle`, `hedged[:h]` or `hedged-mle[:h]`; hedged
    /// kinds without an explicit strength take `default_h`.
    pub fn parse_with_default(s: &str, default_h: Option<f64>) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (kind, h) = match s.split_once(':') {
            Some((k, v)) => {
                let h = v
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad hedging strength '{v}'")))?;
                (k.trim().to_string(), Some(h))
            }
            None => (s.clone(), None),
        };
        let need_h = || {
            h.or(default_h).ok_or_else(|| {
                Error::InvalidParameter(format!("estimator '{kind}' needs a hedging strength"))
            })
        };
        let spec = match kind.as_str() {
            "li" | "linear" | "linear-inversion" => EstimatorSpec::LinearInversion,
            "cls" | "constrained-ls" => EstimatorSpec::ConstrainedLs,
            "mle" => EstimatorSpec::Mle,
            "hedged" => EstimatorSpec::Hedged(need_h()?),
            "hedged-mle" | "hmle" => EstimatorSpec::HedgedMle(need_h()?),
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown estimator '{other}' (expected li, cls, hedged, mle, hedged-mle)"
                )))
            }
        };
        if h.is_some() && !matches!(spec, EstimatorSpec::Hedged(_) | EstimatorSpec::HedgedMle(_)) {
            return Err(Error::InvalidParameter(format!(
                "estimator '{kind}' takes no hedging strength"
            )));
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn hedging_strength(&self) -> Option<f64> {
        match *self {
            EstimatorSpec::Hedged(h) | EstimatorSpec::HedgedMle(h) => Some(h),
            _ => None,
        }
    }

    /// Whether every estimate is guaranteed to be a physical state.
    pub fn is_physical(&self) -> bool {
        !matches!(self, EstimatorSpec::LinearInversion)
    }

    /// Estimate for one dataset.
    pub fn estimate(&self, d: &Dataset, design: &MeasurementDesign) -> Result<BlochVector> {
        let f = frequencies(d, design)?;
        match *self {
            EstimatorSpec::LinearInversion => Ok(f.as_bloch()),
            EstimatorSpec::ConstrainedLs => Ok(constrained_ls(&f)),
            EstimatorSpec::Hedged(h) => hedged(&f, h),
            EstimatorSpec::Mle => mle(d, design),
            EstimatorSpec::HedgedMle(h) => {
                check_h(h)?;
                Ok(apply_hedging(&mle(d, design)?, h))
            }
        }
    }
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorSpec::LinearInversion => f.write_str("li"),
            EstimatorSpec::ConstrainedLs => f.write_str("cls"),
            EstimatorSpec::Mle => f.write_str("mle"),
            EstimatorSpec::Hedged(h) => write!(f, "hedged:{h}"),
            EstimatorSpec::HedgedMle(h) => write!(f, "hedged-mle:{h}"),
        }
    }
}

impl FromStr for EstimatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with_default(s, None)
    }
}

//! Squared Hilbert-Schmidt distance, quantum relative entropy and infidelity.
//!
//! Every loss has a matrix entry point and a Bloch-vector closed form; the
//! risk engine calls the latter in its inner loop.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{density_to_bloch, BlochVector, DensityMatrix, PURE_THRESHOLD, STATE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LossSpec {
    HilbertSchmidt,
    RelativeEntropy,
    Infidelity,
}

impl LossSpec {
    pub const ALL: [LossSpec; 3] = [
        LossSpec::HilbertSchmidt,
        LossSpec::RelativeEntropy,
        LossSpec::Infidelity,
    ];

    /// Loss of reporting `estimate` when the truth is `truth`.
    ///
    /// Rebit and qubit vectors may be mixed; both are embedded as qubits.
    pub fn eval(self, truth: &BlochVector, estimate: &BlochVector) -> f64 {
        let a = truth.to_qubit();
        let b = estimate.to_qubit();
        match self {
            LossSpec::HilbertSchmidt => hs_bloch(&a, &b),
            LossSpec::RelativeEntropy => relative_entropy_bloch(&a, &b),
            LossSpec::Infidelity => infidelity_bloch(&a, &b),
        }
    }

    /// Whether the loss is only defined when the estimate is a physical state.
    pub fn needs_physical_estimate(self) -> bool {
        !matches!(self, LossSpec::HilbertSchmidt)
    }

    pub fn label(self) -> &'static str {
        match self {
            LossSpec::HilbertSchmidt => "hs",
            LossSpec::RelativeEntropy => "relent",
            LossSpec::Infidelity => "infid",
        }
    }
}

impl fmt::Display for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for LossSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hs" | "hilbert-schmidt" => Ok(LossSpec::HilbertSchmidt),
            "relent" | "relative-entropy" => Ok(LossSpec::RelativeEntropy),
            "infid" | "infidelity" => Ok(LossSpec::Infidelity),
            other => Err(Error::InvalidParameter(format!(
                "unknown loss '{other}' (expected hs, relent or infid)"
            ))),
        }
    }
}

/// `Tr(ρ − σ)²`.
pub fn hs_loss(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let (a, b) = (rho.entries(), sigma.entries());
    let mut acc = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            acc += (a[i][j] - b[i][j]).norm_sqr();
        }
    }
    acc
}

/// `Tr ρ(ln ρ − ln σ)` in nats; `+∞` when the support of `ρ` is not
/// contained in that of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let a = qubit_of(rho);
    let b = qubit_of(sigma);
    relative_entropy_bloch(&a, &b)
}

/// `1 − Tr√(√ρ σ √ρ)`.
pub fn infidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let a = qubit_of(rho);
    let b = qubit_of(sigma);
    infidelity_bloch(&a, &b)
}

fn qubit_of(rho: &DensityMatrix) -> [f64; 3] {
    // DensityMatrix values are validated at construction.
    density_to_bloch(rho)
        .expect("DensityMatrix upholds its invariants")
        .to_qubit()
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn hs_bloch(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    0.5 * dot3(&d, &d)
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

pub(crate) fn relative_entropy_bloch(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let na = dot3(a, a).sqrt().min(1.0);
    let nb = dot3(b, b).sqrt();
    if nb >= PURE_THRESHOLD {
        // A rank-one σ only supports ρ = σ.
        let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
        return if dot3(&d, &d).sqrt() <= STATE_TOL {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let neg_entropy = xlnx((1.0 + na) / 2.0) + xlnx((1.0 - na) / 2.0);
    // Tr ρ ln σ = ½ ln((1 − |b|²)/4) + (a·b) artanh|b| / |b|
    let slope = if nb < 1e-8 { 1.0 } else { nb.atanh() / nb };
    let cross = 0.5 * ((1.0 - nb * nb) / 4.0).ln() + dot3(a, b) * slope;
    (neg_entropy - cross).max(0.0)
}

// Unit vectors come out of normalization with |r|² off by a few ulps, and the
// square root below would turn that into an error near 1e-8.
fn det_from_norm_sq(n2: f64) -> f64 {
    let gap = 1.0 - n2;
    if gap.abs() <= 8.0 * f64::EPSILON {
        0.0
    } else {
        gap / 4.0
    }
}

pub(crate) fn infidelity_bloch(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let overlap = (1.0 + dot3(a, b)) / 2.0;
    let det_a = det_from_norm_sq(dot3(a, a));
    let det_b = det_from_norm_sq(dot3(b, b));
    let radicand = overlap + 2.0 * (det_a * det_b).max(0.0).sqrt();
    1.0 - radicand.clamp(0.0, 1.0).sqrt()
}

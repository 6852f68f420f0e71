//! Rebit and qubit states as Bloch vectors and as 2x2 density matrices.
//!
//! A rebit is stored as `(⟨X⟩, ⟨Z⟩)` and only embedded into the qubit
//! `(⟨X⟩, 0, ⟨Z⟩)` when a density matrix is requested.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on every state-validity check.
pub const STATE_TOL: f64 = 1e-12;

/// Bloch norm at or above which a state counts as pure.
pub const PURE_THRESHOLD: f64 = 1.0 - 1e-9;

/// Real 2-vector (rebit) or 3-vector (qubit) of Pauli expectation values.
///
/// The type itself does not enforce `‖r‖ ≤ 1`: linear-inversion estimates
/// can leave the ball. Use [`BlochVector::validate`] where a physical state
/// is required.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    comps: [f64; 3],
    dim: u8,
}

impl BlochVector {
    pub fn new(comps: &[f64]) -> Result<Self> {
        if comps.len() != 2 && comps.len() != 3 {
            return Err(Error::InvalidState(format!(
                "Bloch vector must have 2 or 3 components, got {}",
                comps.len()
            )));
        }
        if comps.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidState(format!(
                "non-finite Bloch component in {comps:?}"
            )));
        }
        let mut arr = [0.0; 3];
        arr[..comps.len()].copy_from_slice(comps);
        Ok(Self {
            comps: arr,
            dim: comps.len() as u8,
        })
    }

    /// Rebit state `(⟨X⟩, ⟨Z⟩)`.
    pub fn rebit(x: f64, z: f64) -> Self {
        Self {
            comps: [x, z, 0.0],
            dim: 2,
        }
    }

    pub fn qubit(x: f64, y: f64, z: f64) -> Self {
        Self {
            comps: [x, y, z],
            dim: 3,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        debug_assert!(dim == 2 || dim == 3);
        Self {
            comps: [0.0; 3],
            dim: dim as u8,
        }
    }

    /// Like [`BlochVector::new`] for internal callers that already hold a
    /// correctly sized slice.
    pub(crate) fn from_slice(comps: &[f64]) -> Self {
        let mut arr = [0.0; 3];
        arr[..comps.len()].copy_from_slice(comps);
        Self {
            comps: arr,
            dim: comps.len() as u8,
        }
    }

    /// Checks the vector describes a physical state.
    pub fn validate(self) -> Result<Self> {
        let n = self.norm();
        if n > 1.0 + STATE_TOL {
            return Err(Error::InvalidState(format!(
                "Bloch norm {n} exceeds 1 (vector {:?})",
                self.as_slice()
            )));
        }
        Ok(self)
    }

    pub fn is_valid_state(&self) -> bool {
        self.norm() <= 1.0 + STATE_TOL
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.comps[..self.dim as usize]
    }

    pub fn norm_sq(&self) -> f64 {
        self.as_slice().iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn dist_sq(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for c in out.comps.iter_mut() {
            *c *= s;
        }
        out
    }

    /// `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)`, with `⟨Y⟩ = 0` for a rebit.
    pub fn to_qubit(&self) -> [f64; 3] {
        match self.dim {
            2 => [self.comps[0], 0.0, self.comps[1]],
            _ => self.comps,
        }
    }

    /// Pure per [`PURE_THRESHOLD`].
    pub fn is_pure(&self) -> bool {
        self.norm() >= PURE_THRESHOLD
    }
}

/// Linear-inversion frequencies, one component `(2n − N)/N` per measured axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyVector(pub(crate) BlochVector);

impl FrequencyVector {
    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.norm_sq()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// The frequencies reinterpreted as a (possibly unphysical) Bloch vector.
    pub fn as_bloch(&self) -> BlochVector {
        self.0
    }
}

/// 2x2 Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    entries: [[Complex64; 2]; 2],
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to [`STATE_TOL`].
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let herm = (entries[0][1] - entries[1][0].conj()).norm();
        let im_diag = entries[0][0].im.abs().max(entries[1][1].im.abs());
        if herm > STATE_TOL || im_diag > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "matrix is not Hermitian (off-diagonal mismatch {herm:e}, imaginary diagonal {im_diag:e})"
            )));
        }
        let tr = entries[0][0].re + entries[1][1].re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, not 1")));
        }
        let rho = Self { entries };
        let (lo, _) = rho.eigenvalues();
        if lo < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {lo:e} is negative"
            )));
        }
        Ok(rho)
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0].re + self.entries[1][1].re
    }

    pub fn determinant(&self) -> f64 {
        (self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]).re
    }

    /// Eigenvalues in ascending order, from the 2x2 characteristic polynomial.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.entries[0][0].re;
        let d = self.entries[1][1].re;
        let b = self.entries[0][1];
        let half_gap = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        let mid = (a + d) / 2.0;
        (mid - half_gap, mid + half_gap)
    }
}

/// `ρ = (I + r·σ)/2`; a rebit embeds with `⟨Y⟩ = 0`.
pub fn bloch_to_density(r: &BlochVector) -> Result<DensityMatrix> {
    r.validate()?;
    let [x, y, z] = r.to_qubit();
    let entries = [
        [
            Complex64::new((1.0 + z) / 2.0, 0.0),
            Complex64::new(x / 2.0, -y / 2.0),
        ],
        [
            Complex64::new(x / 2.0, y / 2.0),
            Complex64::new((1.0 - z) / 2.0, 0.0),
        ],
    ];
    Ok(DensityMatrix { entries })
}

/// Inverse of [`bloch_to_density`]. Always returns a qubit 3-vector; use
/// [`density_to_bloch_rebit`] when the state is known to lie in the X-Z plane.
pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    let rho = DensityMatrix::new(rho.entries)?;
    let e = rho.entries;
    let x = 2.0 * e[1][0].re;
    let y = 2.0 * e[1][0].im;
    let z = (e[0][0].re - e[1][1].re).clamp(-1.0, 1.0);
    Ok(BlochVector::qubit(x, y, z))
}

/// Rebit projection of [`density_to_bloch`]; rejects states with `⟨Y⟩ ≠ 0`.
pub fn density_to_bloch_rebit(rho: &DensityMatrix) -> Result<BlochVector> {
    let [x, y, z] = density_to_bloch(rho)?.to_qubit();
    if y.abs() > STATE_TOL {
        return Err(Error::InvalidState(format!(
            "⟨Y⟩ = {y} is not zero for a rebit"
        )));
    }
    Ok(BlochVector::rebit(x, z))
}

/// `Tr ρ² = (1 + ‖r‖²)/2`.
pub fn purity(r: &BlochVector) -> f64 {
    (1.0 + r.norm_sq()) / 2.0
}

//! Discrete-grid priors and posteriors, posterior-mean estimates, and grid
//! search for the Bayes estimate under an arbitrary loss.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{Dataset, MeasurementDesign};
use crate::losses::LossSpec;
use crate::risk::{dataset_probability, grid_points};
use crate::states::{BlochVector, PURE_THRESHOLD};

/// Weighted point set on the Bloch ball; used for priors and posteriors alike.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriorGrid {
    points: Vec<BlochVector>,
    weights: Vec<f64>,
}

impl PriorGrid {
    /// Weights must be nonnegative and sum to 1 within 1e-12.
    pub fn new(points: Vec<BlochVector>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("prior has no points".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        let dim = points[0].dim();
        for p in &points {
            if p.dim() != dim {
                return Err(Error::InvalidState(
                    "prior mixes rebit and qubit points".into(),
                ));
            }
            p.validate()?;
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter(
                "prior weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "prior weights sum to {total}, not 1"
            )));
        }
        Ok(Self { points, weights })
    }

    /// Rescales arbitrary nonnegative weights to sum to 1.
    pub fn normalized(points: Vec<BlochVector>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "prior weights sum to {total}"
            )));
        }
        Self::new(points, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(points: Vec<BlochVector>) -> Result<Self> {
        let n = points.len();
        Self::normalized(points, vec![1.0; n])
    }

    pub fn points(&self) -> &[BlochVector] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }
}

/// Bayes-rule update `Pr(ρ | D) ∝ Pr(D | ρ) Pr(ρ)`.
pub fn posterior(prior: &PriorGrid, d: &Dataset, design: &MeasurementDesign) -> Result<PriorGrid> {
    d.check(design)?;
    let weights = prior
        .points
        .iter()
        .zip(&prior.weights)
        .map(|(p, w)| Ok(w * dataset_probability(d, p, design)?))
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::ImpossibleData);
    }
    Ok(PriorGrid {
        points: prior.points.clone(),
        weights: weights.into_iter().map(|w| w / total).collect(),
    })
}

pub fn posterior_mean(post: &PriorGrid) -> BlochVector {
    let mut acc = [0.0; 3];
    for (p, w) in post.points.iter().zip(&post.weights) {
        for (a, c) in acc.iter_mut().zip(p.as_slice()) {
            *a += w * c;
        }
    }
    BlochVector::from_slice(&acc[..post.dim()])
}

/// `Σ_j w_j L(ρ_j, candidate)`; points with zero weight never contribute.
pub fn posterior_risk(post: &PriorGrid, loss: LossSpec, candidate: &BlochVector) -> f64 {
    let mut total = 0.0;
    for (p, &w) in post.points.iter().zip(&post.weights) {
        if w > 0.0 {
            total += w * loss.eval(p, candidate);
        }
    }
    total
}

/// The candidate with the smallest posterior risk; ties go to the earliest.
pub fn bayes_estimate_grid(
    post: &PriorGrid,
    loss: LossSpec,
    candidates: &[BlochVector],
) -> Result<BlochVector> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidates".into()));
    }
    let risks: Vec<f64> = candidates
        .par_iter()
        .map(|c| posterior_risk(post, loss, c))
        .collect();
    let mut best: Option<usize> = None;
    for (i, &r) in risks.iter().enumerate() {
        if r.is_finite() && best.is_none_or(|b| r < risks[b]) {
            best = Some(i);
        }
    }
    best.map(|i| candidates[i]).ok_or(Error::DegenerateLoss)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Purity {
    Pure,
    Mixed,
}

pub fn purity_certificate(est: &BlochVector) -> Purity {
    if est.norm() >= PURE_THRESHOLD {
        Purity::Pure
    } else {
        Purity::Mixed
    }
}

/// Candidate radii: `step, 2·step, …, 1`, plus any extra radii, sorted and
/// deduplicated. The origin is always included separately by the grid builders.
pub fn candidate_radii(step: f64, extra: &[f64]) -> Result<Vec<f64>> {
    let mut radii: Vec<f64> = grid_points(0.0, 1.0, step)?
        .into_iter()
        .filter(|&r| r > 0.0)
        .collect();
    if radii.last() != Some(&1.0) {
        radii.push(1.0);
    }
    for &r in extra {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "candidate radius {r} outside (0, 1]"
            )));
        }
        radii.push(r);
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    Ok(radii)
}

/// Radii just inside the sphere added to the default candidate grids.
///
/// When a posterior holds a mixed state, the infidelity optimum is interior
/// but typically within 1e-2 to 1e-4 of the sphere, which a uniform 0.02
/// radial grid cannot resolve. All of these are below the pure threshold.
pub const BOUNDARY_REFINEMENT: [f64; 11] = [
    0.99, 0.995, 0.998, 0.999, 0.9995, 0.9998, 0.9999, 0.99995, 0.99998, 0.99999, 0.999999,
];

/// Radial step 0.02 plus [`BOUNDARY_REFINEMENT`], every 2°.
pub fn default_rebit_candidates() -> Vec<BlochVector> {
    let radii = candidate_radii(0.02, &BOUNDARY_REFINEMENT).expect("valid default radii");
    rebit_candidates(&radii, 2.0).expect("valid default angles")
}

/// Radial step 0.02 plus [`BOUNDARY_REFINEMENT`], along 400 Fibonacci directions.
pub fn default_qubit_candidates() -> Vec<BlochVector> {
    let radii = candidate_radii(0.02, &BOUNDARY_REFINEMENT).expect("valid default radii");
    qubit_candidates(&radii, &fibonacci_sphere(400))
}

/// Origin followed by every (radius, angle) pair on the rebit disk.
pub fn rebit_candidates(radii: &[f64], angular_step_deg: f64) -> Result<Vec<BlochVector>> {
    if !(angular_step_deg > 0.0 && angular_step_deg <= 360.0) {
        return Err(Error::InvalidParameter(format!(
            "angular step {angular_step_deg} must lie in (0, 360]"
        )));
    }
    let n_angles = (360.0 / angular_step_deg - 1e-9).ceil() as usize;
    let mut out = vec![BlochVector::rebit(0.0, 0.0)];
    for &r in radii {
        for i in 0..n_angles {
            let (c, s) = cos_sin_deg(i as f64 * angular_step_deg);
            out.push(BlochVector::rebit(r * c, r * s));
        }
    }
    Ok(out)
}

/// Exact on the axes, where `cos(90°)` would otherwise come out as 6e-17.
fn cos_sin_deg(deg: f64) -> (f64, f64) {
    match deg {
        0.0 => (1.0, 0.0),
        90.0 => (0.0, 1.0),
        180.0 => (-1.0, 0.0),
        270.0 => (0.0, -1.0),
        d => {
            let (s, c) = d.to_radians().sin_cos();
            (c, s)
        }
    }
}

/// `n` nearly uniform unit vectors on the sphere (Fibonacci lattice).
pub fn fibonacci_sphere(n: usize) -> Vec<BlochVector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let t = golden * i as f64;
            BlochVector::qubit(rho * t.cos(), rho * t.sin(), z)
        })
        .collect()
}

/// Origin followed by every radius times every direction.
pub fn qubit_candidates(radii: &[f64], directions: &[BlochVector]) -> Vec<BlochVector> {
    let mut out = vec![BlochVector::qubit(0.0, 0.0, 0.0)];
    for &r in radii {
        out.extend(directions.iter().map(|d| d.scale(r)));
    }
    out
}

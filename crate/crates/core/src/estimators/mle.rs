//! Maximum-likelihood estimation over the Bloch ball.
//!
//! With each axis measured independently, the log-likelihood separates into
//! per-axis binomial terms
//!
//! ```text
//! log L(r) = Σ_w n_w ln((1 + r_w)/2) + (N − n_w) ln((1 − r_w)/2)
//! ```
//!
//! whose unconstrained maximizer is the frequency vector. When that lies
//! outside the ball the maximizer sits on the sphere, and is found by
//! projected gradient ascent: Barzilai-Borwein trial steps, halved until the
//! Armijo condition holds.

use crate::error::{Error, Result};
use crate::states::BlochVector;

use super::{frequencies, Dataset, MeasurementDesign};

#[derive(Debug, Clone, Copy)]
pub struct MleOptions {
    /// Stop once the projected gradient norm falls to this value.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub armijo: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 100_000,
            armijo: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleSolution {
    pub estimate: BlochVector,
    pub iterations: usize,
    /// Projected gradient norm at `estimate`; zero for interior optima.
    pub residual: f64,
}

/// Log-likelihood of `d` at `r`, up to the dataset's binomial coefficients.
///
/// A term with zero count contributes nothing even when its probability is
/// zero; a zero probability with nonzero count gives `−∞`.
pub fn log_likelihood(r: &BlochVector, d: &Dataset, design: &MeasurementDesign) -> f64 {
    let n = design.shots() as f64;
    r.as_slice()
        .iter()
        .zip(d.counts())
        .map(|(&rw, &k)| {
            let k = k as f64;
            term(k, (1.0 + rw) / 2.0) + term(n - k, (1.0 - rw) / 2.0)
        })
        .sum()
}

fn term(count: f64, p: f64) -> f64 {
    if count == 0.0 {
        0.0
    } else if p <= 0.0 {
        f64::NEG_INFINITY
    } else {
        count * p.ln()
    }
}

fn gradient(r: &[f64], counts: &[u32], n: f64, out: &mut [f64]) {
    for ((g, &rw), &k) in out.iter_mut().zip(r).zip(counts) {
        let k = k as f64;
        let up = if k == 0.0 { 0.0 } else { k / (1.0 + rw) };
        let down = if n - k == 0.0 {
            0.0
        } else {
            (n - k) / (1.0 - rw)
        };
        *g = up - down;
    }
}

fn project(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 1.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Gradient with its outward normal part removed on the sphere.
fn projected_gradient_norm(r: &[f64], g: &[f64]) -> f64 {
    let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let outward: f64 = r.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() / norm;
    if norm >= 1.0 - 1e-12 && outward > 0.0 {
        r.iter()
            .zip(g)
            .map(|(a, b)| {
                let t = b - outward * a / norm;
                t * t
            })
            .sum::<f64>()
            .sqrt()
    } else {
        g.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// The likelihood maximizer over the closed unit ball.
pub fn mle(d: &Dataset, design: &MeasurementDesign) -> Result<BlochVector> {
    mle_with(d, design, &MleOptions::default()).map(|s| s.estimate)
}

/// [`mle`] with explicit solver settings and diagnostics.
pub fn mle_with(d: &Dataset, design: &MeasurementDesign, opts: &MleOptions) -> Result<MleSolution> {
    let f = frequencies(d, design)?.as_bloch();
    let norm = f.norm();
    if norm <= 1.0 {
        return Ok(MleSolution {
            estimate: f,
            iterations: 0,
            residual: 0.0,
        });
    }

    let dim = f.dim();
    let n = design.shots() as f64;
    let counts = d.counts();
    let ll = |v: &[f64]| log_likelihood(&BlochVector::from_slice(v), d, design);

    let mut x = f.scale(1.0 / norm).as_slice().to_vec();
    let mut fx = ll(&x);
    let mut g = vec![0.0; dim];
    let mut trial = vec![0.0; dim];
    let mut g_trial = vec![0.0; dim];
    let mut step = 1.0 / n;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;

    for it in 0..opts.max_iterations {
        iterations = it + 1;
        gradient(&x, counts, n, &mut g);
        residual = projected_gradient_norm(&x, &g);
        if residual <= opts.tolerance {
            return Ok(MleSolution {
                estimate: BlochVector::from_slice(&x),
                iterations: it,
                residual,
            });
        }

        // Barzilai-Borwein trial step from the last move; doubling otherwise.
        step = match &prev {
            Some((px, pg)) => {
                let (mut ss, mut sy) = (0.0, 0.0);
                for i in 0..dim {
                    let sd = x[i] - px[i];
                    ss += sd * sd;
                    sy -= sd * (g[i] - pg[i]);
                }
                if sy > 0.0 && ss > 0.0 {
                    (ss / sy).clamp(1e-12, 1e12)
                } else {
                    step * 2.0
                }
            }
            None => step,
        };
        let accepted = loop {
            for ((t, xi), gi) in trial.iter_mut().zip(&x).zip(&g) {
                *t = xi + step * gi;
            }
            project(&mut trial);
            let ft = ll(&trial);
            let ascent: f64 = trial
                .iter()
                .zip(&x)
                .zip(&g)
                .map(|((t, xi), gi)| gi * (t - xi))
                .sum();
            if ft.is_finite() {
                // Near the optimum the likelihood change drops below its own
                // rounding error and Armijo passes on noise; there a step must
                // shrink the residual instead.
                let in_noise = (ft - fx).abs() <= 16.0 * f64::EPSILON * fx.abs().max(1.0);
                let ok = if in_noise {
                    gradient(&trial, counts, n, &mut g_trial);
                    projected_gradient_norm(&trial, &g_trial) < residual
                } else {
                    ft >= fx + opts.armijo * ascent
                };
                if ok {
                    break true;
                }
            }
            step *= 0.5;
            if step < 1e-300 {
                break false;
            }
        };
        if !accepted || trial == x {
            // No representable ascent step remains.
            break;
        }
        prev = Some((x.clone(), g.clone()));
        std::mem::swap(&mut x, &mut trial);
        fx = ll(&x);
    }

    Err(Error::SolverFailure {
        last_iterate: x,
        residual,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rebit4() -> MeasurementDesign {
        MeasurementDesign::rebit(4).unwrap()
    }

    #[test]
    fn interior_optimum_is_linear_inversion() {
        let d = Dataset::new(&[2, 3]).unwrap();
        assert_eq!(mle(&d, &rebit4()).unwrap().as_slice(), &[0.0, 0.5]);
    }

    #[test]
    fn feasible_boundary_frequency_is_returned() {
        let d = Dataset::new(&[2, 4]).unwrap();
        assert_eq!(mle(&d, &rebit4()).unwrap().as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn corner_data_lands_on_sphere() {
        let d = Dataset::new(&[0, 4]).unwrap();
        let sol = mle_with(&d, &rebit4(), &MleOptions::default()).unwrap();
        assert!((sol.estimate.norm() - 1.0).abs() < 1e-9);
        assert!(sol.residual <= 1e-10);
    }

    #[test]
    fn zero_probability_with_counts_is_minus_infinity() {
        let d = Dataset::new(&[2, 3]).unwrap();
        let ll = log_likelihood(&BlochVector::rebit(0.0, 1.0), &d, &rebit4());
        assert_eq!(ll, f64::NEG_INFINITY);
        let d = Dataset::new(&[2, 4]).unwrap();
        assert!(log_likelihood(&BlochVector::rebit(0.0, 1.0), &d, &rebit4()).is_finite());
    }

    #[test]
    fn iteration_cap_reports_failure() {
        let d = Dataset::new(&[0, 4]).unwrap();
        let opts = MleOptions {
            max_iterations: 1,
            tolerance: 0.0,
            ..MleOptions::default()
        };
        match mle_with(&d, &rebit4(), &opts) {
            Err(Error::SolverFailure { last_iterate, .. }) => assert_eq!(last_iterate.len(), 2),
            other => panic!("expected solver failure, got {other:?}"),
        }
    }

    #[test]
    fn deterministic() {
        let design = MeasurementDesign::qubit(7).unwrap();
        let d = Dataset::new(&[0, 7, 1]).unwrap();
        let a = mle(&d, &design).unwrap();
        let b = mle(&d, &design).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
    }
}

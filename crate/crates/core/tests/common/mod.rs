//! Shared helpers and independent matrix oracles for the integration tests.
#![allow(dead_code)]

use hedgetomo::BlochVector;
use nalgebra::{Complex, Matrix2};
use proptest::prelude::*;

pub type CMat = Matrix2<Complex<f64>>;

pub fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

/// `(I + r·σ)/2` built directly from the Pauli matrices.
pub fn density(r: &BlochVector) -> CMat {
    let [x, y, z] = r.to_qubit();
    let id = CMat::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
    let sx = CMat::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
    let sy = CMat::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0));
    let sz = CMat::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0));
    (id + sx * c(x, 0.0) + sy * c(y, 0.0) + sz * c(z, 0.0)) * c(0.5, 0.0)
}

/// Ascending eigenvalues and matching eigenvector columns of a Hermitian matrix.
pub fn eigh(m: &CMat) -> ([f64; 2], CMat) {
    let e = m.symmetric_eigen();
    let (v0, v1) = (e.eigenvalues[0], e.eigenvalues[1]);
    let cols = e.eigenvectors;
    if v0 <= v1 {
        ([v0, v1], cols)
    } else {
        let swapped =
            CMat::from_columns(&[cols.column(1).into_owned(), cols.column(0).into_owned()]);
        ([v1, v0], swapped)
    }
}

pub fn apply_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let d = CMat::new(
        c(f(vals[0]), 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(f(vals[1]), 0.0),
    );
    vecs * d * vecs.adjoint()
}

/// `Tr √(√ρ σ √ρ)` by eigendecomposition.
pub fn fidelity_oracle(rho: &CMat, sigma: &CMat) -> f64 {
    let s = apply_fn(rho, |v| v.max(0.0).sqrt());
    let m = s * sigma * s;
    let m = (m + m.adjoint()) * c(0.5, 0.0);
    let (vals, _) = eigh(&m);
    vals.iter().map(|v| v.max(0.0).sqrt()).sum()
}

/// `Tr ρ(ln ρ − ln σ)` by eigendecomposition; `None` when σ is too close to singular.
pub fn relative_entropy_oracle(rho: &CMat, sigma: &CMat) -> Option<f64> {
    let (rv, _) = eigh(rho);
    let (sv, svec) = eigh(sigma);
    if sv[0] < 1e-9 {
        return None;
    }
    let neg_entropy: f64 = rv.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum();
    let mut cross = 0.0;
    for (j, mu) in sv.iter().enumerate() {
        let v = svec.column(j);
        let w = (v.adjoint() * rho * v)[(0, 0)].re;
        cross += w * mu.ln();
    }
    Some(neg_entropy - cross)
}

pub fn hs_oracle(rho: &CMat, sigma: &CMat) -> f64 {
    let d = rho - sigma;
    (d * d).trace().re
}

/// Uniformly oriented Bloch vector of the given dimension with radius in `[0, 1]`.
pub fn bloch_strategy(dim: usize) -> impl Strategy<Value = BlochVector> {
    (prop::collection::vec(-1.0f64..1.0, dim), 0.0f64..=1.0).prop_map(move |(v, radius)| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n < 1e-6 {
            BlochVector::zeros(dim)
        } else {
            let scaled: Vec<f64> = v.iter().map(|x| x * radius / n).collect();
            BlochVector::new(&scaled).unwrap()
        }
    })
}

pub fn any_state() -> impl Strategy<Value = BlochVector> {
    prop_oneof![bloch_strategy(2), bloch_strategy(3)]
}

pub fn pure_strategy(dim: usize) -> impl Strategy<Value = BlochVector> {
    prop::collection::vec(-1.0f64..1.0, dim)
        .prop_filter("nonzero direction", |v| {
            v.iter().map(|x| x * x).sum::<f64>() > 1e-4
        })
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            BlochVector::new(&v.iter().map(|x| x / n).collect::<Vec<_>>()).unwrap()
        })
}

pub mod posteriors {
    use hedgetomo::bayes::{posterior, PriorGrid};
    use hedgetomo::risk::enumerate_datasets;
    use hedgetomo::{BlochVector, MeasurementDesign};
    use rand::rngs::StdRng;
    use rand::Rng;
    use rand_distr::{Dirichlet, Distribution, StandardNormal};

    pub fn random_pure(rng: &mut StdRng, dim: usize) -> BlochVector {
        loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let n = v.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
            if n > 1e-6 {
                return BlochVector::new(&v.iter().map(|x| x / n).collect::<Vec<_>>()).unwrap();
            }
        }
    }

    /// Dirichlet(1, …, 1) weights on 2 to 4 random pure states.
    pub fn dirichlet_pure(rng: &mut StdRng, dim: usize) -> PriorGrid {
        let k = rng.gen_range(2..=4);
        let points = (0..k).map(|_| random_pure(rng, dim)).collect();
        let weights = Dirichlet::new(&vec![1.0; k]).unwrap().sample(rng);
        PriorGrid::normalized(points, weights).unwrap()
    }

    /// Uniform prior on 50 random pure qubit states updated on a random
    /// qubit N = 10 dataset.
    pub fn updated_pure(rng: &mut StdRng) -> PriorGrid {
        let design = MeasurementDesign::qubit(10).unwrap();
        let datasets = enumerate_datasets(&design);
        loop {
            let prior = PriorGrid::uniform((0..50).map(|_| random_pure(rng, 3)).collect()).unwrap();
            let d = &datasets[rng.gen_range(0..datasets.len())];
            if let Ok(post) = posterior(&prior, d, &design) {
                return post;
            }
        }
    }

    /// `pure` with `mixed_weight` moved onto the maximally mixed state.
    pub fn with_mixed_point(pure: &PriorGrid, mixed_weight: f64) -> PriorGrid {
        let mut points = pure.points().to_vec();
        let mut weights: Vec<f64> = pure
            .weights()
            .iter()
            .map(|w| w * (1.0 - mixed_weight))
            .collect();
        points.push(BlochVector::zeros(pure.dim()));
        weights.push(mixed_weight);
        PriorGrid::normalized(points, weights).unwrap()
    }
}

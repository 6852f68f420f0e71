mod common;

use common::posteriors::*;
use hedgetomo::bayes::{
    bayes_estimate_grid, default_qubit_candidates, default_rebit_candidates, posterior,
    posterior_mean, posterior_risk, purity_certificate, rebit_candidates, PriorGrid, Purity,
    BOUNDARY_REFINEMENT,
};
use hedgetomo::risk::enumerate_datasets;
use hedgetomo::{BlochVector, LossSpec, MeasurementDesign};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use statrs::distribution::{Binomial, Discrete};

fn random_mixed_posterior(rng: &mut StdRng, dim: usize) -> PriorGrid {
    let k = rng.gen_range(1..=6);
    let points: Vec<BlochVector> = (0..k)
        .map(|_| random_pure(rng, dim).scale(rng.gen_range(0.0..1.0)))
        .collect();
    let weights = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
    PriorGrid::normalized(points, weights).unwrap()
}

#[test]
fn posterior_matches_bayes_rule() {
    let mut rng = StdRng::seed_from_u64(1);
    let design = MeasurementDesign::qubit(5).unwrap();
    let datasets = enumerate_datasets(&design);
    for _ in 0..50 {
        let prior = random_mixed_posterior(&mut rng, 3);
        let d = &datasets[rng.gen_range(0..datasets.len())];
        let post = posterior(&prior, d, &design).unwrap();
        let unnorm: Vec<f64> = prior
            .points()
            .iter()
            .zip(prior.weights())
            .map(|(p, w)| {
                w * d
                    .counts()
                    .iter()
                    .zip(p.as_slice())
                    .map(|(&k, &x)| Binomial::new((1.0 + x) / 2.0, 5).unwrap().pmf(k as u64))
                    .product::<f64>()
            })
            .collect();
        let total: f64 = unnorm.iter().sum();
        for (got, u) in post.weights().iter().zip(&unnorm) {
            assert!((got - u / total).abs() < 1e-12);
        }
    }
}

#[test]
fn posterior_mean_minimizes_hs_risk_by_the_bregman_identity() {
    let mut rng = StdRng::seed_from_u64(2);
    for i in 0..100 {
        let post = random_mixed_posterior(&mut rng, if i % 2 == 0 { 2 } else { 3 });
        let mean = posterior_mean(&post);
        let base = posterior_risk(&post, LossSpec::HilbertSchmidt, &mean);
        for _ in 0..10 {
            let c = random_pure(&mut rng, post.dim()).scale(rng.gen_range(0.0..1.0));
            let excess = posterior_risk(&post, LossSpec::HilbertSchmidt, &c) - base;
            assert!((excess - 0.5 * c.dist_sq(&mean)).abs() < 1e-12);
        }
    }
}

#[test]
fn posterior_mean_minimizes_relative_entropy_risk() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..100 {
        let post = random_mixed_posterior(&mut rng, 3);
        let mean = posterior_mean(&post);
        let base = posterior_risk(&post, LossSpec::RelativeEntropy, &mean);
        for _ in 0..10 {
            let c = random_pure(&mut rng, 3).scale(rng.gen_range(0.0..0.999));
            assert!(posterior_risk(&post, LossSpec::RelativeEntropy, &c) >= base - 1e-12);
        }
    }
}

#[test]
fn default_candidate_grids() {
    let radii = 50 + BOUNDARY_REFINEMENT.len();
    assert_eq!(default_rebit_candidates().len(), 1 + radii * 180);
    assert_eq!(default_qubit_candidates().len(), 1 + radii * 400);
    assert!(BOUNDARY_REFINEMENT.iter().all(|&r| r < 1.0 - 1e-9));
}

#[test]
fn infidelity_estimate_is_pure_for_random_pure_posteriors() {
    let mut rng = StdRng::seed_from_u64(4);
    let rebit = default_rebit_candidates();
    for _ in 0..10 {
        let post = dirichlet_pure(&mut rng, 2);
        let est = bayes_estimate_grid(&post, LossSpec::Infidelity, &rebit).unwrap();
        assert_eq!(purity_certificate(&est), Purity::Pure);
    }
}

#[test]
fn infidelity_estimate_is_mixed_with_weight_on_a_mixed_state() {
    let mut rng = StdRng::seed_from_u64(5);
    let rebit = default_rebit_candidates();
    for _ in 0..10 {
        let post = with_mixed_point(&dirichlet_pure(&mut rng, 2), 0.05);
        let est = bayes_estimate_grid(&post, LossSpec::Infidelity, &rebit).unwrap();
        assert_eq!(purity_certificate(&est), Purity::Mixed);
    }
}

/// Three pure rebit states 120° apart: with the non-squared fidelity the
/// optimal report is the maximally mixed state, not a pure one.
#[test]
fn symmetric_pure_posterior_can_favor_the_center() {
    let points: Vec<BlochVector> = (0..3)
        .map(|i| {
            let t = (90.0 + 120.0 * i as f64).to_radians();
            BlochVector::rebit(t.cos(), t.sin())
        })
        .collect();
    let post = PriorGrid::uniform(points).unwrap();
    let origin = BlochVector::rebit(0.0, 0.0);
    let at_origin = posterior_risk(&post, LossSpec::Infidelity, &origin);
    assert!((at_origin - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
    let est =
        bayes_estimate_grid(&post, LossSpec::Infidelity, &default_rebit_candidates()).unwrap();
    assert_eq!(est, origin);
}

#[test]
fn mixed_weight_pulls_the_estimate_inside() {
    let post = PriorGrid::new(
        vec![BlochVector::rebit(0.0, 1.0), BlochVector::rebit(0.0, 0.0)],
        vec![0.9, 0.1],
    )
    .unwrap();
    let loss = |r: f64| posterior_risk(&post, LossSpec::Infidelity, &BlochVector::rebit(0.0, r));
    let mut oracle = (0.0, f64::INFINITY);
    for i in 0..=2_000_000 {
        let r = i as f64 * 5e-7;
        let l = loss(r);
        if l < oracle.1 {
            oracle = (r, l);
        }
    }
    assert!((oracle.0 - 0.98944).abs() < 1e-5);
    let candidates = rebit_candidates(&[0.98, 0.99, 0.995, 1.0], 2.0).unwrap();
    let est = bayes_estimate_grid(&post, LossSpec::Infidelity, &candidates).unwrap();
    assert_eq!(purity_certificate(&est), Purity::Mixed);
    assert!((est.norm() - oracle.0).abs() <= 0.01);
    let full =
        bayes_estimate_grid(&post, LossSpec::Infidelity, &default_rebit_candidates()).unwrap();
    assert!((full.norm() - oracle.0).abs() <= 0.01);
    assert_eq!(purity_certificate(&full), Purity::Mixed);
}

#[test]
fn qubit_witnesses_use_the_fibonacci_grid() {
    let mut rng = StdRng::seed_from_u64(6);
    let qubit = default_qubit_candidates();
    let post = updated_pure(&mut rng);
    let est = bayes_estimate_grid(&post, LossSpec::Infidelity, &qubit).unwrap();
    assert_eq!(purity_certificate(&est), Purity::Pure);
    let mixed = with_mixed_point(&post, 0.05);
    let est = bayes_estimate_grid(&mixed, LossSpec::Infidelity, &qubit).unwrap();
    assert_eq!(purity_certificate(&est), Purity::Mixed);
}

#[test]
fn point_mass_survives_consistent_data() {
    let mut rng = StdRng::seed_from_u64(7);
    let design = MeasurementDesign::rebit(6).unwrap();
    for _ in 0..20 {
        let r = random_mixed_posterior(&mut rng, 2).points()[0];
        let post = PriorGrid::new(vec![r], vec![1.0]).unwrap();
        for d in enumerate_datasets(&design).iter().step_by(5) {
            let out = posterior(&post, d, &design).unwrap();
            assert_eq!(out.weights(), &[1.0]);
        }
    }
}

#[test]
fn hs_grid_estimate_is_within_a_step_of_the_mean() {
    let mut rng = StdRng::seed_from_u64(8);
    let candidates =
        rebit_candidates(&hedgetomo::bayes::candidate_radii(0.01, &[]).unwrap(), 1.0).unwrap();
    for _ in 0..20 {
        let post = random_mixed_posterior(&mut rng, 2);
        let mean = posterior_mean(&post);
        let est = bayes_estimate_grid(&post, LossSpec::HilbertSchmidt, &candidates).unwrap();
        // Cell diameter bound: radial step plus arc length of one angular step.
        assert!(est.dist_sq(&mean).sqrt() <= 0.01 + 1f64.to_radians());
    }
}

//! Exact frequentist risk by enumerating every dataset a design can produce.
//!
//! Estimates depend only on the dataset, so each (estimator, design) pair is
//! evaluated once into an [`EstimateTable`] and reused for every true state.
//! Sums always run in dataset enumeration order, which keeps results
//! bit-identical regardless of how many threads evaluate the grid.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::estimators::{default_h, Dataset, EstimatorSpec, MeasurementDesign};
use crate::losses::LossSpec;
use crate::states::BlochVector;

/// All `(N + 1)^axes` datasets in lexicographic order of their counts.
pub fn enumerate_datasets(design: &MeasurementDesign) -> Vec<Dataset> {
    let k = design.num_axes();
    let base = design.shots() + 1;
    let mut out = Vec::with_capacity(design.num_datasets());
    let mut counts = vec![0u32; k];
    for _ in 0..design.num_datasets() {
        out.push(Dataset::new(&counts).expect("2 or 3 axes"));
        for digit in (0..k).rev() {
            counts[digit] += 1;
            if counts[digit] < base {
                break;
            }
            counts[digit] = 0;
        }
    }
    out
}

/// Position of `d` in [`enumerate_datasets`].
pub fn dataset_index(d: &Dataset, design: &MeasurementDesign) -> usize {
    let base = design.shots() as usize + 1;
    d.counts().iter().fold(0, |acc, &c| acc * base + c as usize)
}

fn log_binomial_pmf(shots: u32, k: u32, r: f64) -> f64 {
    let up = (1.0 + r) / 2.0;
    let down = (1.0 - r) / 2.0;
    let part = |count: u32, p: f64| {
        if count == 0 {
            0.0
        } else if p <= 0.0 {
            f64::NEG_INFINITY
        } else {
            count as f64 * p.ln()
        }
    };
    ln_binomial(shots as u64, k as u64) + part(k, up) + part(shots - k, down)
}

/// `Pr(n "+1" outcomes out of N)` for every `n`, with `p = (1 + r)/2`.
pub fn binomial_pmf_table(shots: u32, r: f64) -> Vec<f64> {
    (0..=shots)
        .map(|k| log_binomial_pmf(shots, k, r).exp())
        .collect()
}

/// Born-rule probability of a dataset: the product of per-axis binomials,
/// accumulated in log space.
pub fn dataset_probability(
    d: &Dataset,
    r: &BlochVector,
    design: &MeasurementDesign,
) -> Result<f64> {
    design.check_state(r)?;
    d.check(design)?;
    let log_p: f64 = d
        .counts()
        .iter()
        .zip(r.as_slice())
        .map(|(&k, &rw)| log_binomial_pmf(design.shots(), k, rw))
        .sum();
    Ok(log_p.exp())
}

/// Calls `visit(index, probability)` for every dataset with nonzero
/// probability, in enumeration order.
fn for_each_weight(design: &MeasurementDesign, r: &BlochVector, mut visit: impl FnMut(usize, f64)) {
    let pmfs: Vec<Vec<f64>> = r
        .as_slice()
        .iter()
        .map(|&rw| binomial_pmf_table(design.shots(), rw))
        .collect();
    let base = design.shots() as usize + 1;
    match pmfs.as_slice() {
        [px, pz] => {
            for (i, &a) in px.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (j, &b) in pz.iter().enumerate() {
                    let p = a * b;
                    if p != 0.0 {
                        visit(i * base + j, p);
                    }
                }
            }
        }
        [px, py, pz] => {
            for (i, &a) in px.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (j, &b) in py.iter().enumerate() {
                    let ab = a * b;
                    if ab == 0.0 {
                        continue;
                    }
                    let row = (i * base + j) * base;
                    for (k, &c) in pz.iter().enumerate() {
                        let p = ab * c;
                        if p != 0.0 {
                            visit(row + k, p);
                        }
                    }
                }
            }
        }
        _ => unreachable!("designs have 2 or 3 axes"),
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Risk accumulator honouring `0 · ∞ = 0`: the caller only feeds terms with
/// nonzero probability, and any infinite loss among them makes the risk infinite.
#[derive(Debug, Default, Clone, Copy)]
struct RiskSum {
    total: CompensatedSum,
    infinite: bool,
}

impl RiskSum {
    fn add(&mut self, p: f64, loss: f64) {
        if loss.is_infinite() {
            self.infinite = true;
        } else {
            self.total.add(p * loss);
        }
    }

    fn value(&self) -> f64 {
        if self.infinite {
            f64::INFINITY
        } else {
            self.total.value()
        }
    }
}

/// The estimate for every dataset of a design, in enumeration order.
#[derive(Debug, Clone)]
pub struct EstimateTable {
    spec: EstimatorSpec,
    design: MeasurementDesign,
    estimates: Vec<BlochVector>,
}

impl EstimateTable {
    pub fn build(spec: EstimatorSpec, design: &MeasurementDesign) -> Result<Self> {
        spec.validate()?;
        let estimates = enumerate_datasets(design)
            .par_iter()
            .map(|d| spec.estimate(d, design))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            spec,
            design: design.clone(),
            estimates,
        })
    }

    pub fn spec(&self) -> EstimatorSpec {
        self.spec
    }

    pub fn design(&self) -> &MeasurementDesign {
        &self.design
    }

    pub fn estimates(&self) -> &[BlochVector] {
        &self.estimates
    }

    pub fn get(&self, d: &Dataset) -> BlochVector {
        self.estimates[dataset_index(d, &self.design)]
    }
}

fn check_loss_applies(spec: EstimatorSpec, loss: LossSpec) -> Result<()> {
    if loss.needs_physical_estimate() && !spec.is_physical() {
        return Err(Error::InvalidParameter(format!(
            "{loss} loss is undefined for {spec} estimates outside the Bloch ball"
        )));
    }
    Ok(())
}

/// `Σ_D Pr(D | r) L(r, estimate(D))`, recomputing every estimate.
///
/// [`RiskEngine::risk`] gives bit-identical results from its cache.
pub fn risk(
    r: &BlochVector,
    estimator: EstimatorSpec,
    loss: LossSpec,
    design: &MeasurementDesign,
) -> Result<f64> {
    design.check_state(r)?;
    estimator.validate()?;
    check_loss_applies(estimator, loss)?;
    let datasets = enumerate_datasets(design);
    let mut acc = RiskSum::default();
    let mut failure = None;
    for_each_weight(design, r, |idx, p| {
        if failure.is_some() {
            return;
        }
        match estimator.estimate(&datasets[idx], design) {
            Ok(est) => acc.add(p, loss.eval(r, &est)),
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(acc.value()),
    }
}

/// Risks of two estimators at one true state.
///
/// `diff` is `Σ_D Pr(D | r) [L_a(D) − L_b(D)]`, accumulated term by term so
/// datasets on which both estimators agree contribute exactly zero. It is
/// `None` when either risk diverges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairRisk {
    pub risk_a: f64,
    pub risk_b: f64,
    pub diff: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskRecord {
    pub true_state: BlochVector,
    pub estimator: EstimatorSpec,
    pub loss: LossSpec,
    pub shots: u32,
    pub risk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceRow {
    pub coordinate: f64,
    pub a: RiskRecord,
    pub b: RiskRecord,
    /// Unscaled `R_a − R_b`, see [`PairRisk::diff`].
    pub diff: Option<f64>,
    /// `N (R_a − R_b)`; `None` when either risk is infinite.
    pub scaled_diff: Option<f64>,
}

impl SurfaceRow {
    /// `(R_a − R_b) / R_a`.
    pub fn relative_diff(&self) -> Option<f64> {
        self.diff.map(|d| d / self.a.risk)
    }
}

/// Risk comparison of two estimators along a ray of true states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskSurface {
    pub axis_label: String,
    pub axis: BlochVector,
    pub rows: Vec<SurfaceRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HedgeScanRow {
    pub h: f64,
    pub risk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HedgeScan {
    pub rows: Vec<HedgeScanRow>,
    pub argmin_h: f64,
    pub argmin_risk: f64,
    /// `1/N − 1/N²`, or `None` when that is not a legal strength (`N = 1`).
    pub default_h: Option<f64>,
    pub default_h_risk: Option<f64>,
}

/// Polar sampling of the rebit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskGrid {
    pub radii: Vec<f64>,
    pub angles_deg: Vec<f64>,
}

impl DiskGrid {
    pub fn new(radial_step: f64, angular_step_deg: f64) -> Result<Self> {
        if !(angular_step_deg > 0.0 && angular_step_deg <= 360.0) {
            return Err(Error::InvalidParameter(format!(
                "angular step {angular_step_deg} must lie in (0, 360]"
            )));
        }
        let n_angles = (360.0 / angular_step_deg - 1e-9).ceil() as usize;
        Ok(Self {
            radii: grid_points(0.0, 1.0, radial_step)?,
            angles_deg: (0..n_angles).map(|i| i as f64 * angular_step_deg).collect(),
        })
    }
}

impl Default for DiskGrid {
    /// Radial step 0.01 and angular step 2°.
    fn default() -> Self {
        Self::new(0.01, 2.0).expect("valid default grid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskCell {
    pub angle_deg: f64,
    pub radius: f64,
    pub risk_a: f64,
    pub risk_b: f64,
    pub diff: Option<f64>,
}

/// Angle-major list of disk cells (every radius for the first angle, then the next).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskField {
    pub cells: Vec<DiskCell>,
}

/// `start, start + step, …` up to and including `stop` (within 1e-9 of a step).
pub fn grid_points(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::InvalidParameter(format!(
            "bad grid {start}:{stop}:{step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|i| snap(start + i as f64 * step, step).min(stop))
        .collect())
}

/// Replaces accumulated roundoff such as `0.30000000000000004` by the
/// nearest double to the intended decimal.
fn snap(x: f64, step: f64) -> f64 {
    let decimal: f64 = format!("{x:.12e}").parse().expect("formatted float");
    if (decimal - x).abs() <= 1e-6 * step {
        decimal
    } else {
        x
    }
}

/// `1e-3, 2e-3, …, 0.499`.
pub fn default_h_grid() -> Vec<f64> {
    (1..500).map(|i| snap(i as f64 * 1e-3, 1e-3)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey(u8, u64);

impl From<EstimatorSpec> for CacheKey {
    fn from(spec: EstimatorSpec) -> Self {
        match spec {
            EstimatorSpec::LinearInversion => CacheKey(0, 0),
            EstimatorSpec::ConstrainedLs => CacheKey(1, 0),
            EstimatorSpec::Hedged(h) => CacheKey(2, h.to_bits()),
            EstimatorSpec::Mle => CacheKey(3, 0),
            EstimatorSpec::HedgedMle(h) => CacheKey(4, h.to_bits()),
        }
    }
}

/// Risk evaluation for one design, caching estimate tables per estimator.
///
/// Grid evaluations run on the current rayon pool.
#[derive(Debug)]
pub struct RiskEngine {
    design: MeasurementDesign,
    cache: Mutex<HashMap<CacheKey, Arc<EstimateTable>>>,
}

impl RiskEngine {
    pub fn new(design: MeasurementDesign) -> Self {
        Self {
            design,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn design(&self) -> &MeasurementDesign {
        &self.design
    }

    pub fn estimates(&self, spec: EstimatorSpec) -> Result<Arc<EstimateTable>> {
        let key = CacheKey::from(spec);
        if let Some(t) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(EstimateTable::build(spec, &self.design)?);
        self.cache
            .lock()
            .expect("cache lock")
            .entry(key)
            .or_insert_with(|| Arc::clone(&table));
        Ok(table)
    }

    pub fn risk(&self, r: &BlochVector, spec: EstimatorSpec, loss: LossSpec) -> Result<f64> {
        self.design.check_state(r)?;
        check_loss_applies(spec, loss)?;
        let table = self.estimates(spec)?;
        Ok(risk_from_table(&self.design, r, &table, loss))
    }

    pub fn pair_risk(
        &self,
        r: &BlochVector,
        a: EstimatorSpec,
        b: EstimatorSpec,
        loss: LossSpec,
    ) -> Result<PairRisk> {
        self.design.check_state(r)?;
        check_loss_applies(a, loss)?;
        check_loss_applies(b, loss)?;
        let ta = self.estimates(a)?;
        let tb = self.estimates(b)?;
        Ok(pair_from_tables(&self.design, r, &ta, &tb, loss))
    }

    /// `N (R_a − R_b)`; an error when either risk is infinite.
    pub fn scaled_risk_difference(
        &self,
        r: &BlochVector,
        a: EstimatorSpec,
        b: EstimatorSpec,
        loss: LossSpec,
    ) -> Result<f64> {
        let pair = self.pair_risk(r, a, b, loss)?;
        pair.diff
            .map(|d| self.design.shots() as f64 * d)
            .ok_or_else(|| {
                Error::UndefinedDifference(format!(
                    "risks {} ({a}) and {} ({b}) are not both finite",
                    pair.risk_a, pair.risk_b
                ))
            })
    }

    /// Compares `a` and `b` at `radius · axis` for every radius.
    pub fn sweep(
        &self,
        axis: &BlochVector,
        radii: &[f64],
        a: EstimatorSpec,
        b: EstimatorSpec,
        loss: LossSpec,
    ) -> Result<RiskSurface> {
        if (axis.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "sweep axis {:?} is not a unit vector",
                axis.as_slice()
            )));
        }
        if axis.dim() != self.design.num_axes() {
            return Err(Error::InvalidParameter(format!(
                "{}-component axis used with a {} design",
                axis.dim(),
                self.design.label()
            )));
        }
        if radii.is_empty() {
            return Err(Error::InvalidParameter("no radii to sweep".into()));
        }
        if radii.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::InvalidParameter("radii must lie in [0, 1]".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "radii must be strictly increasing".into(),
            ));
        }
        check_loss_applies(a, loss)?;
        check_loss_applies(b, loss)?;
        let ta = self.estimates(a)?;
        let tb = self.estimates(b)?;
        let shots = self.design.shots();
        let rows = radii
            .par_iter()
            .map(|&radius| {
                let state = axis.scale(radius);
                let pair = pair_from_tables(&self.design, &state, &ta, &tb, loss);
                let record = |estimator, risk| RiskRecord {
                    true_state: state,
                    estimator,
                    loss,
                    shots,
                    risk,
                };
                SurfaceRow {
                    coordinate: radius,
                    a: record(a, pair.risk_a),
                    b: record(b, pair.risk_b),
                    diff: pair.diff,
                    scaled_diff: pair.diff.map(|d| shots as f64 * d),
                }
            })
            .collect();
        Ok(RiskSurface {
            axis_label: axis_label(axis),
            axis: *axis,
            rows,
        })
    }

    /// Risk of `Hedged(h)` at `r` for every `h` in the grid.
    pub fn hedge_scan(&self, r: &BlochVector, h_grid: &[f64], loss: LossSpec) -> Result<HedgeScan> {
        self.design.check_state(r)?;
        if h_grid.is_empty() {
            return Err(Error::InvalidParameter("empty hedging grid".into()));
        }
        let specs = h_grid
            .iter()
            .map(|&h| EstimatorSpec::hedged(h))
            .collect::<Result<Vec<_>>>()?;
        let rows = specs
            .par_iter()
            .map(|&spec| {
                let table = EstimateTable::build(spec, &self.design)?;
                Ok(HedgeScanRow {
                    h: spec.hedging_strength().expect("hedged"),
                    risk: risk_from_table(&self.design, r, &table, loss),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        // First minimum in grid order.
        let best = rows.iter().fold(
            rows[0],
            |best, row| if row.risk < best.risk { *row } else { best },
        );
        let reference = default_h(self.design.shots())
            .ok()
            .filter(|&h| EstimatorSpec::hedged(h).is_ok());
        let default_h_risk = match reference {
            Some(h) => Some(self.risk(r, EstimatorSpec::Hedged(h), loss)?),
            None => None,
        };
        Ok(HedgeScan {
            rows,
            argmin_h: best.h,
            argmin_risk: best.risk,
            default_h: reference,
            default_h_risk,
        })
    }

    /// `R_a − R_b` over a polar grid of the rebit disk.
    ///
    /// Angles are measured from the X axis towards Z.
    pub fn risk_disk(
        &self,
        grid: &DiskGrid,
        a: EstimatorSpec,
        b: EstimatorSpec,
        loss: LossSpec,
    ) -> Result<DiskField> {
        if !self.design.is_rebit() {
            return Err(Error::InvalidParameter(
                "the disk field needs a rebit design".into(),
            ));
        }
        if grid.radii.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::InvalidParameter("radii must lie in [0, 1]".into()));
        }
        check_loss_applies(a, loss)?;
        check_loss_applies(b, loss)?;
        let ta = self.estimates(a)?;
        let tb = self.estimates(b)?;
        let points: Vec<(f64, f64)> = grid
            .angles_deg
            .iter()
            .flat_map(|&t| grid.radii.iter().map(move |&r| (t, r)))
            .collect();
        let cells = points
            .par_iter()
            .map(|&(angle_deg, radius)| {
                let t = angle_deg.to_radians();
                let state = BlochVector::rebit(radius * t.cos(), radius * t.sin());
                let pair = pair_from_tables(&self.design, &state, &ta, &tb, loss);
                DiskCell {
                    angle_deg,
                    radius,
                    risk_a: pair.risk_a,
                    risk_b: pair.risk_b,
                    diff: pair.diff,
                }
            })
            .collect();
        Ok(DiskField { cells })
    }
}

fn risk_from_table(
    design: &MeasurementDesign,
    r: &BlochVector,
    table: &EstimateTable,
    loss: LossSpec,
) -> f64 {
    let est = table.estimates();
    let mut acc = RiskSum::default();
    for_each_weight(design, r, |idx, p| acc.add(p, loss.eval(r, &est[idx])));
    acc.value()
}

fn pair_from_tables(
    design: &MeasurementDesign,
    r: &BlochVector,
    ta: &EstimateTable,
    tb: &EstimateTable,
    loss: LossSpec,
) -> PairRisk {
    let (ea, eb) = (ta.estimates(), tb.estimates());
    let mut acc_a = RiskSum::default();
    let mut acc_b = RiskSum::default();
    let mut acc_d = CompensatedSum::default();
    for_each_weight(design, r, |idx, p| {
        let la = loss.eval(r, &ea[idx]);
        let lb = if ea[idx] == eb[idx] {
            la
        } else {
            loss.eval(r, &eb[idx])
        };
        acc_a.add(p, la);
        acc_b.add(p, lb);
        if la.is_finite() && lb.is_finite() && la != lb {
            acc_d.add(p * (la - lb));
        }
    });
    let (risk_a, risk_b) = (acc_a.value(), acc_b.value());
    let diff = (risk_a.is_finite() && risk_b.is_finite()).then(|| acc_d.value());
    PairRisk {
        risk_a,
        risk_b,
        diff,
    }
}

fn axis_label(axis: &BlochVector) -> String {
    let parts: Vec<String> = axis.as_slice().iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(","))
}

use std::fmt::Write as _;

use hedgetomo::bayes::{
    bayes_estimate_grid, default_qubit_candidates, default_rebit_candidates, posterior,
    posterior_mean, posterior_risk, purity_certificate, PriorGrid, Purity,
};
use hedgetomo::estimators::frequencies;
use hedgetomo::risk::{default_h_grid, enumerate_datasets, DiskGrid, EstimateTable};
use hedgetomo::states::purity;
use hedgetomo::{BlochVector, LossSpec, MeasurementDesign, RiskEngine};
use serde_json::{json, Value};

use crate::args::{BayesArgs, Command, DiskArgs, EstimateArgs, HedgeScanArgs, RiskArgs, SweepArgs};
use crate::error::{input, CliError, CliResult};
use crate::output::{emit, json_num, json_opt, num, opt_num, sig12};
use crate::parse::{self, Format};
use crate::settings::Settings;

pub const SWEEP_HEADER: &str =
    "design,N,axis_x,axis_y,axis_z,radius,estimator_a,estimator_b,loss,risk_a,risk_b,scaled_diff";
pub const DISK_HEADER: &str = "design,N,angle_deg,radius,risk_a,risk_b,diff";
pub const HEDGE_HEADER: &str = "design,N,h,risk";
pub const RISK_HEADER: &str = "design,N,state_x,state_y,state_z,estimator,loss,risk";
pub const BATCH_HEADER: &str = "design,N,counts,estimator,f_x,f_y,f_z,est_x,est_y,est_z,purity";

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Estimate(a) => estimate(a),
        Command::Risk(a) => risk(a),
        Command::Sweep(a) => sweep(a),
        Command::Disk(a) => disk(a),
        Command::HedgeScan(a) => hedge_scan(a),
        Command::Bayes(a) => bayes(a),
    }
}

fn flag(set: bool) -> Option<String> {
    set.then(|| "true".to_string())
}

/// Runs `f` on a dedicated pool when `--jobs` is given.
fn with_jobs<T: Send>(s: &Settings, f: impl FnOnce() -> CliResult<T> + Send) -> CliResult<T> {
    match parse::jobs(s.get("jobs"))? {
        None => f(),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| CliError::Io(format!("cannot start {j} worker threads: {e}")))?
            .install(f),
    }
}

fn finish(s: &Settings, content: String) -> CliResult<()> {
    emit(s.get("out"), &content)
}

fn json_text(v: &Value) -> String {
    let mut text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    text.push('\n');
    text
}

fn qubit_json(v: &BlochVector) -> Value {
    Value::from(
        v.as_slice()
            .iter()
            .map(|&x| json_num(x))
            .collect::<Vec<_>>(),
    )
}

fn certificate(p: Purity) -> &'static str {
    match p {
        Purity::Pure => "pure",
        Purity::Mixed => "mixed",
    }
}

fn estimate(a: EstimateArgs) -> CliResult<()> {
    let s = Settings::load(
        &a.common,
        vec![
            ("estimator", a.estimator),
            ("counts", a.counts),
            ("batch", flag(a.batch)),
        ],
    )?;
    let rebit = parse::design_kind(s.get("design"), "qubit")?;
    let shots = parse::shots(s.get("n"))?;
    let h = parse::h_override(s.get("h"))?;
    let format = parse::format(s.get("format"))?;
    let names = s.get("estimator").unwrap_or("cls");

    if s.flag("batch")? {
        let content = with_jobs(&s, || batch_estimates(rebit, &shots, names, h, format))?;
        return finish(&s, content);
    }

    let [n] = shots[..] else {
        return input("estimate takes a single N");
    };
    let design = parse::design(rebit, n)?;
    let d = parse::counts(s.get("counts"))?;
    d.check(&design)?;
    let spec = parse::estimator(names, n, h)?;
    let est = spec.estimate(&d, &design)?;
    let p = purity(&est);
    let cert = certificate(purity_certificate(&est));
    let content = match format {
        Format::Csv => {
            let comps: Vec<String> = est.as_slice().iter().map(|&x| sig12(x)).collect();
            format!("{}\npurity {} ({cert})\n", comps.join(" "), sig12(p))
        }
        Format::Json => json_text(&json!({
            "design": design.label(),
            "N": n,
            "counts": d.counts(),
            "estimator": spec.to_string(),
            "estimate": qubit_json(&est),
            "purity": json_num(p),
            "certificate": cert,
        })),
    };
    finish(&s, content)
}

fn batch_estimates(
    rebit: bool,
    shots: &[u32],
    names: &str,
    h: Option<f64>,
    format: Format,
) -> CliResult<String> {
    let mut csv = format!("{BATCH_HEADER}\n");
    let mut rows = Vec::new();
    for &n in shots {
        let design = parse::design(rebit, n)?;
        let datasets = enumerate_datasets(&design);
        for name in names.split(',') {
            let spec = parse::estimator(name, n, h)?;
            let table = EstimateTable::build(spec, &design)?;
            for (d, est) in datasets.iter().zip(table.estimates()) {
                let f = frequencies(d, &design)?.as_bloch();
                let counts: Vec<String> = d.counts().iter().map(u32::to_string).collect();
                let (fq, eq) = (f.to_qubit(), est.to_qubit());
                let p = purity(est);
                match format {
                    Format::Csv => {
                        let cells: Vec<String> = fq.iter().chain(&eq).map(|&x| num(x)).collect();
                        writeln!(
                            csv,
                            "{},{n},{},{spec},{},{}",
                            design.label(),
                            counts.join(" "),
                            cells.join(","),
                            num(p)
                        )
                        .expect("write to string");
                    }
                    Format::Json => rows.push(json!({
                        "design": design.label(),
                        "N": n,
                        "counts": d.counts(),
                        "estimator": spec.to_string(),
                        "f": fq.iter().map(|&x| json_num(x)).collect::<Vec<_>>(),
                        "estimate": eq.iter().map(|&x| json_num(x)).collect::<Vec<_>>(),
                        "purity": json_num(p),
                    })),
                }
            }
        }
    }
    Ok(match format {
        Format::Csv => csv,
        Format::Json => json_text(&Value::from(rows)),
    })
}

fn risk(a: RiskArgs) -> CliResult<()> {
    let s = Settings::load(
        &a.common,
        vec![("estimator", a.estimator), ("state", a.state)],
    )?;
    let rebit = parse::design_kind(s.get("design"), "qubit")?;
    let shots = parse::shots(s.get("n"))?;
    let h = parse::h_override(s.get("h"))?;
    let loss = parse::loss(s.get("loss"))?;
    let format = parse::format(s.get("format"))?;
    let names = s.get("estimator").unwrap_or("cls").to_string();
    let state = s
        .get("state")
        .ok_or_else(|| CliError::Input("--state is required".into()))?
        .to_string();

    let content = with_jobs(&s, || {
        let mut csv = format!("{RISK_HEADER}\n");
        let mut rows = Vec::new();
        for &n in &shots {
            let design = parse::design(rebit, n)?;
            let r = parse::state(&state, &design)?;
            let engine = RiskEngine::new(design.clone());
            for name in names.split(',') {
                let spec = parse::estimator(name, n, h)?;
                let value = engine.risk(&r, spec, loss)?;
                let q = r.to_qubit();
                match format {
                    Format::Csv => writeln!(
                        csv,
                        "{},{n},{},{},{},{spec},{loss},{}",
                        design.label(),
                        num(q[0]),
                        num(q[1]),
                        num(q[2]),
                        num(value)
                    )
                    .expect("write to string"),
                    Format::Json => rows.push(json!({
                        "design": design.label(),
                        "N": n,
                        "state": q.iter().map(|&x| json_num(x)).collect::<Vec<_>>(),
                        "estimator": spec.to_string(),
                        "loss": loss.label(),
                        "risk": json_num(value),
                    })),
                }
            }
        }
        Ok(match format {
            Format::Csv => csv,
            Format::Json => json_text(&Value::from(rows)),
        })
    })?;
    finish(&s, content)
}

fn pair_names(s: &Settings) -> (&str, &str) {
    (
        s.get("estimator-a").unwrap_or("cls"),
        s.get("estimator-b").unwrap_or("hedged"),
    )
}

fn sweep(a: SweepArgs) -> CliResult<()> {
    let s = Settings::load(
        &a.common,
        vec![
            ("estimator-a", a.estimator_a),
            ("estimator-b", a.estimator_b),
            ("axis", a.axis),
            ("radii", a.radii),
            ("ratio", flag(a.ratio)),
        ],
    )?;
    let rebit = parse::design_kind(s.get("design"), "qubit")?;
    let shots = parse::shots(s.get("n"))?;
    let h = parse::h_override(s.get("h"))?;
    let loss = parse::loss(s.get("loss"))?;
    let format = parse::format(s.get("format"))?;
    let axis = parse::axis(s.get("axis").unwrap_or("z"), rebit)?;
    let radii = parse::grid("radius", s.get("radii").unwrap_or("0:1:0.01"))?;
    let ratio = s.flag("ratio")?;
    let (name_a, name_b) = pair_names(&s);

    let content = with_jobs(&s, || {
        let mut csv = format!("{SWEEP_HEADER}\n");
        let mut rows = Vec::new();
        let ax = axis.to_qubit();
        for &n in &shots {
            let design = parse::design(rebit, n)?;
            let spec_a = parse::estimator(name_a, n, h)?;
            let spec_b = parse::estimator(name_b, n, h)?;
            let surface =
                RiskEngine::new(design.clone()).sweep(&axis, &radii, spec_a, spec_b, loss)?;
            for row in &surface.rows {
                let last = if ratio {
                    row.relative_diff().filter(|v| v.is_finite())
                } else {
                    row.scaled_diff
                };
                match format {
                    Format::Csv => writeln!(
                        csv,
                        "{},{n},{},{},{},{},{spec_a},{spec_b},{loss},{},{},{}",
                        design.label(),
                        num(ax[0]),
                        num(ax[1]),
                        num(ax[2]),
                        num(row.coordinate),
                        num(row.a.risk),
                        num(row.b.risk),
                        opt_num(last)
                    )
                    .expect("write to string"),
                    Format::Json => rows.push(json!({
                        "design": design.label(),
                        "N": n,
                        "axis_x": json_num(ax[0]),
                        "axis_y": json_num(ax[1]),
                        "axis_z": json_num(ax[2]),
                        "radius": json_num(row.coordinate),
                        "estimator_a": spec_a.to_string(),
                        "estimator_b": spec_b.to_string(),
                        "loss": loss.label(),
                        "risk_a": json_num(row.a.risk),
                        "risk_b": json_num(row.b.risk),
                        "scaled_diff": json_opt(last),
                    })),
                }
            }
        }
        Ok(match format {
            Format::Csv => csv,
            Format::Json => json_text(&Value::from(rows)),
        })
    })?;
    finish(&s, content)
}

fn disk(a: DiskArgs) -> CliResult<()> {
    let s = Settings::load(
        &a.common,
        vec![
            ("estimator-a", a.estimator_a),
            ("estimator-b", a.estimator_b),
            ("radii", a.radii),
            ("angles", a.angles),
        ],
    )?;
    if !parse::design_kind(s.get("design"), "rebit")? {
        return input("disk needs the rebit design");
    }
    let shots = parse::shots(s.get("n"))?;
    let h = parse::h_override(s.get("h"))?;
    let loss = parse::loss(s.get("loss"))?;
    let format = parse::format(s.get("format"))?;
    let grid = DiskGrid {
        radii: parse::grid("radius", s.get("radii").unwrap_or("0:1:0.01"))?,
        angles_deg: parse::grid("angle", s.get("angles").unwrap_or("0:358:2"))?,
    };
    let (name_a, name_b) = pair_names(&s);

    let content = with_jobs(&s, || {
        let mut csv = format!("{DISK_HEADER}\n");
        let mut rows = Vec::new();
        for &n in &shots {
            let design = MeasurementDesign::rebit(n)?;
            let spec_a = parse::estimator(name_a, n, h)?;
            let spec_b = parse::estimator(name_b, n, h)?;
            let field = RiskEngine::new(design.clone()).risk_disk(&grid, spec_a, spec_b, loss)?;
            for c in &field.cells {
                match format {
                    Format::Csv => writeln!(
                        csv,
                        "{},{n},{},{},{},{},{}",
                        design.label(),
                        num(c.angle_deg),
                        num(c.radius),
                        num(c.risk_a),
                        num(c.risk_b),
                        opt_num(c.diff)
                    )
                    .expect("write to string"),
                    Format::Json => rows.push(json!({
                        "design": design.label(),
                        "N": n,
                        "angle_deg": json_num(c.angle_deg),
                        "radius": json_num(c.radius),
                        "risk_a": json_num(c.risk_a),
                        "risk_b": json_num(c.risk_b),
                        "diff": json_opt(c.diff),
                    })),
                }
            }
        }
        Ok(match format {
            Format::Csv => csv,
            Format::Json => json_text(&Value::from(rows)),
        })
    })?;
    finish(&s, content)
}

fn hedge_scan(a: HedgeScanArgs) -> CliResult<()> {
    let s = Settings::load(&a.common, vec![("state", a.state), ("h-grid", a.h_grid)])?;
    let rebit = parse::design_kind(s.get("design"), "qubit")?;
    let shots = parse::shots(s.get("n"))?;
    let loss = parse::loss(s.get("loss"))?;
    let format = parse::format(s.get("format"))?;
    let h_grid = match s.get("h-grid") {
        Some(g) => parse::grid("h", g)?,
        None => default_h_grid(),
    };
    let state = s
        .get("state")
        .unwrap_or(if rebit { "0,1" } else { "0,0,1" })
        .to_string();

    let content = with_jobs(&s, || {
        let mut csv = format!("{HEDGE_HEADER}\n");
        let mut blocks = Vec::new();
        for &n in &shots {
            let design = parse::design(rebit, n)?;
            let r = parse::state(&state, &design)?;
            let scan = RiskEngine::new(design.clone()).hedge_scan(&r, &h_grid, loss)?;
            match format {
                Format::Csv => {
                    for row in &scan.rows {
                        writeln!(
                            csv,
                            "{},{n},{},{}",
                            design.label(),
                            num(row.h),
                            num(row.risk)
                        )
                        .expect("write to string");
                    }
                    writeln!(csv, "# argmin_h={}", num(scan.argmin_h)).expect("write to string");
                    writeln!(csv, "# eq10_h={}", opt_num(scan.default_h)).expect("write to string");
                }
                Format::Json => blocks.push(json!({
                    "design": design.label(),
                    "N": n,
                    "loss": loss.label(),
                    "state": qubit_json(&r),
                    "rows": scan.rows.iter().map(|row| json!({
                        "h": json_num(row.h),
                        "risk": json_num(row.risk),
                    })).collect::<Vec<_>>(),
                    "argmin_h": json_num(scan.argmin_h),
                    "argmin_risk": json_num(scan.argmin_risk),
                    "eq10_h": json_opt(scan.default_h),
                    "eq10_risk": json_opt(scan.default_h_risk),
                })),
            }
        }
        Ok(match format {
            Format::Csv => csv,
            Format::Json => json_text(&Value::from(blocks)),
        })
    })?;
    finish(&s, content)
}

fn read_prior(s: &Settings, dim: usize) -> CliResult<PriorGrid> {
    let text = match (s.get("prior"), s.get("prior-file")) {
        (Some(_), Some(_)) => return input("give either --prior or --prior-file, not both"),
        (Some(p), None) => p.to_string(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read prior file {path}: {e}")))?,
        (None, None) => return input("--prior or --prior-file is required"),
    };
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("prior is not valid JSON: {e}")))?;
    let bad = || {
        CliError::Input(r#"prior must look like {"points": [[...], ...], "weights": [...]}"#.into())
    };
    let numbers = |v: &Value| -> CliResult<Vec<f64>> {
        v.as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|x| x.as_f64().ok_or_else(bad))
            .collect()
    };
    let points = v
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(bad)?
        .iter()
        .map(|p| {
            let comps = numbers(p)?;
            if comps.len() != dim {
                return input(format!("prior point {comps:?} needs {dim} components"));
            }
            Ok(BlochVector::new(&comps)?)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let weights = numbers(v.get("weights").ok_or_else(bad)?)?;
    Ok(PriorGrid::new(points, weights)?)
}

fn bayes(a: BayesArgs) -> CliResult<()> {
    let s = Settings::load(
        &a.common,
        vec![
            ("counts", a.counts),
            ("prior", a.prior),
            ("prior-file", a.prior_file.map(|p| p.display().to_string())),
        ],
    )?;
    let rebit = parse::design_kind(s.get("design"), "qubit")?;
    let [n] = parse::shots(s.get("n"))?[..] else {
        return input("bayes takes a single N");
    };
    if parse::format(s.get("format"))? == Format::Csv && s.get("format").is_some() {
        return input("bayes writes a JSON report only");
    }
    let losses: Vec<LossSpec> = match s.get("loss") {
        Some(l) => vec![l.parse()?],
        None => LossSpec::ALL.to_vec(),
    };
    let design = parse::design(rebit, n)?;
    let d = parse::counts(s.get("counts"))?;
    d.check(&design)?;
    let prior = read_prior(&s, design.num_axes())?;

    let report = with_jobs(&s, || {
        let post = posterior(&prior, &d, &design)?;
        let candidates = if rebit {
            default_rebit_candidates()
        } else {
            default_qubit_candidates()
        };
        let mut estimates = Vec::new();
        for loss in losses {
            let est = bayes_estimate_grid(&post, loss, &candidates)?;
            estimates.push(json!({
                "loss": loss.label(),
                "estimate": qubit_json(&est),
                "posterior_risk": json_num(posterior_risk(&post, loss, &est)),
                "purity": json_num(purity(&est)),
                "certificate": certificate(purity_certificate(&est)),
            }));
        }
        let mean = posterior_mean(&post);
        Ok(json!({
            "design": design.label(),
            "N": n,
            "counts": d.counts(),
            "posterior": {
                "points": post.points().iter().map(qubit_json).collect::<Vec<_>>(),
                "weights": post.weights().iter().map(|&w| json_num(w)).collect::<Vec<_>>(),
            },
            "posterior_mean": qubit_json(&mean),
            "posterior_mean_certificate": certificate(purity_certificate(&mean)),
            "candidates": candidates.len(),
            "estimates": estimates,
        }))
    })?;
    finish(&s, json_text(&report))
}

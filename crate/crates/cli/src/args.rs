use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Exact-risk comparisons of hedged and unhedged qubit tomography estimators.
#[derive(Debug, Parser)]
#[command(name = "hedgetomo", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the state from one dataset, or tabulate every dataset with --batch.
    Estimate(EstimateArgs),
    /// Exact risk of one or more estimators at a true state.
    Risk(RiskArgs),
    /// Risk difference of two estimators along an axis of the Bloch ball.
    Sweep(SweepArgs),
    /// Risk difference of two estimators over a polar grid of the rebit disk.
    Disk(DiskArgs),
    /// Risk of the hedged estimator over a grid of hedging strengths.
    HedgeScan(HedgeScanArgs),
    /// Posterior, posterior mean and grid Bayes estimates for a discrete prior.
    Bayes(BayesArgs),
}

/// Flags shared by every subcommand. Any of them may also come from --config.
#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// Flat TOML file whose keys mirror the flag names.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Measurement design: rebit (X, Z) or qubit (X, Y, Z).
    #[arg(long)]
    pub design: Option<String>,
    /// Shots per axis: a number, a list `10,20` or a range `10:100:10`.
    #[arg(long)]
    pub n: Option<String>,
    /// Loss: hs, relent or infid.
    #[arg(long)]
    pub loss: Option<String>,
    /// Hedging strength for hedged estimators given without one [default: 1/N − 1/N²].
    #[arg(long)]
    pub h: Option<String>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<String>,
    /// Output format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Worker threads for risk evaluation.
    #[arg(long)]
    pub jobs: Option<String>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Estimator (li, cls, hedged[:h], mle, hedged-mle[:h]); a comma list with --batch.
    #[arg(long)]
    pub estimator: Option<String>,
    /// Counts of "+1" outcomes per axis, e.g. `2,4`.
    #[arg(long)]
    pub counts: Option<String>,
    /// Emit a CSV row for every possible dataset.
    #[arg(long)]
    pub batch: bool,
}

#[derive(Debug, Args)]
pub struct RiskArgs {
    #[command(flatten)]
    pub common: Common,
    /// Estimator, or a comma list of estimators.
    #[arg(long)]
    pub estimator: Option<String>,
    /// True Bloch vector, e.g. `0,1` (rebit) or `0,0,1` (qubit).
    #[arg(long)]
    pub state: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub estimator_a: Option<String>,
    #[arg(long)]
    pub estimator_b: Option<String>,
    /// Direction `x,y,z` (normalized), `x,z` for rebits, or one of x, y, z.
    #[arg(long)]
    pub axis: Option<String>,
    /// Radii as `start:stop:step` or a comma list.
    #[arg(long)]
    pub radii: Option<String>,
    /// Report (R_a − R_b)/R_a in the last column instead of N(R_a − R_b).
    #[arg(long)]
    pub ratio: bool,
}

#[derive(Debug, Args)]
pub struct DiskArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub estimator_a: Option<String>,
    #[arg(long)]
    pub estimator_b: Option<String>,
    /// Radii as `start:stop:step` or a comma list.
    #[arg(long)]
    pub radii: Option<String>,
    /// Angles in degrees from the X axis towards Z, as `start:stop:step` or a comma list.
    #[arg(long)]
    pub angles: Option<String>,
}

#[derive(Debug, Args)]
pub struct HedgeScanArgs {
    #[command(flatten)]
    pub common: Common,
    /// True Bloch vector [default: the +Z pure state].
    #[arg(long)]
    pub state: Option<String>,
    /// Hedging strengths as `start:stop:step` or a comma list [default: 0.001:0.499:0.001].
    #[arg(long)]
    pub h_grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct BayesArgs {
    #[command(flatten)]
    pub common: Common,
    /// Counts of "+1" outcomes per axis.
    #[arg(long)]
    pub counts: Option<String>,
    /// Prior as JSON: `{"points": [[x, z], ...], "weights": [...]}`.
    #[arg(long, conflicts_with = "prior_file")]
    pub prior: Option<String>,
    /// File holding the prior JSON.
    #[arg(long)]
    pub prior_file: Option<PathBuf>,
}

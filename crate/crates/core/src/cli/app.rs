//! Argument parsing and subcommand dispatch for `penkm`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use super::csvio::{parse_csv, write_csv, write_labels, write_table};
use super::report::{render_report, SCAN_HEADER};
use super::run::{run_estimate, Input, RunConfig};
use crate::clustering::{farthest_first_init, lloyd, sweep, ClusteringConfig, Dataset};
use crate::error::{Error, Result};
use crate::geometry::constants;
use crate::oracle::{mc_moments, MomentShape};
use crate::outliers::{density_filter, DensityFilterConfig, NeighborhoodRadius};
use crate::penalty::{additive_scan, LambdaRule, PenaltyFamily, ScanConfig};
use crate::synth::{generate, SynthSpec, Truth};

#[derive(Debug, Parser)]
#[command(name = "penkm", version, about = "Estimate the number of clusters with penalized k-means")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset of uniform balls.
    Gen(GenArgs),
    /// Drop low-density points.
    Filter(FilterArgs),
    /// Cluster at a single k.
    Cluster(ClusterArgs),
    /// Assumed-vs-estimated table of the additive penalty.
    Scan(ScanArgs),
    /// Full pipeline: filter, sweep, both penalties, agreement, report.
    Estimate(EstimateArgs),
    /// Table of the ideal-cluster constants by dimension.
    Geometry(GeometryArgs),
    /// Monte Carlo check of the closed-form moments.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 10)]
    pub clusters: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Minimum centroid distance in units of the radius.
    #[arg(long, default_value_t = 3.0)]
    pub separation: f64,
    /// Pull all centroids toward their mean by this factor.
    #[arg(long, default_value_t = 1.0)]
    pub shrink: f64,
    /// Side of the placement cube (default grows with K and d).
    #[arg(long = "box")]
    pub placement_box: Option<f64>,
    /// Vary cluster sizes around --points.
    #[arg(long)]
    pub jitter: bool,
    /// Uniform background points.
    #[arg(long, default_value_t = 0)]
    pub noise: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SynthArgs {
    pub fn spec(&self) -> SynthSpec {
        SynthSpec {
            clusters: self.clusters,
            dim: self.dim,
            radius: self.radius,
            points_per_cluster: self.points,
            min_separation: self.separation,
            shrink: self.shrink,
            seed: self.seed,
            placement_box: self.placement_box,
            jitter: self.jitter,
            background_noise: self.noise,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Write true labels here (-1 marks noise).
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Add an `x0,x1,...` header row.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FilterOpts {
    /// Neighbourhood radius (default: 3 x median nearest-neighbour distance).
    #[arg(long)]
    pub filter_radius: Option<f64>,
    #[arg(long, default_value_t = 5)]
    pub min_neighbors: usize,
}

impl FilterOpts {
    pub fn config(&self) -> DensityFilterConfig {
        DensityFilterConfig {
            radius: self.filter_radius.map_or(NeighborhoodRadius::Auto, NeighborhoodRadius::Fixed),
            min_neighbors: self.min_neighbors,
        }
    }
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub opts: FilterOpts,
    #[arg(long)]
    pub out: PathBuf,
    /// Write the 0-based indices of removed rows here.
    #[arg(long)]
    pub removed: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct LloydOpts {
    #[arg(long, default_value_t = ClusteringConfig::default().max_iter)]
    pub max_iter: usize,
    #[arg(long, default_value_t = ClusteringConfig::default().tol)]
    pub tol: f64,
}

impl LloydOpts {
    pub fn config(&self) -> ClusteringConfig {
        ClusteringConfig {
            max_iter: self.max_iter,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub k: usize,
    #[command(flatten)]
    pub lloyd: LloydOpts,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub centroids: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PenaltyOpts {
    /// Largest assumed number of clusters.
    #[arg(long, default_value_t = 10)]
    pub k_max: usize,
    /// linear, log, poly[:p] or exp.
    #[arg(long, default_value = "linear")]
    pub family: PenaltyFamily,
    /// Cluster radius; switches lambda to the exact midpoint of its bounds.
    #[arg(long)]
    pub cluster_radius: Option<f64>,
}

impl PenaltyOpts {
    fn scan_config(&self) -> ScanConfig {
        ScanConfig {
            family: self.family,
            rule: self
                .cluster_radius
                .map_or(LambdaRule::Approximate, |radius| LambdaRule::ExactMidpoint { radius }),
        }
    }
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub penalty: PenaltyOpts,
    #[command(flatten)]
    pub lloyd: LloydOpts,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Point CSV; without it a dataset is generated from the synth options.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub synth: SynthArgs,
    #[command(flatten)]
    pub penalty: PenaltyOpts,
    #[arg(long, default_value = "linear")]
    pub mult_family: PenaltyFamily,
    /// First k of the sweep (1 or 2).
    #[arg(long)]
    pub sweep_min: Option<usize>,
    /// Last k of the sweep (default min(3 K_max, N - 1)).
    #[arg(long)]
    pub sweep_max: Option<usize>,
    /// Run the density filter first.
    #[arg(long)]
    pub filter: bool,
    #[command(flatten)]
    pub filter_opts: FilterOpts,
    #[command(flatten)]
    pub lloyd: LloydOpts,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Also write SVG plots into --out-dir.
    #[arg(long)]
    pub plots: bool,
}

impl EstimateArgs {
    pub fn run_config(&self) -> RunConfig {
        let input = match &self.input {
            Some(p) => Input::Csv(p.clone()),
            None => Input::Synth(self.synth.spec()),
        };
        let scan = self.penalty.scan_config();
        RunConfig {
            input,
            k_min: self.sweep_min,
            k_max: self.sweep_max,
            k_assumed_max: self.penalty.k_max,
            family: scan.family,
            multiplicative_family: self.mult_family,
            lambda_rule: scan.rule,
            filter: self.filter.then(|| self.filter_opts.config()),
            output_dir: self.out_dir.clone(),
            emit_plots: self.plots,
            clustering: self.lloyd.config(),
        }
    }
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    #[arg(long, default_value_t = 1)]
    pub d_min: usize,
    #[arg(long, default_value_t = 20)]
    pub d_max: usize,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,8,16")]
    pub dims: Vec<usize>,
}

fn out_err(e: std::io::Error) -> Error {
    Error::Io(e)
}

fn csv_line(out: &mut dyn Write, cells: &[String]) -> Result<()> {
    writeln!(out, "{}", cells.join(",")).map_err(out_err)
}

/// Run one parsed command, writing human output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Gen(a) => gen(a, out),
        Command::Filter(a) => filter(a, out),
        Command::Cluster(a) => cluster(a, out),
        Command::Scan(a) => scan(a, out),
        Command::Estimate(a) => estimate(a, out),
        Command::Geometry(a) => geometry(a, out),
        Command::Verify(a) => verify(a, out),
    }
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<()> {
    let (data, truth) = generate(&a.synth.spec())?;
    write_csv(&a.out, &data, a.header)?;
    if let Some(path) = &a.truth {
        write_labels(path, truth.labels.iter().map(|&l| (l != Truth::NOISE).then_some(l)))?;
    }
    writeln!(out, "wrote {} points in {} dimensions to {}", data.len(), data.dim(), a.out.display())
        .map_err(out_err)
}

fn filter(a: FilterArgs, out: &mut dyn Write) -> Result<()> {
    let data = parse_csv(&a.input)?;
    let outcome = density_filter(&data, &a.opts.config())?;
    write_csv(&a.out, &outcome.kept, false)?;
    if let Some(path) = &a.removed {
        write_table(path, &["index"], outcome.removed.iter().map(|i| vec![i.to_string()]))?;
    }
    if let Some(w) = &outcome.warning {
        eprintln!("warning: {w}");
    }
    writeln!(
        out,
        "radius {}: kept {}, removed {}",
        outcome.radius,
        outcome.kept.len(),
        outcome.removed.len()
    )
    .map_err(out_err)
}

fn write_points(path: &Path, points: &[Vec<f64>]) -> Result<()> {
    write_csv(path, &Dataset::from_points(points)?, false)
}

fn cluster(a: ClusterArgs, out: &mut dyn Write) -> Result<()> {
    let data = parse_csv(&a.input)?;
    let init = farthest_first_init(&data, a.k)?;
    let r = lloyd(&data, &init, &a.lloyd.config())?;
    if let Some(path) = &a.labels {
        write_labels(path, r.labels.iter().map(|&l| Some(l)))?;
    }
    if let Some(path) = &a.centroids {
        write_points(path, &r.centroids)?;
    }
    let sizes: Vec<String> = r.cluster_sizes().iter().map(usize::to_string).collect();
    writeln!(
        out,
        "k = {}\nerror = {}\niterations = {}\nstop = {:?}\nsizes = {}",
        r.k,
        r.error,
        r.iterations,
        r.stop,
        sizes.join(",")
    )
    .map_err(out_err)
}

fn scan(a: ScanArgs, out: &mut dyn Write) -> Result<()> {
    let data = parse_csv(&a.input)?;
    let cfg = RunConfig::new(Input::Csv(a.input.clone()), a.penalty.k_max);
    let (k_min, k_max) = cfg.sweep_range(data.len())?;
    let sw = sweep(&data, k_min, k_max, &a.lloyd.config())?;
    let result = additive_scan(&data, &sw, a.penalty.k_max, &a.penalty.scan_config())?;
    let rows: Vec<Vec<String>> = result
        .entries
        .iter()
        .map(|e| {
            vec![
                e.assumed_k.to_string(),
                e.lambda.to_string(),
                e.estimated_k.to_string(),
                e.is_candidate().to_string(),
            ]
        })
        .collect();
    match &a.out {
        Some(path) => write_table(path, &SCAN_HEADER, rows),
        None => {
            csv_line(out, &SCAN_HEADER.map(String::from))?;
            rows.iter().try_for_each(|r| csv_line(out, r))
        }
    }
}

fn estimate(a: EstimateArgs, out: &mut dyn Write) -> Result<()> {
    let run = run_estimate(&a.run_config())?;
    if let Some(f) = &run.filter {
        writeln!(out, "# filter removed {} points (radius {})", f.removed.len(), f.radius).map_err(out_err)?;
    }
    out.write_all(render_report(&run.report).as_bytes()).map_err(out_err)?;
    for path in &run.files {
        writeln!(out, "# wrote {}", path.display()).map_err(out_err)?;
    }
    Ok(())
}

fn geometry(a: GeometryArgs, out: &mut dyn Write) -> Result<()> {
    if a.d_min == 0 || a.d_min > a.d_max {
        return Err(Error::InvalidArgument(format!("bad dimension range {}..={}", a.d_min, a.d_max)));
    }
    csv_line(out, &["d", "alpha", "beta", "gamma", "alpha_over_2beta"].map(String::from))?;
    for d in a.d_min..=a.d_max {
        let c = constants(d, a.radius)?;
        csv_line(
            out,
            &[
                d.to_string(),
                c.alpha.to_string(),
                c.beta.to_string(),
                c.gamma.to_string(),
                c.alpha_over_two_beta().to_string(),
            ],
        )?;
    }
    Ok(())
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<()> {
    csv_line(
        out,
        &["d", "quantity", "closed_form", "monte_carlo", "std_error", "z"].map(String::from),
    )?;
    for (i, &d) in a.dims.iter().enumerate() {
        let c = constants(d, 1.0)?;
        let seed = a.seed.wrapping_add(2 * i as u64);
        let sphere = mc_moments(d, 1.0, MomentShape::Sphere, a.samples, seed)?;
        let half = mc_moments(d, 1.0, MomentShape::HalfSphere, a.samples, seed + 1)?;
        let rows = [
            ("sphere_sq_dev", c.alpha, sphere.mean_sq_dev, sphere.mean_sq_dev_se),
            ("half_offset", c.rho, half.mean_offset, half.mean_offset_se),
            ("half_sq_dev", 2.0 * c.beta, half.mean_sq_dev, half.mean_sq_dev_se),
        ];
        for (name, exact, mc, se) in rows {
            csv_line(
                out,
                &[
                    d.to_string(),
                    name.to_string(),
                    format!("{exact:.6}"),
                    format!("{mc:.6}"),
                    format!("{se:.2e}"),
                    format!("{:+.2}", (mc - exact) / se),
                ],
            )?;
        }
    }
    Ok(())
}

/// Entry point of the `penkm` binary.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

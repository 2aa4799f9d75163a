//! The `ratinglab` command line.
//!
//! Exit status: 0 when every requested property holds (or the command
//! succeeded), 1 when one is refuted, 2 for usage errors, 3 when nothing was
//! refuted but something was inconclusive, 4 for configuration and I/O
//! failures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::load_system;
use crate::error::{invalid_arg, Error, Result};
use crate::plot;
use crate::sim::{self, output, ExperimentConfig, ExperimentResult, Strategy};
use crate::system::RatingSystem;
use crate::verifier::{
    build_skill_chain, find_max_gain_opponent, run_property, ChainOptions, CheckOptions, Grid,
    PForm, Property, Verdict,
};
use crate::Rating;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "RATINGLAB_OUT";
const DEFAULT_OUT: &str = "ratinglab-out";

#[derive(Debug, Parser)]
#[command(
    name = "ratinglab",
    version,
    about = "Check and stress-test zero-sum rating systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run property checks on a grid and write one JSON report per property.
    Verify(VerifyArgs),
    /// Build a skill chain and write it as CSV.
    Chain(ChainArgs),
    /// Find the opponent rating that maximises expected gain.
    Maxgain(MaxgainArgs),
    /// Run seeded experiments and compare a strategic attacker with a baseline.
    Simulate(SimulateArgs),
    /// Render SVG charts.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output directory [default: $RATINGLAB_OUT or ./ratinglab-out].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl OutArgs {
    fn dir(&self) -> Result<PathBuf> {
        let dir = self
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        fs::create_dir_all(&dir)?;
        Ok(dir)
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 1000.0)]
    pub lo: f64,
    #[arg(long, default_value_t = 2000.0)]
    pub hi: f64,
    #[arg(long, default_value_t = 50.0)]
    pub step: f64,
}

impl GridArgs {
    fn grid(&self) -> Result<Grid> {
        Grid::new(self.lo, self.hi, self.step)
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Config file path or `builtin:<name>`.
    #[arg(long)]
    pub system: String,
    /// Comma-separated property names, e.g. `p_oi,strong_p_oi`.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub props: Vec<String>,
    /// Margin P for the P-restricted properties.
    #[arg(long)]
    pub p: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Residual tolerance [default: depends on the curve].
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Require every pair of a tuple to be P-close, not just its extremes.
    #[arg(long)]
    pub pairwise: bool,
    /// Chain probability for `full_scale` and `chain_identity`.
    #[arg(long, default_value_t = 0.9)]
    pub chain_p: f64,
    #[arg(long, default_value_t = 50)]
    pub budget: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long)]
    pub system: String,
    /// Link probability, strictly between 0.5 and 1.
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub r1: f64,
    #[arg(long, default_value_t = 50)]
    pub budget: usize,
    /// Highest rating a link may use [default: r1 + 1e6].
    #[arg(long)]
    pub ceiling: Option<f64>,
    /// Stop once the chain has ⌊2p/(2p−1)⌋ ratings.
    #[arg(long)]
    pub stop_at_bound: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct MaxgainArgs {
    #[arg(long)]
    pub system: String,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub x_star: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lo: f64,
    #[arg(long, default_value_t = 3000.0)]
    pub hi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub resolution: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Replaces the config's system; a path or `builtin:<name>`.
    #[arg(long)]
    pub system: Option<String>,
    /// Seeds as a list (`1,2,5`) or inclusive ranges (`1-20`).
    #[arg(long, default_value = "1-20")]
    pub seeds: String,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub pool_size: Option<usize>,
    #[arg(long)]
    pub band: Option<f64>,
    /// Strategy of the comparison arm; `none` skips the comparison.
    #[arg(long, default_value = "random")]
    pub baseline: String,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(subcommand)]
    pub chart: PlotCommand,
}

#[derive(Debug, Subcommand)]
pub enum PlotCommand {
    /// σ(c + d, c) against d for one or more systems.
    Sigma {
        #[arg(long, required = true)]
        system: Vec<String>,
        #[arg(long, default_value_t = 1500.0)]
        center: f64,
        #[arg(long, default_value_t = 800.0)]
        half_width: f64,
        #[arg(long, default_value_t = 401)]
        samples: usize,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Attacker trajectory from a `series.csv` written by `simulate`.
    Trajectory {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Expected gain against correctly rated opponents across opponent ratings.
    Gain {
        #[arg(long)]
        system: String,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        x_star: f64,
        #[arg(long, default_value_t = 1000.0)]
        lo: f64,
        #[arg(long, default_value_t = 2200.0)]
        hi: f64,
        #[arg(long, default_value_t = 601)]
        samples: usize,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => EXIT_USAGE,
        _ => EXIT_CONFIG,
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Verify(a) => verify(&a),
        Command::Chain(a) => chain(&a),
        Command::Maxgain(a) => maxgain(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Plot(a) => plot_cmd(a.chart),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn verify(a: &VerifyArgs) -> Result<i32> {
    let props: Vec<Property> = a
        .props
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if props.is_empty() {
        return Err(invalid_arg("--props lists no properties"));
    }
    let sys = load_system(&a.system)?;
    let grid = a.grid.grid()?;
    let mut opts = CheckOptions::for_curve(sys.curve());
    if let Some(t) = a.tolerance {
        opts.tolerance = t;
    }
    if a.pairwise {
        opts = opts.with_form(PForm::Pairwise);
    }
    let dir = a.out.dir()?;
    let mut reports = Vec::new();
    for prop in props {
        let p = if prop.needs_p() {
            Some(a.p.ok_or_else(|| invalid_arg(format!("{prop} needs --p")))?)
        } else {
            None
        };
        let report = run_property(&sys, prop, p, &grid, &opts, a.chain_p, a.budget)?;
        println!("{}", report.summary());
        write_json(&dir.join(format!("{prop}.json")), &report)?;
        reports.push(report);
    }
    Ok(verdict_code(reports.iter().map(|r| r.verdict)))
}

fn verdict_code(verdicts: impl Iterator<Item = Verdict>) -> i32 {
    let mut code = EXIT_OK;
    for v in verdicts {
        match v {
            Verdict::Refuted => return EXIT_REFUTED,
            Verdict::Inconclusive => code = EXIT_INCONCLUSIVE,
            Verdict::Holds => {}
        }
    }
    code
}

fn chain(a: &ChainArgs) -> Result<i32> {
    let sys = load_system(&a.system)?;
    let opts = ChainOptions {
        budget: a.budget,
        ceiling: a.ceiling.unwrap_or(a.r1 + 1e6),
        stop_at_bound: a.stop_at_bound,
    };
    let chain = build_skill_chain(sys.curve(), a.p, a.r1, &opts)?;
    let dir = a.out.dir()?;
    let mut w = csv::Writer::from_path(dir.join("chain.csv"))?;
    w.write_record([
        "index",
        "rating",
        "link_sigma",
        "span_sigma",
        "predicted_span",
    ])?;
    for (i, &r) in chain.ratings.iter().enumerate() {
        let link = if i == 0 {
            String::new()
        } else {
            output::fmt_f64(chain.achieved[i - 1])
        };
        let predicted = chain
            .predicted
            .as_ref()
            .map(|v| output::fmt_f64(v[i]))
            .unwrap_or_default();
        w.write_record([
            (i + 1).to_string(),
            output::fmt_f64(r),
            link,
            output::fmt_f64(sys.sigma(r, chain.ratings[0])?),
            predicted,
        ])?;
    }
    w.flush()?;
    write_json(&dir.join("chain.json"), &chain)?;
    println!(
        "p = {}: bound floor(2p/(2p-1)) = {}, achieved length {} ({:?})",
        a.p,
        chain.bound,
        chain.len(),
        chain.terminated_reason
    );
    Ok(EXIT_OK)
}

fn maxgain(a: &MaxgainArgs) -> Result<i32> {
    let sys = load_system(&a.system)?;
    let best =
        find_max_gain_opponent(&sys, a.x, a.x_star, (a.lo, a.hi), a.resolution, a.tolerance)?;
    println!("{}", serde_json::to_string(&best)?);
    Ok(EXIT_OK)
}

/// Parses `1,2,5-8` into `[1, 2, 5, 6, 7, 8]`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || invalid_arg(format!("cannot parse seed list `{s}`"));
    let mut seeds = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi): (u64, u64) = (
                    lo.trim().parse().map_err(|_| bad())?,
                    hi.trim().parse().map_err(|_| bad())?,
                );
                if lo > hi {
                    return Err(bad());
                }
                seeds.extend(lo..=hi);
            }
            None => seeds.push(part.parse().map_err(|_| bad())?),
        }
    }
    if seeds.is_empty() {
        return Err(invalid_arg("no seeds given"));
    }
    seeds.sort_unstable();
    seeds.dedup();
    Ok(seeds)
}

fn parse_strategy(s: &str) -> Result<Option<Strategy>> {
    match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
        "none" => Ok(None),
        "random" | "random_opponent" => Ok(Some(Strategy::RandomOpponent)),
        "greedy" | "greedy_gain" => Ok(Some(Strategy::GreedyGain)),
        other => Err(invalid_arg(format!("unknown baseline strategy `{other}`"))),
    }
}

#[derive(Serialize)]
struct SimSummary<'a> {
    config: &'a ExperimentConfig,
    seeds: &'a [u64],
    strategy: String,
    baseline: Option<String>,
    per_seed: Vec<SeedSummary>,
    advantage: Option<sim::Advantage>,
}

#[derive(Serialize)]
struct SeedSummary {
    seed: u64,
    final_half_mean: f64,
    final_half_misrating: f64,
    baseline_final_half_mean: Option<f64>,
    skipped_rounds: usize,
    max_conservation_error: f64,
}

fn write_run(dir: &Path, r: &ExperimentResult) -> Result<()> {
    fs::create_dir_all(dir)?;
    output::write_attacker_log(fs::File::create(dir.join("attacker.csv"))?, &r.attacker_log)?;
    output::write_series(fs::File::create(dir.join("series.csv"))?, r)?;
    Ok(())
}

fn simulate(a: &SimulateArgs) -> Result<i32> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if let Some(s) = &a.system {
        cfg.system = load_system(s)?;
    }
    if let Some(r) = a.rounds {
        cfg.rounds = r;
    }
    if let Some(n) = a.pool_size {
        cfg.pool_size = n;
    }
    if a.band.is_some() {
        cfg.band = a.band;
    }
    let baseline = parse_strategy(&a.baseline)?.filter(|b| *b != cfg.attacker.strategy);
    let seeds = parse_seeds(&a.seeds)?;
    cfg.validate()?;

    let strategic = sim::run_replicates(&cfg, &seeds)?;
    let base = match baseline {
        Some(b) => Some(sim::run_replicates(&cfg.with_strategy(b), &seeds)?),
        None => None,
    };
    let dir = a.out.dir()?;
    for (i, r) in strategic.iter().enumerate() {
        write_run(&dir.join(format!("seed-{}", r.config.seed)), r)?;
        if let Some(b) = &base {
            write_run(
                &dir.join(format!("seed-{}", r.config.seed)).join("baseline"),
                &b[i],
            )?;
        }
    }
    let advantage = match &base {
        Some(b) => Some(sim::strategic_advantage(&strategic, b)?),
        None => None,
    };
    let per_seed = strategic
        .iter()
        .enumerate()
        .map(|(i, r)| SeedSummary {
            seed: r.config.seed,
            final_half_mean: r.summary.final_half_mean,
            final_half_misrating: r.summary.final_half_misrating,
            baseline_final_half_mean: base.as_ref().map(|b| b[i].summary.final_half_mean),
            skipped_rounds: r.summary.skipped_rounds,
            max_conservation_error: r.summary.max_conservation_error,
        })
        .collect();
    let summary = SimSummary {
        config: &cfg,
        seeds: &seeds,
        strategy: cfg.attacker.strategy.label(),
        baseline: baseline.map(|b| b.label()),
        per_seed,
        advantage,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "{} seeds, {} rounds, system {}",
        seeds.len(),
        cfg.rounds,
        cfg.system.label()
    )?;
    if let Some(adv) = &summary.advantage {
        writeln!(
            out,
            "strategic advantage {} vs {}: {:.3} ({:.0}% CI {:.3} .. {:.3})",
            summary.strategy,
            summary.baseline.as_deref().unwrap_or("-"),
            adv.delta,
            100.0 * adv.confidence,
            adv.ci_low,
            adv.ci_high
        )?;
    }
    Ok(EXIT_OK)
}

fn save_svg(
    chart: plot::Chart,
    output: Option<PathBuf>,
    out: &OutArgs,
    default_name: &str,
) -> Result<i32> {
    let path = match output {
        Some(p) => p,
        None => out.dir()?.join(default_name),
    };
    fs::write(&path, chart.to_svg()?)?;
    println!("{}", path.display());
    Ok(EXIT_OK)
}

fn plot_cmd(cmd: PlotCommand) -> Result<i32> {
    match cmd {
        PlotCommand::Sigma {
            system,
            center,
            half_width,
            samples,
            output,
            out,
        } => {
            let systems: Vec<(String, RatingSystem)> = system
                .iter()
                .map(|s| {
                    Ok((
                        s.strip_prefix("builtin:").unwrap_or(s).to_string(),
                        load_system(s)?,
                    ))
                })
                .collect::<Result<_>>()?;
            let curves: Vec<(&str, &crate::SkillCurve)> = systems
                .iter()
                .map(|(n, s)| (n.as_str(), s.curve()))
                .collect();
            save_svg(
                plot::sigma_chart(&curves, center, half_width, samples)?,
                output,
                &out,
                "sigma.svg",
            )
        }
        PlotCommand::Trajectory {
            series,
            output,
            out,
        } => {
            let rows = output::read_series(fs::File::open(&series)?)?;
            save_svg(
                plot::trajectory_chart(&rows)?,
                output,
                &out,
                "trajectory.svg",
            )
        }
        PlotCommand::Gain {
            system,
            x,
            x_star,
            lo,
            hi,
            samples,
            output,
            out,
        } => {
            let sys = load_system(&system)?;
            let chart = plot::gain_chart(&sys, x as Rating, x_star, (lo, hi), samples)?;
            save_svg(chart, output, &out, "gain.svg")
        }
    }
}

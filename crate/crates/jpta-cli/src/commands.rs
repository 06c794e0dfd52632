//! Subcommand definitions and their implementations.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use jpta::freq::SubbandPlan;
use jpta::metrics::{
    effective_loss, gain_profile, monte_carlo_loss, AngleSampling, MonteCarloConfig,
};
use jpta::solver::{quantize_phases, solve, Algorithm};
use jpta::sysim::{compare_modes, default_loss_table, LossModel, SimConfig, SimMode};

use crate::config::RunConfigFile;
use crate::formats::{fmt_sig, parse_arch, push_row, write_atomic, SolutionFile};
use crate::plot::{gain_bars, loss_cdf, Table};
use crate::CliError;

#[derive(Parser)]
#[command(name = "jpta", version, about = "JPTA beam design, evaluation, and scheduling simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Solve delays and phases for a beam set and emit the gain pattern.
    Design(DesignArgs),
    /// Monte Carlo gain-loss statistics over random beam sets.
    Eval(EvalArgs),
    /// Scheduling-mode comparison sweep.
    Sysim(SysimArgs),
    /// Render an output CSV as a standalone SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
pub struct DesignArgs {
    /// Comma-separated beam ids, one per subband (up to 4).
    #[arg(long)]
    pub beams: String,
    /// Comma-separated subband widths in subcarriers; default splits evenly.
    #[arg(long)]
    pub splits: Option<String>,
    /// Hardware architecture: ao|3d.
    #[arg(long)]
    pub arch: String,
    /// Algorithm: ls|iter|gd.
    #[arg(long)]
    pub solver: String,
    /// Phase-shifter depth in bits; 0 keeps phases continuous.
    #[arg(long, default_value_t = 6)]
    pub bits: u8,
    /// Optional JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Solution JSON output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Gain-pattern CSV output path.
    #[arg(long)]
    pub pattern: PathBuf,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Hardware architecture: ao|3d.
    #[arg(long)]
    pub arch: String,
    /// Beams (subbands) multiplexed per trial.
    #[arg(long)]
    pub nbeams: usize,
    /// Algorithm: ls|iter|gd.
    #[arg(long)]
    pub solver: String,
    /// Number of Monte Carlo trials.
    #[arg(long)]
    pub trials: usize,
    /// RNG seed.
    #[arg(long)]
    pub seed: u64,
    /// Phase-shifter depth in bits; 0 keeps phases continuous.
    #[arg(long, default_value_t = 6)]
    pub bits: u8,
    /// Beam-direction sampling: grid|continuous.
    #[arg(long, default_value = "grid")]
    pub sampling: String,
    /// Optional JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Summary CSV output path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SysimArgs {
    /// Comma-separated pool sizes.
    #[arg(long)]
    pub pools: String,
    /// Comma-separated per-slot user caps.
    #[arg(long)]
    pub nmaxes: String,
    /// Seeds: comma-separated values and/or inclusive `lo..hi` ranges.
    #[arg(long)]
    pub seeds: String,
    /// Slots per run; default is 10 slots per pooled user.
    #[arg(long)]
    pub slots: Option<usize>,
    /// Optional JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sweep CSV output path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct PlotArgs {
    /// Input CSV path.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Chart type: gain-bars|loss-cdf.
    #[arg(long)]
    pub kind: String,
    /// SVG output path.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Design(args) => run_design(args),
        Command::Eval(args) => run_eval(args),
        Command::Sysim(args) => run_sysim(args),
        Command::Plot(args) => run_plot(args),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| CliError::usage(format!("invalid {what} '{tok}'")))
        })
        .collect()
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, CliError> {
    let mut seeds = Vec::new();
    for tok in s.split(',') {
        let tok = tok.trim();
        if let Some((lo, hi)) = tok.split_once("..") {
            let lo: u64 = lo.parse().map_err(|_| CliError::usage(format!("invalid seed range '{tok}'")))?;
            let hi: u64 = hi.parse().map_err(|_| CliError::usage(format!("invalid seed range '{tok}'")))?;
            if lo > hi {
                return Err(CliError::usage(format!("empty seed range '{tok}'")));
            }
            seeds.extend(lo..=hi);
        } else {
            seeds.push(tok.parse().map_err(|_| CliError::usage(format!("invalid seed '{tok}'")))?);
        }
    }
    if seeds.is_empty() {
        return Err(CliError::usage("no seeds given".into()));
    }
    Ok(seeds)
}

fn parse_algorithm(s: &str) -> Result<Algorithm, CliError> {
    s.parse().map_err(CliError::usage)
}

fn parse_bits(bits: u8) -> Result<Option<u8>, CliError> {
    match bits {
        0 => Ok(None),
        1..=16 => Ok(Some(bits)),
        _ => Err(CliError::usage(format!("phase depth {bits} outside 0..=16"))),
    }
}

fn run_design(args: DesignArgs) -> Result<(), CliError> {
    let beams: Vec<usize> = parse_list(&args.beams, "beam id")?;
    let architecture = parse_arch(&args.arch)?;
    let algorithm = parse_algorithm(&args.solver)?;
    let bits = parse_bits(args.bits)?;
    let cfg = RunConfigFile::load(args.config.as_deref())?;
    let carrier = cfg.carrier()?;
    let geometry = cfg.geometry()?;
    let grid = cfg.grid()?;
    let options = cfg.solver()?;

    let plan = match &args.splits {
        Some(s) => {
            let widths: Vec<usize> = parse_list(s, "subband width")?;
            SubbandPlan::with_splits(&carrier, &beams, &widths)?
        }
        None => SubbandPlan::equal_split(&carrier, &beams)?,
    };

    let mut solution = solve(algorithm, &plan, &grid, &geometry, architecture, &carrier, &options)?;
    if let Some(bits) = bits {
        solution = quantize_phases(&solution, bits)?;
    }

    let profile = gain_profile(&solution, &plan, &grid, &geometry, &carrier)?;
    let spread = solution.delay_spread_ns();
    let mut loss_sum = 0.0;
    for sb in 0..plan.n_subbands() {
        loss_sum += effective_loss(&profile, sb, spread)?.effective_loss_db;
    }
    let design_loss_db = loss_sum / plan.n_subbands() as f64;

    let widths: Vec<usize> = (0..plan.n_subbands()).map(|sb| plan.range(sb).len()).collect();
    let file = SolutionFile::from_solution(&solution, algorithm, &beams, &widths, design_loss_db);
    write_atomic(&args.out, &file.to_canonical_json())?;

    let mut csv = String::from("subcarrier_index,freq_hz,subband,gain_db\n");
    for (p, &g) in profile.points.iter().zip(&profile.gains_db) {
        push_row(
            &mut csv,
            &[p.sc.to_string(), fmt_sig(p.freq_hz), p.subband.to_string(), fmt_sig(g)],
        );
    }
    write_atomic(&args.pattern, &csv)
}

fn run_eval(args: EvalArgs) -> Result<(), CliError> {
    let architecture = parse_arch(&args.arch)?;
    let algorithm = parse_algorithm(&args.solver)?;
    let cfg = RunConfigFile::load(args.config.as_deref())?;
    let mut mc = MonteCarloConfig::new(architecture, args.nbeams, algorithm, args.trials, args.seed);
    mc.phase_bits = parse_bits(args.bits)?;
    mc.sampling = match args.sampling.as_str() {
        "grid" => AngleSampling::Grid,
        "continuous" => AngleSampling::Continuous,
        other => {
            return Err(CliError::usage(format!(
                "unknown sampling '{other}' (expected grid|continuous)"
            )))
        }
    };
    mc.carrier = cfg.carrier()?;
    mc.geometry = cfg.geometry()?;
    mc.grid = cfg.grid()?;
    mc.solver = cfg.solver()?;

    let summary = monte_carlo_loss(&mc)?;
    let mut csv = String::from("arch,n_beams,algorithm,p90_db,mean_db,max_delay_ns,n_samples,seed\n");
    push_row(
        &mut csv,
        &[
            args.arch.clone(),
            args.nbeams.to_string(),
            algorithm.name().to_string(),
            fmt_sig(summary.p90_db),
            fmt_sig(summary.mean_db),
            fmt_sig(summary.max_delay_ns),
            summary.n_samples.to_string(),
            args.seed.to_string(),
        ],
    );
    write_atomic(&args.out, &csv)
}

fn run_sysim(args: SysimArgs) -> Result<(), CliError> {
    let pools: Vec<usize> = parse_list(&args.pools, "pool size")?;
    let nmaxes: Vec<usize> = parse_list(&args.nmaxes, "user cap")?;
    let seeds = parse_seeds(&args.seeds)?;
    if pools.is_empty() || nmaxes.is_empty() {
        return Err(CliError::usage("pools and nmaxes must be non-empty".into()));
    }
    let cfg = RunConfigFile::load(args.config.as_deref())?;

    let mut csv = String::from("n_pool,n_max,mode,mean_tput,p05_tput,gain_mean,gain_p05,seed\n");
    for &pool in &pools {
        let mut template = SimConfig::new(pool, nmaxes[0], SimMode::Baseline, seeds[0]);
        // One loss table shared by every mode, so the sweep isolates
        // scheduling flexibility.
        template.loss_model = LossModel::Table(default_loss_table(SimMode::ThreeDJpta));
        if let Some(slots) = args.slots {
            template.n_slots = slots;
        }
        cfg.apply_sim(&mut template)?;
        let rows = compare_modes(&[pool], &nmaxes, &seeds, &template)?;
        for row in rows {
            push_row(
                &mut csv,
                &[
                    row.n_pool.to_string(),
                    row.n_max.to_string(),
                    row.mode.name().to_string(),
                    fmt_sig(row.report.mean),
                    fmt_sig(row.report.p05),
                    fmt_sig(row.report.gain_vs_baseline_mean.unwrap_or(0.0)),
                    fmt_sig(row.report.gain_vs_baseline_p05.unwrap_or(0.0)),
                    row.seed.to_string(),
                ],
            );
        }
    }
    write_atomic(&args.out, &csv)
}

fn run_plot(args: PlotArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", args.input.display())))?;
    let table = Table::parse(&text)?;
    let svg = match args.kind.as_str() {
        "gain-bars" => gain_bars(&table)?,
        "loss-cdf" => loss_cdf(&table)?,
        other => {
            return Err(CliError::usage(format!(
                "unknown plot kind '{other}' (expected gain-bars|loss-cdf)"
            )))
        }
    };
    write_atomic(&args.out, &svg)
}

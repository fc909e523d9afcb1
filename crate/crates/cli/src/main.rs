//! `aqncc`: construct, audit and simulate adaptive quantum noise control codes.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aqncc::adaptive::{run_adaptive, AdaptiveConfig, Policy, PriorMode};
use aqncc::channel::{ChannelModel, PzProcess};
use aqncc::code::{assemble, params, AqnccConfig};
use aqncc::criteria::check_criteria;
use aqncc::decoder::{bp_syndrome_decode, DEFAULT_MAX_ITER};
use aqncc::designs::cdm_build;
use aqncc::gf2::BinVector;
use aqncc::output::{envelope_json, export_code, sweep_csv, trace_csv, write_atomic, TraceSummary};
use aqncc::sim::{run_sweep, with_thread_limit, Execution, SuccessMode, SweepConfig};
use clap::{Args, Parser, Subcommand};

use config::{output_dir, parse_f64_range, parse_u32_range, pick, require, resolve, FileConfig};

const DEFAULT_SEED: u64 = 2024;
const DEFAULT_PX: f64 = 0.005;
const DEFAULT_PZ: f64 = 0.02;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Criteria were evaluated and at least one failed.
    Criteria,
    Runtime(anyhow::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Criteria => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<aqncc::Error> for CliError {
    fn from(e: aqncc::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

/// Core validation errors are the caller's fault.
fn invalid(e: aqncc::Error) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "aqncc",
    version,
    about = "Adaptive quantum noise control codes"
)]
struct Cli {
    /// TOML file of flag defaults; keys are long flag names with `_` for `-`.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code pair and write both check matrices.
    Construct(ConstructArgs),
    /// Audit the design criteria for a family.
    Check(CheckArgs),
    /// Static block-error-rate sweep over r, px and pz.
    Sweep(SweepArgs),
    /// Closed-loop run over a drifting phase-flip channel.
    Adapt(AdaptArgs),
    /// Decode one syndrome against an alist parity-check matrix.
    Decode(DecodeArgs),
}

#[derive(Args)]
struct FamilyArgs {
    /// Odd prime order of the difference matrix.
    #[arg(long)]
    p: Option<String>,
    /// Layers discarded from each side.
    #[arg(long)]
    i: Option<String>,
    /// Use the askew family (adds the zero row on the phase side).
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    askew: Option<String>,
}

struct Family {
    p: u32,
    i: u32,
    askew: bool,
}

impl FamilyArgs {
    fn resolve(&self, file: &FileConfig) -> Result<Family, CliError> {
        Ok(Family {
            p: require("p", &self.p, &file.p)?,
            i: resolve("i", &self.i, &file.i, 0)?,
            askew: resolve("askew", &self.askew, &file.askew, false)?,
        })
    }
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Layers moved from the bit side to the phase side.
    #[arg(long)]
    r: Option<String>,
    /// Output directory (default: $AQNCC_OUT_DIR or the current directory).
    #[arg(long)]
    out_dir: Option<String>,
    /// File name stem for the alist and metadata files.
    #[arg(long)]
    stem: Option<String>,
    /// Also write the difference matrix as text to this file.
    #[arg(long, value_name = "FILE")]
    cdm: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Write the report as JSON to this file.
    #[arg(long)]
    json: Option<String>,
}

#[derive(Args)]
struct SimArgs {
    /// Master seed.
    #[arg(long)]
    seed: Option<String>,
    /// Success criterion: exact or degenerate.
    #[arg(long)]
    mode: Option<String>,
    /// Sum-product iteration cap.
    #[arg(long)]
    max_iter: Option<String>,
    /// CSV output path.
    #[arg(long)]
    out: Option<String>,
    /// JSON envelope output path.
    #[arg(long)]
    json: Option<String>,
    /// Directory for default output paths.
    #[arg(long)]
    out_dir: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    sim: SimArgs,
    /// Levels: `lo:hi:step`, `lo:hi`, a comma list or a single value.
    #[arg(long)]
    r: Option<String>,
    /// Bit-flip probabilities: `lo:hi:step`, a comma list or a single value.
    #[arg(long)]
    px: Option<String>,
    /// Phase-flip probabilities, same syntax as --px.
    #[arg(long)]
    pz: Option<String>,
    /// Trials per grid point.
    #[arg(long)]
    trials: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<String>,
    /// Run trials sequentially.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    serial: Option<String>,
}

#[derive(Args)]
struct AdaptArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    sim: SimArgs,
    /// Bit-flip probability.
    #[arg(long)]
    px: Option<String>,
    /// Lower end of the phase-flip range.
    #[arg(long)]
    pz_lo: Option<String>,
    /// Upper end of the phase-flip range.
    #[arg(long)]
    pz_hi: Option<String>,
    /// Blocks between redraws of pz.
    #[arg(long)]
    period: Option<String>,
    /// Number of blocks.
    #[arg(long)]
    horizon: Option<String>,
    /// hold or feedback.
    #[arg(long)]
    policy: Option<String>,
    /// Decoder prior: estimated, oracle or fixed.
    #[arg(long)]
    prior: Option<String>,
    /// Averaging window of the estimated prior, in blocks.
    #[arg(long)]
    prior_window: Option<String>,
    /// Starting value of the estimated prior, or the fixed prior.
    #[arg(long)]
    prior_init: Option<String>,
    /// Level at block 0.
    #[arg(long)]
    initial_r: Option<String>,
}

#[derive(Args)]
struct DecodeArgs {
    /// Parity-check matrix in alist format.
    #[arg(long)]
    alist: Option<String>,
    /// Syndrome as a string of 0 and 1.
    #[arg(long)]
    syndrome: Option<String>,
    /// Per-bit error probability.
    #[arg(long)]
    prior: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
}

fn parse_mode(text: &str) -> Result<SuccessMode, CliError> {
    match text.trim() {
        "exact" => Ok(SuccessMode::Exact),
        "degenerate" => Ok(SuccessMode::Degenerate),
        other => Err(CliError::Usage(format!(
            "--mode: expected exact or degenerate, got {other:?}"
        ))),
    }
}

fn parse_policy(text: &str) -> Result<Policy, CliError> {
    match text.trim() {
        "hold" => Ok(Policy::Hold),
        "feedback" => Ok(Policy::Feedback),
        other => Err(CliError::Usage(format!(
            "--policy: expected hold or feedback, got {other:?}"
        ))),
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    write_atomic(path, text.as_bytes()).map_err(CliError::from)
}

fn construct(args: &ConstructArgs, file: &FileConfig) -> Result<(), CliError> {
    let fam = args.family.resolve(file)?;
    let r = resolve("r", &args.r, &file.r, 0)?;
    let cfg = AqnccConfig::new(fam.p, fam.i, r, fam.askew);
    cfg.validate().map_err(invalid)?;
    let pair = assemble(&cfg)?;
    let dir = output_dir(&args.out_dir, &file.out_dir);
    let default_stem = format!(
        "aqncc_p{}_i{}_r{}{}",
        fam.p,
        fam.i,
        r,
        if fam.askew { "_askew" } else { "" }
    );
    let stem = pick(&args.stem, &file.stem).unwrap_or(default_stem);
    let files = export_code(&pair, &dir, &stem, &cfg)?;
    if let Some(path) = &args.cdm {
        write(path, &cdm_build(fam.p, fam.askew)?.to_text())?;
    }
    let prm = params(&pair);
    println!("{prm}");
    println!(
        "phase layers: {}",
        pair.phase_tags
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!(
        "bit layers:   {}",
        pair.bit_tags
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!(
        "rank H1 {} rank H2 {}, girth {} / {}",
        prm.rank_h1, prm.rank_h2, prm.girth_phase, prm.girth_bit
    );
    for f in [&files.phase, &files.bit, &files.metadata] {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn check(args: &CheckArgs, file: &FileConfig) -> Result<(), CliError> {
    let fam = args.family.resolve(file)?;
    AqnccConfig::new(fam.p, fam.i, 0, fam.askew)
        .validate()
        .map_err(invalid)?;
    let report = check_criteria(fam.p, fam.i, fam.askew)?;
    print!("{report}");
    if let Some(path) = pick(&args.json, &file.json) {
        #[derive(serde::Serialize)]
        struct CheckConfig {
            p: u32,
            i: u32,
            askew: bool,
        }
        let cfg = CheckConfig {
            p: fam.p,
            i: fam.i,
            askew: fam.askew,
        };
        write(Path::new(&path), &envelope_json(&cfg, &report)?)?;
    }
    if report.all_pass() {
        Ok(())
    } else {
        Err(CliError::Criteria)
    }
}

fn sweep(args: &SweepArgs, file: &FileConfig) -> Result<(), CliError> {
    let fam = args.family.resolve(file)?;
    let r_values = match pick(&args.r, &file.r) {
        Some(t) => parse_u32_range("r", &t)?,
        None => vec![0],
    };
    let px_values = match pick(&args.px, &file.px) {
        Some(t) => parse_f64_range("px", &t)?,
        None => vec![DEFAULT_PX],
    };
    let pz_values = match pick(&args.pz, &file.pz) {
        Some(t) => parse_f64_range("pz", &t)?,
        None => vec![DEFAULT_PZ],
    };
    let serial: bool = resolve("serial", &args.serial, &file.serial, false)?;
    let jobs: Option<usize> = match pick(&args.jobs, &file.jobs) {
        Some(t) => Some(config::parse_value("jobs", &t)?),
        None => None,
    };
    if jobs == Some(0) {
        return Err(CliError::Usage("--jobs: must be at least 1".into()));
    }
    let cfg = SweepConfig {
        p: fam.p,
        i: fam.i,
        askew: fam.askew,
        r_values,
        px_values,
        pz_values,
        trials: resolve("trials", &args.trials, &file.trials, 1000)?,
        seed: resolve("seed", &args.sim.seed, &file.seed, DEFAULT_SEED)?,
        mode: parse_mode(&pick(&args.sim.mode, &file.mode).unwrap_or_else(|| "exact".into()))?,
        max_iter: resolve(
            "max-iter",
            &args.sim.max_iter,
            &file.max_iter,
            DEFAULT_MAX_ITER,
        )?,
        execution: if serial {
            Execution::Serial
        } else {
            Execution::Parallel
        },
    };
    cfg.validate().map_err(invalid)?;
    let results = with_thread_limit(jobs, || run_sweep(&cfg))??;

    let dir = output_dir(&args.sim.out_dir, &file.out_dir);
    let csv_path = pick(&args.sim.out, &file.out)
        .map(PathBuf::from)
        .unwrap_or_else(|| dir.join("sweep.csv"));
    let json_path = pick(&args.sim.json, &file.json)
        .map(PathBuf::from)
        .unwrap_or_else(|| dir.join("sweep.json"));
    write(&csv_path, &sweep_csv(&results)?)?;
    write(&json_path, &envelope_json(&cfg, &results)?)?;
    for row in &results {
        println!(
            "r={:<3} px={:<8} pz={:<8} ber={:.4e} [{:.3e}, {:.3e}] ({}/{})",
            row.r, row.px, row.pz, row.ber, row.ci_lo, row.ci_hi, row.block_fail, row.trials
        );
    }
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

fn adapt(args: &AdaptArgs, file: &FileConfig) -> Result<(), CliError> {
    let fam = args.family.resolve(file)?;
    let lo = resolve("pz-lo", &args.pz_lo, &file.pz_lo, 0.0)?;
    let hi = resolve("pz-hi", &args.pz_hi, &file.pz_hi, 0.03)?;
    let window: f64 = resolve(
        "prior-window",
        &args.prior_window,
        &file.prior_window,
        100.0,
    )?;
    let init: f64 = resolve(
        "prior-init",
        &args.prior_init,
        &file.prior_init,
        0.5 * (lo + hi),
    )?;
    let prior = match pick(&args.prior, &file.prior)
        .as_deref()
        .map(str::trim)
        .unwrap_or("estimated")
    {
        "estimated" => PriorMode::Estimated { window, init },
        "oracle" => PriorMode::Oracle,
        "fixed" => PriorMode::Fixed { pz: init },
        other => {
            return Err(CliError::Usage(format!(
                "--prior: expected estimated, oracle or fixed, got {other:?}"
            )))
        }
    };
    let pz = PzProcess::Piecewise {
        period: resolve("period", &args.period, &file.period, 100)?,
        lo,
        hi,
    };
    let channel = ChannelModel {
        px: resolve("px", &args.px, &file.px, DEFAULT_PX)?,
        pz,
        seed: resolve("seed", &args.sim.seed, &file.seed, DEFAULT_SEED)?,
    };
    let cfg = AdaptiveConfig {
        p: fam.p,
        i: fam.i,
        askew: fam.askew,
        channel,
        policy: parse_policy(
            &pick(&args.policy, &file.policy).unwrap_or_else(|| "feedback".into()),
        )?,
        prior,
        horizon: resolve("horizon", &args.horizon, &file.horizon, 10_000)?,
        initial_r: resolve("initial-r", &args.initial_r, &file.initial_r, 0)?,
        mode: parse_mode(&pick(&args.sim.mode, &file.mode).unwrap_or_else(|| "exact".into()))?,
        max_iter: resolve(
            "max-iter",
            &args.sim.max_iter,
            &file.max_iter,
            DEFAULT_MAX_ITER,
        )?,
    };
    cfg.validate().map_err(invalid)?;
    let trace = run_adaptive(&cfg)?;

    let dir = output_dir(&args.sim.out_dir, &file.out_dir);
    let csv_path = pick(&args.sim.out, &file.out)
        .map(PathBuf::from)
        .unwrap_or_else(|| dir.join("trace.csv"));
    let json_path = pick(&args.sim.json, &file.json)
        .map(PathBuf::from)
        .unwrap_or_else(|| dir.join("trace.json"));
    let summary = TraceSummary::of(&trace);
    write(&csv_path, &trace_csv(&trace)?)?;
    write(&json_path, &envelope_json(&cfg, &summary)?)?;
    println!(
        "blocks {} failed {} (phase {}, bit {}) ber={:.4e} [{:.3e}, {:.3e}]",
        summary.blocks,
        summary.block_fail,
        summary.phase_fail,
        summary.bit_fail,
        summary.ber,
        summary.ci_lo,
        summary.ci_hi
    );
    println!(
        "r visited {}..{} of {}..{}, mean {:.2}",
        summary.r_visited.0,
        summary.r_visited.1,
        summary.r_bounds.0,
        summary.r_bounds.1,
        summary.mean_r
    );
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

fn decode(args: &DecodeArgs, file: &FileConfig) -> Result<(), CliError> {
    let path: String = require("alist", &args.alist, &file.alist)?;
    let bits: String = require("syndrome", &args.syndrome, &file.syndrome)?;
    let prior: f64 = resolve("prior", &args.prior, &None, 0.01)?;
    let max_iter = resolve("max-iter", &args.max_iter, &file.max_iter, DEFAULT_MAX_ITER)?;
    let h =
        aqncc::alist::read_alist(&path).map_err(|e| CliError::Usage(format!("--alist: {e}")))?;
    let syndrome = BinVector::parse_bitstring(bits.trim())
        .map_err(|e| CliError::Usage(format!("--syndrome: {e}")))?;
    let out = bp_syndrome_decode(&h, &syndrome, prior, max_iter).map_err(invalid)?;
    println!("{}", out.estimate.to_bitstring());
    println!(
        "iterations {} converged {}",
        out.iterations_used, out.converged
    );
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::Construct(a) => construct(a, &file),
        Command::Check(a) => check(a, &file),
        Command::Sweep(a) => sweep(a, &file),
        Command::Adapt(a) => adapt(a, &file),
        Command::Decode(a) => decode(a, &file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Criteria => eprintln!("error: design criteria failed"),
                CliError::Runtime(e) => eprintln!("error: {e:#}"),
            }
            ExitCode::from(err.code())
        }
    }
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use polarflip::gauss::{channel_mu_from_ebn0, tree_means};
use polarflip::{partition, CrcSpec};
use polarflip_harness::decoder::parse_list;
use polarflip_harness::{
    run_accuracy, run_bler, write_results, CodeFile, CodeSource, DecoderSpec, Format, ParamsSource,
    Precision, SweepConfig,
};
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "polarflip", version, about = "Polar code construction and decoder simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code by Gaussian approximation and write its definition file.
    Construct(ConstructArgs),
    /// Print the critical set of a code as JSON.
    CriticalSet(CodeArgs),
    /// BLER sweep.
    Bler(SimArgs),
    /// BLER sweep; same output, named for complexity studies.
    Complexity(SimArgs),
    /// First-error-in-critical-set accuracy of SC decoding.
    Accuracy(SimArgs),
    /// Accuracy experiment at its default operating points (1, 1.5, 2 dB).
    Table1(SimArgs),
}

#[derive(Args, Clone)]
struct CodeArgs {
    /// Code definition file; overrides the construction flags.
    #[arg(long)]
    code: Option<PathBuf>,
    /// log2 of the block length.
    #[arg(long)]
    n: Option<u32>,
    /// Information bits, CRC included.
    #[arg(long = "k")]
    k: Option<usize>,
    /// Construction SNR (Eb/N0, dB). Simulations without it rebuild the
    /// code at every operating point.
    #[arg(long)]
    design_snr: Option<f64>,
    /// `crc24` or `none`.
    #[arg(long)]
    crc: Option<String>,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// JSON file with defaults for any of the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated Eb/N0 points in dB.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    /// Comma-separated list of sc, flip:K, cascl:L, genie:K.
    #[arg(long)]
    decoder: Option<String>,
    /// `none`, `tuned` or a params file.
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Early stop per decoder and point; 0 disables.
    #[arg(long)]
    max_block_errors: Option<u64>,
    /// f64 or f32.
    #[arg(long)]
    precision: Option<String>,
    /// Decode noise-free LLRs.
    #[arg(long)]
    noiseless: bool,
}

/// Sweep config file; every key is optional and flags take precedence.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    code: Option<PathBuf>,
    n: Option<u32>,
    #[serde(rename = "K")]
    k: Option<usize>,
    design_snr_db: Option<f64>,
    crc: Option<String>,
    snr: Option<Vec<f64>>,
    trials: Option<u64>,
    decoder: Option<String>,
    params: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<String>,
    max_block_errors: Option<u64>,
    precision: Option<String>,
    noiseless: Option<bool>,
}

fn print_stdout(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}")?;
    Ok(out.flush()?)
}

fn parse_crc(s: &str) -> anyhow::Result<Option<CrcSpec>> {
    match s {
        "crc24" => Ok(Some(CrcSpec::crc24())),
        "none" => Ok(None),
        other => bail!("unknown CRC `{other}` (crc24 or none)"),
    }
}

fn parse_snrs(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad SNR `{p}`")))
        .collect()
}

fn code_source(args: &CodeArgs, file: &SweepFile) -> anyhow::Result<CodeSource> {
    if let Some(path) = args.code.as_ref().or(file.code.as_ref()) {
        return Ok(CodeSource::File(CodeFile::load(path)?));
    }
    let crc = args.crc.as_deref().or(file.crc.as_deref()).unwrap_or("crc24");
    Ok(CodeSource::Construct {
        n: args.n.or(file.n).unwrap_or(10),
        k: args.k.or(file.k).unwrap_or(512),
        design_snr_db: args.design_snr.or(file.design_snr_db),
        crc: parse_crc(crc)?,
    })
}

fn construct(args: &ConstructArgs) -> anyhow::Result<()> {
    let source = code_source(&args.code, &SweepFile::default())?;
    let snr = args.code.design_snr.unwrap_or(2.0);
    let file = CodeFile::from_config(&source.code_at(snr)?);
    match &args.out {
        Some(path) => file.save(path)?,
        None => print_stdout(&serde_json::to_string_pretty(&file)?)?,
    }
    Ok(())
}

fn critical_set_report(args: &CodeArgs) -> anyhow::Result<()> {
    let source = code_source(args, &SweepFile::default())?;
    let code = source.code_at(args.design_snr.unwrap_or(2.0))?;
    let blocks = partition(code.frozen_mask())?;
    let n = code.log_len();
    let means = tree_means(n, channel_mu_from_ebn0(code.design_snr_db(), code.rate()))?;
    let report = serde_json::json!({
        "n": n,
        "K": code.k(),
        "design_snr_db": code.design_snr_db(),
        "s_size": blocks.len(),
        "members": blocks.blocks.iter().map(|b| b.first).collect::<Vec<_>>(),
        "blocks": blocks.blocks.iter().map(|b| {
            let d = b.root_depth as usize;
            serde_json::json!({
                "first": b.first,
                "size": b.size,
                "root_mean": means[d][(b.first - 1) >> (n as usize - d)],
            })
        }).collect::<Vec<_>>(),
    });
    print_stdout(&serde_json::to_string_pretty(&report)?)
}

fn sweep(args: &SimArgs, default_snrs: &[f64], default_trials: u64, default_decoders: &str) -> anyhow::Result<(SweepConfig, Option<PathBuf>, Format)> {
    let file: SweepFile = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => SweepFile::default(),
    };
    let snrs = match &args.snr {
        Some(s) => parse_snrs(s)?,
        None => file.snr.clone().unwrap_or_else(|| default_snrs.to_vec()),
    };
    let params = match args.params.as_deref().or(file.params.as_deref()) {
        Some(p) => ParamsSource::parse(p)?,
        None => ParamsSource::Disabled,
    };
    let default_decoders = match params.max_level() {
        Some(level) if default_decoders == "sc" => DecoderSpec::Flip(level).to_string(),
        _ => default_decoders.to_string(),
    };
    let decoders = parse_list(args.decoder.as_deref().or(file.decoder.as_deref()).unwrap_or(&default_decoders))?;
    let mut cfg = SweepConfig::new(code_source(&args.code, &file)?, snrs, args.trials.or(file.trials).unwrap_or(default_trials), decoders);
    cfg.params = params;
    cfg.seed = args.seed.or(file.seed).unwrap_or(1);
    cfg.max_block_errors = match args.max_block_errors.or(file.max_block_errors).unwrap_or(200) {
        0 => None,
        m => Some(m),
    };
    cfg.noiseless = args.noiseless || file.noiseless.unwrap_or(false);
    cfg.precision = match args.precision.as_deref().or(file.precision.as_deref()).unwrap_or("f64") {
        "f64" => Precision::F64,
        "f32" => Precision::F32,
        other => bail!("unknown precision `{other}` (f64 or f32)"),
    };
    let format: Format = args.format.as_deref().or(file.format.as_deref()).unwrap_or("csv").parse()?;
    Ok((cfg, args.out.clone().or(file.out), format))
}

fn emit(rows: &[polarflip_harness::ResultRow], out: Option<&Path>, format: Format) -> anyhow::Result<()> {
    match out {
        Some(path) => polarflip_harness::emit_results(rows, format, path)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_results(rows, format, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn main_inner(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Construct(args) => construct(&args),
        Command::CriticalSet(args) => critical_set_report(&args),
        Command::Bler(args) | Command::Complexity(args) => {
            let (cfg, out, format) = sweep(&args, &[2.0], 10_000, "sc")?;
            emit(&run_bler(&cfg)?, out.as_deref(), format)
        }
        Command::Accuracy(args) => {
            let (cfg, out, format) = sweep(&args, &[2.0], 100_000, "sc")?;
            emit(&run_accuracy(&cfg)?, out.as_deref(), format)
        }
        Command::Table1(args) => {
            let (cfg, out, format) = sweep(&args, &[1.0, 1.5, 2.0], 100_000, "sc")?;
            emit(&run_accuracy(&cfg)?, out.as_deref(), format)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

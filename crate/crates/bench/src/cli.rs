//! `ridgelab` subcommands.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ridgelab::pca::Threshold;
use ridgelab::{
    codec, resize_nearest, Error, FilterDefaults, FilterRegistry, Image, MetricsReport, NoiseSpec,
};

use crate::config::BenchConfig;
use crate::error::BenchError;
use crate::runner::{run_bench, threads_from_env, RunOptions};
use crate::synth::SynthSpec;

#[derive(Debug, Parser)]
#[command(
    name = "ridgelab",
    version,
    about = "Fingerprint de-noising pipelines and benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a filter pipeline over one image.
    Denoise(DenoiseArgs),
    /// Write a noisy copy of an image or synthetic ridge fixture.
    Noise(NoiseArgs),
    /// Run a bench config and write the report.
    Bench(BenchArgs),
    /// List registered filters and their parameters.
    Filters,
}

#[derive(Debug, Args)]
pub struct FilterFlags {
    /// Default PCA threshold (intensity units or `auto`).
    #[arg(long, value_name = "TAU|auto")]
    pub tau: Option<Threshold>,
    /// Default PCA pass limit.
    #[arg(long, value_name = "N")]
    pub passes: Option<usize>,
    /// Stretch PCA output onto [0, 255] instead of clipping.
    #[arg(long)]
    pub stretch: bool,
    /// Snap Gabor orientations onto N directions.
    #[arg(long, value_name = "N")]
    pub quantize_orient: Option<usize>,
}

impl FilterFlags {
    pub fn defaults(&self) -> FilterDefaults {
        let mut d = FilterDefaults::default();
        if let Some(t) = self.tau {
            d.pca.tau = t;
        }
        if let Some(n) = self.passes {
            d.pca.max_passes = n;
        }
        d.pca.stretch_output = self.stretch;
        d.gabor.orientation_bins = self.quantize_orient;
        d
    }
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    pub input: PathBuf,
    /// Pipeline, e.g. `gaussian:1|pca:24,1`.
    #[arg(long, default_value = "pca")]
    pub pipe: String,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Clean reference; prints a JSON metrics line when given.
    #[arg(long = "ref", value_name = "CLEAN")]
    pub reference: Option<PathBuf>,
    /// Nearest-neighbour resize of input (and reference) before filtering.
    #[arg(long, value_name = "WxH")]
    pub resize: Option<String>,
    #[command(flatten)]
    pub flags: FilterFlags,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["input", "synth"])))]
pub struct NoiseArgs {
    pub input: Option<PathBuf>,
    /// Synthetic ridge fixture `WxH:period:degrees`.
    #[arg(long, value_name = "WxH:P:DEG")]
    pub synth: Option<String>,
    /// Noise model `kind:param:seed` (gaussian, speckle, sp).
    #[arg(long)]
    pub spec: String,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub config: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: ReportFormat,
    /// Leave the `ms` column empty for reproducible reports.
    #[arg(long)]
    pub no_timing: bool,
    #[command(flatten)]
    pub flags: FilterFlags,
}

/// Failure carrying the process exit status.
#[derive(Debug)]
pub struct CliFailure {
    pub code: u8,
    pub message: String,
}

impl CliFailure {
    fn new(code: u8, message: impl ToString) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        Self::new(1, e)
    }
}

impl From<BenchError> for CliFailure {
    fn from(e: BenchError) -> Self {
        Self::new(1, e)
    }
}

fn parse_dims(text: &str) -> Result<(usize, usize), CliFailure> {
    text.split_once(['x', 'X'])
        .and_then(|(w, h)| Some((w.parse().ok()?, h.parse().ok()?)))
        .ok_or_else(|| CliFailure::new(1, format!("bad --resize `{text}`, expected WxH")))
}

/// Writes the de-noised image; returns the metrics line when a reference
/// was supplied. Metrics are computed on the quantized output as written.
pub fn cmd_denoise(
    args: &DenoiseArgs,
    registry: &FilterRegistry,
) -> Result<Option<MetricsReport>, CliFailure> {
    let pipeline = registry.parse_pipeline(&args.pipe, &args.flags.defaults())?;
    let resize = args.resize.as_deref().map(parse_dims).transpose()?;
    let prepare = |img: Image| -> Result<Image, CliFailure> {
        match resize {
            Some((w, h)) => Ok(resize_nearest(&img, w, h)?),
            None => Ok(img),
        }
    };
    let input = prepare(codec::load_image(&args.input)?)?;
    let reference = args
        .reference
        .as_ref()
        .map(|p| {
            codec::load_image(p)
                .map_err(CliFailure::from)
                .and_then(prepare)
        })
        .transpose()?;
    if let Some(r) = &reference {
        if r.dims() != input.dims() {
            return Err(CliFailure::new(
                2,
                format!(
                    "reference is {:?} but input is {:?}",
                    r.dims(),
                    input.dims()
                ),
            ));
        }
    }
    let out = pipeline.apply(&input)?.quantize();
    codec::save_pgm(&out, &args.output)?;
    reference
        .map(|r| MetricsReport::compare(&r, &out).map_err(CliFailure::from))
        .transpose()
}

pub fn cmd_noise(args: &NoiseArgs) -> Result<(), CliFailure> {
    let spec: NoiseSpec = args.spec.parse()?;
    let clean = match (&args.input, &args.synth) {
        (Some(p), None) => codec::load_image(p)?,
        (None, Some(s)) => s.parse::<SynthSpec>()?.generate(),
        _ => return Err(CliFailure::new(1, "give exactly one of INPUT or --synth")),
    };
    codec::save_pgm(&spec.apply(&clean)?, &args.output)?;
    Ok(())
}

/// Writes the report (even when cells failed) and fails with every bad cell
/// listed.
pub fn cmd_bench(args: &BenchArgs, registry: &FilterRegistry) -> Result<(), CliFailure> {
    let config = BenchConfig::load(&args.config)?;
    let opts = RunOptions {
        no_timing: args.no_timing,
        defaults: args.flags.defaults(),
        threads: threads_from_env()?,
    };
    let report = run_bench(&config, registry, &opts)?;
    let text = match args.format {
        ReportFormat::Csv => report.to_csv()?,
        ReportFormat::Json => report.to_json()?,
    };
    fs::write(&args.output, text)
        .map_err(|e| CliFailure::new(1, format!("{}: {e}", args.output.display())))?;
    let failed: Vec<String> = report
        .failures()
        .map(|r| {
            format!(
                "  {} | {} | {}: {}",
                r.input,
                r.noise,
                r.pipeline,
                r.error.as_deref().unwrap_or_default()
            )
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliFailure::new(
            1,
            format!("{} cell(s) failed:\n{}", failed.len(), failed.join("\n")),
        ))
    }
}

pub fn cmd_filters(registry: &FilterRegistry, out: &mut impl Write) -> std::io::Result<()> {
    for name in registry.names() {
        if let Some(f) = registry.get(name) {
            writeln!(out, "{}", f.usage())?;
        }
    }
    Ok(())
}

/// Dispatches a parsed command line; returns the exit status.
pub fn run(cli: Cli) -> u8 {
    let registry = FilterRegistry::with_builtins();
    let result = match &cli.command {
        Command::Denoise(a) => cmd_denoise(a, &registry).and_then(|m| {
            if let Some(m) = m {
                let line = serde_json::to_string(&m).map_err(|e| CliFailure::new(1, e))?;
                println!("{line}");
            }
            Ok(())
        }),
        Command::Noise(a) => cmd_noise(a),
        Command::Bench(a) => cmd_bench(a, &registry),
        Command::Filters => {
            cmd_filters(&registry, &mut std::io::stdout().lock()).map_err(|e| CliFailure::new(1, e))
        }
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("ridgelab: {}", f.message);
            f.code
        }
    }
}

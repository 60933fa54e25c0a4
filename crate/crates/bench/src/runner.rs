//! Runs every (input x noise x pipeline) cell of a bench config.

use std::time::Instant;

use rayon::prelude::*;
use ridgelab::{FilterDefaults, FilterRegistry, Image, MetricsReport};

use crate::config::BenchConfig;
use crate::error::BenchError;
use crate::report::{BenchReport, BenchRow};

/// Environment variable capping bench parallelism; `0` or unset means auto.
pub const THREADS_ENV: &str = "RIDGELAB_THREADS";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Omit wall-clock timings so reports are byte-reproducible.
    pub no_timing: bool,
    pub defaults: FilterDefaults,
    /// Worker count; `None` or `Some(0)` uses the rayon default.
    pub threads: Option<usize>,
}

/// Reads [`THREADS_ENV`].
pub fn threads_from_env() -> Result<Option<usize>, BenchError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v.trim().parse().map(Some).map_err(|_| BenchError::Env {
            name: THREADS_ENV,
            message: format!("`{v}` is not a non-negative integer"),
        }),
        _ => Ok(None),
    }
}

struct Prepared {
    input: String,
    noise: String,
    seed: u64,
    clean: Result<Image, String>,
    noisy: Result<Image, String>,
}

fn run_cell(
    prep: &Prepared,
    pipeline: &str,
    registry: &FilterRegistry,
    opts: &RunOptions,
) -> BenchRow {
    let mut row = BenchRow::new(&prep.input, &prep.noise, pipeline, prep.seed);
    let result = (|| -> Result<(), String> {
        let clean = prep.clean.as_ref().map_err(Clone::clone)?;
        let noisy = prep.noisy.as_ref().map_err(Clone::clone)?;
        let pipe = registry
            .parse_pipeline(pipeline, &opts.defaults)
            .map_err(|e| e.to_string())?;
        let start = Instant::now();
        let out = pipe.apply(noisy).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        row.vs_clean = Some(MetricsReport::compare(clean, &out).map_err(|e| e.to_string())?);
        row.vs_noisy = Some(MetricsReport::compare(noisy, &out).map_err(|e| e.to_string())?);
        if !opts.no_timing {
            row.ms = Some(elapsed);
        }
        Ok(())
    })();
    row.error = result.err();
    row
}

fn run_inner(config: &BenchConfig, registry: &FilterRegistry, opts: &RunOptions) -> BenchReport {
    let inputs: Vec<(String, Result<Image, String>)> = config
        .inputs
        .par_iter()
        .map(|i| (i.to_string(), i.load().map_err(|e| e.to_string())))
        .collect();
    let prepared: Vec<Prepared> = inputs
        .iter()
        .flat_map(|(id, clean)| config.noises.iter().map(move |n| (id, clean, n)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(id, clean, noise)| Prepared {
            input: id.clone(),
            noise: noise.to_string(),
            seed: noise.seed,
            clean: clean.clone(),
            noisy: clean
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|c| noise.apply(c).map_err(|e| e.to_string())),
        })
        .collect();
    let cells: Vec<(&Prepared, &String)> = prepared
        .iter()
        .flat_map(|p| config.pipelines.iter().map(move |pipe| (p, pipe)))
        .collect();
    let rows = cells
        .into_par_iter()
        .map(|(p, pipe)| run_cell(p, pipe, registry, opts))
        .collect();
    BenchReport::new(rows)
}

/// Runs the whole grid. Cell failures are recorded in their rows; only
/// config-level problems return `Err`.
pub fn run_bench(
    config: &BenchConfig,
    registry: &FilterRegistry,
    opts: &RunOptions,
) -> Result<BenchReport, BenchError> {
    config.validate()?;
    match opts.threads {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| BenchError::Env {
                    name: THREADS_ENV,
                    message: e.to_string(),
                })?;
            Ok(pool.install(|| run_inner(config, registry, opts)))
        }
        _ => Ok(run_inner(config, registry, opts)),
    }
}

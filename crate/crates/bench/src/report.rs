//! Bench report rows and their CSV / JSON encodings.

use ridgelab::metrics::{format_metric, MetricValue};
use ridgelab::MetricsReport;
use serde::Serialize;

use crate::error::BenchError;

pub const CSV_HEADER: [&str; 12] = [
    "input",
    "noise",
    "pipeline",
    "seed",
    "mse_clean",
    "snr_clean",
    "psnr_clean",
    "mse_noisy",
    "snr_noisy",
    "psnr_noisy",
    "sigma_hat",
    "ms",
];

/// Appended to the header only when at least one cell failed.
pub const ERROR_COLUMN: &str = "error";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub input: String,
    pub noise: String,
    pub pipeline: String,
    pub seed: u64,
    /// Output scored against the clean reference; carries `sigma_hat` of the output.
    pub vs_clean: Option<MetricsReport>,
    /// Output scored against the noisy input it was computed from.
    pub vs_noisy: Option<MetricsReport>,
    pub ms: Option<f64>,
    pub error: Option<String>,
}

impl BenchRow {
    pub fn new(input: &str, noise: &str, pipeline: &str, seed: u64) -> Self {
        Self {
            input: input.to_string(),
            noise: noise.to_string(),
            pipeline: pipeline.to_string(),
            seed,
            vs_clean: None,
            vs_noisy: None,
            ms: None,
            error: None,
        }
    }

    fn sort_key(&self) -> (&str, &str, &str) {
        (&self.input, &self.noise, &self.pipeline)
    }

    fn csv_record(&self, with_error: bool) -> Vec<String> {
        let triple = |m: &Option<MetricsReport>| match m {
            Some(m) => {
                let [a, b, c, _] = m.csv_fields();
                [a, b, c]
            }
            None => Default::default(),
        };
        let mut rec = vec![
            self.input.clone(),
            self.noise.clone(),
            self.pipeline.clone(),
            self.seed.to_string(),
        ];
        rec.extend(triple(&self.vs_clean));
        rec.extend(triple(&self.vs_noisy));
        rec.push(
            self.vs_clean
                .and_then(|m| m.sigma_hat)
                .map(format_metric)
                .unwrap_or_default(),
        );
        rec.push(self.ms.map(|ms| format!("{ms:.3}")).unwrap_or_default());
        if with_error {
            rec.push(self.error.clone().unwrap_or_default());
        }
        rec
    }
}

#[derive(Serialize)]
struct JsonRow<'a> {
    input: &'a str,
    noise: &'a str,
    pipeline: &'a str,
    seed: u64,
    mse_clean: Option<MetricValue>,
    snr_clean: Option<MetricValue>,
    psnr_clean: Option<MetricValue>,
    mse_noisy: Option<MetricValue>,
    snr_noisy: Option<MetricValue>,
    psnr_noisy: Option<MetricValue>,
    sigma_hat: Option<MetricValue>,
    ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

impl<'a> From<&'a BenchRow> for JsonRow<'a> {
    fn from(r: &'a BenchRow) -> Self {
        let c = r.vs_clean.as_ref();
        let n = r.vs_noisy.as_ref();
        Self {
            input: &r.input,
            noise: &r.noise,
            pipeline: &r.pipeline,
            seed: r.seed,
            mse_clean: c.map(|m| MetricValue(m.mse)),
            snr_clean: c.map(|m| MetricValue(m.snr_db)),
            psnr_clean: c.map(|m| MetricValue(m.psnr_db)),
            mse_noisy: n.map(|m| MetricValue(m.mse)),
            snr_noisy: n.map(|m| MetricValue(m.snr_db)),
            psnr_noisy: n.map(|m| MetricValue(m.psnr_db)),
            sigma_hat: c.and_then(|m| m.sigma_hat).map(MetricValue),
            ms: r.ms,
            error: r.error.as_deref(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    rows: Vec<BenchRow>,
}

impl BenchReport {
    /// Sorts rows by `(input, noise, pipeline)`.
    pub fn new(mut rows: Vec<BenchRow>) -> Self {
        rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Self { rows }
    }

    pub fn rows(&self) -> &[BenchRow] {
        &self.rows
    }

    pub fn failures(&self) -> impl Iterator<Item = &BenchRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }

    pub fn to_csv(&self) -> Result<String, BenchError> {
        let with_error = self.failures().next().is_some();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<&str> = CSV_HEADER.to_vec();
        if with_error {
            header.push(ERROR_COLUMN);
        }
        w.write_record(&header)?;
        for r in &self.rows {
            w.write_record(r.csv_record(with_error))?;
        }
        let bytes = w.into_inner().map_err(|e| BenchError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String, BenchError> {
        let rows: Vec<JsonRow> = self.rows.iter().map(JsonRow::from).collect();
        let mut s = serde_json::to_string_pretty(&rows)?;
        s.push('\n');
        Ok(s)
    }
}

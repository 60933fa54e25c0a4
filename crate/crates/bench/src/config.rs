//! Line-oriented bench configuration.
//!
//! ```text
//! # comment
//! input synth:256x256:8:45
//! input prints/f001.pgm        # relative to the config file
//! noise sp:0.05:42
//! pipe  pca:24,1
//! pipe  gaussian:1|pca:24,1
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use ridgelab::{codec::load_image, Image, NoiseSpec};

use crate::error::BenchError;
use crate::synth::SynthSpec;

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    File { label: String, path: PathBuf },
    Synth(SynthSpec),
}

impl InputSource {
    /// Parses `synth:<spec>` or a path resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, BenchError> {
        let text = text.trim();
        if let Some(spec) = text.strip_prefix("synth:") {
            return Ok(Self::Synth(spec.parse()?));
        }
        let path = Path::new(text);
        let path = if path.is_absolute() {
            path.to_path_buf()
        } else {
            base_dir.join(path)
        };
        Ok(Self::File {
            label: text.to_string(),
            path,
        })
    }

    pub fn load(&self) -> Result<Image, BenchError> {
        match self {
            Self::File { path, .. } => Ok(load_image(path)?),
            Self::Synth(s) => Ok(s.generate()),
        }
    }
}

impl fmt::Display for InputSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::File { label, .. } => f.write_str(label),
            Self::Synth(s) => write!(f, "synth:{s}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchConfig {
    pub inputs: Vec<InputSource>,
    pub noises: Vec<NoiseSpec>,
    /// Pipeline texts as written; parsed per cell so one bad pipeline only
    /// fails its own cells.
    pub pipelines: Vec<String>,
}

impl BenchConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, BenchError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(char::is_whitespace)
                .map(|(k, v)| (k, v.trim()))
                .unwrap_or((line, ""));
            let err = |message: String| BenchError::Config {
                line: line_no,
                message,
            };
            if value.is_empty() {
                return Err(err(format!("`{key}` needs a value")));
            }
            match key {
                "input" => cfg
                    .inputs
                    .push(InputSource::parse(value, base_dir).map_err(|e| err(e.to_string()))?),
                "noise" => cfg.noises.push(
                    value
                        .parse()
                        .map_err(|e: ridgelab::Error| err(e.to_string()))?,
                ),
                "pipe" => cfg.pipelines.push(value.to_string()),
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.pipelines.is_empty() {
            return Err(BenchError::NoPipelines);
        }
        if self.inputs.is_empty() {
            return Err(BenchError::NoInputs);
        }
        if self.noises.is_empty() {
            return Err(BenchError::NoNoise);
        }
        Ok(())
    }
}

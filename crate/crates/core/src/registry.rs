//! Named de-noising strategies and left-to-right pipelines.
//!
//! Every filter is a [`Denoiser`] built by a [`FilterFactory`] registered
//! under its name. Pipelines are written `name:params|name:params`, e.g.
//! `gaussian:1|pca:24,1`.
//!
//! | name       | parameters                       | default          |
//! |------------|----------------------------------|------------------|
//! | `gaussian` | sigma (pixels)                   | `1`              |
//! | `median`   | radius                           | `1`              |
//! | `histeq`   | none                             |                  |
//! | `visu`     | sigma or `auto`                  | `auto`           |
//! | `gabor`    | orientation bins (optional)      | continuous       |
//! | `wgc`      | orientation bins (optional)      | continuous       |
//! | `pca`      | tau or `auto`, passes, `stretch` | from defaults    |

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::filters::{
    gabor_enhance, gaussian_blur, histogram_equalize, median_filter, visu_shrink,
    wavelet_gabor_composite, GaborConfig, SigmaChoice,
};
use crate::image::Image;
use crate::pca::{denoise, PcaConfig, Threshold};

/// A configured filter stage.
pub trait Denoiser: Send + Sync {
    fn name(&self) -> &'static str;

    /// Canonical `name[:params]` text that rebuilds this stage.
    fn spec(&self) -> String;

    fn apply(&self, image: &Image) -> Result<Image>;
}

impl fmt::Debug for dyn Denoiser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

/// Settings a factory falls back on when the stage text omits them;
/// the CLI fills these from flags such as `--tau` or `--quantize-orient`.
#[derive(Debug, Clone, Default)]
pub struct FilterDefaults {
    pub pca: PcaConfig,
    pub gabor: GaborConfig,
}

pub trait FilterFactory: Send + Sync {
    fn name(&self) -> &'static str;

    /// Parameter grammar shown in diagnostics.
    fn usage(&self) -> &'static str;

    fn build(&self, params: Option<&str>, defaults: &FilterDefaults) -> Result<Box<dyn Denoiser>>;
}

#[derive(Default)]
pub struct FilterRegistry {
    factories: BTreeMap<&'static str, Box<dyn FilterFactory>>,
}

impl FilterRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding every built-in filter.
    pub fn with_builtins() -> Self {
        let mut r = Self::new();
        r.register(GaussianFactory);
        r.register(MedianFactory);
        r.register(HistEqFactory);
        r.register(VisuFactory);
        r.register(GaborFactory);
        r.register(CompositeFactory);
        r.register(PcaFactory);
        r
    }

    /// Adds or replaces the factory registered under `factory.name()`.
    pub fn register(&mut self, factory: impl FilterFactory + 'static) {
        self.factories.insert(factory.name(), Box::new(factory));
    }

    pub fn get(&self, name: &str) -> Option<&dyn FilterFactory> {
        self.factories.get(name).map(|f| f.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    /// Builds one stage from `name` or `name:params`.
    pub fn build_stage(&self, text: &str, defaults: &FilterDefaults) -> Result<Box<dyn Denoiser>> {
        let text = text.trim();
        let (name, params) = match text.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (text, None),
        };
        let factory = self
            .get(name)
            .ok_or_else(|| Error::UnknownFilter(name.to_string()))?;
        factory.build(params, defaults)
    }

    pub fn parse_pipeline(&self, text: &str, defaults: &FilterDefaults) -> Result<Pipeline> {
        if text.trim().is_empty() {
            return Err(Error::parse(text, "empty pipeline"));
        }
        let stages = text
            .split('|')
            .map(|s| self.build_stage(s, defaults))
            .collect::<Result<Vec<_>>>()?;
        Ok(Pipeline { stages })
    }
}

/// Stages applied left to right.
#[derive(Debug)]
pub struct Pipeline {
    stages: Vec<Box<dyn Denoiser>>,
}

impl Pipeline {
    pub fn new(stages: Vec<Box<dyn Denoiser>>) -> Self {
        Self { stages }
    }

    pub fn stages(&self) -> &[Box<dyn Denoiser>] {
        &self.stages
    }

    pub fn apply(&self, image: &Image) -> Result<Image> {
        self.stages
            .iter()
            .try_fold(image.clone(), |img, stage| stage.apply(&img))
    }

    pub fn spec(&self) -> String {
        self.stages
            .iter()
            .map(|s| s.spec())
            .collect::<Vec<_>>()
            .join("|")
    }
}

fn number<T: std::str::FromStr>(filter: &str, text: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| Error::parse(text, format!("bad parameter for `{filter}`")))
}

fn no_params(filter: &str, params: Option<&str>) -> Result<()> {
    match params {
        Some(p) if !p.is_empty() => Err(Error::parse(p, format!("`{filter}` takes no parameters"))),
        _ => Ok(()),
    }
}

fn orientation_bins(
    filter: &str,
    params: Option<&str>,
    defaults: &GaborConfig,
) -> Result<GaborConfig> {
    let mut cfg = *defaults;
    if let Some(p) = params.filter(|p| !p.is_empty()) {
        let bins: usize = number(filter, p)?;
        cfg.orientation_bins = Some(bins);
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Gaussian(f64);

impl Denoiser for Gaussian {
    fn name(&self) -> &'static str {
        "gaussian"
    }
    fn spec(&self) -> String {
        format!("gaussian:{}", self.0)
    }
    fn apply(&self, image: &Image) -> Result<Image> {
        gaussian_blur(image, self.0)
    }
}

struct GaussianFactory;

impl FilterFactory for GaussianFactory {
    fn name(&self) -> &'static str {
        "gaussian"
    }
    fn usage(&self) -> &'static str {
        "gaussian[:sigma]"
    }
    fn build(&self, params: Option<&str>, _: &FilterDefaults) -> Result<Box<dyn Denoiser>> {
        let sigma = params.map_or(Ok(1.0), |p| number::<f64>("gaussian", p))?;
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::NegativeSigma(sigma));
        }
        Ok(Box::new(Gaussian(sigma)))
    }
}

struct Median(usize);

impl Denoiser for Median {
    fn name(&self) -> &'static str {
        "median"
    }
    fn spec(&self) -> String {
        format!("median:{}", self.0)
    }
    fn apply(&self, image: &Image) -> Result<Image> {
        median_filter(image, self.0)
    }
}

struct MedianFactory;

impl FilterFactory for MedianFactory {
    fn name(&self) -> &'static str {
        "median"
    }
    fn usage(&self) -> &'static str {
        "median[:radius]"
    }
    fn build(&self, params: Option<&str>, _: &FilterDefaults) -> Result<Box<dyn Denoiser>> {
        let r = params.map_or(Ok(1), |p| number::<usize>("median", p))?;
        if r == 0 {
            return Err(Error::InvalidParameter(
                "median radius must be at least 1".into(),
            ));
        }
        Ok(Box::new(Median(r)))
    }
}

struct HistEq;

impl Denoiser for HistEq {
    fn name(&self) -> &'static str {
        "histeq"
    }
    fn spec(&self) -> String {
        "histeq".into()
    }
    fn apply(&self, image: &Image) -> Result<Image> {
        Ok(histogram_equalize(image))
    }
}

struct HistEqFactory;

impl FilterFactory for HistEqFactory {
    fn name(&self) -> &'static str {
        "histeq"
    }
    fn usage(&self) -> &'static str {
        "histeq"
    }
    fn build(&self, params: Option<&str>, _: &FilterDefaults) -> Result<Box<dyn Denoiser>> {
        no_params("histeq", params)?;
        Ok(Box::new(HistEq))
    }
}

struct Visu(SigmaChoice);

impl Denoiser for Visu {
    fn name(&self) -> &'static str {
        "visu"
    }
    fn spec(&self) -> String {
        format!("visu:{}", self.0)
    }
    fn apply(&self, image: &Image) -> Result<Image> {
        visu_shrink(image, self.0)
    }
}

struct VisuFactory;

impl FilterFactory for VisuFactory {
    fn name(&self) -> &'static str {
        "visu"
    }
    fn usage(&self) -> &'static str {
        "visu[:sigma|auto]"
    }
    fn build(&self, params: Option<&str>, _: &FilterDefaults) -> Result<Box<dyn Denoiser>> {
        let sigma = match params {
            None | Some("auto") => SigmaChoice::Auto,
            Some(p) => {
                let s: f64 = number("visu", p)?;
                if !(s >= 0.0 && s.is_finite()) {
                    return Err(Error::NegativeSigma(s));
                }
                SigmaChoice::Fixed(s)
            }
        };
        Ok(Box::new(Visu(sigma)))
    }
}

fn gabor_spec(name: &str, cfg: &GaborConfig) -> String {
    match cfg.orientation_bins {
        Some(b) => format!("{name}:{b}"),
        None => name.to_string(),
    }
}

struct Gabor(GaborConfig);

impl Denoiser for Gabor {
    fn name(&self) -> &'static str {
        "gabor"
    }
    fn spec(&self) -> String {
        gabor_spec("gabor", &self.0)
    }
    fn apply(&self, image: &Image) -> Result<Image> {
        gabor_enhance(image, &self.0)
    }
}

struct GaborFactory;

impl FilterFactory for GaborFactory {
    fn name(&self) -> &'static str {
        "gabor"
    }
    fn usage(&self) -> &'static str {
        "gabor[:orientation_bins]"
    }
    fn build(&self, params: Option<&str>, defaults: &FilterDefaults) -> Result<Box<dyn Denoiser>> {
        Ok(Box::new(Gabor(orientation_bins(
            "gabor",
            params,
            &defaults.gabor,
        )?)))
    }
}

struct Composite(GaborConfig);

impl Denoiser for Composite {
    fn name(&self) -> &'static str {
        "wgc"
    }
    fn spec(&self) -> String {
        gabor_spec("wgc", &self.0)
    }
    fn apply(&self, image: &Image) -> Result<Image> {
        wavelet_gabor_composite(image, &self.0)
    }
}

struct CompositeFactory;

impl FilterFactory for CompositeFactory {
    fn name(&self) -> &'static str {
        "wgc"
    }
    fn usage(&self) -> &'static str {
        "wgc[:orientation_bins]"
    }
    fn build(&self, params: Option<&str>, defaults: &FilterDefaults) -> Result<Box<dyn Denoiser>> {
        Ok(Box::new(Composite(orientation_bins(
            "wgc",
            params,
            &defaults.gabor,
        )?)))
    }
}

struct Pca(PcaConfig);

impl Denoiser for Pca {
    fn name(&self) -> &'static str {
        "pca"
    }
    fn spec(&self) -> String {
        let mut s = format!("pca:{},{}", self.0.tau, self.0.max_passes);
        if self.0.stretch_output {
            s.push_str(",stretch");
        }
        s
    }
    fn apply(&self, image: &Image) -> Result<Image> {
        denoise(image, &self.0)
    }
}

struct PcaFactory;

impl FilterFactory for PcaFactory {
    fn name(&self) -> &'static str {
        "pca"
    }
    fn usage(&self) -> &'static str {
        "pca[:tau|auto[,passes[,stretch]]]"
    }
    fn build(&self, params: Option<&str>, defaults: &FilterDefaults) -> Result<Box<dyn Denoiser>> {
        let mut cfg = defaults.pca;
        if let Some(p) = params.filter(|p| !p.is_empty()) {
            let parts: Vec<&str> = p.split(',').map(str::trim).collect();
            if parts.len() > 3 {
                return Err(Error::parse(p, "expected tau[,passes[,stretch]]"));
            }
            if !parts[0].is_empty() {
                cfg.tau = parts[0].parse::<Threshold>()?;
            }
            if let Some(n) = parts.get(1) {
                cfg.max_passes = number("pca", n)?;
            }
            if let Some(flag) = parts.get(2) {
                if *flag != "stretch" {
                    return Err(Error::parse(flag, "third pca parameter must be `stretch`"));
                }
                cfg.stretch_output = true;
            }
        }
        cfg.validate()?;
        Ok(Box::new(Pca(cfg)))
    }
}

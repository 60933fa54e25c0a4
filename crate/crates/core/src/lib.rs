//! Fingerprint image de-noising toolkit.
//!
//! The centrepiece is [`pca::denoise`], a 3x3 block homogeneity screen that
//! repairs outlier pixels from their clean neighbours. Around it sit the
//! classical baselines ([`filters`]), seeded noise models ([`noise`]),
//! quality metrics ([`metrics`]) and a name-based strategy registry
//! ([`registry`]) that composes everything into pipelines.

pub mod codec;
pub mod error;
pub mod filters;
pub mod image;
pub mod metrics;
pub mod noise;
pub mod pca;
pub mod registry;
pub mod wavelet;

pub use codec::{load_image, save_pgm};
pub use error::{Error, Result};
pub use image::{normalize_clip, resize_nearest, to_grayscale, Image, RgbImage};
pub use metrics::MetricsReport;
pub use noise::NoiseSpec;
pub use pca::PcaConfig;
pub use registry::{Denoiser, FilterDefaults, FilterFactory, FilterRegistry, Pipeline};

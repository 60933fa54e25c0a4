//! Classical de-noising and enhancement baselines.

mod composite;
mod gabor;
mod gaussian;
mod histogram;
mod median;
mod orientation;
mod visu;

pub use composite::wavelet_gabor_composite;
pub use gabor::{gabor_enhance, gabor_kernel, GaborConfig, GaborKernel};
pub use gaussian::{gaussian_blur, gaussian_kernel};
pub use histogram::histogram_equalize;
pub use median::median_filter;
pub use orientation::{
    estimate_orientation, estimate_ridge_frequency, quantize_angle, FrequencyMap, OrientationField,
    DEFAULT_ORIENTATION_BINS, MAX_RIDGE_FREQUENCY, MIN_RIDGE_FREQUENCY,
};
pub use visu::{universal_threshold, visu_shrink, SigmaChoice, VISU_LEVELS};

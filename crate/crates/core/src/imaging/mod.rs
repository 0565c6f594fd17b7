//! Forward models, channel packing, and image quality metrics.

pub mod blur;
pub mod color;
pub mod metrics;
pub mod noise;
pub mod signal;
pub mod stock;

pub use blur::{build_blur_operator, BlurKind, BlurModel, Boundary};
pub use color::{image_to_qvec, qvec_to_image, ColorImage};
pub use metrics::{psnr, snr, ssim};
pub use noise::add_gaussian_noise;
pub use signal::{build_signal_system, SignalFilterSystem};
pub use stock::{piecewise_filter, stock_image, synthetic_rgb_signal, StockImage};

//! Radial distortion toolkit for face-image quality work.
//!
//! - [`geometry`]: division-model and Kannala-Brandt point transforms.
//! - [`imaging`]: image buffers, PNG/PNM codecs, the warp engine.
//! - [`dataset`]: deterministic synthetic corpora and crop pipelines.
//! - [`quality`]: native quality measure and a baseline distortion detector.
//! - [`curves`]: DET and error-versus-discard curves.

pub mod curves;
pub mod dataset;
pub mod error;
pub mod geometry;
pub mod imaging;
pub mod numfmt;
pub mod quality;

pub use error::{Error, ErrorClass, Result};
pub use geometry::{DistortionModel, KbVariant, ModelFamily, NormPoint, Radius};
pub use imaging::{ImageBuffer, Rect, WarpSpec};

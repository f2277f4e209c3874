//! Image buffers, codecs and the inverse-mapping warp engine.

mod buffer;
pub mod io;
mod metrics;
mod warp;

pub use buffer::{Frame, ImageBuffer, Rect};
pub use io::{read_image, write_image};
pub use metrics::psnr;
pub use warp::{
    displacement_field, magnification_rate, warp, Direction, DisplacementField, Fill, Interpolation,
    SampleStatus, SourceSample, WarpOutput, WarpSpec,
};

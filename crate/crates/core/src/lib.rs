//! Camera-trap phenology and visitation analytics.
//!
//! The crate turns camera-trap frames, aligned depth maps and detector
//! interchange records into:
//!
//! - per-frame phenology metrics (canopy greenness, berry counts),
//! - denoised polynomial trends over those metrics,
//! - stitched animal visits and per-species daily counts,
//! - detection-quality scores against ground truth.
//!
//! Every operation is a pure function over immutable inputs, so frames,
//! cameras and series can be processed concurrently by the caller.

pub mod error;
pub mod eval;
pub mod imgproc;
pub mod phenology;
pub mod series;
pub mod visits;

pub use error::{Error, Result};

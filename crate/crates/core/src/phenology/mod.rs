//! Per-frame phenology metrics: depth-gated canopy greenness and
//! dual colour-space berry counting.

mod berries;
mod frame;
mod greenness;

pub use self::berries::{detect_berries, detect_berries_in, BerryConfig, BerryDetection, HsvRange};
pub use self::frame::{depth_path_for, DepthMap, DepthSidecar, Frame};
pub use self::greenness::{extract_foreground, greenness_score, Foreground, GreennessConfig};

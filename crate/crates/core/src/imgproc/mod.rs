//! Pixel-level primitives shared by the phenology and detection pipelines.

mod color;
mod components;
mod geometry;
mod raster;
mod mask;
mod morphology;

pub use self::color::{srgb_to_hsv, srgb_to_lab, HsvPixel, LabPixel};
pub use self::components::{connected_components, Component, Connectivity};
pub use self::geometry::{iou, BBox};
pub use self::raster::RgbImage;
pub use self::mask::{threshold, BinaryMask, Channel, Interval, Predicate};
pub use self::morphology::{dilate, erode, morph_close, morph_open};

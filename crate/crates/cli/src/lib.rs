//! Batch commands over camera-trap frames and detector output.

pub mod commands;
pub mod config;
pub mod detections;
pub mod ingest;
pub mod plot;

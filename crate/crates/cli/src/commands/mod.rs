pub mod berries;
pub mod eval;
pub mod greenness;
pub mod plot;
pub mod visits;

mod frames;

pub use self::frames::FrameArgs;
mod series;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Options shared by every command.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` lets rayon decide.
    pub jobs: Option<usize>,
    /// Turn recoverable problems (missing depth map, malformed input values)
    /// into hard errors.
    pub strict: bool,
}

impl RunOptions {
    pub(crate) fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.jobs {
            builder = builder.num_threads(n.max(1));
        }
        builder.build().context("starting worker pool")
    }
}

pub(crate) fn out_path(out: &Path, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    Ok(out.join(name))
}

/// Renders into memory, then writes the file in one go.
pub(crate) fn write_output(
    out: &Path,
    name: &str,
    render: impl FnOnce(&mut Vec<u8>) -> Result<()>,
) -> Result<PathBuf> {
    let path = out_path(out, name)?;
    let mut buf = Vec::new();
    render(&mut buf)?;
    fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub(crate) fn warn(diag: &mut dyn Write, message: impl std::fmt::Display) {
    // Diagnostics are best effort; a closed stderr must not abort a run.
    let _ = writeln!(diag, "warning: {message}");
}

pub(crate) fn note(diag: &mut dyn Write, message: impl std::fmt::Display) {
    let _ = writeln!(diag, "{message}");
}

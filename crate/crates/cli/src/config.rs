//! Site configuration: a `[defaults]` table plus `[cameras.<id>]` overrides.
//!
//! ```toml
//! [paths]
//! images = "frames"
//! depth_dir = "depth"
//! out = "results"
//!
//! [defaults]
//! greenness_degree = 3
//!
//! [defaults.greenness]
//! max_depth_m = 2.0
//!
//! [cameras.cam07.greenness]
//! max_depth_m = 1.5
//! ```
//!
//! A camera section is merged key by key over the defaults, so it only
//! needs the values that differ.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use phenotrap_core::phenology::{BerryConfig, GreennessConfig};
use phenotrap_core::series::{DbscanParams, Scaling};
use phenotrap_core::visits::VisitConfig;
use serde::Deserialize;
use toml::{Table, Value};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraConfig {
    pub greenness: GreennessConfig,
    pub berries: BerryConfig,
    pub dbscan: DbscanParams,
    pub scaling: Scaling,
    pub visits: VisitConfig,
    pub greenness_degree: usize,
    pub berry_degree: usize,
    /// Restrict berry detection to the depth foreground.
    pub berry_depth_gate: bool,
}

impl Default for CameraConfig {
    fn default() -> Self {
        Self {
            greenness: GreennessConfig::default(),
            berries: BerryConfig::default(),
            dbscan: DbscanParams::default(),
            scaling: Scaling::default(),
            visits: VisitConfig::default(),
            greenness_degree: 3,
            berry_degree: 2,
            berry_depth_gate: false,
        }
    }
}

impl CameraConfig {
    pub fn validate(&self) -> Result<()> {
        self.greenness.validate()?;
        self.berries.validate()?;
        self.dbscan.validate()?;
        self.visits.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub images: Option<PathBuf>,
    pub depth_dir: Option<PathBuf>,
    pub detections: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawSite {
    paths: PathsConfig,
    defaults: Table,
    cameras: BTreeMap<String, Table>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SiteConfig {
    pub paths: PathsConfig,
    pub defaults: CameraConfig,
    cameras: BTreeMap<String, CameraConfig>,
}

/// Recursively overlays `over` onto `base`; tables merge, everything else
/// replaces.
fn merge(base: &mut Table, over: &Table) {
    for (key, value) in over {
        match (base.get_mut(key), value) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            _ => {
                base.insert(key.clone(), value.clone());
            }
        }
    }
}

fn resolve(table: Table, what: &str) -> Result<CameraConfig> {
    let cfg: CameraConfig = Value::Table(table)
        .try_into()
        .with_context(|| format!("invalid {what}"))?;
    cfg.validate().with_context(|| format!("invalid {what}"))?;
    Ok(cfg)
}

impl SiteConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawSite = toml::from_str(text)?;
        let defaults = resolve(raw.defaults.clone(), "[defaults]")?;
        let mut cameras = BTreeMap::new();
        for (id, over) in &raw.cameras {
            let mut table = raw.defaults.clone();
            merge(&mut table, over);
            cameras.insert(id.clone(), resolve(table, &format!("[cameras.{id}]"))?);
        }
        Ok(Self {
            paths: raw.paths,
            defaults,
            cameras,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Built-in defaults, or the file at `path`.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn camera(&self, camera_id: &str) -> &CameraConfig {
        self.cameras.get(camera_id).unwrap_or(&self.defaults)
    }

    pub fn camera_ids(&self) -> impl Iterator<Item = &str> {
        self.cameras.keys().map(String::as_str)
    }
}

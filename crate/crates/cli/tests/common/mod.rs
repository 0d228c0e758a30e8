#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use image::{ImageBuffer, Luma, Rgb, RgbImage};

pub const GREEN: [u8; 3] = [40, 160, 40];
pub const BARK: [u8; 3] = [120, 90, 60];
pub const RED: [u8; 3] = [220, 20, 30];
pub const LEAF: [u8; 3] = [60, 140, 60];

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phenotrap"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn frame_name(camera: &str, day: u32, secs: u32) -> String {
    let (h, m, s) = (6 + secs / 3600, (secs / 60) % 60, secs % 60);
    format!("{camera}_202402{day:02}_{h:02}{m:02}{s:02}.png")
}

/// `width x height` frame whose first `green_pixels` pixels (row-major) are
/// leaf green and the rest bark brown.
pub fn write_green_frame(path: &Path, width: u32, height: u32, green_pixels: u32) {
    let img = RgbImage::from_fn(width, height, |x, y| {
        if y * width + x < green_pixels {
            Rgb(GREEN)
        } else {
            Rgb(BARK)
        }
    });
    img.save(path).unwrap();
}

pub fn write_depth_mm(path: &Path, width: u32, height: u32, mm: impl Fn(u32, u32) -> u16) {
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::from_fn(width, height, |x, y| Luma([mm(x, y)]));
    buf.save(path).unwrap();
}

/// Disks of the given radius centred at `centres` on a leaf background.
pub fn disk_scene(width: u32, height: u32, centres: &[(f64, f64)], radius: f64) -> RgbImage {
    RgbImage::from_fn(width, height, |x, y| {
        let (px, py) = (x as f64, y as f64);
        if centres.iter().any(|(cx, cy)| (px - cx).powi(2) + (py - cy).powi(2) <= radius * radius) {
            Rgb(RED)
        } else {
            Rgb(LEAF)
        }
    })
}

/// Centres on a grid with 40 px spacing, first `n` of them.
pub fn grid_centres(n: usize, columns: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| (30.0 + 40.0 * (i % columns) as f64, 30.0 + 40.0 * (i / columns) as f64))
        .collect()
}

pub struct Entry {
    pub bbox: [f64; 4],
    pub confidence: f64,
    pub label: &'static str,
    pub taxon: Option<&'static str>,
}

pub fn entry(bbox: [f64; 4], confidence: f64) -> Entry {
    Entry { bbox, confidence, label: "bird", taxon: None }
}

pub fn jsonl_line(image: &str, camera: &str, timestamp: &str, detector: &str, entries: &[Entry]) -> String {
    let dets: Vec<String> = entries
        .iter()
        .map(|e| {
            let taxon = e.taxon.map(|t| format!(r#", "taxon_class": "{t}""#)).unwrap_or_default();
            format!(
                r#"{{"bbox": [{}, {}, {}, {}], "confidence": {}, "label": "{}"{taxon}}}"#,
                e.bbox[0], e.bbox[1], e.bbox[2], e.bbox[3], e.confidence, e.label
            )
        })
        .collect();
    format!(
        r#"{{"image": "{image}", "camera_id": "{camera}", "timestamp": "{timestamp}", "detector": "{detector}", "detections": [{}]}}"#,
        dets.join(", ")
    )
}

pub fn write_lines(path: &Path, lines: &[String]) {
    fs::write(path, lines.join("\n") + "\n").unwrap();
}

/// Image directory, depth directory, output directory.
pub struct Workspace {
    pub root: tempfile::TempDir,
}

impl Workspace {
    pub fn new() -> Self {
        let root = tempfile::tempdir().unwrap();
        for d in ["images", "depth", "out"] {
            fs::create_dir_all(root.path().join(d)).unwrap();
        }
        Self { root }
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.path().join(rel)
    }

    pub fn arg(&self, rel: &str) -> String {
        self.path(rel).display().to_string()
    }

    pub fn read(&self, rel: &str) -> String {
        fs::read_to_string(self.path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
    }

    pub fn bytes(&self, rel: &str) -> Vec<u8> {
        fs::read(self.path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
    }

    pub fn write(&self, rel: &str, text: &str) -> PathBuf {
        let p = self.path(rel);
        fs::write(&p, text).unwrap();
        p
    }
}

/// Greenness season: one 20x20 frame per day for `days` days, fully in the
/// foreground, with green fraction `values[i]` (multiples of 1/400).
pub fn green_season(ws: &Workspace, camera: &str, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        let t = chrono::NaiveDate::from_ymd_opt(2024, 1, 1).unwrap() + chrono::Duration::days(i as i64);
        let name = format!("{camera}_{}_063000.png", t.format("%Y%m%d"));
        let green = (v * 400.0).round() as u32;
        write_green_frame(&ws.path(&format!("images/{name}")), 20, 20, green);
        let stem = name.trim_end_matches(".png");
        write_depth_mm(&ws.path(&format!("depth/{stem}.depth.png")), 20, 20, |_, _| 1000);
    }
}

/// Data rows of a CSV file, header dropped.
pub fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

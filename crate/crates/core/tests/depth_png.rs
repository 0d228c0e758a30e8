use std::fs;
use std::path::Path;

use chrono::{TimeZone, Utc};
use image::{ImageBuffer, Luma, Rgb};
use phenotrap_core::imgproc::RgbImage;
use phenotrap_core::phenology::{
    depth_path_for, extract_foreground, greenness_score, DepthMap, Frame, GreennessConfig,
};

fn write_depth(path: &Path, w: u32, h: u32, f: impl Fn(u32, u32) -> u16) {
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::from_fn(w, h, |x, y| Luma([f(x, y)]));
    buf.save(path).unwrap();
}

#[test]
fn millimetre_png_with_zero_as_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("IMG_0001.depth.png");
    write_depth(&path, 4, 2, |x, y| if x == 0 && y == 0 { 0 } else { 1500 + x as u16 });

    let depth = DepthMap::open(&path).unwrap();
    assert_eq!(depth.dimensions(), (4, 2));
    assert!(!depth.validity()[0]);
    assert_eq!(depth.validity().iter().filter(|v| **v).count(), 7);
    assert!((depth.depth_m()[1] - 1.501).abs() < 1e-12);
}

#[test]
fn sidecar_overrides_units() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("IMG_0002.depth.png");
    write_depth(&path, 2, 2, |_, _| 300);
    fs::write(dir.path().join("IMG_0002.depth.json"), r#"{"meters_per_unit": 0.01}"#).unwrap();

    let depth = DepthMap::open(&path).unwrap();
    assert!(depth.depth_m().iter().all(|d| (d - 3.0).abs() < 1e-12));
}

#[test]
fn basename_pairing() {
    let p = depth_path_for(Path::new("site/cam01_20240201_063000.jpg"), Path::new("depth"));
    assert_eq!(p, Path::new("depth/cam01_20240201_063000.depth.png"));
}

#[test]
fn greenness_from_files() {
    // Left half near (1 m), right half far (5 m). In the near half, the top
    // 3 of 10 rows are leaf green and the rest bark brown.
    let dir = tempfile::tempdir().unwrap();
    let img_path = dir.path().join("cam01_20240201_063000.png");
    let rgb = ImageBuffer::from_fn(20, 10, |_, y| if y < 3 { Rgb([40u8, 160, 40]) } else { Rgb([120u8, 90, 60]) });
    rgb.save(&img_path).unwrap();
    let depth_path = depth_path_for(&img_path, dir.path());
    write_depth(&depth_path, 20, 10, |x, _| if x < 10 { 1000 } else { 5000 });

    let frame = Frame {
        camera_id: "cam01".into(),
        timestamp: Utc.with_ymd_and_hms(2024, 2, 1, 6, 30, 0).unwrap(),
        image: RgbImage::open(&img_path).unwrap(),
        image_path: img_path.display().to_string(),
    };
    let depth = DepthMap::open(&depth_path).unwrap();
    let cfg = GreennessConfig::default();
    let fg = extract_foreground(&frame, &depth, &cfg).unwrap();
    assert_eq!(fg.mask.count(), 100);
    let g = greenness_score(&frame, &fg.mask, &cfg).unwrap();
    assert!((g - 0.3).abs() < 1e-12);
}

use serde::{Deserialize, Serialize};

use super::color::{srgb_to_hsv, srgb_to_lab};
use super::raster::RgbImage;
use crate::{Error, Result};

/// One boolean per pixel, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width as usize * height as usize {
            return Err(Error::InvalidImage(format!(
                "{} mask bits for a {width}x{height} mask",
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let w = self.width as usize;
        self.bits[y as usize * w + x as usize] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Fraction of set pixels.
    pub fn fraction(&self) -> f64 {
        if self.bits.is_empty() {
            0.0
        } else {
            self.count() as f64 / self.bits.len() as f64
        }
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dimensions() == other.dimensions()
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn and(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.combine(other, |a, b| a && b)
    }

    pub fn or(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.combine(other, |a, b| a || b)
    }

    fn combine(&self, other: &BinaryMask, op: impl Fn(bool, bool) -> bool) -> Result<BinaryMask> {
        if self.dimensions() != other.dimensions() {
            return Err(Error::DimensionMismatch {
                expected: self.dimensions(),
                actual: other.dimensions(),
            });
        }
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(BinaryMask {
            width: self.width,
            height: self.height,
            bits,
        })
    }
}

/// Which converted channel a threshold inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Red,
    Green,
    Blue,
    LabL,
    LabA,
    LabB,
    /// Hue in degrees.
    HsvH,
    HsvS,
    HsvV,
}

impl Channel {
    pub fn value(self, rgb: [u8; 3]) -> f64 {
        match self {
            Channel::Red => f64::from(rgb[0]),
            Channel::Green => f64::from(rgb[1]),
            Channel::Blue => f64::from(rgb[2]),
            Channel::LabL => srgb_to_lab(rgb).l,
            Channel::LabA => srgb_to_lab(rgb).a,
            Channel::LabB => srgb_to_lab(rgb).b,
            Channel::HsvH => srgb_to_hsv(rgb).h,
            Channel::HsvS => srgb_to_hsv(rgb).s,
            Channel::HsvV => srgb_to_hsv(rgb).v,
        }
    }
}

/// A real interval; either end may be open, closed or unbounded (`±inf`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "yes")]
    pub lo_inclusive: bool,
    #[serde(default = "yes")]
    pub hi_inclusive: bool,
}

fn yes() -> bool {
    true
}

impl Interval {
    /// `[lo, hi]`
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_inclusive: true,
            hi_inclusive: true,
        }
    }

    /// `[lo, hi)`
    pub fn half_open(lo: f64, hi: f64) -> Self {
        Self {
            hi_inclusive: false,
            ..Self::closed(lo, hi)
        }
    }

    /// `(-inf, hi)`
    pub fn below(hi: f64) -> Self {
        Self::half_open(f64::NEG_INFINITY, hi)
    }

    /// `[lo, +inf)`
    pub fn at_least(lo: f64) -> Self {
        Self::closed(lo, f64::INFINITY)
    }

    pub fn validate(&self) -> Result<()> {
        let degenerate_point = self.lo == self.hi && !(self.lo_inclusive && self.hi_inclusive);
        if self.lo.is_nan() || self.hi.is_nan() || self.lo > self.hi || degenerate_point {
            return Err(Error::MalformedInterval {
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(())
    }

    pub fn contains(&self, v: f64) -> bool {
        let above = if self.lo_inclusive { v >= self.lo } else { v > self.lo };
        let below = if self.hi_inclusive { v <= self.hi } else { v < self.hi };
        above && below
    }
}

/// Union of intervals over one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub channel: Channel,
    pub intervals: Vec<Interval>,
}

impl Predicate {
    pub fn new(channel: Channel, intervals: Vec<Interval>) -> Self {
        Self { channel, intervals }
    }

    pub fn validate(&self) -> Result<()> {
        if self.intervals.is_empty() {
            return Err(Error::DegenerateThreshold);
        }
        self.intervals.iter().try_for_each(Interval::validate)
    }

    pub fn matches(&self, rgb: [u8; 3]) -> bool {
        let v = self.channel.value(rgb);
        self.intervals.iter().any(|i| i.contains(v))
    }
}

/// Sets a mask bit wherever the selected channel falls inside the predicate.
pub fn threshold(image: &RgbImage, predicate: &Predicate) -> Result<BinaryMask> {
    predicate.validate()?;
    let bits = image.pixels().iter().map(|&p| predicate.matches(p)).collect();
    BinaryMask::from_bits(image.width(), image.height(), bits)
}

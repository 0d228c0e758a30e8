//! Binary erosion, dilation, opening and closing with a square structuring
//! element.
//!
//! Pixels outside the image are background for dilation and never constrain
//! erosion, so the structuring element is effectively clipped to the image.
//! With that pairing erosion and dilation form an adjunction on the image
//! lattice: opening is anti-extensive and idempotent, closing is extensive
//! and idempotent, right up to the border.

use super::mask::BinaryMask;
use crate::{Error, Result};

fn check_kernel(side: usize) -> Result<usize> {
    if side == 0 || side % 2 == 0 {
        return Err(Error::InvalidKernel(side));
    }
    Ok(side / 2)
}

#[derive(Clone, Copy)]
enum Op {
    Erode,
    Dilate,
}

/// One pass along a line of `len` samples: for each position, the clipped
/// window `[i - radius, i + radius]` is reduced with AND (erode) or OR
/// (dilate) using a running prefix count.
fn line_pass(input: &[bool], output: &mut [bool], radius: usize, op: Op, prefix: &mut Vec<usize>) {
    let len = input.len();
    prefix.clear();
    prefix.push(0);
    for &b in input {
        let last = *prefix.last().unwrap_or(&0);
        prefix.push(last + usize::from(b));
    }
    for i in 0..len {
        let lo = i.saturating_sub(radius);
        let hi = (i + radius + 1).min(len);
        let set = prefix[hi] - prefix[lo];
        output[i] = match op {
            Op::Erode => set == hi - lo,
            Op::Dilate => set > 0,
        };
    }
}

fn separable(mask: &BinaryMask, radius: usize, op: Op) -> BinaryMask {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    if radius == 0 {
        return mask.clone();
    }
    let bits = mask.bits();
    let mut rows = vec![false; w * h];
    let mut prefix = Vec::with_capacity(w.max(h) + 1);
    for y in 0..h {
        line_pass(&bits[y * w..(y + 1) * w], &mut rows[y * w..(y + 1) * w], radius, op, &mut prefix);
    }

    let mut out = vec![false; w * h];
    let mut column = vec![false; h];
    let mut column_out = vec![false; h];
    for x in 0..w {
        for y in 0..h {
            column[y] = rows[y * w + x];
        }
        line_pass(&column, &mut column_out, radius, op, &mut prefix);
        for y in 0..h {
            out[y * w + x] = column_out[y];
        }
    }
    BinaryMask::from_bits(mask.width(), mask.height(), out).expect("dimensions preserved")
}

pub fn erode(mask: &BinaryMask, side: usize) -> Result<BinaryMask> {
    let radius = check_kernel(side)?;
    Ok(separable(mask, radius, Op::Erode))
}

pub fn dilate(mask: &BinaryMask, side: usize) -> Result<BinaryMask> {
    let radius = check_kernel(side)?;
    Ok(separable(mask, radius, Op::Dilate))
}

/// Erosion followed by dilation; removes specks smaller than the kernel.
pub fn morph_open(mask: &BinaryMask, side: usize) -> Result<BinaryMask> {
    let radius = check_kernel(side)?;
    Ok(separable(&separable(mask, radius, Op::Erode), radius, Op::Dilate))
}

/// Dilation followed by erosion; fills holes smaller than the kernel.
pub fn morph_close(mask: &BinaryMask, side: usize) -> Result<BinaryMask> {
    let radius = check_kernel(side)?;
    Ok(separable(&separable(mask, radius, Op::Dilate), radius, Op::Erode))
}

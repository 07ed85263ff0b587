//! IDX image files and a synthetic stand-in of blurry blob images.

use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Magic of an IDX file holding unsigned-byte images (rank 3).
pub const IDX_IMAGE_MAGIC: u32 = 0x0000_0803;
const IDX_LABEL_MAGIC: u32 = 0x0000_0801;

/// Parses an IDX image file into row-major flattened images scaled to `[0, 1]`.
pub fn parse_idx_images(bytes: &[u8]) -> Result<Vec<Vec<f64>>> {
    let word = |at: usize| -> Result<u32> {
        bytes
            .get(at..at + 4)
            .map(|b| u32::from_be_bytes(b.try_into().expect("4 bytes")))
            .ok_or_else(|| Error::format(at as u64, "truncated IDX header"))
    };
    let magic = word(0)?;
    if magic == IDX_LABEL_MAGIC {
        return Err(Error::format(0, "this is an IDX label file (0x00000801), expected images (0x00000803)"));
    }
    if magic != IDX_IMAGE_MAGIC {
        return Err(Error::format(0, format!("bad IDX magic {magic:#010x}, expected 0x00000803")));
    }
    let n = word(4)? as usize;
    let rows = word(8)? as usize;
    let cols = word(12)? as usize;
    let size = rows * cols;
    let body = &bytes[16..];
    let need = n
        .checked_mul(size)
        .ok_or_else(|| Error::format(4, "IDX dimensions overflow"))?;
    if body.len() < need {
        let complete = if size == 0 { 0 } else { body.len() / size };
        return Err(Error::format(
            (16 + complete * size) as u64,
            format!("truncated IDX body: {n} images need {need} bytes, found {}", body.len()),
        ));
    }
    if body.len() > need {
        return Err(Error::format((16 + need) as u64, "trailing bytes after last image"));
    }
    Ok(body
        .chunks(size.max(1))
        .take(n)
        .map(|img| img.iter().map(|&p| f64::from(p) / 255.0).collect())
        .collect())
}

pub fn load_idx_images(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    parse_idx_images(&std::fs::read(path)?)
}

/// `n` images of `side × side` pixels, each the clamped sum of 1–3 rotated
/// anisotropic Gaussian blobs, flattened row-major.
pub fn synthetic_images<R: Rng + ?Sized>(n: usize, side: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let s = side as f64;
    (0..n)
        .map(|_| {
            let blobs: Vec<[f64; 6]> = (0..rng.random_range(1..=3))
                .map(|_| {
                    let cx = rng.random_range(0.25 * s..0.75 * s);
                    let cy = rng.random_range(0.25 * s..0.75 * s);
                    let sx = rng.random_range(0.06 * s..0.2 * s);
                    let sy = rng.random_range(0.06 * s..0.2 * s);
                    let angle = rng.random_range(0.0..std::f64::consts::PI);
                    let z: f64 = StandardNormal.sample(rng);
                    let amp = 0.8 + 0.2 * z.abs().min(1.0);
                    [cx, cy, sx, sy, angle, amp]
                })
                .collect();
            let mut img = vec![0.0; side * side];
            for (idx, px) in img.iter_mut().enumerate() {
                let (y, x) = ((idx / side) as f64 + 0.5, (idx % side) as f64 + 0.5);
                let mut v = 0.0;
                for &[cx, cy, sx, sy, angle, amp] in &blobs {
                    let (sin, cos) = angle.sin_cos();
                    let (dx, dy) = (x - cx, y - cy);
                    let u = (cos * dx + sin * dy) / sx;
                    let w = (-sin * dx + cos * dy) / sy;
                    v += amp * (-0.5 * (u * u + w * w)).exp();
                }
                *px = v.clamp(0.0, 1.0);
            }
            img
        })
        .collect()
}

/// 28 × 28 synthetic images (length 784), the offline substitute for handwritten digits.
pub fn synthetic_digits<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    synthetic_images(n, 28, rng)
}

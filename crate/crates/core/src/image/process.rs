use rand_distr::{Distribution, Normal};

use super::GrayImage;
use crate::encoding::BlockVector;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Nearest integer with halves rounded toward +∞.
pub fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// `round(pixel + N(mu, sigma²))` clamped to `[0, 255]`.
pub fn add_gaussian_noise(image: &GrayImage, mu: f64, sigma: f64, seed: u64) -> Result<GrayImage> {
    if image.bit_depth() != 8 {
        return Err(Error::argument(
            "Gaussian contamination expects an 8-bit image",
        ));
    }
    if sigma < 0.0 || !mu.is_finite() || !sigma.is_finite() {
        return Err(Error::argument(format!(
            "noise parameters must be finite with sigma >= 0, got mu={mu}, sigma={sigma}"
        )));
    }
    if sigma == 0.0 && mu == 0.0 {
        return Ok(image.clone());
    }
    let normal = Normal::new(mu, sigma).map_err(|e| Error::argument(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    let pixels = image
        .pixels()
        .iter()
        .map(|&p| round_half_up(f64::from(p) + normal.sample(&mut rng)).clamp(0.0, 255.0) as u8)
        .collect();
    Ok(image.with_pixels(8, pixels))
}

/// Average non-overlapping `factor`×`factor` blocks (rounded half up).
pub fn downsample(image: &GrayImage, factor: usize) -> Result<GrayImage> {
    if factor == 0 {
        return Err(Error::argument("downsample factor must be at least 1"));
    }
    if !image.width().is_multiple_of(factor) || !image.height().is_multiple_of(factor) {
        return Err(Error::shape(format!(
            "{}x{} image is not divisible by factor {factor}",
            image.width(),
            image.height()
        )));
    }
    let (w, h) = (image.width() / factor, image.height() / factor);
    let area = (factor * factor) as u64;
    let mut pixels = Vec::with_capacity(w * h);
    for by in 0..h {
        for bx in 0..w {
            let mut sum = 0u64;
            for y in by * factor..(by + 1) * factor {
                for x in bx * factor..(bx + 1) * factor {
                    sum += u64::from(image.get(x, y));
                }
            }
            // floor(sum/area + ½)
            pixels.push(((2 * sum + area) / (2 * area)) as u8);
        }
    }
    GrayImage::new(w, h, image.bit_depth(), pixels)
}

/// 8-bit to 4-bit: `pixel / 16`.
pub fn reduce_bit_depth(image: &GrayImage) -> Result<GrayImage> {
    if image.bit_depth() != 8 {
        return Err(Error::argument("image is already 4-bit"));
    }
    let pixels = image.pixels().iter().map(|&p| p / 16).collect();
    Ok(image.with_pixels(4, pixels))
}

/// 3×3 binomial smoothing `[1 2 1; 2 4 2; 1 2 1] / 16` with replicated edges.
pub fn gaussian_smooth(image: &GrayImage) -> GrayImage {
    const KERNEL: [[u32; 3]; 3] = [[1, 2, 1], [2, 4, 2], [1, 2, 1]];
    let (w, h) = (image.width() as i64, image.height() as i64);
    let at = |x: i64, y: i64| {
        u32::from(image.get(x.clamp(0, w - 1) as usize, y.clamp(0, h - 1) as usize))
    };
    let mut pixels = Vec::with_capacity(image.pixels().len());
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0u32;
            for (dy, row) in KERNEL.iter().enumerate() {
                for (dx, k) in row.iter().enumerate() {
                    acc += k * at(x + dx as i64 - 1, y + dy as i64 - 1);
                }
            }
            pixels.push(((acc + 8) / 16) as u8);
        }
    }
    image.with_pixels(image.bit_depth(), pixels)
}

/// Row-major `n`×`n` block with top-left corner `(x, y)`.
pub fn extract_block(image: &GrayImage, x: i64, y: i64, n: usize) -> Result<BlockVector> {
    let fits = |start: i64, extent: usize| {
        start >= 0
            && n > 0
            && (start as usize)
                .checked_add(n)
                .is_some_and(|end| end <= extent)
    };
    if !fits(x, image.width()) || !fits(y, image.height()) {
        return Err(Error::Bounds {
            x,
            y,
            n,
            width: image.width(),
            height: image.height(),
        });
    }
    let (x, y) = (x as usize, y as usize);
    let values = (y..y + n)
        .flat_map(|row| (x..x + n).map(move |col| (col, row)))
        .map(|(col, row)| u32::from(image.get(col, row)))
        .collect();
    Ok(BlockVector::new(values))
}

/// `√Σ(v1ᵢ − v2ᵢ)²`.
pub fn classical_euclidean_distance(v1: &[u32], v2: &[u32]) -> Result<f64> {
    if v1.len() != v2.len() {
        return Err(Error::shape(format!(
            "vectors have different lengths ({} vs {})",
            v1.len(),
            v2.len()
        )));
    }
    let ssd: u64 = v1
        .iter()
        .zip(v2)
        .map(|(&a, &b)| {
            let d = u64::from(a.abs_diff(b));
            d * d
        })
        .sum();
    Ok((ssd as f64).sqrt())
}

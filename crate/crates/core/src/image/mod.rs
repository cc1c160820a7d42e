//! Grayscale images, the preprocessing pipeline and block search.

mod pgm;
mod process;
mod search;

pub use pgm::{encode_pgm, load_pgm, parse_pgm, save_pgm};
pub use process::{
    add_gaussian_noise, classical_euclidean_distance, downsample, extract_block, gaussian_smooth,
    reduce_bit_depth, round_half_up,
};
pub use search::{full_search, hierarchical_search, BlockRef, MatchResult};

use crate::error::{Error, Result};

/// Row-major grayscale image with 4- or 8-bit pixel range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    bit_depth: u8,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, bit_depth: u8, pixels: Vec<u8>) -> Result<Self> {
        if bit_depth != 4 && bit_depth != 8 {
            return Err(Error::argument(format!(
                "bit depth must be 4 or 8, got {bit_depth}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::shape(format!("empty image {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(Error::shape(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        let max = Self::max_for(bit_depth);
        if let Some(p) = pixels.iter().find(|&&p| p > max) {
            return Err(Error::argument(format!(
                "pixel value {p} exceeds {bit_depth}-bit range"
            )));
        }
        Ok(Self {
            width,
            height,
            bit_depth,
            pixels,
        })
    }

    /// Image filled with one value.
    pub fn filled(width: usize, height: usize, bit_depth: u8, value: u8) -> Result<Self> {
        Self::new(width, height, bit_depth, vec![value; width * height])
    }

    fn max_for(bit_depth: u8) -> u8 {
        if bit_depth == 4 {
            15
        } else {
            255
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn max_value(&self) -> u8 {
        Self::max_for(self.bit_depth)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        assert!(value <= self.max_value(), "pixel out of range");
        self.pixels[y * self.width + x] = value;
    }

    /// Copy with the top-left `width`×`height` region only.
    pub fn crop(&self, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 || width > self.width || height > self.height {
            return Err(Error::shape(format!(
                "cannot crop {}x{} image to {width}x{height}",
                self.width, self.height
            )));
        }
        let pixels = (0..height)
            .flat_map(|y| {
                self.pixels[y * self.width..y * self.width + width]
                    .iter()
                    .copied()
            })
            .collect();
        Self::new(width, height, self.bit_depth, pixels)
    }

    pub(crate) fn with_pixels(&self, bit_depth: u8, pixels: Vec<u8>) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bit_depth,
            pixels,
        }
    }
}

//! PGM (P2 ASCII / P5 binary) with maxval 255.

use std::fs;
use std::path::Path;

use super::GrayImage;
use crate::error::{Error, Result};

struct Header {
    binary: bool,
    width: usize,
    height: usize,
    data_start: usize,
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

/// Read the next whitespace-delimited token, skipping `#` comments.
fn next_token(bytes: &[u8], pos: &mut usize) -> Option<(usize, usize)> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    if *pos >= bytes.len() {
        return None;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    Some((start, *pos))
}

fn header_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    let (s, e) = next_token(bytes, pos).ok_or_else(|| format_err(format!("missing {what}")))?;
    std::str::from_utf8(&bytes[s..e])
        .ok()
        .and_then(|t| t.parse::<usize>().ok())
        .ok_or_else(|| format_err(format!("invalid {what}")))
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(format_err("not a P2/P5 graymap")),
    };
    let mut pos = 2;
    if bytes
        .get(pos)
        .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
    {
        return Err(format_err("malformed magic number"));
    }
    let width = header_number(bytes, &mut pos, "width")?;
    let height = header_number(bytes, &mut pos, "height")?;
    let maxval = header_number(bytes, &mut pos, "maxval")?;
    if width == 0 || height == 0 {
        return Err(format_err(format!("empty image {width}x{height}")));
    }
    if maxval != 255 {
        return Err(format_err(format!(
            "unsupported maxval {maxval}, expected 255"
        )));
    }
    // exactly one whitespace byte separates the header from binary data
    if pos >= bytes.len() && binary {
        return Err(format_err("truncated pixel data"));
    }
    Ok(Header {
        binary,
        width,
        height,
        data_start: pos + 1,
    })
}

/// Decode a P2 or P5 graymap.
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let h = parse_header(bytes)?;
    let count = h
        .width
        .checked_mul(h.height)
        .ok_or_else(|| format_err("image dimensions overflow"))?;
    let pixels = if h.binary {
        let data = bytes
            .get(h.data_start..)
            .filter(|d| d.len() >= count)
            .ok_or_else(|| format_err("truncated pixel data"))?;
        data[..count].to_vec()
    } else {
        let mut pos = h.data_start.saturating_sub(1);
        let mut px = Vec::with_capacity(count);
        for _ in 0..count {
            let v = header_number(bytes, &mut pos, "pixel value")
                .map_err(|_| format_err("truncated or malformed pixel data"))?;
            if v > 255 {
                return Err(format_err(format!("pixel value {v} exceeds maxval")));
            }
            px.push(v as u8);
        }
        px
    };
    GrayImage::new(h.width, h.height, 8, pixels)
}

/// Encode as binary P5 with maxval 255.
pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(image.pixels());
    out
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pgm(&bytes).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn save_pgm(image: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(image)).map_err(|e| Error::io(path, e))
}

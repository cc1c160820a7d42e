//! Full and two-level hierarchical block search over a square window.

use super::process::{downsample, extract_block};
use super::GrayImage;
use crate::error::{Error, Result};

/// Reference block: top-left corner `(x, y)` and side `n` in the source image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRef {
    pub x: usize,
    pub y: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub offset_x: i64,
    pub offset_y: i64,
    pub distance: f64,
    /// Number of candidate blocks scored.
    pub evaluations: usize,
}

/// Score the candidates at `offsets` (in order) and keep the first minimum.
fn scan<F>(
    source: &GrayImage,
    block: BlockRef,
    target: &GrayImage,
    offsets: impl Iterator<Item = (i64, i64)>,
    distance_fn: &mut F,
) -> Result<Option<MatchResult>>
where
    F: FnMut(&[u32], &[u32]) -> Result<f64>,
{
    let reference = extract_block(source, block.x as i64, block.y as i64, block.n)?;
    let mut best: Option<MatchResult> = None;
    let mut evaluations = 0;
    for (ox, oy) in offsets {
        let cx = block.x as i64 + ox;
        let cy = block.y as i64 + oy;
        if cx < 0
            || cy < 0
            || cx as usize + block.n > target.width()
            || cy as usize + block.n > target.height()
        {
            continue;
        }
        let candidate = extract_block(target, cx, cy, block.n)?;
        let d = distance_fn(reference.values(), candidate.values())?;
        evaluations += 1;
        if best.as_ref().is_none_or(|b| d < b.distance) {
            best = Some(MatchResult {
                offset_x: ox,
                offset_y: oy,
                distance: d,
                evaluations: 0,
            });
        }
    }
    Ok(best.map(|mut b| {
        b.evaluations = evaluations;
        b
    }))
}

fn window(k: i64) -> impl Iterator<Item = (i64, i64)> {
    (-k..=k).flat_map(move |oy| (-k..=k).map(move |ox| (ox, oy)))
}

/// Exhaustive search over offsets in `[−k, k]²` that keep the candidate
/// inside `target`. Ties keep the first candidate in raster order
/// (smallest `oy`, then smallest `ox`).
pub fn full_search<F>(
    source: &GrayImage,
    block: BlockRef,
    target: &GrayImage,
    k: usize,
    distance_fn: &mut F,
) -> Result<MatchResult>
where
    F: FnMut(&[u32], &[u32]) -> Result<f64>,
{
    scan(source, block, target, window(k as i64), distance_fn)?.ok_or_else(|| {
        Error::Search(format!(
            "no candidate block of size {} fits the target",
            block.n
        ))
    })
}

fn halve(image: &GrayImage) -> Result<GrayImage> {
    let w = image.width() & !1;
    let h = image.height() & !1;
    if w == 0 || h == 0 {
        return Err(Error::shape("image too small for a coarse level"));
    }
    let even = if (w, h) == (image.width(), image.height()) {
        image.clone()
    } else {
        image.crop(w, h)?
    };
    downsample(&even, 2)
}

/// Two-level coarse-to-fine search.
///
/// The coarse level halves both images and the block, then searches
/// offsets in `[−⌈k/2⌉, ⌈k/2⌉]²`. The fine level searches the 3×3
/// neighbourhood of twice the coarse winner at full resolution, limited to
/// `[−k, k]²`. Evaluations of both levels are counted.
pub fn hierarchical_search<F>(
    source: &GrayImage,
    block: BlockRef,
    target: &GrayImage,
    k: usize,
    distance_fn: &mut F,
) -> Result<MatchResult>
where
    F: FnMut(&[u32], &[u32]) -> Result<f64>,
{
    if block.n == 0 || !block.n.is_multiple_of(2) {
        return Err(Error::argument(format!(
            "hierarchical search needs an even block size, got {}",
            block.n
        )));
    }
    if k == 0 {
        return Err(Error::argument(
            "hierarchical search needs a window of at least 1",
        ));
    }
    // validates the reference block at full resolution
    extract_block(source, block.x as i64, block.y as i64, block.n)?;

    let coarse_block = BlockRef {
        x: block.x / 2,
        y: block.y / 2,
        n: block.n / 2,
    };
    let coarse_k = k.div_ceil(2) as i64;
    let coarse = scan(
        &halve(source)?,
        coarse_block,
        &halve(target)?,
        window(coarse_k),
        distance_fn,
    )?
    .ok_or_else(|| Error::Search("no coarse candidate fits the target".into()))?;

    let k = k as i64;
    let (cx, cy) = (2 * coarse.offset_x, 2 * coarse.offset_y);
    let fine_offsets = (-1..=1)
        .flat_map(move |dy| (-1..=1).map(move |dx| (cx + dx, cy + dy)))
        .filter(move |&(ox, oy)| ox.abs() <= k && oy.abs() <= k);
    let mut fine = scan(source, block, target, fine_offsets, distance_fn)?
        .ok_or_else(|| Error::Search("no fine candidate fits the target".into()))?;
    fine.evaluations += coarse.evaluations;
    Ok(fine)
}

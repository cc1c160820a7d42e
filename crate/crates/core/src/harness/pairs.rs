use rand::Rng;

use crate::image::classical_euclidean_distance;
use crate::rng::{derive_seed, rng_from_seed};

/// Target distances of the generated pairs after the two fixed ones.
const LADDER: [u32; 15] = [2, 3, 4, 5, 6, 8, 10, 12, 14, 16, 18, 20, 22, 25, 30];
/// Pairs drawn per rung; the one with the smallest Z is kept.
const CANDIDATES: usize = 16;
const MAX_PIXEL: i64 = 15;

#[derive(Debug, Clone, PartialEq)]
pub struct VectorPair {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub ced: f64,
}

impl VectorPair {
    fn new(a: Vec<u32>, b: Vec<u32>) -> Self {
        let ced = classical_euclidean_distance(&a, &b).expect("equal lengths");
        Self { a, b, ced }
    }

    /// `|A|² + |B|²`.
    pub fn z(&self) -> u64 {
        self.a
            .iter()
            .chain(&self.b)
            .map(|&v| u64::from(v) * u64::from(v))
            .sum()
    }
}

/// Ordered pairs of 4-dim pixel vectors, CED non-decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSet {
    pub pairs: Vec<VectorPair>,
}

impl PairSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, VectorPair> {
        self.pairs.iter()
    }
}

/// All integer 4-vectors with `|δ|² = t²` and every entry in `lo..=hi`.
fn offsets_with_norm(t: u32, lo: i64, hi: i64) -> Vec<[i64; 4]> {
    let t2 = i64::from(t * t);
    let mut out = Vec::new();
    for d0 in lo..=hi {
        for d1 in lo..=hi {
            for d2 in lo..=hi {
                let partial = d0 * d0 + d1 * d1 + d2 * d2;
                if partial > t2 {
                    continue;
                }
                for d3 in lo..=hi {
                    if partial + d3 * d3 == t2 {
                        out.push([d0, d1, d2, d3]);
                    }
                }
            }
        }
    }
    out
}

/// Seventeen pairs of 4-dim vectors with entries in `[0, 15]`.
///
/// Index 0 is `[9,9,9,9]` against itself and index 1 is `[9,9,9,9]` against
/// `[9,9,8,9]`. Distances 2 to 4 perturb `[9,9,9,9]` by a random integer
/// offset of exactly that length. From distance 5 up, both vectors are
/// random: an offset of the target length is drawn, then `A` is drawn so
/// that `A + δ` stays in range, and of [`CANDIDATES`] such draws the pair
/// with the smallest `|A|² + |B|²` is kept.
pub fn default_pair_set(seed: u64) -> PairSet {
    let base = vec![9u32; 4];
    let mut pairs = vec![
        VectorPair::new(base.clone(), base.clone()),
        VectorPair::new(base.clone(), vec![9, 9, 8, 9]),
    ];
    for (rung, &t) in LADDER.iter().enumerate() {
        let mut rng = rng_from_seed(derive_seed(seed, rung as u64));
        if t < 5 {
            let offsets = offsets_with_norm(t, -9, MAX_PIXEL - 9);
            let d = offsets[rng.random_range(0..offsets.len())];
            let b = base
                .iter()
                .zip(d)
                .map(|(&v, d)| (i64::from(v) + d) as u32)
                .collect();
            pairs.push(VectorPair::new(base.clone(), b));
            continue;
        }
        let offsets = offsets_with_norm(t, -MAX_PIXEL, MAX_PIXEL);
        let mut best: Option<VectorPair> = None;
        let mut found = 0;
        while found < CANDIDATES {
            let d = offsets[rng.random_range(0..offsets.len())];
            let a: Vec<u32> = d
                .iter()
                .map(|&di| rng.random_range((-di).max(0)..=(MAX_PIXEL - di).min(MAX_PIXEL)) as u32)
                .collect();
            let b: Vec<u32> = a
                .iter()
                .zip(d)
                .map(|(&v, d)| (i64::from(v) + d) as u32)
                .collect();
            if a.iter().all(|&v| v == 0) || b.iter().all(|&v| v == 0) {
                continue;
            }
            found += 1;
            let pair = VectorPair::new(a, b);
            if best.as_ref().is_none_or(|p| pair.z() < p.z()) {
                best = Some(pair);
            }
        }
        pairs.push(best.expect("at least one candidate"));
    }
    PairSet { pairs }
}

use proptest::prelude::*;
use qbm::harness::{preprocess_image, ExperimentConfig};
use qbm::image::{
    classical_euclidean_distance, encode_pgm, full_search, hierarchical_search, parse_pgm,
    BlockRef, GrayImage,
};
use qbm::rng::rng_from_seed;
use qbm::Result;
use rand::Rng;

fn ced(a: &[u32], b: &[u32]) -> Result<f64> {
    classical_euclidean_distance(a, b)
}

fn noise_image(w: usize, h: usize, seed: u64) -> GrayImage {
    let mut rng = rng_from_seed(seed);
    GrayImage::new(w, h, 8, (0..w * h).map(|_| rng.random()).collect()).unwrap()
}

/// Copy of `target` with the reference block pasted at `(x + dx, y + dy)`.
fn planted(src: &GrayImage, block: BlockRef, target: &GrayImage, dx: i64, dy: i64) -> GrayImage {
    let mut t = target.clone();
    for y in 0..block.n {
        for x in 0..block.n {
            let tx = (block.x as i64 + dx) as usize + x;
            let ty = (block.y as i64 + dy) as usize + y;
            t.set(tx, ty, src.get(block.x + x, block.y + y));
        }
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn full_search_recovers_planted_offset(dx in -10i64..=10, dy in -10i64..=10, seed in any::<u64>()) {
        let src = noise_image(48, 48, seed);
        let block = BlockRef { x: 20, y: 20, n: 8 };
        let tgt = planted(&src, block, &noise_image(48, 48, seed ^ 1), dx, dy);
        let r = full_search(&src, block, &tgt, 10, &mut ced).unwrap();
        prop_assert_eq!((r.offset_x, r.offset_y, r.distance), (dx, dy, 0.0));
        prop_assert_eq!(r.evaluations, 441);
    }

    #[test]
    fn hierarchical_is_cheaper_and_never_better(dx in -10i64..=10, dy in -10i64..=10, seed in any::<u64>()) {
        let src = noise_image(48, 48, seed);
        let block = BlockRef { x: 20, y: 20, n: 8 };
        let tgt = planted(&src, block, &noise_image(48, 48, seed ^ 1), dx, dy);
        let full = full_search(&src, block, &tgt, 10, &mut ced).unwrap();
        let hier = hierarchical_search(&src, block, &tgt, 10, &mut ced).unwrap();
        prop_assert!(hier.evaluations < full.evaluations);
        prop_assert!(hier.distance >= full.distance);
        prop_assert!(hier.offset_x.abs() <= 10 && hier.offset_y.abs() <= 10);
    }

    #[test]
    fn pgm_round_trip(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
        let img = noise_image(w, h, seed);
        prop_assert_eq!(parse_pgm(&encode_pgm(&img)).unwrap(), img);
    }
}

#[test]
fn pipeline_shape() {
    let big = noise_image(512, 512, 3);
    let config = ExperimentConfig::default();
    let out = preprocess_image(&big, &config, 1).unwrap();
    assert_eq!((out.width(), out.height()), (64, 64));
    assert!(out.pixels().iter().all(|&p| p <= 15));
    assert_eq!(out, preprocess_image(&big, &config, 1).unwrap());
}

#[test]
fn hierarchical_recovers_smooth_motion() {
    let smooth = |dx: i64, dy: i64| {
        let px = (0..64i64)
            .flat_map(|y| (0..64i64).map(move |x| (x - dx, y - dy)))
            .map(|(x, y)| {
                let (x, y) = (x as f64, y as f64);
                (128.0
                    + 90.0 * (x * 0.19).sin() * (y * 0.23).cos()
                    + 30.0 * (x * 0.07 + y * 0.05).sin())
                .clamp(0.0, 255.0) as u8
            })
            .collect();
        GrayImage::new(64, 64, 8, px).unwrap()
    };
    let block = BlockRef { x: 28, y: 28, n: 8 };
    for (dx, dy) in [(6, 2), (-5, -9), (1, 0)] {
        let r = hierarchical_search(&smooth(0, 0), block, &smooth(dx, dy), 10, &mut ced).unwrap();
        assert_eq!((r.offset_x, r.offset_y, r.distance), (dx, dy, 0.0));
    }
}

//! Justifies `DEFAULT_QUALITY_THRESHOLD`: on rendered regions of working
//! size it must sit above every same-area square and below every disk with
//! half of its boundary hidden.

mod common;

use balltrack_core::components::connected_components;
use balltrack_core::detect::{
    region_seed, segment, vote_circle, Bounds, DetectParams, DEFAULT_QUALITY_THRESHOLD,
};
use balltrack_core::synth::{matched_square_side, render, SceneObject};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn best_quality(obj: SceneObject, seed: u64) -> f64 {
    let (img, _) = render(&scene([obj]));
    let params = DetectParams::default();
    let map = segment(&img, &red_lut(), &params);
    connected_components(&map, params.vote.min_region_size)
        .iter()
        .filter_map(|r| {
            vote_circle(
                &r.boundary_points(),
                Bounds::new(640, 480),
                &params.vote,
                region_seed(seed, r.label),
            )
            .ok()
            .map(|v| v.quality)
        })
        .fold(0.0, f64::max)
}

#[test]
fn threshold_separates_squares_from_half_occluded_disks() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut max_square: f64 = 0.0;
    let mut min_occluded: f64 = f64::INFINITY;
    for seed in 0..60 {
        let r = rng.random_range(25.0..60.0);
        let cx = rng.random_range(100.0..540.0);
        let cy = rng.random_range(100.0..380.0);
        let half = matched_square_side(r) / 2.0;
        let angle = rng.random_range(0.0..core::f64::consts::FRAC_PI_2);
        max_square = max_square.max(best_quality(square(cx, cy, half, angle, RED), seed));
        let dir = rng.random_range(0.0..core::f64::consts::TAU);
        min_occluded =
            min_occluded.min(best_quality(occluded(disk(cx, cy, r, RED), 0.5, dir), seed));
    }
    println!("max square Q_c {max_square:.5}, min half-occluded Q_c {min_occluded:.5}");
    assert!(
        max_square < DEFAULT_QUALITY_THRESHOLD,
        "square scored {max_square}"
    );
    assert!(
        min_occluded > DEFAULT_QUALITY_THRESHOLD,
        "occluded disk scored {min_occluded}"
    );
}

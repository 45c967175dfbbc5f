#![allow(dead_code)]

use balltrack_core::colorcal::{rgb_to_chroma, ColorLut};
use balltrack_core::synth::{Occlusion, SceneObject, SceneSpec, Shape};
use balltrack_core::Rgb;

pub const RED: Rgb = [200, 30, 30];
pub const BLUE: Rgb = [30, 60, 200];
pub const BG: Rgb = [40, 60, 40];

/// Classes `1..=n` for colors whose chroma lies within `radius` of the
/// corresponding reference color.
pub fn chroma_lut(colors: &[Rgb], radius: f64) -> ColorLut {
    let refs: Vec<_> = colors
        .iter()
        .map(|c| rgb_to_chroma(c[0], c[1], c[2]))
        .collect();
    ColorLut::from_fn(colors.len() as u8, |c| {
        let ch = rgb_to_chroma(c[0], c[1], c[2]);
        refs.iter()
            .position(|r| r.distance(ch) < radius)
            .map_or(0, |i| i as u8 + 1)
    })
    .unwrap()
}

/// Red versus everything else, split at the chroma midpoint between red and
/// the background so anti-aliased edges divide near half coverage.
pub fn red_lut() -> ColorLut {
    let red = rgb_to_chroma(RED[0], RED[1], RED[2]);
    let bg = rgb_to_chroma(BG[0], BG[1], BG[2]);
    ColorLut::from_fn(1, |c| {
        let ch = rgb_to_chroma(c[0], c[1], c[2]);
        u8::from(ch.distance(red) < ch.distance(bg))
    })
    .unwrap()
}

pub fn disk(cx: f64, cy: f64, r: f64, color: Rgb) -> SceneObject {
    SceneObject::new(Shape::Disk { cx, cy, r }, color)
}

pub fn square(cx: f64, cy: f64, half: f64, angle: f64, color: Rgb) -> SceneObject {
    SceneObject::new(
        Shape::Rect {
            cx,
            cy,
            half_w: half,
            half_h: half,
            angle,
        },
        color,
    )
}

pub fn occluded(mut o: SceneObject, fraction: f64, direction: f64) -> SceneObject {
    o.occlusion = Some(Occlusion {
        fraction,
        direction,
    });
    o
}

pub fn scene(objects: impl IntoIterator<Item = SceneObject>) -> SceneSpec {
    let mut s = SceneSpec::new(640, 480, BG);
    s.objects.extend(objects);
    s
}

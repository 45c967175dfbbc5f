//! Circle outlines drawn onto frames for visual inspection.

use balltrack_core::camera::CameraIntrinsics;
use balltrack_core::{Circle, Point, Rgb, RgbImage};

pub const SELECTED: Rgb = [0, 255, 0];
pub const OTHER: Rgb = [255, 255, 0];

/// Draws `circle` (ideal coordinates) one pixel wide. With distortion the
/// outline is mapped back to observed pixels.
pub fn draw_circle(
    image: &mut RgbImage,
    circle: &Circle,
    color: Rgb,
    camera: Option<&CameraIntrinsics>,
) {
    let steps = ((circle.r * std::f64::consts::TAU * 2.0).ceil() as usize).max(16);
    for k in 0..steps {
        let t = k as f64 * std::f64::consts::TAU / steps as f64;
        let mut p = Point::new(
            circle.cx + circle.r * t.cos(),
            circle.cy + circle.r * t.sin(),
        );
        if let Some(intr) = camera.filter(|c| c.has_distortion()) {
            p = intr.distort(p);
        }
        let (x, y) = (p.x.round(), p.y.round());
        if x >= 0.0 && y >= 0.0 && (x as usize) < image.width() && (y as usize) < image.height() {
            image.set(x as usize, y as usize, color);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outline_stays_on_the_circle_and_clips() {
        let mut img = RgbImage::filled(40, 40, [0, 0, 0]).unwrap();
        draw_circle(&mut img, &Circle::new(35.0, 20.0, 10.0), SELECTED, None);
        let mut painted = 0;
        for y in 0..40 {
            for x in 0..40 {
                if img.get(x, y) == SELECTED {
                    painted += 1;
                    let d = ((x as f64 - 35.0).powi(2) + (y as f64 - 20.0).powi(2)).sqrt();
                    assert!((d - 10.0).abs() < 1.0);
                }
            }
        }
        assert!(painted > 20);
    }
}

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use balltrack::lutfile::save_lut;
use balltrack::ppm::save_ppm;
use balltrack_core::colorcal::{calibrate, CalibrationConfig, ColorLut};
use balltrack_core::synth::{render, render_frame, Occlusion, SceneObject, SceneSpec, Shape};

pub const RED: [u8; 3] = [200, 30, 30];
pub const BG: [u8; 3] = [40, 60, 40];

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_balltrack"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn balltrack")
}

pub fn disk(cx: f64, cy: f64, r: f64) -> SceneObject {
    SceneObject::new(Shape::Disk { cx, cy, r }, RED)
}

/// Two red balls of different size on the test background.
pub fn training_scene() -> SceneSpec {
    SceneSpec {
        noise_sigma: 2.0,
        seed: 11,
        ..SceneSpec::new(640, 480, BG)
    }
    .with_object(disk(200.0, 200.0, 40.0))
    .with_object(disk(460.0, 300.0, 30.0))
}

pub fn learned_lut() -> ColorLut {
    let (img, _) = render(&training_scene());
    let config = CalibrationConfig::default();
    calibrate(&img, &config).expect("training scene calibrates")
}

pub fn write_lut(dir: &Path) -> PathBuf {
    let path = dir.join("red.lut");
    save_lut(&learned_lut(), &path).unwrap();
    path
}

/// One ball moving right at `speed` px/frame, entering at x = 60.
pub fn moving_scene(speed: f64, seed: u64) -> SceneSpec {
    let mut ball = disk(60.0, 220.0, 30.0);
    ball.velocity = Some((speed, 1.0));
    SceneSpec {
        noise_sigma: 3.0,
        seed,
        ..SceneSpec::new(640, 480, BG)
    }
    .with_object(ball)
}

/// Writes `n` frames of `spec`; frames in `hidden` have the ball fully
/// occluded.
pub fn write_sequence(
    dir: &Path,
    spec: &SceneSpec,
    n: u32,
    hidden: std::ops::Range<u32>,
) -> Vec<PathBuf> {
    std::fs::create_dir_all(dir).unwrap();
    (0..n)
        .map(|t| {
            let mut s = spec.clone();
            if hidden.contains(&t) {
                s.objects[0].occlusion = Some(Occlusion {
                    fraction: 1.0,
                    direction: 0.0,
                });
            }
            let (img, _) = render_frame(&s, t);
            let path = dir.join(format!("frame_{t:04}.ppm"));
            save_ppm(&img, &path).unwrap();
            path
        })
        .collect()
}

/// Status column of a report.
pub fn statuses(csv_text: &str) -> Vec<String> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = r
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "status")
        .unwrap();
    r.records()
        .map(|rec| rec.unwrap()[idx].to_owned())
        .collect()
}

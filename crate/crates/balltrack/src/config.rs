//! `key = value` configuration files (parsed as TOML).

use std::fs;
use std::path::Path;

use balltrack_core::camera::CameraIntrinsics;
use balltrack_core::colorcal::CalibrationConfig;
use balltrack_core::pipeline::FrameParams;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}")]
    Parse {
        path: String,
        #[source]
        source: toml::de::Error,
    },
    #[error("{path}")]
    Invalid {
        path: String,
        #[source]
        source: balltrack_core::Error,
    },
}

/// Camera file keys: `fx fy cx cy k1 k2 width height ball_radius_m`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraConfig {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    #[serde(default)]
    pub k1: f64,
    #[serde(default)]
    pub k2: f64,
    pub width: usize,
    pub height: usize,
    pub ball_radius_m: Option<f64>,
}

impl CameraConfig {
    pub fn intrinsics(&self) -> CameraIntrinsics {
        CameraIntrinsics {
            fx: self.fx,
            fy: self.fy,
            cx: self.cx,
            cy: self.cy,
            k1: self.k1,
            k2: self.k2,
            width: self.width,
            height: self.height,
        }
    }
}

/// Tuning keys; anything omitted keeps its default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub center_threshold: Option<u32>,
    pub max_votes: Option<u32>,
    pub quality_threshold: Option<f64>,
    pub min_region_size: Option<usize>,
    pub seed: Option<u64>,
    pub cleanup_radius: Option<usize>,
    pub annulus_half_width: Option<f64>,
    pub annulus_top_fraction: Option<f64>,
    pub refine_iterations: Option<u32>,
    pub gate_radius: Option<f64>,
    pub coast_limit: Option<u32>,
    pub spatial_bw: Option<f64>,
    pub chroma_bw: Option<f64>,
    pub fit_ratio_threshold: Option<f64>,
    pub max_classes: Option<usize>,
}

macro_rules! set {
    ($src:expr, $dst:expr) => {
        if let Some(v) = $src {
            $dst = v;
        }
    };
}

impl ParamsConfig {
    pub fn frame_params(&self, camera: Option<&CameraConfig>) -> FrameParams {
        let mut p = FrameParams::default();
        set!(self.center_threshold, p.detect.vote.center_threshold);
        set!(self.max_votes, p.detect.vote.max_votes);
        set!(self.quality_threshold, p.detect.vote.quality_threshold);
        set!(self.min_region_size, p.detect.vote.min_region_size);
        set!(self.seed, p.detect.vote.seed);
        set!(self.cleanup_radius, p.detect.cleanup_radius);
        set!(self.annulus_half_width, p.refine.half_width);
        set!(self.annulus_top_fraction, p.refine.top_fraction);
        set!(self.refine_iterations, p.refine.iterations);
        set!(self.gate_radius, p.track.gate_radius);
        set!(self.coast_limit, p.track.coast_limit);
        set!(camera.and_then(|c| c.ball_radius_m), p.ball_radius);
        p
    }

    pub fn calibration(&self) -> CalibrationConfig {
        let mut c = CalibrationConfig::default();
        let vote = self.frame_params(None).detect.vote;
        c.vote = vote;
        c.min_region_size = vote.min_region_size;
        set!(self.spatial_bw, c.spatial_bw);
        set!(self.chroma_bw, c.chroma_bw);
        set!(self.fit_ratio_threshold, c.fit_ratio_threshold);
        set!(self.max_classes, c.max_classes);
        c
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, ConfigError> {
    toml::from_str(text).map_err(|source| ConfigError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_camera(path: impl AsRef<Path>) -> Result<CameraConfig, ConfigError> {
    let path = path.as_ref();
    let cfg: CameraConfig = parse(path, &read(path)?)?;
    cfg.intrinsics()
        .validate()
        .map_err(|source| ConfigError::Invalid {
            path: path.display().to_string(),
            source,
        })?;
    Ok(cfg)
}

pub fn load_params(path: impl AsRef<Path>) -> Result<ParamsConfig, ConfigError> {
    let path = path.as_ref();
    let cfg: ParamsConfig = parse(path, &read(path)?)?;
    cfg.frame_params(None)
        .validate()
        .map_err(|source| ConfigError::Invalid {
            path: path.display().to_string(),
            source,
        })?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn camera_keys_parse() {
        let c: CameraConfig = toml::from_str(
            "fx = 500\nfy = 502\ncx = 320\ncy = 240\nk1 = -0.1\nwidth = 640\nheight = 480\nball_radius_m = 0.035\n",
        )
        .unwrap();
        assert_eq!(c.intrinsics().focal(), 501.0);
        assert_eq!(c.k2, 0.0);
        assert_eq!(c.ball_radius_m, Some(0.035));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<ParamsConfig>("center_treshold = 3").is_err());
    }

    #[test]
    fn params_override_defaults() {
        let p: ParamsConfig = toml::from_str("gate_radius = 40\nrefine_iterations = 2").unwrap();
        let f = p.frame_params(None);
        assert_eq!(f.track.gate_radius, 40.0);
        assert_eq!(f.refine.iterations, 2);
        assert_eq!(f.detect.vote.center_threshold, 16);
    }
}

//! JSON scene files for the renderer.

use std::fs;
use std::path::Path;

use balltrack_core::synth::{SceneObject, SceneSpec, Shape};

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
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
        source: serde_json::Error,
    },
    #[error("{path}")]
    Invalid {
        path: String,
        #[source]
        source: balltrack_core::Error,
    },
}

pub fn parse_scene(text: &str) -> Result<SceneSpec, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<SceneSpec, SceneError> {
    let path = path.as_ref();
    let name = || path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| SceneError::Io {
        path: name(),
        source,
    })?;
    let spec = parse_scene(&text).map_err(|source| SceneError::Parse {
        path: name(),
        source,
    })?;
    spec.validate().map_err(|source| SceneError::Invalid {
        path: name(),
        source,
    })?;
    Ok(spec)
}

/// 640x480 frame with one red ball of 60 px diameter on a gray background.
pub fn default_scene() -> SceneSpec {
    SceneSpec {
        noise_sigma: 2.0,
        seed: 1,
        ..SceneSpec::new(640, 480, [90, 90, 90])
    }
    .with_object(SceneObject::new(
        Shape::Disk {
            cx: 331.3,
            cy: 228.6,
            r: 30.0,
        },
        [200, 30, 30],
    ))
}

pub fn scene_to_json(spec: &SceneSpec) -> String {
    serde_json::to_string_pretty(spec).expect("scene serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tagged_objects() {
        let spec = parse_scene(
            r#"{
                "width": 64, "height": 48, "background": [10, 10, 10],
                "objects": [
                    {"shape": "disk", "cx": 20, "cy": 20, "r": 8, "color": [200, 30, 30]},
                    {"shape": "rect", "cx": 45, "cy": 25, "half_w": 6, "half_h": 4, "color": [200, 30, 30],
                     "occlusion": {"fraction": 0.3}, "velocity": [1.0, 0.0]}
                ],
                "noise_sigma": 2.0, "seed": 9
            }"#,
        )
        .unwrap();
        assert_eq!(spec.objects.len(), 2);
        assert_eq!(
            spec.objects[0].shape,
            Shape::Disk {
                cx: 20.0,
                cy: 20.0,
                r: 8.0
            }
        );
        assert_eq!(spec.objects[1].velocity, Some((1.0, 0.0)));
        assert_eq!(spec.luminance_ramp, 0.0);
    }

    #[test]
    fn round_trips_through_json() {
        let spec = SceneSpec::new(32, 32, [0, 0, 0]).with_object(SceneObject::new(
            Shape::Disk {
                cx: 16.0,
                cy: 16.0,
                r: 5.0,
            },
            [1, 2, 3],
        ));
        assert_eq!(parse_scene(&scene_to_json(&spec)).unwrap(), spec);
    }

    #[test]
    fn unknown_top_level_keys_are_rejected() {
        assert!(parse_scene(
            r#"{"width": 1, "height": 1, "background": [0,0,0], "objects": [], "nois": 1}"#
        )
        .is_err());
    }
}

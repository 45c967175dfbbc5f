//! File formats, timing harness and command-line support for
//! [`balltrack_core`].
//!
//! Frames are binary PPM files, lookup tables use a small `CLUT` container,
//! camera and tuning parameters are `key = value` files, synthetic scenes are
//! JSON and run reports are CSV.

pub mod config;
pub mod lutfile;
pub mod overlay;
pub mod ppm;
pub mod report;
pub mod runner;
pub mod scene;

pub use balltrack_core;

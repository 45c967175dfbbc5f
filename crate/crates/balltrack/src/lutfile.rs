//! On-disk lookup tables: `CLUT`, version byte, class count, then 262144
//! class bytes indexed `(r >> 2) * 4096 + (g >> 2) * 64 + (b >> 2)`.

use std::fs;
use std::path::Path;

use balltrack_core::colorcal::{ColorLut, LUT_LEN};

pub const MAGIC: &[u8; 4] = b"CLUT";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 6;

#[derive(Debug, thiserror::Error)]
pub enum LutFileError {
    #[error("{path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("not a lookup table file (bad magic)")]
    BadMagic,
    #[error("unsupported lookup table version {0}")]
    Version(u8),
    #[error("lookup table file has {actual} bytes, expected {expected}")]
    Length { expected: usize, actual: usize },
    #[error("invalid lookup table: {0}")]
    Content(#[from] balltrack_core::Error),
}

pub fn encode_lut(lut: &ColorLut) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + LUT_LEN);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(lut.classes());
    out.extend_from_slice(lut.table());
    out
}

pub fn decode_lut(bytes: &[u8]) -> Result<ColorLut, LutFileError> {
    if bytes.len() < MAGIC.len() || &bytes[..4] != MAGIC {
        return Err(LutFileError::BadMagic);
    }
    if bytes.len() != HEADER_LEN + LUT_LEN {
        return Err(LutFileError::Length {
            expected: HEADER_LEN + LUT_LEN,
            actual: bytes.len(),
        });
    }
    if bytes[4] != VERSION {
        return Err(LutFileError::Version(bytes[4]));
    }
    Ok(ColorLut::new(bytes[5], bytes[HEADER_LEN..].to_vec())?)
}

pub fn save_lut(lut: &ColorLut, path: impl AsRef<Path>) -> Result<(), LutFileError> {
    let path = path.as_ref();
    fs::write(path, encode_lut(lut)).map_err(|source| LutFileError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_lut(path: impl AsRef<Path>) -> Result<ColorLut, LutFileError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| LutFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_lut(&bytes)
}

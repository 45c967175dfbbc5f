//! Binary PPM (P6, maxval 255) reading and writing.

use std::fs;
use std::path::Path;

use balltrack_core::RgbImage;

#[derive(Debug, thiserror::Error)]
pub enum PpmError {
    #[error("{path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed PPM at byte {offset}: {reason}")]
    Format { offset: usize, reason: String },
}

fn format_err(offset: usize, reason: impl Into<String>) -> PpmError {
    PpmError::Format {
        offset,
        reason: reason.into(),
    }
}

struct Header {
    width: usize,
    height: usize,
    data_start: usize,
}

fn skip_space_and_comments(bytes: &[u8], mut pos: usize) -> usize {
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
        } else {
            return pos;
        }
    }
}

fn read_number(bytes: &[u8], pos: usize, what: &str) -> Result<(usize, usize), PpmError> {
    let start = skip_space_and_comments(bytes, pos);
    let end = start
        + bytes[start..]
            .iter()
            .take_while(|b| b.is_ascii_digit())
            .count();
    if end == start {
        return Err(format_err(start, format!("expected {what}")));
    }
    let text = std::str::from_utf8(&bytes[start..end]).expect("ascii digits");
    let value = text
        .parse()
        .map_err(|_| format_err(start, format!("{what} out of range")))?;
    Ok((value, end))
}

fn parse_header(bytes: &[u8]) -> Result<Header, PpmError> {
    if !bytes.starts_with(b"P6") {
        return Err(format_err(0, "missing P6 magic"));
    }
    let (width, pos) = read_number(bytes, 2, "width")?;
    let (height, pos) = read_number(bytes, pos, "height")?;
    let maxval_at = skip_space_and_comments(bytes, pos);
    let (maxval, pos) = read_number(bytes, pos, "maxval")?;
    if maxval != 255 {
        return Err(format_err(
            maxval_at,
            format!("unsupported maxval {maxval}"),
        ));
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => {}
        _ => return Err(format_err(pos, "expected one whitespace byte after maxval")),
    }
    if width == 0 || height == 0 {
        return Err(format_err(2, format!("zero dimension {width}x{height}")));
    }
    Ok(Header {
        width,
        height,
        data_start: pos + 1,
    })
}

pub fn decode_ppm(bytes: &[u8]) -> Result<RgbImage, PpmError> {
    let h = parse_header(bytes)?;
    let expected = h
        .width
        .checked_mul(h.height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| format_err(2, "dimensions overflow"))?;
    let payload = &bytes[h.data_start..];
    if payload.len() < expected {
        return Err(format_err(
            bytes.len(),
            format!("truncated payload: {} of {expected} bytes", payload.len()),
        ));
    }
    if payload.len() > expected {
        return Err(format_err(
            h.data_start + expected,
            "trailing bytes after payload",
        ));
    }
    let pixels = payload
        .chunks_exact(3)
        .map(|c| [c[0], c[1], c[2]])
        .collect();
    Ok(RgbImage::new(h.width, h.height, pixels).expect("size checked"))
}

pub fn encode_ppm(image: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.reserve(image.pixels().len() * 3);
    for p in image.pixels() {
        out.extend_from_slice(p);
    }
    out
}

pub fn load_ppm(path: impl AsRef<Path>) -> Result<RgbImage, PpmError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| PpmError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_ppm(&bytes)
}

pub fn save_ppm(image: &RgbImage, path: impl AsRef<Path>) -> Result<(), PpmError> {
    let path = path.as_ref();
    fs::write(path, encode_ppm(image)).map_err(|source| PpmError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_two_pixels() {
        let mut bytes = b"P6\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[255, 0, 0, 0, 0, 255]);
        let img = decode_ppm(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (2, 1));
        assert_eq!(img.pixels(), &[[255, 0, 0], [0, 0, 255]]);
    }

    #[test]
    fn smallest_file_layout() {
        let img = RgbImage::filled(1, 1, [0, 0, 0]).unwrap();
        let bytes = encode_ppm(&img);
        assert_eq!(bytes.len(), 14);
        assert_eq!(&bytes[..11], b"P6\n1 1\n255\n");
    }

    #[test]
    fn truncation_is_reported_at_end_of_input() {
        let mut bytes = b"P6\n4 4\n255\n".to_vec();
        bytes.extend_from_slice(&[0; 9]);
        match decode_ppm(&bytes) {
            Err(PpmError::Format { offset, reason }) => {
                assert_eq!(offset, bytes.len());
                assert!(reason.contains("truncated"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn header_errors_carry_offsets() {
        assert!(matches!(
            decode_ppm(b"P3\n1 1\n255\n"),
            Err(PpmError::Format { offset: 0, .. })
        ));
        assert!(matches!(
            decode_ppm(b"P6\n1 1\n65535\n"),
            Err(PpmError::Format { offset: 7, .. })
        ));
        assert!(matches!(
            decode_ppm(b"P6\n1 x\n255\n"),
            Err(PpmError::Format { offset: 5, .. })
        ));
    }

    #[test]
    fn comments_are_skipped() {
        let mut bytes = b"P6\n# made by hand\n1 1\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3]);
        assert_eq!(decode_ppm(&bytes).unwrap().pixels(), &[[1, 2, 3]]);
    }
}

//! PGM/PPM (PNM) reading and writing.
//!
//! Reads the ASCII (P2/P3) and binary (P5/P6) variants with arbitrary
//! whitespace and `#` comments; samples are normalized by the header's
//! maxval. Writes binary variants, 8-bit (maxval 255) or 16-bit
//! (maxval 65535, big-endian samples as the PNM spec requires).

use std::path::Path;

use super::{BitDepth, Image};
use crate::error::{Error, Result};

pub fn load_pnm(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pnm(&bytes)
}

/// Writes a single-channel image as binary PGM (P5).
pub fn save_pgm(image: &Image, path: impl AsRef<Path>, depth: BitDepth) -> Result<()> {
    if image.channels() != 1 {
        return Err(Error::Format(format!(
            "channel mismatch: PGM stores 1 channel, image has {}",
            image.channels()
        )));
    }
    write_binary_pnm(image, path, depth, b'5')
}

/// Writes a three-channel image as binary PPM (P6).
pub fn save_ppm(image: &Image, path: impl AsRef<Path>, depth: BitDepth) -> Result<()> {
    if image.channels() != 3 {
        return Err(Error::Format(format!(
            "channel mismatch: PPM stores 3 channels, image has {}",
            image.channels()
        )));
    }
    write_binary_pnm(image, path, depth, b'6')
}

fn write_binary_pnm(
    image: &Image,
    path: impl AsRef<Path>,
    depth: BitDepth,
    kind: u8,
) -> Result<()> {
    let path = path.as_ref();
    let maxval: u32 = match depth {
        BitDepth::Eight => 255,
        BitDepth::Sixteen => 65535,
    };
    let mut out = format!("P{} {} {} {}\n", kind as char, image.width(), image.height(), maxval)
        .into_bytes();
    for &v in image.data() {
        let q = (v as f64 * maxval as f64).round() as u32;
        match depth {
            BitDepth::Eight => out.push(q as u8),
            BitDepth::Sixteen => out.extend_from_slice(&(q as u16).to_be_bytes()),
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub(super) fn decode_pnm(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(Error::Format("not a PNM file".into()));
    }
    let (kind, channels, ascii) = match bytes[1] {
        b'2' => ('2', 1, true),
        b'3' => ('3', 3, true),
        b'5' => ('5', 1, false),
        b'6' => ('6', 3, false),
        other => {
            return Err(Error::Format(format!(
                "unsupported PNM type P{}",
                other as char
            )))
        }
    };
    let mut cursor = 2;
    let width = read_header_int(bytes, &mut cursor)? as usize;
    let height = read_header_int(bytes, &mut cursor)? as usize;
    let maxval = read_header_int(bytes, &mut cursor)?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("invalid PNM maxval {maxval}")));
    }
    let count = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::Dimension(format!("PNM size overflow {width}x{height}")))?;

    let mut data = Vec::with_capacity(count);
    if ascii {
        for _ in 0..count {
            let v = read_header_int(bytes, &mut cursor)?;
            if v > maxval {
                return Err(Error::Format(format!("sample {v} exceeds maxval {maxval}")));
            }
            data.push((v as f64 / maxval as f64) as f32);
        }
    } else {
        // Binary payload starts after exactly one whitespace byte.
        let wide = maxval > 255;
        let sample_bytes = if wide { 2 } else { 1 };
        let need = count * sample_bytes;
        let payload = bytes
            .get(cursor..cursor + need)
            .ok_or_else(|| Error::Format(format!("truncated P{kind} payload")))?;
        for i in 0..count {
            let v = if wide {
                u16::from_be_bytes([payload[2 * i], payload[2 * i + 1]]) as u32
            } else {
                payload[i] as u32
            };
            if v > maxval {
                return Err(Error::Format(format!("sample {v} exceeds maxval {maxval}")));
            }
            data.push((v as f64 / maxval as f64) as f32);
        }
    }
    Image::new(width, height, channels, data)
}

/// Reads the next unsigned integer token, skipping whitespace and comments.
/// Leaves the cursor one byte past the token (the single whitespace byte
/// that separates a binary header from its payload).
fn read_header_int(bytes: &[u8], cursor: &mut usize) -> Result<u32> {
    loop {
        while *cursor < bytes.len() && bytes[*cursor].is_ascii_whitespace() {
            *cursor += 1;
        }
        if *cursor < bytes.len() && bytes[*cursor] == b'#' {
            while *cursor < bytes.len() && bytes[*cursor] != b'\n' {
                *cursor += 1;
            }
            continue;
        }
        break;
    }
    let start = *cursor;
    while *cursor < bytes.len() && bytes[*cursor].is_ascii_digit() {
        *cursor += 1;
    }
    if start == *cursor {
        return Err(Error::Format("malformed PNM header".into()));
    }
    let token = std::str::from_utf8(&bytes[start..*cursor]).expect("digits are utf-8");
    let value = token
        .parse::<u32>()
        .map_err(|_| Error::Format(format!("bad PNM integer '{token}'")))?;
    if *cursor < bytes.len() {
        *cursor += 1; // consume one separator byte
    }
    Ok(value)
}

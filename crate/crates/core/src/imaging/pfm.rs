//! PFM disparity-map i/o in the Middlebury convention: `Pf` header,
//! negative scale flag for little-endian float32 samples, rows stored
//! bottom-up. Invalid pixels are encoded as +infinity.

use std::path::Path;

use crate::crf::DisparityMap;
use crate::error::{Error, Result};

pub fn save_pfm(map: &DisparityMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (w, h) = (map.width(), map.height());
    let mut out = format!("Pf\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(w * h * 4);
    for y in (0..h).rev() {
        for x in 0..w {
            let v = if map.is_valid(x, y) {
                map.get(x, y)
            } else {
                f32::INFINITY
            };
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_pfm(path: impl AsRef<Path>) -> Result<DisparityMap> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pfm(&bytes).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn decode_pfm(bytes: &[u8]) -> Result<DisparityMap> {
    let mut cursor = 0;
    let magic = read_token(bytes, &mut cursor)?;
    let channels = match magic.as_str() {
        "Pf" => 1,
        "PF" => 3,
        other => return Err(Error::Format(format!("bad PFM magic '{other}'"))),
    };
    if channels != 1 {
        return Err(Error::Format("color PFM not supported for disparity".into()));
    }
    let w: usize = parse_token(bytes, &mut cursor)?;
    let h: usize = parse_token(bytes, &mut cursor)?;
    let scale: f64 = parse_token(bytes, &mut cursor)?;
    if scale >= 0.0 {
        return Err(Error::Format(
            "big-endian PFM (positive scale) not supported".into(),
        ));
    }
    let need = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::Dimension(format!("PFM size overflow {w}x{h}")))?;
    let payload = bytes
        .get(cursor..cursor + need)
        .ok_or_else(|| Error::Format("truncated PFM payload".into()))?;
    let mut map = DisparityMap::invalid(w, h);
    for row in 0..h {
        let y = h - 1 - row; // stored bottom-up
        for x in 0..w {
            let off = (row * w + x) * 4;
            let v = f32::from_le_bytes([
                payload[off],
                payload[off + 1],
                payload[off + 2],
                payload[off + 3],
            ]);
            if v.is_finite() {
                map.set(x, y, v);
            }
        }
    }
    Ok(map)
}

fn read_token(bytes: &[u8], cursor: &mut usize) -> Result<String> {
    while *cursor < bytes.len() && bytes[*cursor].is_ascii_whitespace() {
        *cursor += 1;
    }
    let start = *cursor;
    while *cursor < bytes.len() && !bytes[*cursor].is_ascii_whitespace() {
        *cursor += 1;
    }
    if start == *cursor {
        return Err(Error::Format("malformed PFM header".into()));
    }
    let token = String::from_utf8(bytes[start..*cursor].to_vec())
        .map_err(|_| Error::Format("non-ascii PFM header".into()))?;
    if *cursor < bytes.len() {
        *cursor += 1; // single separator byte before payload
    }
    Ok(token)
}

fn parse_token<T: std::str::FromStr>(bytes: &[u8], cursor: &mut usize) -> Result<T> {
    let token = read_token(bytes, cursor)?;
    token
        .parse::<T>()
        .map_err(|_| Error::Format(format!("bad PFM header token '{token}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_values_and_mask() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.pfm");
        let mut map = DisparityMap::invalid(3, 2);
        map.set(0, 0, 1.25);
        map.set(2, 0, 7.0);
        map.set(1, 1, 0.5);
        save_pfm(&map, &path).unwrap();
        let back = load_pfm(&path).unwrap();
        assert_eq!(back, map);
    }

    #[test]
    fn invalid_pixels_written_as_infinity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inv.pfm");
        let map = DisparityMap::invalid(2, 1);
        save_pfm(&map, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let tail = &bytes[bytes.len() - 8..];
        let v = f32::from_le_bytes([tail[0], tail[1], tail[2], tail[3]]);
        assert!(v.is_infinite() && v > 0.0);
    }

    #[test]
    fn rows_are_bottom_up() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.pfm");
        let mut map = DisparityMap::invalid(1, 2);
        map.set(0, 0, 10.0); // top row
        map.set(0, 1, 20.0); // bottom row
        save_pfm(&map, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let first = f32::from_le_bytes(bytes[bytes.len() - 8..][..4].try_into().unwrap());
        assert_eq!(first, 20.0); // bottom row serialized first
    }
}

//! PNG reading and writing via the `image` crate, 8- and 16-bit.

use std::path::Path;

use image::{DynamicImage, ImageBuffer, ImageFormat};

use super::{BitDepth, Image};
use crate::error::{Error, Result};

pub fn load_png(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_png(&bytes)
}

pub(super) fn decode_png(bytes: &[u8]) -> Result<Image> {
    let dynimg = image::load_from_memory_with_format(bytes, ImageFormat::Png)
        .map_err(|e| Error::Format(format!("PNG decode failed: {e}")))?;
    let (w, h) = (dynimg.width() as usize, dynimg.height() as usize);
    let (channels, data): (usize, Vec<f32>) = match dynimg {
        DynamicImage::ImageLuma8(b) => (1, norm8(b.into_raw())),
        DynamicImage::ImageLumaA8(b) => (2, norm8(b.into_raw())),
        DynamicImage::ImageRgb8(b) => (3, norm8(b.into_raw())),
        DynamicImage::ImageRgba8(b) => (4, norm8(b.into_raw())),
        DynamicImage::ImageLuma16(b) => (1, norm16(b.into_raw())),
        DynamicImage::ImageLumaA16(b) => (2, norm16(b.into_raw())),
        DynamicImage::ImageRgb16(b) => (3, norm16(b.into_raw())),
        DynamicImage::ImageRgba16(b) => (4, norm16(b.into_raw())),
        other => {
            return Err(Error::Format(format!(
                "unsupported PNG pixel layout {other:?}"
            )))
        }
    };
    Image::new(w, h, channels, data)
}

fn norm8(raw: Vec<u8>) -> Vec<f32> {
    raw.into_iter().map(|v| v as f32 / 255.0).collect()
}

fn norm16(raw: Vec<u16>) -> Vec<f32> {
    raw.into_iter().map(|v| v as f32 / 65535.0).collect()
}

pub fn save_png(image: &Image, path: impl AsRef<Path>, depth: BitDepth) -> Result<()> {
    let path = path.as_ref();
    let (w, h) = (image.width() as u32, image.height() as u32);
    let dynimg = match depth {
        BitDepth::Eight => {
            let raw: Vec<u8> = image
                .data()
                .iter()
                .map(|&v| (v as f64 * 255.0).round() as u8)
                .collect();
            match image.channels() {
                1 => DynamicImage::ImageLuma8(buffer(w, h, raw)?),
                2 => DynamicImage::ImageLumaA8(buffer(w, h, raw)?),
                3 => DynamicImage::ImageRgb8(buffer(w, h, raw)?),
                _ => DynamicImage::ImageRgba8(buffer(w, h, raw)?),
            }
        }
        BitDepth::Sixteen => {
            let raw: Vec<u16> = image
                .data()
                .iter()
                .map(|&v| (v as f64 * 65535.0).round() as u16)
                .collect();
            match image.channels() {
                1 => DynamicImage::ImageLuma16(buffer(w, h, raw)?),
                2 => DynamicImage::ImageLumaA16(buffer(w, h, raw)?),
                3 => DynamicImage::ImageRgb16(buffer(w, h, raw)?),
                _ => DynamicImage::ImageRgba16(buffer(w, h, raw)?),
            }
        }
    };
    dynimg
        .save_with_format(path, ImageFormat::Png)
        .map_err(|e| Error::Format(format!("PNG encode failed for {}: {e}", path.display())))
}

fn buffer<P: image::Pixel>(
    w: u32,
    h: u32,
    raw: Vec<P::Subpixel>,
) -> Result<ImageBuffer<P, Vec<P::Subpixel>>> {
    ImageBuffer::from_raw(w, h, raw)
        .ok_or_else(|| Error::Dimension("PNG buffer size mismatch".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::load_image;

    #[test]
    fn sixteen_bit_full_scale_reads_as_one() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.png");
        let img = Image::new(2, 1, 1, vec![1.0, 0.0]).unwrap();
        save_png(&img, &path, BitDepth::Sixteen).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(back.get(0, 0, 0), 1.0);
        assert_eq!(back.get(1, 0, 0), 0.0);
    }

    #[test]
    fn rgb_png_round_trip_16bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rgb.png");
        let data: Vec<f32> = (0..4 * 3 * 3).map(|i| (i * 977 % 65536) as f32 / 65535.0).collect();
        let img = Image::new(4, 3, 3, data).unwrap();
        save_png(&img, &path, BitDepth::Sixteen).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(back.data(), img.data());
    }
}

//! Raster types, image file i/o, downscaling and tiling.
//!
//! Intensities are stored row-major as `f32` in `[0, 1]`, channels
//! interleaved. Files are normalized to `[0, 1]` by the maximum sample
//! value of their bit depth at load time.

mod pfm;
mod pnm;
mod png;

pub use pfm::{load_pfm, save_pfm};
pub use pnm::{load_pnm, save_pgm, save_ppm};
pub use png::{load_png, save_png};

use std::path::Path;

use crate::crf::DisparityMap;
use crate::error::{Error, Result};

/// Sample bit depth used when writing image files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

/// A rectified raster image, row-major, channel-interleaved, values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f32>,
}

impl Image {
    /// Builds an image, validating the size/channel invariants and that all
    /// samples are finite and inside [0, 1].
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "degenerate image size {width}x{height}"
            )));
        }
        if channels == 0 || channels > 4 {
            return Err(Error::Dimension(format!(
                "unsupported channel count {channels}"
            )));
        }
        let expect = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(channels))
            .ok_or_else(|| Error::Dimension(format!("image size overflow {width}x{height}")))?;
        if data.len() != expect {
            return Err(Error::Dimension(format!(
                "data length {} does not match {width}x{height}x{channels}",
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)) {
            return Err(Error::NonFinite(
                "image samples must be finite and within [0, 1]".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn constant(width: usize, height: usize, channels: usize, value: f32) -> Result<Self> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f32 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    /// Sample row `y` as a channel-interleaved slice.
    #[inline]
    pub fn row(&self, y: usize) -> &[f32] {
        let stride = self.width * self.channels;
        &self.data[y * stride..(y + 1) * stride]
    }

    /// Mirrors the image around its vertical axis.
    pub fn flip_horizontal(&self) -> Image {
        let mut data = Vec::with_capacity(self.data.len());
        for y in 0..self.height {
            for x in (0..self.width).rev() {
                for c in 0..self.channels {
                    data.push(self.get(x, y, c));
                }
            }
        }
        Image {
            width: self.width,
            height: self.height,
            channels: self.channels,
            data,
        }
    }

    /// Extracts the rectangle starting at (row y0, col x0).
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<Image> {
        if x0 + width > self.width || y0 + height > self.height {
            return Err(Error::Dimension(format!(
                "crop {width}x{height}+{x0}+{y0} exceeds {}x{}",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(width * height * self.channels);
        for y in y0..y0 + height {
            let row = self.row(y);
            data.extend_from_slice(&row[x0 * self.channels..(x0 + width) * self.channels]);
        }
        Ok(Image {
            width,
            height,
            channels: self.channels,
            data,
        })
    }
}

/// A rectified stereo pair; epipolar lines are image rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePair {
    pub left: Image,
    pub right: Image,
}

impl ImagePair {
    pub fn new(left: Image, right: Image) -> Result<Self> {
        if left.width != right.width
            || left.height != right.height
            || left.channels != right.channels
        {
            return Err(Error::Dimension(format!(
                "stereo views differ: {}x{}x{} vs {}x{}x{}",
                left.width, left.height, left.channels, right.width, right.height, right.channels
            )));
        }
        Ok(Self { left, right })
    }

    pub fn width(&self) -> usize {
        self.left.width
    }

    pub fn height(&self) -> usize {
        self.left.height
    }

    /// Mirrors both views and swaps them, so that a left-reference matcher
    /// run on the result computes the right-reference disparity map
    /// (mirrored back by the caller).
    pub fn mirrored(&self) -> ImagePair {
        ImagePair {
            left: self.right.flip_horizontal(),
            right: self.left.flip_horizontal(),
        }
    }
}

/// One part of a tiled stereo pair, with its origin in the source image.
#[derive(Debug, Clone)]
pub struct Tile {
    pub source_id: usize,
    /// (row, col) offset of the tile in the source image.
    pub origin: (usize, usize),
    pub pair: ImagePair,
}

/// Loads PGM/PPM (ASCII or binary) or PNG (8/16-bit), sniffing the format
/// from the file's magic bytes. Samples are normalized by the format's
/// maximum value.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    match bytes.first() {
        Some(b'P') => pnm::decode_pnm(&bytes),
        Some(0x89) => png::decode_png(&bytes),
        _ => Err(Error::Format(format!(
            "unsupported image format in {}",
            path.display()
        ))),
    }
}

/// Saves an image with 8-bit samples; the format is chosen by extension
/// (`.pgm`, `.ppm`, `.png`).
pub fn save_image(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    save_image_depth(image, path, BitDepth::Eight)
}

/// Saves an image at the requested bit depth.
pub fn save_image_depth(image: &Image, path: impl AsRef<Path>, depth: BitDepth) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "pgm" => save_pgm(image, path, depth),
        "ppm" => save_ppm(image, path, depth),
        "png" => save_png(image, path, depth),
        other => Err(Error::Format(format!(
            "unsupported output extension '{other}'"
        ))),
    }
}

/// Halves both image dimensions by averaging 2x2 blocks; edge blocks
/// average whatever pixels exist. Output is ceil(w/2) x ceil(h/2).
pub fn downscale_half(image: &Image) -> Result<Image> {
    let (w, h, c) = (image.width, image.height, image.channels);
    let (ow, oh) = (w.div_ceil(2), h.div_ceil(2));
    let mut data = vec![0f32; ow * oh * c];
    for oy in 0..oh {
        for ox in 0..ow {
            for ch in 0..c {
                let mut sum = 0f64;
                let mut n = 0u32;
                for dy in 0..2 {
                    for dx in 0..2 {
                        let (x, y) = (2 * ox + dx, 2 * oy + dy);
                        if x < w && y < h {
                            sum += image.get(x, y, ch) as f64;
                            n += 1;
                        }
                    }
                }
                data[(oy * ow + ox) * c + ch] = (sum / n as f64) as f32;
            }
        }
    }
    // Means of in-range samples stay in range; clamp guards f32 rounding.
    for v in &mut data {
        *v = v.clamp(0.0, 1.0);
    }
    Image::new(ow, oh, c, data)
}

/// Splits a stereo pair into overlapping tiles covering the whole image.
///
/// `overlap` must be at least the configured maximum disparity so that no
/// correspondence falls outside its tile; callers are responsible for that
/// choice, this function only enforces the geometric constraints.
pub fn tile_pair(
    pair: &ImagePair,
    tile_h: usize,
    tile_w: usize,
    overlap: usize,
) -> Result<Vec<Tile>> {
    if tile_w <= 2 * overlap || tile_h <= 2 * overlap {
        return Err(Error::Config(format!(
            "tile {tile_w}x{tile_h} must exceed twice the overlap {overlap}"
        )));
    }
    let (w, h) = (pair.width(), pair.height());
    let col_starts = axis_starts(w, tile_w, overlap);
    let row_starts = axis_starts(h, tile_h, overlap);
    let mut tiles = Vec::with_capacity(col_starts.len() * row_starts.len());
    for &r0 in &row_starts {
        for &c0 in &col_starts {
            let tw = tile_w.min(w - c0);
            let th = tile_h.min(h - r0);
            let pair = ImagePair {
                left: pair.left.crop(c0, r0, tw, th)?,
                right: pair.right.crop(c0, r0, tw, th)?,
            };
            tiles.push(Tile {
                source_id: tiles.len(),
                origin: (r0, c0),
                pair,
            });
        }
    }
    Ok(tiles)
}

fn axis_starts(size: usize, tile: usize, overlap: usize) -> Vec<usize> {
    if size <= tile {
        return vec![0];
    }
    let stride = tile - overlap;
    let mut starts = vec![0];
    loop {
        let prev = *starts.last().unwrap();
        if prev + tile >= size {
            break;
        }
        starts.push((prev + stride).min(size - tile));
    }
    starts
}

/// Reassembles per-tile disparity maps into a full-size map. Each output
/// pixel is taken from the tile whose center is nearest (ties: lowest tile
/// index), so every pixel comes from the tile where it is most interior.
pub fn stitch_tiles(
    parts: &[((usize, usize), DisparityMap)],
    width: usize,
    height: usize,
) -> Result<DisparityMap> {
    if parts.is_empty() {
        return Err(Error::Empty("no tiles to stitch".into()));
    }
    let centers: Vec<(f64, f64)> = parts
        .iter()
        .map(|((r0, c0), m)| {
            (
                *r0 as f64 + (m.height() as f64 - 1.0) / 2.0,
                *c0 as f64 + (m.width() as f64 - 1.0) / 2.0,
            )
        })
        .collect();
    let mut out = DisparityMap::invalid(width, height);
    for y in 0..height {
        for x in 0..width {
            let mut best: Option<(f64, usize)> = None;
            for (i, ((r0, c0), m)) in parts.iter().enumerate() {
                if y < *r0 || x < *c0 || y >= r0 + m.height() || x >= c0 + m.width() {
                    continue;
                }
                let (cy, cx) = centers[i];
                let d2 = (y as f64 - cy).powi(2) + (x as f64 - cx).powi(2);
                if best.map_or(true, |(bd, _)| d2 < bd) {
                    best = Some((d2, i));
                }
            }
            let (_, i) = best.ok_or_else(|| {
                Error::Dimension(format!("pixel ({x}, {y}) not covered by any tile"))
            })?;
            let ((r0, c0), m) = &parts[i];
            if m.is_valid(x - c0, y - r0) {
                out.set(x, y, m.get(x - c0, y - r0));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(width: usize, height: usize) -> Image {
        let data = (0..width * height)
            .map(|i| i as f32 / (width * height) as f32)
            .collect();
        Image::new(width, height, 1, data).unwrap()
    }

    #[test]
    fn rejects_bad_data() {
        assert!(Image::new(2, 2, 1, vec![0.0; 3]).is_err());
        assert!(Image::new(2, 2, 1, vec![f32::NAN; 4]).is_err());
        assert!(Image::new(2, 2, 1, vec![1.5; 4]).is_err());
        assert!(Image::new(0, 2, 1, vec![]).is_err());
    }

    #[test]
    fn pair_requires_equal_shapes() {
        let a = Image::constant(4, 3, 1, 0.5).unwrap();
        let b = Image::constant(4, 4, 1, 0.5).unwrap();
        assert!(ImagePair::new(a.clone(), b).is_err());
        assert!(ImagePair::new(a.clone(), a).is_ok());
    }

    #[test]
    fn downscale_2x2_mean() {
        let img = Image::new(2, 2, 1, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let half = downscale_half(&img).unwrap();
        assert_eq!((half.width(), half.height()), (1, 1));
        assert!((half.get(0, 0, 0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn downscale_constant_stays_constant() {
        let img = Image::constant(7, 5, 2, 0.3).unwrap();
        let half = downscale_half(&img).unwrap();
        assert_eq!((half.width(), half.height(), half.channels()), (4, 3, 2));
        for v in half.data() {
            assert!((*v - 0.3) as f64 != f64::NAN && ((*v - 0.3) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn downscale_3x3_hand_computed() {
        // 3x3 ramp 0..9 / 9; block means computed by hand.
        let data: Vec<f32> = (0..9).map(|i| i as f32 / 9.0).collect();
        let img = Image::new(3, 3, 1, data).unwrap();
        let half = downscale_half(&img).unwrap();
        assert_eq!((half.width(), half.height()), (2, 2));
        let e = |v: f32, want: f32| assert!((v - want).abs() < 1e-6, "{v} vs {want}");
        e(half.get(0, 0, 0), (0.0 + 1.0 + 3.0 + 4.0) / 4.0 / 9.0);
        e(half.get(1, 0, 0), (2.0 + 5.0) / 2.0 / 9.0);
        e(half.get(0, 1, 0), (6.0 + 7.0) / 2.0 / 9.0);
        // Corner output = mean of exactly one pixel.
        e(half.get(1, 1, 0), 8.0 / 9.0);
    }

    #[test]
    fn flip_horizontal_involution() {
        let img = ramp(5, 3);
        assert_eq!(img.flip_horizontal().flip_horizontal(), img);
        assert_eq!(img.flip_horizontal().get(0, 0, 0), img.get(4, 0, 0));
    }

    #[test]
    fn tile_small_image_is_single_tile() {
        let img = ramp(30, 20);
        let pair = ImagePair::new(img.clone(), img).unwrap();
        let tiles = tile_pair(&pair, 64, 64, 8).unwrap();
        assert_eq!(tiles.len(), 1);
        assert_eq!(tiles[0].origin, (0, 0));
        assert_eq!(tiles[0].pair.width(), 30);
    }

    #[test]
    fn tile_cover_positions() {
        // 100 wide, tile 60, overlap 20 -> columns 0 and 40.
        let img = ramp(100, 10);
        let pair = ImagePair::new(img.clone(), img).unwrap();
        let tiles = tile_pair(&pair, 60, 60, 20).unwrap();
        let cols: Vec<usize> = tiles.iter().map(|t| t.origin.1).collect();
        assert_eq!(cols, vec![0, 40]);
    }

    #[test]
    fn tiles_cover_every_pixel() {
        let img = ramp(97, 41);
        let pair = ImagePair::new(img.clone(), img).unwrap();
        let tiles = tile_pair(&pair, 30, 30, 10).unwrap();
        let mut covered = vec![false; 97 * 41];
        for t in &tiles {
            for y in 0..t.pair.height() {
                for x in 0..t.pair.width() {
                    covered[(t.origin.0 + y) * 97 + t.origin.1 + x] = true;
                }
            }
        }
        assert!(covered.iter().all(|&c| c));
    }

    #[test]
    fn tile_too_small_rejected() {
        let img = ramp(100, 100);
        let pair = ImagePair::new(img.clone(), img).unwrap();
        assert!(tile_pair(&pair, 16, 16, 8).is_err());
    }

    #[test]
    fn stitch_prefers_nearest_center() {
        // Two 4-wide tiles overlapping on cols 2..4 of a 6-wide map.
        let mut a = DisparityMap::invalid(4, 1);
        let mut b = DisparityMap::invalid(4, 1);
        for x in 0..4 {
            a.set(x, 0, 1.0);
            b.set(x, 0, 2.0);
        }
        let parts = vec![((0, 0), a), ((0, 2), b)];
        let out = stitch_tiles(&parts, 6, 1).unwrap();
        assert_eq!(out.get(0, 0), 1.0);
        assert_eq!(out.get(2, 0), 1.0); // nearer to tile a's center
        assert_eq!(out.get(3, 0), 2.0); // nearer to tile b's center
        assert_eq!(out.get(5, 0), 2.0);
    }
}

//! Raster canvases, PNG decoding and the HSV hue-area histogram.

use std::io::Cursor;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];

#[derive(Debug, Error)]
pub enum CanvasError {
    #[error("not a PNG image")]
    UnsupportedFormat,
    #[error("malformed PNG: {0}")]
    Decode(String),
    #[error("invalid raster: {0}")]
    Invalid(String),
    #[error("PNG encoding failed: {0}")]
    Encode(String),
}

pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];

/// Row-major 8-bit RGB image.
#[derive(Clone, PartialEq, Eq)]
pub struct Raster {
    width: u32,
    height: u32,
    pixels: Vec<Rgb>,
}

impl std::fmt::Debug for Raster {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Raster({}x{})", self.width, self.height)
    }
}

impl Raster {
    pub fn filled(width: u32, height: u32, color: Rgb) -> Self {
        assert!(width >= 1 && height >= 1, "raster dimensions must be positive");
        Self {
            width,
            height,
            pixels: vec![color; (width * height) as usize],
        }
    }

    pub fn blank(width: u32, height: u32) -> Self {
        Self::filled(width, height, WHITE)
    }

    pub fn from_pixels(width: u32, height: u32, pixels: Vec<Rgb>) -> Result<Self, CanvasError> {
        if width == 0 || height == 0 {
            return Err(CanvasError::Invalid("zero dimension".into()));
        }
        if pixels.len() != (width as usize) * (height as usize) {
            return Err(CanvasError::Invalid(format!(
                "{} pixels for a {width}x{height} raster",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [Rgb] {
        &mut self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> Rgb {
        self.pixels[(y * self.width + x) as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, color: Rgb) {
        self.pixels[(y * self.width + x) as usize] = color;
    }

    /// Copy of the rectangle `[x, x+w) x [y, y+h)`, clipped to the raster.
    pub fn crop(&self, region: Region) -> Raster {
        let region = region.clip(self.width, self.height);
        let mut pixels = Vec::with_capacity((region.width * region.height) as usize);
        for y in region.y..region.y + region.height {
            for x in region.x..region.x + region.width {
                pixels.push(self.get(x, y));
            }
        }
        Raster {
            width: region.width.max(1),
            height: region.height.max(1),
            pixels: if pixels.is_empty() { vec![WHITE] } else { pixels },
        }
    }

    /// Writes `other` with its top-left corner at `(x, y)`, clipping at the edges.
    pub fn paste(&mut self, other: &Raster, x: u32, y: u32) {
        for oy in 0..other.height {
            for ox in 0..other.width {
                let (tx, ty) = (x + ox, y + oy);
                if tx < self.width && ty < self.height {
                    self.set(tx, ty, other.get(ox, oy));
                }
            }
        }
    }

    /// Encodes as an 8-bit RGB PNG.
    pub fn to_png(&self) -> Result<Vec<u8>, CanvasError> {
        let mut out = Vec::new();
        {
            let mut encoder = png::Encoder::new(&mut out, self.width, self.height);
            encoder.set_color(png::ColorType::Rgb);
            encoder.set_depth(png::BitDepth::Eight);
            let mut writer = encoder
                .write_header()
                .map_err(|e| CanvasError::Encode(e.to_string()))?;
            let data: Vec<u8> = self.pixels.iter().flatten().copied().collect();
            writer
                .write_image_data(&data)
                .map_err(|e| CanvasError::Encode(e.to_string()))?;
        }
        Ok(out)
    }
}

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
}

impl Region {
    /// The right half of a `width x height` canvas.
    pub fn right_half(width: u32, height: u32) -> Self {
        let left = width / 2;
        Self {
            x: left,
            y: 0,
            width: (width - left).max(1),
            height,
        }
    }

    pub fn clip(&self, width: u32, height: u32) -> Region {
        let x = self.x.min(width);
        let y = self.y.min(height);
        Region {
            x,
            y,
            width: self.width.min(width - x),
            height: self.height.min(height - y),
        }
    }
}

/// Decodes a PNG, compositing any alpha channel over white.
pub fn load_canvas(bytes: &[u8]) -> Result<Raster, CanvasError> {
    if bytes.len() < PNG_SIGNATURE.len() || bytes[..8] != PNG_SIGNATURE {
        return Err(CanvasError::UnsupportedFormat);
    }
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = decoder
        .read_info()
        .map_err(|e| CanvasError::Decode(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| CanvasError::Decode("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| CanvasError::Decode(e.to_string()))?;
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Indexed => {
            return Err(CanvasError::Decode("palette was not expanded".into()))
        }
    };
    let (w, h) = (info.width as usize, info.height as usize);
    let mut pixels = Vec::with_capacity(w * h);
    for row in 0..h {
        let line = &buf[row * info.line_size..row * info.line_size + w * channels];
        for px in line.chunks_exact(channels) {
            let (rgb, alpha) = match channels {
                1 => ([px[0]; 3], 255),
                2 => ([px[0]; 3], px[1]),
                3 => ([px[0], px[1], px[2]], 255),
                _ => ([px[0], px[1], px[2]], px[3]),
            };
            pixels.push(over_white(rgb, alpha));
        }
    }
    Raster::from_pixels(info.width, info.height, pixels)
}

fn over_white(rgb: Rgb, alpha: u8) -> Rgb {
    if alpha == 255 {
        return rgb;
    }
    let a = alpha as u32;
    rgb.map(|c| ((c as u32 * a + 255 * (255 - a) + 127) / 255) as u8)
}

/// HSV with hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
pub fn rgb_to_hsv(rgb: Rgb) -> (f64, f64, f64) {
    let [r, g, b] = rgb.map(|c| c as f64 / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let value = max;
    let saturation = if max > 0.0 { delta / max } else { 0.0 };
    let hue = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    (hue.rem_euclid(360.0), saturation, value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HueBin {
    Red,
    Orange,
    Yellow,
    Green,
    Blue,
    Purple,
    White,
    Black,
    Gray,
}

impl HueBin {
    pub const ALL: [HueBin; 9] = [
        HueBin::Red,
        HueBin::Orange,
        HueBin::Yellow,
        HueBin::Green,
        HueBin::Blue,
        HueBin::Purple,
        HueBin::White,
        HueBin::Black,
        HueBin::Gray,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

/// Achromatic tests run before hue binning.
pub fn classify_pixel(rgb: Rgb) -> HueBin {
    let (hue, saturation, value) = rgb_to_hsv(rgb);
    if value < 0.15 {
        return HueBin::Black;
    }
    if saturation < 0.20 {
        return if value > 0.85 { HueBin::White } else { HueBin::Gray };
    }
    match hue {
        h if !(15.0..345.0).contains(&h) => HueBin::Red,
        h if h < 45.0 => HueBin::Orange,
        h if h < 75.0 => HueBin::Yellow,
        h if h < 165.0 => HueBin::Green,
        h if h < 255.0 => HueBin::Blue,
        _ => HueBin::Purple,
    }
}

/// Area fraction of each hue bin plus the mean HSV value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HueAreas {
    pub red: f64,
    pub orange: f64,
    pub yellow: f64,
    pub green: f64,
    pub blue: f64,
    pub purple: f64,
    pub white: f64,
    pub black: f64,
    pub gray: f64,
    pub mean_value: f64,
}

impl HueAreas {
    pub fn from_fractions(fractions: [f64; 9], mean_value: f64) -> Self {
        let [red, orange, yellow, green, blue, purple, white, black, gray] = fractions;
        Self {
            red,
            orange,
            yellow,
            green,
            blue,
            purple,
            white,
            black,
            gray,
            mean_value,
        }
    }

    pub fn fractions(&self) -> [f64; 9] {
        [
            self.red,
            self.orange,
            self.yellow,
            self.green,
            self.blue,
            self.purple,
            self.white,
            self.black,
            self.gray,
        ]
    }

    pub fn fraction(&self, bin: HueBin) -> f64 {
        self.fractions()[bin.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (HueBin, f64)> {
        HueBin::ALL.into_iter().zip(self.fractions())
    }
}

pub fn hue_histogram(raster: &Raster) -> HueAreas {
    let mut counts = [0u64; 9];
    let mut value_sum = 0.0;
    for &px in raster.pixels() {
        counts[classify_pixel(px).index()] += 1;
        value_sum += px.iter().copied().max().unwrap_or(0) as f64 / 255.0;
    }
    let total = raster.pixels().len() as f64;
    HueAreas::from_fractions(counts.map(|c| c as f64 / total), value_sum / total)
}

//! Vector compositions for the robot's response, their rasterization and a
//! budgeted greedy stroke planner.

mod assets;
mod compose;
mod raster;
mod strokes;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canvas::Rgb;

pub use assets::AssetLibrary;
pub use compose::{compose_abstract, compose_representational};
pub use raster::{rasterize, segment_contains};
pub use strokes::{apply_stroke, plan_strokes, l2_error, Stroke, StrokePlan, StrokeSet, STROKE_ANGLES};

#[derive(Debug, Error, PartialEq)]
pub enum SketchError {
    #[error("no asset for symbol `{0}`")]
    MissingAsset(String),
    #[error("dimension mismatch: target {target:?}, current {current:?}")]
    DimensionMismatch { target: (u32, u32), current: (u32, u32) },
    #[error("invalid asset library: {0}")]
    InvalidAssets(String),
    #[error("invalid stroke set: {0}")]
    InvalidStrokeSet(String),
}

/// `#rrggbb` encoding for colours in JSON.
pub mod hex_color {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::canvas::Rgb;

    pub fn format(c: Rgb) -> String {
        format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
    }

    pub fn parse(s: &str) -> Option<Rgb> {
        let hex = s.strip_prefix('#')?;
        if hex.len() != 6 || !hex.is_ascii() {
            return None;
        }
        let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).ok();
        Some([byte(0)?, byte(2)?, byte(4)?])
    }

    pub fn serialize<S: Serializer>(c: &Rgb, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(*c))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rgb, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad colour `{s}`")))
    }
}

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Primitive {
    Disc {
        center: Point,
        radius: f64,
        #[serde(with = "hex_color")]
        color: Rgb,
    },
    Triangle {
        points: [Point; 3],
        #[serde(with = "hex_color")]
        color: Rgb,
    },
    Rect {
        x: f64,
        y: f64,
        width: f64,
        height: f64,
        #[serde(with = "hex_color")]
        color: Rgb,
    },
    Segment {
        from: Point,
        to: Point,
        thickness: f64,
        #[serde(with = "hex_color")]
        color: Rgb,
    },
}

impl Primitive {
    pub fn color(&self) -> Rgb {
        match *self {
            Primitive::Disc { color, .. }
            | Primitive::Triangle { color, .. }
            | Primitive::Rect { color, .. }
            | Primitive::Segment { color, .. } => color,
        }
    }

    /// Defining points (centre, corners or endpoints).
    pub fn anchor_points(&self) -> Vec<Point> {
        match *self {
            Primitive::Disc { center, .. } => vec![center],
            Primitive::Triangle { points, .. } => points.to_vec(),
            Primitive::Rect { x, y, width, height, .. } => vec![[x, y], [x + width, y + height]],
            Primitive::Segment { from, to, .. } => vec![from, to],
        }
    }

    /// Maps every coordinate through `p -> p * scale + offset`.
    pub fn transformed(&self, scale: f64, offset: Point) -> Primitive {
        let t = |p: Point| [p[0] * scale + offset[0], p[1] * scale + offset[1]];
        match *self {
            Primitive::Disc { center, radius, color } => Primitive::Disc {
                center: t(center),
                radius: radius * scale,
                color,
            },
            Primitive::Triangle { points, color } => Primitive::Triangle {
                points: points.map(t),
                color,
            },
            Primitive::Rect { x, y, width, height, color } => {
                let [x, y] = t([x, y]);
                Primitive::Rect {
                    x,
                    y,
                    width: width * scale,
                    height: height * scale,
                    color,
                }
            }
            Primitive::Segment { from, to, thickness, color } => Primitive::Segment {
                from: t(from),
                to: t(to),
                thickness: thickness * scale,
                color,
            },
        }
    }

    fn svg(&self, out: &mut String) {
        let c = hex_color::format(self.color());
        let _ = match *self {
            Primitive::Disc { center, radius, .. } => writeln!(
                out,
                r#"  <circle cx="{}" cy="{}" r="{}" fill="{c}"/>"#,
                center[0], center[1], radius
            ),
            Primitive::Triangle { points, .. } => writeln!(
                out,
                r#"  <polygon points="{},{} {},{} {},{}" fill="{c}"/>"#,
                points[0][0], points[0][1], points[1][0], points[1][1], points[2][0], points[2][1]
            ),
            Primitive::Rect { x, y, width, height, .. } => writeln!(
                out,
                r#"  <rect x="{x}" y="{y}" width="{width}" height="{height}" fill="{c}"/>"#
            ),
            Primitive::Segment { from, to, thickness, .. } => writeln!(
                out,
                r#"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{c}" stroke-width="{thickness}"/>"#,
                from[0], from[1], to[0], to[1]
            ),
        };
    }
}

/// Ordered primitives drawn in painter's order on a white canvas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorComposition {
    pub width: u32,
    pub height: u32,
    pub primitives: Vec<Primitive>,
}

impl VectorComposition {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            primitives: Vec::new(),
        }
    }

    /// True when every defining point lies inside the canvas.
    pub fn within_bounds(&self) -> bool {
        let (w, h) = (self.width as f64, self.height as f64);
        self.primitives.iter().all(|p| {
            p.anchor_points()
                .iter()
                .all(|q| (0.0..=w).contains(&q[0]) && (0.0..=h).contains(&q[1]))
        })
    }

    pub fn palette(&self) -> Vec<Rgb> {
        let mut colors: Vec<Rgb> = Vec::new();
        for p in &self.primitives {
            if !colors.contains(&p.color()) {
                colors.push(p.color());
            }
        }
        colors
    }

    pub fn to_svg(&self) -> String {
        let mut out = format!(
            r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">
  <rect width="{w}" height="{h}" fill="#ffffff"/>
"##,
            w = self.width,
            h = self.height
        );
        for p in &self.primitives {
            p.svg(&mut out);
        }
        out.push_str("</svg>\n");
        out
    }
}

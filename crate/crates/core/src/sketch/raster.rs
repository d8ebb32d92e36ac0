use crate::canvas::{Raster, Rgb, WHITE};

use super::{Point, Primitive, VectorComposition};

/// Whether `(x, y)` lies within `half` of the segment `a`-`b`.
pub fn segment_contains(a: Point, b: Point, half: f64, x: f64, y: f64) -> bool {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((x - a[0]) * dx + (y - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    let (px, py) = (a[0] + t * dx - x, a[1] + t * dy - y);
    px * px + py * py <= half * half
}

fn triangle_contains(p: &[Point; 3], x: f64, y: f64) -> bool {
    let edge = |a: Point, b: Point| (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]);
    let d = [edge(p[0], p[1]), edge(p[1], p[2]), edge(p[2], p[0])];
    let neg = d.iter().any(|v| *v < 0.0);
    let pos = d.iter().any(|v| *v > 0.0);
    !(neg && pos)
}

impl Primitive {
    /// Inside test in canvas coordinates.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Primitive::Disc { center, radius, .. } => {
                let (dx, dy) = (x - center[0], y - center[1]);
                dx * dx + dy * dy <= radius * radius
            }
            Primitive::Triangle { points, .. } => triangle_contains(points, x, y),
            Primitive::Rect { x: rx, y: ry, width, height, .. } => {
                x >= *rx && x < rx + width && y >= *ry && y < ry + height
            }
            Primitive::Segment { from, to, thickness, .. } => segment_contains(*from, *to, thickness / 2.0, x, y),
        }
    }

    /// Axis-aligned bounds `(min_x, min_y, max_x, max_y)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        match self {
            Primitive::Disc { center, radius, .. } => {
                (center[0] - radius, center[1] - radius, center[0] + radius, center[1] + radius)
            }
            Primitive::Triangle { points, .. } => {
                let xs = points.map(|p| p[0]);
                let ys = points.map(|p| p[1]);
                (
                    xs.iter().copied().fold(f64::INFINITY, f64::min),
                    ys.iter().copied().fold(f64::INFINITY, f64::min),
                    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                )
            }
            Primitive::Rect { x, y, width, height, .. } => (*x, *y, x + width, y + height),
            Primitive::Segment { from, to, thickness, .. } => {
                let h = thickness / 2.0;
                (
                    from[0].min(to[0]) - h,
                    from[1].min(to[1]) - h,
                    from[0].max(to[0]) + h,
                    from[1].max(to[1]) + h,
                )
            }
        }
    }
}

/// Renders in painter's order onto white with `supersample`² samples per
/// pixel, then box-filters down with rounding to the nearest integer.
pub fn rasterize(comp: &VectorComposition, supersample: u32) -> Raster {
    let s = supersample.max(1);
    let (w, h) = (comp.width, comp.height);
    let (sw, sh) = (w * s, h * s);
    let mut samples: Vec<Rgb> = vec![WHITE; (sw * sh) as usize];
    let step = 1.0 / s as f64;
    for prim in &comp.primitives {
        let (x0, y0, x1, y1) = prim.bounds();
        let clamp = |v: f64, max: u32| (v * s as f64).floor().clamp(0.0, max as f64) as u32;
        let (sx0, sx1) = (clamp(x0, sw), (clamp(x1, sw) + 1).min(sw));
        let (sy0, sy1) = (clamp(y0, sh), (clamp(y1, sh) + 1).min(sh));
        let color = prim.color();
        for sy in sy0..sy1 {
            let y = (sy / s) as f64 + ((sy % s) as f64 + 0.5) * step;
            for sx in sx0..sx1 {
                let x = (sx / s) as f64 + ((sx % s) as f64 + 0.5) * step;
                if prim.contains(x, y) {
                    samples[(sy * sw + sx) as usize] = color;
                }
            }
        }
    }
    let n = s * s;
    let mut pixels = Vec::with_capacity((w * h) as usize);
    for py in 0..h {
        for px in 0..w {
            let mut sum = [0u32; 3];
            for dy in 0..s {
                for dx in 0..s {
                    let c = samples[((py * s + dy) * sw + px * s + dx) as usize];
                    for ch in 0..3 {
                        sum[ch] += c[ch] as u32;
                    }
                }
            }
            pixels.push(sum.map(|v| ((v + n / 2) / n) as u8));
        }
    }
    Raster::from_pixels(w, h, pixels).expect("dimensions match")
}

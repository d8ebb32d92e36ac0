//! Greedy stroke planning: repeatedly add the candidate stroke that removes
//! the most squared error between the current canvas and the target.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::canvas::{Raster, Rgb};

use super::{hex_color, segment_contains, Point, SketchError};

/// Candidate stroke directions in degrees (image y axis points down).
pub const STROKE_ANGLES: [u32; 4] = [0, 45, 90, 135];
/// Supersampling factor of stroke coverage; must match the rasterizer's default.
const SAMPLES: u32 = 2;
const COVERAGE_LEVELS: usize = (SAMPLES * SAMPLES) as usize;
/// Minimum L2 improvement per stroke, relative to the initial error.
const EPSILON_FRACTION: f64 = 0.005;

fn unit_vector(angle: u32) -> (f64, f64) {
    match angle {
        0 => (1.0, 0.0),
        45 => (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        90 => (0.0, 1.0),
        135 => (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        other => {
            let (s, c) = (other as f64).to_radians().sin_cos();
            (c, s)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stroke {
    pub points: Vec<Point>,
    pub thickness: f64,
    #[serde(with = "hex_color")]
    pub color: Rgb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StrokePlan {
    pub budget: usize,
    pub residual_error: f64,
    pub strokes: Vec<Stroke>,
}

impl StrokePlan {
    /// Shifts every stroke, e.g. from region to canvas coordinates.
    pub fn translate(&mut self, dx: f64, dy: f64) {
        for stroke in &mut self.strokes {
            for p in &mut stroke.points {
                p[0] += dx;
                p[1] += dy;
            }
        }
    }

    pub fn to_svg(&self, width: u32, height: u32) -> String {
        let mut out = format!(
            r##"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">
  <rect width="{width}" height="{height}" fill="#ffffff"/>
"##
        );
        for s in &self.strokes {
            let pts: Vec<String> = s.points.iter().map(|p| format!("{},{}", p[0], p[1])).collect();
            let _ = writeln!(
                out,
                r#"  <polyline points="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
                pts.join(" "),
                hex_color::format(s.color),
                s.thickness
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// The finite family of strokes the planner may choose from: straight
/// segments centred on a grid, at every angle, thickness and length, in every
/// palette colour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StrokeSet {
    #[serde(with = "palette_hex")]
    pub palette: Vec<Rgb>,
    pub grid_step: u32,
    pub thicknesses: Vec<f64>,
    pub lengths: Vec<f64>,
}

mod palette_hex {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::canvas::Rgb;

    pub fn serialize<S: Serializer>(p: &[Rgb], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(p.iter().map(|c| super::hex_color::format(*c)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rgb>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| super::hex_color::parse(s).ok_or_else(|| serde::de::Error::custom(format!("bad colour `{s}`"))))
            .collect()
    }
}

impl StrokeSet {
    /// Default family for a canvas: a 4 px grid, thicknesses scaled from
    /// 1/2/4 px at 32 px, and lengths of 1/8, 1/4 and 1/2 of the shorter side.
    pub fn for_canvas(width: u32, height: u32, palette: Vec<Rgb>) -> Self {
        let m = width.min(height).max(1) as f64;
        let scale = (m / 32.0).floor().max(1.0);
        Self {
            palette,
            grid_step: 4,
            thicknesses: vec![scale, 2.0 * scale, 4.0 * scale],
            lengths: vec![(m / 8.0).max(1.0), (m / 4.0).max(1.0), (m / 2.0).max(1.0)],
        }
    }

    fn validate(&self) -> Result<(), SketchError> {
        let bad = |m: &str| Err(SketchError::InvalidStrokeSet(m.to_string()));
        if self.grid_step == 0 {
            return bad("grid step must be positive");
        }
        if self.thicknesses.iter().chain(&self.lengths).any(|v| !(v.is_finite() && *v > 0.0)) {
            return bad("thicknesses and lengths must be positive");
        }
        Ok(())
    }

    /// Stroke shapes relative to a grid cell at the origin, in enumeration order.
    fn shapes(&self) -> Vec<(u32, f64, f64)> {
        let mut out = Vec::new();
        for &angle in &STROKE_ANGLES {
            for &thickness in &self.thicknesses {
                for &length in &self.lengths {
                    out.push((angle, thickness, length));
                }
            }
        }
        out
    }

    fn grid_dims(&self, width: u32, height: u32) -> (u32, u32) {
        (width.div_ceil(self.grid_step), height.div_ceil(self.grid_step))
    }

    fn stroke_at(&self, gx: u32, gy: u32, shape: (u32, f64, f64), color: Rgb) -> Stroke {
        let (from, to) = self.endpoints(shape);
        let origin = [(gx * self.grid_step) as f64, (gy * self.grid_step) as f64];
        Stroke {
            points: vec![
                [from[0] + origin[0], from[1] + origin[1]],
                [to[0] + origin[0], to[1] + origin[1]],
            ],
            thickness: shape.1,
            color,
        }
    }

    fn endpoints(&self, (angle, _, length): (u32, f64, f64)) -> (Point, Point) {
        let c = self.grid_step as f64 / 2.0;
        let (ux, uy) = unit_vector(angle);
        let h = length / 2.0;
        ([c - h * ux, c - h * uy], [c + h * ux, c + h * uy])
    }

    /// Every candidate stroke of this set on a canvas, in the planner's
    /// tie-breaking order.
    pub fn candidates(&self, width: u32, height: u32) -> Vec<Stroke> {
        let (gw, gh) = self.grid_dims(width, height);
        let shapes = self.shapes();
        let mut out = Vec::new();
        for gy in 0..gh {
            for gx in 0..gw {
                for &shape in &shapes {
                    for &color in &self.palette {
                        out.push(self.stroke_at(gx, gy, shape, color));
                    }
                }
            }
        }
        out
    }
}

/// Pixels touched by a segment with their supersample coverage `1..=4`,
/// sampled at the same positions as [`super::rasterize`].
fn coverage(from: Point, to: Point, thickness: f64, clip: Option<(u32, u32)>) -> Vec<(i64, i64, u8)> {
    let half = thickness / 2.0;
    let x0 = (from[0].min(to[0]) - half).floor() as i64 - 1;
    let x1 = (from[0].max(to[0]) + half).ceil() as i64 + 1;
    let y0 = (from[1].min(to[1]) - half).floor() as i64 - 1;
    let y1 = (from[1].max(to[1]) + half).ceil() as i64 + 1;
    let step = 1.0 / SAMPLES as f64;
    let mut out = Vec::new();
    for py in y0..=y1 {
        for px in x0..=x1 {
            if let Some((w, h)) = clip {
                if px < 0 || py < 0 || px >= w as i64 || py >= h as i64 {
                    continue;
                }
            }
            let mut k = 0u8;
            for dy in 0..SAMPLES {
                let y = py as f64 + (dy as f64 + 0.5) * step;
                for dx in 0..SAMPLES {
                    let x = px as f64 + (dx as f64 + 0.5) * step;
                    if segment_contains(from, to, half, x, y) {
                        k += 1;
                    }
                }
            }
            if k > 0 {
                out.push((px, py, k));
            }
        }
    }
    out
}

fn blend(cur: Rgb, color: Rgb, k: u8) -> Rgb {
    let k = k as u32;
    let n = COVERAGE_LEVELS as u32;
    std::array::from_fn(|ch| ((cur[ch] as u32 * (n - k) + color[ch] as u32 * k + n / 2) / n) as u8)
}

fn pixel_error(a: Rgb, b: Rgb) -> i64 {
    (0..3).map(|ch| (a[ch] as i64 - b[ch] as i64).pow(2)).sum()
}

fn squared_error(a: &Raster, b: &Raster) -> i64 {
    a.pixels().iter().zip(b.pixels()).map(|(x, y)| pixel_error(*x, *y)).sum()
}

/// L2 distance over all channels of all pixels.
pub fn l2_error(a: &Raster, b: &Raster) -> f64 {
    (squared_error(a, b) as f64).sqrt()
}

/// Paints a straight stroke as a 2x2 supersampled segment, blending partial
/// coverage exactly like the rasterizer does over a single layer.
pub fn apply_stroke(raster: &mut Raster, stroke: &Stroke) {
    let (w, h) = (raster.width(), raster.height());
    for pair in stroke.points.windows(2) {
        for (px, py, k) in coverage(pair[0], pair[1], stroke.thickness, Some((w, h))) {
            let (x, y) = (px as u32, py as u32);
            raster.set(x, y, blend(raster.get(x, y), stroke.color, k));
        }
    }
}

struct Stamp {
    dx: i64,
    dy: i64,
    k: u8,
    shape: u32,
}

/// Greedy visual-feedback loop. Each step applies the candidate with the
/// largest error reduction (ties go to the earliest candidate) and stops when
/// the budget is spent or the best L2 reduction falls below 0.5% of the
/// initial error.
pub fn plan_strokes(target: &Raster, current: &Raster, budget: usize, set: &StrokeSet) -> Result<StrokePlan, SketchError> {
    let dims = |r: &Raster| (r.width(), r.height());
    if dims(target) != dims(current) {
        return Err(SketchError::DimensionMismatch {
            target: dims(target),
            current: dims(current),
        });
    }
    set.validate()?;
    let (w, h) = dims(target);
    let mut canvas = current.clone();
    let mut error = squared_error(target, &canvas);
    let initial = (error as f64).sqrt();
    let mut plan = StrokePlan {
        budget,
        residual_error: initial,
        strokes: Vec::new(),
    };
    if budget == 0 || error == 0 || set.palette.is_empty() || w == 0 || h == 0 {
        return Ok(plan);
    }
    let epsilon = EPSILON_FRACTION * initial;

    let step = set.grid_step as i64;
    let shapes = set.shapes();
    let (gw, gh) = set.grid_dims(w, h);
    let n_colors = set.palette.len();
    let n_shapes = shapes.len();

    // Stamp entries bucketed by the residue of their offset modulo the grid,
    // so a pixel only visits entries whose anchor lands on a grid point.
    let mut buckets: Vec<Vec<Stamp>> = (0..(step * step)).map(|_| Vec::new()).collect();
    for (s, &shape) in shapes.iter().enumerate() {
        let (from, to) = set.endpoints(shape);
        for (dx, dy, k) in coverage(from, to, shape.1, None) {
            let r = (dy.rem_euclid(step) * step + dx.rem_euclid(step)) as usize;
            buckets[r].push(Stamp {
                dx,
                dy,
                k,
                shape: s as u32,
            });
        }
    }

    let n_candidates = gw as usize * gh as usize * n_shapes;
    let mut gains = vec![0i64; n_candidates * n_colors];
    let pixel_gains = |t: Rgb, c: Rgb| -> Vec<i64> {
        let base = pixel_error(t, c);
        let mut g = Vec::with_capacity(n_colors * COVERAGE_LEVELS);
        for &color in &set.palette {
            for k in 1..=COVERAGE_LEVELS as u8 {
                g.push(base - pixel_error(t, blend(c, color, k)));
            }
        }
        g
    };
    let add_pixel = |gains: &mut [i64], px: i64, py: i64, delta: &[i64]| {
        let r = (py.rem_euclid(step) * step + px.rem_euclid(step)) as usize;
        for e in &buckets[r] {
            let (ax, ay) = (px - e.dx, py - e.dy);
            if ax < 0 || ay < 0 {
                continue;
            }
            let (gx, gy) = (ax / step, ay / step);
            if gx >= gw as i64 || gy >= gh as i64 {
                continue;
            }
            let cand = ((gy as usize * gw as usize + gx as usize) * n_shapes + e.shape as usize) * n_colors;
            let level = e.k as usize - 1;
            for c in 0..n_colors {
                gains[cand + c] += delta[c * COVERAGE_LEVELS + level];
            }
        }
    };

    for py in 0..h {
        for px in 0..w {
            let g = pixel_gains(target.get(px, py), canvas.get(px, py));
            add_pixel(&mut gains, px as i64, py as i64, &g);
        }
    }

    while plan.strokes.len() < budget {
        let mut best = 0usize;
        for (i, g) in gains.iter().enumerate() {
            if *g > gains[best] {
                best = i;
            }
        }
        if gains[best] <= 0 {
            break;
        }
        let color = best % n_colors;
        let cand = best / n_colors;
        let shape = cand % n_shapes;
        let cell = cand / n_shapes;
        let (gx, gy) = ((cell % gw as usize) as u32, (cell / gw as usize) as u32);
        let stroke = set.stroke_at(gx, gy, shapes[shape], set.palette[color]);

        let mut next = canvas.clone();
        apply_stroke(&mut next, &stroke);
        let next_error = squared_error(target, &next);
        let reduction = (error as f64).sqrt() - (next_error as f64).sqrt();
        if next_error >= error || reduction < epsilon {
            break;
        }
        for (px, py, _) in coverage(stroke.points[0], stroke.points[1], stroke.thickness, Some((w, h))) {
            let (x, y) = (px as u32, py as u32);
            let (old, new) = (canvas.get(x, y), next.get(x, y));
            if old == new {
                continue;
            }
            let t = target.get(x, y);
            let before = pixel_gains(t, old);
            let after = pixel_gains(t, new);
            let delta: Vec<i64> = after.iter().zip(&before).map(|(a, b)| a - b).collect();
            add_pixel(&mut gains, px, py, &delta);
        }
        canvas = next;
        error = next_error;
        plan.residual_error = (error as f64).sqrt();
        plan.strokes.push(stroke);
    }
    Ok(plan)
}

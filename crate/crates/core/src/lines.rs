//! Straight-line detection with a standard (rho, theta) Hough transform over
//! a Sobel edge map, and orientation statistics of the detected lines.

use serde::{Deserialize, Serialize};

use crate::canvas::Raster;

/// Normalized Sobel magnitude above which a pixel is an edge.
pub const EDGE_THRESHOLD: f64 = 0.25;
/// Accumulator peaks need at least this fraction of `max(width, height)` votes.
pub const PEAK_FRACTION: f64 = 0.3;
/// Half-width of the non-maximum suppression window (5x5).
pub const SUPPRESSION_RADIUS: i64 = 2;
/// An edge pixel votes only for normal angles within this many degrees of
/// its gradient direction.
pub const GRADIENT_WINDOW_DEG: i64 = 10;
/// Tolerance around the horizontal and vertical directions, in degrees.
pub const AXIS_TOLERANCE_DEG: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
    Diagonal,
}

/// Classifies a line by its direction angle in degrees (0 = horizontal,
/// 90 = vertical, image y axis pointing down).
pub fn classify_direction(direction_deg: f64) -> Orientation {
    let d = direction_deg.rem_euclid(180.0);
    if (d - 90.0).abs() <= AXIS_TOLERANCE_DEG {
        Orientation::Vertical
    } else if d <= AXIS_TOLERANCE_DEG || d >= 180.0 - AXIS_TOLERANCE_DEG {
        Orientation::Horizontal
    } else {
        Orientation::Diagonal
    }
}

/// A detected line in Hough normal form: `rho = x cos(theta) + y sin(theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarLine {
    pub rho: f64,
    /// Normal angle in whole degrees, `[0, 180)`.
    pub theta_deg: u32,
    pub votes: u32,
}

impl PolarLine {
    pub fn direction_deg(&self) -> f64 {
        (self.theta_deg as f64 + 90.0).rem_euclid(180.0)
    }

    pub fn orientation(&self) -> Orientation {
        classify_direction(self.direction_deg())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LineStats {
    pub horizontal: u32,
    pub vertical: u32,
    pub diagonal: u32,
    pub diagonal_fraction: f64,
}

impl LineStats {
    pub fn from_counts(horizontal: u32, vertical: u32, diagonal: u32) -> Self {
        let total = horizontal + vertical + diagonal;
        Self {
            horizontal,
            vertical,
            diagonal,
            diagonal_fraction: diagonal as f64 / total.max(1) as f64,
        }
    }

    pub fn total(&self) -> u32 {
        self.horizontal + self.vertical + self.diagonal
    }
}

/// Edge map from the normalized Sobel gradient magnitude of luminance. Each
/// edge pixel carries its gradient angle in degrees, `[0, 180)`.
pub fn edge_map(raster: &Raster) -> Vec<Option<f64>> {
    let (w, h) = (raster.width() as i64, raster.height() as i64);
    let luma: Vec<f64> = raster
        .pixels()
        .iter()
        .map(|p| (0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64) / 255.0)
        .collect();
    let at = |x: i64, y: i64| luma[(y.clamp(0, h - 1) * w + x.clamp(0, w - 1)) as usize];
    // largest magnitude reachable on [0,1] input
    let norm = 4.0 * std::f64::consts::SQRT_2;
    let mut edges = vec![None; luma.len()];
    for y in 0..h {
        for x in 0..w {
            let gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            let gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
            if gx.hypot(gy) / norm >= EDGE_THRESHOLD {
                edges[(y * w + x) as usize] = Some(gy.atan2(gx).to_degrees().rem_euclid(180.0));
            }
        }
    }
    edges
}

struct Accumulator {
    rho_max: i64,
    rho_bins: usize,
    votes: Vec<u32>,
}

impl Accumulator {
    fn get(&self, theta: i64, rho: i64) -> u32 {
        // theta wraps around with a sign flip of rho
        let (theta, rho) = if theta < 0 {
            (theta + 180, -rho)
        } else if theta >= 180 {
            (theta - 180, -rho)
        } else {
            (theta, rho)
        };
        let r = rho + self.rho_max;
        if r < 0 || r as usize >= self.rho_bins {
            return 0;
        }
        self.votes[theta as usize * self.rho_bins + r as usize]
    }

    fn canonical_index(&self, theta: i64, rho: i64) -> i64 {
        let (theta, rho) = if theta < 0 {
            (theta + 180, -rho)
        } else if theta >= 180 {
            (theta - 180, -rho)
        } else {
            (theta, rho)
        };
        theta * self.rho_bins as i64 + rho + self.rho_max
    }
}

/// Runs the Hough transform and returns the suppressed accumulator peaks.
pub fn hough_lines(raster: &Raster) -> Vec<PolarLine> {
    let (w, h) = (raster.width() as i64, raster.height() as i64);
    let edges = edge_map(raster);
    let rho_max = ((w * w + h * h) as f64).sqrt().ceil() as i64;
    let rho_bins = (2 * rho_max + 1) as usize;
    let trig: Vec<(f64, f64)> = (0..180)
        .map(|d| (d as f64).to_radians().sin_cos())
        .collect();
    let mut acc = Accumulator {
        rho_max,
        rho_bins,
        votes: vec![0; 180 * rho_bins],
    };
    for y in 0..h {
        for x in 0..w {
            let Some(gradient) = edges[(y * w + x) as usize] else {
                continue;
            };
            let centre = gradient.round() as i64;
            for dt in -GRADIENT_WINDOW_DEG..=GRADIENT_WINDOW_DEG {
                let t = (centre + dt).rem_euclid(180) as usize;
                let (sin, cos) = trig[t];
                let rho = (x as f64 * cos + y as f64 * sin).round() as i64;
                acc.votes[t * rho_bins + (rho + rho_max) as usize] += 1;
            }
        }
    }

    let threshold = PEAK_FRACTION * w.max(h) as f64;
    let mut lines = Vec::new();
    for t in 0..180i64 {
        for r in -rho_max..=rho_max {
            let v = acc.get(t, r);
            if v == 0 || (v as f64) < threshold {
                continue;
            }
            let me = acc.canonical_index(t, r);
            let mut is_peak = true;
            'window: for dt in -SUPPRESSION_RADIUS..=SUPPRESSION_RADIUS {
                for dr in -SUPPRESSION_RADIUS..=SUPPRESSION_RADIUS {
                    if dt == 0 && dr == 0 {
                        continue;
                    }
                    let other = acc.get(t + dt, r + dr);
                    let earlier = acc.canonical_index(t + dt, r + dr) < me;
                    if other > v || (other == v && earlier) {
                        is_peak = false;
                        break 'window;
                    }
                }
            }
            if is_peak {
                lines.push(PolarLine {
                    rho: r as f64,
                    theta_deg: t as u32,
                    votes: v,
                });
            }
        }
    }
    lines
}

pub fn detect_lines(raster: &Raster) -> LineStats {
    let (mut h, mut v, mut d) = (0, 0, 0);
    for line in hough_lines(raster) {
        match line.orientation() {
            Orientation::Horizontal => h += 1,
            Orientation::Vertical => v += 1,
            Orientation::Diagonal => d += 1,
        }
    }
    LineStats::from_counts(h, v, d)
}

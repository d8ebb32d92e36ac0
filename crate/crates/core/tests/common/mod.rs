//! Synthetic canvases shared by the integration suites.
#![allow(dead_code)]

use copaint_core::canvas::{Raster, Rgb};

/// Draws a straight segment of the given thickness centred on `(cx, cy)`,
/// with direction `angle_deg` (0 = horizontal, 90 = vertical, y down).
pub fn draw_segment(
    raster: &mut Raster,
    (cx, cy): (f64, f64),
    angle_deg: f64,
    length: f64,
    thickness: f64,
    color: Rgb,
) {
    let (s, c) = angle_deg.to_radians().sin_cos();
    let (hx, hy) = (c * length / 2.0, s * length / 2.0);
    let (x0, y0, x1, y1) = (cx - hx, cy - hy, cx + hx, cy + hy);
    for y in 0..raster.height() {
        for x in 0..raster.width() {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            let (dx, dy) = (x1 - x0, y1 - y0);
            let t = (((px - x0) * dx + (py - y0) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
            let (qx, qy) = (x0 + t * dx, y0 + t * dy);
            if (px - qx).hypot(py - qy) <= thickness / 2.0 {
                raster.set(x, y, color);
            }
        }
    }
}

/// White `size x size` canvas with one black line through its centre.
pub fn line_canvas(size: u32, angle_deg: f64, thickness: f64) -> Raster {
    let mut r = Raster::blank(size, size);
    let c = size as f64 / 2.0;
    draw_segment(&mut r, (c, c), angle_deg, size as f64 * 0.7, thickness, [0, 0, 0]);
    r
}

/// Rotates a raster 90 degrees clockwise.
pub fn rotate90(r: &Raster) -> Raster {
    let (w, h) = (r.width(), r.height());
    let mut out = Raster::blank(h, w);
    for y in 0..h {
        for x in 0..w {
            out.set(h - 1 - y, x, r.get(x, y));
        }
    }
    out
}

/// Nearest-neighbour upscale by an integer factor.
pub fn upscale(r: &Raster, factor: u32) -> Raster {
    let mut out = Raster::blank(r.width() * factor, r.height() * factor);
    for y in 0..out.height() {
        for x in 0..out.width() {
            out.set(x, y, r.get(x / factor, y / factor));
        }
    }
    out
}

use copaint_core::affect::{Element, VaPoint};
use copaint_core::user_model::{HistoryEntry, LayeredAffect, Profile, Taxonomy};
use rand::Rng;

pub fn random_point<R: Rng>(rng: &mut R) -> VaPoint {
    VaPoint::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

/// Random tree of `nodes` non-root nodes named `n<i>`; each new node hangs
/// under a uniformly chosen existing one.
pub fn random_taxonomy<R: Rng>(rng: &mut R, nodes: usize) -> Taxonomy {
    let mut tax = Taxonomy::new();
    let mut paths = vec![String::new()];
    for i in 0..nodes {
        let parent = &paths[rng.random_range(0..paths.len())];
        let path = if parent.is_empty() {
            format!("n{i}")
        } else {
            format!("{parent}/n{i}")
        };
        paths.push(tax.insert(&path).unwrap());
    }
    for path in &paths[1..] {
        if tax.node(path).unwrap().is_leaf() && rng.random_bool(0.85) {
            tax.set_leaf_affect(path, random_point(rng)).unwrap();
        }
    }
    tax
}

/// Random profile exercising every persisted field.
pub fn random_profile<R: Rng>(rng: &mut R, id: &str, nodes: usize) -> Profile {
    let mut taxonomy = random_taxonomy(rng, nodes);
    let paths: Vec<String> = taxonomy.paths().filter(|p| !p.is_empty()).map(str::to_string).collect();
    for path in &paths {
        if rng.random_bool(0.1) {
            taxonomy.set_explicit(path, Some(LayeredAffect::known(random_point(rng)))).unwrap();
        } else if rng.random_bool(0.05) {
            taxonomy.set_explicit(path, Some(LayeredAffect::stereotype(random_point(rng)))).unwrap();
        }
    }
    let mut profile = Profile::new(id, taxonomy);
    if rng.random_bool(0.5) {
        profile.attributes.insert("ageBand".into(), ["child", "adult", "senior"][rng.random_range(0..3)].into());
    }
    for element in Element::ALL {
        if rng.random_bool(0.2) {
            profile.element_overrides.insert(element, LayeredAffect::known(random_point(rng)));
        }
    }
    if !paths.is_empty() && rng.random_bool(0.3) {
        profile.add_taboo(&paths[rng.random_range(0..paths.len())]).unwrap();
    }
    for seq in 1..=rng.random_range(0..4u64) {
        profile.history.push(HistoryEntry {
            seq,
            event: format!("event {seq}"),
        });
    }
    profile
}

/// Mean of the seeded leaves at or below `path`, by a plain scan.
pub fn brute_force_leaf_mean(profile: &Profile, path: &str) -> Option<VaPoint> {
    let prefix = format!("{path}/");
    let leaves: Vec<VaPoint> = profile
        .taxonomy
        .iter()
        .filter(|(p, n)| (path.is_empty() || *p == path || p.starts_with(&prefix)) && n.children.is_empty())
        .filter_map(|(_, n)| n.leaf_affect)
        .collect();
    if leaves.is_empty() {
        return None;
    }
    let n = leaves.len() as f64;
    Some(VaPoint::new(
        leaves.iter().map(|p| p.valence).sum::<f64>() / n,
        leaves.iter().map(|p| p.arousal).sum::<f64>() / n,
    ))
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affect::Element;
use crate::canvas::Rgb;
use crate::metaphor::Recipe;

use super::{AssetLibrary, Primitive, SketchError, VectorComposition};

/// Fraction of the canvas covered by the colour field of a shape-free recipe.
const FIELD_AREA: f64 = 0.6;
/// Margin kept around a fitted asset, as a fraction of each canvas side.
const ASSET_MARGIN: f64 = 0.05;

/// Splits `total` across `weights` by largest remainder, giving every entry
/// at least one.
fn apportion(weights: &[f64], total: usize) -> Vec<usize> {
    let n = weights.len();
    if n == 0 {
        return Vec::new();
    }
    let total = total.max(n);
    let sum: f64 = weights.iter().sum();
    let spare = (total - n) as f64;
    let exact: Vec<f64> = weights.iter().map(|w| spare * w / sum).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| 1 + e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut left = total - counts.iter().sum::<usize>();
    for i in order {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

/// Lays out a recipe deterministically for a given seed. Shape and line
/// elements are instantiated in proportion to their weight and coloured
/// round-robin from the palette, heaviest colour first. A recipe without
/// forms becomes a centred colour field of banded rectangles.
pub fn compose_abstract(recipe: &Recipe, width: u32, height: u32, seed: u64) -> VectorComposition {
    let mut comp = VectorComposition::new(width, height);
    let (w, h) = (width as f64, height as f64);
    let m = w.min(h);

    let mut colors: Vec<(Element, f64)> = recipe.colors().map(|e| (e.element, e.weight)).collect();
    colors.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.name().cmp(b.0.name())));
    let palette: Vec<Rgb> = colors
        .iter()
        .map(|(e, _)| e.rgb().expect("colour elements have an rgb value"))
        .collect();

    let forms: Vec<(Element, f64)> = recipe.forms().map(|e| (e.element, e.weight)).collect();
    if forms.is_empty() {
        let scale = FIELD_AREA.sqrt();
        let (fw, fh) = (w * scale, h * scale);
        let (x0, y0) = ((w - fw) / 2.0, (h - fh) / 2.0);
        let total: f64 = colors.iter().map(|c| c.1).sum();
        let mut y = y0;
        for ((_, weight), color) in colors.iter().zip(&palette) {
            let band = fh * weight / total;
            comp.primitives.push(Primitive::Rect {
                x: x0,
                y,
                width: fw,
                height: band,
                color: *color,
            });
            y += band;
        }
        return comp;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = forms.iter().map(|f| f.1).collect();
    let counts = apportion(&weights, recipe.shape_count);
    let mut next_color = 0usize;
    let mut diagonals = 0usize;
    for ((element, _), count) in forms.iter().zip(counts) {
        for _ in 0..count {
            let color = palette[next_color % palette.len()];
            next_color += 1;
            let prim = match element {
                Element::Circle => {
                    let r = m * rng.random_range(0.08..0.18);
                    Primitive::Disc {
                        center: [rng.random_range(r..=w - r), rng.random_range(r..=h - r)],
                        radius: r,
                        color,
                    }
                }
                Element::Square => {
                    let side = m * rng.random_range(0.15..0.3);
                    Primitive::Rect {
                        x: rng.random_range(0.0..=w - side),
                        y: rng.random_range(0.0..=h - side),
                        width: side,
                        height: side,
                        color,
                    }
                }
                Element::Triangle => {
                    let half = m * rng.random_range(0.15..0.3) / 2.0;
                    let cx = rng.random_range(half..=w - half);
                    let cy = rng.random_range(half..=h - half);
                    Primitive::Triangle {
                        points: [[cx, cy - half], [cx + half, cy + half], [cx - half, cy + half]],
                        color,
                    }
                }
                line => {
                    let angle: f64 = match line {
                        Element::Horizontal => 0.0,
                        Element::Vertical => 90.0,
                        _ => {
                            diagonals += 1;
                            if diagonals % 2 == 1 {
                                45.0
                            } else {
                                135.0
                            }
                        }
                    };
                    let half = m * rng.random_range(0.5..0.8) / 2.0;
                    let (sin, cos) = angle.to_radians().sin_cos();
                    let (hx, hy) = ((half * cos).abs(), (half * sin).abs());
                    let cx = rng.random_range(hx..=w - hx);
                    let cy = rng.random_range(hy..=h - hy);
                    Primitive::Segment {
                        from: [cx - half * cos, cy - half * sin],
                        to: [cx + half * cos, cy + half * sin],
                        thickness: (m / 25.0).max(2.0),
                        color,
                    }
                }
            };
            comp.primitives.push(prim);
        }
    }
    comp
}

/// Scales the symbol's template to fit the canvas with a 5% margin on each
/// side and centres it.
pub fn compose_representational(
    symbol: &str,
    assets: &AssetLibrary,
    width: u32,
    height: u32,
) -> Result<VectorComposition, SketchError> {
    let template = assets
        .get(symbol)
        .ok_or_else(|| SketchError::MissingAsset(symbol.to_string()))?;
    let (w, h) = (width as f64, height as f64);
    let (aw, ah) = (w * (1.0 - 2.0 * ASSET_MARGIN), h * (1.0 - 2.0 * ASSET_MARGIN));
    let scale = (aw / template.width as f64).min(ah / template.height as f64);
    let offset = [
        (w - template.width as f64 * scale) / 2.0,
        (h - template.height as f64 * scale) / 2.0,
    ];
    Ok(VectorComposition {
        width,
        height,
        primitives: template
            .primitives
            .iter()
            .map(|p| p.transformed(scale, offset))
            .collect(),
    })
}

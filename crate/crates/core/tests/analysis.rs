mod common;

use common::{draw_segment, line_canvas, rotate90, upscale};
use copaint_core::affect::{build_generic_table, infer_emotion, InferenceWeights};
use copaint_core::canvas::{hue_histogram, load_canvas, HueBin, Raster};
use copaint_core::lines::detect_lines;

#[test]
fn png_round_trip_is_lossless() {
    let mut r = Raster::blank(40, 30);
    draw_segment(&mut r, (20.0, 15.0), 30.0, 25.0, 3.0, [12, 200, 77]);
    let back = load_canvas(&r.to_png().unwrap()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn histogram_fractions_sum_to_one() {
    let mut r = Raster::filled(64, 64, [220, 30, 30]);
    draw_segment(&mut r, (32.0, 32.0), 45.0, 40.0, 6.0, [30, 60, 220]);
    let h = hue_histogram(&r);
    let sum: f64 = h.fractions().iter().sum();
    assert!((sum - 1.0).abs() < 1e-9);
    assert!(h.fraction(HueBin::Red) > h.fraction(HueBin::Blue));
    assert!(h.fraction(HueBin::Blue) > 0.0);
}

#[test]
fn orientation_survives_rotation_and_scale() {
    let base = line_canvas(64, 0.0, 3.0);
    let h = detect_lines(&base);
    assert!(h.horizontal >= 1 && h.vertical == 0 && h.diagonal == 0, "{h:?}");
    let v = detect_lines(&rotate90(&base));
    assert!(v.vertical >= 1 && v.horizontal == 0 && v.diagonal == 0, "{v:?}");
    let big = detect_lines(&upscale(&line_canvas(48, 45.0, 2.0), 2));
    assert!(big.diagonal >= 1 && big.horizontal == 0 && big.vertical == 0, "{big:?}");
}

#[test]
fn blank_canvas_has_no_lines_and_is_bright() {
    let r = Raster::blank(32, 32);
    assert_eq!(detect_lines(&r).total(), 0);
    let p = infer_emotion(
        &hue_histogram(&r),
        &detect_lines(&r),
        &build_generic_table(),
        &InferenceWeights::default(),
    );
    // white carries its table value plus the full intensity bonus
    let white = build_generic_table().get(copaint_core::affect::Element::White);
    assert!((p.valence - (white.valence + 0.25)).abs() < 1e-9);
    assert!((p.arousal - white.arousal).abs() < 1e-9);
}

#[test]
fn diagonal_line_raises_arousal() {
    let table = build_generic_table();
    let w = InferenceWeights::default();
    let mut plain = Raster::filled(64, 64, [220, 30, 30]);
    let before = infer_emotion(&hue_histogram(&plain), &detect_lines(&plain), &table, &w);
    // the edge threshold needs strong luminance contrast, so the line is white
    draw_segment(&mut plain, (32.0, 32.0), 45.0, 50.0, 3.0, [255, 255, 255]);
    let lines = detect_lines(&plain);
    assert!(lines.diagonal >= 1 && lines.horizontal == 0 && lines.vertical == 0, "{lines:?}");
    let after = infer_emotion(&hue_histogram(&plain), &lines, &table, &w);
    assert!(after.arousal > before.arousal);
}

//! Valence-arousal representation, the four-quadrant emotion categories,
//! the generic element-affect table and the linear canvas inference model.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::canvas::{HueAreas, HueBin};
use crate::lines::LineStats;

/// A point in valence-arousal space. Both coordinates live in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct VaPoint {
    pub valence: f64,
    pub arousal: f64,
}

impl VaPoint {
    pub const NEUTRAL: VaPoint = VaPoint { valence: 0.0, arousal: 0.0 };

    /// Builds a point, clamping both coordinates into `[-1, 1]`.
    /// Non-finite coordinates collapse to the neutral value `0`.
    pub fn new(valence: f64, arousal: f64) -> Self {
        Self {
            valence: clamp_unit(valence),
            arousal: clamp_unit(arousal),
        }
    }

    pub fn distance(&self, other: &VaPoint) -> f64 {
        (self.valence - other.valence).hypot(self.arousal - other.arousal)
    }

    /// `|v| + |a|`, used to rank how extreme a symbol's meaning is.
    pub fn extremity(&self) -> f64 {
        self.valence.abs() + self.arousal.abs()
    }

    /// Moves `rate` of the way towards `target`.
    pub fn step_towards(&self, target: &VaPoint, rate: f64) -> VaPoint {
        VaPoint::new(
            self.valence + rate * (target.valence - self.valence),
            self.arousal + rate * (target.arousal - self.arousal),
        )
    }

    /// Arithmetic mean of a non-empty set of points.
    pub fn mean<'a, I>(points: I) -> Option<VaPoint>
    where
        I: IntoIterator<Item = &'a VaPoint>,
    {
        let mut n = 0usize;
        let (mut v, mut a) = (0.0, 0.0);
        for p in points {
            v += p.valence;
            a += p.arousal;
            n += 1;
        }
        (n > 0).then(|| VaPoint::new(v / n as f64, a / n as f64))
    }
}

fn clamp_unit(x: f64) -> f64 {
    if x.is_finite() {
        x.clamp(-1.0, 1.0)
    } else {
        0.0
    }
}

impl<'de> Deserialize<'de> for VaPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            valence: f64,
            arousal: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        for x in [raw.valence, raw.arousal] {
            if !x.is_finite() || !(-1.0..=1.0).contains(&x) {
                return Err(serde::de::Error::custom(format!(
                    "affect coordinate {x} outside [-1, 1]"
                )));
            }
        }
        Ok(VaPoint {
            valence: raw.valence,
            arousal: raw.arousal,
        })
    }
}

impl fmt::Display for VaPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.3}, {:.3})", self.valence, self.arousal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmotionCategory {
    Happy,
    Relaxed,
    Sad,
    Angry,
}

impl EmotionCategory {
    /// Declaration order doubles as the tie-break order for [`category_of`].
    pub const ALL: [EmotionCategory; 4] = [
        EmotionCategory::Happy,
        EmotionCategory::Relaxed,
        EmotionCategory::Sad,
        EmotionCategory::Angry,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EmotionCategory::Happy => "happy",
            EmotionCategory::Relaxed => "relaxed",
            EmotionCategory::Sad => "sad",
            EmotionCategory::Angry => "angry",
        }
    }
}

impl fmt::Display for EmotionCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown {what} `{name}`")]
pub struct UnknownName {
    pub what: &'static str,
    pub name: String,
}

impl FromStr for EmotionCategory {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EmotionCategory::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownName {
                what: "emotion",
                name: s.to_string(),
            })
    }
}

/// Quadrant centre of an emotion category.
pub fn quadrant_of(category: EmotionCategory) -> VaPoint {
    match category {
        EmotionCategory::Happy => VaPoint::new(0.5, 0.5),
        EmotionCategory::Relaxed => VaPoint::new(0.5, -0.5),
        EmotionCategory::Sad => VaPoint::new(-0.5, -0.5),
        EmotionCategory::Angry => VaPoint::new(-0.5, 0.5),
    }
}

/// Nearest quadrant centre; exact ties resolve happy > relaxed > sad > angry.
pub fn category_of(p: VaPoint) -> EmotionCategory {
    let mut best = EmotionCategory::Happy;
    let mut best_d = f64::INFINITY;
    for c in EmotionCategory::ALL {
        let d = p.distance(&quadrant_of(c));
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Color,
    Shape,
    Line,
}

/// An abstract art element: a colour, a shape or a line orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Red,
    Orange,
    Yellow,
    Green,
    Blue,
    Purple,
    White,
    Black,
    Gray,
    Pink,
    Brown,
    Circle,
    Triangle,
    Square,
    Horizontal,
    Vertical,
    Diagonal,
}

impl Element {
    pub const ALL: [Element; 17] = [
        Element::Red,
        Element::Orange,
        Element::Yellow,
        Element::Green,
        Element::Blue,
        Element::Purple,
        Element::White,
        Element::Black,
        Element::Gray,
        Element::Pink,
        Element::Brown,
        Element::Circle,
        Element::Triangle,
        Element::Square,
        Element::Horizontal,
        Element::Vertical,
        Element::Diagonal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Element::Red => "red",
            Element::Orange => "orange",
            Element::Yellow => "yellow",
            Element::Green => "green",
            Element::Blue => "blue",
            Element::Purple => "purple",
            Element::White => "white",
            Element::Black => "black",
            Element::Gray => "gray",
            Element::Pink => "pink",
            Element::Brown => "brown",
            Element::Circle => "circle",
            Element::Triangle => "triangle",
            Element::Square => "square",
            Element::Horizontal => "horizontal",
            Element::Vertical => "vertical",
            Element::Diagonal => "diagonal",
        }
    }

    pub fn kind(self) -> ElementKind {
        match self {
            Element::Circle | Element::Triangle | Element::Square => ElementKind::Shape,
            Element::Horizontal | Element::Vertical | Element::Diagonal => ElementKind::Line,
            _ => ElementKind::Color,
        }
    }

    pub fn is_color(self) -> bool {
        self.kind() == ElementKind::Color
    }

    /// Display colour used when a colour element is painted.
    pub fn rgb(self) -> Option<[u8; 3]> {
        Some(match self {
            Element::Red => [220, 30, 30],
            Element::Orange => [245, 140, 20],
            Element::Yellow => [250, 220, 30],
            Element::Green => [40, 160, 60],
            Element::Blue => [40, 90, 210],
            Element::Purple => [130, 50, 170],
            Element::White => [250, 250, 250],
            Element::Black => [20, 20, 20],
            Element::Gray => [128, 128, 128],
            Element::Pink => [245, 160, 190],
            Element::Brown => [120, 75, 35],
            _ => return None,
        })
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Element {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        let s = s.strip_suffix(" lines").unwrap_or(&s);
        let s = if s == "grey" { "gray" } else { s };
        Element::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| UnknownName {
                what: "element",
                name: s.to_string(),
            })
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<HueBin> for Element {
    fn from(bin: HueBin) -> Self {
        match bin {
            HueBin::Red => Element::Red,
            HueBin::Orange => Element::Orange,
            HueBin::Yellow => Element::Yellow,
            HueBin::Green => Element::Green,
            HueBin::Blue => Element::Blue,
            HueBin::Purple => Element::Purple,
            HueBin::White => Element::White,
            HueBin::Black => Element::Black,
            HueBin::Gray => Element::Gray,
        }
    }
}

/// Vote counts per emotion, in `EmotionCategory::ALL` order.
pub type Votes = [u32; 4];

/// Participant votes for abstract elements (happy, relaxed, sad, angry).
/// Gray has no row and stays neutral.
pub const ELEMENT_VOTES: [(Element, Votes); 16] = [
    (Element::Yellow, [6, 0, 1, 0]),
    (Element::Orange, [3, 0, 0, 1]),
    (Element::Pink, [3, 1, 0, 1]),
    (Element::Purple, [3, 1, 1, 0]),
    (Element::Green, [4, 3, 0, 0]),
    (Element::White, [3, 5, 0, 1]),
    (Element::Blue, [3, 5, 1, 0]),
    (Element::Black, [1, 0, 4, 3]),
    (Element::Red, [1, 0, 2, 6]),
    (Element::Brown, [0, 0, 4, 0]),
    (Element::Circle, [6, 6, 2, 0]),
    (Element::Triangle, [2, 1, 3, 4]),
    (Element::Square, [2, 0, 3, 1]),
    (Element::Horizontal, [1, 4, 0, 1]),
    (Element::Vertical, [1, 3, 3, 0]),
    (Element::Diagonal, [3, 0, 2, 3]),
];

/// Mean of the quadrant centres of all votes; `None` for an empty vote row.
pub fn vote_mean(votes: &Votes) -> Option<VaPoint> {
    let total: u32 = votes.iter().sum();
    if total == 0 {
        return None;
    }
    let (mut v, mut a) = (0.0, 0.0);
    for (count, category) in votes.iter().zip(EmotionCategory::ALL) {
        let q = quadrant_of(category);
        v += *count as f64 * q.valence;
        a += *count as f64 * q.arousal;
    }
    Some(VaPoint::new(v / total as f64, a / total as f64))
}

#[derive(Debug, Error, PartialEq)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing entry for element `{0}`")]
    Missing(Element),
}

/// Affect assigned to every abstract element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementAffectTable {
    entries: BTreeMap<Element, VaPoint>,
}

impl ElementAffectTable {
    pub fn get(&self, element: Element) -> VaPoint {
        self.entries.get(&element).copied().unwrap_or_default()
    }

    pub fn set(&mut self, element: Element, affect: VaPoint) {
        self.entries.insert(element, affect);
    }

    pub fn iter(&self) -> impl Iterator<Item = (Element, VaPoint)> + '_ {
        self.entries.iter().map(|(e, p)| (*e, *p))
    }

    /// Tab-separated `element valence arousal` rows.
    pub fn to_text(&self) -> String {
        let mut out = String::from("element\tvalence\tarousal\n");
        for (e, p) in self.iter() {
            out.push_str(&format!("{}\t{}\t{}\n", e.name(), p.valence, p.arousal));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, TableError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| TableError::Parse {
                line: i + 1,
                message,
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(parse_err(format!("expected 3 fields, got {}", fields.len())));
            }
            let element: Element = fields[0].parse().map_err(|e: UnknownName| parse_err(e.to_string()))?;
            let v: f64 = fields[1].trim().parse().map_err(|_| parse_err("bad valence".into()))?;
            let a: f64 = fields[2].trim().parse().map_err(|_| parse_err("bad arousal".into()))?;
            entries.insert(element, VaPoint::new(v, a));
        }
        if let Some(missing) = Element::ALL.into_iter().find(|e| !entries.contains_key(e)) {
            return Err(TableError::Missing(missing));
        }
        Ok(Self { entries })
    }
}

/// The generic (non-personalized) element table: each element's affect is the
/// mean quadrant centre of its participant votes.
pub fn build_generic_table() -> ElementAffectTable {
    let mut entries: BTreeMap<Element, VaPoint> =
        Element::ALL.into_iter().map(|e| (e, VaPoint::NEUTRAL)).collect();
    for (element, votes) in ELEMENT_VOTES.iter() {
        if let Some(p) = vote_mean(votes) {
            entries.insert(*element, p);
        }
    }
    ElementAffectTable { entries }
}

/// Coefficients of the intensity and diagonal-line terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InferenceWeights {
    pub intensity: f64,
    pub diagonal: f64,
}

impl Default for InferenceWeights {
    fn default() -> Self {
        Self {
            intensity: 0.25,
            diagonal: 0.3,
        }
    }
}

impl InferenceWeights {
    pub fn is_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.intensity) && (0.0..=1.0).contains(&self.diagonal)
    }
}

/// Unclamped inference sums; [`infer_emotion`] clamps this.
pub fn infer_emotion_raw(
    hues: &HueAreas,
    lines: &LineStats,
    table: &ElementAffectTable,
    weights: &InferenceWeights,
) -> (f64, f64) {
    let mut valence = 0.0;
    let mut arousal = 0.0;
    for (bin, fraction) in hues.iter() {
        // gray is affect-neutral
        if bin == HueBin::Gray {
            continue;
        }
        let p = table.get(bin.into());
        valence += fraction * p.valence;
        arousal += fraction * p.arousal;
    }
    valence += weights.intensity * (2.0 * hues.mean_value - 1.0);
    arousal += weights.diagonal * lines.diagonal_fraction;
    (valence, arousal)
}

/// Linear combination of hue areas, mean intensity and diagonal-line incidence.
pub fn infer_emotion(
    hues: &HueAreas,
    lines: &LineStats,
    table: &ElementAffectTable,
    weights: &InferenceWeights,
) -> VaPoint {
    let (v, a) = infer_emotion_raw(hues, lines, table, weights);
    VaPoint::new(v, a)
}

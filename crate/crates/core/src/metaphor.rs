//! Robot-turn orchestration: fuse canvas measurements with declared symbols,
//! then pick a visual metaphor that matches the inferred emotion but differs
//! in expression from what the human painted.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affect::{category_of, infer_emotion, Element, ElementAffectTable, EmotionCategory, InferenceWeights, VaPoint};
use crate::canvas::{hue_histogram, HueAreas, Raster};
use crate::lexicon::{Lexicon, MetaphorQuery, DEFAULT_MIN_CONCRETENESS};
use crate::lines::{detect_lines, LineStats};
use crate::user_model::taxonomy::{is_within, last_segment, normalize_path};
use crate::user_model::{blend_group, LayeredAffect, Profile, UpdateParams, UserModelError};

pub const MAX_PALETTE: usize = 4;
pub const MAX_SHAPES: usize = 6;
/// Shapes drawn per form element of a recipe.
const SHAPES_PER_FORM: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum MetaphorError {
    #[error("declared symbol: {0}")]
    Symbol(#[from] UserModelError),
    #[error("invalid recipe: {0}")]
    Recipe(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TurnAnalysis {
    pub inferred: VaPoint,
    pub category: EmotionCategory,
    pub hues: HueAreas,
    pub lines: LineStats,
    pub declared_symbols: Vec<String>,
    pub salient_symbol: Option<String>,
}

/// Measures the canvas and picks the most emotionally extreme declared symbol.
pub fn analyze_turn(
    raster: &Raster,
    declared: &[String],
    profile: &Profile,
    generic: &ElementAffectTable,
    weights: &InferenceWeights,
) -> Result<TurnAnalysis, MetaphorError> {
    let hues = hue_histogram(raster);
    let lines = detect_lines(raster);
    Ok(analysis_from_measurements(hues, lines, declared, profile, generic, weights)?)
}

/// Same as [`analyze_turn`] for precomputed measurements.
pub fn analysis_from_measurements(
    hues: HueAreas,
    lines: LineStats,
    declared: &[String],
    profile: &Profile,
    generic: &ElementAffectTable,
    weights: &InferenceWeights,
) -> Result<TurnAnalysis, UserModelError> {
    let table = profile.element_table(generic);
    let inferred = infer_emotion(&hues, &lines, &table, weights);
    let mut declared_symbols = Vec::with_capacity(declared.len());
    for symbol in declared {
        let path = normalize_path(symbol)?;
        if !declared_symbols.contains(&path) {
            declared_symbols.push(path);
        }
    }
    let mut salient: Option<(f64, &String)> = None;
    for path in &declared_symbols {
        let Ok((affect, _)) = profile.effective_affect(path) else {
            continue;
        };
        let extremity = affect.extremity();
        if salient.is_none_or(|(best, _)| extremity > best) {
            salient = Some((extremity, path));
        }
    }
    let salient_symbol = salient.map(|(_, p)| p.clone());
    Ok(TurnAnalysis {
        inferred,
        category: category_of(inferred),
        hues,
        lines,
        declared_symbols,
        salient_symbol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecipeElement {
    pub element: Element,
    pub weight: f64,
}

/// Weighted mix of abstract elements for a non-representational response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", try_from = "RawRecipe")]
pub struct Recipe {
    pub elements: Vec<RecipeElement>,
    pub palette_size: usize,
    pub shape_count: usize,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawRecipe {
    elements: Vec<RecipeElement>,
    shape_count: usize,
}

impl TryFrom<RawRecipe> for Recipe {
    type Error = MetaphorError;

    fn try_from(raw: RawRecipe) -> Result<Self, Self::Error> {
        let recipe = Recipe::new(raw.elements)?;
        if raw.shape_count != recipe.shape_count {
            return Err(MetaphorError::Recipe(format!(
                "shapeCount {} does not match the form elements",
                raw.shape_count
            )));
        }
        Ok(recipe)
    }
}

impl Recipe {
    /// Validates weights and derives the palette size and shape count.
    pub fn new(elements: Vec<RecipeElement>) -> Result<Self, MetaphorError> {
        let bad = |m: String| Err(MetaphorError::Recipe(m));
        if elements.is_empty() {
            return bad("no elements".into());
        }
        let mut seen = BTreeSet::new();
        for e in &elements {
            if !(e.weight > 0.0 && e.weight <= 1.0) {
                return bad(format!("weight {} of {} outside (0, 1]", e.weight, e.element));
            }
            if !seen.insert(e.element) {
                return bad(format!("{} listed twice", e.element));
            }
        }
        let total: f64 = elements.iter().map(|e| e.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return bad(format!("weights sum to {total}"));
        }
        let palette_size = elements.iter().filter(|e| e.element.is_color()).count();
        if palette_size == 0 {
            return bad("no colour element".into());
        }
        if palette_size > MAX_PALETTE {
            return bad(format!("{palette_size} colours exceed the palette limit {MAX_PALETTE}"));
        }
        let forms = elements.len() - palette_size;
        let shape_count = (forms * SHAPES_PER_FORM).min(MAX_SHAPES);
        Ok(Self {
            elements,
            palette_size,
            shape_count,
        })
    }

    pub fn colors(&self) -> impl Iterator<Item = &RecipeElement> {
        self.elements.iter().filter(|e| e.element.is_color())
    }

    pub fn forms(&self) -> impl Iterator<Item = &RecipeElement> {
        self.elements.iter().filter(|e| !e.element.is_color())
    }

    pub fn contains(&self, element: Element) -> bool {
        self.elements.iter().any(|e| e.element == element)
    }

    /// Weighted mean of the element affects.
    pub fn predicted_affect(&self, table: &ElementAffectTable) -> VaPoint {
        weighted_mean(self.elements.iter().map(|e| (e.element, e.weight)), table)
    }

    /// Stable identifier used for novelty tracking.
    pub fn signature(&self) -> String {
        let names: Vec<&str> = self.elements.iter().map(|e| e.element.name()).collect();
        format!("abstract:{}", names.join("+"))
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .elements
            .iter()
            .map(|e| format!("{} {:.2}", e.element, e.weight))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

fn weighted_mean(items: impl Iterator<Item = (Element, f64)>, table: &ElementAffectTable) -> VaPoint {
    let (mut v, mut a) = (0.0, 0.0);
    for (element, w) in items {
        let p = table.get(element);
        v += w * p.valence;
        a += w * p.arousal;
    }
    VaPoint::new(v, a)
}

/// Bounded FIFO of concepts and recipe signatures the robot used recently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnHistory {
    capacity: usize,
    recent: VecDeque<String>,
}

impl Default for TurnHistory {
    fn default() -> Self {
        Self::new(5)
    }
}

impl TurnHistory {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            recent: VecDeque::with_capacity(capacity),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.recent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recent.is_empty()
    }

    pub fn contains(&self, item: &str) -> bool {
        self.recent.iter().any(|r| r == item)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.recent.iter().map(String::as_str)
    }

    pub fn push(&mut self, item: impl Into<String>) {
        if self.capacity == 0 {
            return;
        }
        if self.recent.len() == self.capacity {
            self.recent.pop_front();
        }
        self.recent.push_back(item.into());
    }

    /// Remembers what a decision painted.
    pub fn record(&mut self, decision: &MetaphorDecision) {
        match (&decision.concept, &decision.recipe) {
            (Some(concept), _) => self.push(concept.clone()),
            (None, Some(recipe)) => self.push(recipe.signature()),
            (None, None) => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetaphorMode {
    Representational,
    Abstract,
}

/// Which kinds of response the engine may produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModePreference {
    /// Taxonomy, then lexicon, then abstract.
    #[default]
    Auto,
    Abstract,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetaphorConfig {
    pub palette_size: usize,
    pub max_forms: usize,
    pub weight_step: f64,
    pub min_concreteness: f64,
    pub params: UpdateParams,
    pub mode: ModePreference,
}

impl Default for MetaphorConfig {
    fn default() -> Self {
        Self {
            palette_size: MAX_PALETTE,
            max_forms: 2,
            weight_step: 0.05,
            min_concreteness: DEFAULT_MIN_CONCRETENESS,
            params: UpdateParams::default(),
            mode: ModePreference::Auto,
        }
    }
}

impl MetaphorConfig {
    pub fn validate(&self) -> Result<(), MetaphorError> {
        let bad = |m: &str| Err(MetaphorError::Config(m.to_string()));
        if !(1..=MAX_PALETTE).contains(&self.palette_size) {
            return bad("paletteSize must be within 1..=4");
        }
        if self.max_forms > MAX_SHAPES / SHAPES_PER_FORM {
            return bad("maxForms must be at most 2");
        }
        if self.weight_step_units().is_none() {
            return bad("weightStep must divide 1 into at most 1000 equal parts");
        }
        self.params.validate().map_err(|e| MetaphorError::Config(e.to_string()))
    }

    fn weight_step_units(&self) -> Option<u32> {
        if !(self.weight_step > 0.0 && self.weight_step <= 1.0) {
            return None;
        }
        let units = (1.0 / self.weight_step).round();
        ((units * self.weight_step - 1.0).abs() < 1e-9 && units <= 1000.0).then_some(units as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetaphorDecision {
    pub mode: MetaphorMode,
    /// Taxonomy path or lexicon word in representational mode.
    pub concept: Option<String>,
    pub recipe: Option<Recipe>,
    pub predicted_affect: VaPoint,
    pub rationale: Vec<String>,
}

/// Affect of a decision under a profile: the resolved taxonomy value, the
/// lexicon rating or the weighted recipe mean.
pub fn predict_affect(
    decision: &MetaphorDecision,
    profile: &Profile,
    lexicon: &Lexicon,
    generic: &ElementAffectTable,
) -> Option<VaPoint> {
    if let Some(recipe) = &decision.recipe {
        return Some(recipe.predicted_affect(&profile.element_table(generic)));
    }
    let concept = decision.concept.as_deref()?;
    if let Ok((affect, _)) = profile.effective_affect(concept) {
        return Some(affect);
    }
    lexicon.get(concept).map(|e| e.affect)
}

/// Greedy recipe search. The nearest colour and the nearest form are always
/// included; further elements join only while they strictly reduce the
/// distance between the target and the weighted mean. Weights live on a grid
/// of `weight_step` and are tuned by pairwise transfers.
pub fn build_abstract_recipe(
    target: VaPoint,
    profile: &Profile,
    generic: &ElementAffectTable,
    config: &MetaphorConfig,
) -> Result<Recipe, MetaphorError> {
    config.validate()?;
    let table = profile.element_table(generic);
    let units = config.weight_step_units().expect("validated");
    let nearest = |colour: bool| {
        Element::ALL
            .into_iter()
            .filter(|e| e.is_color() == colour)
            .min_by(|a, b| {
                target
                    .distance(&table.get(*a))
                    .total_cmp(&target.distance(&table.get(*b)))
                    .then_with(|| a.name().cmp(b.name()))
            })
            .expect("element lists are non-empty")
    };

    let mut chosen = vec![nearest(true)];
    if config.max_forms > 0 {
        chosen.push(nearest(false));
    }
    let (mut weights, mut best) = optimize_weights(&chosen, target, &table, units);

    loop {
        let colours = chosen.iter().filter(|e| e.is_color()).count();
        let forms = chosen.len() - colours;
        if chosen.len() as u32 >= units {
            break;
        }
        let mut improvement: Option<(Element, Vec<u32>, f64)> = None;
        let mut candidates: Vec<Element> = Element::ALL
            .into_iter()
            .filter(|e| !chosen.contains(e))
            .filter(|e| if e.is_color() { colours < config.palette_size } else { forms < config.max_forms })
            .collect();
        candidates.sort_by_key(|e| e.name());
        for candidate in candidates {
            let mut trial = chosen.clone();
            trial.push(candidate);
            let (w, d) = optimize_weights(&trial, target, &table, units);
            if d < best - 1e-12 && improvement.as_ref().is_none_or(|(_, _, bd)| d < *bd) {
                improvement = Some((candidate, w, d));
            }
        }
        match improvement {
            Some((element, w, d)) => {
                chosen.push(element);
                weights = w;
                best = d;
            }
            None => break,
        }
    }

    let elements = chosen
        .into_iter()
        .zip(weights)
        .map(|(element, w)| RecipeElement {
            element,
            weight: w as f64 / units as f64,
        })
        .collect();
    Recipe::new(elements)
}

fn grid_distance(elements: &[Element], units: &[u32], total: u32, target: VaPoint, table: &ElementAffectTable) -> f64 {
    let p = weighted_mean(
        elements.iter().zip(units).map(|(e, u)| (*e, *u as f64 / total as f64)),
        table,
    );
    target.distance(&p)
}

/// Coordinate descent on the weight grid: repeatedly apply the single-unit
/// transfer with the largest strict improvement. Every element keeps at least
/// one unit.
fn optimize_weights(elements: &[Element], target: VaPoint, table: &ElementAffectTable, total: u32) -> (Vec<u32>, f64) {
    let n = elements.len() as u32;
    let mut units: Vec<u32> = (0..n).map(|i| total / n + u32::from(i < total % n)).collect();
    let mut current = grid_distance(elements, &units, total, target, table);
    // order pairs by element name so ties resolve the same way every time
    let mut order: Vec<usize> = (0..elements.len()).collect();
    order.sort_by_key(|&i| elements[i].name());
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for &from in &order {
            if units[from] <= 1 {
                continue;
            }
            for &to in &order {
                if to == from {
                    continue;
                }
                units[from] -= 1;
                units[to] += 1;
                let d = grid_distance(elements, &units, total, target, table);
                units[from] += 1;
                units[to] -= 1;
                if d < current - 1e-12 && best.is_none_or(|(_, _, bd)| d < bd) {
                    best = Some((from, to, d));
                }
            }
        }
        match best {
            Some((from, to, d)) => {
                units[from] -= 1;
                units[to] += 1;
                current = d;
            }
            None => return (units, current),
        }
    }
}

/// Every path excluded because it was declared, lies under or above a
/// declared path, or was painted recently.
fn taxonomy_exclusions(analysis: &TurnAnalysis, profile: &Profile, history: &TurnHistory) -> BTreeSet<String> {
    let mut excluded = BTreeSet::new();
    for declared in &analysis.declared_symbols {
        excluded.extend(profile.taxonomy.subtree(declared).map(|(p, _)| p.to_string()));
        excluded.insert(declared.clone());
        // an ancestor would depict the declared symbol again, only more vaguely
        excluded.extend(crate::user_model::Taxonomy::ancestors(declared).map(str::to_string));
    }
    excluded.extend(history.iter().map(str::to_string));
    excluded
}

/// Rationale lines describing what was measured on the canvas.
fn describe_analysis(analysis: &TurnAnalysis) -> Vec<String> {
    let target = analysis.inferred;
    let mut rationale = Vec::new();

    let mut detected: Vec<(Element, f64)> = analysis
        .hues
        .iter()
        .filter(|(_, f)| *f > 0.0)
        .map(|(bin, f)| (Element::from(bin), f))
        .collect();
    detected.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.name().cmp(b.0.name())));
    let colours: Vec<String> = detected
        .iter()
        .map(|(e, f)| format!("{} {:.0}%", e, f * 100.0))
        .collect();
    rationale.push(format!(
        "detected colours: {}; mean value {:.2}",
        if colours.is_empty() { "none".to_string() } else { colours.join(", ") },
        analysis.hues.mean_value
    ));
    rationale.push(format!(
        "detected lines: {} horizontal, {} vertical, {} diagonal",
        analysis.lines.horizontal, analysis.lines.vertical, analysis.lines.diagonal
    ));
    rationale.push(format!("inferred emotion {} ({})", target, analysis.category));
    if !analysis.declared_symbols.is_empty() {
        rationale.push(format!("declared symbols: {}", analysis.declared_symbols.join(", ")));
    }
    if let Some(salient) = &analysis.salient_symbol {
        rationale.push(format!("most salient declared symbol: {salient}"));
    }
    rationale
}

/// Chooses the robot's response for a turn. Never fails: when neither the
/// taxonomy nor the lexicon yields a candidate, an abstract recipe is built.
pub fn choose_metaphor(
    analysis: &TurnAnalysis,
    profile: &Profile,
    lexicon: &Lexicon,
    history: &TurnHistory,
    generic: &ElementAffectTable,
    config: &MetaphorConfig,
) -> Result<MetaphorDecision, MetaphorError> {
    config.validate()?;
    let target = analysis.inferred;
    let mut rationale = describe_analysis(analysis);

    if config.mode == ModePreference::Auto {
        let excluded = taxonomy_exclusions(analysis, profile, history);
        for declared in &analysis.declared_symbols {
            rationale.push(format!("excluded {declared}, its ancestors and everything below it (declared by the painter)"));
        }
        for recent in history.iter() {
            rationale.push(format!("excluded {recent} (painted recently)"));
        }
        for taboo in &profile.taboo {
            rationale.push(format!("excluded {taboo} and everything below it (taboo)"));
        }
        let candidates = profile.scored_candidates(target, &excluded, &config.params);
        rationale.push(format!(
            "taxonomy: {} candidate concepts after exclusions",
            candidates.len()
        ));
        match profile.select_concept(target, &excluded, &config.params) {
            Ok(choice) => {
                rationale.push(format!(
                    "chose {} ({} affect {}), distance {:.3}, score {:.3}",
                    choice.path,
                    choice.layer_provenance,
                    choice.predicted_affect,
                    choice.predicted_affect.distance(&target),
                    choice.score
                ));
                return Ok(MetaphorDecision {
                    mode: MetaphorMode::Representational,
                    concept: Some(choice.path),
                    recipe: None,
                    predicted_affect: choice.predicted_affect,
                    rationale,
                });
            }
            Err(_) => rationale.push("taxonomy: no candidate, trying the lexicon".into()),
        }

        let mut query = MetaphorQuery::new(target);
        query.min_concreteness = config.min_concreteness;
        for path in excluded.iter().chain(&profile.taboo) {
            query.excluded.insert(last_segment(path).to_string());
        }
        for path in profile.taxonomy.paths().filter(|p| profile.is_taboo(p)) {
            query.excluded.insert(last_segment(path).to_string());
        }
        query.excluded.extend(history.iter().map(str::to_string));
        let eligible = lexicon
            .entries()
            .filter(|e| e.concreteness >= query.min_concreteness && !query.excluded.contains(&e.word))
            .count();
        rationale.push(format!(
            "lexicon: {} of {} words remain after concreteness >= {} and {} exclusions",
            eligible,
            lexicon.len(),
            query.min_concreteness,
            query.excluded.len()
        ));
        match lexicon.query(&query) {
            Ok(found) => {
                let entry = &found[0];
                rationale.push(format!(
                    "chose word {} (affect {}), distance {:.3}",
                    entry.word,
                    entry.affect,
                    entry.affect.distance(&target)
                ));
                return Ok(MetaphorDecision {
                    mode: MetaphorMode::Representational,
                    concept: Some(entry.word.clone()),
                    recipe: None,
                    predicted_affect: entry.affect,
                    rationale,
                });
            }
            Err(_) => rationale.push("lexicon: no candidate, painting abstractly".into()),
        }
    } else {
        rationale.push("abstract response requested".into());
    }

    let recipe = build_abstract_recipe(target, profile, generic, config)?;
    let predicted = recipe.predicted_affect(&profile.element_table(generic));
    rationale.push(format!(
        "abstract recipe {recipe} predicts {predicted}, distance {:.3}",
        predicted.distance(&target)
    ));
    if history.contains(&recipe.signature()) {
        rationale.push("note: the same element mix was used recently".into());
    }
    Ok(MetaphorDecision {
        mode: MetaphorMode::Abstract,
        concept: None,
        recipe: Some(recipe),
        predicted_affect: predicted,
        rationale,
    })
}

/// Response for several painters sharing a canvas. A taxonomy concept must
/// suit every member (minimax over their scores, see [`blend_group`]); the
/// lexicon is skipped because it carries nobody's personal data, and the
/// abstract fallback uses the members' mean element table.
pub fn choose_group_metaphor(
    analysis: &TurnAnalysis,
    profiles: &[Profile],
    lexicon: &Lexicon,
    history: &TurnHistory,
    generic: &ElementAffectTable,
    config: &MetaphorConfig,
) -> Result<MetaphorDecision, MetaphorError> {
    match profiles {
        [] => return Err(MetaphorError::Symbol(UserModelError::NoCandidate)),
        [single] => return choose_metaphor(analysis, single, lexicon, history, generic, config),
        _ => {}
    }
    config.validate()?;
    let target = analysis.inferred;
    let mut rationale = describe_analysis(analysis);
    let ids: Vec<&str> = profiles.iter().map(|p| p.id.as_str()).collect();
    rationale.push(format!("painting for the group {}", ids.join(", ")));

    if config.mode == ModePreference::Auto {
        let mut excluded = BTreeSet::new();
        for profile in profiles {
            excluded.extend(taxonomy_exclusions(analysis, profile, history));
        }
        match blend_group(profiles, target, &excluded, &config.params) {
            Ok(choice) => {
                rationale.push(format!(
                    "chose {} (worst member affect {}), distance {:.3}, score {:.3}",
                    choice.path,
                    choice.predicted_affect,
                    choice.predicted_affect.distance(&target),
                    choice.score
                ));
                return Ok(MetaphorDecision {
                    mode: MetaphorMode::Representational,
                    concept: Some(choice.path),
                    recipe: None,
                    predicted_affect: choice.predicted_affect,
                    rationale,
                });
            }
            Err(_) => rationale.push("taxonomy: no concept suits every member, painting abstractly".into()),
        }
    } else {
        rationale.push("abstract response requested".into());
    }

    let blended = group_element_profile(profiles, generic);
    let recipe = build_abstract_recipe(target, &blended, generic, config)?;
    let predicted = recipe.predicted_affect(&blended.element_table(generic));
    rationale.push(format!(
        "abstract recipe {recipe} predicts {predicted} on the members' mean element table, distance {:.3}",
        predicted.distance(&target)
    ));
    Ok(MetaphorDecision {
        mode: MetaphorMode::Abstract,
        concept: None,
        recipe: Some(recipe),
        predicted_affect: predicted,
        rationale,
    })
}

/// Profile whose element table is the mean of the members' tables.
fn group_element_profile(profiles: &[Profile], generic: &ElementAffectTable) -> Profile {
    let tables: Vec<ElementAffectTable> = profiles.iter().map(|p| p.element_table(generic)).collect();
    let mut blended = Profile::empty("group");
    for element in Element::ALL {
        if profiles.iter().any(|p| p.element_overrides.contains_key(&element)) {
            let values: Vec<VaPoint> = tables.iter().map(|t| t.get(element)).collect();
            let mean = VaPoint::mean(&values).expect("at least two members");
            blended.element_overrides.insert(element, LayeredAffect::known(mean));
        }
    }
    blended
}

/// True if `path` is one of the declared symbols or lies below one.
pub fn is_declared(analysis: &TurnAnalysis, path: &str) -> bool {
    analysis.declared_symbols.iter().any(|d| is_within(path, d))
}

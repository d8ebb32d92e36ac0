//! Layered personal affect model.
//!
//! A [`Profile`] resolves the affect of a symbol through three layers with
//! fixed precedence: a *known* value (disclosed by the user or learned from
//! their reactions) beats a *stereotype* value (installed from attribute
//! rules), which beats the *generic* value (the mean of the seeded leaves
//! below the node). Profiles are values: every update returns a new profile.

mod demo;
mod disclosure;
mod persist;
mod stereotype;
pub mod taxonomy;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affect::{Element, ElementAffectTable, VaPoint};

pub use demo::{demo_profile, demo_taxonomy, SYMBOL_VOTES};
pub use disclosure::{DisclosureForm, ElementVotes, DISCLOSED_ROOT};
pub use persist::{load_profile, load_profile_with_warnings, save_profile, ProfileIoError, SCHEMA_VERSION};
pub use stereotype::{StereotypeRule, StereotypeRules, StereotypeTarget, DEMO_STEREOTYPE_RULES};
pub use taxonomy::{Layer, LayeredAffect, Taxonomy, TaxonomyNode};

use taxonomy::{depth_of, hop_distance, is_within, parent_of};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum UserModelError {
    #[error("unknown taxonomy path `{0}`")]
    UnknownPath(String),
    #[error("no affect data for `{0}`")]
    NoData(String),
    #[error("no candidate concept satisfies the constraints")]
    NoCandidate,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Adaptation and selection constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UpdateParams {
    /// Step size towards an observed reaction, `(0, 1]`.
    pub learning_rate: f64,
    /// Per-hop attenuation of the update for ancestors, `[0, 1]`.
    pub ancestor_decay: f64,
    pub k_neighbors: usize,
    /// Weight of the subtree spread in the concept score.
    pub stddev_penalty: f64,
}

impl Default for UpdateParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            ancestor_decay: 0.5,
            k_neighbors: 3,
            stddev_penalty: 0.5,
        }
    }
}

impl UpdateParams {
    pub fn validate(&self) -> Result<(), UserModelError> {
        let ok = self.learning_rate > 0.0
            && self.learning_rate <= 1.0
            && (0.0..=1.0).contains(&self.ancestor_decay)
            && self.k_neighbors >= 1
            && self.stddev_penalty >= 0.0
            && self.stddev_penalty.is_finite();
        if ok {
            Ok(())
        } else {
            Err(UserModelError::InvalidParams(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConceptChoice {
    pub path: String,
    pub predicted_affect: VaPoint,
    pub score: f64,
    pub layer_provenance: Layer,
}

/// Audit record. `seq` is a per-profile logical clock.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub seq: u64,
    pub event: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub id: String,
    /// Optional stereotype keys such as `ageBand`, `gender`, `locale`.
    pub attributes: BTreeMap<String, String>,
    pub taxonomy: Taxonomy,
    pub element_overrides: BTreeMap<Element, LayeredAffect>,
    pub taboo: BTreeSet<String>,
    pub history: Vec<HistoryEntry>,
}

impl Profile {
    pub fn new(id: impl Into<String>, taxonomy: Taxonomy) -> Self {
        Self {
            id: id.into(),
            attributes: BTreeMap::new(),
            taxonomy,
            element_overrides: BTreeMap::new(),
            taboo: BTreeSet::new(),
            history: Vec::new(),
        }
    }

    pub fn empty(id: impl Into<String>) -> Self {
        Self::new(id, Taxonomy::new())
    }

    pub(crate) fn record(&mut self, event: impl Into<String>) {
        let seq = self.history.last().map_or(1, |h| h.seq + 1);
        self.history.push(HistoryEntry {
            seq,
            event: event.into(),
        });
    }

    fn require(&self, path: &str) -> Result<&TaxonomyNode, UserModelError> {
        self.taxonomy
            .node(path)
            .ok_or_else(|| UserModelError::UnknownPath(path.to_string()))
    }

    /// Marks a node (and with it its subtree) as never to be painted.
    pub fn add_taboo(&mut self, path: &str) -> Result<(), UserModelError> {
        self.require(path)?;
        self.taboo.insert(path.to_string());
        Ok(())
    }

    /// True when the node or one of its ancestors is taboo.
    pub fn is_taboo(&self, path: &str) -> bool {
        self.taboo.iter().any(|t| is_within(path, t))
    }

    /// Element table with this profile's overrides substituted in.
    pub fn element_table(&self, generic: &ElementAffectTable) -> ElementAffectTable {
        let mut table = generic.clone();
        for (element, value) in &self.element_overrides {
            table.set(*element, value.affect());
        }
        table
    }

    /// Mean of the seeded leaves below (and including) `path`.
    pub fn generic_affect(&self, path: &str) -> Option<VaPoint> {
        let leaves: Vec<VaPoint> = self.taxonomy.seeded_leaves(path).map(|(_, a)| a).collect();
        VaPoint::mean(&leaves)
    }

    /// Resolves a node's affect with known > stereotype > generic precedence.
    pub fn effective_affect(&self, path: &str) -> Result<(VaPoint, Layer), UserModelError> {
        let node = self.require(path)?;
        if let Some(explicit) = node.explicit_affect {
            return Ok((explicit.affect(), explicit.layer));
        }
        self.generic_affect(path)
            .map(|a| (a, Layer::Generic))
            .ok_or_else(|| UserModelError::NoData(path.to_string()))
    }

    /// Population spread of the seeded leaves: RMS Euclidean distance to their mean.
    pub fn subtree_stddev(&self, path: &str) -> Result<f64, UserModelError> {
        self.require(path)?;
        let leaves: Vec<VaPoint> = self.taxonomy.seeded_leaves(path).map(|(_, a)| a).collect();
        let mean = VaPoint::mean(&leaves).ok_or_else(|| UserModelError::NoData(path.to_string()))?;
        let sq: f64 = leaves
            .iter()
            .map(|p| {
                let d = p.distance(&mean);
                d * d
            })
            .sum();
        Ok((sq / leaves.len() as f64).sqrt())
    }

    /// Spread used when scoring: subtree stddev, or 0 for nodes whose only
    /// data is an explicit value.
    fn selection_spread(&self, path: &str) -> f64 {
        self.subtree_stddev(path).unwrap_or(0.0)
    }

    /// Predicts the affect of a (possibly not yet existing) leaf from its
    /// `k` structurally nearest seeded leaves, weighted by `1 / (1 + hops)`.
    pub fn estimate_leaf(&self, new_path: &str, k: usize) -> Result<VaPoint, UserModelError> {
        let new_path = taxonomy::normalize_path(new_path)?;
        let parent = parent_of(&new_path)
            .ok_or_else(|| UserModelError::InvalidPath("the root is not a leaf".into()))?;
        self.require(parent)?;

        let mut neighbours: Vec<(usize, &str, VaPoint)> = self
            .taxonomy
            .seeded_leaves("")
            .filter(|(p, _)| *p != new_path)
            .map(|(p, a)| (hop_distance(&new_path, p), p, a))
            .collect();
        if neighbours.is_empty() {
            let mut cursor = Some(parent);
            while let Some(p) = cursor {
                if let Ok((affect, _)) = self.effective_affect(p) {
                    return Ok(affect);
                }
                cursor = parent_of(p);
            }
            return Err(UserModelError::NoData(new_path));
        }
        neighbours.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
        neighbours.truncate(k.max(1));
        let (mut v, mut a, mut total) = (0.0, 0.0, 0.0);
        for (hops, _, affect) in &neighbours {
            let w = 1.0 / (1.0 + *hops as f64);
            v += w * affect.valence;
            a += w * affect.arousal;
            total += w;
        }
        Ok(VaPoint::new(v / total, a / total))
    }

    /// Adds a leaf seeded with its k-NN estimate if it does not exist yet.
    pub fn ensure_leaf(&self, path: &str, k: usize) -> Result<(Profile, String), UserModelError> {
        let normalized = taxonomy::normalize_path(path)?;
        if self.taxonomy.contains(&normalized) {
            return Ok((self.clone(), normalized));
        }
        let estimate = self.estimate_leaf(&normalized, k)?;
        let mut next = self.clone();
        next.taxonomy.insert_leaf(&normalized, estimate)?;
        next.record(format!("estimated leaf {normalized} at {estimate}"));
        Ok((next, normalized))
    }

    /// Moves the node towards `reaction` by the learning rate and each
    /// ancestor at hop distance `d` by `rate * decay^d`. All writes land in the
    /// known layer; nodes without data start from neutral.
    pub fn apply_reaction(
        &self,
        path: &str,
        reaction: VaPoint,
        params: &UpdateParams,
    ) -> Result<Profile, UserModelError> {
        params.validate()?;
        self.require(path)?;
        if path.is_empty() {
            return Err(UserModelError::InvalidPath("cannot react to the root".into()));
        }
        let targets: Vec<&str> = std::iter::once(path).chain(Taxonomy::ancestors(path)).collect();
        let mut updates = Vec::with_capacity(targets.len());
        for (d, node) in targets.iter().enumerate() {
            let current = self
                .effective_affect(node)
                .map(|(a, _)| a)
                .unwrap_or(VaPoint::NEUTRAL);
            let rate = params.learning_rate * params.ancestor_decay.powi(d as i32);
            updates.push((node.to_string(), current.step_towards(&reaction, rate)));
        }
        let mut next = self.clone();
        for (node, value) in updates {
            next.taxonomy.set_explicit(&node, Some(LayeredAffect::known(value)))?;
        }
        next.record(format!("reaction {reaction} on {path}"));
        Ok(next)
    }

    /// Moves each listed element override towards `reaction` by the learning rate.
    pub fn apply_element_reaction(
        &self,
        elements: &[Element],
        generic: &ElementAffectTable,
        reaction: VaPoint,
        params: &UpdateParams,
    ) -> Result<Profile, UserModelError> {
        params.validate()?;
        let table = self.element_table(generic);
        let mut next = self.clone();
        for element in elements {
            let moved = table.get(*element).step_towards(&reaction, params.learning_rate);
            next.element_overrides.insert(*element, LayeredAffect::known(moved));
        }
        let names: Vec<&str> = elements.iter().map(|e| e.name()).collect();
        next.record(format!("reaction {reaction} on elements {}", names.join(",")));
        Ok(next)
    }

    /// Every node (except the root) that may be painted for this profile,
    /// with its resolved affect and selection score.
    pub fn scored_candidates(
        &self,
        target: VaPoint,
        excluded: &BTreeSet<String>,
        params: &UpdateParams,
    ) -> Vec<ConceptChoice> {
        self.taxonomy
            .paths()
            .filter(|p| !p.is_empty() && !excluded.contains(*p) && !self.is_taboo(p))
            .filter_map(|p| {
                let (affect, layer) = self.effective_affect(p).ok()?;
                let score = target.distance(&affect) + params.stddev_penalty * self.selection_spread(p);
                Some(ConceptChoice {
                    path: p.to_string(),
                    predicted_affect: affect,
                    score,
                    layer_provenance: layer,
                })
            })
            .collect()
    }

    /// Picks the node minimizing `distance + penalty * spread`; ties go to the
    /// shallower node, then alphabetical order.
    pub fn select_concept(
        &self,
        target: VaPoint,
        excluded: &BTreeSet<String>,
        params: &UpdateParams,
    ) -> Result<ConceptChoice, UserModelError> {
        params.validate()?;
        self.scored_candidates(target, excluded, params)
            .into_iter()
            .min_by(|a, b| choice_order(a, b))
            .ok_or(UserModelError::NoCandidate)
    }
}

fn choice_order(a: &ConceptChoice, b: &ConceptChoice) -> std::cmp::Ordering {
    a.score
        .total_cmp(&b.score)
        .then_with(|| depth_of(&a.path).cmp(&depth_of(&b.path)))
        .then_with(|| a.path.cmp(&b.path))
}

/// Concept choice for several people at once: a node is eligible only if no
/// member marks it taboo and every member has data for it; the score is the
/// worst member's score (minimax).
pub fn blend_group(
    profiles: &[Profile],
    target: VaPoint,
    excluded: &BTreeSet<String>,
    params: &UpdateParams,
) -> Result<ConceptChoice, UserModelError> {
    params.validate()?;
    let first = profiles.first().ok_or(UserModelError::NoCandidate)?;
    let per_profile: Vec<BTreeMap<String, ConceptChoice>> = profiles
        .iter()
        .map(|p| {
            p.scored_candidates(target, excluded, params)
                .into_iter()
                .map(|c| (c.path.clone(), c))
                .collect()
        })
        .collect();
    first
        .taxonomy
        .paths()
        .filter_map(|path| {
            let mut worst: Option<&ConceptChoice> = None;
            for candidates in &per_profile {
                let c = candidates.get(path)?;
                if worst.is_none_or(|w| c.score > w.score) {
                    worst = Some(c);
                }
            }
            worst.cloned()
        })
        .min_by(choice_order)
        .ok_or(UserModelError::NoCandidate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dogs() -> Profile {
        let mut t = Taxonomy::new();
        t.insert_leaf("animal/dog/hunting-dog/golden-retriever/img1", VaPoint::new(0.7, 0.3)).unwrap();
        t.insert_leaf("animal/dog/hunting-dog/golden-retriever/img2", VaPoint::new(0.5, 0.1)).unwrap();
        t.insert_leaf("animal/dog/hunting-dog/dead-prey", VaPoint::new(-0.6, 0.4)).unwrap();
        t.insert_leaf("animal/dog/hunting-dog/gun", VaPoint::new(-0.5, 0.6)).unwrap();
        Profile::new("p", t)
    }

    const GR: &str = "animal/dog/hunting-dog/golden-retriever";
    const HD: &str = "animal/dog/hunting-dog";

    fn close(a: VaPoint, v: f64, ar: f64) -> bool {
        (a.valence - v).abs() < 1e-12 && (a.arousal - ar).abs() < 1e-12
    }

    #[test]
    fn effective_affect_examples() {
        let p = dogs();
        let (a, layer) = p.effective_affect(GR).unwrap();
        assert!(close(a, 0.6, 0.2));
        assert_eq!(layer, Layer::Generic);
        let (a, _) = p.effective_affect(HD).unwrap();
        assert!(close(a, 0.025, 0.35));

        let mut q = p.clone();
        q.taxonomy
            .set_explicit(HD, Some(LayeredAffect::known(VaPoint::new(-1.0, 0.0))))
            .unwrap();
        assert_eq!(q.effective_affect(HD).unwrap(), (VaPoint::new(-1.0, 0.0), Layer::Known));
        assert_eq!(p.effective_affect("nope"), Err(UserModelError::UnknownPath("nope".into())));
    }

    #[test]
    fn known_beats_stereotype() {
        let mut p = dogs();
        p.taxonomy
            .set_explicit(GR, Some(LayeredAffect::stereotype(VaPoint::new(0.1, 0.1))))
            .unwrap();
        assert_eq!(p.effective_affect(GR).unwrap().1, Layer::Stereotype);
        p.taxonomy
            .set_explicit(GR, Some(LayeredAffect::known(VaPoint::new(0.2, 0.2))))
            .unwrap();
        assert_eq!(p.effective_affect(GR).unwrap(), (VaPoint::new(0.2, 0.2), Layer::Known));
    }

    #[test]
    fn no_data() {
        let mut p = Profile::empty("x");
        p.taxonomy.insert("a/b").unwrap();
        assert_eq!(p.effective_affect("a"), Err(UserModelError::NoData("a".into())));
        assert_eq!(p.subtree_stddev("a"), Err(UserModelError::NoData("a".into())));
    }

    #[test]
    fn stddev_examples() {
        let p = dogs();
        assert_eq!(p.subtree_stddev(&format!("{GR}/img1")).unwrap(), 0.0);
        assert!((p.subtree_stddev(GR).unwrap() - 0.02f64.sqrt()).abs() < 1e-12);
        // brute force: squared distances from (0.025, 0.35) sum to 1.4775
        assert!((p.subtree_stddev(HD).unwrap() - (1.4775f64 / 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn estimate_leaf_examples() {
        let p = dogs();
        let img3 = p.estimate_leaf(&format!("{GR}/img3"), 2).unwrap();
        assert!(close(img3, 0.6, 0.2));

        let mut gr_only = Profile::empty("g");
        gr_only.taxonomy.insert_leaf("dog/golden-retriever/img1", VaPoint::new(0.7, 0.3)).unwrap();
        gr_only.taxonomy.insert_leaf("dog/golden-retriever/img2", VaPoint::new(0.5, 0.1)).unwrap();
        gr_only.taxonomy.insert("dog/poodle").unwrap();
        let est = gr_only.estimate_leaf("dog/poodle/img1", 3).unwrap();
        assert!(close(est, 0.6, 0.2));

        let mut single = Profile::empty("s");
        single.taxonomy.insert_leaf("a/b", VaPoint::new(-0.3, 0.9)).unwrap();
        assert_eq!(single.estimate_leaf("a/c", 3).unwrap(), VaPoint::new(-0.3, 0.9));

        let mut bare = Profile::empty("b");
        bare.taxonomy.insert("a").unwrap();
        assert!(matches!(bare.estimate_leaf("a/x", 2), Err(UserModelError::NoData(_))));
        bare.taxonomy
            .set_explicit("a", Some(LayeredAffect::known(VaPoint::new(0.4, 0.0))))
            .unwrap();
        assert_eq!(bare.estimate_leaf("a/x", 2).unwrap(), VaPoint::new(0.4, 0.0));
        assert!(matches!(bare.estimate_leaf("zz/x", 2), Err(UserModelError::UnknownPath(_))));
    }

    #[test]
    fn reaction_examples() {
        let params = UpdateParams::default();
        let mut p = Profile::empty("r");
        p.taxonomy.insert_leaf("a/leaf", VaPoint::new(0.0, 0.0)).unwrap();
        p.taxonomy.insert_leaf("a/other", VaPoint::new(0.4, 0.0)).unwrap();
        // parent mean is (0.2, 0)
        let q = p.apply_reaction("a/leaf", VaPoint::new(1.0, 0.0), &params).unwrap();
        assert_eq!(q.effective_affect("a/leaf").unwrap(), (VaPoint::new(0.5, 0.0), Layer::Known));
        let (parent, layer) = q.effective_affect("a").unwrap();
        assert!(close(parent, 0.4, 0.0));
        assert_eq!(layer, Layer::Known);
        assert_eq!(q.history.len(), 1);
        assert!(p.apply_reaction("zz", VaPoint::NEUTRAL, &params).is_err());
    }

    #[test]
    fn reaction_contracts_geometrically() {
        let params = UpdateParams {
            learning_rate: 0.3,
            ..UpdateParams::default()
        };
        let mut p = dogs();
        let r = VaPoint::new(-0.9, -0.2);
        let leaf = format!("{GR}/img1");
        let w0 = p.effective_affect(&leaf).unwrap().0.distance(&r);
        for n in 1..=10 {
            p = p.apply_reaction(&leaf, r, &params).unwrap();
            let dn = p.effective_affect(&leaf).unwrap().0.distance(&r);
            assert!((dn - 0.7f64.powi(n) * w0).abs() < 1e-9);
        }
    }

    #[test]
    fn golden_retriever_beats_hunting_dog() {
        let p = dogs();
        let params = UpdateParams::default();
        let c = p.select_concept(VaPoint::new(0.6, 0.2), &BTreeSet::new(), &params).unwrap();
        assert_eq!(c.path, GR);
        assert!((c.score - 0.5 * 0.02f64.sqrt()).abs() < 1e-12);
        let all = p.scored_candidates(VaPoint::new(0.6, 0.2), &BTreeSet::new(), &params);
        let hd = all.iter().find(|c| c.path == HD).unwrap();
        assert!(hd.score > c.score);
    }

    #[test]
    fn taboo_everything_means_no_candidate() {
        let mut p = dogs();
        p.add_taboo("animal").unwrap();
        assert_eq!(
            p.select_concept(VaPoint::NEUTRAL, &BTreeSet::new(), &UpdateParams::default()),
            Err(UserModelError::NoCandidate)
        );
        assert!(p.add_taboo("missing").is_err());
    }

    #[test]
    fn group_of_one_matches_single_selection() {
        let p = dogs();
        let params = UpdateParams::default();
        let target = VaPoint::new(-0.4, 0.5);
        let ex = BTreeSet::new();
        assert_eq!(
            blend_group(std::slice::from_ref(&p), target, &ex, &params).unwrap(),
            p.select_concept(target, &ex, &params).unwrap()
        );
        assert_eq!(blend_group(&[], target, &ex, &params), Err(UserModelError::NoCandidate));
    }

    #[test]
    fn group_respects_every_taboo() {
        let adult = dogs();
        let mut child = dogs();
        child.add_taboo("animal/dog/hunting-dog/gun").unwrap();
        let params = UpdateParams::default();
        let gun = adult.effective_affect("animal/dog/hunting-dog/gun").unwrap().0;
        let c = blend_group(&[adult.clone(), child], gun, &BTreeSet::new(), &params).unwrap();
        assert_ne!(c.path, "animal/dog/hunting-dog/gun");
        assert_eq!(
            adult.select_concept(gun, &BTreeSet::new(), &params).unwrap().path,
            "animal/dog/hunting-dog/gun"
        );
    }

    #[test]
    fn params_validation() {
        assert!(UpdateParams::default().validate().is_ok());
        let bad = UpdateParams {
            learning_rate: 0.0,
            ..UpdateParams::default()
        };
        assert!(bad.validate().is_err());
    }
}

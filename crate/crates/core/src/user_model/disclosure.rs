//! Ingestion of self-reported symbol and element associations.

use std::collections::BTreeMap;

use crate::affect::{quadrant_of, Element, EmotionCategory, VaPoint};

use super::taxonomy::{depth_of, last_segment, slugify, LayeredAffect};
use super::Profile;

/// Free-text labels the person associates with each emotion.
pub type DisclosureForm = BTreeMap<EmotionCategory, Vec<String>>;
/// Emotions each element was reported to evoke (one entry per vote).
pub type ElementVotes = BTreeMap<Element, Vec<EmotionCategory>>;

/// Root under which unmatched labels are filed.
pub const DISCLOSED_ROOT: &str = "disclosed";

const SYNONYMS: &[(&str, &str)] = &[
    ("gift", "present"),
    ("gifts", "present"),
    ("puppy", "dog"),
    ("doggy", "dog"),
    ("kitten", "cat"),
    ("kitty", "cat"),
    ("stream", "brook"),
    ("creek", "brook"),
    ("woods", "forest"),
    ("tomb", "grave"),
    ("pistol", "gun"),
    ("rifle", "gun"),
    ("serpent", "snake"),
    ("flowers", "flower"),
    ("sunshine", "sun"),
    ("rainy", "rain"),
    ("football", "sports"),
    ("soccer", "sports"),
    ("holiday", "traveling"),
    ("travel", "traveling"),
    ("meal", "food-and-drink"),
    ("food", "food-and-drink"),
];

/// Slug variants a label may be stored under, most specific first.
fn variants(slug: &str) -> Vec<String> {
    let mut out = vec![slug.to_string()];
    let mut push = |s: String| {
        if !s.is_empty() && !out.contains(&s) {
            out.push(s);
        }
    };
    if let Some(stem) = slug.strip_suffix("ies") {
        push(format!("{stem}y"));
    }
    if let Some(stem) = slug.strip_suffix("es") {
        push(stem.to_string());
    }
    if let Some(stem) = slug.strip_suffix('s') {
        push(stem.to_string());
    }
    for (from, to) in SYNONYMS {
        if *from == slug {
            push(to.to_string());
        }
    }
    out
}

impl Profile {
    /// Finds the node a disclosed label refers to: the disclosure leaf for the
    /// same emotion if it exists, else the shallowest node whose last segment
    /// matches the label, a singular form of it or a synonym.
    pub fn match_label(&self, emotion: EmotionCategory, label: &str) -> Option<String> {
        let slug = slugify(label);
        if slug.is_empty() {
            return None;
        }
        let own = format!("{DISCLOSED_ROOT}/{}/{slug}", emotion.name());
        if self.taxonomy.contains(&own) {
            return Some(own);
        }
        let names = variants(&slug);
        self.taxonomy
            .paths()
            .filter(|p| !p.is_empty() && names.iter().any(|n| n == last_segment(p)))
            .min_by(|a, b| depth_of(a).cmp(&depth_of(b)).then_with(|| a.cmp(b)))
            .map(str::to_string)
    }

    /// Applies a disclosure form and element ratings. Matched labels receive
    /// the emotion's quadrant centre as a known value; unmatched labels become
    /// new leaves under `disclosed/<emotion>/`. Identical input applied twice
    /// leaves the profile unchanged.
    pub fn ingest_disclosure(&self, form: &DisclosureForm, element_votes: &ElementVotes) -> Profile {
        let mut next = self.clone();
        for (emotion, labels) in form {
            let centre = quadrant_of(*emotion);
            for label in labels {
                let slug = slugify(label);
                if slug.is_empty() {
                    log::warn!("ignoring empty disclosure label `{label}`");
                    continue;
                }
                match next.match_label(*emotion, label) {
                    Some(path) if path == format!("{DISCLOSED_ROOT}/{}/{slug}", emotion.name()) => {}
                    Some(path) => {
                        let value = Some(LayeredAffect::known(centre));
                        let node = next.taxonomy.node(&path).expect("matched path exists");
                        if node.explicit_affect != value {
                            next.taxonomy.set_explicit(&path, value).expect("matched path exists");
                            next.record(format!("disclosed {emotion} for {path}"));
                        }
                    }
                    None => {
                        let path = format!("{DISCLOSED_ROOT}/{}/{slug}", emotion.name());
                        match next.taxonomy.insert_leaf(&path, centre) {
                            Ok(path) => next.record(format!("disclosed {emotion} for new {path}")),
                            Err(e) => log::warn!("could not file disclosure `{label}`: {e}"),
                        }
                    }
                }
            }
        }
        for (element, votes) in element_votes {
            let centres: Vec<VaPoint> = votes.iter().map(|c| quadrant_of(*c)).collect();
            let Some(mean) = VaPoint::mean(&centres) else {
                continue;
            };
            let value = LayeredAffect::known(mean);
            if next.element_overrides.get(element) != Some(&value) {
                next.element_overrides.insert(*element, value);
                next.record(format!("element {element} rated {mean}"));
            }
        }
        next
    }
}

#[cfg(test)]
mod tests {
    use super::super::Layer;
    use super::*;

    fn base() -> Profile {
        let mut p = Profile::empty("d");
        p.taxonomy.insert_leaf("object/balloon", VaPoint::new(0.4, 0.3)).unwrap();
        p.taxonomy.insert_leaf("animal/dog", VaPoint::new(0.5, 0.1)).unwrap();
        p
    }

    #[test]
    fn plural_label_matches_existing_node() {
        let form = DisclosureForm::from([(EmotionCategory::Happy, vec!["Balloons".to_string()])]);
        let p = base().ingest_disclosure(&form, &ElementVotes::new());
        assert_eq!(
            p.effective_affect("object/balloon").unwrap(),
            (VaPoint::new(0.5, 0.5), Layer::Known)
        );
        assert_eq!(p.history.len(), 1);
    }

    #[test]
    fn synonym_matches() {
        let form = DisclosureForm::from([(EmotionCategory::Relaxed, vec!["puppy".to_string()])]);
        let p = base().ingest_disclosure(&form, &ElementVotes::new());
        assert_eq!(p.effective_affect("animal/dog").unwrap().0, VaPoint::new(0.5, -0.5));
    }

    #[test]
    fn unmatched_label_creates_leaf() {
        let form = DisclosureForm::from([(EmotionCategory::Sad, vec!["my cat".to_string()])]);
        let p = base().ingest_disclosure(&form, &ElementVotes::new());
        assert_eq!(
            p.effective_affect("disclosed/sad/my-cat").unwrap(),
            (VaPoint::new(-0.5, -0.5), Layer::Generic)
        );
    }

    #[test]
    fn element_votes_average() {
        let votes = ElementVotes::from([(Element::Red, vec![EmotionCategory::Angry, EmotionCategory::Happy])]);
        let p = base().ingest_disclosure(&DisclosureForm::new(), &votes);
        assert_eq!(p.element_overrides[&Element::Red], LayeredAffect::known(VaPoint::new(0.0, 0.5)));
    }

    #[test]
    fn idempotent() {
        let form = DisclosureForm::from([
            (EmotionCategory::Happy, vec!["balloon".to_string(), "kites".to_string()]),
            (EmotionCategory::Sad, vec!["my cat".to_string(), "rain".to_string()]),
        ]);
        let votes = ElementVotes::from([(Element::Blue, vec![EmotionCategory::Relaxed])]);
        let once = base().ingest_disclosure(&form, &votes);
        let twice = once.ingest_disclosure(&form, &votes);
        assert_eq!(once, twice);
    }

    #[test]
    fn blank_labels_are_skipped() {
        let form = DisclosureForm::from([(EmotionCategory::Sad, vec!["  !! ".to_string()])]);
        assert_eq!(base().ingest_disclosure(&form, &ElementVotes::new()), base());
    }
}

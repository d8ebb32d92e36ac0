//! Demo taxonomy seeded from participant-reported emotional triggers.

use crate::affect::{quadrant_of, vote_mean, EmotionCategory, Votes};

use super::taxonomy::Taxonomy;
use super::Profile;

/// Typical triggers with vote counts (happy, relaxed, sad, angry).
pub const TRIGGER_VOTES: [(&str, Votes); 20] = [
    ("leisure/sports", [6, 3, 0, 0]),
    ("social/family", [5, 2, 0, 0]),
    ("leisure/food-and-drink", [5, 5, 0, 0]),
    ("nature/scenery", [5, 4, 2, 0]),
    ("leisure/traveling", [3, 0, 0, 0]),
    ("leisure/music", [2, 3, 0, 0]),
    ("work-life/work", [2, 2, 0, 0]),
    ("leisure/visual-leisure", [2, 5, 0, 0]),
    ("leisure/rest", [0, 2, 0, 0]),
    ("leisure/washing", [0, 2, 0, 0]),
    ("work-life/failure", [0, 0, 6, 2]),
    ("social/abusiveness", [0, 0, 4, 5]),
    ("world/global-problems", [0, 0, 4, 0]),
    ("social/partings", [0, 0, 2, 0]),
    ("social/loneliness", [0, 0, 2, 0]),
    ("world/injustice", [0, 0, 2, 4]),
    ("work-life/laziness", [0, 0, 2, 0]),
    ("work-life/stupidity", [0, 0, 0, 4]),
    ("world/noise", [0, 0, 0, 2]),
    ("world/traffic", [0, 0, 0, 2]),
];

/// Concrete drawable symbols, each seeded at one quadrant centre.
pub const SYMBOL_VOTES: [(&str, EmotionCategory); 12] = [
    ("object/balloon", EmotionCategory::Happy),
    ("object/present", EmotionCategory::Happy),
    ("nature/flower", EmotionCategory::Happy),
    ("nature/sun", EmotionCategory::Happy),
    ("animal/dog", EmotionCategory::Happy),
    ("nature/brook", EmotionCategory::Relaxed),
    ("nature/forest", EmotionCategory::Relaxed),
    ("object/grave", EmotionCategory::Sad),
    ("object/skull", EmotionCategory::Sad),
    ("nature/rain", EmotionCategory::Sad),
    ("object/gun", EmotionCategory::Angry),
    ("animal/snake", EmotionCategory::Angry),
];

pub fn demo_taxonomy() -> Taxonomy {
    let mut t = Taxonomy::new();
    for (path, votes) in TRIGGER_VOTES {
        let affect = vote_mean(&votes).expect("every trigger has votes");
        t.insert_leaf(path, affect).expect("demo paths are valid");
    }
    for (path, emotion) in SYMBOL_VOTES {
        t.insert_leaf(path, quadrant_of(emotion)).expect("demo paths are valid");
    }
    t
}

pub fn demo_profile(id: &str) -> Profile {
    Profile::new(id, demo_taxonomy())
}

//! Engine for turn-based human/robot co-painting: canvas analysis, emotion
//! inference in valence-arousal space, personalized visual-metaphor
//! selection, sketch composition and budgeted stroke planning.

pub mod affect;
pub mod canvas;
pub mod lines;
pub mod lexicon;
pub mod metaphor;
pub mod sketch;
pub mod user_model;

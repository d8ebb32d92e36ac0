//! The eight study images: every emotion painted once abstractly and once
//! representationally, for a viewer the system knows nothing about.

use std::path::{Path, PathBuf};

use copaint_core::affect::EmotionCategory;
use copaint_core::metaphor::MetaphorMode;
use serde::Serialize;

use crate::engine::{Engine, Rendering, ServiceError};

pub const STUDY_SIZE: u32 = 128;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StudyArtifact {
    pub emotion: EmotionCategory,
    pub mode: MetaphorMode,
    #[serde(flatten)]
    pub rendering: Rendering,
}

impl StudyArtifact {
    pub fn stem(&self) -> String {
        let mode = match self.mode {
            MetaphorMode::Abstract => "abstract",
            MetaphorMode::Representational => "representational",
        };
        format!("{}-{mode}", self.emotion.name())
    }
}

pub fn study_artifacts(engine: &Engine, size: u32) -> Result<Vec<StudyArtifact>, ServiceError> {
    let mut out = Vec::with_capacity(8);
    for emotion in EmotionCategory::ALL {
        for mode in [MetaphorMode::Abstract, MetaphorMode::Representational] {
            out.push(StudyArtifact {
                emotion,
                mode,
                rendering: engine.study_rendering(emotion, mode, size, size)?,
            });
        }
    }
    Ok(out)
}

/// Writes `<emotion>-<mode>.json` and `.svg` for each artifact plus an
/// `index.json`, and returns the written paths.
pub fn write_study(engine: &Engine, dir: &Path, size: u32) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let artifacts = study_artifacts(engine, size)?;
    let mut written = Vec::new();
    let mut index = Vec::new();
    for a in &artifacts {
        let stem = a.stem();
        let json = dir.join(format!("{stem}.json"));
        std::fs::write(&json, serde_json::to_vec_pretty(a)?)?;
        let svg = dir.join(format!("{stem}.svg"));
        std::fs::write(&svg, a.rendering.composition.to_svg())?;
        let d = &a.rendering.decision;
        index.push(serde_json::json!({
            "emotion": a.emotion,
            "mode": a.mode,
            "concept": d.concept,
            "recipe": d.recipe.as_ref().map(|r| r.signature()),
            "predictedAffect": d.predicted_affect,
            "strokes": a.rendering.stroke_plan.strokes.len(),
        }));
        written.extend([json, svg]);
    }
    let index_path = dir.join("index.json");
    std::fs::write(&index_path, serde_json::to_vec_pretty(&index)?)?;
    written.push(index_path);
    Ok(written)
}

use std::collections::BTreeMap;

use crate::user_model::taxonomy::{last_segment, slugify};

use super::{SketchError, VectorComposition};

/// Hand-drawn clip-art templates for the demo symbols.
const BUNDLED_ASSETS: &str = include_str!("../../data/assets.json");

/// Symbol slug to vector template.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AssetLibrary {
    templates: BTreeMap<String, VectorComposition>,
}

impl AssetLibrary {
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_ASSETS.as_bytes()).expect("bundled assets are valid")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, SketchError> {
        let raw: BTreeMap<String, VectorComposition> =
            serde_json::from_slice(bytes).map_err(|e| SketchError::InvalidAssets(e.to_string()))?;
        let mut templates = BTreeMap::new();
        for (name, template) in raw {
            let slug = slugify(&name);
            if slug != name {
                return Err(SketchError::InvalidAssets(format!("`{name}` is not a slug")));
            }
            if template.width == 0 || template.height == 0 {
                return Err(SketchError::InvalidAssets(format!("`{name}` has an empty canvas")));
            }
            templates.insert(slug, template);
        }
        Ok(Self { templates })
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }

    /// Looks a symbol up by the last segment of its path, also trying a
    /// singular form (`presents` finds `present`).
    pub fn get(&self, symbol: &str) -> Option<&VectorComposition> {
        let slug = slugify(last_segment(symbol));
        self.templates
            .get(&slug)
            .or_else(|| slug.strip_suffix('s').and_then(|s| self.templates.get(s)))
    }
}

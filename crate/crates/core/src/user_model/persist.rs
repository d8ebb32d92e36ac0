//! Versioned JSON persistence for profiles.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::affect::{Element, VaPoint};

use super::taxonomy::{normalize_path, parent_of, LayeredAffect, Taxonomy};
use super::{HistoryEntry, Profile};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum ProfileIoError {
    #[error("unsupported profile schema version {found:?}, expected {SCHEMA_VERSION}")]
    SchemaVersionMismatch { found: Option<u64> },
    #[error("profile parse error: {0}")]
    Parse(String),
    #[error("invalid profile: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct NodeDoc {
    path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    leaf_affect: Option<VaPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    explicit_affect: Option<LayeredAffect>,
    #[serde(default)]
    children: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ProfileDoc {
    version: u64,
    id: String,
    #[serde(default)]
    attributes: BTreeMap<String, String>,
    #[serde(default)]
    element_overrides: BTreeMap<Element, LayeredAffect>,
    taxonomy: NodeDoc,
    #[serde(default)]
    taboo: BTreeSet<String>,
    #[serde(default)]
    history: Vec<HistoryEntry>,
}

const PROFILE_FIELDS: [&str; 7] = [
    "version",
    "id",
    "attributes",
    "elementOverrides",
    "taxonomy",
    "taboo",
    "history",
];
const NODE_FIELDS: [&str; 4] = ["path", "leafAffect", "explicitAffect", "children"];

fn node_doc(t: &Taxonomy, path: &str) -> NodeDoc {
    let node = t.node(path).expect("path from taxonomy");
    NodeDoc {
        path: path.to_string(),
        leaf_affect: node.leaf_affect,
        explicit_affect: node.explicit_affect,
        children: node.children.iter().map(|c| node_doc(t, c)).collect(),
    }
}

pub fn save_profile(profile: &Profile) -> Vec<u8> {
    let doc = ProfileDoc {
        version: SCHEMA_VERSION,
        id: profile.id.clone(),
        attributes: profile.attributes.clone(),
        element_overrides: profile.element_overrides.clone(),
        taxonomy: node_doc(&profile.taxonomy, ""),
        taboo: profile.taboo.clone(),
        history: profile.history.clone(),
    };
    serde_json::to_vec_pretty(&doc).expect("profile serializes")
}

pub fn load_profile(bytes: &[u8]) -> Result<Profile, ProfileIoError> {
    let (profile, warnings) = load_profile_with_warnings(bytes)?;
    for w in warnings {
        log::warn!("{w}");
    }
    Ok(profile)
}

/// Loads a profile and reports the unknown fields that were ignored.
pub fn load_profile_with_warnings(bytes: &[u8]) -> Result<(Profile, Vec<String>), ProfileIoError> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| ProfileIoError::Parse(e.to_string()))?;
    let Value::Object(top) = &value else {
        return Err(ProfileIoError::Parse("profile must be a JSON object".into()));
    };
    match top.get("version").map(Value::as_u64) {
        Some(Some(SCHEMA_VERSION)) => {}
        Some(found) => return Err(ProfileIoError::SchemaVersionMismatch { found }),
        None => return Err(ProfileIoError::SchemaVersionMismatch { found: None }),
    }
    let mut warnings = Vec::new();
    for key in top.keys().filter(|k| !PROFILE_FIELDS.contains(&k.as_str())) {
        warnings.push(format!("ignoring unknown profile field `{key}`"));
    }
    if let Some(root) = top.get("taxonomy") {
        collect_unknown_node_fields(root, &mut warnings);
    }

    let doc: ProfileDoc = serde_json::from_value(value).map_err(|e| ProfileIoError::Parse(e.to_string()))?;
    let mut taxonomy = Taxonomy::new();
    if !doc.taxonomy.path.is_empty() {
        return Err(ProfileIoError::Invalid("taxonomy root must have the empty path".into()));
    }
    build(&mut taxonomy, &doc.taxonomy)?;

    let mut profile = Profile::new(doc.id, taxonomy);
    profile.attributes = doc.attributes;
    for (element, value) in doc.element_overrides {
        check_layered(&value, element.name())?;
        profile.element_overrides.insert(element, value);
    }
    for path in doc.taboo {
        profile
            .add_taboo(&path)
            .map_err(|_| ProfileIoError::Invalid(format!("taboo path `{path}` is not in the taxonomy")))?;
    }
    profile.history = doc.history;
    Ok((profile, warnings))
}

fn check_layered(value: &LayeredAffect, what: &str) -> Result<(), ProfileIoError> {
    let in_range = |x: f64| x.is_finite() && (-1.0..=1.0).contains(&x);
    if in_range(value.valence) && in_range(value.arousal) {
        Ok(())
    } else {
        Err(ProfileIoError::Invalid(format!("affect of `{what}` outside [-1, 1]")))
    }
}

fn collect_unknown_node_fields(node: &Value, warnings: &mut Vec<String>) {
    let Value::Object(map) = node else {
        return;
    };
    let path = map.get("path").and_then(Value::as_str).unwrap_or("?");
    for key in map.keys().filter(|k| !NODE_FIELDS.contains(&k.as_str())) {
        warnings.push(format!("ignoring unknown field `{key}` on taxonomy node `{path}`"));
    }
    if let Some(Value::Array(children)) = map.get("children") {
        for child in children {
            collect_unknown_node_fields(child, warnings);
        }
    }
}

fn build(t: &mut Taxonomy, doc: &NodeDoc) -> Result<(), ProfileIoError> {
    let invalid = |m: String| ProfileIoError::Invalid(m);
    let normalized = normalize_path(&doc.path).map_err(|e| invalid(e.to_string()))?;
    if normalized != doc.path {
        return Err(invalid(format!("path `{}` is not normalized", doc.path)));
    }
    if !doc.path.is_empty() {
        if t.contains(&doc.path) {
            return Err(invalid(format!("duplicate path `{}`", doc.path)));
        }
        t.insert(&doc.path).map_err(|e| invalid(e.to_string()))?;
    }
    if let Some(leaf) = doc.leaf_affect {
        if !doc.children.is_empty() {
            return Err(invalid(format!("`{}` has children and a leaf affect", doc.path)));
        }
        t.set_leaf_affect(&doc.path, leaf).map_err(|e| invalid(e.to_string()))?;
    }
    if let Some(explicit) = doc.explicit_affect {
        check_layered(&explicit, &doc.path)?;
        t.set_explicit(&doc.path, Some(explicit)).map_err(|e| invalid(e.to_string()))?;
    }
    for child in &doc.children {
        if parent_of(&child.path) != Some(doc.path.as_str()) {
            return Err(invalid(format!("`{}` is not a child of `{}`", child.path, doc.path)));
        }
        build(t, child)?;
    }
    Ok(())
}

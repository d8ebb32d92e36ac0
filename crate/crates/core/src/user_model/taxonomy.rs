//! Symbol taxonomy keyed by slash-delimited paths.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::UserModelError;
use crate::affect::VaPoint;

/// Which precedence level a resolved affect came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Generic,
    Stereotype,
    Known,
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layer::Generic => "generic",
            Layer::Stereotype => "stereotype",
            Layer::Known => "known",
        })
    }
}

/// An affect value tagged with the layer that installed it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayeredAffect {
    pub valence: f64,
    pub arousal: f64,
    pub layer: Layer,
}

impl LayeredAffect {
    pub fn new(affect: VaPoint, layer: Layer) -> Self {
        Self {
            valence: affect.valence,
            arousal: affect.arousal,
            layer,
        }
    }

    pub fn known(affect: VaPoint) -> Self {
        Self::new(affect, Layer::Known)
    }

    pub fn stereotype(affect: VaPoint) -> Self {
        Self::new(affect, Layer::Stereotype)
    }

    pub fn affect(&self) -> VaPoint {
        VaPoint::new(self.valence, self.arousal)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TaxonomyNode {
    /// Generic seed value; only leaves carry one.
    pub leaf_affect: Option<VaPoint>,
    /// Stereotype- or known-layer value overriding the generic resolution.
    pub explicit_affect: Option<LayeredAffect>,
    pub children: BTreeSet<String>,
}

impl TaxonomyNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Normalizes a user-supplied label to a lowercase, dash-separated slug.
pub fn slugify(label: &str) -> String {
    let mut slug = String::new();
    let mut dash = false;
    for c in label.trim().chars().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() {
            if dash && !slug.is_empty() {
                slug.push('-');
            }
            slug.push(c);
            dash = false;
        } else {
            dash = true;
        }
    }
    slug
}

/// Validates and normalizes a path: every segment must already be a slug.
pub fn normalize_path(path: &str) -> Result<String, UserModelError> {
    let trimmed = path.trim().trim_matches('/');
    if trimmed.is_empty() {
        return Ok(String::new());
    }
    let mut out = Vec::new();
    for segment in trimmed.split('/') {
        let slug = slugify(segment);
        if slug.is_empty() {
            return Err(UserModelError::InvalidPath(path.to_string()));
        }
        out.push(slug);
    }
    Ok(out.join("/"))
}

pub fn parent_of(path: &str) -> Option<&str> {
    if path.is_empty() {
        return None;
    }
    Some(path.rfind('/').map_or("", |i| &path[..i]))
}

pub fn depth_of(path: &str) -> usize {
    if path.is_empty() {
        0
    } else {
        path.split('/').count()
    }
}

pub fn last_segment(path: &str) -> &str {
    path.rsplit('/').next().unwrap_or(path)
}

/// Number of edges between two nodes in the tree.
pub fn hop_distance(a: &str, b: &str) -> usize {
    let sa: Vec<&str> = if a.is_empty() { vec![] } else { a.split('/').collect() };
    let sb: Vec<&str> = if b.is_empty() { vec![] } else { b.split('/').collect() };
    let common = sa.iter().zip(&sb).take_while(|(x, y)| x == y).count();
    sa.len() + sb.len() - 2 * common
}

/// Whether `path` equals `ancestor` or lies below it.
pub fn is_within(path: &str, ancestor: &str) -> bool {
    ancestor.is_empty()
        || path == ancestor
        || (path.len() > ancestor.len()
            && path.starts_with(ancestor)
            && path.as_bytes()[ancestor.len()] == b'/')
}

/// A rooted tree stored as a path-keyed map; the root has the empty path.
#[derive(Debug, Clone, PartialEq)]
pub struct Taxonomy {
    nodes: BTreeMap<String, TaxonomyNode>,
}

impl Default for Taxonomy {
    fn default() -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert(String::new(), TaxonomyNode::default());
        Self { nodes }
    }
}

impl Taxonomy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() <= 1
    }

    pub fn contains(&self, path: &str) -> bool {
        self.nodes.contains_key(path)
    }

    pub fn node(&self, path: &str) -> Option<&TaxonomyNode> {
        self.nodes.get(path)
    }

    pub fn root(&self) -> &TaxonomyNode {
        &self.nodes[""]
    }

    /// All paths in sorted order, root first.
    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &TaxonomyNode)> {
        self.nodes.iter().map(|(p, n)| (p.as_str(), n))
    }

    /// The node and all its descendants, in sorted path order.
    pub fn subtree<'a>(&'a self, path: &'a str) -> impl Iterator<Item = (&'a str, &'a TaxonomyNode)> + 'a {
        let own = self.nodes.get_key_value(path).into_iter();
        // descendants sort contiguously between "path/" and "path0"
        let below: Box<dyn Iterator<Item = (&String, &TaxonomyNode)> + 'a> = if path.is_empty() {
            Box::new(self.nodes.iter().skip(1))
        } else {
            Box::new(
                self.nodes
                    .range(format!("{path}/")..format!("{path}0")),
            )
        };
        own.chain(below).map(|(p, n)| (p.as_str(), n))
    }

    /// Seeded leaves of the subtree, in sorted path order.
    pub fn seeded_leaves<'a>(&'a self, path: &'a str) -> impl Iterator<Item = (&'a str, VaPoint)> + 'a {
        self.subtree(path)
            .filter(|(_, n)| n.is_leaf())
            .filter_map(|(p, n)| n.leaf_affect.map(|a| (p, a)))
    }

    /// Creates the node and any missing ancestors. Returns the normalized path.
    pub fn insert(&mut self, path: &str) -> Result<String, UserModelError> {
        let path = normalize_path(path)?;
        let mut current = String::new();
        for segment in path.split('/').filter(|s| !s.is_empty()) {
            let child = if current.is_empty() {
                segment.to_string()
            } else {
                format!("{current}/{segment}")
            };
            if !self.nodes.contains_key(&child) {
                let parent = self.nodes.get_mut(&current).expect("ancestors exist");
                if parent.leaf_affect.is_some() {
                    return Err(UserModelError::InvalidPath(format!(
                        "cannot add `{child}` below seeded leaf `{current}`"
                    )));
                }
                parent.children.insert(child.clone());
                self.nodes.insert(child.clone(), TaxonomyNode::default());
            }
            current = child;
        }
        Ok(path)
    }

    /// Inserts a leaf carrying a generic seed value.
    pub fn insert_leaf(&mut self, path: &str, affect: VaPoint) -> Result<String, UserModelError> {
        let path = self.insert(path)?;
        self.set_leaf_affect(&path, affect)?;
        Ok(path)
    }

    pub fn set_leaf_affect(&mut self, path: &str, affect: VaPoint) -> Result<(), UserModelError> {
        let node = self
            .nodes
            .get_mut(path)
            .ok_or_else(|| UserModelError::UnknownPath(path.to_string()))?;
        if !node.is_leaf() || path.is_empty() {
            return Err(UserModelError::InvalidPath(format!(
                "`{path}` is not a leaf"
            )));
        }
        node.leaf_affect = Some(affect);
        Ok(())
    }

    pub fn set_explicit(&mut self, path: &str, value: Option<LayeredAffect>) -> Result<(), UserModelError> {
        let node = self
            .nodes
            .get_mut(path)
            .ok_or_else(|| UserModelError::UnknownPath(path.to_string()))?;
        if let Some(v) = value {
            if v.layer == Layer::Generic {
                return Err(UserModelError::InvalidPath(format!(
                    "explicit affect on `{path}` must be stereotype or known"
                )));
            }
        }
        node.explicit_affect = value;
        Ok(())
    }

    /// Ancestors from the parent up to (excluding) the root.
    pub fn ancestors(path: &str) -> impl Iterator<Item = &str> {
        std::iter::successors(parent_of(path), |p| parent_of(p)).filter(|p| !p.is_empty())
    }
}

//! Declarative stereotype rules keyed on profile attributes.
//!
//! One rule per line:
//!
//! ```text
//! # comment
//! ageBand=senior => element:blue +0.1 +0.0
//! ageBand=child, locale=uk => animal/snake -0.2 +0.1
//! ```
//!
//! All predicates must hold. The shift is added to the generic value of the
//! target and written to the stereotype layer; known values are never touched.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::affect::{Element, ElementAffectTable, VaPoint};

use super::taxonomy::{normalize_path, Layer, LayeredAffect};
use super::Profile;

/// Illustrative rules shipped with the demo. Not based on any data.
pub const DEMO_STEREOTYPE_RULES: &str = include_str!("../../data/demo_stereotypes.rules");

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum StereotypeTarget {
    Element(Element),
    Path(String),
}

impl fmt::Display for StereotypeTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StereotypeTarget::Element(e) => write!(f, "element:{e}"),
            StereotypeTarget::Path(p) => f.write_str(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StereotypeRule {
    pub predicates: Vec<(String, String)>,
    pub target: StereotypeTarget,
    pub shift: (f64, f64),
}

impl StereotypeRule {
    pub fn matches(&self, attributes: &BTreeMap<String, String>) -> bool {
        self.predicates
            .iter()
            .all(|(k, v)| attributes.get(k).is_some_and(|have| have.eq_ignore_ascii_case(v)))
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("rules line {line}: {message}")]
pub struct RuleParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StereotypeRules {
    pub rules: Vec<StereotypeRule>,
}

impl StereotypeRules {
    pub fn demo() -> Self {
        Self::parse(DEMO_STEREOTYPE_RULES).expect("bundled rules are valid")
    }

    pub fn parse(text: &str) -> Result<Self, RuleParseError> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| RuleParseError { line: i + 1, message };
            let (lhs, rhs) = line
                .split_once("=>")
                .ok_or_else(|| err("expected `predicates => target dv da`".into()))?;
            let mut predicates = Vec::new();
            for pred in lhs.split(',') {
                let (k, v) = pred
                    .split_once('=')
                    .ok_or_else(|| err(format!("predicate `{}` is not key=value", pred.trim())))?;
                let (k, v) = (k.trim(), v.trim());
                if k.is_empty() || v.is_empty() {
                    return Err(err(format!("empty predicate `{}`", pred.trim())));
                }
                predicates.push((k.to_string(), v.to_string()));
            }
            let parts: Vec<&str> = rhs.split_whitespace().collect();
            let [target, dv, da] = parts[..] else {
                return Err(err("expected `target dv da` after `=>`".into()));
            };
            let target = match target.strip_prefix("element:") {
                Some(name) => StereotypeTarget::Element(name.parse().map_err(|e| err(format!("{e}")))?),
                None => StereotypeTarget::Path(normalize_path(target).map_err(|e| err(e.to_string()))?),
            };
            let number = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| err(format!("`{s}` is not a number")))
            };
            rules.push(StereotypeRule {
                predicates,
                target,
                shift: (number(dv)?, number(da)?),
            });
        }
        Ok(Self { rules })
    }

    /// Summed shift per target over the rules matching `attributes`.
    pub fn shifts(&self, attributes: &BTreeMap<String, String>) -> BTreeMap<StereotypeTarget, (f64, f64)> {
        let mut out: BTreeMap<StereotypeTarget, (f64, f64)> = BTreeMap::new();
        for rule in self.rules.iter().filter(|r| r.matches(attributes)) {
            let entry = out.entry(rule.target.clone()).or_default();
            entry.0 += rule.shift.0;
            entry.1 += rule.shift.1;
        }
        out
    }
}

impl Profile {
    /// Installs stereotype-layer values from the rules matching this profile's
    /// attributes. Targets with a known value, unknown paths and paths without
    /// generic data are skipped.
    pub fn apply_stereotypes(&self, rules: &StereotypeRules, generic: &ElementAffectTable) -> Profile {
        let mut next = self.clone();
        for (target, (dv, da)) in rules.shifts(&self.attributes) {
            let shifted = |base: VaPoint| LayeredAffect::stereotype(VaPoint::new(base.valence + dv, base.arousal + da));
            match &target {
                StereotypeTarget::Element(element) => {
                    if next.element_overrides.get(element).is_some_and(|v| v.layer == Layer::Known) {
                        continue;
                    }
                    let value = shifted(generic.get(*element));
                    if next.element_overrides.get(element) != Some(&value) {
                        next.element_overrides.insert(*element, value);
                        next.record(format!("stereotype {target}"));
                    }
                }
                StereotypeTarget::Path(path) => {
                    let Some(node) = next.taxonomy.node(path) else {
                        log::warn!("stereotype rule targets unknown path `{path}`");
                        continue;
                    };
                    if node.explicit_affect.is_some_and(|v| v.layer == Layer::Known) {
                        continue;
                    }
                    let Some(base) = next.generic_affect(path) else {
                        continue;
                    };
                    let value = Some(shifted(base));
                    if node.explicit_affect != value {
                        next.taxonomy.set_explicit(path, value).expect("path exists");
                        next.record(format!("stereotype {target}"));
                    }
                }
            }
        }
        next
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affect::build_generic_table;

    #[test]
    fn parses_rules_and_comments() {
        let rules = StereotypeRules::parse(
            "# header\n\nageBand=senior => element:blue +0.1 +0.0\nageBand=child, locale=uk => animal/snake -0.2 0.1 # trailing\n",
        )
        .unwrap();
        assert_eq!(rules.rules.len(), 2);
        assert_eq!(rules.rules[0].target, StereotypeTarget::Element(Element::Blue));
        assert_eq!(rules.rules[1].predicates.len(), 2);
        assert_eq!(rules.rules[1].shift, (-0.2, 0.1));
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = StereotypeRules::parse("a=b => element:blue 0.1 0\nbroken line\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(StereotypeRules::parse("a=b => element:teal 0 0").is_err());
        assert!(StereotypeRules::parse("a=b => x 0 zero").is_err());
        assert!(StereotypeRules::parse("a => x 0 0").is_err());
    }

    #[test]
    fn demo_rules_parse() {
        assert_eq!(StereotypeRules::demo().rules.len(), 2);
    }

    #[test]
    fn installs_only_where_nothing_is_known() {
        let generic = build_generic_table();
        let rules = StereotypeRules::parse("ageBand=senior => element:blue +0.1 +0.0\nageBand=senior => element:red 0 -0.1\nageBand=senior => a/b -0.5 0").unwrap();
        let mut p = Profile::empty("s");
        p.taxonomy.insert_leaf("a/b", VaPoint::new(0.5, 0.0)).unwrap();
        p.attributes.insert("ageBand".into(), "senior".into());
        p.element_overrides.insert(Element::Red, LayeredAffect::known(VaPoint::new(0.9, 0.9)));

        let q = p.apply_stereotypes(&rules, &generic);
        let blue = q.element_overrides[&Element::Blue];
        assert_eq!(blue.layer, Layer::Stereotype);
        assert!((blue.valence - (generic.get(Element::Blue).valence + 0.1)).abs() < 1e-12);
        assert_eq!(q.element_overrides[&Element::Red].layer, Layer::Known);
        assert_eq!(q.effective_affect("a/b").unwrap(), (VaPoint::new(0.0, 0.0), Layer::Stereotype));
        assert_eq!(q.apply_stereotypes(&rules, &generic), q);

        let mut young = p.clone();
        young.attributes.insert("ageBand".into(), "child".into());
        assert_eq!(young.apply_stereotypes(&rules, &generic), young);
    }
}

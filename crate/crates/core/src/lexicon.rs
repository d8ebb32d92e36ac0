//! Affective word lexicon: loading from `word,valence,arousal,concreteness`
//! CSV and nearest-affect concept lookup.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affect::VaPoint;

/// Small hand-scored lexicon covering all four quadrants. Demo data only;
/// the scores are not taken from any published norm set.
pub const DEMO_LEXICON_CSV: &str = include_str!("../data/demo_lexicon.csv");

pub const DEFAULT_MIN_CONCRETENESS: f64 = 3.5;

const HEADER: [&str; 4] = ["word", "valence", "arousal", "concreteness"];

#[derive(Debug, Error, PartialEq)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: {field} {value} outside [{min}, {max}]")]
    Range {
        line: u64,
        field: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("no lexicon entry satisfies the query")]
    EmptyResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LexiconEntry {
    pub word: String,
    pub raw_valence: f64,
    pub raw_arousal: f64,
    pub concreteness: f64,
    pub affect: VaPoint,
}

impl LexiconEntry {
    /// Maps 9-point ratings onto `[-1, 1]` with 5 as neutral.
    pub fn new(word: &str, raw_valence: f64, raw_arousal: f64, concreteness: f64) -> Self {
        Self {
            word: fold(word),
            raw_valence,
            raw_arousal,
            concreteness,
            affect: VaPoint::new((raw_valence - 5.0) / 4.0, (raw_arousal - 5.0) / 4.0),
        }
    }
}

fn fold(word: &str) -> String {
    word.trim().to_lowercase()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetaphorQuery {
    pub target: VaPoint,
    pub min_concreteness: f64,
    pub excluded: BTreeSet<String>,
    pub max_results: usize,
}

impl MetaphorQuery {
    pub fn new(target: VaPoint) -> Self {
        Self {
            target,
            min_concreteness: DEFAULT_MIN_CONCRETENESS,
            excluded: BTreeSet::new(),
            max_results: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexiconEntry>,
}

impl Lexicon {
    pub fn demo() -> Self {
        Self::from_csv(DEMO_LEXICON_CSV.as_bytes()).expect("bundled lexicon is valid")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&LexiconEntry> {
        self.entries.get(&fold(word))
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    /// Inserts an entry; an existing word is replaced.
    pub fn insert(&mut self, entry: LexiconEntry) -> Option<LexiconEntry> {
        self.entries.insert(entry.word.clone(), entry)
    }

    pub fn from_csv(bytes: &[u8]) -> Result<Self, LexiconError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(bytes);
        let headers = reader.headers().map_err(|e| LexiconError::Parse {
            line: 1,
            message: e.to_string(),
        })?;
        if headers.iter().collect::<Vec<_>>() != HEADER {
            return Err(LexiconError::Parse {
                line: 1,
                message: format!("expected header `{}`", HEADER.join(",")),
            });
        }

        let mut lexicon = Lexicon::default();
        for record in reader.records() {
            let record = record.map_err(|e| LexiconError::Parse {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let word = record.get(0).unwrap_or_default();
            if word.is_empty() {
                return Err(LexiconError::Parse {
                    line,
                    message: "empty word".into(),
                });
            }
            let number = |i: usize, field: &'static str, min: f64, max: f64| {
                let raw = record.get(i).unwrap_or_default();
                let value: f64 = raw.parse().map_err(|_| LexiconError::Parse {
                    line,
                    message: format!("{field} `{raw}` is not a number"),
                })?;
                if !(min..=max).contains(&value) {
                    return Err(LexiconError::Range {
                        line,
                        field,
                        value,
                        min,
                        max,
                    });
                }
                Ok(value)
            };
            let valence = number(1, "valence", 1.0, 9.0)?;
            let arousal = number(2, "arousal", 1.0, 9.0)?;
            let concreteness = number(3, "concreteness", 1.0, 5.0)?;
            let entry = LexiconEntry::new(word, valence, arousal, concreteness);
            if let Some(old) = lexicon.insert(entry) {
                log::warn!("line {line}: duplicate word `{}`, keeping the later row", old.word);
            }
        }
        Ok(lexicon)
    }

    /// Entries nearest to the target affect, filtered by concreteness and
    /// exclusions, ordered by distance then word.
    pub fn query(&self, query: &MetaphorQuery) -> Result<Vec<LexiconEntry>, LexiconError> {
        let excluded: BTreeSet<String> = query.excluded.iter().map(|w| fold(w)).collect();
        let limit = query.max_results.max(1);
        // max-heap holding the best `limit` candidates seen so far
        let mut heap: BinaryHeap<Ranked<'_>> = BinaryHeap::with_capacity(limit + 1);
        for entry in self.entries.values() {
            if entry.concreteness < query.min_concreteness || excluded.contains(&entry.word) {
                continue;
            }
            heap.push(Ranked {
                distance: entry.affect.distance(&query.target),
                entry,
            });
            if heap.len() > limit {
                heap.pop();
            }
        }
        if heap.is_empty() {
            return Err(LexiconError::EmptyResult);
        }
        Ok(heap
            .into_sorted_vec()
            .into_iter()
            .map(|r| r.entry.clone())
            .collect())
    }
}

struct Ranked<'a> {
    distance: f64,
    entry: &'a LexiconEntry,
}

impl Ord for Ranked<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then_with(|| self.entry.word.cmp(&other.entry.word))
    }
}

impl PartialOrd for Ranked<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Ranked<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked<'_> {}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Lexicon {
        let mut lex = Lexicon::default();
        for (w, v, a, c) in [
            ("puppy", 0.8, 0.5, 4.9),
            ("grave", -0.7, -0.3, 4.5),
            ("freedom", 0.7, 0.4, 1.5),
            ("balloon", 0.6, 0.4, 4.8),
        ] {
            lex.insert(LexiconEntry::new(w, v * 4.0 + 5.0, a * 4.0 + 5.0, c));
        }
        lex
    }

    #[test]
    fn normalization() {
        let lex = Lexicon::from_csv(b"word,valence,arousal,concreteness\npuppy,8.2,5.9,4.9\nfreedom,7.8,6.6,1.5\n").unwrap();
        let puppy = lex.get("puppy").unwrap();
        assert!((puppy.affect.valence - 0.8).abs() < 1e-12);
        assert!((puppy.affect.arousal - 0.225).abs() < 1e-12);
        assert_eq!(puppy.concreteness, 4.9);
        let freedom = lex.get("FREEDOM").unwrap();
        assert!((freedom.affect.valence - 0.7).abs() < 1e-12);
        assert!((freedom.affect.arousal - 0.4).abs() < 1e-12);
    }

    #[test]
    fn header_only_is_empty() {
        let lex = Lexicon::from_csv(b"word,valence,arousal,concreteness\n").unwrap();
        assert!(lex.is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = Lexicon::from_csv(b"word,valence,arousal,concreteness\nok,5,5,3\nbad,x,5,3\n").unwrap_err();
        assert!(matches!(err, LexiconError::Parse { line: 3, .. }), "{err:?}");
        let err = Lexicon::from_csv(b"word,valence,arousal,concreteness\nhot,5,5,7\n").unwrap_err();
        assert!(matches!(err, LexiconError::Range { line: 2, field: "concreteness", .. }));
        let err = Lexicon::from_csv(b"word,valence\nx,1\n").unwrap_err();
        assert!(matches!(err, LexiconError::Parse { line: 1, .. }));
        let err = Lexicon::from_csv(b"word,valence,arousal,concreteness\nx,1,2\n").unwrap_err();
        assert!(matches!(err, LexiconError::Parse { .. }));
    }

    #[test]
    fn duplicates_keep_last() {
        let lex = Lexicon::from_csv(b"word,valence,arousal,concreteness\nsun,9,5,5\nSun,1,5,5\n").unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.get("sun").unwrap().raw_valence, 1.0);
    }

    #[test]
    fn query_examples() {
        let lex = toy();
        let mut q = MetaphorQuery::new(VaPoint::new(0.7, 0.45));
        q.min_concreteness = 4.0;
        q.excluded.insert("puppy".into());
        let words: Vec<_> = lex.query(&q).unwrap().into_iter().map(|e| e.word).collect();
        assert_eq!(words, ["balloon"]);

        let mut q = MetaphorQuery::new(VaPoint::new(-0.7, -0.3));
        q.min_concreteness = 4.0;
        q.max_results = 3;
        assert_eq!(lex.query(&q).unwrap()[0].word, "grave");

        q.min_concreteness = 5.0;
        assert_eq!(lex.query(&q), Err(LexiconError::EmptyResult));
    }

    #[test]
    fn ties_break_alphabetically() {
        let mut lex = Lexicon::default();
        lex.insert(LexiconEntry::new("zebra", 6.0, 5.0, 5.0));
        lex.insert(LexiconEntry::new("apple", 4.0, 5.0, 5.0));
        let mut q = MetaphorQuery::new(VaPoint::NEUTRAL);
        q.max_results = 2;
        let words: Vec<_> = lex.query(&q).unwrap().into_iter().map(|e| e.word).collect();
        assert_eq!(words, ["apple", "zebra"]);
    }

    #[test]
    fn demo_lexicon_loads() {
        let lex = Lexicon::demo();
        assert!(lex.len() >= 55);
        for word in ["grave", "balloon", "brook", "gun", "present"] {
            assert!(lex.get(word).is_some(), "{word}");
        }
    }
}

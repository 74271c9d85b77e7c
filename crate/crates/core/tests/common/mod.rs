//! Fixture paths and brute-force oracles that read the raw JSON records
//! without going through the library's model types.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde_json::Value;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn read_lines(rel: &str) -> Vec<Value> {
    std::fs::read_to_string(fixture(rel))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// One lexical unit as seen by the oracle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RawLu {
    pub frame: String,
    pub name: String,
}

impl RawLu {
    pub fn lemma(&self) -> &str {
        self.name.rsplit_once('.').unwrap().0
    }
    pub fn pos(&self) -> &str {
        self.name.rsplit_once('.').unwrap().1
    }
    pub fn is_mwe(&self) -> bool {
        self.lemma().trim().contains(' ')
    }
}

pub struct RawData {
    pub lus: Vec<RawLu>,
    pub counts: BTreeMap<(String, String), usize>,
}

impl RawData {
    pub fn new(lexicon: &[Value], corpus: &[Value]) -> Self {
        let mut lus = Vec::new();
        for f in lexicon {
            let frame = f["frame"].as_str().unwrap();
            for lu in f["lus"].as_array().unwrap() {
                lus.push(RawLu {
                    frame: frame.to_string(),
                    name: lu.as_str().unwrap().to_string(),
                });
            }
        }
        let mut counts = BTreeMap::new();
        for s in corpus {
            let key = (
                s["frame"].as_str().unwrap().to_string(),
                s["lu"].as_str().unwrap().to_string(),
            );
            *counts.entry(key).or_insert(0) += 1;
        }
        RawData { lus, counts }
    }

    pub fn load(dir: &str) -> Self {
        RawData::new(
            &read_lines(&format!("{dir}/lexicon.jsonl")),
            &read_lines(&format!("{dir}/corpus.jsonl")),
        )
    }

    pub fn count(&self, lu: &RawLu) -> usize {
        self.counts
            .get(&(lu.frame.clone(), lu.name.clone()))
            .copied()
            .unwrap_or(0)
    }

    pub fn empty(&self) -> Vec<&RawLu> {
        let mut v: Vec<&RawLu> = self.lus.iter().filter(|l| self.count(l) == 0).collect();
        v.sort();
        v
    }

    /// Enumerates every candidate and keeps the maximum; ties keep the
    /// smallest name.
    pub fn sister(&self, empty: &RawLu) -> Option<(&RawLu, usize)> {
        if empty.is_mwe() {
            return None;
        }
        let mut cands: Vec<(&RawLu, usize)> = self
            .lus
            .iter()
            .filter(|c| c.frame == empty.frame && c.name != empty.name && c.pos() == empty.pos())
            .filter(|c| !c.is_mwe())
            .map(|c| (c, self.count(c)))
            .filter(|(_, n)| *n > 0)
            .collect();
        cands.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.name.cmp(&b.0.name)));
        cands.first().copied()
    }

    /// True when some same-POS annotated unit exists but all are MWEs.
    pub fn blocked_by_mwe(&self, empty: &RawLu) -> bool {
        self.sister(empty).is_none()
            && self.lus.iter().any(|c| {
                c.frame == empty.frame
                    && c.name != empty.name
                    && c.pos() == empty.pos()
                    && c.is_mwe()
                    && self.count(c) > 0
            })
    }
}

/// Expected augmentation counts: (empty, mwe_excluded, no_sister, eligible,
/// sentences).
pub fn oracle_stats(raw: &RawData) -> (usize, usize, usize, usize, usize) {
    let empty = raw.empty();
    let mut mwe = 0;
    let mut none = 0;
    let mut eligible = 0;
    let mut sentences = 0;
    for lu in &empty {
        if lu.is_mwe() || raw.blocked_by_mwe(lu) {
            mwe += 1;
        } else if let Some((_, n)) = raw.sister(lu) {
            eligible += 1;
            sentences += n;
        } else {
            none += 1;
        }
    }
    (empty.len(), mwe, none, eligible, sentences)
}

/// Substring by code-point offsets.
pub fn chars(s: &str, start: usize, end: usize) -> String {
    s.chars().skip(start).take(end - start).collect()
}

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{FeatureBundle, Number, VerbForm};

const BUNDLED: &str = include_str!("../../data/irregulars.jsonl");

#[derive(Debug, Error)]
pub enum IrregularError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbForms {
    pub past: String,
    pub past_participle: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub third_sg: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gerund: Option<String>,
}

#[derive(Debug, Deserialize)]
struct Record {
    lemma: String,
    pos: String,
    forms: BTreeMap<String, String>,
}

/// Irregular noun plurals and verb forms, keyed by lowercase lemma.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IrregularLexicon {
    nouns: BTreeMap<String, String>,
    verbs: BTreeMap<String, VerbForms>,
}

impl IrregularLexicon {
    /// The table shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED.as_bytes()).expect("bundled irregular table is well-formed")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IrregularError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| IrregularError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(std::io::BufReader::new(file))
    }

    pub fn parse(reader: impl BufRead) -> Result<Self, IrregularError> {
        let mut table = IrregularLexicon::default();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| IrregularError::Parse {
                line: line_no,
                reason: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let err = |reason: String| IrregularError::Parse {
                line: line_no,
                reason,
            };
            let mut rec: Record = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
            if rec.lemma.trim().is_empty() {
                return Err(err("empty lemma".into()));
            }
            if let Some((k, _)) = rec.forms.iter().find(|(_, v)| v.trim().is_empty()) {
                return Err(err(format!("empty form for {k:?}")));
            }
            let lemma = rec.lemma.to_lowercase();
            match rec.pos.as_str() {
                "n" => {
                    let plural = rec
                        .forms
                        .remove("plural")
                        .ok_or_else(|| err("noun entry needs a \"plural\" form".into()))?;
                    if let Some(k) = rec.forms.keys().next() {
                        return Err(err(format!("unexpected noun form {k:?}")));
                    }
                    table.nouns.insert(lemma, plural);
                }
                "v" => {
                    let mut take = |k: &str| rec.forms.remove(k);
                    let (Some(past), Some(past_participle)) = (take("past"), take("past_participle"))
                    else {
                        return Err(err("verb entry needs \"past\" and \"past_participle\"".into()));
                    };
                    let forms = VerbForms {
                        past,
                        past_participle,
                        third_sg: take("third_sg"),
                        gerund: take("gerund"),
                    };
                    if let Some(k) = rec.forms.keys().next() {
                        return Err(err(format!("unexpected verb form {k:?}")));
                    }
                    table.verbs.insert(lemma, forms);
                }
                other => return Err(err(format!("pos must be \"n\" or \"v\", got {other:?}"))),
            }
        }
        Ok(table)
    }

    /// Entries of `other` replace same-lemma entries of `self`.
    pub fn merge(&mut self, other: IrregularLexicon) {
        self.nouns.extend(other.nouns);
        self.verbs.extend(other.verbs);
    }

    pub fn noun_plural(&self, lemma: &str) -> Option<&str> {
        self.nouns.get(&lemma.to_lowercase()).map(String::as_str)
    }

    pub fn verb(&self, lemma: &str) -> Option<&VerbForms> {
        self.verbs.get(&lemma.to_lowercase())
    }

    pub fn contains(&self, lemma: &str) -> bool {
        let l = lemma.to_lowercase();
        self.nouns.contains_key(&l) || self.verbs.contains_key(&l)
    }

    /// The listed form for `bundle`, if the table has one.
    pub fn form(&self, lemma: &str, bundle: FeatureBundle) -> Option<&str> {
        match bundle {
            FeatureBundle::Noun(Number::Plural) => self.noun_plural(lemma),
            FeatureBundle::Verb(form) => {
                let v = self.verb(lemma)?;
                match form {
                    VerbForm::Past => Some(&v.past),
                    VerbForm::PastParticiple => Some(&v.past_participle),
                    VerbForm::ThirdSg => v.third_sg.as_deref(),
                    VerbForm::Gerund => v.gerund.as_deref(),
                    VerbForm::Base => None,
                }
            }
            _ => None,
        }
    }

    pub fn noun_count(&self) -> usize {
        self.nouns.len()
    }

    pub fn verb_count(&self) -> usize {
        self.verbs.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_size() {
        let t = IrregularLexicon::bundled();
        assert!(t.verb_count() >= 200, "{}", t.verb_count());
        assert!(t.noun_count() >= 50, "{}", t.noun_count());
        assert_eq!(t.noun_plural("ox"), Some("oxen"));
        assert_eq!(t.verb("bring").unwrap().past, "brought");
        assert_eq!(t.verb("Bend").unwrap().past, "bent");
    }

    #[test]
    fn merge_overrides() {
        let mut t = IrregularLexicon::bundled();
        let user = IrregularLexicon::parse(
            br#"{"lemma": "dream", "pos": "v", "forms": {"past": "dreamt", "past_participle": "dreamt"}}
{"lemma": "ox", "pos": "n", "forms": {"plural": "oxes"}}"#
                .as_slice(),
        )
        .unwrap();
        t.merge(user);
        assert_eq!(t.verb("dream").unwrap().past, "dreamt");
        assert_eq!(t.noun_plural("ox"), Some("oxes"));
    }

    #[test]
    fn rejects_bad_records() {
        for bad in [
            r#"{"lemma": "x", "pos": "adj", "forms": {"plural": "xs"}}"#,
            r#"{"lemma": "x", "pos": "v", "forms": {"past": "xd"}}"#,
            r#"{"lemma": "x", "pos": "n", "forms": {"plural": ""}}"#,
            r#"{"lemma": "x", "pos": "n", "forms": {"plural": "xs", "past": "y"}}"#,
            "not json",
        ] {
            let err = IrregularLexicon::parse(format!("\n{bad}\n").as_bytes()).unwrap_err();
            assert!(matches!(err, IrregularError::Parse { line: 2, .. }), "{bad}");
        }
    }
}

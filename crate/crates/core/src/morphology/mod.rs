//! Feature analysis and inflection for transferring a target word between
//! lexical units while keeping number, tense and person agreement.
//!
//! [`Morphology::analyze`] recovers which form of its lemma a token is;
//! [`Morphology::inflect`] produces that form for another lemma. The
//! irregular table is consulted before the regular suffix rules. With
//! irregulars disabled, inflection uses the regular rules only, so `bend`
//! in the past comes out as `bended`.

mod irregular;
mod rules;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Pos;

pub use irregular::{IrregularError, IrregularLexicon, VerbForms};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphError {
    #[error("{token:?} is not a recognized form of {lemma}.{pos}")]
    FormMismatch {
        token: String,
        lemma: String,
        pos: Pos,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Number {
    Singular,
    Plural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerbForm {
    Base,
    ThirdSg,
    Past,
    PastParticiple,
    Gerund,
}

/// Morphological features of a token. The variant fixes which part of
/// speech the features belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum FeatureBundle {
    Noun(Number),
    Verb(VerbForm),
    /// Adjectives, adverbs and everything else carry no inflection.
    Uninflected,
}

const NOUN_BUNDLES: [FeatureBundle; 2] = [
    FeatureBundle::Noun(Number::Singular),
    FeatureBundle::Noun(Number::Plural),
];

// Analysis order: the first match wins, so regular past participles collapse
// onto `Past`.
const VERB_BUNDLES: [FeatureBundle; 5] = [
    FeatureBundle::Verb(VerbForm::Base),
    FeatureBundle::Verb(VerbForm::ThirdSg),
    FeatureBundle::Verb(VerbForm::Past),
    FeatureBundle::Verb(VerbForm::PastParticiple),
    FeatureBundle::Verb(VerbForm::Gerund),
];

impl FeatureBundle {
    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureBundle::Noun(Number::Singular) => "singular",
            FeatureBundle::Noun(Number::Plural) => "plural",
            FeatureBundle::Verb(VerbForm::Base) => "base",
            FeatureBundle::Verb(VerbForm::ThirdSg) => "third_sg",
            FeatureBundle::Verb(VerbForm::Past) => "past",
            FeatureBundle::Verb(VerbForm::PastParticiple) => "past_participle",
            FeatureBundle::Verb(VerbForm::Gerund) => "gerund",
            FeatureBundle::Uninflected => "none",
        }
    }

    /// Bundles whose surface form is the lemma itself.
    pub fn is_lemma_form(&self) -> bool {
        matches!(
            self,
            FeatureBundle::Noun(Number::Singular)
                | FeatureBundle::Verb(VerbForm::Base)
                | FeatureBundle::Uninflected
        )
    }

    pub fn is_licensed_by(&self, pos: &Pos) -> bool {
        match self {
            FeatureBundle::Noun(_) => *pos == Pos::Noun,
            FeatureBundle::Verb(_) => *pos == Pos::Verb,
            FeatureBundle::Uninflected => !matches!(pos, Pos::Noun | Pos::Verb),
        }
    }

    /// Every bundle licensed by `pos`, in analysis order.
    pub fn candidates(pos: &Pos) -> &'static [FeatureBundle] {
        match pos {
            Pos::Noun => &NOUN_BUNDLES,
            Pos::Verb => &VERB_BUNDLES,
            _ => &[FeatureBundle::Uninflected],
        }
    }
}

impl fmt::Display for FeatureBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureBundle {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NOUN_BUNDLES
            .iter()
            .chain(VERB_BUNDLES.iter())
            .chain(std::iter::once(&FeatureBundle::Uninflected))
            .find(|b| b.as_str() == s)
            .copied()
            .ok_or_else(|| format!("unknown feature bundle {s:?}"))
    }
}

impl From<FeatureBundle> for String {
    fn from(b: FeatureBundle) -> String {
        b.as_str().to_string()
    }
}

impl TryFrom<String> for FeatureBundle {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Inflection engine: an irregular table plus the switch deciding whether
/// inflection may use it.
#[derive(Debug, Clone)]
pub struct Morphology {
    irregulars: IrregularLexicon,
    use_irregulars: bool,
}

impl Default for Morphology {
    fn default() -> Self {
        Self::bundled()
    }
}

impl Morphology {
    pub fn new(irregulars: IrregularLexicon, use_irregulars: bool) -> Self {
        Morphology {
            irregulars,
            use_irregulars,
        }
    }

    /// Bundled irregular table, irregulars enabled.
    pub fn bundled() -> Self {
        Self::new(IrregularLexicon::bundled(), true)
    }

    pub fn with_irregulars(mut self, use_irregulars: bool) -> Self {
        self.use_irregulars = use_irregulars;
        self
    }

    pub fn uses_irregulars(&self) -> bool {
        self.use_irregulars
    }

    pub fn irregulars(&self) -> &IrregularLexicon {
        &self.irregulars
    }

    /// Finds the feature bundle under which `lemma` surfaces as `token`.
    ///
    /// The bare lemma wins first (so "put" is a base form, not a past).
    /// Then irregular forms are tried for every bundle before any regular
    /// form. Both are always considered regardless of the inflection switch,
    /// so a corpus token like "bended" still analyzes as a past form.
    pub fn analyze(&self, token: &str, lemma: &str, pos: &Pos) -> Result<FeatureBundle, MorphError> {
        let candidates = FeatureBundle::candidates(pos);
        let matches = |form: &str| form.to_lowercase() == token.to_lowercase();
        if !token.is_empty() {
            let found = candidates
                .iter()
                .find(|&&b| b.is_lemma_form() && matches(lemma))
                .or_else(|| {
                    candidates
                        .iter()
                        .find(|&&b| self.irregulars.form(lemma, b).is_some_and(matches))
                })
                .or_else(|| {
                    candidates
                        .iter()
                        .find(|&&b| matches(&rules::regular_form(lemma, b)))
                });
            if let Some(&b) = found {
                return Ok(b);
            }
        }
        Err(MorphError::FormMismatch {
            token: token.to_string(),
            lemma: lemma.to_string(),
            pos: pos.clone(),
        })
    }

    /// Produces the form of `lemma` carrying `features`.
    pub fn inflect(&self, lemma: &str, features: FeatureBundle) -> String {
        if self.use_irregulars {
            if let Some(form) = self.irregulars.form(lemma, features) {
                return form.to_string();
            }
        }
        rules::regular_form(lemma, features)
    }

    /// The regular-rule form, ignoring the irregular table.
    pub fn regular_form(&self, lemma: &str, features: FeatureBundle) -> String {
        rules::regular_form(lemma, features)
    }

    /// Re-expresses `sister_token` (a form of `sister_lemma`) as the same form
    /// of `new_lemma`, copying an initial capital.
    pub fn match_form(
        &self,
        sister_token: &str,
        sister_lemma: &str,
        new_lemma: &str,
        pos: &Pos,
    ) -> Result<(String, FeatureBundle), MorphError> {
        let features = self.analyze(sister_token, sister_lemma, pos)?;
        let mut form = self.inflect(new_lemma, features);
        if sister_token.chars().next().is_some_and(char::is_uppercase) {
            form = capitalize(&form);
        }
        Ok((form, features))
    }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

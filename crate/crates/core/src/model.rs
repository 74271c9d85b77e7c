//! In-memory frame lexicon and annotation corpus.
//!
//! A [`Lexicon`] holds frames, their frame elements and their lexical units.
//! A [`Corpus`] holds [`AnnotationSet`]s, each one sentence annotated for a
//! single lexical unit with one target span and a single layer of
//! frame-element spans. Both are immutable once built.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morphology::Morphology;
use crate::text;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("malformed lexical unit name {0:?}: expected \"lemma.pos\"")]
    MalformedLuName(String),
    #[error("empty span [{0}, {1})")]
    EmptySpan(usize, usize),
    #[error("duplicate frame {0:?}")]
    DuplicateFrame(String),
    #[error("duplicate lexical unit {lu:?} in frame {frame:?}")]
    DuplicateLu { frame: String, lu: String },
    #[error("duplicate frame element {fe:?} in frame {frame:?}")]
    DuplicateFe { frame: String, fe: String },
    #[error("duplicate annotation id {0:?}")]
    DuplicateId(String),
}

/// Half-open code-point interval `[start, end)` with `start < end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "(usize, usize)", try_from = "(usize, usize)")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Result<Self, ModelError> {
        if start < end {
            Ok(Span { start, end })
        } else {
            Err(ModelError::EmptySpan(start, end))
        }
    }

    pub(crate) fn new_unchecked(start: usize, end: usize) -> Self {
        debug_assert!(start < end);
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Overlapping without either containing the other's whole extent, as
    /// seen from `self` being the frame-element side: `self` must be disjoint
    /// from `target` or contain it.
    pub fn partially_overlaps(&self, target: &Span) -> bool {
        self.overlaps(target) && !self.contains(target)
    }
}

impl From<Span> for (usize, usize) {
    fn from(s: Span) -> Self {
        (s.start, s.end)
    }
}

impl TryFrom<(usize, usize)> for Span {
    type Error = ModelError;
    fn try_from((start, end): (usize, usize)) -> Result<Self, Self::Error> {
        Span::new(start, end)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

/// Part of speech, taken from the suffix of a lexical unit name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pos {
    Verb,
    Noun,
    Adjective,
    Adverb,
    Preposition,
    Numeral,
    Other(String),
}

impl Pos {
    /// Parses a suffix tag case-insensitively; unknown tags become `Other`.
    pub fn from_tag(tag: &str) -> Pos {
        let tag = tag.to_lowercase();
        match tag.as_str() {
            "v" => Pos::Verb,
            "n" => Pos::Noun,
            "a" => Pos::Adjective,
            "adv" => Pos::Adverb,
            "prep" => Pos::Preposition,
            "num" => Pos::Numeral,
            _ => Pos::Other(tag),
        }
    }

    pub fn tag(&self) -> &str {
        match self {
            Pos::Verb => "v",
            Pos::Noun => "n",
            Pos::Adjective => "a",
            Pos::Adverb => "adv",
            Pos::Preposition => "prep",
            Pos::Numeral => "num",
            Pos::Other(t) => t,
        }
    }

    /// Whether annotation for this part of speech may be transferred.
    pub fn is_known(&self) -> bool {
        !matches!(self, Pos::Other(_))
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Splits `"lemma.pos"` on its final dot.
pub fn parse_lu_name(name: &str) -> Result<(String, Pos), ModelError> {
    match name.rsplit_once('.') {
        Some((lemma, tag)) if !lemma.is_empty() && !tag.is_empty() => {
            Ok((lemma.to_string(), Pos::from_tag(tag)))
        }
        _ => Err(ModelError::MalformedLuName(name.to_string())),
    }
}

pub fn format_lu_name(lemma: &str, pos: &Pos) -> String {
    format!("{lemma}.{}", pos.tag())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LexicalUnit {
    pub name: String,
    pub lemma: String,
    pub pos: Pos,
    pub frame: String,
}

impl LexicalUnit {
    pub fn new(name: &str, frame: &str) -> Result<Self, ModelError> {
        let (lemma, pos) = parse_lu_name(name)?;
        Ok(LexicalUnit {
            name: format_lu_name(&lemma, &pos),
            lemma,
            pos,
            frame: frame.to_string(),
        })
    }

    pub fn is_mwe(&self) -> bool {
        is_mwe(&self.lemma)
    }
}

/// A lemma is a multiword expression when it has an internal space.
/// Hyphenated forms such as "flying-boot" are single tokens.
pub fn is_mwe(lemma: &str) -> bool {
    lemma.trim().contains(' ')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coreness {
    Core,
    Peripheral,
    ExtraThematic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameElementDef {
    pub name: String,
    pub coreness: Coreness,
    pub frame: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub name: String,
    pub fe_defs: Vec<FrameElementDef>,
    pub lus: Vec<LexicalUnit>,
}

impl Frame {
    pub fn fe(&self, name: &str) -> Option<&FrameElementDef> {
        self.fe_defs.iter().find(|fe| fe.name == name)
    }

    pub fn lu(&self, name: &str) -> Option<&LexicalUnit> {
        self.lus.iter().find(|lu| lu.name == name)
    }
}

/// The frame inventory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    frames: Vec<Frame>,
    index: HashMap<String, usize>,
}

impl Lexicon {
    pub fn new(frames: Vec<Frame>) -> Result<Self, ModelError> {
        let mut index = HashMap::with_capacity(frames.len());
        for (i, frame) in frames.iter().enumerate() {
            if index.insert(frame.name.clone(), i).is_some() {
                return Err(ModelError::DuplicateFrame(frame.name.clone()));
            }
            check_frame(frame)?;
        }
        Ok(Lexicon { frames, index })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, name: &str) -> Option<&Frame> {
        self.index.get(name).map(|&i| &self.frames[i])
    }

    pub fn lu(&self, frame: &str, lu: &str) -> Option<&LexicalUnit> {
        self.frame(frame)?.lu(lu)
    }

    pub fn lus(&self) -> impl Iterator<Item = &LexicalUnit> {
        self.frames.iter().flat_map(|f| f.lus.iter())
    }

    pub fn lu_count(&self) -> usize {
        self.frames.iter().map(|f| f.lus.len()).sum()
    }
}

pub(crate) fn check_frame(frame: &Frame) -> Result<(), ModelError> {
    for (i, fe) in frame.fe_defs.iter().enumerate() {
        if frame.fe_defs[..i].iter().any(|o| o.name == fe.name) {
            return Err(ModelError::DuplicateFe {
                frame: frame.name.clone(),
                fe: fe.name.clone(),
            });
        }
    }
    for (i, lu) in frame.lus.iter().enumerate() {
        if frame.lus[..i].iter().any(|o| o.name == lu.name) {
            return Err(ModelError::DuplicateLu {
                frame: frame.name.clone(),
                lu: lu.name.clone(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeSpan {
    #[serde(rename = "name")]
    pub fe_name: String,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Lexicographic,
    Fulltext,
    Augmented,
}

/// One sentence annotated for one lexical unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub id: String,
    pub frame: String,
    #[serde(rename = "lu")]
    pub lu_name: String,
    pub sentence: String,
    pub target: Span,
    pub fes: Vec<FeSpan>,
    pub source: Source,
}

impl AnnotationSet {
    pub fn target_text(&self) -> Option<&str> {
        text::slice(&self.sentence, self.target)
    }

    pub fn fe_text(&self, fe: &FeSpan) -> Option<&str> {
        text::slice(&self.sentence, fe.span)
    }
}

/// Annotation sets indexed by id and by `(frame, lu)`, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    sets: Vec<AnnotationSet>,
    by_id: HashMap<String, usize>,
    by_lu: BTreeMap<(String, String), Vec<usize>>,
}

impl Corpus {
    pub fn new(sets: Vec<AnnotationSet>) -> Result<Self, ModelError> {
        let mut corpus = Corpus::default();
        for set in sets {
            corpus.push(set)?;
        }
        Ok(corpus)
    }

    pub(crate) fn push(&mut self, set: AnnotationSet) -> Result<(), ModelError> {
        if self.by_id.contains_key(&set.id) {
            return Err(ModelError::DuplicateId(set.id));
        }
        let i = self.sets.len();
        self.by_id.insert(set.id.clone(), i);
        self.by_lu
            .entry((set.frame.clone(), set.lu_name.clone()))
            .or_default()
            .push(i);
        self.sets.push(set);
        Ok(())
    }

    pub fn sets(&self) -> &[AnnotationSet] {
        &self.sets
    }

    pub fn into_sets(self) -> Vec<AnnotationSet> {
        self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&AnnotationSet> {
        self.by_id.get(id).map(|&i| &self.sets[i])
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    /// Annotation sets of one lexical unit, in corpus order.
    pub fn sets_for<'a>(
        &'a self,
        frame: &str,
        lu: &str,
    ) -> impl Iterator<Item = &'a AnnotationSet> + 'a {
        self.by_lu
            .get(&(frame.to_string(), lu.to_string()))
            .into_iter()
            .flatten()
            .map(move |&i| &self.sets[i])
    }

    pub fn count_for(&self, frame: &str, lu: &str) -> usize {
        self.by_lu
            .get(&(frame.to_string(), lu.to_string()))
            .map_or(0, Vec::len)
    }

    /// Concatenates corpora; ids must stay unique.
    pub fn merged(corpora: impl IntoIterator<Item = Corpus>) -> Result<Corpus, ModelError> {
        Corpus::new(corpora.into_iter().flat_map(Corpus::into_sets).collect())
    }
}

/// Names of the checks [`validate`] performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    UnknownFrame,
    UnknownLu,
    UnknownFe,
    SpanOutOfBounds,
    SpanNotTokenAligned,
    PartialTargetOverlap,
    FeOverlap,
    TargetFormMismatch,
}

impl Rule {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rule::UnknownFrame => "unknown_frame",
            Rule::UnknownLu => "unknown_lu",
            Rule::UnknownFe => "unknown_fe",
            Rule::SpanOutOfBounds => "span_out_of_bounds",
            Rule::SpanNotTokenAligned => "span_not_token_aligned",
            Rule::PartialTargetOverlap => "partial_target_overlap",
            Rule::FeOverlap => "fe_overlap",
            Rule::TargetFormMismatch => "target_form_mismatch",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Issue {
    pub id: String,
    pub rule: Rule,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Severity {
    Error,
    Warning,
}

/// Checks every corpus invariant against `lexicon`, using the bundled
/// irregular-form table for the target-form check.
pub fn validate(lexicon: &Lexicon, corpus: &Corpus) -> ValidationReport {
    validate_with(lexicon, corpus, &Morphology::bundled())
}

pub fn validate_with(lexicon: &Lexicon, corpus: &Corpus, morph: &Morphology) -> ValidationReport {
    let mut report = ValidationReport::default();
    for set in corpus.sets() {
        for (severity, rule, message) in check_set(lexicon, set, morph) {
            let issue = Issue {
                id: set.id.clone(),
                rule,
                message,
            };
            match severity {
                Severity::Error => report.errors.push(issue),
                Severity::Warning => report.warnings.push(issue),
            }
        }
    }
    report.errors.sort();
    report.warnings.sort();
    report
}

pub(crate) fn check_set(
    lexicon: &Lexicon,
    set: &AnnotationSet,
    morph: &Morphology,
) -> Vec<(Severity, Rule, String)> {
    use Severity::*;
    let mut out = Vec::new();
    let Some(frame) = lexicon.frame(&set.frame) else {
        out.push((Error, Rule::UnknownFrame, format!("frame {:?} not in lexicon", set.frame)));
        return out;
    };
    let lu = frame.lu(&set.lu_name);
    if lu.is_none() {
        out.push((
            Error,
            Rule::UnknownLu,
            format!("lexical unit {:?} not in frame {:?}", set.lu_name, set.frame),
        ));
    }

    let len = text::char_len(&set.sentence);
    let check_span = |what: &str, span: Span, out: &mut Vec<_>| -> bool {
        if span.end > len {
            out.push((
                Error,
                Rule::SpanOutOfBounds,
                format!("span out of bounds: {what} {span} exceeds sentence length {len}"),
            ));
            false
        } else if !text::is_token_aligned(&set.sentence, span) {
            out.push((
                Error,
                Rule::SpanNotTokenAligned,
                format!("{what} {span} does not fall on token boundaries"),
            ));
            false
        } else {
            true
        }
    };

    let target_ok = check_span("target", set.target, &mut out);
    let mut good_fes: Vec<&FeSpan> = Vec::new();
    for fe in &set.fes {
        if frame.fe(&fe.fe_name).is_none() {
            out.push((
                Error,
                Rule::UnknownFe,
                format!("frame element {:?} not defined for {:?}", fe.fe_name, set.frame),
            ));
        }
        if !check_span(&format!("FE {}", fe.fe_name), fe.span, &mut out) {
            continue;
        }
        if fe.span.partially_overlaps(&set.target) {
            out.push((
                Error,
                Rule::PartialTargetOverlap,
                format!(
                    "partial target overlap: FE {} {} vs target {}",
                    fe.fe_name, fe.span, set.target
                ),
            ));
        }
        good_fes.push(fe);
    }
    good_fes.sort_by_key(|fe| fe.span);
    for pair in good_fes.windows(2) {
        if pair[0].span.overlaps(&pair[1].span) {
            out.push((
                Error,
                Rule::FeOverlap,
                format!(
                    "FE {} {} overlaps FE {} {}",
                    pair[0].fe_name, pair[0].span, pair[1].fe_name, pair[1].span
                ),
            ));
        }
    }

    if let (Some(lu), true) = (lu, target_ok) {
        if !lu.is_mwe() && lu.pos.is_known() {
            let token = set.target_text().unwrap_or_default();
            if morph.analyze(token, &lu.lemma, &lu.pos).is_err() {
                out.push((
                    Warning,
                    Rule::TargetFormMismatch,
                    format!("target {token:?} is not a recognized form of {:?}", lu.name),
                ));
            }
        }
    }
    out
}

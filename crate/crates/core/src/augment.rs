//! Annotation transfer from sister lexical units to empty ones.
//!
//! An *empty* lexical unit has no annotation sets. Its *sister* is the
//! non-MWE lexical unit of the same frame and part of speech with the most
//! annotation sets (ties go to the smallest name). Every sister sentence is
//! copied with the target word replaced by the matching form of the empty
//! unit's lemma; frame-element spans are shifted so they still cover the
//! same words.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AnnotationSet, Corpus, FeSpan, LexicalUnit, Lexicon, Source, Span};
use crate::morphology::{FeatureBundle, MorphError, Morphology};
use crate::text;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SisterAssignment {
    pub empty_lu: LexicalUnit,
    pub sister: LexicalUnit,
    pub sister_set_count: usize,
}

/// Why an empty lexical unit cannot be augmented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exclusion {
    /// The empty unit itself is a multiword expression.
    Mwe,
    /// Every same-POS annotated unit of the frame is a multiword expression.
    MweSister,
    /// No annotated unit of the same part of speech exists in the frame.
    NoSister,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("FE {fe_name} {fe_span} partially overlaps target {target}")]
pub struct SpanConflict {
    pub fe_name: String,
    pub fe_span: Span,
    pub target: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inflection {
    pub sister_token: String,
    pub new_token: String,
    pub features: FeatureBundle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentationRecord {
    pub annotation: AnnotationSet,
    pub sister_lu: String,
    pub source_annotation_id: String,
    pub inflection: Inflection,
}

/// One line of `provenance.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceRecord {
    pub id: String,
    pub sister_lu: String,
    pub source_id: String,
    pub sister_token: String,
    pub new_token: String,
    pub features: FeatureBundle,
}

impl From<&AugmentationRecord> for ProvenanceRecord {
    fn from(r: &AugmentationRecord) -> Self {
        ProvenanceRecord {
            id: r.annotation.id.clone(),
            sister_lu: r.sister_lu.clone(),
            source_id: r.source_annotation_id.clone(),
            sister_token: r.inflection.sister_token.clone(),
            new_token: r.inflection.new_token.clone(),
            features: r.inflection.features,
        }
    }
}

/// Counts describing one augmentation run.
///
/// `eligible_empty_lu_count = empty_lu_count - mwe_excluded_count -
/// no_sister_count`. `mwe_excluded_count` covers empty units that are
/// multiword expressions and those whose only potential sisters are.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentStats {
    pub empty_lu_count: usize,
    pub mwe_excluded_count: usize,
    pub no_sister_count: usize,
    pub eligible_empty_lu_count: usize,
    pub sentences_generated: usize,
    pub skipped_form_mismatch: usize,
    pub skipped_span_conflict: usize,
}

impl AugmentStats {
    /// Share of empty lexical units that can receive annotation.
    pub fn coverage_ratio(&self) -> f64 {
        if self.empty_lu_count == 0 {
            0.0
        } else {
            self.eligible_empty_lu_count as f64 / self.empty_lu_count as f64
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Augmentation {
    pub records: Vec<AugmentationRecord>,
    pub stats: AugmentStats,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AugmentOptions {
    /// Worker threads; `None` uses every available core.
    pub jobs: Option<usize>,
}

/// Lexical units with no annotation sets, ordered by frame then name.
/// Multiword expressions are included.
pub fn find_empty_lus<'a>(lexicon: &'a Lexicon, corpus: &Corpus) -> Vec<&'a LexicalUnit> {
    let mut empty: Vec<&LexicalUnit> = lexicon
        .lus()
        .filter(|lu| corpus.count_for(&lu.frame, &lu.name) == 0)
        .collect();
    empty.sort_by(|a, b| (&a.frame, &a.name).cmp(&(&b.frame, &b.name)));
    empty
}

/// Picks the sister for `empty_lu`, or explains why there is none.
pub fn classify(
    empty_lu: &LexicalUnit,
    lexicon: &Lexicon,
    corpus: &Corpus,
) -> Result<SisterAssignment, Exclusion> {
    if empty_lu.is_mwe() {
        return Err(Exclusion::Mwe);
    }
    if !empty_lu.pos.is_known() {
        return Err(Exclusion::NoSister);
    }
    let Some(frame) = lexicon.frame(&empty_lu.frame) else {
        return Err(Exclusion::NoSister);
    };
    let mut saw_mwe = false;
    let mut best: Option<(&LexicalUnit, usize)> = None;
    for lu in &frame.lus {
        if lu.name == empty_lu.name || lu.pos != empty_lu.pos {
            continue;
        }
        let count = corpus.count_for(&frame.name, &lu.name);
        if count == 0 {
            continue;
        }
        if lu.is_mwe() {
            saw_mwe = true;
            continue;
        }
        let better = match best {
            None => true,
            Some((b, c)) => count > c || (count == c && lu.name < b.name),
        };
        if better {
            best = Some((lu, count));
        }
    }
    match best {
        Some((sister, count)) => Ok(SisterAssignment {
            empty_lu: empty_lu.clone(),
            sister: sister.clone(),
            sister_set_count: count,
        }),
        None if saw_mwe => Err(Exclusion::MweSister),
        None => Err(Exclusion::NoSister),
    }
}

pub fn select_sister(
    empty_lu: &LexicalUnit,
    lexicon: &Lexicon,
    corpus: &Corpus,
) -> Option<SisterAssignment> {
    classify(empty_lu, lexicon, corpus).ok()
}

/// Shifts frame-element spans after the target has been replaced by a word
/// of `new_target_len` code points.
///
/// Spans before the target are kept, spans after it move by the length
/// difference, and spans containing the target stretch by it. A span that
/// overlaps the target only partly is a [`SpanConflict`].
pub fn rebase_spans(
    fes: &[FeSpan],
    target: Span,
    new_target_len: usize,
) -> Result<(Vec<FeSpan>, Span), SpanConflict> {
    assert!(new_target_len > 0, "replacement word must not be empty");
    let shift = |x: usize| (x + new_target_len) - target.len();
    let rebased = fes
        .iter()
        .map(|fe| {
            let s = fe.span;
            let span = if s.end <= target.start {
                s
            } else if s.start >= target.end {
                Span::new_unchecked(shift(s.start), shift(s.end))
            } else if s.contains(&target) {
                Span::new_unchecked(s.start, shift(s.end))
            } else {
                return Err(SpanConflict {
                    fe_name: fe.fe_name.clone(),
                    fe_span: s,
                    target,
                });
            };
            Ok(FeSpan {
                fe_name: fe.fe_name.clone(),
                span,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let new_target = Span::new_unchecked(target.start, target.start + new_target_len);
    Ok((rebased, new_target))
}

/// Output of [`augment_lu`]: generated records and skip counts.
#[derive(Debug, Clone, Default)]
pub struct LuAugmentation {
    pub records: Vec<AugmentationRecord>,
    pub skipped_form_mismatch: usize,
    pub skipped_span_conflict: usize,
}

#[derive(Debug)]
enum Skip {
    Form(MorphError),
    Span(SpanConflict),
}

fn transfer(
    assignment: &SisterAssignment,
    set: &AnnotationSet,
    morph: &Morphology,
) -> Result<AugmentationRecord, Skip> {
    let empty = &assignment.empty_lu;
    let sister_token = set.target_text().unwrap_or_default();
    let (new_token, features) = morph
        .match_form(sister_token, &assignment.sister.lemma, &empty.lemma, &empty.pos)
        .map_err(Skip::Form)?;
    let (fes, target) =
        rebase_spans(&set.fes, set.target, text::char_len(&new_token)).map_err(Skip::Span)?;
    let sentence = text::splice(&set.sentence, set.target, &new_token)
        .expect("target span was checked against the sentence");
    Ok(AugmentationRecord {
        annotation: AnnotationSet {
            id: format!("{}::aug::{}", set.id, empty.name),
            frame: empty.frame.clone(),
            lu_name: empty.name.clone(),
            sentence,
            target,
            fes,
            source: Source::Augmented,
        },
        sister_lu: assignment.sister.name.clone(),
        source_annotation_id: set.id.clone(),
        inflection: Inflection {
            sister_token: sister_token.to_string(),
            new_token,
            features,
        },
    })
}

/// Copies every annotation set of the sister onto the empty lexical unit.
/// Sentences whose target cannot be analyzed or whose spans conflict with
/// the target are skipped and counted.
pub fn augment_lu(
    assignment: &SisterAssignment,
    corpus: &Corpus,
    morph: &Morphology,
) -> LuAugmentation {
    let mut out = LuAugmentation::default();
    let sister = &assignment.sister;
    for set in corpus.sets_for(&sister.frame, &sister.name) {
        match transfer(assignment, set, morph) {
            Ok(record) => out.records.push(record),
            Err(Skip::Form(e)) => {
                log::debug!("{}: {e}", set.id);
                out.skipped_form_mismatch += 1;
            }
            Err(Skip::Span(e)) => {
                log::debug!("{}: {e}", set.id);
                out.skipped_span_conflict += 1;
            }
        }
    }
    out
}

/// Augments every empty lexical unit of the lexicon.
pub fn augment_corpus(
    lexicon: &Lexicon,
    corpus: &Corpus,
    morph: &Morphology,
    options: AugmentOptions,
) -> Augmentation {
    let empty: Vec<LexicalUnit> = find_empty_lus(lexicon, corpus).into_iter().cloned().collect();
    augment_lus(lexicon, corpus, &empty, morph, options)
}

/// Augments the given lexical units, treating each as empty. Records come
/// out grouped by unit in (frame, name) order, then in sister corpus order,
/// whatever the thread count.
pub fn augment_lus(
    lexicon: &Lexicon,
    corpus: &Corpus,
    lus: &[LexicalUnit],
    morph: &Morphology,
    options: AugmentOptions,
) -> Augmentation {
    let mut lus: Vec<&LexicalUnit> = lus.iter().collect();
    lus.sort_by(|a, b| (&a.frame, &a.name).cmp(&(&b.frame, &b.name)));
    lus.dedup_by(|a, b| a.frame == b.frame && a.name == b.name);

    let run = || {
        lus.par_iter()
            .map(|lu| {
                classify(lu, lexicon, corpus).map(|a| augment_lu(&a, corpus, morph))
            })
            .collect::<Vec<_>>()
    };
    let results = match options.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(|pool| pool.install(run))
            .unwrap_or_else(|_| run()),
        None => run(),
    };

    let mut out = Augmentation::default();
    let stats = &mut out.stats;
    stats.empty_lu_count = lus.len();
    for result in results {
        match result {
            Ok(lu) => {
                stats.eligible_empty_lu_count += 1;
                stats.sentences_generated += lu.records.len();
                stats.skipped_form_mismatch += lu.skipped_form_mismatch;
                stats.skipped_span_conflict += lu.skipped_span_conflict;
                out.records.extend(lu.records);
            }
            Err(Exclusion::Mwe | Exclusion::MweSister) => stats.mwe_excluded_count += 1,
            Err(Exclusion::NoSister) => stats.no_sister_count += 1,
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticCategory {
    WordFormMismatch,
}

impl fmt::Display for DiagnosticCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("word_form_mismatch")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagnosticFlag {
    pub annotation_id: String,
    pub category: DiagnosticCategory,
    pub detail: String,
}

/// Flags records whose new token differs from the form the irregular table
/// lists for that lemma and feature set, which happens when the token was
/// built by regular rules.
pub fn diagnose<'a>(
    records: impl IntoIterator<Item = &'a ProvenanceRecord>,
    morph: &Morphology,
) -> Vec<DiagnosticFlag> {
    records
        .into_iter()
        .filter_map(|r| {
            let lu = r.id.rsplit_once("::aug::")?.1;
            let (lemma, _) = crate::model::parse_lu_name(lu).ok()?;
            let listed = morph.irregulars().form(&lemma, r.features)?;
            (listed.to_lowercase() != r.new_token.to_lowercase()).then(|| DiagnosticFlag {
                annotation_id: r.id.clone(),
                category: DiagnosticCategory::WordFormMismatch,
                detail: format!(
                    "{:?} is a regular {} of {lemma:?}; the irregular table lists {listed:?}",
                    r.new_token, r.features
                ),
            })
        })
        .collect()
}

/// Ids of the lexical units that received at least one record.
pub fn covered_lus(records: &[AugmentationRecord]) -> BTreeSet<(String, String)> {
    records
        .iter()
        .map(|r| (r.annotation.frame.clone(), r.annotation.lu_name.clone()))
        .collect()
}

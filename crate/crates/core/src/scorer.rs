//! Frame identification and argument identification scores.
//!
//! Gold and predicted annotations are paired by (sentence text, target
//! span). Every gold target needs exactly one prediction.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::ops::Add;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{AnnotationSet, Corpus, FeSpan, Span};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("no prediction for gold annotation(s): {}", .0.join(", "))]
    MissingPrediction(Vec<String>),
    #[error("prediction(s) without a gold target: {}", .0.join(", "))]
    SpuriousPrediction(Vec<String>),
    #[error("{which} has more than one annotation for target {span} of {id}")]
    DuplicateTarget {
        which: &'static str,
        id: String,
        span: Span,
    },
}

/// Confusion counts; addition is associative so counting can be split
/// across threads.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

/// Ratio with the empty-set convention: 0/0 is 1.0.
fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Prf {
    /// Precision is 1.0 with nothing predicted only if nothing was expected
    /// either; recall mirrors it.
    pub fn from_counts(c: Counts) -> Prf {
        let both_empty = c.tp + c.fp == 0 && c.tp + c.fn_ == 0;
        let (precision, recall) = if both_empty {
            (1.0, 1.0)
        } else {
            let p = if c.tp + c.fp == 0 { 0.0 } else { ratio(c.tp, c.tp + c.fp) };
            let r = if c.tp + c.fn_ == 0 { 0.0 } else { ratio(c.tp, c.tp + c.fn_) };
            (p, r)
        };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameIdResult {
    pub correct: usize,
    pub total: usize,
    pub f1: f64,
}

impl FrameIdResult {
    fn new(correct: usize, total: usize) -> Self {
        FrameIdResult {
            correct,
            total,
            f1: ratio(correct, total),
        }
    }
}

type Key<'a> = (&'a str, Span);

fn index<'a>(
    corpus: &'a Corpus,
    which: &'static str,
) -> Result<HashMap<Key<'a>, &'a AnnotationSet>, ScoreError> {
    let mut map = HashMap::with_capacity(corpus.len());
    for set in corpus.sets() {
        if map.insert((set.sentence.as_str(), set.target), set).is_some() {
            return Err(ScoreError::DuplicateTarget {
                which,
                id: set.id.clone(),
                span: set.target,
            });
        }
    }
    Ok(map)
}

/// Pairs each gold annotation with its prediction, in gold order.
pub fn align<'a>(
    gold: &'a Corpus,
    pred: &'a Corpus,
) -> Result<Vec<(&'a AnnotationSet, &'a AnnotationSet)>, ScoreError> {
    index(gold, "gold")?;
    let by_key = index(pred, "prediction")?;
    let mut pairs = Vec::with_capacity(gold.len());
    let mut missing = Vec::new();
    for g in gold.sets() {
        match by_key.get(&(g.sentence.as_str(), g.target)) {
            Some(p) => pairs.push((g, *p)),
            None => missing.push(g.id.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(ScoreError::MissingPrediction(missing));
    }
    if pairs.len() < pred.len() {
        let gold_keys = index(gold, "gold")?;
        let spurious = pred
            .sets()
            .iter()
            .filter(|p| !gold_keys.contains_key(&(p.sentence.as_str(), p.target)))
            .map(|p| p.id.clone())
            .collect();
        return Err(ScoreError::SpuriousPrediction(spurious));
    }
    Ok(pairs)
}

pub fn score_frame_id(gold: &Corpus, pred: &Corpus) -> Result<FrameIdResult, ScoreError> {
    let pairs = align(gold, pred)?;
    let correct = pairs.par_iter().filter(|(g, p)| g.frame == p.frame).count();
    Ok(FrameIdResult::new(correct, pairs.len()))
}

/// Exact (name, span) matching, one-to-one, predictions taken in span
/// order.
pub fn match_fes(gold: &[FeSpan], pred: &[FeSpan]) -> Counts {
    let mut pred: Vec<&FeSpan> = pred.iter().collect();
    pred.sort_by(|a, b| (a.span, &a.fe_name).cmp(&(b.span, &b.fe_name)));
    let mut used = vec![false; gold.len()];
    let mut tp = 0;
    for p in &pred {
        let hit = gold
            .iter()
            .enumerate()
            .find(|(i, g)| !used[*i] && g.span == p.span && g.fe_name == p.fe_name);
        if let Some((i, _)) = hit {
            used[i] = true;
            tp += 1;
        }
    }
    Counts {
        tp,
        fp: pred.len() - tp,
        fn_: gold.len() - tp,
    }
}

/// How a wrong predicted frame affects argument scores.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ArgIdMode {
    /// Frames are assumed gold; FEs are compared as given.
    #[default]
    GoldFrames,
    /// Every predicted FE under a wrong frame is a false positive.
    Strict,
}

fn arg_counts(g: &AnnotationSet, p: &AnnotationSet, mode: ArgIdMode) -> Counts {
    if mode == ArgIdMode::Strict && g.frame != p.frame {
        Counts {
            tp: 0,
            fp: p.fes.len(),
            fn_: g.fes.len(),
        }
    } else {
        match_fes(&g.fes, &p.fes)
    }
}

/// Micro-averaged argument identification.
pub fn score_arg_id(gold: &Corpus, pred: &Corpus, mode: ArgIdMode) -> Result<Prf, ScoreError> {
    let pairs = align(gold, pred)?;
    let counts = pairs
        .par_iter()
        .map(|(g, p)| arg_counts(g, p, mode))
        .reduce(Counts::default, Add::add);
    Ok(Prf::from_counts(counts))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameRow {
    pub frame: String,
    pub targets: usize,
    pub frame_id: FrameIdResult,
    pub arg_id: Prf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub strict: bool,
    pub frame_id: FrameIdResult,
    pub arg_id: Prf,
    /// Rows keyed by gold frame, sorted by name.
    pub per_frame: Vec<FrameRow>,
}

pub fn score_report(gold: &Corpus, pred: &Corpus, mode: ArgIdMode) -> Result<ScoreReport, ScoreError> {
    let pairs = align(gold, pred)?;
    let per_pair: Vec<(&str, bool, Counts)> = pairs
        .par_iter()
        .map(|(g, p)| (g.frame.as_str(), g.frame == p.frame, arg_counts(g, p, mode)))
        .collect();

    let mut by_frame: BTreeMap<&str, (usize, usize, Counts)> = BTreeMap::new();
    let (mut correct, mut total) = (0, 0);
    let mut all = Counts::default();
    for (frame, ok, c) in per_pair {
        let row = by_frame.entry(frame).or_default();
        row.0 += usize::from(ok);
        row.1 += 1;
        row.2 = row.2 + c;
        correct += usize::from(ok);
        total += 1;
        all = all + c;
    }
    Ok(ScoreReport {
        strict: mode == ArgIdMode::Strict,
        frame_id: FrameIdResult::new(correct, total),
        arg_id: Prf::from_counts(all),
        per_frame: by_frame
            .into_iter()
            .map(|(frame, (ok, n, c))| FrameRow {
                frame: frame.to_string(),
                targets: n,
                frame_id: FrameIdResult::new(ok, n),
                arg_id: Prf::from_counts(c),
            })
            .collect(),
    })
}

impl ScoreReport {
    /// Fixed-width table, scores in percent.
    pub fn to_table(&self) -> String {
        let width = self
            .per_frame
            .iter()
            .map(|r| r.frame.chars().count())
            .chain([7])
            .max()
            .unwrap_or(7);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>7}  {:>6} {:>6} {:>6}",
            "", "", "FrameID", "ArgID", "", ""
        );
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>7}  {:>6} {:>6} {:>6}",
            "Frame", "Targets", "F1", "P", "R", "F1"
        );
        let row = |out: &mut String, name: &str, n: usize, fid: &FrameIdResult, arg: &Prf| {
            let _ = writeln!(
                out,
                "{:<width$}  {:>7}  {:>7.1}  {:>6.1} {:>6.1} {:>6.1}",
                name,
                n,
                fid.f1 * 100.0,
                arg.precision * 100.0,
                arg.recall * 100.0,
                arg.f1 * 100.0
            );
        };
        for r in &self.per_frame {
            row(&mut out, &r.frame, r.targets, &r.frame_id, &r.arg_id);
        }
        row(&mut out, "Overall", self.frame_id.total, &self.frame_id, &self.arg_id);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Source;

    fn fe(n: &str, s: usize, e: usize) -> FeSpan {
        FeSpan {
            fe_name: n.into(),
            span: Span::new(s, e).unwrap(),
        }
    }

    #[test]
    fn zero_denominators() {
        let empty = Prf::from_counts(Counts::default());
        assert_eq!((empty.precision, empty.recall, empty.f1), (1.0, 1.0, 1.0));
        let nothing_predicted = Prf::from_counts(Counts { tp: 0, fp: 0, fn_: 3 });
        assert_eq!((nothing_predicted.precision, nothing_predicted.recall), (0.0, 0.0));
        assert_eq!(nothing_predicted.f1, 0.0);
        let nothing_gold = Prf::from_counts(Counts { tp: 0, fp: 2, fn_: 0 });
        assert_eq!((nothing_gold.precision, nothing_gold.recall), (0.0, 0.0));
    }

    #[test]
    fn greedy_matching_is_one_to_one() {
        let gold = [fe("A", 0, 2)];
        let pred = [fe("A", 0, 2), fe("A", 0, 2)];
        assert_eq!(match_fes(&gold, &pred), Counts { tp: 1, fp: 1, fn_: 0 });
        let wrong_label = [fe("B", 0, 2)];
        assert_eq!(match_fes(&gold, &wrong_label), Counts { tp: 0, fp: 1, fn_: 1 });
    }

    fn set(id: &str, frame: &str, fes: Vec<FeSpan>) -> AnnotationSet {
        AnnotationSet {
            id: id.into(),
            frame: frame.into(),
            lu_name: "x.v".into(),
            sentence: format!("s {id} t"),
            target: Span::new(0, 1).unwrap(),
            fes,
            source: Source::Lexicographic,
        }
    }

    #[test]
    fn missing_and_spurious() {
        let gold = Corpus::new(vec![set("a", "F", vec![])]).unwrap();
        let none = Corpus::new(vec![]).unwrap();
        assert_eq!(
            score_frame_id(&gold, &none),
            Err(ScoreError::MissingPrediction(vec!["a".into()]))
        );
        let extra = Corpus::new(vec![set("a", "F", vec![]), set("b", "F", vec![])]).unwrap();
        assert_eq!(
            score_frame_id(&gold, &extra),
            Err(ScoreError::SpuriousPrediction(vec!["b".into()]))
        );
    }

    #[test]
    fn table_has_overall_row() {
        let gold = Corpus::new(vec![set("a", "F", vec![fe("X", 2, 3)])]).unwrap();
        let report = score_report(&gold, &gold, ArgIdMode::GoldFrames).unwrap();
        let table = report.to_table();
        assert!(table.lines().last().unwrap().starts_with("Overall"));
        assert!(table.contains("100.0"));
    }
}

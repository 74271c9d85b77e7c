use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{create, open, IngestError};
use crate::model::{
    check_frame, check_set, AnnotationSet, Coreness, Corpus, Frame, FrameElementDef, LexicalUnit,
    Lexicon, ModelError, Rule, Severity,
};
use crate::morphology::Morphology;

#[derive(Debug, Serialize, Deserialize)]
struct FeRecord {
    name: String,
    coreness: Coreness,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameRecord {
    frame: String,
    fes: Vec<FeRecord>,
    lus: Vec<String>,
}

fn lines(reader: impl BufRead) -> impl Iterator<Item = Result<(usize, String), IngestError>> {
    reader
        .lines()
        .enumerate()
        .map(|(i, line)| {
            line.map(|l| (i + 1, l)).map_err(|e| IngestError::Parse {
                line: i + 1,
                reason: e.to_string(),
            })
        })
        .filter(|r| !matches!(r, Ok((_, l)) if l.trim().is_empty()))
}

pub fn parse_lexicon(reader: impl BufRead) -> Result<Lexicon, IngestError> {
    let mut frames: Vec<Frame> = Vec::new();
    for item in lines(reader) {
        let (line, text) = item?;
        let rec: FrameRecord = serde_json::from_str(&text).map_err(|e| IngestError::Parse {
            line,
            reason: e.to_string(),
        })?;
        if frames.iter().any(|f| f.name == rec.frame) {
            return Err(IngestError::DuplicateFrame {
                line,
                frame: rec.frame,
            });
        }
        let lus = rec
            .lus
            .iter()
            .map(|name| LexicalUnit::new(name, &rec.frame))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| IngestError::Parse {
                line,
                reason: e.to_string(),
            })?;
        let frame = Frame {
            fe_defs: rec
                .fes
                .into_iter()
                .map(|fe| FrameElementDef {
                    name: fe.name,
                    coreness: fe.coreness,
                    frame: rec.frame.clone(),
                })
                .collect(),
            name: rec.frame,
            lus,
        };
        check_frame(&frame).map_err(|e| match e {
            ModelError::DuplicateLu { frame, lu } => IngestError::DuplicateLu { line, frame, lu },
            other => IngestError::Parse {
                line,
                reason: other.to_string(),
            },
        })?;
        frames.push(frame);
    }
    Lexicon::new(frames).map_err(|e| IngestError::Parse {
        line: 0,
        reason: e.to_string(),
    })
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon, IngestError> {
    parse_lexicon(open(path.as_ref())?)
}

pub fn write_lexicon(lexicon: &Lexicon, mut out: impl Write) -> std::io::Result<()> {
    for frame in lexicon.frames() {
        let rec = FrameRecord {
            frame: frame.name.clone(),
            fes: frame
                .fe_defs
                .iter()
                .map(|fe| FeRecord {
                    name: fe.name.clone(),
                    coreness: fe.coreness,
                })
                .collect(),
            lus: frame.lus.iter().map(|lu| lu.name.clone()).collect(),
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_lexicon_file(lexicon: &Lexicon, path: impl AsRef<Path>) -> Result<(), IngestError> {
    let path = path.as_ref();
    write_lexicon(lexicon, create(path)?).map_err(|e| IngestError::io(path, e))
}

fn parse_set(line: usize, text: &str) -> Result<AnnotationSet, IngestError> {
    serde_json::from_str(text).map_err(|e| IngestError::Parse {
        line,
        reason: e.to_string(),
    })
}

/// Reads corpus records, rejecting the first record that breaks a corpus
/// invariant. Target-form mismatches are logged, not rejected.
pub fn parse_corpus(reader: impl BufRead, lexicon: &Lexicon) -> Result<Corpus, IngestError> {
    let morph = Morphology::bundled();
    let mut corpus = Corpus::default();
    for item in lines(reader) {
        let (line, text) = item?;
        let set = parse_set(line, &text)?;
        for (severity, rule, reason) in check_set(lexicon, &set, &morph) {
            if severity == Severity::Warning {
                log::warn!("line {line}: annotation {:?}: {reason}", set.id);
                continue;
            }
            let id = set.id.clone();
            return Err(match rule {
                Rule::UnknownFrame => IngestError::UnknownFrame {
                    line,
                    frame: set.frame,
                },
                Rule::UnknownLu => IngestError::UnknownLu {
                    line,
                    frame: set.frame,
                    lu: set.lu_name,
                },
                Rule::UnknownFe | Rule::TargetFormMismatch => {
                    IngestError::InvalidRecord { line, id, reason }
                }
                Rule::SpanOutOfBounds
                | Rule::SpanNotTokenAligned
                | Rule::PartialTargetOverlap
                | Rule::FeOverlap => IngestError::Span { line, id, reason },
            });
        }
        push(&mut corpus, line, set)?;
    }
    Ok(corpus)
}

fn push(corpus: &mut Corpus, line: usize, set: AnnotationSet) -> Result<(), IngestError> {
    corpus.push(set).map_err(|e| match e {
        ModelError::DuplicateId(id) => IngestError::DuplicateId { line, id },
        other => IngestError::Parse {
            line,
            reason: other.to_string(),
        },
    })
}

pub fn load_corpus(path: impl AsRef<Path>, lexicon: &Lexicon) -> Result<Corpus, IngestError> {
    parse_corpus(open(path.as_ref())?, lexicon)
}

/// Reads corpus records without a lexicon; only syntax and id uniqueness
/// are checked. Used for system output, which may name anything.
pub fn read_corpus_unchecked(reader: impl BufRead) -> Result<Corpus, IngestError> {
    let mut corpus = Corpus::default();
    for item in lines(reader) {
        let (line, text) = item?;
        push(&mut corpus, line, parse_set(line, &text)?)?;
    }
    Ok(corpus)
}

pub fn write_corpus<'a>(
    sets: impl IntoIterator<Item = &'a AnnotationSet>,
    mut out: impl Write,
) -> std::io::Result<()> {
    for set in sets {
        serde_json::to_writer(&mut out, set)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_corpus_file<'a>(
    sets: impl IntoIterator<Item = &'a AnnotationSet>,
    path: impl AsRef<Path>,
) -> Result<(), IngestError> {
    let path = path.as_ref();
    write_corpus(sets, create(path)?).map_err(|e| IngestError::io(path, e))
}

//! Reading and writing corpus formats.
//!
//! * JSONL is canonical: one frame per line for the lexicon, one annotation
//!   set per line for corpora.
//! * CoNLL is a training export with BIO frame-element tags.
//! * FrameNet `lu/*.xml` files are read through a compatibility adapter.

mod conll;
mod jsonl;
mod luxml;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use conll::{
    char_span_to_token_span, conll_rows, export_conll, parse_conll, read_conll, write_conll, Bio,
    ConllRow,
};
pub use jsonl::{
    load_corpus, load_lexicon, parse_corpus, parse_lexicon, read_corpus_unchecked, write_corpus,
    write_corpus_file, write_lexicon, write_lexicon_file,
};
pub use luxml::{read_framenet_luxml, read_luxml_lexicon, LuXmlImport, LuXmlOptions, OffsetUnit};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: duplicate frame {frame:?}")]
    DuplicateFrame { line: usize, frame: String },
    #[error("line {line}: duplicate lexical unit {lu:?} in frame {frame:?}")]
    DuplicateLu {
        line: usize,
        frame: String,
        lu: String,
    },
    #[error("line {line}: duplicate annotation id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: unknown frame {frame:?}")]
    UnknownFrame { line: usize, frame: String },
    #[error("line {line}: unknown lexical unit {lu:?} in frame {frame:?}")]
    UnknownLu {
        line: usize,
        frame: String,
        lu: String,
    },
    #[error("line {line}: annotation {id:?}: {reason}")]
    Span {
        line: usize,
        id: String,
        reason: String,
    },
    #[error("line {line}: annotation {id:?}: {reason}")]
    InvalidRecord {
        line: usize,
        id: String,
        reason: String,
    },
    #[error("{}: {reason}", path.display())]
    Xml { path: PathBuf, reason: String },
    #[error("{}: sentence {sentence}: {reason}", path.display())]
    Offset {
        path: PathBuf,
        sentence: String,
        reason: String,
    },
    #[error("annotation {id:?}: {reason}")]
    Alignment { id: String, reason: String },
}

impl IngestError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub(crate) fn open(path: &Path) -> Result<std::io::BufReader<std::fs::File>, IngestError> {
    std::fs::File::open(path)
        .map(std::io::BufReader::new)
        .map_err(|e| IngestError::io(path, e))
}

pub(crate) fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, IngestError> {
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| IngestError::io(path, e))
}

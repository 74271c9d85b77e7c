//! Seven-column CoNLL export: token index (1-based), token, lemma, POS tag,
//! frame, lexical unit and a BIO frame-element tag. Lemma, POS, frame and
//! lexical unit are filled on target tokens only, `_` elsewhere. Blocks are
//! separated by one blank line.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use super::{create, open, IngestError};
use crate::model::{parse_lu_name, AnnotationSet, Corpus, FeSpan, Source, Span};
use crate::text;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bio {
    Outside,
    Begin(String),
    Inside(String),
}

impl fmt::Display for Bio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bio::Outside => f.write_str("O"),
            Bio::Begin(l) => write!(f, "B-{l}"),
            Bio::Inside(l) => write!(f, "I-{l}"),
        }
    }
}

impl Bio {
    fn parse(s: &str) -> Option<Bio> {
        match s {
            "O" => Some(Bio::Outside),
            _ => match s.split_once('-') {
                Some(("B", l)) if !l.is_empty() => Some(Bio::Begin(l.to_string())),
                Some(("I", l)) if !l.is_empty() => Some(Bio::Inside(l.to_string())),
                _ => None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConllRow {
    pub index: usize,
    pub token: String,
    pub lemma: Option<String>,
    pub pos: Option<String>,
    pub frame: Option<String>,
    pub lu: Option<String>,
    pub fe: Bio,
}

impl fmt::Display for ConllRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let col = |c: &Option<String>| c.clone().unwrap_or_else(|| "_".to_string());
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.index,
            self.token,
            col(&self.lemma),
            col(&self.pos),
            col(&self.frame),
            col(&self.lu),
            self.fe
        )
    }
}

/// Inclusive 0-based token indices covered by a token-aligned span.
pub fn char_span_to_token_span(sentence: &str, span: Span) -> Result<(usize, usize), String> {
    let tokens = text::tokenize(sentence);
    let first = tokens.iter().position(|t| t.span.start == span.start);
    let last = tokens.iter().position(|t| t.span.end == span.end);
    match (first, last) {
        (Some(f), Some(l)) if f <= l => Ok((f, l)),
        _ => Err(format!(
            "span {span} is not aligned to whitespace tokens of {sentence:?}"
        )),
    }
}

pub fn conll_rows(set: &AnnotationSet) -> Result<Vec<ConllRow>, IngestError> {
    let align = |span: Span| {
        char_span_to_token_span(&set.sentence, span).map_err(|reason| IngestError::Alignment {
            id: set.id.clone(),
            reason,
        })
    };
    let (lemma, pos) = parse_lu_name(&set.lu_name).map_err(|e| IngestError::Alignment {
        id: set.id.clone(),
        reason: e.to_string(),
    })?;
    let target = align(set.target)?;
    let mut rows: Vec<ConllRow> = text::tokenize(&set.sentence)
        .into_iter()
        .enumerate()
        .map(|(i, tok)| {
            let on_target = (target.0..=target.1).contains(&i);
            let fill = |s: &str| on_target.then(|| s.to_string());
            ConllRow {
                index: i + 1,
                token: tok.text.to_string(),
                lemma: fill(&lemma),
                pos: fill(pos.tag()),
                frame: fill(&set.frame),
                lu: fill(&set.lu_name),
                fe: Bio::Outside,
            }
        })
        .collect();
    for fe in &set.fes {
        let (first, last) = align(fe.span)?;
        for (i, row) in rows.iter_mut().enumerate().take(last + 1).skip(first) {
            if row.fe != Bio::Outside {
                return Err(IngestError::Alignment {
                    id: set.id.clone(),
                    reason: format!("FE {} overlaps another FE", fe.fe_name),
                });
            }
            row.fe = if i == first {
                Bio::Begin(fe.fe_name.clone())
            } else {
                Bio::Inside(fe.fe_name.clone())
            };
        }
    }
    Ok(rows)
}

/// Writes one block per annotation set, ordered by id. Returns the number of
/// token rows written. Nothing is written when any set fails to align.
pub fn write_conll<'a>(
    sets: impl IntoIterator<Item = &'a AnnotationSet>,
    mut out: impl Write,
) -> Result<usize, IngestError> {
    let mut sets: Vec<&AnnotationSet> = sets.into_iter().collect();
    sets.sort_by(|a, b| a.id.cmp(&b.id));
    let blocks = sets
        .iter()
        .map(|s| conll_rows(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut buf = String::new();
    let mut count = 0;
    for (i, block) in blocks.iter().enumerate() {
        if i > 0 {
            buf.push('\n');
        }
        for row in block {
            buf.push_str(&row.to_string());
            buf.push('\n');
            count += 1;
        }
    }
    out.write_all(buf.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| IngestError::Io {
            path: "<conll output>".into(),
            source: e,
        })?;
    Ok(count)
}

pub fn export_conll(corpus: &Corpus, path: impl AsRef<Path>) -> Result<usize, IngestError> {
    let path = path.as_ref();
    let mut sets: Vec<&AnnotationSet> = corpus.sets().iter().collect();
    sets.sort_by(|a, b| a.id.cmp(&b.id));
    // Align everything before touching the output path.
    for s in &sets {
        conll_rows(s)?;
    }
    write_conll(sets, create(path)?).map_err(|e| match e {
        IngestError::Io { source, .. } => IngestError::io(path, source),
        other => other,
    })
}

/// Reads a CoNLL export back into annotation sets. Sentences are rebuilt by
/// joining tokens with single spaces; ids are `conll-<block number>`.
pub fn parse_conll(reader: impl BufRead) -> Result<Vec<AnnotationSet>, IngestError> {
    let mut sets = Vec::new();
    let mut block: Vec<(usize, Vec<String>)> = Vec::new();
    let mut lines = reader.lines().enumerate();
    loop {
        let next = lines.next();
        let line = match &next {
            Some((i, Ok(l))) => Some((i + 1, l.trim_end_matches('\r'))),
            Some((i, Err(e))) => {
                return Err(IngestError::Parse {
                    line: i + 1,
                    reason: e.to_string(),
                })
            }
            None => None,
        };
        match line {
            Some((n, l)) if !l.trim().is_empty() => {
                block.push((n, l.split('\t').map(str::to_string).collect()));
            }
            _ => {
                if !block.is_empty() {
                    sets.push(block_to_set(&block, sets.len() + 1)?);
                    block.clear();
                }
                if line.is_none() {
                    break;
                }
            }
        }
    }
    Ok(sets)
}

pub fn read_conll(path: impl AsRef<Path>) -> Result<Vec<AnnotationSet>, IngestError> {
    parse_conll(open(path.as_ref())?)
}

fn block_to_set(block: &[(usize, Vec<String>)], number: usize) -> Result<AnnotationSet, IngestError> {
    let err = |line: usize, reason: String| IngestError::Parse { line, reason };
    let mut sentence = String::new();
    let mut target: Option<(Span, String, String)> = None;
    let mut target_closed = false;
    let mut fes: Vec<FeSpan> = Vec::new();
    let mut open_fe: Option<(String, Span)> = None;
    let mut offset = 0;
    for (k, (line, cols)) in block.iter().enumerate() {
        let line = *line;
        if cols.len() != 7 {
            return Err(err(line, format!("expected 7 columns, found {}", cols.len())));
        }
        if cols[0].parse::<usize>().ok() != Some(k + 1) {
            return Err(err(line, format!("expected token index {}, found {:?}", k + 1, cols[0])));
        }
        let token = &cols[1];
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(err(line, format!("invalid token {token:?}")));
        }
        if k > 0 {
            sentence.push(' ');
            offset += 1;
        }
        let tok_span = Span::new_unchecked(offset, offset + text::char_len(token));
        sentence.push_str(token);
        offset = tok_span.end;

        let on_target = cols[4] != "_";
        match (&mut target, on_target) {
            (None, true) => target = Some((tok_span, cols[4].clone(), cols[5].clone())),
            (Some(_), true) if target_closed => {
                return Err(err(line, "more than one target run in block".into()))
            }
            (Some((span, frame, lu)), true) => {
                if *frame != cols[4] || *lu != cols[5] {
                    return Err(err(line, "inconsistent frame or lexical unit on target".into()));
                }
                span.end = tok_span.end;
            }
            (Some(_), false) => target_closed = true,
            (None, false) => {}
        }

        let bio = Bio::parse(&cols[6]).ok_or_else(|| err(line, format!("bad FE tag {:?}", cols[6])))?;
        match bio {
            Bio::Outside => {
                if let Some((name, span)) = open_fe.take() {
                    fes.push(FeSpan { fe_name: name, span });
                }
            }
            Bio::Begin(name) => {
                if let Some((prev, span)) = open_fe.take() {
                    fes.push(FeSpan { fe_name: prev, span });
                }
                open_fe = Some((name, tok_span));
            }
            Bio::Inside(name) => match &mut open_fe {
                Some((prev, span)) if *prev == name => span.end = tok_span.end,
                _ => return Err(err(line, format!("I-{name} without preceding B-{name}"))),
            },
        }
    }
    if let Some((name, span)) = open_fe {
        fes.push(FeSpan { fe_name: name, span });
    }
    let first_line = block.first().map_or(0, |(l, _)| *l);
    let (target, frame, lu_name) =
        target.ok_or_else(|| err(first_line, "block has no target tokens".into()))?;
    Ok(AnnotationSet {
        id: format!("conll-{number}"),
        frame,
        lu_name,
        sentence,
        target,
        fes,
        source: Source::Lexicographic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn buy_set() -> AnnotationSet {
        let sentence = "Chuck bought a car from Jerry for $1000 .";
        let span = |s: &str| {
            let start = sentence.find(s).unwrap();
            Span::new(start, start + s.len()).unwrap()
        };
        let fe = |n: &str, s: &str| FeSpan {
            fe_name: n.into(),
            span: span(s),
        };
        AnnotationSet {
            id: "fig1".into(),
            frame: "Commerce_buy".into(),
            lu_name: "buy.v".into(),
            sentence: sentence.into(),
            target: span("bought"),
            fes: vec![
                fe("Buyer", "Chuck"),
                fe("Goods", "a car"),
                fe("Seller", "from Jerry"),
                fe("Money", "for $1000"),
            ],
            source: Source::Lexicographic,
        }
    }

    #[test]
    fn token_spans() {
        let s = "He stamped his foot .";
        assert_eq!(char_span_to_token_span(s, Span::new(11, 19).unwrap()), Ok((2, 3)));
        assert_eq!(char_span_to_token_span(s, Span::new(0, 21).unwrap()), Ok((0, 4)));
        assert!(char_span_to_token_span(s, Span::new(12, 19).unwrap()).is_err());
    }

    #[test]
    fn figure_one_block() {
        let mut out = Vec::new();
        let n = write_conll([&buy_set()], &mut out).unwrap();
        assert_eq!(n, 9);
        let text = String::from_utf8(out).unwrap();
        let tags: Vec<&str> = text.lines().map(|l| l.rsplit('\t').next().unwrap()).collect();
        assert_eq!(
            tags,
            ["B-Buyer", "O", "B-Goods", "I-Goods", "B-Seller", "I-Seller", "B-Money", "I-Money", "O"]
        );
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "2\tbought\tbuy\tv\tCommerce_buy\tbuy.v\tO"
        );
        assert_eq!(text.lines().next().unwrap(), "1\tChuck\t_\t_\t_\t_\tB-Buyer");
    }

    #[test]
    fn zero_fes_is_all_outside() {
        let mut set = buy_set();
        set.fes.clear();
        let rows = conll_rows(&set).unwrap();
        assert!(rows.iter().all(|r| r.fe == Bio::Outside));
        assert_eq!(rows[1].frame.as_deref(), Some("Commerce_buy"));
    }

    #[test]
    fn parse_recovers_spans() {
        let set = buy_set();
        let mut out = Vec::new();
        write_conll([&set], &mut out).unwrap();
        let back = parse_conll(out.as_slice()).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].sentence, set.sentence);
        assert_eq!(back[0].target, set.target);
        assert_eq!(back[0].fes, set.fes);
        assert_eq!(back[0].lu_name, "buy.v");
    }

    #[test]
    fn parse_rejects_dangling_inside() {
        let text = "1\tHe\t_\t_\t_\t_\tI-Agent\n2\tran\trun\tv\tSelf_motion\trun.v\tO\n";
        assert!(matches!(
            parse_conll(text.as_bytes()),
            Err(IngestError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn parse_rejects_two_target_runs() {
        let text = "1\tran\trun\tv\tF\trun.v\tO\n2\tand\t_\t_\t_\t_\tO\n3\tran\trun\tv\tF\trun.v\tO\n";
        assert!(matches!(
            parse_conll(text.as_bytes()),
            Err(IngestError::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn misaligned_fe_names_the_annotation() {
        let mut set = buy_set();
        set.fes[0].span = Span::new(1, 5).unwrap();
        match conll_rows(&set) {
            Err(IngestError::Alignment { id, .. }) => assert_eq!(id, "fig1"),
            other => panic!("{other:?}"),
        }
    }
}

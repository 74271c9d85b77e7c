//! Adapter for FrameNet-style `lu/*.xml` lexical-unit files.
//!
//! Only the Target layer and the first FE layer of each annotation set are
//! read. Label offsets in these files are inclusive on both ends; they are
//! converted to half-open code-point spans. Where a label boundary falls
//! inside a whitespace token (for example "foot." with the label ending
//! before the period) a space is inserted so that every span is token
//! aligned; the text under each label is unchanged.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use roxmltree::{Document, Node};

use super::IngestError;
use crate::model::{
    AnnotationSet, Coreness, Corpus, FeSpan, Frame, FrameElementDef, LexicalUnit, Lexicon,
    Source, Span,
};
use crate::text;

/// Unit of the `start`/`end` attributes on labels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OffsetUnit {
    #[default]
    Chars,
    Bytes,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LuXmlOptions {
    pub offsets: OffsetUnit,
}

#[derive(Debug, Clone, Default)]
pub struct LuXmlImport {
    pub corpus: Corpus,
    pub warnings: Vec<String>,
}

fn xml_files(dir: &Path) -> Result<Vec<PathBuf>, IngestError> {
    let dir = if dir.join("lu").is_dir() {
        dir.join("lu")
    } else {
        dir.to_path_buf()
    };
    let entries = std::fs::read_dir(&dir).map_err(|e| IngestError::io(&dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| IngestError::io(&dir, e))?.path();
        if path.extension().is_some_and(|x| x == "xml") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn read(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))
}

fn parse<'a>(path: &Path, xml: &'a str) -> Result<Document<'a>, IngestError> {
    Document::parse(xml).map_err(|e| IngestError::Xml {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

fn children<'a, 'input>(
    node: Node<'a, 'input>,
    name: &'static str,
) -> impl Iterator<Item = Node<'a, 'input>> {
    node.children()
        .filter(move |n| n.is_element() && n.tag_name().name() == name)
}

fn lu_header<'a>(path: &Path, doc: &'a Document) -> Result<(Node<'a, 'a>, String, String), IngestError> {
    let root = doc.root_element();
    let xml_err = |reason: &str| IngestError::Xml {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    if root.tag_name().name() != "lexUnit" {
        return Err(xml_err("root element is not <lexUnit>"));
    }
    let name = root
        .attribute("name")
        .ok_or_else(|| xml_err("<lexUnit> has no name attribute"))?;
    let frame = root
        .attribute("frame")
        .ok_or_else(|| xml_err("<lexUnit> has no frame attribute"))?;
    Ok((root, name.to_string(), frame.to_string()))
}

/// Builds a lexicon from the `<header><frame>` blocks and lexical-unit names
/// of every file in `dir`. Frames are ordered by name.
pub fn read_luxml_lexicon(dir: impl AsRef<Path>) -> Result<Lexicon, IngestError> {
    let mut frames: BTreeMap<String, Frame> = BTreeMap::new();
    for path in xml_files(dir.as_ref())? {
        let xml = read(&path)?;
        let doc = parse(&path, &xml)?;
        let (root, lu_name, frame_name) = lu_header(&path, &doc)?;
        let lu = LexicalUnit::new(&lu_name, &frame_name).map_err(|e| IngestError::Xml {
            path: path.clone(),
            reason: e.to_string(),
        })?;
        let frame = frames.entry(frame_name.clone()).or_insert_with(|| Frame {
            name: frame_name.clone(),
            fe_defs: Vec::new(),
            lus: Vec::new(),
        });
        if frame.fe_defs.is_empty() {
            let fes = children(root, "header")
                .flat_map(|h| children(h, "frame"))
                .flat_map(|f| children(f, "FE"));
            for fe in fes {
                let Some(name) = fe.attribute("name") else { continue };
                let coreness = match fe.attribute("type") {
                    Some("Core" | "Core-Unexpressed") => Coreness::Core,
                    Some("Extra-Thematic") => Coreness::ExtraThematic,
                    _ => Coreness::Peripheral,
                };
                if frame.fe(name).is_none() {
                    frame.fe_defs.push(FrameElementDef {
                        name: name.to_string(),
                        coreness,
                        frame: frame_name.clone(),
                    });
                }
            }
        }
        if frame.lu(&lu.name).is_none() {
            frame.lus.push(lu);
        }
    }
    Lexicon::new(frames.into_values().collect()).map_err(|e| IngestError::Xml {
        path: dir.as_ref().to_path_buf(),
        reason: e.to_string(),
    })
}

struct Label {
    name: String,
    span: Span,
}

/// Reads annotation sets from every `*.xml` file in `dir` (or `dir/lu`).
pub fn read_framenet_luxml(
    dir: impl AsRef<Path>,
    lexicon: &Lexicon,
    options: LuXmlOptions,
) -> Result<LuXmlImport, IngestError> {
    let mut import = LuXmlImport::default();
    for path in xml_files(dir.as_ref())? {
        let xml = read(&path)?;
        let doc = parse(&path, &xml)?;
        read_file(&path, &doc, lexicon, options, &mut import)?;
    }
    Ok(import)
}

fn read_file(
    path: &Path,
    doc: &Document,
    lexicon: &Lexicon,
    options: LuXmlOptions,
    import: &mut LuXmlImport,
) -> Result<(), IngestError> {
    let (root, lu_name, frame_name) = lu_header(path, doc)?;
    let Some(frame) = lexicon.frame(&frame_name) else {
        return Err(IngestError::Xml {
            path: path.to_path_buf(),
            reason: format!("frame {frame_name:?} is not in the lexicon"),
        });
    };
    let lu = LexicalUnit::new(&lu_name, &frame_name).map_err(|e| IngestError::Xml {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    if frame.lu(&lu.name).is_none() {
        return Err(IngestError::Xml {
            path: path.to_path_buf(),
            reason: format!("lexical unit {:?} is not in frame {frame_name:?}", lu.name),
        });
    }
    let file = path.display();
    let mut warn = |msg: String| {
        log::warn!("{msg}");
        import.warnings.push(msg);
    };

    for sentence in root.descendants().filter(|n| n.has_tag_name("sentence")) {
        let sid = sentence.attribute("ID").unwrap_or("?").to_string();
        let Some(raw) = children(sentence, "text").next().and_then(|t| t.text()) else {
            warn(format!("{file}: sentence {sid} has no text; skipped"));
            continue;
        };
        let offset_err = |reason: String| IngestError::Offset {
            path: path.to_path_buf(),
            sentence: sid.clone(),
            reason,
        };
        let mut produced = 0;
        for (k, aset) in children(sentence, "annotationSet").enumerate() {
            let mut targets = Vec::new();
            let mut fes = Vec::new();
            for layer in children(aset, "layer") {
                let rank = layer.attribute("rank").unwrap_or("1");
                match layer.attribute("name") {
                    Some("Target") if rank == "1" => {
                        targets.extend(labels(layer, raw, options.offsets).map_err(&offset_err)?)
                    }
                    Some("FE") if rank == "1" => {
                        fes.extend(labels(layer, raw, options.offsets).map_err(&offset_err)?)
                    }
                    Some("FE") => warn(format!(
                        "{file}: sentence {sid}: FE layer of rank {rank} dropped"
                    )),
                    _ => {}
                }
            }
            if targets.is_empty() {
                continue;
            }
            let id = aset
                .attribute("ID")
                .map(str::to_string)
                .unwrap_or_else(|| format!("{}:{sid}:{k}", lu.name));
            let Some(target) = merge_target(raw, &mut targets) else {
                warn(format!("{file}: annotation set {id}: discontinuous target; skipped"));
                continue;
            };
            let mut kept: Vec<Label> = Vec::new();
            for fe in fes {
                if frame.fe(&fe.name).is_none() {
                    warn(format!("{file}: annotation set {id}: unknown FE {:?} dropped", fe.name));
                } else if fe.span.partially_overlaps(&target) {
                    warn(format!("{file}: annotation set {id}: FE {} crosses the target; dropped", fe.name));
                } else if kept.iter().any(|o| o.span.overlaps(&fe.span)) {
                    warn(format!("{file}: annotation set {id}: overlapping FE {} dropped", fe.name));
                } else {
                    kept.push(fe);
                }
            }
            let set = align_to_tokens(raw, id.clone(), &lu, target, kept);
            if let Err(e) = import.corpus.push(set) {
                warn(format!("{file}: {e}; skipped"));
                continue;
            }
            produced += 1;
        }
        if produced == 0 {
            warn(format!("{file}: sentence {sid} has no Target label; skipped"));
        }
    }
    Ok(())
}

fn labels(layer: Node, sentence: &str, unit: OffsetUnit) -> Result<Vec<Label>, String> {
    let len = text::char_len(sentence);
    let mut out = Vec::new();
    for label in children(layer, "label") {
        let (Some(start), Some(end)) = (label.attribute("start"), label.attribute("end")) else {
            // null instantiation: no text extent
            continue;
        };
        let name = label.attribute("name").unwrap_or("").to_string();
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| format!("label {name:?} has non-numeric offset {s:?}"))
        };
        let (start, end_incl) = (parse(start)?, parse(end)?);
        if end_incl < start {
            return Err(format!("label {name:?} ends before it starts"));
        }
        let (start, end) = match unit {
            OffsetUnit::Chars => (start, end_incl + 1),
            OffsetUnit::Bytes => {
                let conv = |b: usize| {
                    text::byte_to_char(sentence, b)
                        .ok_or_else(|| format!("label {name:?} byte offset {b} is not a character boundary of the sentence"))
                };
                if end_incl + 1 > sentence.len() {
                    return Err(format!("label {name:?} [{start}, {end_incl}] exceeds sentence length {}", sentence.len()));
                }
                (conv(start)?, conv(end_incl + 1)?)
            }
        };
        if end > len {
            return Err(format!(
                "label {name:?} [{start}, {}] exceeds sentence length {len}",
                end - 1
            ));
        }
        let Some(span) = trim(sentence, Span::new_unchecked(start, end)) else {
            continue;
        };
        out.push(Label { name, span });
    }
    Ok(out)
}

/// Shrinks a span past leading and trailing whitespace.
fn trim(sentence: &str, span: Span) -> Option<Span> {
    let chars: Vec<char> = sentence.chars().collect();
    let (mut s, mut e) = (span.start, span.end);
    while s < e && chars[s].is_whitespace() {
        s += 1;
    }
    while e > s && chars[e - 1].is_whitespace() {
        e -= 1;
    }
    Span::new(s, e).ok()
}

/// Joins target labels separated only by whitespace; `None` when the
/// labels leave real text between them.
fn merge_target(sentence: &str, targets: &mut [Label]) -> Option<Span> {
    targets.sort_by_key(|l| l.span);
    let mut span = targets[0].span;
    for next in &targets[1..] {
        let gap = text::slice(sentence, Span { start: span.end, end: next.span.start.max(span.end) })
            .unwrap_or("");
        if next.span.start >= span.end && !gap.chars().all(char::is_whitespace) {
            return None;
        }
        span.end = span.end.max(next.span.end);
    }
    Some(span)
}

fn align_to_tokens(
    raw: &str,
    id: String,
    lu: &LexicalUnit,
    target: Span,
    fes: Vec<Label>,
) -> AnnotationSet {
    let chars: Vec<char> = raw.chars().collect();
    let mut cuts: Vec<usize> = std::iter::once(target)
        .chain(fes.iter().map(|l| l.span))
        .flat_map(|s| [s.start, s.end])
        .filter(|&b| b > 0 && b < chars.len() && !chars[b - 1].is_whitespace() && !chars[b].is_whitespace())
        .collect();
    cuts.sort_unstable();
    cuts.dedup();

    let mut sentence = String::with_capacity(raw.len() + cuts.len());
    for (i, c) in chars.iter().enumerate() {
        if cuts.binary_search(&i).is_ok() {
            sentence.push(' ');
        }
        sentence.push(*c);
    }
    let shift = |s: Span| Span {
        start: s.start + cuts.partition_point(|&c| c <= s.start),
        end: s.end + cuts.partition_point(|&c| c < s.end),
    };
    let mut fes: Vec<FeSpan> = fes
        .into_iter()
        .map(|l| FeSpan {
            fe_name: l.name,
            span: shift(l.span),
        })
        .collect();
    fes.sort_by_key(|f| f.span);
    AnnotationSet {
        id,
        frame: lu.frame.clone(),
        lu_name: lu.name.clone(),
        sentence,
        target: shift(target),
        fes,
        source: Source::Lexicographic,
    }
}

//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check requested with `--strict` failed (or
//! scoring could not align gold and predictions), 2 I/O or parse error.
//! Logs go to standard error; data goes to files or standard output.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::augment::{self, AugmentOptions, AugmentStats, ProvenanceRecord};
use crate::ingest::{self, LuXmlOptions, OffsetUnit};
use crate::model::{self, Corpus, Lexicon};
use crate::morphology::{IrregularLexicon, Morphology};
use crate::scorer::{self, ArgIdMode};
use crate::splits;

#[derive(Debug, Parser)]
#[command(name = "frameaug", version, about = "Annotation transfer for frame-semantic corpora")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Lexicon: frames.jsonl, or a directory of lexical-unit XML files.
    #[arg(long, global = true, value_name = "PATH")]
    pub lexicon: Option<PathBuf>,
    /// Corpus file; repeatable. `score` takes gold first, then predictions.
    #[arg(long, global = true, value_name = "PATH")]
    pub corpus: Vec<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for held-out sampling.
    #[arg(long, global = true, default_value_t = 0, value_name = "U64")]
    pub seed: u64,
    /// Number of lexical units to hold out.
    #[arg(long, global = true, default_value_t = 1500, value_name = "N")]
    pub holdout: usize,
    /// Inflect with regular rules only.
    #[arg(long, global = true)]
    pub no_irregulars: bool,
    /// Extra irregular-forms table merged over the bundled one.
    #[arg(long, global = true, value_name = "PATH")]
    pub irregulars: Option<PathBuf>,
    /// Output format for `convert`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Unit of label offsets in lexical-unit XML.
    #[arg(long, global = true, value_enum, default_value_t = Offsets::Chars)]
    pub xml_offsets: Offsets,
    /// Fail with exit code 1 on validation errors or diagnostics; score
    /// arguments under wrong frames as false positives.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// More logging; repeat for debug output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Check a corpus against the lexicon.
    Validate,
    /// Lexicon and corpus census.
    Stats,
    /// Generate annotation for every empty lexical unit.
    Augment,
    /// Build baseline and augmented training sets from a held-out plan.
    Split,
    /// Score predictions against gold.
    Score,
    /// Convert between corpus formats.
    Convert,
    /// Flag generated tokens that disagree with the irregular table.
    Diagnose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Conll,
    Luxml,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Offsets {
    Chars,
    Bytes,
}

/// Whether a command succeeded or a `--strict` check failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Failed,
}

impl Outcome {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Outcome::Ok
        } else {
            Outcome::Failed
        }
    }
}

/// Runs a parsed command line and maps the result to an exit code.
pub fn main_with(cli: Cli) -> ExitCode {
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            log::error!("{e:#}");
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match cli.command {
        Command::Validate => validate(cli),
        Command::Stats => stats(cli),
        Command::Augment => augment(cli),
        Command::Split => split(cli),
        Command::Score => score(cli),
        Command::Convert => convert(cli),
        Command::Diagnose => diagnose(cli),
    }
}

fn morphology(cli: &Cli) -> Result<Morphology> {
    let mut table = IrregularLexicon::bundled();
    if let Some(path) = &cli.irregulars {
        table.merge(IrregularLexicon::load(path).with_context(|| path.display().to_string())?);
    }
    Ok(Morphology::new(table, !cli.no_irregulars))
}

fn xml_options(cli: &Cli) -> LuXmlOptions {
    LuXmlOptions {
        offsets: match cli.xml_offsets {
            Offsets::Chars => OffsetUnit::Chars,
            Offsets::Bytes => OffsetUnit::Bytes,
        },
    }
}

fn lexicon(cli: &Cli) -> Result<Lexicon> {
    let Some(path) = &cli.lexicon else {
        bail!("--lexicon is required");
    };
    let lex = if path.is_dir() {
        ingest::read_luxml_lexicon(path)
    } else {
        ingest::load_lexicon(path)
    };
    lex.with_context(|| path.display().to_string())
}

fn input_format(path: &Path) -> Format {
    if path.is_dir() {
        Format::Luxml
    } else if path.extension().is_some_and(|x| x == "conll") {
        Format::Conll
    } else {
        Format::Jsonl
    }
}

/// Loads one corpus file, checked against `lexicon` when given.
fn load_one(cli: &Cli, path: &Path, lexicon: Option<&Lexicon>) -> Result<Corpus> {
    let ctx = || path.display().to_string();
    Ok(match (input_format(path), lexicon) {
        (Format::Jsonl, Some(lex)) => ingest::load_corpus(path, lex).with_context(ctx)?,
        (Format::Jsonl, None) => {
            let file = fs::File::open(path).with_context(ctx)?;
            ingest::read_corpus_unchecked(io::BufReader::new(file)).with_context(ctx)?
        }
        (Format::Conll, _) => Corpus::new(ingest::read_conll(path).with_context(ctx)?)?,
        (Format::Luxml, lex) => {
            let owned;
            let lex = match lex {
                Some(l) => l,
                None => {
                    owned = ingest::read_luxml_lexicon(path).with_context(ctx)?;
                    &owned
                }
            };
            // warnings are logged by the reader
            ingest::read_framenet_luxml(path, lex, xml_options(cli))
                .with_context(ctx)?
                .corpus
        }
    })
}

fn corpora(cli: &Cli, lexicon: Option<&Lexicon>) -> Result<Corpus> {
    if cli.corpus.is_empty() {
        bail!("--corpus is required");
    }
    let parts = cli
        .corpus
        .iter()
        .map(|p| load_one(cli, p, lexicon))
        .collect::<Result<Vec<_>>>()?;
    Ok(Corpus::merged(parts)?)
}

fn out_dir(cli: &Cli) -> Result<&Path> {
    let Some(dir) = &cli.out else {
        bail!("--out is required");
    };
    fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
    Ok(dir)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| path.display().to_string())
}

/// Writes `value` as `<out>/<name>` and `table` to stdout, or just the JSON
/// to stdout when there is no output directory.
fn emit(cli: &Cli, name: &str, value: &impl Serialize, table: &str) -> Result<()> {
    let mut stdout = io::stdout().lock();
    match &cli.out {
        Some(_) => {
            write_json(&out_dir(cli)?.join(name), value)?;
            stdout.write_all(table.as_bytes())?;
        }
        None => {
            serde_json::to_writer_pretty(&mut stdout, value)?;
            writeln!(stdout)?;
        }
    }
    Ok(())
}

fn augment_options(cli: &Cli) -> AugmentOptions {
    AugmentOptions { jobs: cli.jobs }
}

fn validate(cli: &Cli) -> Result<Outcome> {
    let lex = lexicon(cli)?;
    let corpus = corpora(cli, None)?;
    let report = model::validate_with(&lex, &corpus, &morphology(cli)?);
    #[derive(Serialize)]
    struct Report<'a> {
        valid: bool,
        sets: usize,
        errors: Vec<Issue<'a>>,
        warnings: Vec<Issue<'a>>,
    }
    #[derive(Serialize)]
    struct Issue<'a> {
        id: &'a str,
        rule: &'a str,
        message: &'a str,
    }
    fn issues(v: &[model::Issue]) -> Vec<Issue<'_>> {
        v.iter()
            .map(|i| Issue {
                id: &i.id,
                rule: i.rule.as_str(),
                message: &i.message,
            })
            .collect()
    }
    let mut table = format!(
        "{} sets: {} errors, {} warnings\n",
        corpus.len(),
        report.errors.len(),
        report.warnings.len()
    );
    for (kind, list) in [("error", &report.errors), ("warning", &report.warnings)] {
        for i in list {
            table.push_str(&format!("{kind}\t{}\t{}\t{}\n", i.id, i.rule.as_str(), i.message));
        }
    }
    let json = Report {
        valid: report.is_valid(),
        sets: corpus.len(),
        errors: issues(&report.errors),
        warnings: issues(&report.warnings),
    };
    emit(cli, "validation.json", &json, &table)?;
    Ok(Outcome::from_ok(report.is_valid() || !cli.strict))
}

#[derive(Debug, Default, Serialize)]
struct PosCount {
    lus: usize,
    annotated: usize,
    empty: usize,
}

#[derive(Debug, Serialize)]
struct Census {
    frames: usize,
    lus: usize,
    annotated: usize,
    empty: usize,
    empty_pct: f64,
    mwe: usize,
    sets: usize,
    per_pos: BTreeMap<String, PosCount>,
}

fn census(lex: &Lexicon, corpus: &Corpus) -> Census {
    let mut per_pos: BTreeMap<String, PosCount> = BTreeMap::new();
    let (mut annotated, mut mwe) = (0, 0);
    for lu in lex.lus() {
        let has = corpus.count_for(&lu.frame, &lu.name) > 0;
        let row = per_pos.entry(lu.pos.tag().to_string()).or_default();
        row.lus += 1;
        if has {
            row.annotated += 1;
            annotated += 1;
        } else {
            row.empty += 1;
        }
        mwe += usize::from(lu.is_mwe());
    }
    let lus = lex.lu_count();
    let empty = lus - annotated;
    let empty_pct = if lus == 0 {
        0.0
    } else {
        (empty as f64 * 1000.0 / lus as f64).round() / 10.0
    };
    Census {
        frames: lex.frames().len(),
        lus,
        annotated,
        empty,
        empty_pct,
        mwe,
        sets: corpus.len(),
        per_pos,
    }
}

fn stats(cli: &Cli) -> Result<Outcome> {
    let lex = lexicon(cli)?;
    let corpus = corpora(cli, Some(&lex))?;
    let c = census(&lex, &corpus);
    let mut table = format!(
        "frames     {}\nlus        {}\nannotated  {}\nempty      {} ({:.1}%)\nmwe        {}\nsets       {}\n\npos  lus  annotated  empty\n",
        c.frames, c.lus, c.annotated, c.empty, c.empty_pct, c.mwe, c.sets
    );
    for (pos, row) in &c.per_pos {
        table.push_str(&format!("{pos:<4} {:>4} {:>10} {:>6}\n", row.lus, row.annotated, row.empty));
    }
    emit(cli, "stats.json", &c, &table)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct StatsFile {
    #[serde(flatten)]
    stats: AugmentStats,
    coverage_ratio: f64,
}

fn stats_table(s: &AugmentStats) -> String {
    format!(
        "empty lexical units     {}\n  multiword excluded    {}\n  no sister             {}\n  eligible              {} ({:.1}%)\nsentences generated     {}\nskipped: form mismatch  {}\nskipped: span conflict  {}\n",
        s.empty_lu_count,
        s.mwe_excluded_count,
        s.no_sister_count,
        s.eligible_empty_lu_count,
        s.coverage_ratio() * 100.0,
        s.sentences_generated,
        s.skipped_form_mismatch,
        s.skipped_span_conflict
    )
}

fn write_provenance(path: &Path, records: &[augment::AugmentationRecord]) -> Result<()> {
    let mut out = io::BufWriter::new(fs::File::create(path).with_context(|| path.display().to_string())?);
    for r in records {
        serde_json::to_writer(&mut out, &ProvenanceRecord::from(r))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn augment(cli: &Cli) -> Result<Outcome> {
    let lex = lexicon(cli)?;
    let corpus = corpora(cli, Some(&lex))?;
    let morph = morphology(cli)?;
    let dir = out_dir(cli)?;
    let aug = augment::augment_corpus(&lex, &corpus, &morph, augment_options(cli));
    ingest::write_corpus_file(aug.records.iter().map(|r| &r.annotation), dir.join("augmented.jsonl"))?;
    write_provenance(&dir.join("provenance.jsonl"), &aug.records)?;
    write_json(
        &dir.join("stats.json"),
        &StatsFile {
            stats: aug.stats,
            coverage_ratio: aug.stats.coverage_ratio(),
        },
    )?;
    print!("{}", stats_table(&aug.stats));
    Ok(Outcome::Ok)
}

fn split(cli: &Cli) -> Result<Outcome> {
    let lex = lexicon(cli)?;
    let corpus = corpora(cli, Some(&lex))?;
    let morph = morphology(cli)?;
    let dir = out_dir(cli)?;
    let exp = splits::build_experiment(&lex, &corpus, cli.holdout, cli.seed, &morph, augment_options(cli))?;
    write_json(&dir.join("plan.json"), &exp.plan)?;
    ingest::write_corpus_file(exp.baseline.sets(), dir.join("baseline.jsonl"))?;
    ingest::write_corpus_file(exp.augmented.sets(), dir.join("augmented.jsonl"))?;
    ingest::write_corpus_file(exp.stripped.sets(), dir.join("heldout_gold.jsonl"))?;
    ingest::export_conll(&exp.baseline, dir.join("baseline.conll"))?;
    ingest::export_conll(&exp.augmented, dir.join("augmented.conll"))?;
    write_provenance(&dir.join("provenance.jsonl"), &exp.records)?;
    write_json(
        &dir.join("stats.json"),
        &StatsFile {
            stats: exp.stats,
            coverage_ratio: exp.stats.coverage_ratio(),
        },
    )?;
    println!(
        "held out {} lexical units, stripped {} sets\nbaseline {} sets, augmented {} sets",
        exp.plan.held_out.len(),
        exp.plan.stripped_ids.len(),
        exp.baseline.len(),
        exp.augmented.len()
    );
    print!("{}", stats_table(&exp.stats));
    Ok(Outcome::Ok)
}

fn score(cli: &Cli) -> Result<Outcome> {
    let [gold, pred] = cli.corpus.as_slice() else {
        bail!("score takes exactly two --corpus paths: gold, then predictions");
    };
    let gold = load_one(cli, gold, None)?;
    let pred = load_one(cli, pred, None)?;
    let mode = if cli.strict {
        ArgIdMode::Strict
    } else {
        ArgIdMode::GoldFrames
    };
    match scorer::score_report(&gold, &pred, mode) {
        Ok(report) => {
            emit(cli, "report.json", &report, &report.to_table())?;
            Ok(Outcome::Ok)
        }
        Err(e) => {
            eprintln!("{e}");
            Ok(Outcome::Failed)
        }
    }
}

fn convert(cli: &Cli) -> Result<Outcome> {
    let [input] = cli.corpus.as_slice() else {
        bail!("convert takes exactly one --corpus path");
    };
    let to = cli.format.unwrap_or(Format::Jsonl);
    if to == Format::Luxml {
        bail!("lexical-unit XML is an input format only");
    }
    let from = input_format(input);
    let lex = match (&cli.lexicon, from) {
        (Some(_), _) => Some(lexicon(cli)?),
        (None, Format::Luxml) => Some(
            ingest::read_luxml_lexicon(input).with_context(|| input.display().to_string())?,
        ),
        (None, _) => None,
    };
    let corpus = load_one(cli, input, lex.as_ref())?;
    let dir = out_dir(cli)?;
    match to {
        Format::Jsonl => ingest::write_corpus_file(corpus.sets(), dir.join("corpus.jsonl"))?,
        Format::Conll => {
            ingest::export_conll(&corpus, dir.join("corpus.conll"))?;
        }
        Format::Luxml => unreachable!(),
    }
    if from == Format::Luxml {
        if let Some(lex) = &lex {
            ingest::write_lexicon_file(lex, dir.join("lexicon.jsonl"))?;
        }
    }
    println!("{} sets", corpus.len());
    Ok(Outcome::Ok)
}

fn diagnose(cli: &Cli) -> Result<Outcome> {
    let [path] = cli.corpus.as_slice() else {
        bail!("diagnose takes one --corpus path to a provenance.jsonl file");
    };
    let text = fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let records = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str::<ProvenanceRecord>(l)
                .with_context(|| format!("{}:{}", path.display(), i + 1))
        })
        .collect::<Result<Vec<_>>>()?;
    let flags = augment::diagnose(&records, &morphology(cli)?);
    let mut table = format!("{} of {} records flagged\n", flags.len(), records.len());
    for f in &flags {
        table.push_str(&format!("{}\t{}\t{}\n", f.annotation_id, f.category, f.detail));
    }
    emit(cli, "diagnostics.json", &flags, &table)?;
    Ok(Outcome::from_ok(flags.is_empty() || !cli.strict))
}

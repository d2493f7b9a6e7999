//! On-disk interchange formats used between subcommands: token JSONL, label
//! lists, and vocabulary tables.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};
use tasnif::corpus::{LabeledCorpus, Polarity};
use tasnif::textprep::{preprocess, PrepConfig, TokenStream};
use tasnif::vectorize::{NgramSpec, Vocabulary};

use crate::{CliError, CliResult};

#[derive(Debug, Serialize, Deserialize)]
struct TokenRecord {
    id: String,
    label: String,
    tokens: Vec<String>,
}

/// Preprocesses every document and writes one `{id, label, tokens}` object
/// per line.
pub fn write_tokens_jsonl(path: &Path, corpus: &LabeledCorpus, prep: &PrepConfig) -> CliResult<()> {
    let file = File::create(path)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(CliError::Runtime)?;
    let mut writer = BufWriter::new(file);
    for doc in corpus.documents() {
        let record = TokenRecord {
            id: doc.id.clone(),
            label: doc.label.to_string(),
            tokens: preprocess(&doc.text, prep).into_tokens(),
        };
        serde_json::to_writer(&mut writer, &record)
            .map_err(|e| CliError::Runtime(anyhow!("cannot serialize token record: {e}")))?;
        writeln!(writer).map_err(|e| CliError::Runtime(e.into()))?;
    }
    writer.flush().map_err(|e| CliError::Runtime(e.into()))
}

/// Reads a token JSONL file back into aligned ids, token streams, and labels.
pub fn read_tokens_jsonl(path: &Path) -> CliResult<(Vec<String>, Vec<TokenStream>, Vec<Polarity>)> {
    let file = File::open(path)
        .with_context(|| format!("cannot open {}", path.display()))
        .map_err(CliError::Runtime)?;
    let reader = BufReader::new(file);
    let mut ids = Vec::new();
    let mut tokens = Vec::new();
    let mut labels = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::Runtime(e.into()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: TokenRecord = serde_json::from_str(&line).map_err(|e| {
            CliError::Runtime(anyhow!(
                "{}:{}: bad token record: {e}",
                path.display(),
                index + 1
            ))
        })?;
        ids.push(record.id);
        labels.push(Polarity::from_str(&record.label)?);
        tokens.push(TokenStream::new(record.tokens));
    }
    if tokens.is_empty() {
        return Err(CliError::Runtime(anyhow!(
            "{}: no token records",
            path.display()
        )));
    }
    Ok((ids, tokens, labels))
}

/// One polarity per line, aligned with matrix rows.
pub fn write_labels(path: &Path, labels: &[Polarity]) -> CliResult<()> {
    let mut out = String::new();
    for label in labels {
        out.push_str(label.as_str());
        out.push('\n');
    }
    std::fs::write(path, out)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(CliError::Runtime)
}

pub fn read_labels(path: &Path) -> CliResult<Vec<Polarity>> {
    let contents = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(CliError::Runtime)?;
    contents
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Polarity::from_str(l.trim()).map_err(CliError::from))
        .collect()
}

/// Tab-separated vocabulary: a `#ndocs <n> <spec>` header then
/// `index term df` rows in index order.
pub fn write_vocab(path: &Path, vocab: &Vocabulary) -> CliResult<()> {
    let file = File::create(path)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(CliError::Runtime)?;
    let mut writer = BufWriter::new(file);
    writeln!(writer, "#ndocs\t{}\t{}", vocab.n_docs(), vocab.spec())
        .map_err(|e| CliError::Runtime(e.into()))?;
    for (index, term) in vocab.terms().iter().enumerate() {
        writeln!(writer, "{index}\t{term}\t{}", vocab.df(index))
            .map_err(|e| CliError::Runtime(e.into()))?;
    }
    writer.flush().map_err(|e| CliError::Runtime(e.into()))
}

pub fn read_vocab(path: &Path) -> CliResult<Vocabulary> {
    let contents = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(CliError::Runtime)?;
    let mut lines = contents.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Runtime(anyhow!("{}: empty vocabulary", path.display())))?;
    let mut parts = header.split('\t');
    if parts.next() != Some("#ndocs") {
        return Err(CliError::Runtime(anyhow!(
            "{}: expected #ndocs header",
            path.display()
        )));
    }
    let n_docs: usize = parts
        .next()
        .and_then(|p| p.parse().ok())
        .ok_or_else(|| CliError::Runtime(anyhow!("{}: bad n_docs", path.display())))?;
    let spec = NgramSpec::from_str(parts.next().unwrap_or("unigram"))?;

    let mut terms = Vec::new();
    let mut df = Vec::new();
    for (index, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let bad = || CliError::Runtime(anyhow!("{}:{}: bad vocab row", path.display(), index + 2));
        let row_index: usize = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        if row_index != terms.len() {
            return Err(bad());
        }
        terms.push(parts.next().ok_or_else(bad)?.to_string());
        df.push(parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?);
    }
    Ok(Vocabulary::from_parts(terms, df, n_docs, spec)?)
}

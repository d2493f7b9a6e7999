//! Labeled review corpora: loading, balanced sampling, and stratified fold plans.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Xoshiro256PlusPlus;

/// Binary sentiment label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    /// Class encoding used by the learner: +1 for positive, -1 for negative.
    pub fn encoding(self) -> i8 {
        match self {
            Polarity::Positive => 1,
            Polarity::Negative => -1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(Polarity::Positive),
            "negative" => Ok(Polarity::Negative),
            other => Err(Error::InvalidParam(format!("unknown polarity {other:?}"))),
        }
    }
}

/// A single labeled review.
#[derive(Debug, Clone)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: Polarity,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Polarity) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            label,
        }
    }
}

/// Per-polarity document counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassCounts {
    pub positive: usize,
    pub negative: usize,
}

impl ClassCounts {
    pub fn total(self) -> usize {
        self.positive + self.negative
    }

    pub fn of(self, class: Polarity) -> usize {
        match class {
            Polarity::Positive => self.positive,
            Polarity::Negative => self.negative,
        }
    }
}

/// Ordered collection of labeled documents.
///
/// Iteration order is load order and never changes after construction.
#[derive(Debug, Clone)]
pub struct LabeledCorpus {
    documents: Vec<Document>,
}

impl LabeledCorpus {
    /// Builds a corpus, rejecting empty input, duplicate ids, and empty texts.
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::EmptyCorpus("no documents".into()));
        }
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if doc.text.is_empty() {
                return Err(Error::InvalidParam(format!(
                    "document {:?} has empty text",
                    doc.id
                )));
            }
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
        }
        Ok(LabeledCorpus { documents })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn class_counts(&self) -> ClassCounts {
        let positive = self
            .documents
            .iter()
            .filter(|d| d.label == Polarity::Positive)
            .count();
        ClassCounts {
            positive,
            negative: self.documents.len() - positive,
        }
    }

    pub fn labels(&self) -> Vec<Polarity> {
        self.documents.iter().map(|d| d.label).collect()
    }
}

/// Supported corpus file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Csv,
    Tsv,
    Jsonl,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(CorpusFormat::Csv),
            "tsv" => Ok(CorpusFormat::Tsv),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            other => Err(Error::InvalidParam(format!(
                "unknown corpus format {other:?} (expected csv, tsv, or jsonl)"
            ))),
        }
    }
}

/// Mapping from label strings in the input file to polarities.
#[derive(Debug, Clone, Default)]
pub struct LabelMap {
    map: HashMap<String, Polarity>,
}

impl LabelMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: impl Into<String>, polarity: Polarity) {
        self.map.insert(label.into(), polarity);
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Polarity)>,
        S: Into<String>,
    {
        let mut map = LabelMap::new();
        for (label, polarity) in pairs {
            map.insert(label, polarity);
        }
        map
    }

    pub fn get(&self, label: &str) -> Option<Polarity> {
        self.map.get(label).copied()
    }
}

/// Loads a labeled corpus from a CSV, TSV, or JSONL file.
///
/// CSV/TSV files need a header row naming `text_field` and `label_field`;
/// quoted fields and escaped quotes are honored. JSONL files hold one object
/// per line. Ids come from an `id` column/key when one exists, otherwise the
/// 0-based record index is used. File order is preserved.
pub fn load_corpus(
    path: &Path,
    format: CorpusFormat,
    text_field: &str,
    label_field: &str,
    label_map: &LabelMap,
) -> Result<LabeledCorpus> {
    let documents = match format {
        CorpusFormat::Csv => load_delimited(path, b',', text_field, label_field, label_map)?,
        CorpusFormat::Tsv => load_delimited(path, b'\t', text_field, label_field, label_map)?,
        CorpusFormat::Jsonl => load_jsonl(path, text_field, label_field, label_map)?,
    };
    if documents.is_empty() {
        return Err(Error::EmptyCorpus(path.display().to_string()));
    }
    LabeledCorpus::new(documents)
}

fn load_delimited(
    path: &Path,
    delimiter: u8,
    text_field: &str,
    label_field: &str,
    label_map: &LabelMap,
) -> Result<Vec<Document>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(file);

    let headers = reader
        .headers()
        .map_err(|e| Error::MalformedRow {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let text_col = find(text_field).ok_or_else(|| Error::MalformedRow {
        line: 1,
        message: format!("missing column {text_field:?}"),
    })?;
    let label_col = find(label_field).ok_or_else(|| Error::MalformedRow {
        line: 1,
        message: format!("missing column {label_field:?}"),
    })?;
    let id_col = find("id");

    let mut documents = Vec::new();
    for (index, record) in reader.records().enumerate() {
        // Header occupies line 1; data rows start at line 2.
        let line = index + 2;
        let record = record.map_err(|e| Error::MalformedRow {
            line,
            message: e.to_string(),
        })?;
        let text = record.get(text_col).unwrap_or("");
        let label_str = record.get(label_col).unwrap_or("");
        let label = label_map
            .get(label_str)
            .ok_or_else(|| Error::UnmappedLabel {
                line,
                label: label_str.to_string(),
            })?;
        if text.is_empty() {
            return Err(Error::MalformedRow {
                line,
                message: "empty text field".into(),
            });
        }
        let id = match id_col.and_then(|c| record.get(c)) {
            Some(id) if !id.is_empty() => id.to_string(),
            _ => index.to_string(),
        };
        documents.push(Document::new(id, text, label));
    }
    Ok(documents)
}

fn load_jsonl(
    path: &Path,
    text_field: &str,
    label_field: &str,
    label_map: &LabelMap,
) -> Result<Vec<Document>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut documents = Vec::new();
    let mut index = 0usize;
    for (line_index, line) in reader.lines().enumerate() {
        let line_no = line_index + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| Error::MalformedRow {
                line: line_no,
                message: e.to_string(),
            })?;
        let text = value
            .get(text_field)
            .and_then(|v| v.as_str())
            .ok_or_else(|| Error::MalformedRow {
                line: line_no,
                message: format!("missing string field {text_field:?}"),
            })?;
        let label_str = match value.get(label_field) {
            Some(serde_json::Value::String(s)) => s.clone(),
            Some(other) => other.to_string(),
            None => {
                return Err(Error::MalformedRow {
                    line: line_no,
                    message: format!("missing field {label_field:?}"),
                })
            }
        };
        let label = label_map.get(&label_str).ok_or(Error::UnmappedLabel {
            line: line_no,
            label: label_str,
        })?;
        if text.is_empty() {
            return Err(Error::MalformedRow {
                line: line_no,
                message: "empty text field".into(),
            });
        }
        let id = match value.get("id") {
            Some(serde_json::Value::String(s)) if !s.is_empty() => s.clone(),
            Some(serde_json::Value::Number(n)) => n.to_string(),
            _ => index.to_string(),
        };
        documents.push(Document::new(id, text, label));
        index += 1;
    }
    Ok(documents)
}

/// Draws exactly `n_per_class` documents per polarity, uniformly without
/// replacement. Output preserves the input's relative order and is a pure
/// function of `(corpus, n_per_class, seed)`.
pub fn balance_sample(
    corpus: &LabeledCorpus,
    n_per_class: usize,
    seed: u64,
) -> Result<LabeledCorpus> {
    let counts = corpus.class_counts();
    for class in [Polarity::Positive, Polarity::Negative] {
        let available = counts.of(class);
        if available < n_per_class {
            return Err(Error::InsufficientClass {
                class,
                available,
                needed: n_per_class,
            });
        }
    }

    let mut keep: HashSet<usize> = HashSet::with_capacity(2 * n_per_class);
    for (stream, class) in [(0u64, Polarity::Positive), (1u64, Polarity::Negative)] {
        let class_indices: Vec<usize> = corpus
            .documents()
            .iter()
            .enumerate()
            .filter(|(_, d)| d.label == class)
            .map(|(i, _)| i)
            .collect();
        let mut rng = Xoshiro256PlusPlus::stream(seed, stream);
        for pick in rng.sample_indices(class_indices.len(), n_per_class) {
            keep.insert(class_indices[pick]);
        }
    }

    let documents = corpus
        .documents()
        .iter()
        .enumerate()
        .filter(|(i, _)| keep.contains(i))
        .map(|(_, d)| d.clone())
        .collect();
    LabeledCorpus::new(documents)
}

/// Assignment of every document to one of `k` folds, stratified by class.
#[derive(Debug, Clone)]
pub struct FoldPlan {
    k: usize,
    seed: u64,
    assignment: BTreeMap<String, usize>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fold_of(&self, id: &str) -> Option<usize> {
        self.assignment.get(id).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<String, usize> {
        &self.assignment
    }

    /// Corpus positions whose documents test in `fold`.
    pub fn test_indices(&self, corpus: &LabeledCorpus, fold: usize) -> Result<Vec<usize>> {
        self.split_indices(corpus, fold, true)
    }

    /// Corpus positions whose documents train for `fold`.
    pub fn train_indices(&self, corpus: &LabeledCorpus, fold: usize) -> Result<Vec<usize>> {
        self.split_indices(corpus, fold, false)
    }

    fn split_indices(
        &self,
        corpus: &LabeledCorpus,
        fold: usize,
        matching: bool,
    ) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, doc) in corpus.documents().iter().enumerate() {
            let assigned = self
                .fold_of(&doc.id)
                .ok_or_else(|| Error::MissingFromPlan(doc.id.clone()))?;
            if (assigned == fold) == matching {
                out.push(i);
            }
        }
        Ok(out)
    }
}

/// Plans a stratified k-fold split: within each class the documents are
/// shuffled by the seeded generator and dealt round-robin, so per-fold class
/// counts differ by at most one.
pub fn stratified_kfold(corpus: &LabeledCorpus, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::TooFewFolds(k));
    }
    let counts = corpus.class_counts();
    for class in [Polarity::Positive, Polarity::Negative] {
        let available = counts.of(class);
        if available < k {
            return Err(Error::ClassSmallerThanFolds {
                class,
                available,
                folds: k,
            });
        }
    }

    let mut assignment = BTreeMap::new();
    for (stream, class) in [(0u64, Polarity::Positive), (1u64, Polarity::Negative)] {
        let mut ids: Vec<&str> = corpus
            .documents()
            .iter()
            .filter(|d| d.label == class)
            .map(|d| d.id.as_str())
            .collect();
        let mut rng = Xoshiro256PlusPlus::stream(seed, stream);
        rng.shuffle(&mut ids);
        for (position, id) in ids.into_iter().enumerate() {
            assignment.insert(id.to_string(), position % k);
        }
    }

    Ok(FoldPlan {
        k,
        seed,
        assignment,
    })
}

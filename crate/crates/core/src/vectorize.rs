//! N-gram vocabularies and sparse weighted document-term matrices.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use crate::corpus::Polarity;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::textprep::TokenStream;

/// Which n-gram orders feed the vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NgramSpec {
    Unigram,
    Bigram,
    /// Unigrams plus bigrams in one vocabulary.
    Combined,
}

impl NgramSpec {
    pub fn orders(self) -> &'static [usize] {
        match self {
            NgramSpec::Unigram => &[1],
            NgramSpec::Bigram => &[2],
            NgramSpec::Combined => &[1, 2],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NgramSpec::Unigram => "unigram",
            NgramSpec::Bigram => "bigram",
            NgramSpec::Combined => "unigram+bigram",
        }
    }
}

impl fmt::Display for NgramSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NgramSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unigram" => Ok(NgramSpec::Unigram),
            "bigram" => Ok(NgramSpec::Bigram),
            "unigram+bigram" | "combined" => Ok(NgramSpec::Combined),
            other => Err(Error::InvalidParam(format!(
                "unknown n-gram spec {other:?} (expected unigram, bigram, or unigram+bigram)"
            ))),
        }
    }
}

/// All contiguous n-token windows for each order in `spec`.
///
/// Emission order: every order-1 term in position order, then every order-2
/// term. Bigram tokens join with a single space; tokens themselves can never
/// contain one, so unigrams and bigrams cannot collide.
pub fn extract_ngrams(tokens: &TokenStream, spec: NgramSpec) -> Vec<String> {
    let toks = tokens.tokens();
    let mut terms = Vec::new();
    for &order in spec.orders() {
        if toks.len() < order {
            continue;
        }
        for window in toks.windows(order) {
            terms.push(window.join(" "));
        }
    }
    terms
}

/// Term index fitted on a document collection.
///
/// Indices are dense, 0-based, and assigned in first-occurrence order during
/// fitting. `df` counts documents containing the term at least once; `n_docs`
/// is the fitting corpus size. Both back the IDF factor.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    index: HashMap<String, usize>,
    terms: Vec<String>,
    df: Vec<u32>,
    n_docs: usize,
    spec: NgramSpec,
}

impl Vocabulary {
    /// Reassembles a vocabulary from its parts (used by file loaders).
    pub fn from_parts(
        terms: Vec<String>,
        df: Vec<u32>,
        n_docs: usize,
        spec: NgramSpec,
    ) -> Result<Self> {
        if terms.len() != df.len() {
            return Err(Error::LengthMismatch {
                what: "terms vs df",
                left: terms.len(),
                right: df.len(),
            });
        }
        let mut index = HashMap::with_capacity(terms.len());
        for (i, term) in terms.iter().enumerate() {
            if index.insert(term.clone(), i).is_some() {
                return Err(Error::InvalidParam(format!("duplicate term {term:?}")));
            }
        }
        Ok(Vocabulary {
            index,
            terms,
            df,
            n_docs,
            spec,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn df(&self, index: usize) -> u32 {
        self.df[index]
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn spec(&self) -> NgramSpec {
        self.spec
    }

    /// IDF vector under the fixed formula `1 + ln(n_docs / df)`.
    pub fn idf<F: Scalar>(&self) -> Vec<F> {
        let n = F::from_count(self.n_docs);
        self.df
            .iter()
            .map(|&df| F::one() + (n / F::from_count(df as usize)).ln())
            .collect()
    }
}

/// Fits a vocabulary over the documents' n-grams, keeping terms with
/// `df >= min_df`.
pub fn build_vocab(docs: &[TokenStream], spec: NgramSpec, min_df: usize) -> Result<Vocabulary> {
    if docs.is_empty() {
        return Err(Error::EmptyInput("document list"));
    }
    if min_df < 1 {
        return Err(Error::InvalidParam("min_df must be at least 1".into()));
    }

    // (df, last document counted) per term; insertion order tracked separately
    // so indices never depend on hash iteration order.
    let mut stats: HashMap<String, (u32, usize)> = HashMap::new();
    let mut order: Vec<String> = Vec::new();
    for (doc_i, doc) in docs.iter().enumerate() {
        for term in extract_ngrams(doc, spec) {
            match stats.get_mut(&term) {
                Some((df, last)) => {
                    if *last != doc_i {
                        *df += 1;
                        *last = doc_i;
                    }
                }
                None => {
                    stats.insert(term.clone(), (1, doc_i));
                    order.push(term);
                }
            }
        }
    }

    let mut terms = Vec::new();
    let mut df = Vec::new();
    for term in order {
        let (count, _) = stats[&term];
        if count as usize >= min_df {
            terms.push(term);
            df.push(count);
        }
    }
    Vocabulary::from_parts(terms, df, docs.len(), spec)
}

/// Term weighting applied when building a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightScheme {
    /// Raw in-document term count.
    Tf,
    /// Term count scaled by `1 + ln(n_docs / df)`.
    TfIdf,
    /// Binary term presence.
    Btp,
}

impl WeightScheme {
    pub const ALL: [WeightScheme; 3] = [WeightScheme::Tf, WeightScheme::TfIdf, WeightScheme::Btp];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightScheme::Tf => "tf",
            WeightScheme::TfIdf => "tfidf",
            WeightScheme::Btp => "btp",
        }
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tf" => Ok(WeightScheme::Tf),
            "tfidf" | "tf-idf" => Ok(WeightScheme::TfIdf),
            "btp" => Ok(WeightScheme::Btp),
            other => Err(Error::InvalidParam(format!(
                "unknown weighting scheme {other:?} (expected tf, tfidf, or btp)"
            ))),
        }
    }
}

/// Sparse document-term matrix in CSR layout with aligned labels.
///
/// Zero weights are never stored. `col_origin` maps each column back to the
/// vocabulary index it was fitted under; projections compose it.
#[derive(Debug, Clone)]
pub struct DocTermMatrix<F: Scalar> {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<F>,
    scheme: WeightScheme,
    labels: Vec<Polarity>,
    col_origin: Vec<usize>,
}

impl<F: Scalar> DocTermMatrix<F> {
    pub fn rows(&self) -> usize {
        self.n_rows
    }

    pub fn cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn labels(&self) -> &[Polarity] {
        &self.labels
    }

    pub fn col_origin(&self) -> &[usize] {
        &self.col_origin
    }

    /// Entries of row `i` as `(column, weight)`, columns ascending.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, F)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .iter()
            .zip(&self.values[lo..hi])
            .map(|(&c, &v)| (c as usize, v))
    }

    /// Row `i` materialized as a sparse vector.
    pub fn row_entries(&self, i: usize) -> Vec<(usize, F)> {
        self.row(i).collect()
    }

    pub fn get(&self, row: usize, col: usize) -> F {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.col_idx[lo..hi].binary_search(&(col as u32)) {
            Ok(pos) => self.values[lo + pos],
            Err(_) => F::zero(),
        }
    }

    /// Builds a matrix from per-row sparse entries. Entries need not be
    /// sorted; zero weights are dropped.
    pub fn from_rows(
        rows: Vec<Vec<(usize, F)>>,
        n_cols: usize,
        scheme: WeightScheme,
        labels: Vec<Polarity>,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch {
                what: "rows vs labels",
                left: rows.len(),
                right: labels.len(),
            });
        }
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.retain(|&(_, v)| v != F::zero());
            row.sort_by_key(|&(c, _)| c);
            for &(c, v) in &row {
                if c >= n_cols {
                    return Err(Error::IndexOutOfRange {
                        index: c,
                        size: n_cols,
                    });
                }
                col_idx.push(c as u32);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(DocTermMatrix {
            n_rows: labels.len(),
            n_cols,
            row_ptr,
            col_idx,
            values,
            scheme,
            labels,
            col_origin: (0..n_cols).collect(),
        })
    }

    /// Dense fixture constructor for tests and small experiments.
    pub fn from_dense(
        rows: &[Vec<F>],
        scheme: WeightScheme,
        labels: Vec<Polarity>,
    ) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.len());
        let sparse = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != F::zero())
                    .map(|(c, &v)| (c, v))
                    .collect()
            })
            .collect();
        Self::from_rows(sparse, n_cols, scheme, labels)
    }

    /// Row subset in the given order, labels carried along.
    pub fn row_subset(&self, rows: &[usize]) -> Result<Self> {
        let mut out_rows = Vec::with_capacity(rows.len());
        let mut labels = Vec::with_capacity(rows.len());
        for &r in rows {
            if r >= self.n_rows {
                return Err(Error::IndexOutOfRange {
                    index: r,
                    size: self.n_rows,
                });
            }
            out_rows.push(self.row_entries(r));
            labels.push(self.labels[r]);
        }
        let mut m = Self::from_rows(out_rows, self.n_cols, self.scheme, labels)?;
        m.col_origin = self.col_origin.clone();
        Ok(m)
    }

    pub(crate) fn with_col_origin(mut self, col_origin: Vec<usize>) -> Self {
        debug_assert_eq!(col_origin.len(), self.n_cols);
        self.col_origin = col_origin;
        self
    }

    /// Writes the sparse triplet dump: a `rows cols nnz scheme` header line
    /// followed by one `row col weight` line per stored entry.
    pub fn write_triplets<W: Write>(&self, mut writer: W) -> io::Result<()> {
        writeln!(
            writer,
            "{} {} {} {}",
            self.n_rows,
            self.n_cols,
            self.nnz(),
            self.scheme
        )?;
        for row in 0..self.n_rows {
            for (col, weight) in self.row(row) {
                writeln!(writer, "{row} {col} {weight}")?;
            }
        }
        Ok(())
    }

    /// Reads a triplet dump produced by [`write_triplets`]. Labels are not
    /// part of the format and must be supplied alongside.
    ///
    /// [`write_triplets`]: DocTermMatrix::write_triplets
    pub fn read_triplets<R: BufRead>(reader: R, labels: Vec<Polarity>) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::ParseFormat {
            what: "matrix dump",
            line: 1,
            message: "missing header".into(),
        })?;
        let header = header.map_err(|e| Error::ParseFormat {
            what: "matrix dump",
            line: 1,
            message: e.to_string(),
        })?;
        let mut parts = header.split_whitespace();
        let parse_count = |part: Option<&str>, what: &'static str| -> Result<usize> {
            part.and_then(|p| p.parse().ok()).ok_or(Error::ParseFormat {
                what: "matrix dump",
                line: 1,
                message: format!("bad header field: {what}"),
            })
        };
        let n_rows = parse_count(parts.next(), "rows")?;
        let n_cols = parse_count(parts.next(), "cols")?;
        let nnz = parse_count(parts.next(), "nnz")?;
        let scheme: WeightScheme = parts
            .next()
            .ok_or(Error::ParseFormat {
                what: "matrix dump",
                line: 1,
                message: "missing scheme".into(),
            })?
            .parse()?;

        if labels.len() != n_rows {
            return Err(Error::LengthMismatch {
                what: "labels vs matrix rows",
                left: labels.len(),
                right: n_rows,
            });
        }

        let mut rows: Vec<Vec<(usize, F)>> = vec![Vec::new(); n_rows];
        let mut seen = 0usize;
        for (index, line) in lines {
            let line_no = index + 1;
            let line = line.map_err(|e| Error::ParseFormat {
                what: "matrix dump",
                line: line_no,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let bad = |message: String| Error::ParseFormat {
                what: "matrix dump",
                line: line_no,
                message,
            };
            let row: usize = parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| bad("bad row".into()))?;
            let col: usize = parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| bad("bad col".into()))?;
            let weight: f64 = parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| bad("bad weight".into()))?;
            if row >= n_rows {
                return Err(bad(format!("row {row} out of range")));
            }
            rows[row].push((
                col,
                F::from_f64(weight).ok_or_else(|| bad("weight out of range".into()))?,
            ));
            seen += 1;
        }
        if seen != nnz {
            return Err(Error::ParseFormat {
                what: "matrix dump",
                line: 1,
                message: format!("header declares {nnz} entries, found {seen}"),
            });
        }
        Self::from_rows(rows, n_cols, scheme, labels)
    }
}

/// Builds the weighted matrix for `docs` over a fitted vocabulary.
///
/// TF-IDF uses the vocabulary's fit-time `n_docs` and `df`, so held-out
/// documents project through the training statistics. Terms absent from the
/// vocabulary are ignored, which is how held-out documents are reduced to the
/// fitted feature space.
pub fn vectorize<F: Scalar>(
    docs: &[TokenStream],
    vocab: &Vocabulary,
    scheme: WeightScheme,
    labels: &[Polarity],
) -> Result<DocTermMatrix<F>> {
    if docs.len() != labels.len() {
        return Err(Error::LengthMismatch {
            what: "docs vs labels",
            left: docs.len(),
            right: labels.len(),
        });
    }

    let idf: Option<Vec<F>> = match scheme {
        WeightScheme::TfIdf => Some(vocab.idf()),
        _ => None,
    };

    let mut rows = Vec::with_capacity(docs.len());
    for doc in docs {
        let mut counts: HashMap<usize, u32> = HashMap::new();
        for term in extract_ngrams(doc, vocab.spec()) {
            if let Some(col) = vocab.index_of(&term) {
                *counts.entry(col).or_insert(0) += 1;
            }
        }
        let row: Vec<(usize, F)> = counts
            .into_iter()
            .map(|(col, count)| {
                let weight = match scheme {
                    WeightScheme::Tf => F::from_count(count as usize),
                    WeightScheme::TfIdf => {
                        F::from_count(count as usize) * idf.as_ref().expect("idf built")[col]
                    }
                    WeightScheme::Btp => F::one(),
                };
                (col, weight)
            })
            .collect();
        rows.push(row);
    }
    DocTermMatrix::from_rows(rows, vocab.len(), scheme, labels.to_vec())
}

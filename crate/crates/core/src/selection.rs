//! Feature relevance scoring, top-K selection, and sequential selector
//! pipelines.
//!
//! Three scorers (information gain, chi-square, Gini purity) work on
//! presence/absence contingency tables and are therefore identical across
//! weighting schemes; Pearson correlation works on the stored weights; the
//! SVM scorer ranks features by the magnitude of a trained separator's
//! coefficients. Degenerate features (absent, constant, zero marginals) score
//! exactly zero under every method, so rankings stay total and free of NaN.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::corpus::Polarity;
use crate::error::{Error, Result};
use crate::linsvm::{self, SvmParams};
use crate::scalar::Scalar;
use crate::vectorize::{DocTermMatrix, Vocabulary};

/// Per-feature presence counts against a chosen class.
///
/// `a`: documents containing the term in the class; `b`: containing the term
/// outside the class; `c`: in the class without the term; `d`: neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ContingencyTable {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl ContingencyTable {
    pub fn n(&self) -> u32 {
        self.a + self.b + self.c + self.d
    }
}

/// Presence/absence tables for every feature column, with presence defined as
/// a stored weight greater than zero.
pub fn contingency<F: Scalar>(
    matrix: &DocTermMatrix<F>,
    positive_class: Polarity,
) -> Vec<ContingencyTable> {
    let labels = matrix.labels();
    let n_in_class = labels.iter().filter(|&&l| l == positive_class).count() as u32;
    let n_out_class = labels.len() as u32 - n_in_class;

    // Start every feature as "absent everywhere" and move documents out of
    // c/d as presences stream by.
    let mut tables = vec![
        ContingencyTable {
            a: 0,
            b: 0,
            c: n_in_class,
            d: n_out_class,
        };
        matrix.cols()
    ];
    for (row, &label) in labels.iter().enumerate() {
        let in_class = label == positive_class;
        for (col, weight) in matrix.row(row) {
            if weight > F::zero() {
                let t = &mut tables[col];
                if in_class {
                    t.a += 1;
                    t.c -= 1;
                } else {
                    t.b += 1;
                    t.d -= 1;
                }
            }
        }
    }
    tables
}

/// The five feature-selection methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionMethod {
    InfoGain,
    Correlation,
    ChiSquare,
    Gini,
    SvmWeight,
}

impl SelectionMethod {
    pub const ALL: [SelectionMethod; 5] = [
        SelectionMethod::InfoGain,
        SelectionMethod::Correlation,
        SelectionMethod::ChiSquare,
        SelectionMethod::Gini,
        SelectionMethod::SvmWeight,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SelectionMethod::InfoGain => "ig",
            SelectionMethod::Correlation => "correlation",
            SelectionMethod::ChiSquare => "chi2",
            SelectionMethod::Gini => "gini",
            SelectionMethod::SvmWeight => "svm",
        }
    }
}

impl fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SelectionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ig" | "infogain" => Ok(SelectionMethod::InfoGain),
            "correlation" => Ok(SelectionMethod::Correlation),
            "chi2" | "chi-square" => Ok(SelectionMethod::ChiSquare),
            "gini" => Ok(SelectionMethod::Gini),
            "svm" => Ok(SelectionMethod::SvmWeight),
            other => Err(Error::InvalidParam(format!(
                "unknown selection method {other:?} (expected ig, correlation, chi2, gini, or svm)"
            ))),
        }
    }
}

/// Relevance scores aligned with the matrix columns. Values are always finite
/// and non-negative.
#[derive(Debug, Clone)]
pub struct FeatureScores<F: Scalar> {
    pub method: SelectionMethod,
    pub scores: Vec<F>,
}

fn entropy2<F: Scalar>(p: F, q: F) -> F {
    let term = |x: F| {
        if x > F::zero() {
            -(x * x.log2())
        } else {
            F::zero()
        }
    };
    term(p) + term(q)
}

/// Information gain per feature: class entropy minus the expected class
/// entropy after observing the term's presence, base-2 logs, with the
/// convention `0·log 0 = 0`.
pub fn score_ig<F: Scalar>(tables: &[ContingencyTable]) -> FeatureScores<F> {
    let scores = tables
        .iter()
        .map(|t| {
            let n = t.n();
            if n == 0 {
                return F::zero();
            }
            let nf = F::from_count(n as usize);
            let frac = |count: u32| F::from_count(count as usize) / nf;
            let class_entropy = entropy2(frac(t.a + t.c), frac(t.b + t.d));

            let present = t.a + t.b;
            let absent = t.c + t.d;
            let cond = |in_class: u32, out_class: u32| {
                let total = in_class + out_class;
                if total == 0 {
                    return F::zero();
                }
                let tf = F::from_count(total as usize);
                entropy2(
                    F::from_count(in_class as usize) / tf,
                    F::from_count(out_class as usize) / tf,
                )
            };
            let expected = frac(present) * cond(t.a, t.b) + frac(absent) * cond(t.c, t.d);
            (class_entropy - expected).max(F::zero())
        })
        .collect();
    FeatureScores {
        method: SelectionMethod::InfoGain,
        scores,
    }
}

/// Chi-square statistic per feature under the standard 2x2 closed form
/// `N(AD − BC)² / ((A+C)(B+D)(A+B)(C+D))`; any zero marginal scores zero.
pub fn score_chi2<F: Scalar>(tables: &[ContingencyTable]) -> FeatureScores<F> {
    let scores = tables
        .iter()
        .map(|t| {
            let (a, b, c, d) = (
                F::from_count(t.a as usize),
                F::from_count(t.b as usize),
                F::from_count(t.c as usize),
                F::from_count(t.d as usize),
            );
            let marginals = [(a + c), (b + d), (a + b), (c + d)];
            if marginals.iter().any(|&m| m == F::zero()) {
                return F::zero();
            }
            let n = F::from_count(t.n() as usize);
            let diff = a * d - b * c;
            n * diff * diff / marginals.iter().copied().fold(F::one(), |acc, m| acc * m)
        })
        .collect();
    FeatureScores {
        method: SelectionMethod::ChiSquare,
        scores,
    }
}

/// Gini purity per feature: `Σⱼ p(t|Cⱼ)²·p(Cⱼ|t)²` over the two classes;
/// terms absent everywhere score zero.
pub fn score_gini<F: Scalar>(tables: &[ContingencyTable]) -> FeatureScores<F> {
    let scores = tables
        .iter()
        .map(|t| {
            let present = t.a + t.b;
            if present == 0 {
                return F::zero();
            }
            let ratio = |num: u32, den: u32| {
                if den == 0 {
                    F::zero()
                } else {
                    F::from_count(num as usize) / F::from_count(den as usize)
                }
            };
            let square = |x: F| x * x;
            square(ratio(t.a, t.a + t.c)) * square(ratio(t.a, present))
                + square(ratio(t.b, t.b + t.d)) * square(ratio(t.b, present))
        })
        .collect();
    FeatureScores {
        method: SelectionMethod::Gini,
        scores,
    }
}

/// Pearson correlation magnitude between each stored-weight column (zeros
/// included) and the ±1 class encoding, using the sample form
/// `r = (Σxy − n·x̄·ȳ) / ((n−1)·sₓ·s_y)`. Constant columns score zero.
pub fn score_correlation<F: Scalar>(matrix: &DocTermMatrix<F>) -> FeatureScores<F> {
    let n = matrix.rows();
    let cols = matrix.cols();
    let mut scores = vec![F::zero(); cols];
    if n < 2 {
        return FeatureScores {
            method: SelectionMethod::Correlation,
            scores,
        };
    }

    let y: Vec<F> = matrix
        .labels()
        .iter()
        .map(|l| {
            if l.encoding() > 0 {
                F::one()
            } else {
                -F::one()
            }
        })
        .collect();
    let nf = F::from_count(n);
    let n_minus_1 = F::from_count(n - 1);
    let y_sum = y.iter().copied().sum::<F>();
    let y_mean = y_sum / nf;
    // Σy² = n for ±1 labels
    let y_var = (nf - nf * y_mean * y_mean) / n_minus_1;
    if y_var <= F::zero() {
        return FeatureScores {
            method: SelectionMethod::Correlation,
            scores,
        };
    }
    let y_sd = y_var.sqrt();

    let mut sum_x = vec![F::zero(); cols];
    let mut sum_x2 = vec![F::zero(); cols];
    let mut sum_xy = vec![F::zero(); cols];
    for (row, &yv) in y.iter().enumerate() {
        for (col, x) in matrix.row(row) {
            sum_x[col] += x;
            sum_x2[col] += x * x;
            sum_xy[col] += x * yv;
        }
    }

    for col in 0..cols {
        let x_mean = sum_x[col] / nf;
        let x_var = (sum_x2[col] - nf * x_mean * x_mean) / n_minus_1;
        if x_var <= F::zero() {
            continue;
        }
        let x_sd = x_var.sqrt();
        let r = (sum_xy[col] - nf * x_mean * y_mean) / (n_minus_1 * x_sd * y_sd);
        scores[col] = r.abs().min(F::one());
    }
    FeatureScores {
        method: SelectionMethod::Correlation,
        scores,
    }
}

/// Trains a linear SVM on the full matrix and scores each feature by the
/// magnitude of its learned weight.
pub fn score_svm<F: Scalar>(
    matrix: &DocTermMatrix<F>,
    params: &SvmParams,
) -> Result<FeatureScores<F>> {
    let model = linsvm::train(matrix, params)?;
    Ok(FeatureScores {
        method: SelectionMethod::SvmWeight,
        scores: model.weights().iter().map(|w| w.abs()).collect(),
    })
}

/// Unified scoring entry point. Presence-based methods build their tables
/// against the positive class; the choice is symmetric for binary labels.
pub fn score<F: Scalar>(
    matrix: &DocTermMatrix<F>,
    method: SelectionMethod,
    svm_params: &SvmParams,
) -> Result<FeatureScores<F>> {
    Ok(match method {
        SelectionMethod::InfoGain => score_ig(&contingency(matrix, Polarity::Positive)),
        SelectionMethod::ChiSquare => score_chi2(&contingency(matrix, Polarity::Positive)),
        SelectionMethod::Gini => score_gini(&contingency(matrix, Polarity::Positive)),
        SelectionMethod::Correlation => score_correlation(matrix),
        SelectionMethod::SvmWeight => score_svm(matrix, svm_params)?,
    })
}

/// One stage of a selector pipeline: a scoring method and how many features
/// it keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectorStage {
    pub method: SelectionMethod,
    pub k: usize,
}

/// Selected feature indices in rank order (descending score, ties broken by
/// ascending index). Never contains duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSet {
    indices: Vec<usize>,
}

impl FeatureSet {
    /// Wraps an already-ranked index list.
    pub fn from_ranked(indices: Vec<usize>) -> Self {
        FeatureSet { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    /// The same indices sorted ascending.
    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }
}

/// The `k` highest-scoring feature indices; saturates at the feature count.
pub fn select_top_k<F: Scalar>(scores: &FeatureScores<F>, k: usize) -> FeatureSet {
    let mut order: Vec<usize> = (0..scores.scores.len()).collect();
    order.sort_by(|&i, &j| {
        scores.scores[j]
            .partial_cmp(&scores.scores[i])
            .expect("scores are finite")
            .then(i.cmp(&j))
    });
    order.truncate(k);
    FeatureSet { indices: order }
}

/// Column-slices the matrix to the selected features, in the set's order.
/// Labels are unchanged; the result's `col_origin` maps back through any
/// prior projections.
pub fn project<F: Scalar>(
    matrix: &DocTermMatrix<F>,
    features: &FeatureSet,
) -> Result<DocTermMatrix<F>> {
    let mut new_col: Vec<Option<u32>> = vec![None; matrix.cols()];
    for (new, &old) in features.indices.iter().enumerate() {
        if old >= matrix.cols() {
            return Err(Error::IndexOutOfRange {
                index: old,
                size: matrix.cols(),
            });
        }
        if new_col[old].is_some() {
            return Err(Error::InvalidParam(format!(
                "duplicate feature index {old} in projection"
            )));
        }
        new_col[old] = Some(new as u32);
    }

    let rows: Vec<Vec<(usize, F)>> = (0..matrix.rows())
        .map(|r| {
            matrix
                .row(r)
                .filter_map(|(col, v)| new_col[col].map(|nc| (nc as usize, v)))
                .collect()
        })
        .collect();
    let col_origin = features
        .indices
        .iter()
        .map(|&old| matrix.col_origin()[old])
        .collect();
    Ok(DocTermMatrix::from_rows(
        rows,
        features.indices.len(),
        matrix.scheme(),
        matrix.labels().to_vec(),
    )?
    .with_col_origin(col_origin))
}

/// Runs selector stages in sequence: the first stage scores the full matrix
/// and keeps its top K; each later stage scores only the surviving columns
/// and keeps its own top K. Returned indices refer to the input matrix's
/// columns.
pub fn sequential_select<F: Scalar>(
    matrix: &DocTermMatrix<F>,
    stages: &[SelectorStage],
    svm_params: &SvmParams,
) -> Result<FeatureSet> {
    if stages.is_empty() {
        return Err(Error::EmptyInput("selector stages"));
    }
    for (i, stage) in stages.iter().enumerate() {
        if stage.k == 0 {
            return Err(Error::InvalidParam(format!("stage {i} has k = 0")));
        }
    }

    // Maps the working matrix's columns back to the input matrix's columns.
    let mut back: Vec<usize> = (0..matrix.cols()).collect();
    let mut working: Option<DocTermMatrix<F>> = None;
    let mut result = FeatureSet::from_ranked(Vec::new());

    for (index, stage) in stages.iter().enumerate() {
        let current = working.as_ref().unwrap_or(matrix);
        let scores = score(current, stage.method, svm_params)?;
        let top = select_top_k(&scores, stage.k);
        result = FeatureSet::from_ranked(top.indices().iter().map(|&j| back[j]).collect());

        if index + 1 < stages.len() {
            // Project by ascending column so tie-breaking in later stages
            // still follows the input matrix's index order.
            let keep = FeatureSet::from_ranked(top.sorted());
            back = keep.indices().iter().map(|&j| back[j]).collect();
            working = Some(project(current, &keep)?);
        }
    }
    Ok(result)
}

/// Writes scores as `feature_index,term,score` CSV rows, highest score first.
pub fn write_scores_csv<F: Scalar, W: Write>(
    scores: &FeatureScores<F>,
    vocab: &Vocabulary,
    mut writer: W,
) -> io::Result<()> {
    writeln!(writer, "feature_index,term,score")?;
    let ranked = select_top_k(scores, scores.scores.len());
    for &index in ranked.indices() {
        let term = vocab.term(index);
        let quoted = if term.contains(',') || term.contains('"') {
            format!("\"{}\"", term.replace('"', "\"\""))
        } else {
            term.to_string()
        };
        writeln!(writer, "{index},{quoted},{}", scores.scores[index])?;
    }
    Ok(())
}

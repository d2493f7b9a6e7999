//! Cross-validated evaluation: run the pipeline per fold, tally confusion
//! counts, and report accuracy, precision, and recall.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{FoldPlan, LabeledCorpus, Polarity};
use crate::error::{Error, Result};
use crate::linsvm::{self, SvmParams};
use crate::scalar::Scalar;
use crate::selection::{project, sequential_select, SelectorStage};
use crate::textprep::{preprocess, PrepConfig, TokenStream};
use crate::vectorize::{build_vocab, vectorize, DocTermMatrix, NgramSpec, WeightScheme};

/// Confusion counts with `Positive` as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub true_neg: usize,
    pub false_pos: usize,
    pub false_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }
}

/// Tallies predictions against ground truth.
pub fn confusion(predictions: &[Polarity], truth: &[Polarity]) -> Result<ConfusionCounts> {
    if predictions.len() != truth.len() {
        return Err(Error::LengthMismatch {
            what: "predictions vs truth",
            left: predictions.len(),
            right: truth.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyInput("predictions"));
    }
    let mut counts = ConfusionCounts {
        true_pos: 0,
        true_neg: 0,
        false_pos: 0,
        false_neg: 0,
    };
    for (&p, &t) in predictions.iter().zip(truth) {
        match (p, t) {
            (Polarity::Positive, Polarity::Positive) => counts.true_pos += 1,
            (Polarity::Negative, Polarity::Negative) => counts.true_neg += 1,
            (Polarity::Positive, Polarity::Negative) => counts.false_pos += 1,
            (Polarity::Negative, Polarity::Positive) => counts.false_neg += 1,
        }
    }
    Ok(counts)
}

/// Accuracy, precision, and recall for one confusion table.
///
/// A zero denominator (no predicted positives, or no actual positives) yields
/// a defined 0 with the matching flag set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub precision_degenerate: bool,
    pub recall_degenerate: bool,
}

pub fn metrics(counts: &ConfusionCounts) -> Result<Metrics> {
    let total = counts.total();
    if total == 0 {
        return Err(Error::EmptyInput("confusion counts"));
    }
    let accuracy = (counts.true_pos + counts.true_neg) as f64 / total as f64;
    let predicted_pos = counts.true_pos + counts.false_pos;
    let actual_pos = counts.true_pos + counts.false_neg;
    let (precision, precision_degenerate) = if predicted_pos == 0 {
        (0.0, true)
    } else {
        (counts.true_pos as f64 / predicted_pos as f64, false)
    };
    let (recall, recall_degenerate) = if actual_pos == 0 {
        (0.0, true)
    } else {
        (counts.true_pos as f64 / actual_pos as f64, false)
    };
    Ok(Metrics {
        accuracy,
        precision,
        recall,
        precision_degenerate,
        recall_degenerate,
    })
}

/// Where vocabulary, IDF statistics, and feature selection are fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalMode {
    /// Fit on training folds only; test folds project through the fitted
    /// objects. No selection leakage.
    Strict,
    /// Fit once on the full dataset before folding; only the classifier is
    /// refitted per fold. Mirrors selection-sweep protocols that fold late.
    Paper,
}

impl EvalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EvalMode::Strict => "strict",
            EvalMode::Paper => "paper",
        }
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(EvalMode::Strict),
            "paper" => Ok(EvalMode::Paper),
            other => Err(Error::InvalidParam(format!(
                "unknown eval mode {other:?} (expected strict or paper)"
            ))),
        }
    }
}

/// Which classifier runs per fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    /// The linear SVM, trained per fold.
    Svm,
    /// Predicts one class everywhere. Baseline for harness sanity checks.
    Constant(Polarity),
}

impl ClassifierKind {
    fn echo(self) -> String {
        match self {
            ClassifierKind::Svm => "svm".into(),
            ClassifierKind::Constant(p) => format!("constant:{p}"),
        }
    }
}

/// Everything a cross-validation run needs besides the corpus and fold plan.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub prep: PrepConfig,
    pub ngrams: NgramSpec,
    pub scheme: WeightScheme,
    pub min_df: usize,
    /// Selector pipeline; empty means no selection.
    pub stages: Vec<SelectorStage>,
    pub svm: SvmParams,
    pub classifier: ClassifierKind,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            prep: PrepConfig::default(),
            ngrams: NgramSpec::Unigram,
            scheme: WeightScheme::TfIdf,
            min_df: 1,
            stages: Vec::new(),
            svm: SvmParams::default(),
            classifier: ClassifierKind::Svm,
        }
    }
}

/// Serializable snapshot of a run's configuration, embedded in reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub scheme: String,
    pub ngrams: String,
    pub stopwords: bool,
    pub stemmer: String,
    pub collapse_repeats: bool,
    pub min_df: usize,
    pub stages: Vec<StageEcho>,
    pub classifier: String,
    pub svm_c: f64,
    pub svm_tolerance: f64,
    pub svm_max_epochs: usize,
    pub k_folds: usize,
    pub mode: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageEcho {
    pub method: String,
    pub k: usize,
}

impl ConfigEcho {
    pub fn new(pipeline: &PipelineConfig, plan: &FoldPlan, mode: EvalMode) -> Self {
        ConfigEcho {
            scheme: pipeline.scheme.to_string(),
            ngrams: pipeline.ngrams.to_string(),
            stopwords: pipeline.prep.remove_stopwords,
            stemmer: pipeline.prep.stemmer.name().to_string(),
            collapse_repeats: pipeline.prep.collapse_repeats,
            min_df: pipeline.min_df,
            stages: pipeline
                .stages
                .iter()
                .map(|s| StageEcho {
                    method: s.method.to_string(),
                    k: s.k,
                })
                .collect(),
            classifier: pipeline.classifier.echo(),
            svm_c: pipeline.svm.c,
            svm_tolerance: pipeline.svm.tolerance,
            svm_max_epochs: pipeline.svm.max_epochs,
            k_folds: plan.k(),
            mode: mode.to_string(),
            seed: plan.seed(),
        }
    }
}

/// One fold's result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub fold: usize,
    pub feature_count: usize,
    pub confusion: ConfusionCounts,
    pub metrics: Metrics,
}

/// Full cross-validation report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub config: ConfigEcho,
    pub folds: Vec<FoldOutcome>,
    pub mean_accuracy: f64,
    pub mean_precision: f64,
    pub mean_recall: f64,
}

impl MetricsReport {
    fn assemble(config: ConfigEcho, folds: Vec<FoldOutcome>) -> Self {
        let n = folds.len() as f64;
        let mean = |f: fn(&Metrics) -> f64| folds.iter().map(|o| f(&o.metrics)).sum::<f64>() / n;
        MetricsReport {
            config,
            mean_accuracy: mean(|m| m.accuracy),
            mean_precision: mean(|m| m.precision),
            mean_recall: mean(|m| m.recall),
            folds,
        }
    }

    /// Mean feature count across folds, for table rows that report it.
    pub fn mean_feature_count(&self) -> f64 {
        self.folds
            .iter()
            .map(|f| f.feature_count as f64)
            .sum::<f64>()
            / self.folds.len() as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ParseFormat {
            what: "metrics report",
            line: 0,
            message: e.to_string(),
        })
    }

    /// CSV: one row per fold plus a `mean` row, columns in the fixed order
    /// accuracy, precision, recall.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> io::Result<()> {
        writeln!(writer, "fold,accuracy,precision,recall")?;
        for outcome in &self.folds {
            writeln!(
                writer,
                "{},{},{},{}",
                outcome.fold,
                outcome.metrics.accuracy,
                outcome.metrics.precision,
                outcome.metrics.recall
            )?;
        }
        writeln!(
            writer,
            "mean,{},{},{}",
            self.mean_accuracy, self.mean_precision, self.mean_recall
        )
    }
}

fn classify_fold<F: Scalar>(
    train: &DocTermMatrix<F>,
    test: &DocTermMatrix<F>,
    pipeline: &PipelineConfig,
) -> Result<Vec<Polarity>> {
    match pipeline.classifier {
        ClassifierKind::Svm => {
            let model = linsvm::train(train, &pipeline.svm)?;
            model.predict_matrix(test)
        }
        ClassifierKind::Constant(class) => Ok(vec![class; test.rows()]),
    }
}

fn require_both_classes(labels: &[Polarity], fold: usize) -> Result<()> {
    let n_pos = labels.iter().filter(|&&l| l == Polarity::Positive).count();
    if n_pos == 0 || n_pos == labels.len() {
        return Err(Error::FoldCollapsed(fold));
    }
    Ok(())
}

fn gather<T: Clone>(items: &[T], indices: &[usize]) -> Vec<T> {
    indices.iter().map(|&i| items[i].clone()).collect()
}

/// Runs k-fold evaluation of the configured pipeline.
///
/// Strict mode fits the vocabulary, IDF statistics, and selector pipeline on
/// each fold's training documents only. Paper mode fits them once on the full
/// corpus and folds only the classifier.
pub fn cross_validate<F: Scalar>(
    corpus: &LabeledCorpus,
    pipeline: &PipelineConfig,
    plan: &FoldPlan,
    mode: EvalMode,
) -> Result<MetricsReport> {
    let tokens: Vec<TokenStream> = corpus
        .documents()
        .iter()
        .map(|d| preprocess(&d.text, &pipeline.prep))
        .collect();
    let labels = corpus.labels();

    let mut outcomes = Vec::with_capacity(plan.k());
    match mode {
        EvalMode::Strict => {
            for fold in 0..plan.k() {
                let train_idx = plan.train_indices(corpus, fold)?;
                let test_idx = plan.test_indices(corpus, fold)?;
                let train_tokens = gather(&tokens, &train_idx);
                let train_labels = gather(&labels, &train_idx);
                let test_tokens = gather(&tokens, &test_idx);
                let test_labels = gather(&labels, &test_idx);
                require_both_classes(&train_labels, fold)?;

                let vocab = build_vocab(&train_tokens, pipeline.ngrams, pipeline.min_df)?;
                let mut train_m: DocTermMatrix<F> =
                    vectorize(&train_tokens, &vocab, pipeline.scheme, &train_labels)?;
                let mut test_m: DocTermMatrix<F> =
                    vectorize(&test_tokens, &vocab, pipeline.scheme, &test_labels)?;

                if !pipeline.stages.is_empty() {
                    let selected = sequential_select(&train_m, &pipeline.stages, &pipeline.svm)?;
                    train_m = project(&train_m, &selected)?;
                    test_m = project(&test_m, &selected)?;
                }

                let predictions = classify_fold(&train_m, &test_m, pipeline)?;
                let counts = confusion(&predictions, &test_labels)?;
                outcomes.push(FoldOutcome {
                    fold,
                    feature_count: train_m.cols(),
                    confusion: counts,
                    metrics: metrics(&counts)?,
                });
            }
        }
        EvalMode::Paper => {
            let vocab = build_vocab(&tokens, pipeline.ngrams, pipeline.min_df)?;
            let mut full: DocTermMatrix<F> = vectorize(&tokens, &vocab, pipeline.scheme, &labels)?;
            if !pipeline.stages.is_empty() {
                let selected = sequential_select(&full, &pipeline.stages, &pipeline.svm)?;
                full = project(&full, &selected)?;
            }
            for fold in 0..plan.k() {
                let train_idx = plan.train_indices(corpus, fold)?;
                let test_idx = plan.test_indices(corpus, fold)?;
                let train_m = full.row_subset(&train_idx)?;
                let test_m = full.row_subset(&test_idx)?;
                require_both_classes(train_m.labels(), fold)?;

                let predictions = classify_fold(&train_m, &test_m, pipeline)?;
                let test_labels = gather(&labels, &test_idx);
                let counts = confusion(&predictions, &test_labels)?;
                outcomes.push(FoldOutcome {
                    fold,
                    feature_count: train_m.cols(),
                    confusion: counts,
                    metrics: metrics(&counts)?,
                });
            }
        }
    }

    Ok(MetricsReport::assemble(
        ConfigEcho::new(pipeline, plan, mode),
        outcomes,
    ))
}

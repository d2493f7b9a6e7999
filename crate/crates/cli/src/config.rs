//! Experiment configuration: one TOML file, flag overrides applied on top.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tasnif::corpus::{CorpusFormat, LabelMap, Polarity};
use tasnif::evaluate::EvalMode;
use tasnif::selection::{SelectionMethod, SelectorStage};
use tasnif::textprep::{PrepConfig, Stoplist};
use tasnif::vectorize::{NgramSpec, WeightScheme};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub corpus: CorpusSection,
    pub prep: PrepSection,
    pub vectorize: VectorizeSection,
    pub svm: SvmSection,
    pub eval: EvalSection,
    pub experiment: ExperimentSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusSection {
    pub path: String,
    pub format: String,
    pub text_field: String,
    pub label_field: String,
    pub positive_labels: Vec<String>,
    pub negative_labels: Vec<String>,
}

impl Default for CorpusSection {
    fn default() -> Self {
        CorpusSection {
            path: String::new(),
            format: "csv".into(),
            text_field: "text".into(),
            label_field: "label".into(),
            positive_labels: vec!["pos".into(), "positive".into()],
            negative_labels: vec!["neg".into(), "negative".into()],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PrepSection {
    pub remove_stopwords: bool,
    /// `"default"` for the bundled list, `"none"`, or a file path.
    pub stoplist: String,
    /// `"none"` or `"light"`.
    pub stemmer: String,
    pub collapse_repeats: bool,
}

impl Default for PrepSection {
    fn default() -> Self {
        PrepSection {
            remove_stopwords: true,
            stoplist: "default".into(),
            stemmer: "none".into(),
            collapse_repeats: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct VectorizeSection {
    pub min_df: usize,
}

impl Default for VectorizeSection {
    fn default() -> Self {
        VectorizeSection { min_df: 1 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmSection {
    pub c: f64,
    pub tolerance: f64,
    pub max_epochs: usize,
}

impl Default for SvmSection {
    fn default() -> Self {
        SvmSection {
            c: 1.0,
            tolerance: 1e-3,
            max_epochs: 1000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalSection {
    pub k_folds: usize,
    pub mode: String,
    pub seed: u64,
    /// Balanced subsample drawn right after loading; omit to keep everything.
    pub sample_per_class: Option<usize>,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection {
            k_folds: 5,
            mode: "strict".into(),
            seed: 42,
            sample_per_class: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSection {
    pub stages: Vec<u8>,
    pub out_dir: Option<String>,
    /// Worker threads for independent grid cells; 0 means use the
    /// `TASNIF_WORKERS` environment variable or all cores.
    pub workers: usize,
    pub stage1: Stage1Section,
    pub stage2: Stage2Section,
    pub stage3: Stage3Section,
    pub stage4: Stage4Section,
    pub stage5: Stage5Section,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            stages: vec![1, 2, 3, 4, 5],
            out_dir: None,
            workers: 0,
            stage1: Stage1Section::default(),
            stage2: Stage2Section::default(),
            stage3: Stage3Section::default(),
            stage4: Stage4Section::default(),
            stage5: Stage5Section::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Stage1Section {
    pub schemes: Vec<String>,
}

impl Default for Stage1Section {
    fn default() -> Self {
        Stage1Section {
            schemes: vec!["tfidf".into(), "tf".into(), "btp".into()],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Stage2Section {
    pub scheme: String,
}

impl Default for Stage2Section {
    fn default() -> Self {
        Stage2Section {
            scheme: "tfidf".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Stage3Section {
    pub scheme: String,
    pub ngrams: Vec<String>,
    /// Balanced subsample for this stage only; omit to use the full corpus.
    pub sample_per_class: Option<usize>,
}

impl Default for Stage3Section {
    fn default() -> Self {
        Stage3Section {
            scheme: "tfidf".into(),
            ngrams: vec!["unigram".into(), "bigram".into(), "unigram+bigram".into()],
            sample_per_class: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Stage4Section {
    pub scheme: String,
    pub methods: Vec<String>,
    pub top_k: Vec<usize>,
}

impl Default for Stage4Section {
    fn default() -> Self {
        Stage4Section {
            scheme: "tfidf".into(),
            methods: vec![
                "ig".into(),
                "correlation".into(),
                "chi2".into(),
                "gini".into(),
                "svm".into(),
            ],
            top_k: vec![1000, 1500, 2000, 2500, 3000, 3500, 4000, 4500],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Stage5Section {
    pub scheme: String,
    pub k_folds: usize,
    pub pipelines: Vec<PipelineSection>,
}

impl Default for Stage5Section {
    fn default() -> Self {
        Stage5Section {
            scheme: "tfidf".into(),
            k_folds: 10,
            pipelines: vec![
                PipelineSection {
                    first_method: "correlation".into(),
                    first_k: 3500,
                    second_method: "svm".into(),
                    second_k: vec![1000, 1500, 2000, 2500, 3000, 3500],
                },
                PipelineSection {
                    first_method: "svm".into(),
                    first_k: 4000,
                    second_method: "correlation".into(),
                    second_k: vec![1000, 1500, 2000, 2500, 3000, 3500, 4000],
                },
            ],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineSection {
    pub first_method: String,
    pub first_k: usize,
    pub second_method: String,
    pub second_k: Vec<usize>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let contents = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        toml::from_str(&contents).map_err(|e| CliError::Validation(e.to_string()))
    }

    /// Checks every field that must parse or stay in range; the message names
    /// the offending field path.
    pub fn validate(&self) -> CliResult<()> {
        let fail = |path: String| Err(CliError::Validation(path));

        if self.corpus.path.is_empty() {
            return fail("corpus.path is empty".into());
        }
        if CorpusFormat::from_str(&self.corpus.format).is_err() {
            return fail(format!(
                "corpus.format: unknown format {:?}",
                self.corpus.format
            ));
        }
        if self.corpus.positive_labels.is_empty() {
            return fail("corpus.positive_labels is empty".into());
        }
        if self.corpus.negative_labels.is_empty() {
            return fail("corpus.negative_labels is empty".into());
        }
        if !matches!(self.prep.stemmer.as_str(), "none" | "light") {
            return fail(format!(
                "prep.stemmer: unknown stemmer {:?}",
                self.prep.stemmer
            ));
        }
        if self.vectorize.min_df < 1 {
            return fail("vectorize.min_df must be at least 1".into());
        }
        if self.svm.c.is_nan() || self.svm.c <= 0.0 {
            return fail("svm.c must be positive".into());
        }
        if self.svm.tolerance.is_nan() || self.svm.tolerance <= 0.0 {
            return fail("svm.tolerance must be positive".into());
        }
        if self.svm.max_epochs < 1 {
            return fail("svm.max_epochs must be at least 1".into());
        }
        if self.eval.k_folds < 2 {
            return fail("eval.k_folds must be at least 2".into());
        }
        if EvalMode::from_str(&self.eval.mode).is_err() {
            return fail(format!("eval.mode: unknown mode {:?}", self.eval.mode));
        }

        for (i, stage) in self.experiment.stages.iter().enumerate() {
            if !(1..=5).contains(stage) {
                return fail(format!(
                    "experiment.stages[{i}]: stage {stage} out of range 1-5"
                ));
            }
        }
        for (i, scheme) in self.experiment.stage1.schemes.iter().enumerate() {
            if WeightScheme::from_str(scheme).is_err() {
                return fail(format!(
                    "experiment.stage1.schemes[{i}]: unknown scheme {scheme:?}"
                ));
            }
        }
        if WeightScheme::from_str(&self.experiment.stage2.scheme).is_err() {
            return fail("experiment.stage2.scheme: unknown scheme".into());
        }
        if WeightScheme::from_str(&self.experiment.stage3.scheme).is_err() {
            return fail("experiment.stage3.scheme: unknown scheme".into());
        }
        for (i, ngrams) in self.experiment.stage3.ngrams.iter().enumerate() {
            if NgramSpec::from_str(ngrams).is_err() {
                return fail(format!(
                    "experiment.stage3.ngrams[{i}]: unknown spec {ngrams:?}"
                ));
            }
        }
        if WeightScheme::from_str(&self.experiment.stage4.scheme).is_err() {
            return fail("experiment.stage4.scheme: unknown scheme".into());
        }
        for (i, method) in self.experiment.stage4.methods.iter().enumerate() {
            if SelectionMethod::from_str(method).is_err() {
                return fail(format!(
                    "experiment.stage4.methods[{i}]: unknown method {method:?}"
                ));
            }
        }
        for (i, &k) in self.experiment.stage4.top_k.iter().enumerate() {
            if k == 0 {
                return fail(format!("experiment.stage4.top_k[{i}]: k must be positive"));
            }
        }
        if WeightScheme::from_str(&self.experiment.stage5.scheme).is_err() {
            return fail("experiment.stage5.scheme: unknown scheme".into());
        }
        if self.experiment.stage5.k_folds < 2 {
            return fail("experiment.stage5.k_folds must be at least 2".into());
        }
        for (i, p) in self.experiment.stage5.pipelines.iter().enumerate() {
            if SelectionMethod::from_str(&p.first_method).is_err() {
                return fail(format!(
                    "experiment.stage5.pipelines[{i}].first_method: unknown method {:?}",
                    p.first_method
                ));
            }
            if SelectionMethod::from_str(&p.second_method).is_err() {
                return fail(format!(
                    "experiment.stage5.pipelines[{i}].second_method: unknown method {:?}",
                    p.second_method
                ));
            }
            if p.first_k == 0 {
                return fail(format!(
                    "experiment.stage5.pipelines[{i}].first_k: k must be positive"
                ));
            }
            for (j, &k) in p.second_k.iter().enumerate() {
                if k == 0 {
                    return fail(format!(
                        "experiment.stage5.pipelines[{i}].second_k[{j}]: k must be positive"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn corpus_path(&self) -> PathBuf {
        PathBuf::from(&self.corpus.path)
    }

    pub fn corpus_format(&self) -> CliResult<CorpusFormat> {
        Ok(CorpusFormat::from_str(&self.corpus.format)?)
    }

    pub fn label_map(&self) -> LabelMap {
        let mut map = LabelMap::new();
        for label in &self.corpus.positive_labels {
            map.insert(label.clone(), Polarity::Positive);
        }
        for label in &self.corpus.negative_labels {
            map.insert(label.clone(), Polarity::Negative);
        }
        map
    }

    pub fn eval_mode(&self) -> CliResult<EvalMode> {
        Ok(EvalMode::from_str(&self.eval.mode)?)
    }

    /// Stop list chosen by `prep.stoplist`.
    pub fn stoplist(&self) -> CliResult<Stoplist> {
        Ok(match self.prep.stoplist.as_str() {
            "default" => Stoplist::default_arabic(),
            "none" => Stoplist::empty(),
            path => Stoplist::from_file(Path::new(path))?,
        })
    }

    /// The `[prep]` section as a pipeline configuration.
    pub fn base_prep(&self) -> CliResult<PrepConfig> {
        use tasnif::textprep::StemmerKind;
        let stemmer = match self.prep.stemmer.as_str() {
            "light" => StemmerKind::Light,
            _ => StemmerKind::None,
        };
        Ok(PrepConfig {
            remove_stopwords: self.prep.remove_stopwords,
            stoplist: if self.prep.remove_stopwords {
                self.stoplist()?
            } else {
                Stoplist::empty()
            },
            stemmer,
            collapse_repeats: self.prep.collapse_repeats,
        })
    }

    pub fn svm_params(&self) -> tasnif::linsvm::SvmParams {
        tasnif::linsvm::SvmParams {
            c: self.svm.c,
            tolerance: self.svm.tolerance,
            max_epochs: self.svm.max_epochs,
            seed: self.eval.seed,
        }
    }

    pub fn stage5_pipelines(&self) -> CliResult<Vec<(SelectorStage, SelectionMethod, Vec<usize>)>> {
        self.experiment
            .stage5
            .pipelines
            .iter()
            .map(|p| {
                Ok((
                    SelectorStage {
                        method: SelectionMethod::from_str(&p.first_method)?,
                        k: p.first_k,
                    },
                    SelectionMethod::from_str(&p.second_method)?,
                    p.second_k.clone(),
                ))
            })
            .collect()
    }
}

//! The five-stage experiment protocol: weighting schemes, preprocessing
//! variants, n-gram models, single-selector sweeps, and sequential selector
//! combinations.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;
use tasnif::corpus::{balance_sample, load_corpus, stratified_kfold, LabeledCorpus};
use tasnif::evaluate::{cross_validate, EvalMode, MetricsReport, PipelineConfig};
use tasnif::selection::{SelectionMethod, SelectorStage};
use tasnif::textprep::{PrepConfig, Stemmer, StemmerKind, Stoplist};
use tasnif::vectorize::{NgramSpec, WeightScheme};

use crate::config::ExperimentConfig;
use crate::report::{ReportRow, ReportTable};
use crate::{CliError, CliResult};

/// Runtime-only experiment inputs that cannot live in the config file.
#[derive(Default, Clone)]
pub struct ExperimentEnv {
    /// Plug-in stemmer; when set, stage 2 adds a row for it.
    pub external_stemmer: Option<Arc<dyn Stemmer>>,
}

/// Loads the configured corpus and applies the optional global balanced
/// subsample.
pub fn load_configured_corpus(config: &ExperimentConfig) -> CliResult<LabeledCorpus> {
    let corpus = load_corpus(
        &config.corpus_path(),
        config.corpus_format()?,
        &config.corpus.text_field,
        &config.corpus.label_field,
        &config.label_map(),
    )?;
    match config.eval.sample_per_class {
        Some(n) => Ok(balance_sample(&corpus, n, config.eval.seed)?),
        None => Ok(corpus),
    }
}

fn evaluate_cell(
    corpus: &LabeledCorpus,
    pipeline: &PipelineConfig,
    k_folds: usize,
    seed: u64,
    mode: EvalMode,
) -> CliResult<MetricsReport> {
    let plan = stratified_kfold(corpus, k_folds, seed)?;
    Ok(cross_validate::<f64>(corpus, pipeline, &plan, mode)?)
}

/// Preprocessing used before stage 2 settles the question: noise stripping
/// and normalization only.
fn raw_prep(config: &ExperimentConfig) -> PrepConfig {
    PrepConfig {
        remove_stopwords: false,
        stoplist: Stoplist::empty(),
        stemmer: StemmerKind::None,
        collapse_repeats: config.prep.collapse_repeats,
    }
}

/// Stage 1: uni-gram features under each configured weighting scheme, no
/// selection. One row per scheme.
pub fn run_stage1_weighting(
    config: &ExperimentConfig,
    corpus: &LabeledCorpus,
) -> CliResult<ReportTable> {
    let mode = config.eval_mode()?;
    let prep = raw_prep(config);
    let rows = config
        .experiment
        .stage1
        .schemes
        .par_iter()
        .map(|scheme_name| {
            let scheme = WeightScheme::from_str(scheme_name)?;
            let pipeline = PipelineConfig {
                prep: prep.clone(),
                ngrams: NgramSpec::Unigram,
                scheme,
                min_df: config.vectorize.min_df,
                stages: Vec::new(),
                svm: config.svm_params(),
                ..PipelineConfig::default()
            };
            let report = evaluate_cell(
                corpus,
                &pipeline,
                config.eval.k_folds,
                config.eval.seed,
                mode,
            )?;
            Ok(ReportRow::from_report(scheme.to_string(), &report, false))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(ReportTable::new("stage1_weighting", rows))
}

/// Stage 2: preprocessing variants over the stage-2 scheme, with feature
/// counts. Stop-word removal alone, plus light stemming, and an external
/// stemmer row when one is plugged in.
pub fn run_stage2_prep(
    config: &ExperimentConfig,
    corpus: &LabeledCorpus,
    env: &ExperimentEnv,
) -> CliResult<ReportTable> {
    let mode = config.eval_mode()?;
    let scheme = WeightScheme::from_str(&config.experiment.stage2.scheme)?;
    let stoplist = config.stoplist()?;

    let mut variants: Vec<(String, StemmerKind)> = vec![
        ("stopwords".into(), StemmerKind::None),
        ("stopwords+light_stem".into(), StemmerKind::Light),
    ];
    if let Some(stemmer) = &env.external_stemmer {
        variants.push((
            format!("stopwords+{}_stem", stemmer.name()),
            StemmerKind::External(Arc::clone(stemmer)),
        ));
    }

    let rows = variants
        .into_par_iter()
        .map(|(name, stemmer)| {
            let pipeline = PipelineConfig {
                prep: PrepConfig {
                    remove_stopwords: true,
                    stoplist: stoplist.clone(),
                    stemmer,
                    collapse_repeats: config.prep.collapse_repeats,
                },
                ngrams: NgramSpec::Unigram,
                scheme,
                min_df: config.vectorize.min_df,
                stages: Vec::new(),
                svm: config.svm_params(),
                ..PipelineConfig::default()
            };
            let report = evaluate_cell(
                corpus,
                &pipeline,
                config.eval.k_folds,
                config.eval.seed,
                mode,
            )?;
            Ok(ReportRow::from_report(name, &report, true))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(ReportTable::new("stage2_preprocessing", rows))
}

/// Stage 3: one row per n-gram model, with feature counts, over an optional
/// balanced subsample.
pub fn run_stage3_ngrams(
    config: &ExperimentConfig,
    corpus: &LabeledCorpus,
) -> CliResult<ReportTable> {
    let mode = config.eval_mode()?;
    let scheme = WeightScheme::from_str(&config.experiment.stage3.scheme)?;
    let prep = config.base_prep()?;

    let sampled;
    let stage_corpus = match config.experiment.stage3.sample_per_class {
        Some(n) => {
            sampled = balance_sample(corpus, n, config.eval.seed)?;
            &sampled
        }
        None => corpus,
    };

    let rows = config
        .experiment
        .stage3
        .ngrams
        .par_iter()
        .map(|spec_name| {
            let ngrams = NgramSpec::from_str(spec_name)?;
            let pipeline = PipelineConfig {
                prep: prep.clone(),
                ngrams,
                scheme,
                min_df: config.vectorize.min_df,
                stages: Vec::new(),
                svm: config.svm_params(),
                ..PipelineConfig::default()
            };
            let report = evaluate_cell(
                stage_corpus,
                &pipeline,
                config.eval.k_folds,
                config.eval.seed,
                mode,
            )?;
            Ok(ReportRow::from_report(ngrams.to_string(), &report, true))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(ReportTable::new("stage3_ngrams", rows))
}

/// Stage 4: the full selector grid, methods crossed with top-K sizes, rows
/// grouped by method then ascending K.
pub fn run_stage4_selection(
    config: &ExperimentConfig,
    corpus: &LabeledCorpus,
) -> CliResult<ReportTable> {
    let mode = config.eval_mode()?;
    let scheme = WeightScheme::from_str(&config.experiment.stage4.scheme)?;
    let prep = config.base_prep()?;

    let mut cells = Vec::new();
    for method_name in &config.experiment.stage4.methods {
        let method = SelectionMethod::from_str(method_name)?;
        for &k in &config.experiment.stage4.top_k {
            cells.push((method, k));
        }
    }

    let rows = cells
        .into_par_iter()
        .map(|(method, k)| {
            let pipeline = PipelineConfig {
                prep: prep.clone(),
                ngrams: NgramSpec::Unigram,
                scheme,
                min_df: config.vectorize.min_df,
                stages: vec![SelectorStage { method, k }],
                svm: config.svm_params(),
                ..PipelineConfig::default()
            };
            let report = evaluate_cell(
                corpus,
                &pipeline,
                config.eval.k_folds,
                config.eval.seed,
                mode,
            )?;
            Ok(ReportRow::from_report(
                format!("{method}/{k}"),
                &report,
                true,
            ))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(ReportTable::new("stage4_selection", rows))
}

/// Stage 5: two-stage selector pipelines, one row per (pipeline, stage-2 K),
/// evaluated with the stage's own fold count.
pub fn run_stage5_combination(
    config: &ExperimentConfig,
    corpus: &LabeledCorpus,
) -> CliResult<ReportTable> {
    let mode = config.eval_mode()?;
    let scheme = WeightScheme::from_str(&config.experiment.stage5.scheme)?;
    let prep = config.base_prep()?;
    let pipelines = config.stage5_pipelines()?;
    if pipelines.is_empty() {
        return Err(CliError::Validation(
            "experiment.stage5.pipelines is empty".into(),
        ));
    }

    let mut cells = Vec::new();
    for (first, second_method, second_ks) in &pipelines {
        for &k in second_ks {
            cells.push((*first, *second_method, k));
        }
    }

    let k_folds = config.experiment.stage5.k_folds;
    let rows = cells
        .into_par_iter()
        .map(|(first, second_method, k)| {
            let pipeline = PipelineConfig {
                prep: prep.clone(),
                ngrams: NgramSpec::Unigram,
                scheme,
                min_df: config.vectorize.min_df,
                stages: vec![
                    first,
                    SelectorStage {
                        method: second_method,
                        k,
                    },
                ],
                svm: config.svm_params(),
                ..PipelineConfig::default()
            };
            let report = evaluate_cell(corpus, &pipeline, k_folds, config.eval.seed, mode)?;
            let name = format!("{}:{}->{}:{}", first.method, first.k, second_method, k);
            Ok(ReportRow::from_report(name, &report, true))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(ReportTable::new("stage5_combination", rows))
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub mode: String,
    pub workers: usize,
    pub stages_run: Vec<u8>,
    pub corpus_documents: usize,
    pub corpus_positive: usize,
    pub corpus_negative: usize,
    pub timings_ms: BTreeMap<String, u128>,
    pub config: ExperimentConfig,
}

pub struct ExperimentOutput {
    pub tables: Vec<ReportTable>,
    pub manifest_path: std::path::PathBuf,
}

fn stage_file_stem(table: &ReportTable) -> &str {
    &table.title
}

fn resolve_workers(config: &ExperimentConfig, cli_workers: Option<usize>) -> usize {
    cli_workers
        .filter(|&w| w > 0)
        .or_else(|| (config.experiment.workers > 0).then_some(config.experiment.workers))
        .or_else(|| {
            std::env::var("TASNIF_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
                .filter(|&w| w > 0)
        })
        .unwrap_or(0)
}

/// Runs the configured subset of stages 1-5 and writes one CSV + JSON pair
/// per stage plus a manifest into `out_dir`.
pub fn run_experiment(
    config: &ExperimentConfig,
    env: &ExperimentEnv,
    out_dir: &Path,
    cli_workers: Option<usize>,
) -> CliResult<ExperimentOutput> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))
        .map_err(CliError::Runtime)?;

    let workers = resolve_workers(config, cli_workers);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot build worker pool: {e}")))?;

    let corpus = load_configured_corpus(config)?;
    let counts = corpus.class_counts();

    let mut tables = Vec::new();
    let mut timings = BTreeMap::new();
    for &stage in &config.experiment.stages {
        let started = Instant::now();
        let table = pool.install(|| match stage {
            1 => run_stage1_weighting(config, &corpus),
            2 => run_stage2_prep(config, &corpus, env),
            3 => run_stage3_ngrams(config, &corpus),
            4 => run_stage4_selection(config, &corpus),
            5 => run_stage5_combination(config, &corpus),
            other => Err(CliError::Validation(format!("unknown stage {other}"))),
        })?;
        timings.insert(table.title.clone(), started.elapsed().as_millis());

        let stem = stage_file_stem(&table).to_string();
        let csv_path = out_dir.join(format!("{stem}.csv"));
        std::fs::write(&csv_path, table.to_csv_string())
            .with_context(|| format!("cannot write {}", csv_path.display()))
            .map_err(CliError::Runtime)?;
        let json_path = out_dir.join(format!("{stem}.json"));
        std::fs::write(&json_path, table.to_json())
            .with_context(|| format!("cannot write {}", json_path.display()))
            .map_err(CliError::Runtime)?;
        tables.push(table);
    }

    let manifest = Manifest {
        tool: "tasnif".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: config.eval.seed,
        mode: config.eval.mode.clone(),
        workers,
        stages_run: config.experiment.stages.clone(),
        corpus_documents: corpus.len(),
        corpus_positive: counts.positive,
        corpus_negative: counts.negative,
        timings_ms: timings,
        config: config.clone(),
    };
    let manifest_path = out_dir.join("manifest.json");
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )
    .with_context(|| format!("cannot write {}", manifest_path.display()))
    .map_err(CliError::Runtime)?;

    Ok(ExperimentOutput {
        tables,
        manifest_path,
    })
}

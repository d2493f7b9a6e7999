//! `tasnif` command line: decomposable pipeline subcommands plus the
//! config-driven experiment runner.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use tasnif::corpus::stratified_kfold;
use tasnif::evaluate::{cross_validate, PipelineConfig};
use tasnif::linsvm::{self, SvmParams};
use tasnif::selection::{score, select_top_k, write_scores_csv, SelectionMethod, SelectorStage};
use tasnif::vectorize::{build_vocab, vectorize, DocTermMatrix, NgramSpec, WeightScheme};
use tasnif_cli::config::ExperimentConfig;
use tasnif_cli::report::ReportTable;
use tasnif_cli::stages::{load_configured_corpus, run_experiment, ExperimentEnv};
use tasnif_cli::{files, CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "tasnif",
    version,
    about = "Dialectal Arabic sentiment classification: preprocessing, vectorization, feature selection, linear SVM, cross-validated experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preprocess the configured corpus into a token JSONL file.
    Preprocess {
        #[arg(long)]
        config: PathBuf,
        /// Output token JSONL path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Vectorize a token JSONL file into a sparse matrix dump plus
    /// vocabulary and label files.
    Vectorize {
        #[arg(long)]
        tokens: PathBuf,
        #[arg(long, default_value = "tfidf")]
        scheme: String,
        #[arg(long, default_value = "unigram")]
        ngrams: String,
        #[arg(long, default_value_t = 1)]
        min_df: usize,
        /// Directory receiving matrix.txt, vocab.tsv, and labels.txt.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Score features of a matrix and optionally keep the top K.
    Select {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        method: String,
        /// Keep only the K best features (writes --features-out).
        #[arg(long)]
        top_k: Option<usize>,
        /// Scores CSV output path.
        #[arg(long)]
        scores_out: PathBuf,
        /// Selected feature indices, one per line in rank order.
        #[arg(long)]
        features_out: Option<PathBuf>,
        #[command(flatten)]
        svm: SvmArgs,
    },
    /// Train the linear SVM on a matrix dump and write the model.
    Train {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        svm: SvmArgs,
    },
    /// Cross-validate one pipeline configuration.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        /// Weighting scheme override (tf, tfidf, btp).
        #[arg(long)]
        scheme: Option<String>,
        /// N-gram override (unigram, bigram, unigram+bigram).
        #[arg(long)]
        ngrams: Option<String>,
        /// Selector pipeline, e.g. "correlation:3500,svm:1500"; "none"
        /// disables selection.
        #[arg(long)]
        stages: Option<String>,
        #[arg(long)]
        k_folds: Option<usize>,
        /// strict or paper.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_json: Option<PathBuf>,
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
    /// Run the configured experiment stages and write report tables.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (falls back to experiment.out_dir in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// strict or paper.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Re-render the report tables of a finished run as CSV on stdout.
    Report {
        /// Run directory written by `experiment`.
        #[arg(long)]
        run: PathBuf,
        /// Restrict to one stage (1-5).
        #[arg(long)]
        stage: Option<u8>,
    },
}

#[derive(Args)]
struct SvmArgs {
    #[arg(long = "svm-c", default_value_t = 1.0)]
    c: f64,
    #[arg(long = "svm-tolerance", default_value_t = 1e-3)]
    tolerance: f64,
    #[arg(long = "svm-max-epochs", default_value_t = 1000)]
    max_epochs: usize,
}

impl SvmArgs {
    fn params(&self) -> SvmParams {
        SvmParams {
            c: self.c,
            tolerance: self.tolerance,
            max_epochs: self.max_epochs,
            seed: 0,
        }
    }
}

fn main() {
    match run() {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run() -> CliResult<()> {
    match Cli::parse().command {
        Command::Preprocess { config, out } => preprocess_cmd(&config, &out),
        Command::Vectorize {
            tokens,
            scheme,
            ngrams,
            min_df,
            out_dir,
        } => vectorize_cmd(&tokens, &scheme, &ngrams, min_df, &out_dir),
        Command::Select {
            matrix,
            labels,
            vocab,
            method,
            top_k,
            scores_out,
            features_out,
            svm,
        } => select_cmd(
            &matrix,
            &labels,
            &vocab,
            &method,
            top_k,
            &scores_out,
            features_out.as_deref(),
            &svm,
        ),
        Command::Train {
            matrix,
            labels,
            out,
            svm,
        } => train_cmd(&matrix, &labels, &out, &svm),
        Command::Evaluate {
            config,
            scheme,
            ngrams,
            stages,
            k_folds,
            mode,
            seed,
            out_json,
            out_csv,
        } => evaluate_cmd(
            &config,
            scheme.as_deref(),
            ngrams.as_deref(),
            stages.as_deref(),
            k_folds,
            mode.as_deref(),
            seed,
            out_json.as_deref(),
            out_csv.as_deref(),
        ),
        Command::Experiment {
            config,
            out,
            seed,
            mode,
            workers,
        } => experiment_cmd(&config, out.as_deref(), seed, mode.as_deref(), workers),
        Command::Report { run, stage } => report_cmd(&run, stage),
    }
}

fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let config = ExperimentConfig::from_file(path)?;
    config.validate()?;
    Ok(config)
}

fn preprocess_cmd(config_path: &Path, out: &Path) -> CliResult<()> {
    let config = load_config(config_path)?;
    let corpus = load_configured_corpus(&config)?;
    files::write_tokens_jsonl(out, &corpus, &config.base_prep()?)?;
    eprintln!("wrote {} documents to {}", corpus.len(), out.display());
    Ok(())
}

fn vectorize_cmd(
    tokens_path: &Path,
    scheme: &str,
    ngrams: &str,
    min_df: usize,
    out_dir: &Path,
) -> CliResult<()> {
    let scheme = WeightScheme::from_str(scheme).map_err(|e| CliError::Validation(e.to_string()))?;
    let ngrams = NgramSpec::from_str(ngrams).map_err(|e| CliError::Validation(e.to_string()))?;
    let (_, tokens, labels) = files::read_tokens_jsonl(tokens_path)?;
    let vocab = build_vocab(&tokens, ngrams, min_df)?;
    let matrix: DocTermMatrix<f64> = vectorize(&tokens, &vocab, scheme, &labels)?;

    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))
        .map_err(CliError::Runtime)?;
    let matrix_path = out_dir.join("matrix.txt");
    let file = File::create(&matrix_path)
        .with_context(|| format!("cannot create {}", matrix_path.display()))
        .map_err(CliError::Runtime)?;
    matrix
        .write_triplets(BufWriter::new(file))
        .map_err(|e| CliError::Runtime(e.into()))?;
    files::write_vocab(&out_dir.join("vocab.tsv"), &vocab)?;
    files::write_labels(&out_dir.join("labels.txt"), &labels)?;
    eprintln!(
        "matrix {}x{} ({} entries, {scheme}) written to {}",
        matrix.rows(),
        matrix.cols(),
        matrix.nnz(),
        out_dir.display()
    );
    Ok(())
}

fn read_matrix(matrix_path: &Path, labels_path: &Path) -> CliResult<DocTermMatrix<f64>> {
    let labels = files::read_labels(labels_path)?;
    let file = File::open(matrix_path)
        .with_context(|| format!("cannot open {}", matrix_path.display()))
        .map_err(CliError::Runtime)?;
    Ok(DocTermMatrix::read_triplets(BufReader::new(file), labels)?)
}

#[allow(clippy::too_many_arguments)]
fn select_cmd(
    matrix_path: &Path,
    labels_path: &Path,
    vocab_path: &Path,
    method: &str,
    top_k: Option<usize>,
    scores_out: &Path,
    features_out: Option<&Path>,
    svm: &SvmArgs,
) -> CliResult<()> {
    let method =
        SelectionMethod::from_str(method).map_err(|e| CliError::Validation(e.to_string()))?;
    let matrix = read_matrix(matrix_path, labels_path)?;
    let vocab = files::read_vocab(vocab_path)?;
    if vocab.len() != matrix.cols() {
        return Err(CliError::Runtime(anyhow!(
            "vocabulary has {} terms but matrix has {} columns",
            vocab.len(),
            matrix.cols()
        )));
    }

    let scores = score(&matrix, method, &svm.params())?;
    let file = File::create(scores_out)
        .with_context(|| format!("cannot create {}", scores_out.display()))
        .map_err(CliError::Runtime)?;
    write_scores_csv(&scores, &vocab, BufWriter::new(file))
        .map_err(|e| CliError::Runtime(e.into()))?;

    if let Some(k) = top_k {
        if k == 0 {
            return Err(CliError::Validation("top_k must be positive".into()));
        }
        let selected = select_top_k(&scores, k);
        let out_path = features_out.ok_or_else(|| {
            CliError::Validation("--features-out is required with --top-k".into())
        })?;
        let mut out = String::new();
        for &index in selected.indices() {
            out.push_str(&index.to_string());
            out.push('\n');
        }
        std::fs::write(out_path, out)
            .with_context(|| format!("cannot write {}", out_path.display()))
            .map_err(CliError::Runtime)?;
    }
    Ok(())
}

fn train_cmd(matrix_path: &Path, labels_path: &Path, out: &Path, svm: &SvmArgs) -> CliResult<()> {
    let matrix = read_matrix(matrix_path, labels_path)?;
    let model = linsvm::train(&matrix, &svm.params())?;
    if !model.converged() {
        eprintln!(
            "warning: solver hit the iteration budget after {} updates",
            model.iterations()
        );
    }
    let file = File::create(out)
        .with_context(|| format!("cannot create {}", out.display()))
        .map_err(CliError::Runtime)?;
    model
        .write_text(BufWriter::new(file))
        .map_err(|e| CliError::Runtime(e.into()))?;
    eprintln!(
        "model over {} features, objective {:?}, written to {}",
        model.dims(),
        model.objective(),
        out.display()
    );
    Ok(())
}

fn parse_stages_flag(spec: &str) -> CliResult<Vec<SelectorStage>> {
    if spec == "none" {
        return Ok(Vec::new());
    }
    spec.split(',')
        .map(|part| {
            let (method, k) = part.split_once(':').ok_or_else(|| {
                CliError::Validation(format!("bad stage {part:?}, want method:k"))
            })?;
            let method = SelectionMethod::from_str(method.trim())
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("bad k in stage {part:?}")))?;
            if k == 0 {
                return Err(CliError::Validation(format!("stage {part:?} has k = 0")));
            }
            Ok(SelectorStage { method, k })
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn evaluate_cmd(
    config_path: &Path,
    scheme: Option<&str>,
    ngrams: Option<&str>,
    stages: Option<&str>,
    k_folds: Option<usize>,
    mode: Option<&str>,
    seed: Option<u64>,
    out_json: Option<&Path>,
    out_csv: Option<&Path>,
) -> CliResult<()> {
    let mut config = load_config(config_path)?;
    if let Some(seed) = seed {
        config.eval.seed = seed;
    }
    if let Some(mode) = mode {
        config.eval.mode = mode.to_string();
    }
    if let Some(k) = k_folds {
        config.eval.k_folds = k;
    }
    config.validate()?;

    let pipeline = PipelineConfig {
        prep: config.base_prep()?,
        ngrams: match ngrams {
            Some(s) => NgramSpec::from_str(s).map_err(|e| CliError::Validation(e.to_string()))?,
            None => NgramSpec::Unigram,
        },
        scheme: match scheme {
            Some(s) => {
                WeightScheme::from_str(s).map_err(|e| CliError::Validation(e.to_string()))?
            }
            None => WeightScheme::TfIdf,
        },
        min_df: config.vectorize.min_df,
        stages: match stages {
            Some(s) => parse_stages_flag(s)?,
            None => Vec::new(),
        },
        svm: config.svm_params(),
        ..PipelineConfig::default()
    };

    let corpus = load_configured_corpus(&config)?;
    let plan = stratified_kfold(&corpus, config.eval.k_folds, config.eval.seed)?;
    let report = cross_validate::<f64>(&corpus, &pipeline, &plan, config.eval_mode()?)?;

    if let Some(path) = out_json {
        std::fs::write(path, report.to_json())
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(CliError::Runtime)?;
    }
    let mut csv = Vec::new();
    report
        .write_csv(&mut csv)
        .map_err(|e| CliError::Runtime(e.into()))?;
    match out_csv {
        Some(path) => std::fs::write(path, &csv)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(CliError::Runtime)?,
        None => {
            std::io::stdout()
                .write_all(&csv)
                .map_err(|e| CliError::Runtime(e.into()))?;
        }
    }
    Ok(())
}

fn experiment_cmd(
    config_path: &Path,
    out: Option<&Path>,
    seed: Option<u64>,
    mode: Option<&str>,
    workers: Option<usize>,
) -> CliResult<()> {
    let mut config = ExperimentConfig::from_file(config_path)?;
    if let Some(seed) = seed {
        config.eval.seed = seed;
    }
    if let Some(mode) = mode {
        config.eval.mode = mode.to_string();
    }
    let out_dir = match out {
        Some(path) => path.to_path_buf(),
        None => PathBuf::from(config.experiment.out_dir.clone().ok_or_else(|| {
            CliError::Validation("experiment.out_dir: missing (set it or pass --out)".into())
        })?),
    };

    let output = run_experiment(&config, &ExperimentEnv::default(), &out_dir, workers)?;
    for table in &output.tables {
        eprintln!("{}: {} rows", table.title, table.rows.len());
    }
    eprintln!("manifest: {}", output.manifest_path.display());
    Ok(())
}

fn report_cmd(run_dir: &Path, stage: Option<u8>) -> CliResult<()> {
    let names = [
        (1u8, "stage1_weighting"),
        (2, "stage2_preprocessing"),
        (3, "stage3_ngrams"),
        (4, "stage4_selection"),
        (5, "stage5_combination"),
    ];
    let mut printed = 0;
    for (number, name) in names {
        if stage.is_some_and(|s| s != number) {
            continue;
        }
        let path = run_dir.join(format!("{name}.json"));
        if !path.exists() {
            continue;
        }
        let table = ReportTable::from_json_file(&path)?;
        println!("# {}", table.title);
        print!("{}", table.to_csv_string());
        println!();
        printed += 1;
    }
    if printed == 0 {
        return Err(CliError::Runtime(anyhow!(
            "no report tables found in {}",
            run_dir.display()
        )));
    }
    Ok(())
}

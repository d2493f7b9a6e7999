//! Sentiment classification toolkit for dialectal Arabic reviews.
//!
//! The crate covers the full pipeline from raw labeled text to cross-validated
//! classification scores:
//!
//! - [`corpus`] — labeled corpus loading, balanced sampling, stratified fold plans
//! - [`textprep`] — noise stripping, Arabic letter normalization, tokenization,
//!   stop-word removal, light stemming
//! - [`vectorize`] — n-gram vocabularies and sparse document-term matrices under
//!   TF, TF-IDF, or binary-presence weighting
//! - [`selection`] — five feature-relevance scorers (information gain, Pearson
//!   correlation, chi-square, Gini purity, SVM weights), top-K selection, and
//!   sequential selector pipelines
//! - [`linsvm`] — a binary linear SVM (hinge loss, L2 regularization) trained by
//!   SMO-style dual pair updates
//! - [`evaluate`] — stratified k-fold evaluation with accuracy/precision/recall
//!   reports
//!
//! Numeric kernels are generic over the floating-point type through [`Scalar`];
//! `f64` aliases for the main value types live at the crate root.
//!
//! ```
//! use tasnif::corpus::{Document, LabeledCorpus, Polarity};
//! use tasnif::vectorize::{build_vocab, vectorize, NgramSpec, WeightScheme};
//! use tasnif::textprep::tokenize;
//!
//! let docs = vec![
//!     Document::new("1", "الخدمه ممتازه", Polarity::Positive),
//!     Document::new("2", "الخدمه سيئه", Polarity::Negative),
//! ];
//! let corpus = LabeledCorpus::new(docs).unwrap();
//! let tokens: Vec<_> = corpus.documents().iter().map(|d| tokenize(&d.text)).collect();
//! let vocab = build_vocab(&tokens, NgramSpec::Unigram, 1).unwrap();
//! let matrix: tasnif::DocTermMatrix64 =
//!     vectorize(&tokens, &vocab, WeightScheme::Tf, &corpus.labels()).unwrap();
//! assert_eq!(matrix.cols(), 3);
//! ```

pub mod corpus;
pub mod error;
pub mod evaluate;
pub mod linsvm;
pub mod rng;
pub mod scalar;
pub mod selection;
pub mod textprep;
pub mod vectorize;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Document-term matrix over `f64` weights.
pub type DocTermMatrix64 = vectorize::DocTermMatrix<f64>;
/// Feature score vector over `f64`.
pub type FeatureScores64 = selection::FeatureScores<f64>;
/// Trained linear SVM over `f64` weights.
pub type SvmModel64 = linsvm::SvmModel<f64>;

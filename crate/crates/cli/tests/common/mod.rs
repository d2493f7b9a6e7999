//! Shared fixtures for CLI integration tests.

use std::path::Path;

/// Arabic term generator; positions draw from disjoint letter sets so no
/// term carries letter runs that repeat-collapsing would shorten.
pub fn arab_term(i: usize) -> String {
    const P0: [char; 8] = ['ب', 'ت', 'ج', 'د', 'ر', 'س', 'ع', 'ف'];
    const P1: [char; 8] = ['ا', 'و', 'ي', 'ل', 'م', 'ن', 'ه', 'ك'];
    const P2: [char; 8] = ['ق', 'ص', 'ط', 'ح', 'خ', 'ش', 'ز', 'غ'];
    format!("{}{}{}", P0[i % 8], P1[(i / 8) % 8], P2[(i / 64) % 8])
}

/// Writes a balanced, separable review CSV: `per_class` positive and
/// negative rows. Terms 0-2 mark positive documents, 3-5 negative ones,
/// 6-11 are shared noise.
pub fn write_corpus_csv(path: &Path, per_class: usize) {
    let mut out = String::from("text,label\n");
    for i in 0..per_class {
        let pos_text = format!(
            "{} {} {}",
            arab_term(i % 3),
            arab_term(6 + i % 6),
            arab_term(6 + (i + 3) % 6),
        );
        let neg_text = format!(
            "{} {} {}",
            arab_term(3 + i % 3),
            arab_term(6 + (i + 1) % 6),
            arab_term(6 + (i + 4) % 6),
        );
        out.push_str(&format!("{pos_text},pos\n"));
        out.push_str(&format!("{neg_text},neg\n"));
    }
    std::fs::write(path, out).unwrap();
}

/// A small five-stage experiment config over the fixture corpus.
pub fn write_config(path: &Path, corpus_csv: &Path, stages: &str) -> String {
    let text = format!(
        r#"
[corpus]
path = "{corpus}"
format = "csv"
positive_labels = ["pos"]
negative_labels = ["neg"]

[eval]
k_folds = 3
mode = "strict"
seed = 7

[experiment]
stages = {stages}

[experiment.stage3]
ngrams = ["unigram", "unigram+bigram"]

[experiment.stage4]
methods = ["ig", "gini"]
top_k = [3, 6]

[experiment.stage5]
k_folds = 3
pipelines = [
    {{ first_method = "correlation", first_k = 8, second_method = "svm", second_k = [3, 5] }},
]
"#,
        corpus = corpus_csv.display(),
        stages = stages,
    );
    std::fs::write(path, &text).unwrap();
    text
}

//! Text preprocessing: noise stripping, Arabic letter normalization,
//! tokenization, stop-word removal, and light stemming.
//!
//! Every operation here is a pure function; [`preprocess`] composes them in a
//! fixed order: strip noise, normalize, tokenize, remove stop words, stem.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered token sequence. Tokens are never empty and contain no whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenStream {
    tokens: Vec<String>,
}

impl TokenStream {
    /// Wraps a token list, dropping empty entries.
    pub fn new(tokens: Vec<String>) -> Self {
        let tokens = tokens.into_iter().filter(|t| !t.is_empty()).collect();
        TokenStream { tokens }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl FromIterator<String> for TokenStream {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        TokenStream::new(iter.into_iter().collect())
    }
}

/// Arabic letters proper: hamza through ghain, feh through ya. Excludes
/// tatweel (U+0640), diacritics, and digits.
pub fn is_arabic_letter(c: char) -> bool {
    matches!(c, '\u{0621}'..='\u{063A}' | '\u{0641}'..='\u{064A}')
}

fn is_arabic_diacritic(c: char) -> bool {
    matches!(c, '\u{064B}'..='\u{0652}')
}

/// Reduces text to Arabic letters separated by single spaces.
///
/// Diacritics (U+064B-U+0652) and tatweel (U+0640) are dropped in place so the
/// surrounding letters join. Every other non-Arabic character (punctuation,
/// digits in either numeral system, Latin letters, symbols) acts as a
/// separator. With `collapse_repeats`, runs of three or more identical letters
/// shrink to one; elongations like "جدااااا" carry emphasis, not morphology.
pub fn strip_noise(text: &str, collapse_repeats: bool) -> String {
    let mut filtered = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if is_arabic_letter(c) {
            if pending_space && !filtered.is_empty() {
                filtered.push(' ');
            }
            pending_space = false;
            filtered.push(c);
        } else if is_arabic_diacritic(c) || c == '\u{0640}' {
            // Joined removal: letters on either side stay one word.
        } else {
            pending_space = true;
        }
    }

    if collapse_repeats {
        collapse_letter_runs(&filtered)
    } else {
        filtered
    }
}

fn collapse_letter_runs(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let mut j = i + 1;
        while j < chars.len() && chars[j] == c {
            j += 1;
        }
        let run = j - i;
        if run >= 3 {
            out.push(c);
        } else {
            for _ in 0..run {
                out.push(c);
            }
        }
        i = j;
    }
    out
}

/// Normalizes a single character per the fixed letter table.
pub fn normalize_char(c: char) -> char {
    match c {
        // alef variants (hamza above/below, madda) -> bare alef
        '\u{0623}' | '\u{0625}' | '\u{0622}' => '\u{0627}',
        // alef maqsura -> ya
        '\u{0649}' => '\u{064A}',
        // taa marbuta -> haa
        '\u{0629}' => '\u{0647}',
        // hamza on waw -> waw
        '\u{0624}' => '\u{0648}',
        // hamza on ya -> ya
        '\u{0626}' => '\u{064A}',
        other => other,
    }
}

/// Applies the letter normalization table character by character.
///
/// The mapping is 1-to-1 and none of its outputs are inputs, so the function
/// is idempotent and length-preserving.
pub fn normalize(text: &str) -> String {
    text.chars().map(normalize_char).collect()
}

/// Splits on Unicode whitespace, discarding empty fragments.
pub fn tokenize(text: &str) -> TokenStream {
    TokenStream {
        tokens: text.split_whitespace().map(str::to_string).collect(),
    }
}

/// Set of tokens removed during preprocessing.
///
/// Entries are stored normalized so lookups match normalized tokens.
#[derive(Debug, Clone, Default)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Stoplist {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The bundled list of roughly one hundred Arabic function words.
    pub fn default_arabic() -> Self {
        Self::parse(include_str!("stopwords_ar.txt"))
    }

    /// Loads a stop list: UTF-8, one token per line, `#` lines ignored.
    pub fn from_file(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut contents = String::new();
        let mut reader = BufReader::new(file);
        std::io::Read::read_to_string(&mut reader, &mut contents)
            .map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&contents))
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Stoplist {
            words: words
                .into_iter()
                .map(|w| normalize(w.as_ref().trim()))
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    fn parse(contents: &str) -> Self {
        Self::from_words(
            contents
                .lines()
                .filter(|line| !line.trim_start().starts_with('#')),
        )
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Drops tokens that exactly match a stop-list entry, preserving order.
pub fn remove_stopwords(tokens: TokenStream, stoplist: &Stoplist) -> TokenStream {
    TokenStream {
        tokens: tokens
            .tokens
            .into_iter()
            .filter(|t| !stoplist.contains(t))
            .collect(),
    }
}

const PREFIXES: [&str; 7] = ["وال", "بال", "كال", "فال", "ال", "لل", "و"];
const SUFFIXES: [&str; 8] = ["ها", "ان", "ات", "ون", "ين", "يه", "ه", "ي"];

/// Light stemmer: strips at most one article/conjunction prefix and one
/// common suffix, longest match first. A strip only applies when the
/// remainder keeps at least three letters.
pub fn light_stem(token: &str) -> String {
    let mut stem = token;

    for prefix in PREFIXES {
        if let Some(rest) = stem.strip_prefix(prefix) {
            if rest.chars().count() >= 3 {
                stem = rest;
            }
            break;
        }
    }
    for suffix in SUFFIXES {
        if let Some(rest) = stem.strip_suffix(suffix) {
            if rest.chars().count() >= 3 {
                stem = rest;
            }
            break;
        }
    }

    stem.to_string()
}

/// Token-level stemmer, pluggable so external stemmers can slot into the
/// pipeline.
pub trait Stemmer: Send + Sync {
    fn stem(&self, token: &str) -> String;
    /// Name echoed into reports.
    fn name(&self) -> &str;
}

/// The built-in light stemmer as a plug-in.
#[derive(Debug, Clone, Copy, Default)]
pub struct LightStemmer;

impl Stemmer for LightStemmer {
    fn stem(&self, token: &str) -> String {
        light_stem(token)
    }

    fn name(&self) -> &str {
        "light"
    }
}

/// Stemming stage selection.
#[derive(Clone, Default)]
pub enum StemmerKind {
    #[default]
    None,
    Light,
    External(Arc<dyn Stemmer>),
}

impl StemmerKind {
    pub fn name(&self) -> &str {
        match self {
            StemmerKind::None => "none",
            StemmerKind::Light => "light",
            StemmerKind::External(s) => s.name(),
        }
    }
}

impl fmt::Debug for StemmerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StemmerKind::None => f.write_str("None"),
            StemmerKind::Light => f.write_str("Light"),
            StemmerKind::External(s) => write!(f, "External({})", s.name()),
        }
    }
}

/// Preprocessing pipeline configuration.
#[derive(Debug, Clone)]
pub struct PrepConfig {
    pub remove_stopwords: bool,
    pub stoplist: Stoplist,
    pub stemmer: StemmerKind,
    pub collapse_repeats: bool,
}

impl Default for PrepConfig {
    fn default() -> Self {
        PrepConfig {
            remove_stopwords: false,
            stoplist: Stoplist::empty(),
            stemmer: StemmerKind::None,
            collapse_repeats: true,
        }
    }
}

/// Full pipeline: `tokenize(normalize(strip_noise(text)))`, then stop-word
/// removal, then stemming, in that fixed order.
pub fn preprocess(text: &str, config: &PrepConfig) -> TokenStream {
    let cleaned = strip_noise(text, config.collapse_repeats);
    let normalized = normalize(&cleaned);
    let mut tokens = tokenize(&normalized);
    if config.remove_stopwords {
        tokens = remove_stopwords(tokens, &config.stoplist);
    }
    match &config.stemmer {
        StemmerKind::None => tokens,
        StemmerKind::Light => tokens.tokens.iter().map(|t| light_stem(t)).collect(),
        StemmerKind::External(stemmer) => tokens.tokens.iter().map(|t| stemmer.stem(t)).collect(),
    }
}

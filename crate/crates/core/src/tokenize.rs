//! Tokenization under an explicit, serializable policy.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::RawDocument;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseMode {
    #[default]
    Preserve,
    FoldLower,
}

/// How raw text is cut into candidate tokens before edge stripping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    /// Split on Unicode whitespace only.
    #[default]
    Whitespace,
    /// Runs of word characters and runs of other non-space characters become
    /// separate tokens (`\w+|[^\w\s]+`), the rule of NLTK's
    /// `WordPunctTokenizer`.
    WordPunct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedPunctuation {
    /// Unicode general category P*, minus the policy's intra-word characters.
    #[serde(rename = "unicode-p")]
    UnicodeP,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PunctuationSet {
    Named(NamedPunctuation),
    Explicit(BTreeSet<char>),
}

impl Default for PunctuationSet {
    fn default() -> Self {
        PunctuationSet::Named(NamedPunctuation::UnicodeP)
    }
}

fn unicode_punct() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\p{P}$").expect("static regex"))
}

fn word_punct() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\w+|[^\w\s]+").expect("static regex"))
}

pub fn is_unicode_punctuation(c: char) -> bool {
    let mut buf = [0u8; 4];
    unicode_punct().is_match(c.encode_utf8(&mut buf))
}

fn default_intra_word() -> BTreeSet<char> {
    // ASCII hyphen and apostrophe, plus the Unicode hyphen, non-breaking
    // hyphen and right single quotation mark used as apostrophe.
    ['-', '\'', '\u{2010}', '\u{2011}', '\u{2019}']
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TokenizationPolicy {
    pub case_mode: CaseMode,
    pub strip_edge_punctuation: bool,
    pub punctuation_set: PunctuationSet,
    pub keep_numeric_tokens: bool,
    pub intra_word_chars: BTreeSet<char>,
    pub split_mode: SplitMode,
}

impl Default for TokenizationPolicy {
    fn default() -> Self {
        TokenizationPolicy {
            case_mode: CaseMode::Preserve,
            strip_edge_punctuation: true,
            punctuation_set: PunctuationSet::default(),
            keep_numeric_tokens: true,
            intra_word_chars: default_intra_word(),
            split_mode: SplitMode::Whitespace,
        }
    }
}

impl TokenizationPolicy {
    /// Reproduces `nltk.corpus.udhr.words()`: word/punctuation runs, no
    /// stripping, case preserved, numbers kept.
    pub fn nltk_word_punct() -> Self {
        TokenizationPolicy {
            strip_edge_punctuation: false,
            split_mode: SplitMode::WordPunct,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let PunctuationSet::Explicit(set) = &self.punctuation_set {
            if let Some(c) = set.intersection(&self.intra_word_chars).next() {
                return Err(Error::InvalidPolicy(format!(
                    "{c:?} is both punctuation and an intra-word character"
                )));
            }
        }
        Ok(())
    }

    pub fn is_punctuation(&self, c: char) -> bool {
        match &self.punctuation_set {
            PunctuationSet::Named(NamedPunctuation::UnicodeP) => {
                !self.intra_word_chars.contains(&c) && is_unicode_punctuation(c)
            }
            PunctuationSet::Explicit(set) => set.contains(&c),
        }
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let policy: Self = serde_json::from_str(json)
            .map_err(|e| Error::InvalidPolicy(e.to_string()))?;
        policy.validate()?;
        Ok(policy)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("policy serializes")
    }

    fn normalize(&self, fragment: &str) -> Option<String> {
        let fragment = if self.strip_edge_punctuation {
            fragment.trim_matches(|c| self.is_punctuation(c))
        } else {
            fragment
        };
        if fragment.is_empty() {
            return None;
        }
        if !self.keep_numeric_tokens && fragment.chars().all(char::is_numeric) {
            return None;
        }
        Some(match self.case_mode {
            CaseMode::Preserve => fragment.to_string(),
            CaseMode::FoldLower => fragment.to_lowercase(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Number of Unicode scalar values in `surface`.
    pub char_length: usize,
}

impl Token {
    pub fn new(surface: impl Into<String>) -> Self {
        let surface = surface.into();
        let char_length = surface.chars().count();
        Token {
            surface,
            char_length,
        }
    }
}

/// Ordered tokens of a document together with their type counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenTable {
    pub tokens: Vec<Token>,
    pub types: BTreeMap<String, usize>,
    pub token_count: usize,
    pub type_count: usize,
}

impl TokenTable {
    pub fn from_surfaces<I, S>(surfaces: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<Token> = surfaces.into_iter().map(Token::new).collect();
        let mut types = BTreeMap::new();
        for t in &tokens {
            *types.entry(t.surface.clone()).or_insert(0) += 1;
        }
        TokenTable {
            token_count: tokens.len(),
            type_count: types.len(),
            tokens,
            types,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }

    /// Character lengths of every token, in order.
    pub fn lengths(&self) -> Vec<f64> {
        self.tokens.iter().map(|t| t.char_length as f64).collect()
    }
}

pub fn tokenize_text(text: &str, policy: &TokenizationPolicy) -> Result<TokenTable> {
    policy.validate()?;
    let surfaces: Vec<String> = match policy.split_mode {
        SplitMode::Whitespace => text
            .split_whitespace()
            .filter_map(|f| policy.normalize(f))
            .collect(),
        SplitMode::WordPunct => word_punct()
            .find_iter(text)
            .filter_map(|m| policy.normalize(m.as_str()))
            .collect(),
    };
    Ok(TokenTable::from_surfaces(surfaces))
}

pub fn tokenize(doc: &RawDocument, policy: &TokenizationPolicy) -> Result<TokenTable> {
    tokenize_text(&doc.text, policy)
}

pub fn type_frequency(table: &TokenTable, type_string: &str) -> usize {
    table.types.get(type_string).copied().unwrap_or(0)
}

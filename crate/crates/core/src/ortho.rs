//! Orthographic profile of a token table.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenize::{TokenTable, TokenizationPolicy};

pub const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];

/// Lowercase a character when it lowercases to exactly one character.
pub fn fold_char(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

pub fn is_vowel(c: char) -> bool {
    VOWELS.contains(&fold_char(c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordLengthDistribution {
    pub counts: BTreeMap<usize, usize>,
    pub cumulative: BTreeMap<usize, usize>,
    pub cumulative_relative: BTreeMap<usize, f64>,
    pub max_length: usize,
    pub min_length: usize,
}

impl WordLengthDistribution {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

pub fn word_length_distribution(table: &TokenTable) -> Result<WordLengthDistribution> {
    if table.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut counts = BTreeMap::new();
    for t in &table.tokens {
        *counts.entry(t.char_length).or_insert(0usize) += 1;
    }
    let total = table.token_count;
    let mut running = 0;
    let mut cumulative = BTreeMap::new();
    let mut cumulative_relative = BTreeMap::new();
    for (&len, &n) in &counts {
        running += n;
        cumulative.insert(len, running);
        cumulative_relative.insert(len, running as f64 / total as f64);
    }
    Ok(WordLengthDistribution {
        min_length: *counts.keys().next().expect("non-empty"),
        max_length: *counts.keys().next_back().expect("non-empty"),
        counts,
        cumulative,
        cumulative_relative,
    })
}

pub fn lexical_diversity(table: &TokenTable) -> Result<f64> {
    if table.token_count == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(table.type_count as f64 / table.token_count as f64)
}

/// Adjacent vowel-vowel pairs in one surface; overlapping pairs each count.
pub fn vowel_pairs(surface: &str) -> usize {
    let mut pairs = 0;
    let mut prev_vowel = false;
    for c in surface.chars() {
        let v = is_vowel(c);
        if v && prev_vowel {
            pairs += 1;
        }
        prev_vowel = v;
    }
    pairs
}

/// Tokens containing at least one adjacent vowel pair, and the total number
/// of such pairs.
pub fn consecutive_vowel_incidence(table: &TokenTable) -> (usize, usize) {
    table.surfaces().map(vowel_pairs).fold((0, 0), |(tokens, pairs), p| {
        (tokens + usize::from(p > 0), pairs + p)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ending {
    Vowel(char),
    Consonant,
    Numeric,
}

fn ending(surface: &str) -> Option<Ending> {
    let last = surface.chars().rev().find(|c| c.is_alphanumeric())?;
    let folded = fold_char(last);
    Some(if VOWELS.contains(&folded) {
        Ending::Vowel(folded)
    } else if last.is_numeric() {
        Ending::Numeric
    } else {
        Ending::Consonant
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VowelStats {
    pub vowel_ending_count: usize,
    pub consonant_ending_count: usize,
    pub numeric_ending_count: usize,
    pub per_vowel: BTreeMap<char, usize>,
    pub pct_final_vowel: f64,
    pub consecutive_vowel_tokens: usize,
    pub consecutive_vowel_pairs: usize,
    /// Tokens classified; the denominator of every percentage.
    pub tokens_considered: usize,
    /// Tokens without any letter or digit (bare punctuation); never classified.
    pub non_word_tokens: usize,
    /// Numeric-ending tokens left out because of `exclude_numeric`.
    pub excluded_numeric: usize,
}

impl VowelStats {
    fn pct(&self, n: usize) -> f64 {
        100.0 * n as f64 / self.tokens_considered as f64
    }

    pub fn pct_consonant(&self) -> f64 {
        self.pct(self.consonant_ending_count)
    }

    pub fn pct_numeric(&self) -> f64 {
        self.pct(self.numeric_ending_count)
    }
}

/// Classify tokens by their last letter or digit into vowel-, consonant- and
/// numeric-ending. Bare punctuation tokens are skipped.
pub fn final_vowel_stats(table: &TokenTable, exclude_numeric: bool) -> Result<VowelStats> {
    let mut per_vowel: BTreeMap<char, usize> = VOWELS.iter().map(|&v| (v, 0)).collect();
    let (mut consonant, mut numeric, mut non_word, mut excluded) = (0, 0, 0, 0);
    let (mut cv_tokens, mut cv_pairs) = (0, 0);

    for surface in table.surfaces() {
        let Some(end) = ending(surface) else {
            non_word += 1;
            continue;
        };
        match end {
            Ending::Numeric if exclude_numeric => {
                excluded += 1;
                continue;
            }
            Ending::Numeric => numeric += 1,
            Ending::Consonant => consonant += 1,
            Ending::Vowel(v) => *per_vowel.get_mut(&v).expect("vowel key") += 1,
        }
        let pairs = vowel_pairs(surface);
        cv_tokens += usize::from(pairs > 0);
        cv_pairs += pairs;
    }

    let vowel: usize = per_vowel.values().sum();
    let considered = vowel + consonant + numeric;
    if considered == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(VowelStats {
        vowel_ending_count: vowel,
        consonant_ending_count: consonant,
        numeric_ending_count: numeric,
        per_vowel,
        pct_final_vowel: 100.0 * vowel as f64 / considered as f64,
        consecutive_vowel_tokens: cv_tokens,
        consecutive_vowel_pairs: cv_pairs,
        tokens_considered: considered,
        non_word_tokens: non_word,
        excluded_numeric: excluded,
    })
}

/// Occurrences of `ch` across all token surfaces; letters match
/// case-insensitively.
pub fn char_incidence(table: &TokenTable, ch: char) -> usize {
    let target = fold_char(ch);
    table
        .surfaces()
        .flat_map(str::chars)
        .filter(|&c| fold_char(c) == target)
        .count()
}

/// Case-folded character counts over all tokens.
pub fn char_incidence_map(table: &TokenTable) -> BTreeMap<char, usize> {
    let mut map = BTreeMap::new();
    for c in table.surfaces().flat_map(str::chars) {
        *map.entry(fold_char(c)).or_insert(0) += 1;
    }
    map
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Noun,
    Verb,
    Either,
    Other,
}

impl std::str::FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "noun" => Ok(Category::Noun),
            "verb" => Ok(Category::Verb),
            "either" => Ok(Category::Either),
            "other" => Ok(Category::Other),
            other => Err(format!("unknown category `{other}`")),
        }
    }
}

pub type Annotations = BTreeMap<String, Category>;

/// Parse a `type<TAB>category` file; `#` lines and blank lines are ignored.
pub fn parse_annotations(text: &str) -> Result<Annotations> {
    let mut out = Annotations::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |message: String| Error::MalformedMap {
            line: i + 1,
            message,
        };
        let mut fields = line.split('\t');
        let (Some(ty), Some(cat), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(malformed("expected `type<TAB>category`".into()));
        };
        let cat = cat.parse().map_err(malformed)?;
        out.insert(ty.to_string(), cat);
    }
    Ok(out)
}

pub fn load_annotations(path: impl AsRef<Path>) -> Result<Annotations> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_annotations(&text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopEntry {
    #[serde(rename = "type")]
    pub type_string: String,
    pub count: usize,
    /// Fraction of all tokens, in [0, 1].
    pub share: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub category: Option<Category>,
}

/// Most frequent types among those accepted by `keep`; ties go to the
/// lexicographically smaller type.
pub fn top_k_matching<F>(
    table: &TokenTable,
    k: usize,
    annotations: Option<&Annotations>,
    keep: F,
) -> Vec<TopEntry>
where
    F: Fn(&str) -> bool,
{
    let mut ranked: Vec<(&String, usize)> = table
        .types
        .iter()
        .filter(|(t, _)| keep(t))
        .map(|(t, &n)| (t, n))
        .collect();
    // `types` iterates in ascending key order; a stable sort keeps it on ties.
    ranked.sort_by_key(|&(_, n)| std::cmp::Reverse(n));
    ranked
        .into_iter()
        .take(k)
        .map(|(t, n)| TopEntry {
            type_string: t.clone(),
            count: n,
            share: n as f64 / table.token_count as f64,
            category: annotations.and_then(|a| a.get(t).copied()),
        })
        .collect()
}

pub fn top_k(table: &TokenTable, k: usize, annotations: Option<&Annotations>) -> Vec<TopEntry> {
    top_k_matching(table, k, annotations, |_| true)
}

/// All per-corpus orthographic statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoProfile {
    pub corpus_id: String,
    pub length_dist: WordLengthDistribution,
    pub vowel_stats: VowelStats,
    pub char_incidence: BTreeMap<char, usize>,
    pub lexical_diversity: f64,
    pub token_count: usize,
    pub type_count: usize,
    pub exclude_numeric: bool,
    pub policy_snapshot: TokenizationPolicy,
}

pub fn profile(
    corpus_id: &str,
    table: &TokenTable,
    policy: &TokenizationPolicy,
    exclude_numeric: bool,
) -> Result<OrthoProfile> {
    Ok(OrthoProfile {
        corpus_id: corpus_id.to_string(),
        length_dist: word_length_distribution(table)?,
        vowel_stats: final_vowel_stats(table, exclude_numeric)?,
        char_incidence: char_incidence_map(table),
        lexical_diversity: lexical_diversity(table)?,
        token_count: table.token_count,
        type_count: table.type_count,
        exclude_numeric,
        policy_snapshot: policy.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(words: &[&str]) -> TokenTable {
        TokenTable::from_surfaces(words.iter().copied())
    }

    #[test]
    fn hand_counted_lengths() {
        let d = word_length_distribution(&table(&["a", "bb", "bb"])).unwrap();
        assert_eq!(d.counts, BTreeMap::from([(1, 1), (2, 2)]));
        assert_eq!(d.cumulative, BTreeMap::from([(1, 1), (2, 3)]));
        assert_eq!(d.cumulative_relative[&2], 1.0);
        assert_eq!((d.min_length, d.max_length), (1, 2));
    }

    #[test]
    fn lengths_count_scalar_values() {
        let d = word_length_distribution(&table(&["Boditšhabatšhaba"])).unwrap();
        assert_eq!(d.max_length, 16);
    }

    #[test]
    fn empty_table_errors() {
        let t = TokenTable::default();
        assert!(matches!(word_length_distribution(&t), Err(Error::EmptyCorpus)));
        assert!(matches!(lexical_diversity(&t), Err(Error::EmptyCorpus)));
        assert!(matches!(final_vowel_stats(&t, false), Err(Error::EmptyCorpus)));
        assert_eq!(char_incidence(&t, 'r'), 0);
    }

    #[test]
    fn all_distinct_diversity_is_one() {
        assert_eq!(lexical_diversity(&table(&["a", "b", "c"])).unwrap(), 1.0);
    }

    #[test]
    fn single_consonant_token() {
        let s = final_vowel_stats(&table(&["abc"]), false).unwrap();
        assert_eq!(s.consonant_ending_count, 1);
        assert_eq!(s.pct_final_vowel, 0.0);
    }

    #[test]
    fn numeric_is_its_own_class() {
        let t = table(&["Isigaba", "1", "kuCharter", ".", "Umhlaba"]);
        let s = final_vowel_stats(&t, false).unwrap();
        assert_eq!(
            (s.vowel_ending_count, s.consonant_ending_count, s.numeric_ending_count),
            (2, 1, 1)
        );
        assert_eq!(s.non_word_tokens, 1);
        assert_eq!(s.per_vowel[&'a'], 2);
        let s = final_vowel_stats(&t, true).unwrap();
        assert_eq!(s.tokens_considered, 3);
        assert_eq!(s.excluded_numeric, 1);
        assert_eq!(s.numeric_ending_count, 0);
    }

    #[test]
    fn only_numbers_after_exclusion_is_empty() {
        assert!(matches!(
            final_vowel_stats(&table(&["1", "2"]), true),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn consecutive_vowels() {
        assert_eq!(consecutive_vowel_incidence(&table(&["iimfanelo"])), (1, 1));
        assert_eq!(consecutive_vowel_incidence(&table(&["aaa"])), (1, 2));
        assert_eq!(consecutive_vowel_incidence(&table(&["umuntu", "AE"])), (1, 1));
    }

    #[test]
    fn r_counted_case_insensitively() {
        let t = table(&["Rurimi", "rwe"]);
        assert_eq!(char_incidence(&t, 'r'), 3);
        assert_eq!(char_incidence(&t, 'R'), 3);
    }

    #[test]
    fn top_k_ties_lexicographic() {
        let top = top_k(&table(&["b", "a", "a", "b"]), 2, None);
        let got: Vec<_> = top.iter().map(|e| (e.type_string.as_str(), e.count)).collect();
        assert_eq!(got, [("a", 2), ("b", 2)]);
    }

    #[test]
    fn top_k_fewer_rows_than_k() {
        assert_eq!(top_k(&table(&["a", "b"]), 20, None).len(), 2);
    }

    #[test]
    fn top_k_annotations_attached() {
        let ann = parse_annotations("# comment\nabafundi\tnoun\nuthe\tVerb\n").unwrap();
        let top = top_k(&table(&["abafundi", "uthe", "uthe", "nje"]), 3, Some(&ann));
        assert_eq!(top[0].category, Some(Category::Verb));
        assert_eq!(top[1].category, Some(Category::Noun));
        assert_eq!(top[2].category, None);
    }

    #[test]
    fn bad_annotation_line() {
        assert!(matches!(
            parse_annotations("abafundi\tthing\n"),
            Err(Error::MalformedMap { line: 1, .. })
        ));
        assert!(matches!(
            parse_annotations("ok\tnoun\nabafundi\n"),
            Err(Error::MalformedMap { line: 2, .. })
        ));
    }

    #[test]
    fn synthetic_consonant_rate_round_trips() {
        // 921 consonant-ending tokens out of 10000.
        let mut words = vec!["uMnuz"; 921];
        words.extend(std::iter::repeat_n("umuntu", 10_000 - 921));
        let s = final_vowel_stats(&table(&words), false).unwrap();
        assert_eq!(s.consonant_ending_count, 921);
        assert!((s.pct_consonant() - 9.21).abs() < 1e-12);
        assert!((s.pct_final_vowel - 90.79).abs() < 1e-12);
    }

    fn words() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec("[a-eA-Erstu0-9.]{1,6}", 1..60)
    }

    proptest! {
        #[test]
        fn distribution_invariants(ws in words()) {
            let t = TokenTable::from_surfaces(ws);
            let d = word_length_distribution(&t).unwrap();
            prop_assert_eq!(d.total(), t.token_count);
            prop_assert_eq!(d.cumulative[&d.max_length], t.token_count);
            prop_assert_eq!(d.cumulative_relative[&d.max_length], 1.0);
            let rel: Vec<f64> = d.cumulative_relative.values().copied().collect();
            prop_assert!(rel.windows(2).all(|w| w[0] <= w[1]));
            let cum: Vec<usize> = d.cumulative.values().copied().collect();
            prop_assert!(cum.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn diversity_bounds(ws in words()) {
            let t = TokenTable::from_surfaces(ws);
            let ld = lexical_diversity(&t).unwrap();
            prop_assert!(ld > 0.0 && ld <= 1.0);
            prop_assert_eq!(ld == 1.0, t.type_count == t.token_count);
        }

        #[test]
        fn ending_percentages_sum_to_100(ws in words(), excl in any::<bool>()) {
            let t = TokenTable::from_surfaces(ws);
            if let Ok(s) = final_vowel_stats(&t, excl) {
                prop_assert_eq!(
                    s.vowel_ending_count + s.consonant_ending_count + s.numeric_ending_count,
                    s.tokens_considered
                );
                prop_assert_eq!(s.per_vowel.values().sum::<usize>(), s.vowel_ending_count);
                let total = s.pct_final_vowel + s.pct_consonant() + s.pct_numeric();
                prop_assert!((total - 100.0).abs() < 1e-9);
                if s.consecutive_vowel_tokens > 0 {
                    prop_assert!(s.consecutive_vowel_pairs >= s.consecutive_vowel_tokens);
                }
            }
        }

        #[test]
        fn full_top_k_covers_every_type(ws in words()) {
            let t = TokenTable::from_surfaces(ws);
            let top = top_k(&t, t.type_count, None);
            prop_assert_eq!(top.len(), t.type_count);
            let share: f64 = top.iter().map(|e| e.share).sum();
            prop_assert!((share - 1.0).abs() < 1e-9);
            prop_assert!(top.windows(2).all(|w| w[0].count > w[1].count
                || (w[0].count == w[1].count && w[0].type_string < w[1].type_string)));
        }

        #[test]
        fn incidence_mass_matches_char_count(ws in words()) {
            let t = TokenTable::from_surfaces(ws);
            let total: usize = t.tokens.iter().map(|tok| tok.char_length).sum();
            let map = char_incidence_map(&t);
            let summed: usize = map.keys().map(|&c| char_incidence(&t, c)).sum();
            prop_assert_eq!(summed, total);
            prop_assert_eq!(map.values().sum::<usize>(), total);
        }
    }
}

//! Shared helpers for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use orthosim::ingest::{load_manifest, CorpusManifest};
use orthosim::report::load_table;
use orthosim::tokenize::{TokenTable, TokenizationPolicy};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn udhr_manifest_path() -> PathBuf {
    fixture_dir().join("udhr/manifest.json")
}

pub fn udhr() -> CorpusManifest {
    load_manifest(udhr_manifest_path()).expect("fixture manifest loads")
}

/// The policy the UDHR figures were produced with: word/punctuation runs.
pub fn word_punct() -> TokenizationPolicy {
    TokenizationPolicy::nltk_word_punct()
}

pub fn table(manifest: &CorpusManifest, id: &str) -> TokenTable {
    load_table(manifest.entry(id).unwrap(), &word_punct()).unwrap()
}

/// Rank of each value among distinct values, by counting (1-based).
pub fn brute_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|v| 1.0 + values.iter().filter(|w| *w < v).count() as f64)
        .collect()
}

/// U for `a`: the number of (x in a, y in b) pairs with x > y.
pub fn brute_u(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .map(|x| b.iter().filter(|y| x > *y).count())
        .sum::<usize>() as f64
}

/// H = (N − 1) Σ n_i (r̄_i − r̄)² / Σ (r − r̄)², ranks counted directly.
pub fn brute_h(groups: &[Vec<f64>]) -> f64 {
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let ranks = brute_ranks(&pooled);
    let n = pooled.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let total: f64 = ranks.iter().map(|r| (r - mean).powi(2)).sum();
    let mut offset = 0;
    let mut between = 0.0;
    for g in groups {
        let m = ranks[offset..offset + g.len()].iter().sum::<f64>() / g.len() as f64;
        between += g.len() as f64 * (m - mean).powi(2);
        offset += g.len();
    }
    (n - 1.0) * between / total
}

/// Every split of 1..=n into `k` non-empty labelled groups. With distinct
/// values only the rank pattern matters, so this covers every configuration.
pub fn labelled_partitions(n: usize, k: usize) -> Vec<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    let total = k.pow(n as u32);
    for code in 0..total {
        let mut groups = vec![Vec::new(); k];
        let mut c = code;
        for v in 1..=n {
            groups[c % k].push(v as f64);
            c /= k;
        }
        if groups.iter().all(|g| !g.is_empty()) {
            out.push(groups);
        }
    }
    out
}

/// Exhaustive equivalence of U and H against the brute-force formulas for
/// every distinct-value input with N ≤ 8. Returns the number of cases
/// checked, or a description of the first mismatch.
pub fn exhaustive_rank_equivalence() -> Result<usize, String> {
    use orthosim::stats::{kruskal_wallis, u_statistics, Sample};
    let mut checked = 0;
    for n in 2..=8 {
        for groups in labelled_partitions(n, 2) {
            let a = Sample::new(groups[0].clone()).unwrap();
            let b = Sample::new(groups[1].clone()).unwrap();
            let (ua, ub) = u_statistics(&a, &b);
            let (ea, eb) = (brute_u(&groups[0], &groups[1]), brute_u(&groups[1], &groups[0]));
            if (ua - ea).abs() > 1e-9 || (ub - eb).abs() > 1e-9 {
                return Err(format!("U mismatch on {groups:?}: ({ua}, {ub}) vs ({ea}, {eb})"));
            }
            checked += 1;
        }
        for k in 2..=4 {
            if n < k + 1 {
                continue;
            }
            for groups in labelled_partitions(n, k) {
                let samples: Vec<Sample> = groups.iter().map(|g| Sample::new(g.clone()).unwrap()).collect();
                let h = kruskal_wallis(&samples).map_err(|e| e.to_string())?.statistic;
                let expected = brute_h(&groups);
                if (h - expected).abs() > 1e-9 {
                    return Err(format!("H mismatch on {groups:?}: {h} vs {expected}"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

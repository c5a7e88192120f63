//! Agglutination-calibrated type-to-token ratio.
//!
//! A lemma map groups a base word (e.g. `abafundi`) with its modified forms
//! carrying agglutinated particles (`nabafundi`, `kwabafundi`, ...). Per group
//! the base:modified token ratio B/M and type ratio β/μ are taken; their
//! medians λ_t and λ_θ rescale the plain ratio:
//!
//! ```text
//! TTR_cal = λ_θ · |types| / ((1 − 1/λ_t) · |tokens|)
//! ```

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenize::{type_frequency, TokenTable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaGroup {
    pub base_type: String,
    /// B: occurrences of the base type.
    pub base_token_count: usize,
    pub modified_types: BTreeSet<String>,
    /// M: summed occurrences of the modified types.
    pub modified_token_count: usize,
    /// β: number of base types, always 1 in this format.
    pub beta: usize,
    /// μ: number of modified types.
    pub mu: usize,
}

impl LemmaGroup {
    pub fn new(
        base_type: impl Into<String>,
        base_token_count: usize,
        modified_types: BTreeSet<String>,
        modified_token_count: usize,
    ) -> Self {
        LemmaGroup {
            base_type: base_type.into(),
            base_token_count,
            mu: modified_types.len(),
            modified_types,
            modified_token_count,
            beta: 1,
        }
    }

    pub fn token_ratio(&self) -> Option<f64> {
        (self.modified_token_count > 0 && self.mu > 0)
            .then(|| self.base_token_count as f64 / self.modified_token_count as f64)
    }

    pub fn type_ratio(&self) -> Option<f64> {
        (self.modified_token_count > 0 && self.mu > 0).then(|| self.beta as f64 / self.mu as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaMap {
    pub groups: Vec<LemmaGroup>,
    pub source_corpus_id: String,
    /// Listed types that do not occur in the source table (counted as 0).
    pub missing_types: Vec<String>,
}

/// Parse the lemma-map TSV: one group per line, base type first, modified
/// types after it, tab-separated. `#` lines and blank lines are skipped.
pub fn parse_lemma_map(text: &str, table: &TokenTable, corpus_id: &str) -> Result<LemmaMap> {
    let mut seen = HashSet::new();
    let mut groups = Vec::new();
    let mut missing = Vec::new();

    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if let Some(pos) = fields.iter().position(|f| f.trim().is_empty()) {
            return Err(Error::MalformedMap {
                line: i + 1,
                message: format!("empty field {}", pos + 1),
            });
        }
        for f in &fields {
            if !seen.insert(f.to_string()) {
                return Err(Error::OverlappingGroups(f.to_string()));
            }
            if type_frequency(table, f) == 0 {
                missing.push(f.to_string());
            }
        }
        let base = fields[0];
        let modified: BTreeSet<String> = fields[1..].iter().map(|s| s.to_string()).collect();
        let m = modified.iter().map(|t| type_frequency(table, t)).sum();
        groups.push(LemmaGroup::new(base, type_frequency(table, base), modified, m));
    }

    Ok(LemmaMap {
        groups,
        source_corpus_id: corpus_id.to_string(),
        missing_types: missing,
    })
}

pub fn load_lemma_map(
    path: impl AsRef<Path>,
    table: &TokenTable,
    corpus_id: &str,
) -> Result<LemmaMap> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lemma_map(&text, table, corpus_id)
}

/// Median with the midpoint convention for even counts.
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFactors {
    /// Median base:modified token ratio.
    pub lambda_t: f64,
    /// Median base:modified type ratio.
    pub lambda_theta: f64,
    pub groups_used: usize,
    pub groups_skipped: usize,
}

impl CalibrationFactors {
    /// Factors supplied directly rather than estimated from a lemma map.
    pub fn new(lambda_theta: f64, lambda_t: f64) -> Result<Self> {
        for (name, v) in [("lambda_theta", lambda_theta), ("lambda_t", lambda_t)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidFactor(format!("{name} = {v}")));
            }
        }
        Ok(CalibrationFactors {
            lambda_t,
            lambda_theta,
            groups_used: 0,
            groups_skipped: 0,
        })
    }
}

/// Medians of the per-group ratios. Groups without modified tokens or types
/// have no defined ratio and are skipped.
pub fn calibration_factors(map: &LemmaMap) -> Result<CalibrationFactors> {
    let (mut token_ratios, mut type_ratios) = (Vec::new(), Vec::new());
    for g in &map.groups {
        if let (Some(t), Some(y)) = (g.token_ratio(), g.type_ratio()) {
            token_ratios.push(t);
            type_ratios.push(y);
        }
    }
    let used = token_ratios.len();
    let lambda_t = median(&mut token_ratios).ok_or(Error::NoUsableGroups)?;
    let lambda_theta = median(&mut type_ratios).ok_or(Error::NoUsableGroups)?;
    if lambda_t <= 0.0 {
        return Err(Error::InvalidFactor(format!(
            "lambda_t = {lambda_t}: base types are absent from most groups"
        )));
    }
    Ok(CalibrationFactors {
        lambda_t,
        lambda_theta,
        groups_used: used,
        groups_skipped: map.groups.len() - used,
    })
}

pub fn calibrated_ttr(factors: &CalibrationFactors, type_count: usize, token_count: usize) -> Result<f64> {
    if factors.lambda_t <= 1.0 {
        return Err(Error::DegenerateLambdaT(factors.lambda_t));
    }
    if token_count == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(factors.lambda_theta * type_count as f64
        / ((1.0 - 1.0 / factors.lambda_t) * token_count as f64))
}

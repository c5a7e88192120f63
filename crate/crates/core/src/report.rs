//! Pipelines behind the command-line tool: per-corpus profile reports,
//! multi-corpus comparison reports and plot series.
//!
//! Reports are deterministic for fixed inputs and seed: every map is ordered
//! and the only wall-clock value is the top-level `timestamp`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calib::{calibrated_ttr, calibration_factors, parse_lemma_map, CalibrationFactors};
use crate::error::{Error, Result};
use crate::ingest::{read_document, CorpusEntry, CorpusManifest};
use crate::ortho::{profile, top_k, Annotations, OrthoProfile, TopEntry, VOWELS};
use crate::stats::{
    chi_square_independence, choose_tests, mann_whitney, ContingencyTable, Sample, TestPlan,
    TestResult,
};
use crate::tokenize::{tokenize, TokenTable, TokenizationPolicy};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_TOP_K: usize = 20;
pub const DEFAULT_ALPHA: f64 = 0.05;

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Read and tokenize one manifest entry.
pub fn load_table(entry: &CorpusEntry, policy: &TokenizationPolicy) -> Result<TokenTable> {
    tokenize(&read_document(entry)?, policy)
}

// ---------------------------------------------------------------------------
// profile

#[derive(Debug, Clone, Default)]
pub struct ProfileOptions {
    pub top_k: usize,
    pub exclude_numeric: bool,
    pub annotations: Option<Annotations>,
    /// Lemma-map TSV text, resolved against the profiled corpus.
    pub lemma_map: Option<String>,
}

impl ProfileOptions {
    pub fn new() -> Self {
        ProfileOptions {
            top_k: DEFAULT_TOP_K,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub factors: CalibrationFactors,
    /// Absent when λ_t ≤ 1, where the calibrated ratio is undefined.
    pub calibrated_ttr: Option<f64>,
    pub missing_types: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub timestamp: String,
    pub profile: OrthoProfile,
    pub top_k: Vec<TopEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<Calibration>,
}

pub fn profile_table(
    corpus_id: &str,
    table: &TokenTable,
    policy: &TokenizationPolicy,
    opts: &ProfileOptions,
) -> Result<ProfileReport> {
    let prof = profile(corpus_id, table, policy, opts.exclude_numeric)?;
    let top = top_k(table, opts.top_k, opts.annotations.as_ref());
    let calibration = match &opts.lemma_map {
        None => None,
        Some(text) => {
            let map = parse_lemma_map(text, table, corpus_id)?;
            let factors = calibration_factors(&map)?;
            let (ttr, notes) = match calibrated_ttr(&factors, table.type_count, table.token_count) {
                Ok(v) => (Some(v), Vec::new()),
                Err(e @ Error::DegenerateLambdaT(_)) => (None, vec![e.to_string()]),
                Err(e) => return Err(e),
            };
            Some(Calibration {
                factors,
                calibrated_ttr: ttr,
                missing_types: map.missing_types,
                notes,
            })
        }
    };
    Ok(ProfileReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        timestamp: now(),
        profile: prof,
        top_k: top,
        calibration,
    })
}

pub fn profile_command(
    manifest: &CorpusManifest,
    corpus_id: &str,
    policy: &TokenizationPolicy,
    opts: &ProfileOptions,
) -> Result<ProfileReport> {
    let table = load_table(manifest.entry(corpus_id)?, policy)?;
    profile_table(corpus_id, &table, policy, opts)
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Serialization(e.to_string())
}

impl ProfileReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Long-format CSV: `section,key,value`, one statistic per row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let p = &self.profile;
        let v = &p.vowel_stats;
        let mut w = csv_writer(out);
        let mut row = |section: &str, key: &str, value: String| {
            w.write_record([section, key, value.as_str()]).map_err(csv_err)
        };
        row("section", "key", "value".into())?;
        row("corpus", "id", p.corpus_id.clone())?;
        row("corpus", "token_count", p.token_count.to_string())?;
        row("corpus", "type_count", p.type_count.to_string())?;
        row("corpus", "lexical_diversity", p.lexical_diversity.to_string())?;
        for (len, n) in &p.length_dist.counts {
            row("length", &len.to_string(), n.to_string())?;
        }
        for (len, n) in &p.length_dist.cumulative {
            row("cumulative", &len.to_string(), n.to_string())?;
        }
        row("vowels", "pct_final_vowel", v.pct_final_vowel.to_string())?;
        row("vowels", "pct_consonant", v.pct_consonant().to_string())?;
        row("vowels", "pct_numeric", v.pct_numeric().to_string())?;
        row("vowels", "consecutive_vowel_tokens", v.consecutive_vowel_tokens.to_string())?;
        for (c, n) in &v.per_vowel {
            row("final", &c.to_string(), n.to_string())?;
        }
        for (c, n) in &p.char_incidence {
            row("char", &c.to_string(), n.to_string())?;
        }
        for t in &self.top_k {
            row("top", &t.type_string, t.count.to_string())?;
        }
        if let Some(c) = &self.calibration {
            row("calibration", "lambda_t", c.factors.lambda_t.to_string())?;
            row("calibration", "lambda_theta", c.factors.lambda_theta.to_string())?;
            if let Some(ttr) = c.calibrated_ttr {
                row("calibration", "calibrated_ttr", ttr.to_string())?;
            }
        }
        w.flush().map_err(|e| Error::Serialization(e.to_string()))
    }
}

// ---------------------------------------------------------------------------
// plot series

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    CumulativeLength,
    VowelBars,
}

impl PlotKind {
    fn as_str(self) -> &'static str {
        match self {
            PlotKind::CumulativeLength => "cumulative-length",
            PlotKind::VowelBars => "vowel-bars",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub x: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub series_id: String,
    pub kind: PlotKind,
    pub points: Vec<PlotPoint>,
}

/// Cumulative token count by word length; `relative` divides by the total.
pub fn cumulative_series(p: &OrthoProfile, relative: bool) -> PlotSeries {
    let total = p.length_dist.total() as f64;
    let points = p
        .length_dist
        .cumulative
        .iter()
        .map(|(&len, &n)| PlotPoint {
            x: len as f64,
            label: None,
            y: if relative { n as f64 / total } else { n as f64 },
        })
        .collect();
    PlotSeries {
        series_id: p.corpus_id.clone(),
        kind: PlotKind::CumulativeLength,
        points,
    }
}

/// Final-vowel counts as fractions of all vowel-ending tokens.
pub fn vowel_series(p: &OrthoProfile) -> PlotSeries {
    let per = &p.vowel_stats.per_vowel;
    let total: usize = per.values().sum();
    let points = VOWELS
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let n = per.get(v).copied().unwrap_or(0);
            PlotPoint {
                x: i as f64,
                label: Some(v.to_string()),
                y: if total == 0 { 0.0 } else { n as f64 / total as f64 },
            }
        })
        .collect();
    PlotSeries {
        series_id: p.corpus_id.clone(),
        kind: PlotKind::VowelBars,
        points,
    }
}

pub fn emit_plot_series(profiles: &[OrthoProfile], kind: PlotKind, relative: bool) -> Vec<PlotSeries> {
    profiles
        .iter()
        .map(|p| match kind {
            PlotKind::CumulativeLength => cumulative_series(p, relative),
            PlotKind::VowelBars => vowel_series(p),
        })
        .collect()
}

/// CSV with columns `series_id,kind,x,label,y`.
pub fn write_plot_csv<W: Write>(series: &[PlotSeries], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["series_id", "kind", "x", "label", "y"]).map_err(csv_err)?;
    for s in series {
        for pt in &s.points {
            w.write_record([
                s.series_id.as_str(),
                s.kind.as_str(),
                &pt.x.to_string(),
                pt.label.as_deref().unwrap_or(""),
                &pt.y.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::Serialization(e.to_string()))
}

// ---------------------------------------------------------------------------
// compare

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComparisonKind {
    WordLength,
    VowelContingency,
    PairwiseLength,
}

/// How vowel-contingency rows are scaled before the χ² test.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalize {
    /// Each language's row sums to 100, as in the normalised vowel chart.
    #[default]
    Percent,
    Counts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub kind: ComparisonKind,
    pub members: Vec<String>,
    #[serde(default)]
    pub normalize: Normalize,
}

impl Comparison {
    pub fn key(&self) -> String {
        let kind = serde_json::to_value(self.kind).expect("kind serializes");
        let mut key = format!("{}:{}", kind.as_str().unwrap_or_default(), self.members.join(","));
        if self.kind == ComparisonKind::VowelContingency && self.normalize == Normalize::Counts {
            key.push_str(";counts");
        }
        key
    }
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSpec {
    #[serde(default)]
    pub corpus_ids: Vec<String>,
    pub comparisons: Vec<Comparison>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

impl ComparisonSpec {
    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self, manifest: &CorpusManifest) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidSpec(format!("alpha {} is not in (0, 1)", self.alpha)));
        }
        for id in self.all_corpora() {
            manifest.entry(&id)?;
        }
        for c in &self.comparisons {
            let n = c.members.len();
            let ok = match c.kind {
                ComparisonKind::PairwiseLength => n == 2,
                _ => n >= 2,
            };
            if !ok {
                return Err(Error::InvalidSpec(format!(
                    "comparison `{}` has {n} member(s)",
                    c.key()
                )));
            }
            let mut seen = std::collections::BTreeSet::new();
            if let Some(dup) = c.members.iter().find(|m| !seen.insert(*m)) {
                return Err(Error::InvalidSpec(format!(
                    "comparison `{}` lists `{dup}` twice",
                    c.key()
                )));
            }
        }
        Ok(())
    }

    /// `corpus_ids` followed by any comparison members not already listed.
    pub fn all_corpora(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let ids = self.corpus_ids.iter();
        let members = self.comparisons.iter().flat_map(|c| c.members.iter());
        for id in ids.chain(members) {
            if !out.contains(id) {
                out.push(id.clone());
            }
        }
        out
    }
}

/// The result (or error) for one comparison slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonOutcome {
    pub key: String,
    pub kind: ComparisonKind,
    pub members: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<TestResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<TestPlan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<ContingencyTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ComparisonOutcome {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub timestamp: String,
    pub policy_snapshot: TokenizationPolicy,
    pub alpha: f64,
    pub seed: u64,
    pub exclude_numeric: bool,
    pub profiles: Vec<OrthoProfile>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub profile_errors: BTreeMap<String, String>,
    pub comparisons: Vec<ComparisonOutcome>,
    pub plot_series: Vec<PlotSeries>,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failed_slots(&self) -> usize {
        self.comparisons.iter().filter(|c| !c.is_ok()).count()
    }

    pub fn outcome(&self, key: &str) -> Option<&ComparisonOutcome> {
        self.comparisons.iter().find(|c| c.key == key)
    }
}

struct Loaded {
    table: TokenTable,
    profile: OrthoProfile,
}

fn lengths(table: &TokenTable) -> Result<Sample> {
    Sample::new(table.lengths())
}

/// Languages × vowels table from final-vowel counts.
pub fn vowel_table(profiles: &[&OrthoProfile], normalize: Normalize) -> Result<ContingencyTable> {
    let counts = profiles
        .iter()
        .map(|p| {
            VOWELS
                .iter()
                .map(|v| p.vowel_stats.per_vowel.get(v).copied().unwrap_or(0) as f64)
                .collect()
        })
        .collect();
    let t = ContingencyTable::new(
        counts,
        profiles.iter().map(|p| p.corpus_id.clone()).collect(),
        VOWELS.iter().map(|v| v.to_string()).collect(),
    )?;
    Ok(match normalize {
        Normalize::Percent => t.normalized_rows(100.0),
        Normalize::Counts => t,
    })
}

fn run_comparison(
    c: &Comparison,
    loaded: &BTreeMap<String, Result<Loaded>>,
    alpha: f64,
    seed: u64,
) -> ComparisonOutcome {
    let mut out = ComparisonOutcome {
        key: c.key(),
        kind: c.kind,
        members: c.members.clone(),
        result: None,
        plan: None,
        table: None,
        error: None,
    };
    let mut members = Vec::with_capacity(c.members.len());
    for m in &c.members {
        match loaded.get(m) {
            Some(Ok(l)) => members.push(l),
            Some(Err(e)) => {
                out.error = Some(format!("corpus `{m}`: {e}"));
                return out;
            }
            None => {
                out.error = Some(Error::UnknownCorpus(m.clone()).to_string());
                return out;
            }
        }
    }

    let run = || -> Result<(TestResult, Option<TestPlan>, Option<ContingencyTable>)> {
        match c.kind {
            ComparisonKind::WordLength => {
                let groups = members
                    .iter()
                    .map(|l| lengths(&l.table))
                    .collect::<Result<Vec<_>>>()?;
                let plan = choose_tests(&groups, alpha, seed)?;
                Ok((plan.test.clone(), Some(plan), None))
            }
            ComparisonKind::PairwiseLength => {
                let r = mann_whitney(&lengths(&members[0].table)?, &lengths(&members[1].table)?)?;
                Ok((r, None, None))
            }
            ComparisonKind::VowelContingency => {
                let profiles: Vec<&OrthoProfile> = members.iter().map(|l| &l.profile).collect();
                let table = vowel_table(&profiles, c.normalize)?;
                let mut r = chi_square_independence(&table)?;
                if c.normalize == Normalize::Percent {
                    r.notes.push("rows normalised to percentages".into());
                }
                Ok((r, None, Some(table)))
            }
        }
    };
    match run() {
        Ok((r, plan, table)) => {
            out.result = Some(r);
            out.plan = plan;
            out.table = table;
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

/// Profile every corpus named in `spec` (in parallel) and run each
/// comparison. Spec or manifest problems are errors; a failing comparison
/// is recorded in its own slot.
pub fn compare_command(
    manifest: &CorpusManifest,
    spec: &ComparisonSpec,
    policy: &TokenizationPolicy,
    seed: u64,
    exclude_numeric: bool,
) -> Result<ComparisonReport> {
    spec.validate(manifest)?;
    policy.validate()?;
    let ids = spec.all_corpora();

    let results: Vec<(String, Result<Loaded>)> = ids
        .par_iter()
        .map(|id| {
            let loaded = manifest.entry(id)
                .and_then(|e| load_table(e, policy))
                .and_then(|table| {
                    let profile = profile(id, &table, policy, exclude_numeric)?;
                    Ok(Loaded { table, profile })
                });
            (id.clone(), loaded)
        })
        .collect();

    let mut profiles = Vec::new();
    let mut profile_errors = BTreeMap::new();
    for (id, r) in &results {
        match r {
            Ok(l) => profiles.push(l.profile.clone()),
            Err(e) => {
                profile_errors.insert(id.clone(), e.to_string());
            }
        }
    }
    let loaded: BTreeMap<String, Result<Loaded>> = results.into_iter().collect();

    let comparisons = spec
        .comparisons
        .iter()
        .map(|c| run_comparison(c, &loaded, spec.alpha, seed))
        .collect();

    let mut plot_series = emit_plot_series(&profiles, PlotKind::CumulativeLength, false);
    plot_series.extend(emit_plot_series(&profiles, PlotKind::VowelBars, false));

    Ok(ComparisonReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        timestamp: now(),
        policy_snapshot: policy.clone(),
        alpha: spec.alpha,
        seed,
        exclude_numeric,
        profiles,
        profile_errors,
        comparisons,
        plot_series,
    })
}

/// Profiles for the `plot` subcommand.
pub fn load_profiles(
    manifest: &CorpusManifest,
    ids: &[String],
    policy: &TokenizationPolicy,
) -> Result<Vec<OrthoProfile>> {
    ids.par_iter()
        .map(|id| {
            let table = load_table(manifest.entry(id)?, policy)?;
            profile(id, &table, policy, false)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenize::tokenize_text;

    fn prof(id: &str, text: &str) -> OrthoProfile {
        let policy = TokenizationPolicy::default();
        profile(id, &tokenize_text(text, &policy).unwrap(), &policy, false).unwrap()
    }

    #[test]
    fn vowel_bars_sum_to_one() {
        let s = vowel_series(&prof("z", "aba ebe ibi obo ubu aka"));
        let total: f64 = s.points.iter().map(|p| p.y).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(s.points.len(), 5);
    }

    #[test]
    fn single_token_single_point() {
        let s = cumulative_series(&prof("one", "word"), false);
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0].y, 1.0);
    }

    #[test]
    fn cumulative_x_strictly_increasing_and_ends_at_total() {
        let p = prof("t", "a bb ccc bb a dddd");
        let s = cumulative_series(&p, false);
        assert!(s.points.windows(2).all(|w| w[0].x < w[1].x));
        assert_eq!(s.points.last().unwrap().y, p.token_count as f64);
        let r = cumulative_series(&p, true);
        assert_eq!(r.points.last().unwrap().y, 1.0);
    }

    #[test]
    fn plot_csv_layout() {
        let series = vec![vowel_series(&prof("z", "aba"))];
        let mut buf = Vec::new();
        write_plot_csv(&series, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains('\r'));
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("series_id,kind,x,label,y"));
        assert_eq!(lines.next(), Some("z,vowel-bars,0,a,1"));
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn spec_parsing_and_keys() {
        let spec = ComparisonSpec::from_json(
            r#"{"corpus_ids": ["a"], "comparisons": [
                {"kind": "vowel-contingency", "members": ["a", "b"]},
                {"kind": "pairwise-length", "members": ["b", "c"], "normalize": "counts"}
            ]}"#,
        )
        .unwrap();
        assert_eq!(spec.alpha, DEFAULT_ALPHA);
        assert_eq!(spec.comparisons[0].normalize, Normalize::Percent);
        assert_eq!(spec.comparisons[0].key(), "vowel-contingency:a,b");
        assert_eq!(spec.all_corpora(), vec!["a", "b", "c"]);
        let counts = Comparison {
            normalize: Normalize::Counts,
            ..spec.comparisons[0].clone()
        };
        assert_eq!(counts.key(), "vowel-contingency:a,b;counts");
        assert!(ComparisonSpec::from_json(r#"{"comparisons": [{"kind": "t-test", "members": []}]}"#).is_err());
    }

    #[test]
    fn vowel_table_percent_rows() {
        let a = prof("a", "ka ka ke");
        let b = prof("b", "ko ku");
        let t = vowel_table(&[&a, &b], Normalize::Percent).unwrap();
        for row in &t.counts {
            assert!((row.iter().sum::<f64>() - 100.0).abs() < 1e-9);
        }
        let raw = vowel_table(&[&a, &b], Normalize::Counts).unwrap();
        assert_eq!(raw.counts[0], vec![2.0, 1.0, 0.0, 0.0, 0.0]);
    }
}

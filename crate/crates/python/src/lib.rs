//! Python bindings: tokenization, profiles, the hypothesis tests and the
//! calibrated type-token ratio.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use orthosim::calib::{self, parse_lemma_map};
use orthosim::ingest::{self, CorpusManifest};
use orthosim::ortho::{self, OrthoProfile};
use orthosim::report::{self, ComparisonSpec};
use orthosim::stats::{self, ContingencyTable, Sample};
use orthosim::tokenize::{self, CaseMode, SplitMode, TokenizationPolicy};

create_exception!(orthosim_py, OrthosimError, PyValueError);

fn err(e: orthosim::Error) -> PyErr {
    OrthosimError::new_err(e.to_string())
}

fn sample(values: Vec<f64>) -> PyResult<Sample> {
    Sample::new(values).map_err(err)
}

fn policy_or_default(policy: Option<PyRef<'_, Policy>>) -> TokenizationPolicy {
    policy.map(|p| p.inner.clone()).unwrap_or_default()
}

fn case_mode(value: &str) -> PyResult<CaseMode> {
    match value {
        "preserve" => Ok(CaseMode::Preserve),
        "fold-lower" => Ok(CaseMode::FoldLower),
        _ => Err(OrthosimError::new_err(format!("unknown case_mode `{value}`"))),
    }
}

fn split_mode(value: &str) -> PyResult<SplitMode> {
    match value {
        "whitespace" => Ok(SplitMode::Whitespace),
        "word-punct" => Ok(SplitMode::WordPunct),
        _ => Err(OrthosimError::new_err(format!("unknown split_mode `{value}`"))),
    }
}

/// How text is split into tokens.
#[pyclass(name = "Policy", frozen)]
struct Policy {
    inner: TokenizationPolicy,
}

#[pymethods]
impl Policy {
    #[new]
    #[pyo3(signature = (case_mode="preserve", split_mode="whitespace", strip_edge_punctuation=true, keep_numeric_tokens=true))]
    fn new(
        case_mode: &str,
        split_mode: &str,
        strip_edge_punctuation: bool,
        keep_numeric_tokens: bool,
    ) -> PyResult<Self> {
        let inner = TokenizationPolicy {
            case_mode: self::case_mode(case_mode)?,
            split_mode: self::split_mode(split_mode)?,
            strip_edge_punctuation,
            keep_numeric_tokens,
            ..Default::default()
        };
        inner.validate().map_err(err)?;
        Ok(Policy { inner })
    }

    /// Word/punctuation runs, nothing stripped: the splitter behind the UDHR figures.
    #[staticmethod]
    fn word_punct() -> Self {
        Policy {
            inner: TokenizationPolicy::nltk_word_punct(),
        }
    }

    #[staticmethod]
    fn from_json(json: &str) -> PyResult<Self> {
        Ok(Policy {
            inner: TokenizationPolicy::from_json(json).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!("Policy({})", self.inner.to_json())
    }
}

#[pyclass(name = "TokenTable", frozen)]
struct PyTokenTable {
    inner: tokenize::TokenTable,
}

#[pymethods]
impl PyTokenTable {
    #[getter]
    fn token_count(&self) -> usize {
        self.inner.token_count
    }

    #[getter]
    fn type_count(&self) -> usize {
        self.inner.type_count
    }

    fn surfaces(&self) -> Vec<String> {
        self.inner.surfaces().map(str::to_string).collect()
    }

    fn lengths(&self) -> Vec<f64> {
        self.inner.lengths()
    }

    fn types(&self) -> BTreeMap<String, usize> {
        self.inner.types.clone()
    }

    fn frequency(&self, type_string: &str) -> usize {
        tokenize::type_frequency(&self.inner, type_string)
    }

    fn __len__(&self) -> usize {
        self.inner.token_count
    }

    fn __repr__(&self) -> String {
        format!(
            "TokenTable(tokens={}, types={})",
            self.inner.token_count, self.inner.type_count
        )
    }
}

#[pyclass(name = "Profile", frozen)]
struct PyProfile {
    inner: OrthoProfile,
}

#[pymethods]
impl PyProfile {
    #[getter]
    fn corpus_id(&self) -> &str {
        &self.inner.corpus_id
    }

    #[getter]
    fn token_count(&self) -> usize {
        self.inner.token_count
    }

    #[getter]
    fn type_count(&self) -> usize {
        self.inner.type_count
    }

    #[getter]
    fn lexical_diversity(&self) -> f64 {
        self.inner.lexical_diversity
    }

    #[getter]
    fn pct_final_vowel(&self) -> f64 {
        self.inner.vowel_stats.pct_final_vowel
    }

    #[getter]
    fn consecutive_vowel_tokens(&self) -> usize {
        self.inner.vowel_stats.consecutive_vowel_tokens
    }

    #[getter]
    fn per_vowel(&self) -> BTreeMap<char, usize> {
        self.inner.vowel_stats.per_vowel.clone()
    }

    #[getter]
    fn length_counts(&self) -> BTreeMap<usize, usize> {
        self.inner.length_dist.counts.clone()
    }

    #[getter]
    fn cumulative(&self) -> BTreeMap<usize, usize> {
        self.inner.length_dist.cumulative.clone()
    }

    /// Case-insensitive count of `ch` over all tokens.
    fn char_incidence(&self, ch: char) -> usize {
        self.inner
            .char_incidence
            .get(&ortho::fold_char(ch))
            .copied()
            .unwrap_or(0)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("profile serializes")
    }

    fn __repr__(&self) -> String {
        format!(
            "Profile({:?}, tokens={}, ttr={:.4})",
            self.inner.corpus_id, self.inner.token_count, self.inner.lexical_diversity
        )
    }
}

#[pyclass(name = "TestResult", frozen)]
struct PyTestResult {
    inner: stats::TestResult,
}

#[pymethods]
impl PyTestResult {
    #[getter]
    fn method(&self) -> &'static str {
        match self.inner.method {
            stats::Method::ShapiroWilk => "shapiro-wilk",
            stats::Method::KruskalWallis => "kruskal-wallis",
            stats::Method::MannWhitney => "mann-whitney",
            stats::Method::ChiSquare => "chi-square",
        }
    }

    #[getter]
    fn statistic(&self) -> f64 {
        self.inner.statistic
    }

    #[getter]
    fn df(&self) -> Option<usize> {
        self.inner.df
    }

    #[getter]
    fn p_value(&self) -> f64 {
        self.inner.p_value
    }

    #[getter]
    fn n_per_group(&self) -> Vec<usize> {
        self.inner.n_per_group.clone()
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.inner.notes.clone()
    }

    #[getter]
    fn seed(&self) -> Option<u64> {
        self.inner.seed
    }

    #[pyo3(signature = (alpha=0.05))]
    fn rejects(&self, alpha: f64) -> bool {
        self.inner.rejects(alpha)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("result serializes")
    }

    fn __repr__(&self) -> String {
        format!(
            "TestResult({}, statistic={:.6}, df={:?}, p={:.6e})",
            self.method(),
            self.inner.statistic,
            self.inner.df,
            self.inner.p_value
        )
    }
}

fn wrap(r: stats::TestResult) -> PyTestResult {
    PyTestResult { inner: r }
}

#[pyclass(name = "CalibrationFactors", frozen)]
struct PyCalibrationFactors {
    inner: calib::CalibrationFactors,
}

#[pymethods]
impl PyCalibrationFactors {
    #[new]
    fn new(lambda_theta: f64, lambda_t: f64) -> PyResult<Self> {
        Ok(PyCalibrationFactors {
            inner: calib::CalibrationFactors::new(lambda_theta, lambda_t).map_err(err)?,
        })
    }

    #[getter]
    fn lambda_t(&self) -> f64 {
        self.inner.lambda_t
    }

    #[getter]
    fn lambda_theta(&self) -> f64 {
        self.inner.lambda_theta
    }

    #[getter]
    fn groups_used(&self) -> usize {
        self.inner.groups_used
    }

    fn calibrated_ttr(&self, type_count: usize, token_count: usize) -> PyResult<f64> {
        calib::calibrated_ttr(&self.inner, type_count, token_count).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "CalibrationFactors(lambda_theta={}, lambda_t={})",
            self.inner.lambda_theta, self.inner.lambda_t
        )
    }
}

#[pyclass(name = "Manifest", frozen)]
struct PyManifest {
    inner: CorpusManifest,
}

#[pymethods]
impl PyManifest {
    fn ids(&self) -> Vec<String> {
        self.inner.ids().map(str::to_string).collect()
    }

    /// Read and tokenize one corpus.
    #[pyo3(signature = (corpus_id, policy=None))]
    fn table(&self, corpus_id: &str, policy: Option<PyRef<'_, Policy>>) -> PyResult<PyTokenTable> {
        let entry = self.inner.entry(corpus_id).map_err(err)?;
        let inner = report::load_table(entry, &policy_or_default(policy)).map_err(err)?;
        Ok(PyTokenTable { inner })
    }

    /// Run a comparison spec (JSON text); returns the report as JSON.
    #[pyo3(signature = (spec_json, policy=None, seed=0, exclude_numeric=false))]
    fn compare(
        &self,
        spec_json: &str,
        policy: Option<PyRef<'_, Policy>>,
        seed: u64,
        exclude_numeric: bool,
    ) -> PyResult<String> {
        let spec = ComparisonSpec::from_json(spec_json).map_err(err)?;
        let r = report::compare_command(&self.inner, &spec, &policy_or_default(policy), seed, exclude_numeric)
            .map_err(err)?;
        Ok(r.to_json())
    }
}

#[pyfunction]
fn load_manifest(path: &str) -> PyResult<PyManifest> {
    Ok(PyManifest {
        inner: ingest::load_manifest(path).map_err(err)?,
    })
}

#[pyfunction(name = "tokenize")]
#[pyo3(signature = (text, policy=None))]
fn tokenize_py(text: &str, policy: Option<PyRef<'_, Policy>>) -> PyResult<PyTokenTable> {
    let inner = tokenize::tokenize_text(text, &policy_or_default(policy)).map_err(err)?;
    Ok(PyTokenTable { inner })
}

#[pyfunction(name = "profile")]
#[pyo3(signature = (table, corpus_id="corpus", policy=None, exclude_numeric=false))]
fn profile_py(
    table: PyRef<'_, PyTokenTable>,
    corpus_id: &str,
    policy: Option<PyRef<'_, Policy>>,
    exclude_numeric: bool,
) -> PyResult<PyProfile> {
    let inner = ortho::profile(corpus_id, &table.inner, &policy_or_default(policy), exclude_numeric)
        .map_err(err)?;
    Ok(PyProfile { inner })
}

#[pyfunction]
fn shapiro_wilk(values: Vec<f64>) -> PyResult<PyTestResult> {
    stats::shapiro_wilk(&sample(values)?).map(wrap).map_err(err)
}

#[pyfunction]
fn kruskal_wallis(groups: Vec<Vec<f64>>) -> PyResult<PyTestResult> {
    let groups = groups.into_iter().map(sample).collect::<PyResult<Vec<_>>>()?;
    stats::kruskal_wallis(&groups).map(wrap).map_err(err)
}

#[pyfunction]
fn mann_whitney(a: Vec<f64>, b: Vec<f64>) -> PyResult<PyTestResult> {
    stats::mann_whitney(&sample(a)?, &sample(b)?).map(wrap).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (counts, row_labels=None, col_labels=None))]
fn chi_square_independence(
    counts: Vec<Vec<f64>>,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
) -> PyResult<PyTestResult> {
    let r = counts.len();
    let c = counts.first().map_or(0, Vec::len);
    let rows = row_labels.unwrap_or_else(|| (0..r).map(|i| format!("r{i}")).collect());
    let cols = col_labels.unwrap_or_else(|| (0..c).map(|j| format!("c{j}")).collect());
    let table = ContingencyTable::new(counts, rows, cols).map_err(err)?;
    stats::chi_square_independence(&table).map(wrap).map_err(err)
}

#[pyfunction]
fn chi_square_sf(x: f64, df: usize) -> PyResult<f64> {
    if df == 0 {
        return Err(OrthosimError::new_err("df must be at least 1"));
    }
    Ok(stats::chi_square_sf(x, df))
}

/// Returns (branch, test, normality results).
#[pyfunction]
#[pyo3(signature = (groups, alpha=0.05, seed=0))]
fn choose_tests(
    groups: Vec<Vec<f64>>,
    alpha: f64,
    seed: u64,
) -> PyResult<(String, PyTestResult, Vec<PyTestResult>)> {
    let groups = groups.into_iter().map(sample).collect::<PyResult<Vec<_>>>()?;
    let plan = stats::choose_tests(&groups, alpha, seed).map_err(err)?;
    let branch = match plan.branch {
        stats::Branch::Parametric => "parametric",
        stats::Branch::Nonparametric => "nonparametric",
    };
    Ok((
        branch.to_string(),
        wrap(plan.test),
        plan.normality.into_iter().map(wrap).collect(),
    ))
}

/// Estimate λ_θ and λ_t from a lemma-map TSV resolved against `table`.
#[pyfunction]
fn calibration_factors(lemma_map: &str, table: PyRef<'_, PyTokenTable>) -> PyResult<PyCalibrationFactors> {
    let map = parse_lemma_map(lemma_map, &table.inner, "python").map_err(err)?;
    Ok(PyCalibrationFactors {
        inner: calib::calibration_factors(&map).map_err(err)?,
    })
}

#[pyfunction]
fn calibrated_ttr(lambda_theta: f64, lambda_t: f64, type_count: usize, token_count: usize) -> PyResult<f64> {
    let f = calib::CalibrationFactors::new(lambda_theta, lambda_t).map_err(err)?;
    calib::calibrated_ttr(&f, type_count, token_count).map_err(err)
}

#[pymodule]
fn orthosim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("OrthosimError", m.py().get_type::<OrthosimError>())?;
    m.add_class::<Policy>()?;
    m.add_class::<PyTokenTable>()?;
    m.add_class::<PyProfile>()?;
    m.add_class::<PyTestResult>()?;
    m.add_class::<PyCalibrationFactors>()?;
    m.add_class::<PyManifest>()?;
    m.add_function(wrap_pyfunction!(load_manifest, m)?)?;
    m.add_function(wrap_pyfunction!(tokenize_py, m)?)?;
    m.add_function(wrap_pyfunction!(profile_py, m)?)?;
    m.add_function(wrap_pyfunction!(shapiro_wilk, m)?)?;
    m.add_function(wrap_pyfunction!(kruskal_wallis, m)?)?;
    m.add_function(wrap_pyfunction!(mann_whitney, m)?)?;
    m.add_function(wrap_pyfunction!(chi_square_independence, m)?)?;
    m.add_function(wrap_pyfunction!(chi_square_sf, m)?)?;
    m.add_function(wrap_pyfunction!(choose_tests, m)?)?;
    m.add_function(wrap_pyfunction!(calibration_factors, m)?)?;
    m.add_function(wrap_pyfunction!(calibrated_ttr, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

//! Hypothesis tests for comparing corpora: Shapiro-Wilk normality,
//! Kruskal-Wallis, Mann-Whitney U and the χ² test of independence, plus the
//! normality-gated choice between them.

mod chisq;
mod kruskal;
mod mann_whitney;
mod plan;
pub mod rank;
mod shapiro;
pub mod special;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chisq::{chi_square_independence, ContingencyTable};
pub use kruskal::kruskal_wallis;
pub use mann_whitney::{mann_whitney, u_statistics};
pub use plan::{choose_tests, subsample, Branch, TestPlan, SHAPIRO_MAX_N};
pub use shapiro::{shapiro_wilk, shapiro_wilk_w};
pub use special::{chi_square_cdf, chi_square_sf};

/// A non-empty vector of finite observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Sample(Vec<f64>);

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SampleTooSmall { min: 1, got: 0 });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Sample(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Sample::new(values)
    }
}

impl From<Sample> for Vec<f64> {
    fn from(s: Sample) -> Self {
        s.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ShapiroWilk,
    KruskalWallis,
    MannWhitney,
    ChiSquare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    pub statistic: f64,
    pub df: Option<usize>,
    pub p_value: f64,
    pub n_per_group: Vec<usize>,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl TestResult {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

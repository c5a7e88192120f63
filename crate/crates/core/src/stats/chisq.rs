use serde::{Deserialize, Serialize};

use super::special::chi_square_sf;
use super::{Method, TestResult};
use crate::error::{Error, Result};

/// An r×c table of non-negative weights. Cells are reals so that a table of
/// row percentages can be tested the same way as raw counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<f64>>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl ContingencyTable {
    pub fn new(
        counts: Vec<Vec<f64>>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self> {
        let r = counts.len();
        if r < 2 {
            return Err(Error::InvalidTable(format!("need at least 2 rows, got {r}")));
        }
        let c = counts[0].len();
        if c < 2 {
            return Err(Error::InvalidTable(format!("need at least 2 columns, got {c}")));
        }
        if let Some(i) = counts.iter().position(|row| row.len() != c) {
            return Err(Error::InvalidTable(format!(
                "row {i} has {} cells, expected {c}",
                counts[i].len()
            )));
        }
        if counts.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidTable("cells must be finite and non-negative".into()));
        }
        if row_labels.len() != r || col_labels.len() != c {
            return Err(Error::InvalidTable(format!(
                "labels are {}×{} but the table is {r}×{c}",
                row_labels.len(),
                col_labels.len()
            )));
        }
        Ok(ContingencyTable {
            counts,
            row_labels,
            col_labels,
        })
    }

    /// Integer counts with generated labels (`r0`, `c0`, ...).
    pub fn from_counts(counts: &[Vec<u64>]) -> Result<Self> {
        let r = counts.len();
        let c = counts.first().map_or(0, Vec::len);
        ContingencyTable::new(
            counts
                .iter()
                .map(|row| row.iter().map(|&v| v as f64).collect())
                .collect(),
            (0..r).map(|i| format!("r{i}")).collect(),
            (0..c).map(|j| format!("c{j}")).collect(),
        )
    }

    /// Each row rescaled to sum to `scale` (rows summing to zero are left alone).
    pub fn normalized_rows(&self, scale: f64) -> Self {
        let counts = self
            .counts
            .iter()
            .map(|row| {
                let total: f64 = row.iter().sum();
                if total > 0.0 {
                    row.iter().map(|v| v * scale / total).collect()
                } else {
                    row.clone()
                }
            })
            .collect();
        ContingencyTable {
            counts,
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
        }
    }

    pub fn rows(&self) -> usize {
        self.counts.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }
}

/// Pearson's χ² test of independence, no continuity correction.
pub fn chi_square_independence(t: &ContingencyTable) -> Result<TestResult> {
    let row_totals: Vec<f64> = t.counts.iter().map(|r| r.iter().sum()).collect();
    let col_totals: Vec<f64> = (0..t.cols())
        .map(|j| t.counts.iter().map(|r| r[j]).sum())
        .collect();
    if let Some(i) = row_totals.iter().position(|&v| v <= 0.0) {
        return Err(Error::ZeroMarginal {
            axis: "row",
            label: t.row_labels[i].clone(),
        });
    }
    if let Some(j) = col_totals.iter().position(|&v| v <= 0.0) {
        return Err(Error::ZeroMarginal {
            axis: "column",
            label: t.col_labels[j].clone(),
        });
    }
    let grand: f64 = row_totals.iter().sum();

    let mut stat = 0.0;
    for (i, row) in t.counts.iter().enumerate() {
        for (j, &observed) in row.iter().enumerate() {
            let expected = row_totals[i] * col_totals[j] / grand;
            stat += (observed - expected).powi(2) / expected;
        }
    }
    let df = (t.rows() - 1) * (t.cols() - 1);
    Ok(TestResult {
        method: Method::ChiSquare,
        statistic: stat,
        df: Some(df),
        p_value: chi_square_sf(stat, df),
        n_per_group: row_totals.iter().map(|v| v.round() as usize).collect(),
        notes: Vec::new(),
        seed: None,
    })
}

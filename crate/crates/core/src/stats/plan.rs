use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::shapiro::{shapiro_wilk, MAX_N};
use super::{kruskal_wallis, mann_whitney, Sample, TestResult};
use crate::error::{Error, Result};

/// Largest sample handed to Shapiro-Wilk; bigger groups are subsampled.
pub const SHAPIRO_MAX_N: usize = MAX_N;

/// A uniform random subset of `size` values, order preserved, reproducible
/// from `seed`. Returns the sample unchanged when it is already small enough.
pub fn subsample(s: &Sample, size: usize, seed: u64) -> Sample {
    if s.len() <= size {
        return s.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, s.len(), size).into_vec();
    picked.sort_unstable();
    let values = picked.into_iter().map(|i| s.values()[i]).collect();
    Sample::new(values).expect("subset of a valid sample is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Every group looked normal; a parametric test would apply.
    Parametric,
    Nonparametric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestPlan {
    pub normality: Vec<TestResult>,
    pub branch: Branch,
    /// Always the rank-based test: Kruskal-Wallis for k > 2, Mann-Whitney for k = 2.
    pub test: TestResult,
    pub seed: u64,
    pub alpha: f64,
}

/// Gate on per-group normality, then run the rank-based comparison.
pub fn choose_tests(groups: &[Sample], alpha: f64, seed: u64) -> Result<TestPlan> {
    if groups.len() < 2 {
        return Err(Error::TooFewGroups {
            min: 2,
            got: groups.len(),
        });
    }
    let mut normality = Vec::with_capacity(groups.len());
    for (i, g) in groups.iter().enumerate() {
        let group_seed = seed.wrapping_add(i as u64);
        let mut r = if g.len() > SHAPIRO_MAX_N {
            let mut r = shapiro_wilk(&subsample(g, SHAPIRO_MAX_N, group_seed))?;
            r.seed = Some(group_seed);
            r.notes.push(format!(
                "subsampled {SHAPIRO_MAX_N} of {} values",
                g.len()
            ));
            r
        } else {
            shapiro_wilk(g)?
        };
        r.n_per_group = vec![g.len()];
        normality.push(r);
    }

    let branch = if normality.iter().any(|r| r.rejects(alpha)) {
        Branch::Nonparametric
    } else {
        Branch::Parametric
    };
    let mut test = if groups.len() == 2 {
        mann_whitney(&groups[0], &groups[1])?
    } else {
        kruskal_wallis(groups)?
    };
    if branch == Branch::Parametric {
        test.notes
            .push("no group rejected normality; a parametric test would also apply".into());
    }
    Ok(TestPlan {
        normality,
        branch,
        test,
        seed,
        alpha,
    })
}

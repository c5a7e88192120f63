use super::rank::midranks;
use super::special::chi_square_sf;
use super::{Method, Sample, TestResult};
use crate::error::{Error, Result};

/// Kruskal-Wallis H on mid-ranks, divided by the tie correction
/// 1 − Σ(t³ − t)/(N³ − N). The p-value is the χ² tail with k − 1 df.
pub fn kruskal_wallis(groups: &[Sample]) -> Result<TestResult> {
    let k = groups.len();
    if k < 2 {
        return Err(Error::TooFewGroups { min: 2, got: k });
    }
    let sizes: Vec<usize> = groups.iter().map(Sample::len).collect();
    let n_total: usize = sizes.iter().sum();
    if n_total < k + 1 {
        return Err(Error::SampleTooSmall {
            min: k + 1,
            got: n_total,
        });
    }

    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.values().iter().copied()).collect();
    let (ranks, tie_term) = midranks(&pooled);
    let n = n_total as f64;
    let correction = 1.0 - tie_term / (n * n * n - n);
    if correction <= 0.0 {
        return Err(Error::AllValuesTied);
    }

    let mut offset = 0;
    let mut sum_sq = 0.0;
    for &size in &sizes {
        let r: f64 = ranks[offset..offset + size].iter().sum();
        sum_sq += r * r / size as f64;
        offset += size;
    }
    let h = 12.0 / (n * (n + 1.0)) * sum_sq - 3.0 * (n + 1.0);
    let h_corrected = (h / correction).max(0.0);

    let mut notes = Vec::new();
    if tie_term > 0.0 {
        notes.push(format!("tie correction applied (factor {correction:.6})"));
    }
    Ok(TestResult {
        method: Method::KruskalWallis,
        statistic: h_corrected,
        df: Some(k - 1),
        p_value: chi_square_sf(h_corrected, k - 1),
        n_per_group: sizes,
        notes,
        seed: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn groups(gs: &[&[f64]]) -> Vec<Sample> {
        gs.iter().map(|g| Sample::new(g.to_vec()).unwrap()).collect()
    }

    #[test]
    fn identical_groups_give_zero() {
        let g: &[f64] = &[1.0, 2.0, 3.0];
        let r = kruskal_wallis(&groups(&[g, g, g])).unwrap();
        assert_abs_diff_eq!(r.statistic, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.p_value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn separated_pairs_hand_ranked() {
        // ranks 1..6, rank sums 3, 7, 11: H = 12/42 · (9+49+121)/2 − 21 = 32/7
        let r = kruskal_wallis(&groups(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]])).unwrap();
        assert_abs_diff_eq!(r.statistic, 32.0 / 7.0, epsilon = 1e-12);
        assert_eq!(r.df, Some(2));
        assert!(r.notes.is_empty());
    }

    #[test]
    fn error_paths() {
        assert!(matches!(
            kruskal_wallis(&groups(&[&[1.0, 2.0]])),
            Err(Error::TooFewGroups { .. })
        ));
        assert!(matches!(
            kruskal_wallis(&groups(&[&[4.0, 4.0], &[4.0]])),
            Err(Error::AllValuesTied)
        ));
        assert!(matches!(
            kruskal_wallis(&groups(&[&[1.0], &[2.0]])),
            Err(Error::SampleTooSmall { min: 3, got: 2 })
        ));
    }

    #[test]
    fn tie_correction_noted() {
        let r = kruskal_wallis(&groups(&[&[1.0, 2.0, 2.0], &[3.0, 3.0, 4.0]])).unwrap();
        assert_eq!(r.notes.len(), 1);
        // scipy.stats.kruskal on the same groups
        assert_abs_diff_eq!(r.statistic, 4.090_909_090_909, epsilon = 1e-9);
        assert_abs_diff_eq!(r.p_value, 0.043_114_446_78, epsilon = 1e-9);
    }
}

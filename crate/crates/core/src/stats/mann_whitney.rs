use super::rank::midranks;
use super::special::normal_sf;
use super::{Method, Sample, TestResult};
use crate::error::{Error, Result};

const SMALL_N: usize = 20;

/// (U_a, U_b) from mid-ranks; U_a + U_b = n_a · n_b.
pub fn u_statistics(a: &Sample, b: &Sample) -> (f64, f64) {
    let pooled: Vec<f64> = a.values().iter().chain(b.values()).copied().collect();
    let (ranks, _) = midranks(&pooled);
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let rank_sum_a: f64 = ranks[..a.len()].iter().sum();
    let ua = rank_sum_a - na * (na + 1.0) / 2.0;
    (ua, na * nb - ua)
}

/// Two-sided Mann-Whitney U test. Normal approximation with tie-corrected
/// variance and a 0.5 continuity correction.
pub fn mann_whitney(a: &Sample, b: &Sample) -> Result<TestResult> {
    let pooled: Vec<f64> = a.values().iter().chain(b.values()).copied().collect();
    let (_, tie_term) = midranks(&pooled);
    let (ua, ub) = u_statistics(a, b);
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let n = na + nb;

    let variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if n < 2.0 || variance <= 0.0 {
        return Err(Error::AllValuesTied);
    }
    let u = ua.min(ub);
    let mean = na * nb / 2.0;
    let z = ((u - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    let p = (2.0 * normal_sf(z)).min(1.0);

    let mut notes = Vec::new();
    if tie_term > 0.0 {
        notes.push("tie-corrected variance".to_string());
    }
    if a.len() < SMALL_N || b.len() < SMALL_N {
        notes.push(format!(
            "normal approximation with a group smaller than {SMALL_N}; p-value is approximate"
        ));
    }
    Ok(TestResult {
        method: Method::MannWhitney,
        statistic: u,
        df: None,
        p_value: p,
        n_per_group: vec![a.len(), b.len()],
        notes,
        seed: None,
    })
}

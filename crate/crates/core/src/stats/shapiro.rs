//! Shapiro-Wilk W test with Royston's approximations (algorithm AS R94):
//! polynomial-corrected coefficients from normal scores, and a normalizing
//! transform of W for the p-value.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::special::{normal_quantile, normal_sf};
use super::{Method, Sample, TestResult};
use crate::error::{Error, Result};

pub const MIN_N: usize = 3;
pub const MAX_N: usize = 5000;

const C1: [f64; 6] = [0.0, 0.221_157, -0.147_981, -2.071_190, 4.434_685, -2.706_056];
const C2: [f64; 6] = [0.0, 0.042_981, -0.293_762, -1.752_461, 5.682_633, -3.582_633];
const C3: [f64; 4] = [0.5440, -0.399_78, 0.025_054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.778_57, 0.062_767, -0.002_032_2];
const C5: [f64; 4] = [-1.5861, -0.310_82, -0.083_751, 0.003_891_5];
const C6: [f64; 3] = [-0.4803, -0.082_676, 0.003_030_2];
const G: [f64; 2] = [-2.273, 0.459];

/// c[0] + c[1]·x + c[2]·x² + ...
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Coefficients a_1..a_{n/2} for the lower half of the order statistics
/// (the upper half is antisymmetric).
fn coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return vec![FRAC_1_SQRT_2];
    }
    let an25 = n as f64 + 0.25;
    let m: Vec<f64> = (1..=half)
        .map(|i| normal_quantile((i as f64 - 0.375) / an25))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / (n as f64).sqrt();

    let mut a = vec![0.0; half];
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;
    let (first_free, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        a[1] = a2;
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    a[0] = a1;
    for i in first_free..half {
        a[i] = -m[i] / fac;
    }
    a
}

fn validate(s: &Sample) -> Result<Vec<f64>> {
    let n = s.len();
    if n < MIN_N {
        return Err(Error::SampleTooSmall { min: MIN_N, got: n });
    }
    if n > MAX_N {
        return Err(Error::SampleTooLarge { max: MAX_N, got: n });
    }
    let mut x = s.values().to_vec();
    x.sort_by(f64::total_cmp);
    if x[n - 1] - x[0] < 1e-19 * x[0].abs().max(1.0) {
        return Err(Error::ZeroVariance);
    }
    Ok(x)
}

fn w_of_sorted(x: &[f64]) -> f64 {
    let n = x.len();
    let a = coefficients(n);
    let mean = x.iter().sum::<f64>() / n as f64;
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    let num: f64 = a
        .iter()
        .enumerate()
        .map(|(i, ai)| ai * (x[n - 1 - i] - x[i]))
        .sum();
    (num * num / ss).min(1.0)
}

/// The W statistic alone.
pub fn shapiro_wilk_w(s: &Sample) -> Result<f64> {
    Ok(w_of_sorted(&validate(s)?))
}

fn p_value(w: f64, n: usize) -> f64 {
    if n == 3 {
        let p = 1.0 - 6.0 / PI * w.sqrt().acos();
        return p.clamp(0.0, 1.0);
    }
    let w1 = 1.0 - w;
    if w1 <= 0.0 {
        return 1.0;
    }
    let nf = n as f64;
    let y = w1.ln();
    let (z, m, s) = if n <= 11 {
        let gamma = poly(&G, nf);
        if y >= gamma {
            return 0.0;
        }
        (-(gamma - y).ln(), poly(&C3, nf), poly(&C4, nf).exp())
    } else {
        let ln_n = nf.ln();
        (y, poly(&C5, ln_n), poly(&C6, ln_n).exp())
    };
    normal_sf((z - m) / s).clamp(0.0, 1.0)
}

pub fn shapiro_wilk(s: &Sample) -> Result<TestResult> {
    let x = validate(s)?;
    let w = w_of_sorted(&x);
    Ok(TestResult {
        method: Method::ShapiroWilk,
        statistic: w,
        df: None,
        p_value: p_value(w, x.len()),
        n_per_group: vec![x.len()],
        notes: Vec::new(),
        seed: None,
    })
}

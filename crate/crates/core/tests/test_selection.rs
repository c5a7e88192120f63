mod common;

use orthosim::stats::{choose_tests, shapiro_wilk, Branch, Method, Sample};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

fn normal(n: usize, seed: u64) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Sample::new((0..n).map(|_| StandardNormal.sample(&mut rng)).collect()).unwrap()
}

fn exponential(n: usize, seed: u64) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = Exp::new(1.0).unwrap();
    Sample::new((0..n).map(|_| e.sample(&mut rng)).collect()).unwrap()
}

#[test]
fn normal_pairs_usually_take_the_parametric_branch() {
    let parametric = (0..100u64)
        .filter(|&i| {
            let plan = choose_tests(&[normal(200, 2 * i), normal(200, 2 * i + 1)], 0.05, i).unwrap();
            assert_eq!(plan.test.method, Method::MannWhitney);
            plan.branch == Branch::Parametric
        })
        .count();
    assert!(parametric >= 90, "{parametric}/100");
}

#[test]
fn skewed_pair_takes_the_rank_branch() {
    let plan = choose_tests(&[exponential(300, 1), exponential(300, 2)], 0.05, 0).unwrap();
    assert_eq!(plan.branch, Branch::Nonparametric);
    assert_eq!(plan.test.method, Method::MannWhitney);
    assert!(plan.test.notes.iter().all(|n| !n.contains("parametric test would")));
}

#[test]
fn udhr_lengths_are_not_normal() {
    let m = common::udhr();
    let groups: Vec<Sample> = ["zulu", "xhosa", "ndebele"]
        .iter()
        .map(|id| Sample::new(common::table(&m, id).lengths()).unwrap())
        .collect();
    let plan = choose_tests(&groups, 0.05, 0).unwrap();
    assert_eq!(plan.branch, Branch::Nonparametric);
    assert_eq!(plan.test.method, Method::KruskalWallis);
    assert!(plan.normality.iter().all(|r| r.p_value < 0.05));
}

#[test]
fn shapiro_p_values_in_unit_interval() {
    for seed in 0..30 {
        for s in [normal(3 + seed as usize, seed), exponential(40 + seed as usize * 50, seed)] {
            let r = shapiro_wilk(&s).unwrap();
            assert!((0.0..=1.0).contains(&r.p_value));
            assert!(r.statistic > 0.0 && r.statistic <= 1.0);
        }
    }
}

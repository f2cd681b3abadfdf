//! Independent reference implementations used by the property and
//! acceptance suites. None of these call into the library.

#![allow(dead_code)]

use num_rational::Ratio;

/// Largest `n` with at least `n` counts `>= n`, by direct scan over `n`.
pub fn brute_h(counts: &[u64]) -> u64 {
    let mut best = 0;
    for n in 1..=counts.len() as u64 {
        if counts.iter().filter(|&&c| c >= n).count() as u64 >= n {
            best = n;
        } else {
            break;
        }
    }
    best
}

pub type Q = Ratio<i64>;

/// Percentages given in tenths of a percent, as exact rationals.
pub fn tenths(v: i64) -> Q {
    Q::new(v, 10)
}

pub fn rational_s(p4: Q, p3: Q, p2: Q) -> Q {
    p4 + Q::new(3, 7) * p3 + Q::new(1, 7) * p2
}

pub fn rational_s_prime(p4: Q, p3: Q) -> Q {
    p4 + Q::new(1, 3) * p3
}

pub fn q_to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Textbook covariance over product of standard deviations.
pub fn naive_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (n - 1.0);
    let sx = (x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let sy = (y.iter().map(|b| (b - my).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    cov / (sx * sy)
}

/// Mid-rank of each value: one plus the number strictly below, plus half
/// of the other values equal to it.
pub fn naive_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let below = x.iter().filter(|&&w| w < v).count() as f64;
            let equal = x.iter().filter(|&&w| w == v).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn naive_spearman(x: &[f64], y: &[f64]) -> f64 {
    naive_pearson(&naive_ranks(x), &naive_ranks(y))
}

/// `1 - 6 sum d^2 / (n (n^2 - 1))`; only valid without ties.
pub fn spearman_d2(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (naive_ranks(x), naive_ranks(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

/// `Gamma((v+1)/2) / Gamma(v/2)` for integer `v >= 1`, by the recurrence
/// `c(v+2) = c(v) (v+1)/v`.
fn gamma_ratio(df: u32) -> f64 {
    let mut c = if df % 2 == 1 {
        1.0 / std::f64::consts::PI.sqrt()
    } else {
        std::f64::consts::PI.sqrt() / 2.0
    };
    let mut v = if df % 2 == 1 { 1 } else { 2 };
    while v < df {
        c *= (v as f64 + 1.0) / v as f64;
        v += 2;
    }
    c
}

fn t_density(x: f64, df: u32) -> f64 {
    let v = df as f64;
    gamma_ratio(df) / (v * std::f64::consts::PI).sqrt() * (1.0 + x * x / v).powf(-(v + 1.0) / 2.0)
}

/// Two-sided tail probability `P(|T| > |t|)` by composite Simpson
/// integration of the Student-t density over `[0, |t|]`.
pub fn t_two_sided_p(t: f64, df: u32) -> f64 {
    let b = t.abs();
    let steps = 20_000;
    let h = b / steps as f64;
    let mut acc = t_density(0.0, df) + t_density(b, df);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * t_density(i as f64 * h, df);
    }
    (1.0 - 2.0 * acc * h / 3.0).max(0.0)
}

/// Competition rank of each value (highest first) computed as one plus
/// the number of strictly larger values.
pub fn competition_ranks(values: &[(String, f64)]) -> Vec<(String, u32)> {
    values
        .iter()
        .map(|(k, v)| (k.clone(), 1 + values.iter().filter(|(_, w)| w > v).count() as u32))
        .collect()
}

#[test]
fn oracles_agree_on_small_cases() {
    assert_eq!(brute_h(&[10, 8, 5, 4, 3]), 4);
    assert_eq!(brute_h(&[]), 0);
    assert_eq!(rational_s(Q::from(0), Q::from(100), Q::from(0)), Q::new(300, 7));
    assert!((naive_pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 7.0]) - 0.9933992677987828).abs() < 1e-12);
    assert_eq!(naive_ranks(&[3.0, 1.0, 3.0]), vec![2.5, 1.0, 2.5]);
    // t = 1 with one degree of freedom is the Cauchy quartile.
    assert!((t_two_sided_p(1.0, 1) - 0.5).abs() < 1e-9);
    // t = 2 with two degrees of freedom: 1 - 2/sqrt(6).
    assert!((t_two_sided_p(2.0, 2) - (1.0 - 2.0 / 6f64.sqrt())).abs() < 1e-9);
}

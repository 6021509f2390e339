//! Nonparametric comparison of optimizer results.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal};

use crate::error::{Error, Result};

/// Largest effective sample for which the signed-rank null is enumerated exactly.
pub const EXACT_LIMIT: usize = 12;
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub mean: f64,
    pub std_dev: f64,
    pub minimum: f64,
    pub median: f64,
    pub maximum: f64,
}

pub fn summarize(sample: &[f64]) -> Result<SampleSummary> {
    if sample.is_empty() {
        return Err(Error::Stats("cannot summarize an empty sample".into()));
    }
    let n = sample.len();
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let std_dev = if n > 1 {
        (sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    Ok(SampleSummary {
        mean,
        std_dev,
        minimum: sorted[0],
        median,
        maximum: sorted[n - 1],
    })
}

/// Ranks starting at 1; tied values share their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Sizes of tie groups among `values`.
fn tie_groups(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.chunk_by(|a, b| a == b).map(<[f64]>::len).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Exact enumeration up to [`EXACT_LIMIT`] pairs, normal approximation beyond.
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedTestResult {
    /// min(W+, W-).
    pub statistic: f64,
    /// Rank sum of positive differences `a - b`.
    pub w_plus: f64,
    pub w_minus: f64,
    pub p_value: f64,
    pub n_effective: usize,
    pub significant_at_05: bool,
    pub exact: bool,
}

impl PairedTestResult {
    /// Whether the first sample tends to be lower (better, for minimization).
    pub fn first_is_better(&self) -> bool {
        self.w_plus < self.w_minus
    }
}

/// Two-sided Wilcoxon signed-rank test on paired samples.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<PairedTestResult> {
    wilcoxon_signed_rank_with(a, b, Method::Auto)
}

pub fn wilcoxon_signed_rank_with(a: &[f64], b: &[f64], method: Method) -> Result<PairedTestResult> {
    if a.len() != b.len() {
        return Err(Error::Stats(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Stats(
            "signed-rank test needs at least two pairs".into(),
        ));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::Stats("samples must be finite".into()));
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(PairedTestResult {
            statistic: 0.0,
            w_plus: 0.0,
            w_minus: 0.0,
            p_value: 1.0,
            n_effective: 0,
            significant_at_05: false,
            exact: true,
        });
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&magnitudes);
    let w_plus = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .fold(0.0, |acc, (_, r)| acc + r);
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;
    let exact = match method {
        Method::Exact => true,
        Method::Normal => false,
        Method::Auto => n <= EXACT_LIMIT,
    };
    let p_value = if exact {
        exact_p_value(&ranks, w_plus)
    } else {
        normal_p_value(n, &magnitudes, w_plus)
    };
    Ok(PairedTestResult {
        statistic: w_plus.min(w_minus),
        w_plus,
        w_minus,
        p_value,
        n_effective: n,
        significant_at_05: p_value < ALPHA,
        exact,
    })
}

/// Two-sided exact p-value: the share of the 2^n equally likely sign
/// assignments whose W+ is at least as far from its mean as the observed one.
///
/// Average ranks are half-integers, so the null distribution of 2·W+ is
/// accumulated over integers.
fn exact_p_value(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0u128; max + 1];
    counts[0] = 1;
    for &r in &doubled {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    let observed = (2.0 * w_plus).round() as i64;
    let centre2 = max as i64; // 2 * (2 * mean)
    let dev = (2 * observed - centre2).abs();
    let extreme: u128 = counts
        .iter()
        .enumerate()
        .filter(|(s, _)| (2 * *s as i64 - centre2).abs() >= dev)
        .map(|(_, c)| c)
        .sum();
    let all = 2f64.powi(ranks.len() as i32);
    (extreme as f64 / all).min(1.0)
}

/// Normal approximation with tie and continuity corrections.
fn normal_p_value(n: usize, magnitudes: &[f64], w_plus: f64) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let ties: f64 = tie_groups(magnitudes)
        .iter()
        .map(|&t| (t * t * t - t) as f64)
        .sum();
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::standard();
    (2.0 * (1.0 - normal.cdf(z))).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanTable {
    pub mean_ranks: Vec<f64>,
    pub blocks: usize,
    /// Tie-corrected Friedman chi-square.
    pub statistic: f64,
    pub p_value: f64,
    /// Iman-Davenport F transform of the statistic.
    pub iman_davenport: f64,
    pub iman_davenport_p_value: f64,
}

/// Rank algorithms (columns) within each block (row); rank 1 is the lowest value.
pub fn friedman_ranks(results: &[Vec<f64>]) -> Result<FriedmanTable> {
    let n = results.len();
    if n < 2 {
        return Err(Error::Stats(
            "Friedman ranking needs at least two blocks".into(),
        ));
    }
    let k = results[0].len();
    if k < 2 {
        return Err(Error::Stats(
            "Friedman ranking needs at least two algorithms".into(),
        ));
    }
    if let Some((i, row)) = results.iter().enumerate().find(|(_, r)| r.len() != k) {
        return Err(Error::Stats(format!(
            "ragged matrix: block {i} has {} entries, expected {k}",
            row.len()
        )));
    }
    let mut rank_sums = vec![0.0; k];
    let mut tie_term = 0.0;
    for row in results {
        for (sum, r) in rank_sums.iter_mut().zip(average_ranks(row)) {
            *sum += r;
        }
        tie_term += tie_groups(row)
            .iter()
            .map(|&t| (t * t * t - t) as f64)
            .sum::<f64>();
    }
    let (nf, kf) = (n as f64, k as f64);
    let mean_ranks: Vec<f64> = rank_sums.iter().map(|s| s / nf).collect();
    let numerator = 12.0 * rank_sums.iter().map(|s| s * s).sum::<f64>()
        - 3.0 * nf * nf * kf * (kf + 1.0).powi(2);
    let denominator = nf * kf * (kf + 1.0) - tie_term / (kf - 1.0);
    let statistic = if denominator > 1e-12 {
        (numerator / denominator).max(0.0)
    } else {
        0.0
    };
    let p_value = if statistic > 0.0 {
        1.0 - ChiSquared::new(kf - 1.0).expect("k >= 2").cdf(statistic)
    } else {
        1.0
    };
    let ceiling = nf * (kf - 1.0);
    let (iman_davenport, iman_davenport_p_value) = if statistic <= 0.0 {
        (0.0, 1.0)
    } else if statistic >= ceiling {
        (f64::INFINITY, 0.0)
    } else {
        let f = (nf - 1.0) * statistic / (ceiling - statistic);
        let dist = FisherSnedecor::new(kf - 1.0, (kf - 1.0) * (nf - 1.0))
            .expect("positive degrees of freedom");
        (f, 1.0 - dist.cdf(f))
    };
    Ok(FriedmanTable {
        mean_ranks,
        blocks: n,
        statistic,
        p_value,
        iman_davenport,
        iman_davenport_p_value,
    })
}

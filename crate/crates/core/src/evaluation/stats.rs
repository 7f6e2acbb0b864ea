use super::EvalError;
use serde::{Deserialize, Serialize};

/// Largest signed-rank sample (after dropping zeros) tested exactly.
pub const SIGNED_RANK_EXACT_MAX: usize = 25;
/// Largest combined rank-sum sample tested exactly.
pub const RANK_SUM_EXACT_MAX: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Full permutation distribution, ties included.
    Exact,
    /// Normal approximation with tie and continuity correction.
    Normal,
    /// Nothing to test; p = 1.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    /// W+ for the signed-rank test, the rank sum of the first sample for the
    /// rank-sum test.
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n2: Option<usize>,
    pub method: Method,
}

fn check_finite(xs: &[f64], what: &str) -> Result<(), EvalError> {
    match xs.iter().find(|x| !x.is_finite()) {
        Some(x) => Err(EvalError::Domain(format!(
            "{what} contains non-finite value {x}"
        ))),
        None => Ok(()),
    }
}

/// Ranks of `xs` (1-based, ties share their mean rank) doubled so they stay
/// integral, plus the tie group sizes.
pub(crate) fn doubled_midranks(xs: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0u64; xs.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j, mean (i+1+j)/2
        let r2 = (i + 1 + j) as u64;
        for &k in &order[i..j] {
            ranks[k] = r2;
        }
        ties.push(j - i);
        i = j;
    }
    (ranks, ties)
}

fn two_sided(lo: f64, hi: f64) -> f64 {
    (2.0 * lo.min(hi)).min(1.0)
}

fn normal_two_sided(dev: f64, var: f64) -> f64 {
    if !(var > 0.0) {
        return 1.0;
    }
    let z = ((dev.abs() - 0.5).max(0.0)) / var.sqrt();
    libm::erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

fn tie_term(ties: &[usize]) -> f64 {
    ties.iter().map(|&t| (t * t * t - t) as f64).sum()
}

/// Two-sided Wilcoxon signed-rank test on paired differences. Zero
/// differences are dropped before ranking.
pub fn wilcoxon_signed_rank(diffs: &[f64]) -> Result<TestResult, EvalError> {
    check_finite(diffs, "differences")?;
    let d: Vec<f64> = diffs.iter().copied().filter(|&x| x != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return Ok(TestResult {
            statistic: 0.0,
            p_value: 1.0,
            n: 0,
            n2: None,
            method: Method::Degenerate,
        });
    }
    let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let (r2, ties) = doubled_midranks(&abs);
    let w2: u64 = d
        .iter()
        .zip(&r2)
        .filter(|(x, _)| **x > 0.0)
        .map(|(_, r)| r)
        .sum();
    let statistic = w2 as f64 / 2.0;
    if n <= SIGNED_RANK_EXACT_MAX {
        let total: u64 = r2.iter().sum();
        let mut counts = vec![0u64; total as usize + 1];
        counts[0] = 1;
        let mut reach = 0usize;
        for &r in &r2 {
            let r = r as usize;
            for s in (0..=reach).rev() {
                if counts[s] > 0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let all = (1u64 << n) as f64;
        let w = w2 as usize;
        let lo = counts[..=w].iter().sum::<u64>() as f64 / all;
        let hi = counts[w..].iter().sum::<u64>() as f64 / all;
        return Ok(TestResult {
            statistic,
            p_value: two_sided(lo, hi),
            n,
            n2: None,
            method: Method::Exact,
        });
    }
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term(&ties) / 48.0;
    Ok(TestResult {
        statistic,
        p_value: normal_two_sided(statistic - mean, var),
        n,
        n2: None,
        method: Method::Normal,
    })
}

/// Two-sided Wilcoxon rank-sum test of two independent samples.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<TestResult, EvalError> {
    if a.is_empty() || b.is_empty() {
        return Err(EvalError::Domain(
            "rank-sum test needs two non-empty samples".into(),
        ));
    }
    check_finite(a, "first sample")?;
    check_finite(b, "second sample")?;
    let (n1, n2) = (a.len(), b.len());
    let all: Vec<f64> = a.iter().chain(b).copied().collect();
    let (r2, ties) = doubled_midranks(&all);
    let w2: u64 = r2[..n1].iter().sum();
    let statistic = w2 as f64 / 2.0;
    let big_n = n1 + n2;
    if big_n <= RANK_SUM_EXACT_MAX {
        // counts[k][s]: subsets of size k with doubled rank sum s
        let total: u64 = r2.iter().sum();
        let width = total as usize + 1;
        let mut counts = vec![0u64; (n1 + 1) * width];
        counts[0] = 1;
        for &r in &r2 {
            let r = r as usize;
            for k in (0..n1).rev() {
                for s in (0..width - r).rev() {
                    let c = counts[k * width + s];
                    if c > 0 {
                        counts[(k + 1) * width + s + r] += c;
                    }
                }
            }
        }
        let row = &counts[n1 * width..];
        let all: f64 = row.iter().sum::<u64>() as f64;
        let w = w2 as usize;
        let lo = row[..=w].iter().sum::<u64>() as f64 / all;
        let hi = row[w..].iter().sum::<u64>() as f64 / all;
        return Ok(TestResult {
            statistic,
            p_value: two_sided(lo, hi),
            n: n1,
            n2: Some(n2),
            method: Method::Exact,
        });
    }
    let (f1, f2, nf) = (n1 as f64, n2 as f64, big_n as f64);
    let mean = f1 * (nf + 1.0) / 2.0;
    let var = f1 * f2 / 12.0 * ((nf + 1.0) - tie_term(&ties) / (nf * (nf - 1.0)));
    Ok(TestResult {
        statistic,
        p_value: normal_two_sided(statistic - mean, var),
        n: n1,
        n2: Some(n2),
        method: Method::Normal,
    })
}

/// Holm step-down adjustment. Output is in input order.
pub fn holm_correct(p: &[f64]) -> Result<Vec<f64>, EvalError> {
    if let Some(x) = p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(EvalError::Domain(format!("p-value {x} outside [0, 1]")));
    }
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    let mut out = vec![0.0; m];
    let mut running = 0.0f64;
    for (i, &k) in order.iter().enumerate() {
        running = running.max(((m - i) as f64 * p[k]).min(1.0));
        out[k] = running;
    }
    Ok(out)
}

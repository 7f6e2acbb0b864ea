//! Brute-force reference implementations shared by the test targets.
#![allow(dead_code)]

// O(n^2) midranks, written independently of the library's sort-based ranking.
pub fn midranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let below = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn two_sided(le: usize, ge: usize, total: usize) -> f64 {
    let lo = le as f64 / total as f64;
    let hi = ge as f64 / total as f64;
    (2.0 * lo.min(hi)).min(1.0)
}

pub fn signed_rank_oracle(d: &[f64]) -> f64 {
    let d: Vec<f64> = d.iter().copied().filter(|&x| x != 0.0).collect();
    let n = d.len();
    let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let r = midranks(&abs);
    let w: f64 = d
        .iter()
        .zip(&r)
        .filter(|(x, _)| **x > 0.0)
        .map(|(_, r)| r)
        .sum();
    let (mut le, mut ge) = (0, 0);
    for mask in 0u32..(1 << n) {
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| r[i]).sum();
        // half-integer sums are exact in binary
        if s <= w {
            le += 1;
        }
        if s >= w {
            ge += 1;
        }
    }
    two_sided(le, ge, 1 << n)
}

pub fn rank_sum_oracle(a: &[f64], b: &[f64]) -> f64 {
    let all: Vec<f64> = a.iter().chain(b).copied().collect();
    let r = midranks(&all);
    let n = all.len();
    let w: f64 = r[..a.len()].iter().sum();
    let (mut le, mut ge, mut total) = (0, 0, 0);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        total += 1;
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| r[i]).sum();
        if s <= w {
            le += 1;
        }
        if s >= w {
            ge += 1;
        }
    }
    two_sided(le, ge, total)
}

// exact null distribution of W+ for untied ranks 1..=n by subset-sum counting
pub fn exact_untied(n: usize, w: f64) -> f64 {
    let top = n * (n + 1) / 2;
    let mut counts = vec![0u64; top + 1];
    counts[0] = 1;
    for r in 1..=n {
        for s in (r..=top).rev() {
            counts[s] += counts[s - r];
        }
    }
    let w = w as usize;
    let all = (1u64 << n) as usize;
    let le: u64 = counts[..=w].iter().sum();
    let ge: u64 = counts[w..].iter().sum();
    two_sided(le as usize, ge as usize, all)
}

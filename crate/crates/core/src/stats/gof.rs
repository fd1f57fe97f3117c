//! Goodness-of-fit tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::StatsError;

/// Outcome of a chi-square test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub p_value: f64,
    pub dof: usize,
}

/// `D = sup |F_n - F|` for sorted samples.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Upper tail `P(K > λ)` of the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // theta-function form, fast for small λ
        let y = (-std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp();
        let s: f64 = (0..20).map(|j| y.powi((2 * j + 1) * (2 * j + 1))).sum();
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * s;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|j| {
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (j * j) as f64 * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// One-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (including the usual small-sample correction of `λ`).
pub fn ks_test<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> Result<(f64, f64), StatsError> {
    if sorted.len() < 10 {
        return Err(StatsError::TooFewSamples {
            got: sorted.len(),
            need: 10,
        });
    }
    if sorted.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(StatsError::InvalidInput("samples must be sorted".into()));
    }
    let d = ks_statistic(sorted, cdf);
    let sqrt_n = (sorted.len() as f64).sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    Ok((d, kolmogorov_sf(lambda)))
}

fn chi_square_p(statistic: f64, dof: usize) -> f64 {
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .sf(statistic)
}

/// Merges consecutive bins until each has weight at least `min` according to
/// `weight`; a light final group joins its predecessor.
fn merge_bins(len: usize, weight: impl Fn(usize) -> f64, min: f64) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    let mut start = 0;
    let mut acc = 0.0;
    for i in 0..len {
        acc += weight(i);
        if acc >= min {
            groups.push((start, i + 1));
            start = i + 1;
            acc = 0.0;
        }
    }
    if start < len {
        match groups.last_mut() {
            Some(last) => last.1 = len,
            None => groups.push((start, len)),
        }
    }
    groups
}

/// Pearson test of an integer histogram against a pmf.
///
/// `counts[k]` is the number of observations equal to `k`, except for the
/// last bin, which also receives the pmf mass beyond it. Consecutive bins are
/// merged until every expected count reaches `min_expected`.
pub fn chi_square_gof<F: Fn(usize) -> f64>(
    counts: &[u64],
    pmf: F,
    min_expected: f64,
) -> Result<ChiSquare, StatsError> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(StatsError::TooFewSamples { got: 0, need: 1 });
    }
    let n = total as f64;
    let last = counts.len() - 1;
    let mut expected: Vec<f64> = (0..last).map(|k| n * pmf(k)).collect();
    let head: f64 = expected.iter().sum();
    expected.push((n - head).max(0.0));
    let groups = merge_bins(expected.len(), |i| expected[i], min_expected);
    if groups.len() < 2 {
        return Err(StatsError::DegenerateBins(groups.len()));
    }
    let statistic: f64 = groups
        .iter()
        .map(|&(a, b)| {
            let o: f64 = counts[a..b].iter().map(|&c| c as f64).sum();
            let e: f64 = expected[a..b].iter().sum();
            (o - e).powi(2) / e
        })
        .sum();
    let dof = groups.len() - 1;
    Ok(ChiSquare {
        statistic,
        p_value: chi_square_p(statistic, dof),
        dof,
    })
}

/// Two-sample chi-square test of homogeneity on integer histograms.
pub fn two_sample_chi_square(a: &[u64], b: &[u64]) -> Result<ChiSquare, StatsError> {
    let len = a.len().max(b.len());
    let at = |i: usize| a.get(i).copied().unwrap_or(0) as f64;
    let bt = |i: usize| b.get(i).copied().unwrap_or(0) as f64;
    let (na, nb): (f64, f64) = ((0..len).map(at).sum(), (0..len).map(bt).sum());
    if na == 0.0 || nb == 0.0 {
        return Err(StatsError::TooFewSamples { got: 0, need: 1 });
    }
    let smaller = na.min(nb) / (na + nb);
    let groups = merge_bins(len, |i| (at(i) + bt(i)) * smaller, 5.0);
    if groups.len() < 2 {
        return Err(StatsError::DegenerateBins(groups.len()));
    }
    let mut statistic = 0.0;
    for &(s, e) in &groups {
        let oa: f64 = (s..e).map(at).sum();
        let ob: f64 = (s..e).map(bt).sum();
        let col = oa + ob;
        let ea = col * na / (na + nb);
        let eb = col * nb / (na + nb);
        statistic += (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb;
    }
    let dof = groups.len() - 1;
    Ok(ChiSquare {
        statistic,
        p_value: chi_square_p(statistic, dof),
        dof,
    })
}

/// Histogram of nonnegative integers with at least `min_len` bins.
pub fn histogram(values: impl IntoIterator<Item = usize>, min_len: usize) -> Vec<u64> {
    let mut h = vec![0u64; min_len];
    for v in values {
        if v >= h.len() {
            h.resize(v + 1, 0);
        }
        h[v] += 1;
    }
    h
}

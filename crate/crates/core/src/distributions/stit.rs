//! Law of the `n`-th STIT jump time given the configuration: a sum of
//! independent `Exp(Λ([W]) L_k)` waits, `k = 1..n`.

use super::{check_time, clamp_probability, DistributionError, NumericLimits};
use crate::numeric::CompensatedSum;
use crate::processes::LSequence;

/// `Π_{i≠k} L_i / (L_k - L_i)` for every `k`.
pub(crate) fn lagrange_weights(l: &[f64]) -> Vec<f64> {
    l.iter()
        .enumerate()
        .map(|(k, &lk)| {
            l.iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &li)| li / (lk - li))
                .product()
        })
        .collect()
}

fn prefix<'a>(l: &'a LSequence, n: usize, limits: &NumericLimits) -> Result<&'a [f64], DistributionError> {
    if n == 0 || n > l.len() {
        return Err(DistributionError::DomainError(format!(
            "n = {n} outside 1..={}",
            l.len()
        )));
    }
    if n > limits.n_max {
        return Err(DistributionError::TooLong {
            index: n,
            max: limits.n_max,
        });
    }
    Ok(&l.values()[..n])
}

/// `P(t_n ≤ t | C_n)`.
pub fn stit_jump_cdf(l: &LSequence, n: usize, t: f64) -> Result<f64, DistributionError> {
    stit_jump_cdf_with(l, n, t, &NumericLimits::default())
}

pub fn stit_jump_cdf_with(
    l: &LSequence,
    n: usize,
    t: f64,
    limits: &NumericLimits,
) -> Result<f64, DistributionError> {
    let values = prefix(l, n, limits)?;
    check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let a = l.rate() * t;
    if n == 1 {
        return Ok(-(-a).exp_m1());
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut sum = CompensatedSum::new();
    sum.add(1.0);
    for (&lk, w) in values.iter().zip(lagrange_weights(values)) {
        sum.add(sign * w * (-a * lk).exp());
    }
    limits.check(sum.condition())?;
    clamp_probability(sum.value())
}

/// Density of `t_n` given `C_n`.
pub fn stit_jump_pdf(l: &LSequence, n: usize, t: f64) -> Result<f64, DistributionError> {
    stit_jump_pdf_with(l, n, t, &NumericLimits::default())
}

pub fn stit_jump_pdf_with(
    l: &LSequence,
    n: usize,
    t: f64,
    limits: &NumericLimits,
) -> Result<f64, DistributionError> {
    let values = prefix(l, n, limits)?;
    check_time(t)?;
    let rate = l.rate();
    if n == 1 {
        return Ok(rate * (-rate * t).exp());
    }
    let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
    let mut sum = CompensatedSum::new();
    for (&lk, w) in values.iter().zip(lagrange_weights(values)) {
        sum.add(sign * rate * lk * w * (-rate * lk * t).exp());
    }
    // scale-free cancellation estimate: the density is not bounded by 1
    let condition = sum.abs_sum() / sum.value().abs().max(rate);
    limits.check(condition)?;
    let v = sum.value();
    if v < 0.0 && v > -1e-9 * sum.abs_sum().max(1.0) {
        return Ok(0.0);
    }
    if v < 0.0 {
        return Err(DistributionError::OutOfRange(v));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[f64], rate: f64) -> LSequence {
        LSequence::new(v.to_vec(), rate).unwrap()
    }

    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }

    /// Adaptive Simpson quadrature.
    fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        simpson(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    #[test]
    fn single_wait_is_exponential() {
        let l = seq(&[1.0], 1.0);
        assert!((stit_jump_cdf(&l, 1, 2f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        let l = seq(&[1.0], 3.0);
        for &t in &[0.0, 0.1, 1.0] {
            let want = 3.0 * (-3.0 * t as f64).exp();
            assert!((stit_jump_pdf(&l, 1, t).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_at_time_zero() {
        let l = seq(&[1.0, 1.5, 2.2, 2.9], 2.0);
        for n in 1..=4 {
            assert_eq!(stit_jump_cdf(&l, n, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn two_waits_match_convolution_integral() {
        let l = seq(&[1.0, 1.5], 1.0);
        for i in 1..=20 {
            let t = i as f64 * 0.25;
            let conv = integrate(&|s| (-s).exp() * (1.0 - (-1.5 * (t - s)).exp()), 0.0, t, 1e-13);
            let got = stit_jump_cdf(&l, 2, t).unwrap();
            assert!((got - conv).abs() < 1e-10, "t={t}: {got} vs {conv}");
        }
    }

    #[test]
    fn pdf_is_derivative_of_cdf() {
        let l = seq(&[1.0, 1.5, 2.2], 1.0);
        let h = 1e-5;
        for &t in &[0.3, 0.8, 2.0, 4.0] {
            let fd = (stit_jump_cdf(&l, 3, t + h).unwrap() - stit_jump_cdf(&l, 3, t - h).unwrap()) / (2.0 * h);
            let pdf = stit_jump_pdf(&l, 3, t).unwrap();
            assert!((fd - pdf).abs() <= 1e-6 * pdf.max(1e-3), "t={t}: {fd} vs {pdf}");
        }
    }

    #[test]
    fn pdf_integrates_to_one() {
        let l = seq(&[1.0, 1.4, 1.9], 4.0);
        let total = integrate(&|t| stit_jump_pdf(&l, 3, t).unwrap(), 0.0, 20.0, 1e-12);
        assert!((total - 1.0).abs() < 1e-8, "{total}");
    }

    #[test]
    fn cdf_is_monotone_and_bounded() {
        let l = seq(&[1.0, 1.3, 2.1, 3.5, 4.2, 5.9], 1.0);
        for n in 1..=6 {
            let mut prev = 0.0;
            for i in 0..=400 {
                let v = stit_jump_cdf(&l, n, i as f64 * 0.05).unwrap();
                assert!((0.0..=1.0).contains(&v));
                assert!(v >= prev - 1e-12);
                prev = v;
            }
            assert!(prev > 1.0 - 1e-6);
        }
    }

    #[test]
    fn long_or_tight_sequences_are_refused() {
        let values: Vec<f64> = (0..16).map(|k| 1.0 + k as f64 * 0.5).collect();
        let l = seq(&values, 1.0);
        assert!(matches!(
            stit_jump_cdf(&l, 16, 1.0),
            Err(DistributionError::TooLong { .. })
        ));
        let tight: Vec<f64> = (0..12).map(|k| 1.0 + k as f64 * 1e-3).collect();
        let l = seq(&tight, 1.0);
        assert!(matches!(
            stit_jump_cdf(&l, 12, 1.0),
            Err(DistributionError::IllConditioned { .. })
        ));
        assert!(stit_jump_cdf(&l, 13, 1.0).is_err());
        assert!(stit_jump_cdf(&l, 0, 1.0).is_err());
    }
}

//! Geometric decision and jump counts.
//!
//! The number of decisions `ν(t)` of Mecke's clock and the jump count `N_t`
//! of the equally-likely process share the law
//! `P(k) = e^{-λt} (1 - e^{-λt})^k`.

use super::{check_rate, check_time, DistributionError};

fn success(rate: f64, t: f64) -> Result<f64, DistributionError> {
    check_rate(rate)?;
    check_time(t)?;
    Ok(-(-rate * t).exp_m1())
}

/// `P(ν(t) = k)`.
pub fn nu_pmf(rate: f64, t: f64, k: u64) -> Result<f64, DistributionError> {
    let a = success(rate, t)?;
    Ok((-rate * t).exp() * a.powf(k as f64))
}

/// `P(N_t = k)` for the equally-likely process.
pub fn cowan_count_pmf(rate: f64, t: f64, k: u64) -> Result<f64, DistributionError> {
    nu_pmf(rate, t, k)
}

/// `P(ν(t) ≥ n)`.
pub fn nu_tail(rate: f64, t: f64, n: u64) -> Result<f64, DistributionError> {
    Ok(success(rate, t)?.powf(n as f64))
}

/// `P(S_n ≤ t)` with `S_n = Σ_{k=1}^n T_k`, `T_k ~ Exp(k · rate)`.
pub fn cowan_sum_cdf(rate: f64, n: u64, t: f64) -> Result<f64, DistributionError> {
    if n == 0 {
        return Err(DistributionError::DomainError("n must be at least 1".into()));
    }
    nu_tail(rate, t, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_examples() {
        assert!((nu_pmf(1.0, 1.0, 0).unwrap() - (-1.0f64).exp()).abs() < 1e-16);
        assert_eq!(nu_pmf(3.0, 0.0, 0).unwrap(), 1.0);
        assert_eq!(nu_pmf(3.0, 0.0, 2).unwrap(), 0.0);
        for k in 0..20 {
            assert_eq!(nu_pmf(2.0, 0.7, k).unwrap(), cowan_count_pmf(2.0, 0.7, k).unwrap());
        }
        assert!(nu_pmf(0.0, 1.0, 0).is_err());
        assert!(nu_pmf(1.0, -1.0, 0).is_err());
    }

    #[test]
    fn tail_is_sum_of_pmf() {
        let (rate, t) = (1.5, 0.8);
        for n in 0..10 {
            let direct: f64 = (n..5000).map(|k| nu_pmf(rate, t, k).unwrap()).sum();
            assert!((direct - nu_tail(rate, t, n).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn sum_cdf_examples() {
        let want = 1.0 - (-2.0 * 0.3f64).exp();
        assert!((cowan_sum_cdf(2.0, 1, 0.3).unwrap() - want).abs() < 1e-16);
        let want = (1.0 - (-1.0f64).exp()).powi(3);
        assert!((cowan_sum_cdf(1.0, 3, 1.0).unwrap() - want).abs() < 1e-15);
        assert!(cowan_sum_cdf(1.0, 0, 1.0).is_err());
    }

    #[test]
    fn sum_cdf_matches_hypoexponential_convolution() {
        // oracle: Lagrange form of a sum of exponentials with rates k·rate
        let (rate, n) = (1.3, 4u64);
        for i in 1..30 {
            let t = i as f64 * 0.1;
            let rates: Vec<f64> = (1..=n).map(|k| k as f64 * rate).collect();
            let mut surv = 0.0;
            for (k, &rk) in rates.iter().enumerate() {
                let w: f64 = rates
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &ri)| ri / (ri - rk))
                    .product();
                surv += w * (-rk * t).exp();
            }
            assert!((1.0 - surv - cowan_sum_cdf(rate, n, t).unwrap()).abs() < 1e-12);
        }
    }
}

//! Laws of Mecke's discrete chain given the configuration.
//!
//! With `k` cells present, decision `n` produces a jump with probability
//! `L_k / n`. The waiting law and the law of the `ℓ`-th jump index `X_ℓ` are
//! finite products in `n`; the tail `P(η(t) ≥ ℓ)` of the continuous-time
//! process mixes the latter with geometric decision counts.

use super::{
    check_time, clamp_probability, DistributionError, NumericLimits, TruncationPolicy,
};
use crate::numeric::CompensatedSum;
use crate::processes::LSequence;

/// Result of summing a probability series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mass {
    pub mass: f64,
    pub terms: u64,
    /// Estimated mass beyond the last term.
    pub tail_estimate: f64,
}

fn check_waiting_args(n: u64, k: u64, l_k: f64) -> Result<(), DistributionError> {
    let bad = |msg: String| Err(DistributionError::DomainError(msg));
    if n == 0 || k == 0 {
        return bad(format!("n = {n} and k = {k} must be positive"));
    }
    if k > n {
        return bad(format!("{k} cells cannot live in {n} quasi-cells"));
    }
    if !(l_k >= 1.0 && l_k <= k as f64 * (1.0 + 1e-12)) {
        return bad(format!("L_k = {l_k} outside [1, {k}]"));
    }
    Ok(())
}

/// Probability that, with `n` quasi-cells of which `k` are cells, the next
/// jump happens at the `ell`-th decision.
///
/// Equal to `L_k (n-1)!/(n+ℓ-1)! · Γ(n+ℓ-1-L_k)/Γ(n-L_k)`, evaluated as
/// `L_k/(n+ℓ-1) · Π_{j=0}^{ℓ-2} (n+j-L_k)/(n+j)`.
pub fn discrete_waiting_pmf(n: u64, k: u64, l_k: f64, ell: u64) -> Result<f64, DistributionError> {
    check_waiting_args(n, k, l_k)?;
    if ell == 0 {
        return Err(DistributionError::DomainError("ℓ must be at least 1".into()));
    }
    let survive: f64 = (0..ell - 1)
        .map(|j| (n + j) as f64)
        .map(|m| (m - l_k) / m)
        .product();
    clamp_probability(l_k / (n + ell - 1) as f64 * survive)
}

/// Sums the waiting law over `ℓ = 1, 2, ...` until the ratio-test tail
/// estimate drops below the policy bound.
pub fn waiting_pmf_mass(
    n: u64,
    k: u64,
    l_k: f64,
    policy: &TruncationPolicy,
) -> Result<Mass, DistributionError> {
    check_waiting_args(n, k, l_k)?;
    policy.validate()?;
    let mut sum = CompensatedSum::new();
    let mut survive = 1.0;
    for ell in 1..=policy.max_terms {
        let m = (n + ell - 1) as f64;
        let p = survive * l_k / m;
        sum.add(p);
        survive *= 1.0 - l_k / m;
        let ratio = (m - l_k) / (m + 1.0);
        let tail = if p == 0.0 || ratio <= 0.0 {
            0.0
        } else {
            p * ratio / (1.0 - ratio)
        };
        if tail < policy.tail_bound {
            return Ok(Mass {
                mass: sum.value(),
                terms: ell,
                tail_estimate: tail,
            });
        }
    }
    Err(DistributionError::TruncationFailure {
        terms: policy.max_terms,
        bound: policy.tail_bound,
    })
}

/// Successive values `P(X_ℓ = n | C_ℓ)` for `n = ℓ, ℓ+1, ...`.
///
/// Each of the `ℓ - 1` Lagrange terms carries the factor
/// `r_i(n) = Γ(n-L_i)/(Γ(2-L_i) n!) = (1/n) Π_{k=2}^{n-1} (k-L_i)/k`, updated in
/// place from one `n` to the next. Values are raw: rounding can leave them
/// slightly negative.
#[derive(Debug, Clone)]
pub struct DiscreteJumpSeries {
    nodes: Vec<f64>,
    coefficients: Vec<f64>,
    factors: Vec<f64>,
    n: u64,
}

impl DiscreteJumpSeries {
    pub fn new(l: &LSequence, ell: usize) -> Result<Self, DistributionError> {
        Self::with_limits(l, ell, &NumericLimits::default())
    }

    pub fn with_limits(
        l: &LSequence,
        ell: usize,
        limits: &NumericLimits,
    ) -> Result<Self, DistributionError> {
        if ell < 2 || ell > l.len() {
            return Err(DistributionError::DomainError(format!(
                "ℓ = {ell} outside 2..={}",
                l.len()
            )));
        }
        if ell > limits.ell_max {
            return Err(DistributionError::TooLong {
                index: ell,
                max: limits.ell_max,
            });
        }
        let nodes = l.values()[1..ell].to_vec();
        let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
        let scale: f64 = sign * nodes.iter().product::<f64>();
        let coefficients = nodes
            .iter()
            .enumerate()
            .map(|(i, &li)| {
                let denom: f64 = nodes
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &lj)| li - lj)
                    .product();
                scale / denom
            })
            .collect();
        let factors = nodes
            .iter()
            .map(|&li| (2..ell).map(|k| (k as f64 - li) / k as f64).product::<f64>() / ell as f64)
            .collect();
        let series = Self {
            nodes,
            coefficients,
            factors,
            n: ell as u64,
        };
        let (_, first) = series.current();
        limits.check(first.condition())?;
        Ok(series)
    }

    fn current(&self) -> (u64, CompensatedSum) {
        let sum = self
            .coefficients
            .iter()
            .zip(&self.factors)
            .map(|(c, r)| c * r)
            .collect();
        (self.n, sum)
    }

    /// True once every term has hit an exact zero factor, so that all later
    /// values vanish.
    pub fn exhausted(&self) -> bool {
        self.factors.iter().all(|&r| r == 0.0)
    }
}

impl Iterator for DiscreteJumpSeries {
    type Item = (u64, f64);

    fn next(&mut self) -> Option<(u64, f64)> {
        let (n, sum) = self.current();
        let nf = n as f64;
        for (r, &li) in self.factors.iter_mut().zip(&self.nodes) {
            *r *= (nf - li) / (nf + 1.0);
        }
        self.n += 1;
        Some((n, sum.value()))
    }
}

/// `P(X_ℓ = n | C_ℓ)`, the index of the decision producing the `ℓ`-th jump.
pub fn discrete_jump_pmf(l: &LSequence, ell: usize, n: u64) -> Result<f64, DistributionError> {
    discrete_jump_pmf_with(l, ell, n, &NumericLimits::default())
}

pub fn discrete_jump_pmf_with(
    l: &LSequence,
    ell: usize,
    n: u64,
    limits: &NumericLimits,
) -> Result<f64, DistributionError> {
    if ell == 1 {
        return Ok(if n == 1 { 1.0 } else { 0.0 });
    }
    let series = DiscreteJumpSeries::with_limits(l, ell, limits)?;
    if n < ell as u64 {
        return Ok(0.0);
    }
    let nodes = &series.nodes;
    let terms: CompensatedSum = series
        .coefficients
        .iter()
        .zip(nodes)
        .map(|(c, &li)| {
            let r: f64 = (2..n).map(|k| (k as f64 - li) / k as f64).product::<f64>() / n as f64;
            c * r
        })
        .collect();
    limits.check(terms.condition())?;
    clamp_probability(terms.value())
}

/// Sums `P(X_ℓ = n)` over `n ≥ ℓ` until the ratio-test tail estimate drops
/// below the policy bound.
pub fn jump_pmf_mass(
    l: &LSequence,
    ell: usize,
    policy: &TruncationPolicy,
) -> Result<Mass, DistributionError> {
    policy.validate()?;
    if ell == 1 {
        return Ok(Mass {
            mass: 1.0,
            terms: 1,
            tail_estimate: 0.0,
        });
    }
    let mut series = DiscreteJumpSeries::new(l, ell)?;
    let mut sum = CompensatedSum::new();
    let (_, mut p) = series.next().expect("infinite series");
    for terms in 1..=policy.max_terms {
        sum.add(p);
        let (_, next) = series.next().expect("infinite series");
        let tail = if series.exhausted() {
            0.0
        } else if p > 0.0 && next > 0.0 && next < p {
            let ratio = next / p;
            next / (1.0 - ratio)
        } else {
            f64::INFINITY
        };
        if tail < policy.tail_bound {
            return Ok(Mass {
                mass: sum.value(),
                terms,
                tail_estimate: tail,
            });
        }
        p = next;
    }
    Err(DistributionError::TruncationFailure {
        terms: policy.max_terms,
        bound: policy.tail_bound,
    })
}

/// `P(η(t) ≥ ℓ | C_ℓ)` for Mecke's continuous-time process:
/// `Σ_{n≥ℓ} (1 - e^{-Λt})^n P(X_ℓ = n | C_ℓ)`.
///
/// Summation stops once the remainder is provably below the tail bound,
/// using the smaller of `A^{N+1}/(1 - A)` and `A^{N+1} P(X_ℓ > N)` with
/// `A = 1 - e^{-Λt}`.
pub fn mecke_jump_tail(
    l: &LSequence,
    ell: usize,
    t: f64,
    policy: &TruncationPolicy,
) -> Result<f64, DistributionError> {
    policy.validate()?;
    check_time(t)?;
    if ell == 0 || ell > l.len() {
        return Err(DistributionError::DomainError(format!(
            "ℓ = {ell} outside 1..={}",
            l.len()
        )));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let a = l.rate() * t;
    let q = (-a).exp();
    let base = -(-a).exp_m1();
    if ell == 1 {
        return Ok(base);
    }
    let mut series = DiscreteJumpSeries::new(l, ell)?;
    let mut sum = CompensatedSum::new();
    let mut cdf = CompensatedSum::new();
    let mut power = base.powi(ell as i32);
    for _ in 0..policy.max_terms {
        let (_, p) = series.next().expect("infinite series");
        sum.add(power * p);
        cdf.add(p);
        power *= base;
        let remaining = (1.0 - cdf.value()).max(0.0) + 1e-12;
        let bound = (power / q).min(power * remaining);
        if bound < policy.tail_bound || series.exhausted() {
            return clamp_probability(sum.value());
        }
    }
    Err(DistributionError::TruncationFailure {
        terms: policy.max_terms,
        bound: policy.tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[f64]) -> LSequence {
        LSequence::new(v.to_vec(), 1.0).unwrap()
    }

    /// `P(X_ℓ = n)` for `n = 1..=n_max` by propagating the jump-count
    /// distribution of the chain decision by decision.
    fn absorption(l: &[f64], ell: usize, n_max: usize) -> Vec<f64> {
        let mut dist = vec![0.0; ell + 1];
        dist[0] = 1.0;
        let mut out = vec![0.0; n_max + 1];
        for n in 1..=n_max {
            let mut next = vec![0.0; ell + 1];
            next[ell] = dist[ell];
            for j in 0..ell {
                let p = (l[j] / n as f64).min(1.0);
                next[j] += dist[j] * (1.0 - p);
                next[j + 1] += dist[j] * p;
            }
            out[n] = next[ell] - dist[ell];
            dist = next;
        }
        out
    }

    #[test]
    fn waiting_pmf_examples() {
        for &(n, k, l) in &[(3u64, 2u64, 1.5), (5, 3, 2.7), (4, 4, 3.9)] {
            let lf = l;
            assert!((discrete_waiting_pmf(n, k, l, 1).unwrap() - lf / n as f64).abs() < 1e-15);
            let two = (1.0 - lf / n as f64) * lf / (n + 1) as f64;
            assert!((discrete_waiting_pmf(n, k, l, 2).unwrap() - two).abs() < 1e-15);
        }
        assert_eq!(discrete_waiting_pmf(1, 1, 1.0, 1).unwrap(), 1.0);
        for ell in 2..6 {
            assert_eq!(discrete_waiting_pmf(1, 1, 1.0, ell).unwrap(), 0.0);
        }
        assert!(discrete_waiting_pmf(1, 2, 1.5, 1).is_err());
        assert!(discrete_waiting_pmf(3, 2, 2.5, 1).is_err());
        assert!(discrete_waiting_pmf(3, 2, 0.5, 1).is_err());
        assert!(discrete_waiting_pmf(3, 2, 1.5, 0).is_err());
    }

    #[test]
    fn waiting_pmf_matches_gamma_form() {
        use statrs::function::gamma::ln_gamma;
        let (n, l) = (6u64, 2.3f64);
        for ell in 1..30u64 {
            let log = l.ln() + ln_gamma(n as f64) - ln_gamma((n + ell) as f64)
                + ln_gamma((n + ell) as f64 - 1.0 - l)
                - ln_gamma(n as f64 - l);
            let got = discrete_waiting_pmf(n, 3, l, ell).unwrap();
            assert!((got - log.exp()).abs() <= 1e-11 * log.exp(), "ℓ={ell}: {got} vs {}", log.exp());
        }
    }

    #[test]
    fn waiting_pmf_is_normalized() {
        let policy = TruncationPolicy::new(1e-10, 100_000_000).unwrap();
        let m = waiting_pmf_mass(4, 3, 2.7, &policy).unwrap();
        assert!(m.mass > 1.0 - 1e-8 && m.mass <= 1.0 + 1e-12, "{m:?}");
        let m = waiting_pmf_mass(1, 1, 1.0, &policy).unwrap();
        assert_eq!(m.mass, 1.0);
    }

    #[test]
    fn two_jump_pmf_is_single_product() {
        let l = seq(&[1.0, 1.7]);
        for n in 2..40u64 {
            let prod: f64 = (2..n).map(|k| k as f64 - 1.7).product();
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            let want = 1.7 * prod / fact;
            let got = discrete_jump_pmf(&l, 2, n).unwrap();
            assert!((got - want).abs() < 1e-15, "n={n}");
        }
        assert_eq!(discrete_jump_pmf(&l, 2, 1).unwrap(), 0.0);
    }

    #[test]
    fn jump_pmf_matches_chain_absorption() {
        let values = [1.0, 1.5, 2.2, 2.8, 4.1];
        let l = seq(&values);
        for ell in 2..=5 {
            let oracle = absorption(&values, ell, 300);
            for n in ell..=300 {
                let got = discrete_jump_pmf(&l, ell, n as u64).unwrap();
                assert!((got - oracle[n]).abs() < 1e-12, "ℓ={ell} n={n}: {got} vs {}", oracle[n]);
            }
        }
    }

    #[test]
    fn jump_pmf_satisfies_convolution_recursion() {
        let values = [1.0, 1.3, 2.5, 3.2];
        let l = seq(&values);
        for ell in 2..4usize {
            for n in (ell + 1)..80 {
                let direct: f64 = (ell..n)
                    .map(|m| {
                        discrete_jump_pmf(&l, ell, m as u64).unwrap()
                            * discrete_waiting_pmf(m as u64 + 1, ell as u64 + 1, values[ell], (n - m) as u64)
                                .unwrap()
                    })
                    .sum();
                let got = discrete_jump_pmf(&l, ell + 1, n as u64).unwrap();
                assert!((got - direct).abs() < 1e-13, "ℓ={ell} n={n}");
            }
        }
    }

    #[test]
    fn series_agrees_with_pointwise_pmf() {
        let l = seq(&[1.0, 1.2, 2.9, 3.3]);
        let series = DiscreteJumpSeries::new(&l, 4).unwrap();
        for (n, v) in series.take(500) {
            let p = discrete_jump_pmf(&l, 4, n).unwrap();
            assert!((v - p).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn jump_pmf_is_normalized() {
        let l = seq(&[1.0, 1.5, 2.2]);
        let policy = TruncationPolicy::new(1e-10, 100_000_000).unwrap();
        let m = jump_pmf_mass(&l, 3, &policy).unwrap();
        assert!(m.mass >= 1.0 - 1e-8, "{m:?}");
        let oracle = absorption(&[1.0, 1.5, 2.2], 3, 5000);
        let partial: f64 = oracle.iter().sum();
        let series: f64 = DiscreteJumpSeries::new(&l, 3).unwrap().take(4998).map(|x| x.1).sum();
        assert!((partial - series).abs() < 1e-12);
    }

    #[test]
    fn integer_node_terminates_series() {
        let l = seq(&[1.0, 2.0]);
        assert_eq!(discrete_jump_pmf(&l, 2, 2).unwrap(), 1.0);
        assert_eq!(discrete_jump_pmf(&l, 2, 5).unwrap(), 0.0);
        let m = jump_pmf_mass(&l, 2, &TruncationPolicy::default()).unwrap();
        assert_eq!(m.mass, 1.0);
    }

    #[test]
    fn tail_edge_cases() {
        let policy = TruncationPolicy::default();
        let l = LSequence::new(vec![1.0], 2.0).unwrap();
        assert_eq!(mecke_jump_tail(&l, 1, 0.0, &policy).unwrap(), 0.0);
        let t: f64 = 0.4;
        assert!((mecke_jump_tail(&l, 1, t, &policy).unwrap() - (1.0 - (-0.8f64).exp())).abs() < 1e-15);
        let l = LSequence::new(vec![1.0, 1.6, 2.5], 1.0).unwrap();
        assert_eq!(mecke_jump_tail(&l, 3, 0.0, &policy).unwrap(), 0.0);
        let tight = TruncationPolicy::new(1e-10, 10).unwrap();
        assert!(matches!(
            mecke_jump_tail(&l, 2, 30.0, &tight),
            Err(DistributionError::TruncationFailure { .. })
        ));
    }
}

//! Residuals of the algebraic identities behind the jump-time laws.
//!
//! Each checker evaluates both sides independently and returns
//! `|lhs - rhs| / max(|rhs|, 1)`. Gamma ratios are normalized so that only
//! finite products of `(q - L)` factors appear.

use super::DistributionError;
use crate::numeric::{binomial, factorial, gamma_ratio, CompensatedSum};

fn residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(1.0)
}

fn check_distinct(x: &[f64]) -> Result<(), DistributionError> {
    for (i, a) in x.iter().enumerate() {
        if !a.is_finite() {
            return Err(DistributionError::DomainError(format!("node {a} is not finite")));
        }
        if x[..i].contains(a) {
            return Err(DistributionError::DomainError(format!("repeated node {a}")));
        }
    }
    Ok(())
}

fn lagrange_basis(x: &[f64], k: usize, at: f64) -> f64 {
    x.iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, &xi)| (at - xi) / (x[k] - xi))
        .product()
}

/// Interpolating the constant 1 at nodes `x` reproduces 1 everywhere:
/// residual of `Σ_k Π_{i≠k} (x_eval - x_i)/(x_k - x_i) = 1`.
pub fn verify_lagrange_identity(x: &[f64], x_eval: f64) -> Result<f64, DistributionError> {
    check_distinct(x)?;
    if x.is_empty() {
        return Err(DistributionError::DomainError("no nodes".into()));
    }
    let sum: CompensatedSum = (0..x.len()).map(|k| lagrange_basis(x, k, x_eval)).collect();
    Ok(residual(sum.value(), 1.0))
}

/// Interpolation of `f(x) = Γ(ℓ-x)/Γ(2-x) = Π_{k=2}^{ℓ-1} (k - x)` at the
/// `ℓ - 1` nodes `L_2..L_ℓ` reproduces `f`, in particular at `x_eval = L_{ℓ+1}`.
pub fn verify_lagrange_gamma_identity(nodes: &[f64], x_eval: f64) -> Result<f64, DistributionError> {
    check_distinct(nodes)?;
    if nodes.is_empty() {
        return Err(DistributionError::DomainError("no nodes".into()));
    }
    let ell = nodes.len() as i64 + 1;
    let f = |x: f64| gamma_ratio(ell, 2, x);
    let sum: CompensatedSum = (0..nodes.len())
        .map(|k| f(nodes[k]) * lagrange_basis(nodes, k, x_eval))
        .collect();
    Ok(residual(sum.value(), f(x_eval)))
}

/// `Σ_{k=ℓ}^{n-1} Γ(k-L_i)/Γ(k+1-L_j)
///   = [Γ(ℓ-L_i)/Γ(ℓ-L_j) - Γ(n-L_i)/Γ(n-L_j)] / (L_i - L_j)`,
/// both sides divided by `Γ(ℓ-L_i)/Γ(ℓ-L_j)`.
pub fn verify_telescoping_identity(
    l_i: f64,
    l_next: f64,
    ell: u64,
    n: u64,
) -> Result<f64, DistributionError> {
    if ell < 1 || n <= ell {
        return Err(DistributionError::DomainError(format!(
            "need 1 <= ℓ < n, got ℓ = {ell}, n = {n}"
        )));
    }
    check_distinct(&[l_i, l_next])?;
    let (ell, n) = (ell as i64, n as i64);
    let lhs: CompensatedSum = (ell..n)
        .map(|k| gamma_ratio(k, ell, l_i) * gamma_ratio(ell, k + 1, l_next))
        .collect();
    let rhs = (1.0 - gamma_ratio(n, ell, l_i) * gamma_ratio(ell, n, l_next)) / (l_i - l_next);
    Ok(residual(lhs.value(), rhs))
}

/// Coefficient identities for `k = 0..ℓ-1`, both forms divided by
/// `Γ(2-L_i)`:
///
/// `Σ_{n=k}^{ℓ-1} (-1)^k C(n,k) Γ(n-L)/n! = (-1)^k C(ℓ,k) (ℓ-k) Γ(ℓ-L) / (ℓ! (k-L))`
///
/// `Σ_{n=k}^{ℓ-1} Γ(n-L)/(n-k)! = Γ(ℓ-L) / ((ℓ-k-1)! (k-L))`
///
/// Returns the larger of the two residuals.
pub fn verify_binomial_gamma_identity(ell: u64, k: u64, l_i: f64) -> Result<f64, DistributionError> {
    if ell < 2 || k >= ell {
        return Err(DistributionError::DomainError(format!(
            "need ℓ >= 2 and k < ℓ, got ℓ = {ell}, k = {k}"
        )));
    }
    if !l_i.is_finite() || l_i.fract() == 0.0 {
        return Err(DistributionError::DomainError(format!(
            "L must be a finite non-integer, got {l_i}"
        )));
    }
    let g = |n: u64| gamma_ratio(n as i64, 2, l_i);
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };

    let lhs12: CompensatedSum = (k..ell)
        .map(|n| sign * binomial(n, k) * g(n) / factorial(n))
        .collect();
    let rhs12 = sign * binomial(ell, k) * (ell - k) as f64 * g(ell)
        / (factorial(ell) * (k as f64 - l_i));

    let lhs13: CompensatedSum = (k..ell).map(|n| g(n) / factorial(n - k)).collect();
    let rhs13 = g(ell) / (factorial(ell - k - 1) * (k as f64 - l_i));

    Ok(residual(lhs12.value(), rhs12).max(residual(lhs13.value(), rhs13)))
}

//! `stitlab table`: CSV tables of the distribution evaluators.

use std::fmt::Write;

use clap::{Args, Subcommand};
use stitlab_core::distributions::{
    cowan_count_pmf, cowan_sum_cdf, discrete_jump_pmf, discrete_waiting_pmf, mecke_jump_tail, nu_pmf,
    stit_jump_cdf, stit_jump_pdf, DistributionError, TruncationPolicy,
};
use stitlab_core::LSequence;

use crate::CliError;

#[derive(Debug, Subcommand)]
pub enum Table {
    /// CDF of the n-th STIT jump time given L.
    StitCdf(StitArgs),
    /// Density of the n-th STIT jump time given L.
    StitPdf(StitArgs),
    /// Jump count of the equally-likely process.
    CowanPmf(CountArgs),
    /// Decision count of Mecke's clock.
    NuPmf(CountArgs),
    /// CDF of the n-th equally-likely jump time.
    CowanSumCdf {
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        t: String,
    },
    /// Waiting time, in decisions, of Mecke's next jump.
    WaitingPmf {
        /// Current number of quasi-cells.
        #[arg(long)]
        n: u64,
        #[arg(long = "Lk")]
        l_k: f64,
        /// Current number of cells (defaults to the smallest admissible).
        #[arg(long)]
        k: Option<u64>,
        #[arg(long = "l")]
        ell: String,
    },
    /// Decision index of Mecke's ell-th jump given L.
    JumpPmf {
        #[arg(long = "L")]
        l: String,
        #[arg(long = "ell")]
        ell: Option<usize>,
        #[arg(long)]
        n: String,
    },
    /// P(at least ell jumps by time t) for Mecke's continuous-time process.
    MeckeTail {
        #[arg(long = "L")]
        l: String,
        #[arg(long = "ell")]
        ell: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        #[arg(long)]
        t: String,
        #[arg(long, default_value_t = 1e-10)]
        tail_bound: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_terms: u64,
    },
}

#[derive(Debug, Args)]
pub struct StitArgs {
    /// Comma-separated L_1, L_2, ...
    #[arg(long = "L")]
    l: String,
    /// Jump index (defaults to the length of L).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    /// Time grid `a:b:step`, a list or a single value.
    #[arg(long)]
    t: String,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    #[arg(long)]
    t: f64,
    /// Integer range `a:b`, a list or a single value.
    #[arg(long)]
    k: String,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn number(s: &str) -> Result<f64, CliError> {
    s.trim().parse().map_err(|_| usage(format!("{s:?} is not a number")))
}

fn integer(s: &str) -> Result<u64, CliError> {
    s.trim().parse().map_err(|_| usage(format!("{s:?} is not a non-negative integer")))
}

/// `a:b:step` (inclusive), `a,b,c` or a single value.
pub fn real_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (number(a)?, number(b)?, number(step)?);
            if !(step > 0.0) || b < a {
                return Err(usage(format!("bad grid {spec:?}")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            if count > 10_000_000 {
                return Err(usage(format!("grid {spec:?} is too large")));
            }
            Ok((0..count).map(|i| a + i as f64 * step).collect())
        }
        [single] => single.split(',').map(number).collect(),
        _ => Err(usage(format!("bad grid {spec:?}"))),
    }
}

/// `a:b` (inclusive), `a,b,c` or a single value.
pub fn int_range(spec: &str) -> Result<Vec<u64>, CliError> {
    match spec.split_once(':') {
        Some((a, b)) => {
            let (a, b) = (integer(a)?, integer(b)?);
            if b < a || b - a > 10_000_000 {
                return Err(usage(format!("bad range {spec:?}")));
            }
            Ok((a..=b).collect())
        }
        None => spec.split(',').map(integer).collect(),
    }
}

fn l_sequence(spec: &str, rate: f64) -> Result<LSequence, CliError> {
    let values = spec.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
    LSequence::new(values, rate).map_err(|e| usage(e.to_string()))
}

fn eval(e: DistributionError) -> CliError {
    match e {
        DistributionError::DomainError(_) | DistributionError::InvalidPolicy(_) => usage(e.to_string()),
        _ => CliError::Runtime(e.to_string()),
    }
}

fn csv<X: std::fmt::Display>(
    header: &str,
    xs: &[X],
    f: impl Fn(&X) -> Result<f64, DistributionError>,
) -> Result<String, CliError> {
    let mut out = format!("{header}\n");
    for x in xs {
        let _ = writeln!(out, "{x},{}", f(x).map_err(eval)?);
    }
    Ok(out)
}

pub fn run(table: &Table) -> Result<String, CliError> {
    match table {
        Table::StitCdf(a) | Table::StitPdf(a) => {
            let l = l_sequence(&a.l, a.rate)?;
            let n = a.n.unwrap_or(l.len());
            let ts = real_grid(&a.t)?;
            if matches!(table, Table::StitCdf(_)) {
                csv("t,cdf", &ts, |&t| stit_jump_cdf(&l, n, t))
            } else {
                csv("t,pdf", &ts, |&t| stit_jump_pdf(&l, n, t))
            }
        }
        Table::CowanPmf(a) => csv("k,pmf", &int_range(&a.k)?, |&k| cowan_count_pmf(a.rate, a.t, k)),
        Table::NuPmf(a) => csv("k,pmf", &int_range(&a.k)?, |&k| nu_pmf(a.rate, a.t, k)),
        Table::CowanSumCdf { rate, n, t } => {
            csv("t,cdf", &real_grid(t)?, |&t| cowan_sum_cdf(*rate, *n, t))
        }
        Table::WaitingPmf { n, l_k, k, ell } => {
            let k = k.unwrap_or_else(|| (l_k.ceil().max(1.0) as u64).min(*n));
            csv("l,pmf", &int_range(ell)?, |&ell| discrete_waiting_pmf(*n, k, *l_k, ell))
        }
        Table::JumpPmf { l, ell, n } => {
            let l = l_sequence(l, 1.0)?;
            let ell = ell.unwrap_or(l.len());
            csv("n,pmf", &int_range(n)?, |&n| discrete_jump_pmf(&l, ell, n))
        }
        Table::MeckeTail {
            l,
            ell,
            rate,
            t,
            tail_bound,
            max_terms,
        } => {
            let l = l_sequence(l, *rate)?;
            let ell = ell.unwrap_or(l.len());
            let policy = TruncationPolicy::new(*tail_bound, *max_terms).map_err(eval)?;
            csv("t,tail", &real_grid(t)?, |&t| mecke_jump_tail(&l, ell, t, &policy))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(real_grid("0:2:0.1").unwrap().len(), 21);
        assert_eq!(real_grid("0:1:0.3").unwrap().len(), 4);
        assert_eq!(real_grid("0.5,1").unwrap(), vec![0.5, 1.0]);
        assert!(real_grid("1:0:0.1").is_err());
        assert!(real_grid("0:1:0").is_err());
        assert_eq!(int_range("0:10").unwrap().len(), 11);
        assert_eq!(int_range("3").unwrap(), vec![3]);
        assert!(int_range("-1:3").is_err());
    }
}

//! Resimulation of jump times for a frozen cell configuration.
//!
//! Given the configuration sequence, the jump-time laws of all models depend
//! on it only through the L-sequence, so the geometry can be dropped and only
//! the clock layer simulated:
//!
//! * STIT: the `k`-th waiting time is `Exp(Λ([W]) · L_k)`.
//! * Mecke, discrete time: with `k` cells, decision `n` jumps with
//!   probability `L_k / n`.
//! * Mecke, continuous time: the discrete chain run for the number of
//!   decisions the clock makes up to `t`.
//!
//! Counts are censored at `ℓ = L.len()` because the configuration after the
//! `ℓ`-th jump is unknown.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::cowan::{ClockKind, DecisionClock};
use super::LSequence;

/// Jump times `t_1 < ... < t_ℓ` of STIT given `L`.
pub fn stit_jump_times<R: Rng + ?Sized>(l: &LSequence, rng: &mut R) -> Vec<f64> {
    let mut t = 0.0;
    l.values()
        .iter()
        .map(|&lk| {
            t += Exp::new(l.rate() * lk).expect("positive rate").sample(rng);
            t
        })
        .collect()
}

/// STIT jumps in `[0, t]`, censored at `ℓ`.
pub fn stit_jump_count<R: Rng + ?Sized>(l: &LSequence, t: f64, rng: &mut R) -> usize {
    let mut s = 0.0;
    for (k, &lk) in l.values().iter().enumerate() {
        s += Exp::new(l.rate() * lk).expect("positive rate").sample(rng);
        if s > t {
            return k;
        }
    }
    l.len()
}

/// Discrete jump times `X_1, X_2, ...` of Mecke's chain given `L`, up to
/// decision `max_decisions`. Jumps beyond the cap are not reported.
pub fn mecke_discrete_jump_times<R: Rng + ?Sized>(
    l: &LSequence,
    max_decisions: u64,
    rng: &mut R,
) -> Vec<u64> {
    let mut times = Vec::with_capacity(l.len());
    let mut n = 0u64;
    while times.len() < l.len() && n < max_decisions {
        n += 1;
        let lk = l.get(times.len() + 1);
        if rng.gen::<f64>() * (n as f64) < lk {
            times.push(n);
        }
    }
    times
}

/// Mecke jumps after `decisions` decisions, censored at `ℓ`.
pub fn mecke_chain_jumps<R: Rng + ?Sized>(l: &LSequence, decisions: u64, rng: &mut R) -> usize {
    let mut jumps = 0usize;
    for n in 1..=decisions {
        if jumps == l.len() {
            break;
        }
        let lk = l.get(jumps + 1);
        if rng.gen::<f64>() * (n as f64) < lk {
            jumps += 1;
        }
    }
    jumps
}

/// Jumps of Mecke's continuous-time process in `[0, t]`, censored at `ℓ`.
///
/// Clock ticks and chain decisions are interleaved so that the run stops as
/// soon as the count is censored.
pub fn mecke_continuous_jump_count<R: Rng + ?Sized>(
    l: &LSequence,
    t: f64,
    clock: ClockKind,
    rng: &mut R,
) -> usize {
    let mut c = DecisionClock::new(l.rate(), clock);
    let mut jumps = 0usize;
    while jumps < l.len() && c.next_tick(rng) <= t {
        let lk = l.get(jumps + 1);
        if rng.gen::<f64>() * (c.ticks() as f64) < lk {
            jumps += 1;
        }
    }
    jumps
}

//! Monte Carlo comparison of STIT with Mecke's continuous-time process.
//!
//! Every replica draws from its own stream `rng::stream(seed, channel, i)`,
//! and results are collected in replica order, so reports do not depend on
//! thread scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gof::{chi_square_gof, histogram, two_sample_chi_square, ChiSquare};
use super::{StatsError, VerificationReport};
use crate::distributions::{mecke_jump_tail, nu_pmf, stit_jump_cdf, TruncationPolicy};
use crate::geometry::{ConvexPolygon, Line};
use crate::line_measure::LineMeasure;
use crate::processes::conditional::{mecke_continuous_jump_count, stit_jump_count};
use crate::processes::cowan::{ClockKind, DecisionClock};
use crate::processes::mecke::{MeckeContinuous, QuasiCellState};
use crate::processes::stit::Stit;
use crate::processes::{l_sequence, stit::stit_simulate, LSequence, StopRule};
use crate::rng;

const CH_CONDITIONAL: u64 = 1;
const CH_STIT: u64 = 2;
const CH_MECKE: u64 = 3;
const CH_COWAN: u64 = 4;
const CH_SELECTION: u64 = 5;
const CH_CONFIGS: u64 = 6;

/// Parameters of [`run_equivalence_suite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub window: ConvexPolygon,
    pub measure: LineMeasure,
    pub times: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    /// Clock driving Mecke's decisions and the equally-likely counts.
    pub clock: ClockKind,
    /// Significance level of the stochastic checks.
    pub alpha: f64,
    /// Absolute tolerance of the deterministic identity check.
    pub identity_tolerance: f64,
    /// Frozen configurations for the conditional check.
    pub conditional_sequences: usize,
    /// Jumps per frozen configuration.
    pub conditional_length: usize,
    pub selection_events: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            window: ConvexPolygon::unit_square(),
            measure: LineMeasure::isotropic(1.0).expect("valid scale"),
            times: vec![0.2, 0.5, 1.0],
            replicas: 20_000,
            seed: 1,
            clock: ClockKind::Cowan,
            alpha: 1e-3,
            identity_tolerance: 1e-6,
            conditional_sequences: 2,
            conditional_length: 4,
            selection_events: 100_000,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), StatsError> {
        let bad = |m: String| Err(StatsError::InvalidInput(m));
        self.window
            .validate()
            .map_err(|e| StatsError::InvalidInput(e.to_string()))?;
        if self.times.is_empty() || self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return bad(format!("bad time grid {:?}", self.times));
        }
        if self.replicas < 10 {
            return bad(format!("need at least 10 replicas, got {}", self.replicas));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.identity_tolerance > 0.0) {
            return bad("identity tolerance must be positive".into());
        }
        if self.conditional_length == 0 || self.conditional_length > 8 {
            return bad("conditional_length must lie in 1..=8".into());
        }
        if let ClockKind::WrongRateMutant(f) = self.clock {
            if !(f > 0.0 && f.is_finite()) {
                return bad(format!("bad rate factor {f}"));
            }
        }
        Ok(())
    }

    fn rate(&self) -> f64 {
        self.measure.hitting_measure(&self.window)
    }
}

/// Runs `f` for every replica index in parallel, in a deterministic order.
fn replicate<T: Send>(n: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    (0..n as u64).into_par_iter().map(f).collect()
}

/// Chi-square against a pmf, treating a sample concentrated on a single
/// bin that also holds all the expected mass as a perfect fit.
fn gof_report(
    name: String,
    counts: &[u64],
    pmf: impl Fn(usize) -> f64,
    alpha: f64,
    seed: u64,
) -> VerificationReport {
    let n: u64 = counts.iter().sum();
    match chi_square_gof(counts, &pmf, 5.0) {
        Ok(ChiSquare {
            statistic, p_value, ..
        }) => VerificationReport::with_p_value(name, statistic, p_value, alpha, n, seed),
        Err(StatsError::DegenerateBins(_)) if trivially_concentrated(counts, &pmf) => {
            VerificationReport::with_p_value(name, 0.0, 1.0, alpha, n, seed)
        }
        Err(e) => VerificationReport::errored(name, e, alpha, seed),
    }
}

fn trivially_concentrated(counts: &[u64], pmf: impl Fn(usize) -> f64) -> bool {
    let occupied: Vec<usize> = (0..counts.len()).filter(|&k| counts[k] > 0).collect();
    occupied.len() == 1 && pmf(occupied[0]) > 1.0 - 1e-12
}

fn two_sample_report(name: String, a: &[u64], b: &[u64], alpha: f64, seed: u64) -> VerificationReport {
    let n = a.iter().chain(b).sum();
    match two_sample_chi_square(a, b) {
        Ok(r) => VerificationReport::with_p_value(name, r.statistic, r.p_value, alpha, n, seed),
        Err(StatsError::DegenerateBins(_))
            if a.iter().filter(|&&c| c > 0).count() <= 1 && histograms_agree_on_support(a, b) =>
        {
            VerificationReport::with_p_value(name, 0.0, 1.0, alpha, n, seed)
        }
        Err(e) => VerificationReport::errored(name, e, alpha, seed),
    }
}

fn histograms_agree_on_support(a: &[u64], b: &[u64]) -> bool {
    let support = |h: &[u64]| -> Vec<usize> { (0..h.len()).filter(|&k| h[k] > 0).collect() };
    support(a) == support(b)
}

fn mean_and_var(values: &[usize]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    let var = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Probability that exactly `j` of the `ℓ` jumps happened by `t`
/// (`j = ℓ` meaning at least `ℓ`), from a CDF of the `j`-th jump time.
fn censored_pmf(
    len: usize,
    t: f64,
    cdf: impl Fn(usize) -> Result<f64, crate::distributions::DistributionError>,
) -> Result<Vec<f64>, crate::distributions::DistributionError> {
    let mut tails = vec![1.0];
    for j in 1..=len {
        tails.push(if t == 0.0 { 0.0 } else { cdf(j)? });
    }
    let mut pmf: Vec<f64> = (0..len).map(|j| (tails[j] - tails[j + 1]).max(0.0)).collect();
    pmf.push(tails[len]);
    Ok(pmf)
}

/// Draws frozen configurations from STIT traces, skipping seeds whose
/// L-sequence collides.
fn frozen_sequences(config: &SuiteConfig) -> Vec<LSequence> {
    let mut out = Vec::new();
    let mut replica = 0;
    while out.len() < config.conditional_sequences && replica < 1000 {
        let mut r = rng::stream(config.seed, CH_CONFIGS, replica);
        replica += 1;
        let Ok(trace) = stit_simulate(
            &config.window,
            &config.measure,
            StopRule::MaxJumps(config.conditional_length - 1),
            config.seed,
            &mut r,
        ) else {
            continue;
        };
        if let Ok(l) = l_sequence(&trace) {
            out.push(l);
        }
    }
    out
}

fn conditional_reports(config: &SuiteConfig) -> Vec<VerificationReport> {
    let mut reports = Vec::new();
    let policy = TruncationPolicy::default();
    let seed = config.seed;
    for (s, l) in frozen_sequences(config).iter().enumerate() {
        let len = l.len();
        for (ti, &t) in config.times.iter().enumerate() {
            let tag = format!("conditional[L#{s}, t={t}]");
            let channel = CH_CONDITIONAL + 16 * (s as u64 * 64 + ti as u64 + 1);
            let stit: Vec<usize> = replicate(config.replicas, |i| {
                stit_jump_count(l, t, &mut rng::stream(seed, channel, i))
            });
            let mecke: Vec<usize> = replicate(config.replicas, |i| {
                mecke_continuous_jump_count(l, t, config.clock, &mut rng::stream(seed, channel + 1, i))
            });
            let hs = histogram(stit, len + 1);
            let hm = histogram(mecke, len + 1);
            match censored_pmf(len, t, |j| stit_jump_cdf(l, j, t)) {
                Ok(p) => reports.push(gof_report(format!("{tag} STIT vs law"), &hs, |k| p[k], config.alpha, seed)),
                Err(e) => reports.push(VerificationReport::errored(format!("{tag} STIT vs law"), e, config.alpha, seed)),
            }
            match censored_pmf(len, t, |j| mecke_jump_tail(l, j, t, &policy)) {
                Ok(p) => reports.push(gof_report(format!("{tag} Mecke vs law"), &hm, |k| p[k], config.alpha, seed)),
                Err(e) => reports.push(VerificationReport::errored(format!("{tag} Mecke vs law"), e, config.alpha, seed)),
            }
            reports.push(two_sample_report(format!("{tag} STIT vs Mecke"), &hs, &hm, config.alpha, seed));
        }
    }
    reports
}

fn stit_cell_count(config: &SuiteConfig, t: f64, replica: u64) -> Result<usize, String> {
    let mut r = rng::stream(config.seed, CH_STIT, replica);
    let mut stit = Stit::new(&config.window, &config.measure);
    while stit.step(t, &mut r).map_err(|e| e.to_string())?.is_some() {}
    Ok(stit.cells().len())
}

fn mecke_cell_count(config: &SuiteConfig, t: f64, replica: u64) -> Result<usize, String> {
    let mut r = rng::stream(config.seed, CH_MECKE, replica);
    let mut m = MeckeContinuous::new(&config.window, &config.measure, config.clock, config.seed, &mut r);
    m.advance_to(t).map_err(|e| e.to_string())?;
    Ok(m.state().cell_count())
}

fn unconditional_reports(config: &SuiteConfig) -> Vec<VerificationReport> {
    let mut reports = Vec::new();
    let seed = config.seed;
    for &t in &config.times {
        let tag = format!("unconditional[t={t}]");
        let stit: Result<Vec<usize>, String> =
            replicate(config.replicas, |i| stit_cell_count(config, t, i)).into_iter().collect();
        let mecke: Result<Vec<usize>, String> =
            replicate(config.replicas, |i| mecke_cell_count(config, t, i)).into_iter().collect();
        let (stit, mecke) = match (stit, mecke) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                reports.push(VerificationReport::errored(format!("{tag} cell counts"), e, config.alpha, seed));
                continue;
            }
        };
        let (ms, vs) = mean_and_var(&stit);
        let (mm, vm) = mean_and_var(&mecke);
        let se = (vs / stit.len() as f64 + vm / mecke.len() as f64).sqrt();
        let z = if se > 0.0 { (ms - mm).abs() / se } else if ms == mm { 0.0 } else { f64::INFINITY };
        let hs = histogram(stit.iter().copied(), 1);
        let hm = histogram(mecke.iter().copied(), 1);
        reports.push(two_sample_report(format!("{tag} cell counts"), &hs, &hm, config.alpha, seed));
        reports.push(VerificationReport::with_bound(
            format!("{tag} mean difference in sigmas"),
            z,
            3.0,
            (stit.len() + mecke.len()) as u64,
            seed,
        ));
    }
    reports
}

fn clock_count(rate: f64, t: f64, kind: ClockKind, r: &mut rng::SimRng) -> usize {
    let mut clock = DecisionClock::new(rate, kind);
    let mut n = 0;
    while clock.next_tick(r) <= t {
        n += 1;
    }
    n
}

fn cowan_reports(config: &SuiteConfig) -> Vec<VerificationReport> {
    let rate = config.rate();
    let seed = config.seed;
    config
        .times
        .iter()
        .enumerate()
        .map(|(ti, &t)| {
            let counts = replicate(config.replicas, |i| {
                clock_count(rate, t, config.clock, &mut rng::stream(seed, CH_COWAN + 16 * ti as u64, i))
            });
            let h = histogram(counts, 1);
            gof_report(
                format!("equally-likely[t={t}] N_t vs geometric"),
                &h,
                |k| nu_pmf(rate, t, k as u64).unwrap_or(f64::NAN),
                config.alpha,
                seed,
            )
        })
        .collect()
}

/// Largest `|P(η(t) ≥ ℓ) - P(t_ℓ ≤ t)|` over a fixed grid of configurations,
/// lengths and times.
pub fn identity_reports(tolerance: f64, seed: u64) -> Vec<VerificationReport> {
    let grid: [&[f64]; 4] = [
        &[1.0, 1.5, 2.2, 2.8],
        &[1.0, 1.2, 1.9, 2.5, 3.6, 4.1],
        &[1.0, 1.9, 2.9, 3.95],
        &[1.0, 1.05, 1.6, 2.3, 2.35, 3.8, 4.4, 5.2],
    ];
    let policy = TruncationPolicy::new(1e-10, 50_000_000).expect("valid policy");
    let mut worst: f64 = 0.0;
    let mut cases = 0u64;
    let mut failure = None;
    for values in grid {
        for &rate in &[0.5, 1.0, 4.0] {
            let l = LSequence::new(values.to_vec(), rate).expect("valid grid sequence");
            for &t in &[0.1, 0.3, 1.0, 3.0] {
                for ell in 1..=l.len() {
                    cases += 1;
                    match (mecke_jump_tail(&l, ell, t, &policy), stit_jump_cdf(&l, ell, t)) {
                        (Ok(a), Ok(b)) => worst = worst.max((a - b).abs()),
                        (Err(e), _) | (_, Err(e)) => failure = Some(e),
                    }
                }
            }
        }
    }
    let name = "identity: Mecke jump tail vs STIT jump-time CDF";
    let report = match failure {
        Some(e) => VerificationReport::errored(name, e, tolerance, seed),
        None => VerificationReport::with_bound(name, worst, tolerance, cases, seed),
    };
    vec![report]
}

/// The fixed three-cell configuration used by the selection check: the
/// window cut by a vertical line and one half cut again horizontally.
fn three_cells(window: &ConvexPolygon) -> Result<Vec<ConvexPolygon>, String> {
    let verts = window.vertices();
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for v in verts {
        lo_x = lo_x.min(v.x);
        hi_x = hi_x.max(v.x);
        lo_y = lo_y.min(v.y);
        hi_y = hi_y.max(v.y);
    }
    let x = lo_x + 0.37 * (hi_x - lo_x);
    let first = window.split(&Line::vertical(x)).map_err(|e| e.to_string())?;
    let (Some(a), Some(b)) = (first.positive, first.negative) else {
        return Err("first cut missed the window".into());
    };
    let y = lo_y + 0.41 * (hi_y - lo_y);
    let second = b.split(&Line::horizontal(y)).map_err(|e| e.to_string())?;
    let (Some(c), Some(d)) = (second.positive, second.negative) else {
        return Err("second cut missed the cell".into());
    };
    Ok(vec![a, c, d])
}

fn selection_reports(config: &SuiteConfig) -> Vec<VerificationReport> {
    let name = "selection: split frequencies vs hitting-measure shares";
    let seed = config.seed;
    let cells = match three_cells(&config.window) {
        Ok(c) => c,
        Err(e) => return vec![VerificationReport::errored(name, e, config.alpha, seed)],
    };
    let weights: Vec<f64> = cells.iter().map(|c| config.measure.hitting_measure(c)).collect();
    let total: f64 = weights.iter().sum();
    let mut quasi: Vec<Option<ConvexPolygon>> = cells.into_iter().map(Some).collect();
    quasi.push(None);
    let state = QuasiCellState::from_quasi_cells(quasi);
    let per_replica = 100usize;
    let chunks = config.selection_events.div_ceil(per_replica);
    let results: Result<Vec<Vec<usize>>, String> = replicate(chunks, |i| {
        let mut r = rng::stream(seed, CH_SELECTION, i);
        let mut hits = Vec::with_capacity(per_replica);
        while hits.len() < per_replica {
            let mut s = state.clone();
            let d = s.step(&config.window, &config.measure, &mut r).map_err(|e| e.to_string())?;
            if d.jump {
                hits.push(d.selected);
            }
        }
        Ok(hits)
    })
    .into_iter()
    .collect();
    let report = match results {
        Ok(chunks) => {
            let h = histogram(chunks.into_iter().flatten().take(config.selection_events), 3);
            gof_report(name.to_string(), &h, |k| weights[k] / total, config.alpha, seed)
        }
        Err(e) => VerificationReport::errored(name, e, config.alpha, seed),
    };
    vec![report]
}

/// Runs the five checks (conditional, unconditional, equally-likely counts,
/// identity, selection) and returns one report per comparison. Failures of
/// individual checks are reported, not propagated.
pub fn run_equivalence_suite(config: &SuiteConfig) -> Result<Vec<VerificationReport>, StatsError> {
    config.validate()?;
    let mut reports = conditional_reports(config);
    reports.extend(unconditional_reports(config));
    reports.extend(cowan_reports(config));
    reports.extend(identity_reports(config.identity_tolerance, config.seed));
    reports.extend(selection_reports(config));
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn censored_pmf_sums_to_one() {
        let l = LSequence::new(vec![1.0, 1.5, 2.2], 4.0).unwrap();
        let p = censored_pmf(3, 0.3, |j| stit_jump_cdf(&l, j, 0.3)).unwrap();
        assert_eq!(p.len(), 4);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let p = censored_pmf(3, 0.0, |j| stit_jump_cdf(&l, j, 0.0)).unwrap();
        assert_eq!(p, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn three_cells_tile_the_window() {
        let w = ConvexPolygon::unit_square();
        let cells = three_cells(&w).unwrap();
        assert_eq!(cells.len(), 3);
        let area: f64 = cells.iter().map(|c| c.area()).sum();
        assert!((area - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_time_grid_passes_trivially() {
        let config = SuiteConfig {
            times: vec![0.0],
            replicas: 200,
            selection_events: 2000,
            ..SuiteConfig::default()
        };
        let reports = run_equivalence_suite(&config).unwrap();
        for r in &reports {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let config = SuiteConfig {
            times: vec![0.3],
            replicas: 500,
            selection_events: 2000,
            seed: 9,
            ..SuiteConfig::default()
        };
        let a = run_equivalence_suite(&config).unwrap();
        let b = run_equivalence_suite(&config).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn config_validation() {
        assert!(SuiteConfig::default().validate().is_ok());
        let bad = SuiteConfig {
            times: vec![-1.0],
            ..SuiteConfig::default()
        };
        assert!(bad.validate().is_err());
        let json = r#"{"replicas": 100, "bogus": 1}"#;
        assert!(serde_json::from_str::<SuiteConfig>(json).is_err());
        let json = r#"{"replicas": 100, "times": [0.5]}"#;
        let c: SuiteConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.replicas, 100);
        assert_eq!(c.window, ConvexPolygon::unit_square());
    }
}

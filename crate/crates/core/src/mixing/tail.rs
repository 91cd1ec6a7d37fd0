//! Tails and moments of the total division rate ζ(Y_t ∧ W').
//!
//! The rate of the restricted process is bounded by Λ([W']) times the number
//! of cells, and the cell count is stochastically dominated by a pure birth
//! chain B_t with constant rate q = Λ([W']) started at 1 (each division adds
//! one cell, at total rate ≤ q·cells). The chain's law is geometric,
//! P(B_t = l) = e^{-qt}(1 - e^{-qt})^{l-1}, with closed moments at hand —
//! the analytic envelope used to cap p_tail in the β bounds.

use crate::error::Result;
use crate::geometry::Window;
use crate::measure::HyperplaneMeasure;
use crate::rng::Streams;
use crate::stats::binom_stderr;
use crate::stit::{NoopObserver, TessellationState};
use rayon::prelude::*;

/// Draws `n` independent samples of ζ(Y_t) for the process run in `window`
/// (restriction consistency makes this the law of ζ(Y_t ∧ window) for any
/// enclosing run). Parallel, with one ChaCha stream per replicate.
pub fn zeta_samples(
    measure: &HyperplaneMeasure,
    window: &Window,
    t: f64,
    n: usize,
    streams: &Streams,
    label: u64,
) -> Result<Vec<f64>> {
    (0..n)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut rng = streams.stream(label, i as u64);
            let mut state = TessellationState::new(measure, window)?;
            state.set_jump_logging(false);
            state.advance(measure, t, &mut rng, &mut NoopObserver)?;
            Ok(state.zeta())
        })
        .collect()
}

/// Empirical tail P̂(X ≥ cap) with its binomial standard error.
pub fn tail_fraction(samples: &[f64], cap: f64) -> (f64, f64) {
    let hits = samples.iter().filter(|&&x| x >= cap).count();
    let p = hits as f64 / samples.len() as f64;
    (p, binom_stderr(p, samples.len()))
}

/// Markov bound P(X ≥ cap) ≤ E[X^r]/cap^r, with the moment estimated from
/// the same samples.
pub fn markov_tail_bound(samples: &[f64], r: i32, cap: f64) -> f64 {
    let moment = samples.iter().map(|x| x.powi(r)).sum::<f64>() / samples.len() as f64;
    moment / cap.powi(r)
}

/// The smallest sample value M with P̂(X < M) > 1 - ε: take the empirical
/// (1-ε) quantile and step just past it. Always finite on finite samples.
pub fn threshold_for(samples: &[f64], eps: f64) -> f64 {
    assert!(!samples.is_empty() && eps > 0.0 && eps < 1.0);
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let idx = (((1.0 - eps) * s.len() as f64).ceil() as usize).min(s.len() - 1);
    s[idx] * (1.0 + 1e-12) + 1e-300
}

/// P(B_t ≥ m) for the unit-start birth chain with rate q: the chain's law is
/// geometric with success probability e^{-qt}, so the tail at integer l is
/// (1 - e^{-qt})^{l-1}; non-integer thresholds round up.
pub fn birth_chain_tail(q: f64, t: f64, m: f64) -> f64 {
    if m <= 1.0 {
        return 1.0;
    }
    let l = m.ceil() as i64;
    let x = 1.0 - (-q * t).exp();
    x.powi((l - 1) as i32)
}

/// E[B_t^r] = e^{-qt} Σ_{l≥1} l^r (1 - e^{-qt})^{l-1}, summed to relative
/// tolerance 1e-12 (the closed form e^{qt} is recovered at r = 1). The tail
/// beyond the truncation is bounded through the geometric ratio, so the
/// reported value is accurate to the stated tolerance.
pub fn birth_chain_moment(q: f64, t: f64, r: u32) -> f64 {
    assert!(q > 0.0 && t >= 0.0, "birth chain needs q > 0, t ≥ 0");
    let p = (-q * t).exp();
    let x = 1.0 - p;
    if r == 1 {
        return (q * t).exp();
    }
    if x == 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut pow = 1.0; // x^{l-1}
    for l in 1..10_000_000u64 {
        let term = (l as f64).powi(r as i32) * pow;
        sum += term;
        // Geometric-dominated tail: once l is past r/(1-x)-ish the ratio of
        // consecutive terms stays below (1 + r/l)·x; stop when the bound on
        // the whole remaining tail is negligible.
        let ratio = (1.0 + r as f64 / l as f64) * x;
        if ratio < 1.0 {
            let tail = term * ratio / (1.0 - ratio);
            if tail < 1e-12 * sum {
                break;
            }
        }
        pow *= x;
    }
    p * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn birth_chain_first_moment_is_exponential() {
        assert!((birth_chain_moment(1.0, 2.0f64.ln(), 1) - 2.0).abs() < 1e-12);
        for (q, t) in [(0.5, 1.0), (4.0, 0.5), (2.0, 2.0)] {
            let m = birth_chain_moment(q, t, 1);
            assert!((m - (q * t).exp()).abs() < 1e-10 * (q * t).exp());
        }
    }

    #[test]
    fn birth_chain_second_moment_closed_form() {
        // E[B²] = 2e^{2qt} - e^{qt} for the geometric law.
        for (q, t) in [(1.0, 0.3), (4.0, 0.5), (2.0, 1.0)] {
            let m2 = birth_chain_moment(q, t, 2);
            let closed = 2.0 * (2.0 * q * t).exp() - (q * t).exp();
            assert!(
                (m2 - closed).abs() < 1e-9 * closed,
                "q={q}, t={t}: {m2} vs {closed}"
            );
        }
    }

    #[test]
    fn birth_chain_tail_values() {
        assert_eq!(birth_chain_tail(1.0, 1.0, 1.0), 1.0);
        assert_eq!(birth_chain_tail(1.0, 1.0, 0.5), 1.0);
        let x = 1.0 - (-2.0f64).exp();
        assert!((birth_chain_tail(2.0, 1.0, 3.0) - x * x).abs() < 1e-15);
        // Non-integer thresholds round up: P(B ≥ 2.2) = P(B ≥ 3).
        assert_eq!(birth_chain_tail(2.0, 1.0, 2.2), birth_chain_tail(2.0, 1.0, 3.0));
    }

    #[test]
    fn degenerate_time_gives_unit_mass_at_one() {
        for r in 1..=4 {
            assert!((birth_chain_moment(3.0, 0.0, r) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_fraction_and_threshold() {
        let samples: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let (p, se) = tail_fraction(&samples, 91.0);
        assert!((p - 0.10).abs() < 1e-12);
        assert!(se > 0.0);
        let m = threshold_for(&samples, 0.1);
        let below = samples.iter().filter(|&&x| x < m).count() as f64 / 100.0;
        assert!(below > 0.9, "below = {below}");
        assert!(m <= 100.0 * (1.0 + 1e-9));
    }

    #[test]
    fn markov_dominates_empirical_tail_for_these_samples() {
        let samples: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        for cap in [50.0, 80.0, 95.0] {
            let (p, _) = tail_fraction(&samples, cap);
            assert!(markov_tail_bound(&samples, 2, cap) >= p - 1e-12);
        }
    }

    #[test]
    fn zeta_samples_start_at_the_window_rate() {
        // At t = 0 every sample is exactly Λ([W']).
        let m = HyperplaneMeasure::axis_unit(2).unwrap();
        let w = Window::new(1.0, 2).unwrap();
        let streams = Streams::new(5);
        let samples = zeta_samples(&m, &w, 0.0, 8, &streams, 3).unwrap();
        assert!(samples.iter().all(|&z| (z - 4.0).abs() < 1e-12));
    }
}

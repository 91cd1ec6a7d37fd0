//! The decay experiment: dependence versus window separation.
//!
//! Fix the inner window and the observation time, and sweep the outer
//! half-width b. Each grid point gets (i) the probe-partition lower estimate
//! β̂ and (ii) the analytic upper bound minimized over the scaling family
//! s = b^{-u}, M = b^{v} — the parameterization under which the bound decays
//! polynomially in b. The summary fits log-log slopes to both curves.

use crate::error::{Error, Result};
use crate::measure::{HyperplaneMeasure, SeparatingFamily};
use crate::mixing::bounds::{beta_upper_bound, beta_upper_bound_raw, BetaBoundInputs};
use crate::mixing::estimator::{beta_hat, BetaEstimate, ProbePartition};
use crate::mixing::tail::{tail_fraction, zeta_samples};
use crate::rng::{labels, Streams};
use crate::stats::{linear_fit, spearman_rho};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayConfig {
    /// Inner window half-width a.
    pub a: f64,
    /// Observation time t.
    pub t: f64,
    /// Increasing outer half-widths, all > a.
    pub b_grid: Vec<f64>,
    /// Horizon exponents: s = b^{-u}.
    pub u_grid: Vec<f64>,
    /// Cap exponents: M = b^{v}.
    pub v_grid: Vec<f64>,
    /// Simulation window half-width as a multiple of b.
    pub margin: f64,
    /// Replicates per grid point for β̂.
    pub replicates: usize,
    /// Replicates for the ζ tail sample (shared across the grid).
    pub tail_replicates: usize,
}

impl DecayConfig {
    /// The standard sweep: b ∈ {4, 8, 16, 32, 64}·a with the proof-scaling
    /// exponent grids u ∈ {0.7, 0.8, 0.9}, v ∈ {0.2, 0.3}.
    pub fn standard(a: f64, t: f64) -> Self {
        DecayConfig {
            a,
            t,
            b_grid: [4.0, 8.0, 16.0, 32.0, 64.0].iter().map(|r| r * a).collect(),
            u_grid: vec![0.7, 0.8, 0.9],
            v_grid: vec![0.2, 0.3],
            margin: 2.0,
            replicates: 10_000,
            tail_replicates: 20_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.t > 0.0) {
            return Err(Error::invalid("a and t must be positive"));
        }
        if self.b_grid.is_empty()
            || self.b_grid.windows(2).any(|w| w[1] <= w[0])
            || self.b_grid[0] <= self.a
        {
            return Err(Error::invalid("b grid must be increasing with all b > a"));
        }
        if self.u_grid.is_empty() || self.v_grid.is_empty() {
            return Err(Error::invalid("exponent grids must be nonempty"));
        }
        if !(self.margin > 1.0) {
            return Err(Error::invalid("margin must exceed 1"));
        }
        if self.replicates == 0 || self.tail_replicates == 0 {
            return Err(Error::invalid("replicate counts must be positive"));
        }
        Ok(())
    }
}

/// One grid point of the sweep.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DecayPoint {
    pub b: f64,
    /// Probe-partition lower estimate.
    pub beta: BetaEstimate,
    /// Best clamped upper bound over the (u, v) grid.
    pub bound: f64,
    /// Best unclamped bracket value over the grid (diagnostic).
    pub bound_raw: f64,
    /// Horizon achieving the clamped minimum.
    pub s_opt: f64,
    /// Cap achieving the clamped minimum.
    pub m_opt: f64,
    /// Tail probability at that cap.
    pub p_tail_opt: f64,
}

/// Slope fits over a completed sweep.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DecaySummary {
    /// OLS slope of log(bound) against log b.
    pub bound_slope: f64,
    /// OLS slope of log(max(β̂, 10⁻¹²)) against log b.
    pub beta_slope: f64,
    /// Spearman correlation of β̂ with b.
    pub beta_spearman: f64,
    /// Whether the optimized bound is non-increasing along the grid.
    pub bound_monotone: bool,
}

/// Runs the sweep. The ζ tail sample is drawn once (its law does not depend
/// on b) and reused for every cap on the grid.
pub fn decay_experiment(
    measure: &HyperplaneMeasure,
    cfg: &DecayConfig,
    streams: &Streams,
) -> Result<Vec<DecayPoint>> {
    cfg.validate()?;
    let inner = crate::geometry::Window::new(cfg.a, measure.dim())?;
    let lambda_inner = measure.lambda_hit(&inner.to_polytope());
    let zetas = zeta_samples(
        measure,
        &inner,
        cfg.t,
        cfg.tail_replicates,
        streams,
        labels::ZETA_TAIL,
    )?;

    let mut points = Vec::with_capacity(cfg.b_grid.len());
    for (bi, &b) in cfg.b_grid.iter().enumerate() {
        let family = SeparatingFamily::new(cfg.a, b, measure.dim())?;
        let big_l = family.min_class_measure(measure)?;

        let mut best: Option<(f64, f64, f64, f64, f64)> = None; // bound, raw, s, m, p_tail
        let mut best_raw = f64::INFINITY;
        for &u in &cfg.u_grid {
            let s = b.powf(-u);
            if s <= 0.0 || s >= cfg.t {
                continue;
            }
            for &v in &cfg.v_grid {
                let m_cap = b.powf(v);
                let (p_tail, _) = tail_fraction(&zetas, m_cap);
                let inp = BetaBoundInputs {
                    s,
                    m_cap,
                    p_tail,
                    lambda_inner,
                    big_l,
                    classes: family.class_count(),
                };
                inp.validate()?;
                let clamped = beta_upper_bound(&inp);
                let raw = beta_upper_bound_raw(&inp);
                best_raw = best_raw.min(raw);
                if best.is_none_or(|(c, ..)| clamped < c) {
                    best = Some((clamped, raw, s, m_cap, p_tail));
                }
            }
        }
        let (bound, _, s_opt, m_opt, p_tail_opt) = best.ok_or_else(|| {
            Error::invalid("no (u, v) grid point satisfies 0 < s < t; widen the grids")
        })?;

        let partition = ProbePartition::regular(cfg.a, b)?;
        let beta = beta_hat(
            measure,
            cfg.a,
            b,
            cfg.t,
            &partition,
            cfg.margin,
            cfg.replicates,
            streams,
            labels::BETA_HAT.wrapping_add(bi as u64 + 1),
        )?;

        points.push(DecayPoint {
            b,
            beta,
            bound,
            bound_raw: best_raw,
            s_opt,
            m_opt,
            p_tail_opt,
        });
    }
    Ok(points)
}

/// Slope and monotonicity summary of a completed sweep. Slopes and the
/// rank correlation need at least two scales and come back as NaN below
/// that; monotonicity of fewer than two points is vacuously true.
pub fn summarize(points: &[DecayPoint]) -> DecaySummary {
    if points.len() < 2 {
        return DecaySummary {
            bound_slope: f64::NAN,
            beta_slope: f64::NAN,
            beta_spearman: f64::NAN,
            bound_monotone: true,
        };
    }
    let logb: Vec<f64> = points.iter().map(|p| p.b.ln()).collect();
    let log_bound: Vec<f64> = points.iter().map(|p| p.bound.max(1e-300).ln()).collect();
    let log_beta: Vec<f64> = points
        .iter()
        .map(|p| p.beta.value.max(1e-12).ln())
        .collect();
    let bs: Vec<f64> = points.iter().map(|p| p.b).collect();
    let betas: Vec<f64> = points.iter().map(|p| p.beta.value).collect();
    DecaySummary {
        bound_slope: linear_fit(&logb, &log_bound).1,
        beta_slope: linear_fit(&logb, &log_beta).1,
        beta_spearman: spearman_rho(&bs, &betas),
        bound_monotone: points.windows(2).all(|w| w[1].bound <= w[0].bound + 1e-12),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut cfg = DecayConfig::standard(1.0, 1.0);
        cfg.validate().unwrap();
        cfg.b_grid = vec![4.0, 3.0];
        assert!(cfg.validate().is_err());
        let mut cfg = DecayConfig::standard(1.0, 1.0);
        cfg.b_grid = vec![0.5];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn tiny_sweep_mechanics() {
        let m = HyperplaneMeasure::axis_unit(2).unwrap();
        let cfg = DecayConfig {
            a: 1.0,
            t: 0.6,
            b_grid: vec![2.0, 3.0],
            u_grid: vec![0.8],
            v_grid: vec![0.3],
            margin: 2.0,
            replicates: 300,
            tail_replicates: 400,
        };
        let streams = Streams::new(7);
        let points = decay_experiment(&m, &cfg, &streams).unwrap();
        assert_eq!(points.len(), 2);
        for p in &points {
            assert!((0.0..=1.0).contains(&p.bound));
            assert!((0.0..=1.0).contains(&p.beta.value));
            assert!(p.s_opt > 0.0 && p.s_opt < cfg.t);
            assert!(p.p_tail_opt >= 0.0 && p.p_tail_opt <= 1.0);
        }
        let summary = summarize(&points);
        assert!(summary.bound_slope.is_finite());
        assert!(summary.beta_slope.is_finite());
    }
}

//! Lower estimates of the β-coefficient from probe partitions.
//!
//! Pick finitely many probe boxes strictly inside W' and finitely many in
//! the simulation window but strictly outside W. Each run yields a pair of
//! hitting patterns (which inner boxes were crossed by a cut, which outer
//! ones); β restricted to the two pattern partitions is
//! ½ Σᵢⱼ |P(Eᵢ ∩ Aⱼ) − P(Eᵢ)P(Aⱼ)|, a lower bound for the full coefficient
//! because finite partitions can only approach the defining supremum from
//! below.

use crate::error::{Error, Result};
use crate::geometry::{segment_meets_open_box, Window};
use crate::measure::HyperplaneMeasure;
use crate::rng::{labels, Streams};
use crate::stit::{JumpEvent, JumpObserver, TessellationState};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Default minimum marginal count below which patterns merge into a pooled
/// atom; keeps the contingency table away from empty-cell noise.
pub const MERGE_MIN: usize = 5;
/// Default bootstrap resample count for the standard error.
pub const BOOTSTRAP_RESAMPLES: usize = 200;
/// Sentinel label for the pooled rare-pattern atom.
const POOLED: u32 = u32::MAX;

/// Open axis-aligned probe box.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProbeBox {
    pub center: [f64; 2],
    pub half: f64,
}

impl ProbeBox {
    pub fn meets(&self, seg: &[[f64; 2]; 2]) -> bool {
        segment_meets_open_box(seg, self.center, self.half)
    }
}

/// A pair of probe families: `inner` boxes inside W', `outer` boxes outside
/// W (within the simulation window).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbePartition {
    inner: Vec<ProbeBox>,
    outer: Vec<ProbeBox>,
}

impl ProbePartition {
    pub fn new(inner: Vec<ProbeBox>, outer: Vec<ProbeBox>) -> Result<Self> {
        if inner.is_empty() || outer.is_empty() {
            return Err(Error::invalid("both probe families must be nonempty"));
        }
        if inner.len() > 20 || outer.len() > 20 {
            return Err(Error::invalid("at most 20 probe boxes per side"));
        }
        if inner
            .iter()
            .chain(&outer)
            .any(|b| !(b.half > 0.0) || !b.center.iter().all(|c| c.is_finite()))
        {
            return Err(Error::invalid("probe boxes must be finite with half > 0"));
        }
        Ok(ProbePartition { inner, outer })
    }

    /// The default family: four inner boxes centered at (±a/2, ±a/2) with
    /// half-width a/4, four outer boxes at (±3b/2, 0), (0, ±3b/2) with
    /// half-width b/4.
    pub fn regular(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > a) {
            return Err(Error::invalid("probe layout needs 0 < a < b"));
        }
        let inner = [[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]]
            .iter()
            .map(|s| ProbeBox {
                center: [s[0] * a / 2.0, s[1] * a / 2.0],
                half: a / 4.0,
            })
            .collect();
        let outer = [[1.5, 0.0], [-1.5, 0.0], [0.0, 1.5], [0.0, -1.5]]
            .iter()
            .map(|s| ProbeBox {
                center: [s[0] * b, s[1] * b],
                half: b / 4.0,
            })
            .collect();
        ProbePartition::new(inner, outer)
    }

    pub fn inner_boxes(&self) -> &[ProbeBox] {
        &self.inner
    }

    pub fn outer_boxes(&self) -> &[ProbeBox] {
        &self.outer
    }

    /// Checks the measurability geometry: inner boxes strictly inside
    /// [-a, a]², outer boxes disjoint from [-b, b]² and strictly inside the
    /// simulation window.
    pub fn validate_against(&self, a: f64, b: f64, sim_half: f64) -> Result<()> {
        for bx in &self.inner {
            let reach = bx.center.iter().map(|c| c.abs()).fold(0.0, f64::max) + bx.half;
            if reach >= a {
                return Err(Error::invalid(format!(
                    "inner probe box at {:?} leaves the inner window",
                    bx.center
                )));
            }
        }
        for bx in &self.outer {
            let near = bx.center.iter().map(|c| c.abs()).fold(0.0, f64::max) - bx.half;
            let reach = bx.center.iter().map(|c| c.abs()).fold(0.0, f64::max) + bx.half;
            if near <= b {
                return Err(Error::invalid(format!(
                    "outer probe box at {:?} touches the middle window",
                    bx.center
                )));
            }
            if reach >= sim_half {
                return Err(Error::invalid(format!(
                    "outer probe box at {:?} leaves the simulation window",
                    bx.center
                )));
            }
        }
        Ok(())
    }
}

/// Accumulates the two hitting-pattern bitmasks along one run (planar runs:
/// patterns are defined by cut chords crossing open boxes).
pub struct ProbeObserver<'a> {
    partition: &'a ProbePartition,
    inner_mask: u32,
    outer_mask: u32,
}

impl<'a> ProbeObserver<'a> {
    pub fn new(partition: &'a ProbePartition) -> Self {
        ProbeObserver {
            partition,
            inner_mask: 0,
            outer_mask: 0,
        }
    }

    pub fn patterns(&self) -> (u32, u32) {
        (self.inner_mask, self.outer_mask)
    }
}

impl JumpObserver for ProbeObserver<'_> {
    fn on_jump(&mut self, ev: &JumpEvent) {
        let Some(chord) = ev.chord else { return };
        for (i, bx) in self.partition.inner.iter().enumerate() {
            if self.inner_mask >> i & 1 == 0 && bx.meets(chord) {
                self.inner_mask |= 1 << i;
            }
        }
        for (i, bx) in self.partition.outer.iter().enumerate() {
            if self.outer_mask >> i & 1 == 0 && bx.meets(chord) {
                self.outer_mask |= 1 << i;
            }
        }
    }
}

/// Lower β estimate with a bootstrap standard error.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub value: f64,
    pub stderr: f64,
    pub replicates: usize,
}

/// ½ Σᵢⱼ |p̂ᵢⱼ − p̂ᵢ·q̂ⱼ| over the joint pattern table of the given replicate
/// pairs. Patterns whose marginal count falls below `merge_min` are pooled
/// into a single atom per side first — coarsening partitions only lowers
/// the statistic, so the lower-bound reading survives merging.
pub fn beta_from_pairs(pairs: &[(u32, u32)], merge_min: usize) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyTable);
    }
    let n = pairs.len() as f64;
    let mut inner_marg: BTreeMap<u32, usize> = BTreeMap::new();
    let mut outer_marg: BTreeMap<u32, usize> = BTreeMap::new();
    for &(i, o) in pairs {
        *inner_marg.entry(i).or_insert(0) += 1;
        *outer_marg.entry(o).or_insert(0) += 1;
    }
    let pool = |marg: &BTreeMap<u32, usize>, x: u32| -> u32 {
        if marg[&x] < merge_min {
            POOLED
        } else {
            x
        }
    };
    let mut joint: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    let mut pi: BTreeMap<u32, usize> = BTreeMap::new();
    let mut qj: BTreeMap<u32, usize> = BTreeMap::new();
    for &(i, o) in pairs {
        let i = pool(&inner_marg, i);
        let o = pool(&outer_marg, o);
        *joint.entry((i, o)).or_insert(0) += 1;
        *pi.entry(i).or_insert(0) += 1;
        *qj.entry(o).or_insert(0) += 1;
    }
    let mut sum = 0.0;
    for (&i, &ci) in &pi {
        for (&o, &co) in &qj {
            let pij = joint.get(&(i, o)).copied().unwrap_or(0) as f64 / n;
            let indep = (ci as f64 / n) * (co as f64 / n);
            sum += (pij - indep).abs();
        }
    }
    Ok(sum / 2.0)
}

/// Point estimate plus bootstrap standard error over replicate pairs.
pub fn beta_with_bootstrap<R: Rng>(
    pairs: &[(u32, u32)],
    merge_min: usize,
    resamples: usize,
    rng: &mut R,
) -> Result<BetaEstimate> {
    let value = beta_from_pairs(pairs, merge_min)?;
    let n = pairs.len();
    let mut stats = Vec::with_capacity(resamples);
    let mut scratch = vec![(0u32, 0u32); n];
    for _ in 0..resamples {
        for slot in scratch.iter_mut() {
            *slot = pairs[rng.gen_range(0..n)];
        }
        stats.push(beta_from_pairs(&scratch, merge_min)?);
    }
    let mean = stats.iter().sum::<f64>() / resamples as f64;
    let var = stats.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (resamples - 1) as f64;
    Ok(BetaEstimate {
        value,
        stderr: var.sqrt(),
        replicates: n,
    })
}

/// Full pipeline: simulate `replicates` runs at time `t` in the simulation
/// window [-margin·b, margin·b]², record probe patterns, and return the β
/// lower estimate. Replicates are independent ChaCha streams of
/// (`label`, replicate index), so results are reproducible and
/// thread-count-independent; runs execute in parallel.
#[allow(clippy::too_many_arguments)]
pub fn beta_hat(
    measure: &HyperplaneMeasure,
    a: f64,
    b: f64,
    t: f64,
    partition: &ProbePartition,
    margin: f64,
    replicates: usize,
    streams: &Streams,
    label: u64,
) -> Result<BetaEstimate> {
    if measure.dim() != 2 {
        return Err(Error::Unsupported(
            "probe-pattern estimation is planar-only".into(),
        ));
    }
    let sim_half = margin * b;
    partition.validate_against(a, b, sim_half)?;
    let window = Window::new(sim_half, 2)?;
    let pairs: Vec<(u32, u32)> = (0..replicates)
        .into_par_iter()
        .map(|i| -> Result<(u32, u32)> {
            let mut rng = streams.stream(label, i as u64);
            let mut state = TessellationState::new(measure, &window)?;
            state.set_jump_logging(false);
            let mut obs = ProbeObserver::new(partition);
            state.advance(measure, t, &mut rng, &mut obs)?;
            Ok(obs.patterns())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut boot_rng = streams.stream(labels::BOOTSTRAP, label);
    beta_with_bootstrap(&pairs, MERGE_MIN, BOOTSTRAP_RESAMPLES, &mut boot_rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hand_table_value() {
        // Perfectly coupled binary patterns: P(E ∩ A) = P(E) = P(A) = ½
        // gives ½(|½−¼|·2 + |0−¼|·2) = ¼·2 = 0.5.
        let mut pairs = Vec::new();
        for _ in 0..50 {
            pairs.push((1u32, 1u32));
            pairs.push((0u32, 0u32));
        }
        let beta = beta_from_pairs(&pairs, 5).unwrap();
        assert!((beta - 0.5).abs() < 1e-12, "{beta}");
    }

    #[test]
    fn independent_table_is_near_zero() {
        // All four combinations equally often: exactly independent.
        let mut pairs = Vec::new();
        for _ in 0..25 {
            for i in 0..2u32 {
                for o in 0..2u32 {
                    pairs.push((i, o));
                }
            }
        }
        let beta = beta_from_pairs(&pairs, 5).unwrap();
        assert!(beta.abs() < 1e-12, "{beta}");
    }

    #[test]
    fn trivial_partition_gives_zero() {
        let pairs = vec![(0u32, 0u32); 100];
        assert!(beta_from_pairs(&pairs, 5).unwrap().abs() < 1e-15);
        assert!(beta_from_pairs(&[], 5).is_err());
    }

    #[test]
    fn merging_pools_rare_patterns() {
        // 98 copies of (0,0), one (7,3), one (5,2): the rare patterns pool
        // into one atom each side; the estimate stays finite and in [0,1].
        let mut pairs = vec![(0u32, 0u32); 98];
        pairs.push((7, 3));
        pairs.push((5, 2));
        let beta = beta_from_pairs(&pairs, 5).unwrap();
        assert!((0.0..=1.0).contains(&beta));
    }

    #[test]
    fn refinement_does_not_decrease_beta() {
        // Coarsen by dropping a bit of the inner pattern: β must not rise.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pairs: Vec<(u32, u32)> = (0..2000)
            .map(|_| {
                let hidden = rng.gen::<u32>() & 3;
                let noise = rng.gen::<u32>() & 1;
                (hidden, (hidden >> 1) ^ noise)
            })
            .collect();
        let fine = beta_from_pairs(&pairs, 1).unwrap();
        let coarse_pairs: Vec<(u32, u32)> =
            pairs.iter().map(|&(i, o)| (i & 1, o)).collect();
        let coarse = beta_from_pairs(&coarse_pairs, 1).unwrap();
        assert!(
            fine >= coarse - 1e-12,
            "fine {fine} must dominate coarse {coarse}"
        );
    }

    #[test]
    fn regular_layout_validates() {
        let p = ProbePartition::regular(1.0, 4.0).unwrap();
        assert_eq!(p.inner_boxes().len(), 4);
        assert_eq!(p.outer_boxes().len(), 4);
        p.validate_against(1.0, 4.0, 8.0).unwrap();
        // Outer boxes touch W when b shrinks under them.
        assert!(p.validate_against(1.0, 7.0, 8.0).is_err());
    }

    #[test]
    fn small_beta_hat_pipeline_runs() {
        let m = HyperplaneMeasure::axis_unit(2).unwrap();
        let part = ProbePartition::regular(1.0, 2.0).unwrap();
        let streams = Streams::new(99);
        let est = beta_hat(&m, 1.0, 2.0, 0.5, &part, 2.0, 400, &streams, 17).unwrap();
        assert!((0.0..=1.0).contains(&est.value), "{}", est.value);
        assert!(est.stderr >= 0.0 && est.stderr < 0.5);
        // Determinism across calls.
        let again = beta_hat(&m, 1.0, 2.0, 0.5, &part, 2.0, 400, &streams, 17).unwrap();
        assert_eq!(est.value, again.value);
        assert_eq!(est.stderr, again.stderr);
    }
}

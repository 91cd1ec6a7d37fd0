//! Separating hyperplane classes between two concentric cubic windows.
//!
//! For nested windows W' = [-a, a]^ℓ ⊂ W = [-b, b]^ℓ, the i-th class G_i
//! collects the hyperplanes separating facet i of W' from facet i of W.
//! These classes are pairwise disjoint, and the smallest of their measures
//! is the quantity L(a, b) that controls how fast a growing tessellation
//! walls the inner window off from the rest of space.

use crate::error::{Error, Result};
use crate::geometry::{separates, Hyperplane, SupportSet, VertexSet, Window};
use crate::measure::{integrate_circle, DirectionalDistribution, HyperplaneMeasure, QUAD_TOL};
use crate::EPS;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SeparatingFamily {
    inner: Window,
    outer: Window,
}

impl SeparatingFamily {
    /// Facet classes between [-a, a]^ℓ and [-b, b]^ℓ, 0 < a < b.
    pub fn new(a: f64, b: f64, dim: usize) -> Result<Self> {
        if !(a > 0.0 && b > a) {
            return Err(Error::invalid("window halves must satisfy 0 < a < b"));
        }
        Ok(SeparatingFamily {
            inner: Window::new(a, dim)?,
            outer: Window::new(b, dim)?,
        })
    }

    pub fn a(&self) -> f64 {
        self.inner.half()
    }

    pub fn b(&self) -> f64 {
        self.outer.half()
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn inner_window(&self) -> Window {
        self.inner
    }

    pub fn outer_window(&self) -> Window {
        self.outer
    }

    /// Number of facet classes, 2ℓ.
    pub fn class_count(&self) -> usize {
        2 * self.dim()
    }

    pub fn inner_facet(&self, i: usize) -> VertexSet {
        self.inner.facet(i)
    }

    pub fn outer_facet(&self, i: usize) -> VertexSet {
        self.outer.facet(i)
    }

    /// Length of the admissible offset interval of class i in direction `u`.
    ///
    /// A separating hyperplane H(α, u), α ≥ 0, must keep the inner facet on
    /// its origin side and the outer facet beyond, so α ranges over
    /// [max(h(f_i', u), 0), -h(f_i, -u)] whenever that interval is nonempty.
    /// (The opposite assignment would put the origin and the outer facet on
    /// one side with the inner facet beyond, which no hyperplane with α ≥ 0
    /// can do for concentric windows.)
    pub fn directional_length(&self, i: usize, u: &[f64]) -> f64 {
        let f_in = self.inner.facet(i);
        let f_out = self.outer.facet(i);
        let lo = f_in.support(u).max(0.0);
        let hi = f_out.inf_support(u);
        (hi - lo).max(0.0)
    }

    /// Measure Λ(G_i) of the i-th separating class.
    pub fn class_measure(&self, m: &HyperplaneMeasure, i: usize) -> f64 {
        assert!(i < self.class_count(), "class index out of range");
        match m.dist() {
            DirectionalDistribution::DiscreteEven { atoms, .. } => {
                m.gamma()
                    * atoms
                        .iter()
                        .map(|(u, w)| w * self.directional_length(i, u.coords()))
                        .sum::<f64>()
            }
            DirectionalDistribution::Isotropic { dim: 2 } => {
                let f = |phi: f64| self.directional_length(i, &[phi.cos(), phi.sin()]);
                m.gamma() * integrate_circle(f, QUAD_TOL) / std::f64::consts::TAU
            }
            DirectionalDistribution::Isotropic { .. } => {
                let nodes = m.sphere_nodes();
                let mean: f64 = nodes
                    .iter()
                    .map(|u| self.directional_length(i, u))
                    .sum::<f64>()
                    / nodes.len() as f64;
                m.gamma() * mean
            }
        }
    }

    /// All 2ℓ class measures.
    pub fn class_measures(&self, m: &HyperplaneMeasure) -> Vec<f64> {
        (0..self.class_count())
            .map(|i| self.class_measure(m, i))
            .collect()
    }

    /// L(a, b) = min_i Λ(G_i). Errors if some class is null: such a measure
    /// cannot wall the inner window off and the mixing machinery does not
    /// apply to it.
    pub fn min_class_measure(&self, m: &HyperplaneMeasure) -> Result<f64> {
        let mut min = f64::INFINITY;
        let mut argmin = 0;
        for i in 0..self.class_count() {
            let v = self.class_measure(m, i);
            if v < min {
                min = v;
                argmin = i;
            }
        }
        if min <= EPS * m.gamma().max(1.0) {
            return Err(Error::AssumptionFailed { facet: argmin });
        }
        Ok(min)
    }

    /// Indices of the classes the hyperplane belongs to (at most one for
    /// hyperplanes in general position; the classes are pairwise disjoint
    /// up to boundary cases).
    pub fn classify(&self, h: &Hyperplane) -> Vec<usize> {
        (0..self.class_count())
            .filter(|&i| separates(h, &self.inner.facet(i), &self.outer.facet(i)))
            .collect()
    }
}

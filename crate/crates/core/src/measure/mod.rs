//! Translation-invariant hyperplane measures Λ = γ·λ ⊗ θ.
//!
//! A hyperplane H(α, u) = {x : ⟨x, u⟩ = α} is parameterized by a unit normal
//! u and an offset α ≥ 0. The driving measure factorizes into the Lebesgue
//! measure in α, an even directional probability measure θ, and an intensity
//! γ > 0. Everything downstream consumes two quantities: the hitting measure
//! Λ([K]) of a convex body and samples from the normalized restriction Λ^K.

mod quadrature;
mod separating;
mod sphere;

pub use quadrature::{adaptive_simpson, integrate_circle};
pub use separating::SeparatingFamily;
pub use sphere::qmc_sphere_nodes;

use crate::error::{Error, Result};
use crate::geometry::{dot, ConvexPolytope, Coords, Direction, Hyperplane, SupportSet};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Absolute tolerance for the directional quadratures.
pub const QUAD_TOL: f64 = 1e-10;
/// Node count for the sphere rule backing ℓ ≥ 3 isotropic integrals.
pub const SPHERE_NODES: usize = 8192;
/// Iteration cap for rejection sampling.
pub const REJECTION_CAP: usize = 1_000_000;

/// Even directional distribution θ on the unit sphere.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum DirectionalDistribution {
    /// Uniform surface measure on S^{ℓ-1}.
    Isotropic { dim: usize },
    /// Finitely many atoms; must be symmetric under u ↦ -u and must not be
    /// concentrated on a great subsphere.
    DiscreteEven { dim: usize, atoms: Vec<(Direction, f64)> },
}

impl DirectionalDistribution {
    pub fn isotropic(dim: usize) -> Self {
        DirectionalDistribution::Isotropic { dim }
    }

    /// The axis-parallel model: atoms ±e_i with equal weight 1/(2ℓ).
    pub fn axis(dim: usize) -> Self {
        let w = 1.0 / (2 * dim) as f64;
        let mut atoms = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            atoms.push((Direction::axis(i, dim), w));
            let neg = Direction::axis(i, dim).neg();
            atoms.push((neg, w));
        }
        DirectionalDistribution::DiscreteEven { dim, atoms }
    }

    pub fn dim(&self) -> usize {
        match self {
            DirectionalDistribution::Isotropic { dim } => *dim,
            DirectionalDistribution::DiscreteEven { dim, .. } => *dim,
        }
    }

    /// Checks weights, evenness, and full-dimensional directional support.
    pub fn validate(&self) -> Result<()> {
        match self {
            DirectionalDistribution::Isotropic { dim } => {
                if *dim < 2 {
                    return Err(Error::InvalidDistribution(
                        "dimension must be at least 2".into(),
                    ));
                }
                Ok(())
            }
            DirectionalDistribution::DiscreteEven { dim, atoms } => {
                if *dim < 2 {
                    return Err(Error::InvalidDistribution(
                        "dimension must be at least 2".into(),
                    ));
                }
                if atoms.is_empty() {
                    return Err(Error::InvalidDistribution("no atoms".into()));
                }
                let mut total = 0.0;
                for (u, w) in atoms {
                    if u.dim() != *dim {
                        return Err(Error::DimensionMismatch {
                            expected: *dim,
                            got: u.dim(),
                        });
                    }
                    if !(*w > 0.0) {
                        return Err(Error::InvalidDistribution(
                            "atom weights must be positive".into(),
                        ));
                    }
                    total += w;
                }
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidDistribution(format!(
                        "atom weights sum to {total}, expected 1"
                    )));
                }
                // Evenness: each atom has a mirror of equal weight.
                for (u, w) in atoms {
                    let neg = u.neg();
                    let mirror: f64 = atoms
                        .iter()
                        .filter(|(v, _)| {
                            v.coords()
                                .iter()
                                .zip(neg.coords())
                                .all(|(a, b)| (a - b).abs() <= 1e-12)
                        })
                        .map(|(_, w)| *w)
                        .sum();
                    if (mirror - w).abs() > 1e-12 {
                        return Err(Error::InvalidDistribution(
                            "atoms are not symmetric under u ↦ -u".into(),
                        ));
                    }
                }
                // Not concentrated on a great subsphere: atoms span R^ℓ.
                if rank(atoms.iter().map(|(u, _)| u.coords()), *dim) < *dim {
                    return Err(Error::InvalidDistribution(
                        "atoms lie on a great subsphere".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Row rank of a set of vectors, by Gram-Schmidt.
fn rank<'a, I: Iterator<Item = &'a [f64]>>(vecs: I, dim: usize) -> usize {
    let mut basis: Vec<Coords> = Vec::with_capacity(dim);
    for v in vecs {
        let mut w: Coords = Coords::from_slice(v);
        for e in &basis {
            let d = dot(&w, e);
            for (x, ee) in w.iter_mut().zip(e.iter()) {
                *x -= d * ee;
            }
        }
        let len = crate::geometry::norm(&w);
        if len > 1e-9 {
            for x in w.iter_mut() {
                *x /= len;
            }
            basis.push(w);
            if basis.len() == dim {
                break;
            }
        }
    }
    basis.len()
}

/// Length of the admissible offset interval {α ≥ 0 : H(α, u) ∩ K ≠ ∅}.
pub fn offset_range<S: SupportSet + ?Sized>(k: &S, u: &[f64]) -> (f64, f64) {
    let hi = k.support(u);
    let lo = k.inf_support(u).max(0.0);
    (lo, hi)
}

/// |{α ≥ 0 : H(α, u) ∩ K ≠ ∅}|.
pub fn offset_length<S: SupportSet + ?Sized>(k: &S, u: &[f64]) -> f64 {
    let (lo, hi) = offset_range(k, u);
    (hi - lo).max(0.0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HyperplaneMeasure {
    gamma: f64,
    dist: DirectionalDistribution,
    #[serde(skip)]
    nodes: OnceLock<Vec<Coords>>,
}

impl HyperplaneMeasure {
    pub fn new(gamma: f64, dist: DirectionalDistribution) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::invalid("intensity γ must be positive and finite"));
        }
        dist.validate()?;
        Ok(HyperplaneMeasure {
            gamma,
            dist,
            nodes: OnceLock::new(),
        })
    }

    /// Isotropic model normalized so that Λ([K]) is the perimeter in 2D.
    pub fn isotropic_perimeter(dim: usize) -> Result<Self> {
        HyperplaneMeasure::new(std::f64::consts::TAU, DirectionalDistribution::isotropic(dim))
    }

    /// Axis-parallel model with γ = 2ℓ, so that Λ([rect]) = w + h in 2D.
    pub fn axis_unit(dim: usize) -> Result<Self> {
        HyperplaneMeasure::new((2 * dim) as f64, DirectionalDistribution::axis(dim))
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dist(&self) -> &DirectionalDistribution {
        &self.dist
    }

    pub fn dim(&self) -> usize {
        self.dist.dim()
    }

    fn sphere_nodes(&self) -> &[Coords] {
        self.nodes
            .get_or_init(|| qmc_sphere_nodes(self.dist.dim(), SPHERE_NODES))
    }

    /// Measure of all hyperplanes hitting the body: Λ([K]) = γ·∫ offset_length(K, u) θ(du).
    ///
    /// Exact for discrete θ; in closed form for planar isotropic θ (the mean
    /// admissible-offset length over the circle is perimeter / 2π); by the
    /// sphere rule otherwise.
    pub fn lambda_hit(&self, k: &ConvexPolytope) -> f64 {
        match (&self.dist, k) {
            (DirectionalDistribution::DiscreteEven { atoms, .. }, _) => {
                self.gamma
                    * atoms
                        .iter()
                        .map(|(u, w)| w * offset_length(k, u.coords()))
                        .sum::<f64>()
            }
            (DirectionalDistribution::Isotropic { dim: 2 }, ConvexPolytope::Planar(p)) => {
                self.gamma * p.perimeter() / std::f64::consts::TAU
            }
            (DirectionalDistribution::Isotropic { .. }, _) => {
                let nodes = self.sphere_nodes();
                // Antithetic in expectation: length(u) + length(-u) = width(u),
                // so averaging widths halves the directional variance.
                let mean: f64 = nodes.iter().map(|u| 0.5 * k.width(u)).sum::<f64>()
                    / nodes.len() as f64;
                self.gamma * mean
            }
        }
    }

    /// Same functional as [`lambda_hit`](Self::lambda_hit), evaluated by
    /// adaptive quadrature of the admissible-offset length over the circle.
    /// Planar only; an independent route for cross-checking the closed form.
    pub fn lambda_hit_quadrature(&self, k: &ConvexPolytope) -> Result<f64> {
        if self.dist.dim() != 2 {
            return Err(Error::Unsupported(
                "quadrature route for hitting measures is planar-only".into(),
            ));
        }
        match &self.dist {
            DirectionalDistribution::DiscreteEven { .. } => Ok(self.lambda_hit(k)),
            DirectionalDistribution::Isotropic { .. } => {
                let f = |phi: f64| offset_length(k, &[phi.cos(), phi.sin()]);
                Ok(self.gamma * integrate_circle(f, QUAD_TOL) / std::f64::consts::TAU)
            }
        }
    }

    /// Hitting measure of an arbitrary support-evaluable set (degenerate
    /// bodies included), by the generic routes only.
    pub fn lambda_hit_support<S: SupportSet + ?Sized>(&self, k: &S) -> f64 {
        match &self.dist {
            DirectionalDistribution::DiscreteEven { atoms, .. } => {
                self.gamma
                    * atoms
                        .iter()
                        .map(|(u, w)| w * offset_length(k, u.coords()))
                        .sum::<f64>()
            }
            DirectionalDistribution::Isotropic { dim: 2 } => {
                let f = |phi: f64| offset_length(k, &[phi.cos(), phi.sin()]);
                self.gamma * integrate_circle(f, QUAD_TOL) / std::f64::consts::TAU
            }
            DirectionalDistribution::Isotropic { .. } => {
                let nodes = self.sphere_nodes();
                let mean: f64 =
                    nodes.iter().map(|u| 0.5 * k.width(u)).sum::<f64>() / nodes.len() as f64;
                self.gamma * mean
            }
        }
    }

    /// Draws a hyperplane from Λ^K, the normalized restriction of Λ to the
    /// hyperplanes hitting `K`: the direction marginal has θ-density
    /// proportional to the admissible-offset length, and the offset is
    /// uniform on the admissible interval.
    pub fn sample_conditional<R: Rng>(
        &self,
        k: &ConvexPolytope,
        rng: &mut R,
    ) -> Result<Hyperplane> {
        match &self.dist {
            DirectionalDistribution::DiscreteEven { atoms, .. } => {
                let mut weights = Vec::with_capacity(atoms.len());
                let mut total = 0.0;
                for (u, w) in atoms {
                    let len = offset_length(k, u.coords());
                    total += w * len;
                    weights.push(w * len);
                }
                if !(total > 0.0) {
                    return Err(Error::invalid(
                        "body admits no hitting hyperplane under this distribution",
                    ));
                }
                let mut x = rng.gen::<f64>() * total;
                let mut pick = atoms.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    if x < *w {
                        pick = i;
                        break;
                    }
                    x -= w;
                }
                let u = &atoms[pick].0;
                let (lo, hi) = offset_range(k, u.coords());
                let alpha = lo + rng.gen::<f64>() * (hi - lo);
                Hyperplane::new(u.clone(), alpha)
            }
            DirectionalDistribution::Isotropic { dim } => {
                // Rejection on the direction with the diameter as envelope:
                // offset_length(K, u) ≤ width(K, u) ≤ diam(K), and the mean
                // width of a convex body is at least 2·diam/π in the plane,
                // so acceptance stays bounded away from zero.
                let envelope = k.diameter();
                for _ in 0..REJECTION_CAP {
                    let u = random_unit(*dim, rng);
                    let len = offset_length(k, &u);
                    if rng.gen::<f64>() * envelope <= len {
                        let (lo, hi) = offset_range(k, &u);
                        let alpha = lo + rng.gen::<f64>() * (hi - lo);
                        return Hyperplane::new(Direction::new(&u)?, alpha);
                    }
                }
                Err(Error::RejectionLoopExceeded(REJECTION_CAP))
            }
        }
    }
}

fn random_unit<R: Rng>(dim: usize, rng: &mut R) -> Coords {
    if dim == 2 {
        let phi = rng.gen::<f64>() * std::f64::consts::TAU;
        return Coords::from_slice(&[phi.cos(), phi.sin()]);
    }
    loop {
        let v: Coords = (0..dim)
            .map(|_| rand_distr::StandardNormal.sample(rng))
            .collect::<Vec<f64>>()
            .into_iter()
            .collect();
        let len = crate::geometry::norm(&v);
        if len > 1e-9 {
            return v.iter().map(|x| x / len).collect();
        }
    }
}

use rand_distr::Distribution;

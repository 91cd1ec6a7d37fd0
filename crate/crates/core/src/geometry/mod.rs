//! Convex geometry: directions, hyperplanes, polytopes, windows.
//!
//! Two cell representations sit behind [`ConvexPolytope`]: planar cells are
//! counter-clockwise vertex loops (fast splitting via the two boundary
//! crossings), higher-dimensional cells are bounding half-space lists with
//! enumerated vertices. Every facet carries provenance: either a facet index
//! of the generating window or the id of the jump whose cut created it.

mod poly2;
mod polyn;

pub use poly2::Polygon2;
pub use polyn::{HalfSpace, PolytopeN};

use crate::error::{Error, Result};
use crate::EPS;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// Inline coordinate storage; no heap allocation for dimensions up to 4.
pub type Coords = SmallVec<[f64; 4]>;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Facet provenance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FacetTag {
    /// Facet inherited from the window that seeded the simulation; the index
    /// runs over `0..2ℓ` with `i < ℓ` meaning `{x_i = +a}` and `i ≥ ℓ`
    /// meaning `{x_{i-ℓ} = -a}`.
    Window(usize),
    /// Facet created by the cut of the jump with this id.
    Cut(u64),
}

impl FacetTag {
    pub fn is_window(&self) -> bool {
        matches!(self, FacetTag::Window(_))
    }
}

/// Unit direction on the sphere S^{ℓ-1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    coords: Coords,
}

impl Direction {
    /// Normalizes the given vector. Rejects vectors with near-zero norm.
    pub fn new(coords: &[f64]) -> Result<Self> {
        let n = norm(coords);
        if !(n > EPS) || !n.is_finite() {
            return Err(Error::invalid("direction vector must be nonzero and finite"));
        }
        Ok(Direction {
            coords: coords.iter().map(|x| x / n).collect(),
        })
    }

    pub fn axis(i: usize, dim: usize) -> Self {
        let mut c: Coords = SmallVec::from_elem(0.0, dim);
        c[i] = 1.0;
        Direction { coords: c }
    }

    /// 2D direction (cos φ, sin φ).
    pub fn from_angle(phi: f64) -> Self {
        Direction {
            coords: SmallVec::from_slice(&[phi.cos(), phi.sin()]),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        dot(&self.coords, x)
    }

    pub fn neg(&self) -> Self {
        Direction {
            coords: self.coords.iter().map(|x| -x).collect(),
        }
    }
}

/// Hyperplane H(α, u) = {x : ⟨x, u⟩ = α} with α ≥ 0.
///
/// The pair (α, u) with α > 0 identifies the hyperplane uniquely; for α = 0
/// the normal is canonicalized so its first nonzero coordinate is positive,
/// making H(0, u) and H(0, -u) the same value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    normal: Direction,
    offset: f64,
}

impl Hyperplane {
    pub fn new(normal: Direction, offset: f64) -> Result<Self> {
        if !offset.is_finite() || offset < 0.0 {
            return Err(Error::invalid("hyperplane offset must be finite and ≥ 0"));
        }
        let normal = if offset == 0.0 {
            match normal.coords().iter().find(|c| c.abs() > EPS) {
                Some(c) if *c < 0.0 => normal.neg(),
                _ => normal,
            }
        } else {
            normal
        };
        Ok(Hyperplane { normal, offset })
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    pub fn normal(&self) -> &Direction {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Signed distance of `x` from the hyperplane (positive on the H⁺ side).
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.normal.dot(x) - self.offset
    }

    /// Does the hyperplane meet the set? Decided from the support interval
    /// [-h(K,-u), h(K,u)] with the shared ε tolerance.
    pub fn hits<S: SupportSet + ?Sized>(&self, set: &S) -> bool {
        let hi = set.support(self.normal.coords());
        let lo = -set.support(self.normal.neg().coords());
        lo - EPS <= self.offset && self.offset <= hi + EPS
    }
}

/// Anything with an evaluable support function h(K, u) = sup ⟨x, u⟩.
///
/// Implementors include full-dimensional polytopes and degenerate vertex sets
/// such as window facets; `u` need not be a unit vector.
pub trait SupportSet {
    fn dim(&self) -> usize;
    fn support(&self, u: &[f64]) -> f64;

    fn inf_support(&self, u: &[f64]) -> f64 {
        let neg: Coords = u.iter().map(|x| -x).collect();
        -self.support(&neg)
    }

    /// Width along `u`: h(K, u) + h(K, -u).
    fn width(&self, u: &[f64]) -> f64 {
        let neg: Coords = u.iter().map(|x| -x).collect();
        self.support(u) + self.support(&neg)
    }
}

/// Finite point set; the support evaluator for degenerate faces.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexSet {
    dim: usize,
    points: Vec<Coords>,
}

impl VertexSet {
    pub fn new(dim: usize, points: Vec<Coords>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("vertex set must be nonempty"));
        }
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: points.iter().map(|p| p.len()).find(|&l| l != dim).unwrap(),
            });
        }
        Ok(VertexSet { dim, points })
    }

    pub fn points(&self) -> &[Coords] {
        &self.points
    }
}

impl SupportSet for VertexSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn support(&self, u: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|p| dot(p, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Does the closed planar segment meet the open axis-aligned box centered at
/// `center` with half-width `half`? Liang-Barsky clip against the closed box
/// followed by an interior test at the midpoint of the clipped range, so
/// segments that only run along the boundary do not count.
pub fn segment_meets_open_box(seg: &[[f64; 2]; 2], center: [f64; 2], half: f64) -> bool {
    let p0 = [seg[0][0] - center[0], seg[0][1] - center[1]];
    let p1 = [seg[1][0] - center[0], seg[1][1] - center[1]];
    let d = [p1[0] - p0[0], p1[1] - p0[1]];
    let mut t = (0.0f64, 1.0f64);
    let mut clip = |p: f64, q: f64| -> bool {
        if p.abs() < 1e-300 {
            return q >= 0.0;
        }
        let r = q / p;
        if p < 0.0 {
            if r > t.1 {
                return false;
            }
            if r > t.0 {
                t.0 = r;
            }
        } else {
            if r < t.0 {
                return false;
            }
            if r < t.1 {
                t.1 = r;
            }
        }
        true
    };
    let inside = clip(-d[0], p0[0] + half)
        && clip(d[0], half - p0[0])
        && clip(-d[1], p0[1] + half)
        && clip(d[1], half - p0[1]);
    if !inside || t.1 - t.0 <= 1e-12 {
        return false;
    }
    let tm = 0.5 * (t.0 + t.1);
    let x = p0[0] + tm * d[0];
    let y = p0[1] + tm * d[1];
    x.abs() < half - EPS && y.abs() < half - EPS
}

/// Does `h` separate `a` from `b` (one in each closed half-space, up to ε)?
pub fn separates<A, B>(h: &Hyperplane, a: &A, b: &B) -> bool
where
    A: SupportSet + ?Sized,
    B: SupportSet + ?Sized,
{
    fn in_plus<S: SupportSet + ?Sized>(h: &Hyperplane, s: &S) -> bool {
        s.inf_support(h.normal().coords()) >= h.offset() - EPS
    }
    fn in_minus<S: SupportSet + ?Sized>(h: &Hyperplane, s: &S) -> bool {
        s.support(h.normal().coords()) <= h.offset() + EPS
    }
    (in_plus(h, a) && in_minus(h, b)) || (in_minus(h, a) && in_plus(h, b))
}

/// Bounded convex polytope with nonempty interior and tagged facets.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ConvexPolytope {
    Planar(Polygon2),
    General(PolytopeN),
}

impl ConvexPolytope {
    pub fn dim(&self) -> usize {
        match self {
            ConvexPolytope::Planar(_) => 2,
            ConvexPolytope::General(p) => p.dim(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            ConvexPolytope::Planar(p) => p.area(),
            ConvexPolytope::General(p) => p.volume(),
        }
    }

    /// Volumetric centroid; the reference point used for cell numbering.
    pub fn centroid(&self) -> Coords {
        match self {
            ConvexPolytope::Planar(p) => SmallVec::from_slice(&p.centroid()),
            ConvexPolytope::General(p) => p.centroid(),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            ConvexPolytope::Planar(p) => p.diameter(),
            ConvexPolytope::General(p) => p.diameter(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ConvexPolytope::Planar(p) => p.contains([x[0], x[1]]),
            ConvexPolytope::General(p) => p.contains(x),
        }
    }

    pub fn translate(&self, v: &[f64]) -> Self {
        match self {
            ConvexPolytope::Planar(p) => ConvexPolytope::Planar(p.translate([v[0], v[1]])),
            ConvexPolytope::General(p) => ConvexPolytope::General(p.translate(v)),
        }
    }

    /// Homothety x ↦ r·x about the origin, r > 0.
    pub fn scale(&self, r: f64) -> Self {
        match self {
            ConvexPolytope::Planar(p) => ConvexPolytope::Planar(p.scale(r)),
            ConvexPolytope::General(p) => ConvexPolytope::General(p.scale(r)),
        }
    }

    /// Splits along `h` into the (H⁺, H⁻) parts. `None` means the hyperplane
    /// misses the interior or grazes a vertex within ε; callers resample.
    pub fn split(&self, h: &Hyperplane, tag: FacetTag) -> Option<(Self, Self)> {
        match self {
            ConvexPolytope::Planar(p) => {
                let u = h.normal().coords();
                p.split([u[0], u[1]], h.offset(), tag)
                    .map(|(a, b)| (ConvexPolytope::Planar(a), ConvexPolytope::Planar(b)))
            }
            ConvexPolytope::General(p) => p
                .split(h, tag)
                .map(|(a, b)| (ConvexPolytope::General(a), ConvexPolytope::General(b))),
        }
    }

    /// Intersection with another polytope; new facets inherit `other`'s tags.
    /// `None` when the intersection has empty interior.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (ConvexPolytope::Planar(a), ConvexPolytope::Planar(b)) => {
                a.intersect(b).map(ConvexPolytope::Planar)
            }
            (ConvexPolytope::General(a), ConvexPolytope::General(b)) => {
                a.intersect(b).map(ConvexPolytope::General)
            }
            _ => None,
        }
    }

    pub fn facet_tags(&self) -> Vec<FacetTag> {
        match self {
            ConvexPolytope::Planar(p) => p.tags().to_vec(),
            ConvexPolytope::General(p) => p.halfspaces().iter().map(|h| h.tag).collect(),
        }
    }

    pub fn has_window_facet(&self) -> bool {
        match self {
            ConvexPolytope::Planar(p) => p.tags().iter().any(FacetTag::is_window),
            ConvexPolytope::General(p) => p.halfspaces().iter().any(|h| h.tag.is_window()),
        }
    }

    pub fn vertices(&self) -> Vec<Coords> {
        match self {
            ConvexPolytope::Planar(p) => p
                .vertices()
                .iter()
                .map(|v| SmallVec::from_slice(&v[..]))
                .collect(),
            ConvexPolytope::General(p) => p.vertices().to_vec(),
        }
    }

    pub fn as_planar(&self) -> Option<&Polygon2> {
        match self {
            ConvexPolytope::Planar(p) => Some(p),
            _ => None,
        }
    }
}

impl SupportSet for ConvexPolytope {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn support(&self, u: &[f64]) -> f64 {
        match self {
            ConvexPolytope::Planar(p) => p.support([u[0], u[1]]),
            ConvexPolytope::General(p) => p.support(u),
        }
    }
}

impl SupportSet for Polygon2 {
    fn dim(&self) -> usize {
        2
    }

    fn support(&self, u: &[f64]) -> f64 {
        Polygon2::support(self, [u[0], u[1]])
    }
}

/// Cubic observation window [-a, a]^ℓ centered at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    half: f64,
    dim: usize,
}

impl Window {
    pub fn new(half: f64, dim: usize) -> Result<Self> {
        if !(half > 0.0) || !half.is_finite() {
            return Err(Error::invalid("window half-width must be positive"));
        }
        if dim < 2 {
            return Err(Error::invalid("window dimension must be at least 2"));
        }
        Ok(Window { half, dim })
    }

    pub fn half(&self) -> f64 {
        self.half
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn volume(&self) -> f64 {
        (2.0 * self.half).powi(self.dim as i32)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && x.iter().all(|c| c.abs() <= self.half + EPS)
    }

    /// Strict interior membership of a polytope, decided by support functions.
    pub fn strictly_contains<S: SupportSet + ?Sized>(&self, s: &S) -> bool {
        (0..self.dim).all(|i| {
            let u = Direction::axis(i, self.dim);
            s.support(u.coords()) < self.half - EPS
                && s.support(u.neg().coords()) < self.half - EPS
        })
    }

    pub fn to_polytope(&self) -> ConvexPolytope {
        let a = self.half;
        if self.dim == 2 {
            let verts = vec![[a, -a], [a, a], [-a, a], [-a, -a]];
            let tags = vec![
                FacetTag::Window(0),
                FacetTag::Window(1),
                FacetTag::Window(2),
                FacetTag::Window(3),
            ];
            ConvexPolytope::Planar(Polygon2::new(verts, tags).expect("window polygon is valid"))
        } else {
            let mut hs = Vec::with_capacity(2 * self.dim);
            for i in 0..2 * self.dim {
                let (axis, sign) = if i < self.dim { (i, 1.0) } else { (i - self.dim, -1.0) };
                let mut n: Coords = SmallVec::from_elem(0.0, self.dim);
                n[axis] = sign;
                hs.push(HalfSpace {
                    n,
                    c: a,
                    tag: FacetTag::Window(i),
                });
            }
            ConvexPolytope::General(
                PolytopeN::from_halfspaces(self.dim, hs).expect("window polytope is valid"),
            )
        }
    }

    /// Facet i of the window as a vertex set: i < ℓ is {x_i = +a}, i ≥ ℓ is
    /// {x_{i-ℓ} = -a}, each with the 2^{ℓ-1} corner points.
    pub fn facet(&self, i: usize) -> VertexSet {
        assert!(i < 2 * self.dim, "facet index out of range");
        let (axis, sign) = if i < self.dim { (i, 1.0) } else { (i - self.dim, -1.0) };
        let free: Vec<usize> = (0..self.dim).filter(|&j| j != axis).collect();
        let mut points = Vec::with_capacity(1 << free.len());
        for mask in 0..(1u32 << free.len()) {
            let mut p: Coords = SmallVec::from_elem(0.0, self.dim);
            p[axis] = sign * self.half;
            for (bit, &j) in free.iter().enumerate() {
                p[j] = if mask >> bit & 1 == 1 { self.half } else { -self.half };
            }
            points.push(p);
        }
        VertexSet::new(self.dim, points).expect("window facet is nonempty")
    }
}

impl SupportSet for Window {
    fn dim(&self) -> usize {
        self.dim
    }

    fn support(&self, u: &[f64]) -> f64 {
        self.half * u.iter().map(|c| c.abs()).sum::<f64>()
    }
}

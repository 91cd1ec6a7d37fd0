//! General-dimension convex polytope kernel: bounding half-space list with
//! enumerated vertices. Planar simulations use the dedicated vertex-loop
//! kernel; this one backs windows and cells in dimension three and up, where
//! cells stay small enough that brute-force vertex enumeration over
//! half-space combinations is the simplest correct choice.

use super::{dot, norm, Coords, FacetTag, Hyperplane};
use crate::error::{Error, Result};
use crate::EPS;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// Closed half-space {x : ⟨n, x⟩ ≤ c} with unit normal.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HalfSpace {
    pub n: Coords,
    pub c: f64,
    pub tag: FacetTag,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeN {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
    verts: Vec<Coords>,
    volume: f64,
}

impl PolytopeN {
    /// Builds a bounded full-dimensional polytope from half-spaces.
    /// Redundant half-spaces (no incident vertex) are dropped.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<HalfSpace>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid("polytope dimension must be at least 2"));
        }
        let mut rows = Vec::with_capacity(halfspaces.len());
        for mut h in halfspaces {
            if h.n.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: h.n.len(),
                });
            }
            let len = norm(&h.n);
            if len < EPS {
                return Err(Error::invalid("half-space normal must be nonzero"));
            }
            for x in h.n.iter_mut() {
                *x /= len;
            }
            h.c /= len;
            rows.push(h);
        }

        // Coincident half-spaces would double-count their shared facet in
        // the volume recursion; keep only the last copy (so that in an
        // intersection the second operand's facet tag survives).
        let rows: Vec<HalfSpace> = rows
            .iter()
            .enumerate()
            .filter(|(i, h)| {
                !rows[i + 1..].iter().any(|g| {
                    dot(&h.n, &g.n) >= 1.0 - 1e-12 && (h.c - g.c).abs() <= EPS
                })
            })
            .map(|(_, h)| h.clone())
            .collect();

        let verts = enumerate_vertices(dim, &rows);
        if verts.len() < dim + 1 {
            return Err(Error::DegeneratePolytope(dim + 1));
        }

        // Keep only half-spaces active at some vertex.
        let active: Vec<HalfSpace> = rows
            .into_iter()
            .filter(|h| {
                verts.iter().any(|v| {
                    (dot(&h.n, v) - h.c).abs() <= feas_tol(v)
                })
            })
            .collect();

        let volume = volume_hrep(
            dim,
            &active
                .iter()
                .map(|h| (h.n.clone(), h.c))
                .collect::<Vec<_>>(),
        );
        if !(volume > 0.0) {
            return Err(Error::DegeneratePolytope(dim + 1));
        }
        Ok(PolytopeN {
            dim,
            halfspaces: active,
            verts,
            volume,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[Coords] {
        &self.verts
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn support(&self, u: &[f64]) -> f64 {
        self.verts
            .iter()
            .map(|v| dot(v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.verts.len() {
            for j in i + 1..self.verts.len() {
                let d: f64 = self.verts[i]
                    .iter()
                    .zip(&self.verts[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                best = best.max(d);
            }
        }
        best.sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.halfspaces
            .iter()
            .all(|h| dot(&h.n, x) <= h.c + feas_tol(x))
    }

    pub fn translate(&self, v: &[f64]) -> Self {
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|h| HalfSpace {
                n: h.n.clone(),
                c: h.c + dot(&h.n, v),
                tag: h.tag,
            })
            .collect();
        let verts = self
            .verts
            .iter()
            .map(|p| p.iter().zip(v).map(|(a, b)| a + b).collect())
            .collect();
        PolytopeN {
            dim: self.dim,
            halfspaces,
            verts,
            volume: self.volume,
        }
    }

    pub fn scale(&self, r: f64) -> Self {
        assert!(r > 0.0, "homothety factor must be positive");
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|h| HalfSpace {
                n: h.n.clone(),
                c: h.c * r,
                tag: h.tag,
            })
            .collect();
        let verts = self
            .verts
            .iter()
            .map(|p| p.iter().map(|a| a * r).collect())
            .collect();
        PolytopeN {
            dim: self.dim,
            halfspaces,
            verts,
            volume: self.volume * r.powi(self.dim as i32),
        }
    }

    /// Splits along the hyperplane into (H⁺, H⁻); `None` on miss or when a
    /// vertex lies within ε of the hyperplane.
    pub fn split(&self, h: &Hyperplane, tag: FacetTag) -> Option<(PolytopeN, PolytopeN)> {
        let u = h.normal().coords();
        let alpha = h.offset();
        let mut any_pos = false;
        let mut any_neg = false;
        for v in &self.verts {
            let d = dot(v, u) - alpha;
            if d.abs() <= EPS {
                return None;
            }
            any_pos |= d > 0.0;
            any_neg |= d < 0.0;
        }
        if !any_pos || !any_neg {
            return None;
        }
        let mut plus_rows = self.halfspaces.clone();
        plus_rows.push(HalfSpace {
            n: u.iter().map(|x| -x).collect(),
            c: -alpha,
            tag,
        });
        let mut minus_rows = self.halfspaces.clone();
        minus_rows.push(HalfSpace {
            n: SmallVec::from_slice(u),
            c: alpha,
            tag,
        });
        let plus = PolytopeN::from_halfspaces(self.dim, plus_rows).ok()?;
        let minus = PolytopeN::from_halfspaces(self.dim, minus_rows).ok()?;
        Some((plus, minus))
    }

    pub fn intersect(&self, other: &PolytopeN) -> Option<PolytopeN> {
        if self.dim != other.dim {
            return None;
        }
        let mut rows = self.halfspaces.clone();
        rows.extend(other.halfspaces.iter().cloned());
        PolytopeN::from_halfspaces(self.dim, rows).ok()
    }

    /// Volumetric centroid. Exact via tetrahedral decomposition in dimension
    /// three; the vertex mean in higher dimensions, where only a
    /// deterministic reference point is required.
    pub fn centroid(&self) -> Coords {
        if self.dim == 3 {
            return self.centroid3();
        }
        let mut c: Coords = SmallVec::from_elem(0.0, self.dim);
        for v in &self.verts {
            for (acc, x) in c.iter_mut().zip(v) {
                *acc += x;
            }
        }
        for x in c.iter_mut() {
            *x /= self.verts.len() as f64;
        }
        c
    }

    fn centroid3(&self) -> Coords {
        let apex = {
            let mut a = [0.0f64; 3];
            for v in &self.verts {
                for k in 0..3 {
                    a[k] += v[k];
                }
            }
            for x in a.iter_mut() {
                *x /= self.verts.len() as f64;
            }
            a
        };
        let mut vol = 0.0;
        let mut cent = [0.0f64; 3];
        for h in &self.halfspaces {
            let face: Vec<&Coords> = self
                .verts
                .iter()
                .filter(|v| (dot(&h.n, v) - h.c).abs() <= feas_tol(v))
                .collect();
            if face.len() < 3 {
                continue;
            }
            let ordered = order_face_vertices(&h.n, &face);
            for i in 1..ordered.len() - 1 {
                let (a, b, c) = (&ordered[0], &ordered[i], &ordered[i + 1]);
                let e1: Vec<f64> = a.iter().zip(apex).map(|(x, p)| x - p).collect();
                let e2: Vec<f64> = b.iter().zip(apex).map(|(x, p)| x - p).collect();
                let e3: Vec<f64> = c.iter().zip(apex).map(|(x, p)| x - p).collect();
                let det = e1[0] * (e2[1] * e3[2] - e2[2] * e3[1])
                    - e1[1] * (e2[0] * e3[2] - e2[2] * e3[0])
                    + e1[2] * (e2[0] * e3[1] - e2[1] * e3[0]);
                let v = det.abs() / 6.0;
                vol += v;
                for k in 0..3 {
                    cent[k] += v * (a[k] + b[k] + c[k] + apex[k]) / 4.0;
                }
            }
        }
        SmallVec::from_iter(cent.iter().map(|x| x / vol))
    }
}

fn feas_tol(x: &[f64]) -> f64 {
    EPS * (1.0 + x.iter().map(|c| c.abs()).fold(0.0, f64::max))
}

/// All vertices of ∩{n_i·x ≤ c_i}: solutions of d-subsets of tight
/// constraints that satisfy every half-space, deduplicated.
fn enumerate_vertices(dim: usize, rows: &[HalfSpace]) -> Vec<Coords> {
    let m = rows.len();
    if m < dim {
        return Vec::new();
    }
    let mut verts: Vec<Coords> = Vec::new();
    let mut idx: Vec<usize> = (0..dim).collect();
    loop {
        if let Some(x) = solve_square(dim, rows, &idx) {
            let feasible = rows.iter().all(|h| dot(&h.n, &x) <= h.c + feas_tol(&x));
            if feasible {
                let dup = verts.iter().any(|v| {
                    v.iter()
                        .zip(&x)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                        <= feas_tol(&x)
                });
                if !dup {
                    verts.push(x);
                }
            }
        }
        // Advance the combination (lexicographic).
        let mut i = dim;
        loop {
            if i == 0 {
                return verts;
            }
            i -= 1;
            if idx[i] != i + m - dim {
                idx[i] += 1;
                for j in i + 1..dim {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Solves the d×d system with rows { ⟨n_{idx[k]}, x⟩ = c_{idx[k]} } by
/// Gaussian elimination with partial pivoting; `None` if near-singular.
fn solve_square(dim: usize, rows: &[HalfSpace], idx: &[usize]) -> Option<Coords> {
    let mut a = vec![0.0f64; dim * dim];
    let mut b = vec![0.0f64; dim];
    for (k, &i) in idx.iter().enumerate() {
        a[k * dim..(k + 1) * dim].copy_from_slice(&rows[i].n);
        b[k] = rows[i].c;
    }
    for col in 0..dim {
        let (piv, pval) = (col..dim)
            .map(|r| (r, a[r * dim + col].abs()))
            .fold((col, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pval < 1e-12 {
            return None;
        }
        if piv != col {
            for j in 0..dim {
                a.swap(col * dim + j, piv * dim + j);
            }
            b.swap(col, piv);
        }
        let d = a[col * dim + col];
        for r in 0..dim {
            if r == col {
                continue;
            }
            let f = a[r * dim + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..dim {
                a[r * dim + j] -= f * a[col * dim + j];
            }
            b[r] -= f * b[col];
        }
    }
    Some((0..dim).map(|k| b[k] / a[k * dim + k]).collect())
}

/// Volume of ∩{n_i·x ≤ c_i} (unit normals) by the divergence-theorem
/// recursion: vol = (1/d)·Σ_i c_i·vol_{d-1}(facet_i), with facets mapped
/// isometrically into one lower dimension.
fn volume_hrep(dim: usize, rows: &[(Coords, f64)]) -> f64 {
    match dim {
        1 => {
            let mut hi = f64::INFINITY;
            let mut lo = f64::NEG_INFINITY;
            for (n, c) in rows {
                if n[0] > EPS {
                    hi = hi.min(c / n[0]);
                } else if n[0] < -EPS {
                    lo = lo.max(c / n[0]);
                }
            }
            (hi - lo).max(0.0)
        }
        2 => area_hrep_2d(rows),
        _ => {
            let mut vol = 0.0;
            for (i, (n, c)) in rows.iter().enumerate() {
                let basis = orthonormal_complement(n);
                // Point on the facet hyperplane: c·n (unit normal).
                let p: Vec<f64> = n.iter().map(|x| x * c).collect();
                let mut sub_rows: Vec<(Coords, f64)> = Vec::with_capacity(rows.len() - 1);
                for (j, (nj, cj)) in rows.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let proj: Coords = basis.iter().map(|e| dot(nj, e)).collect();
                    let len = norm(&proj);
                    let rhs = cj - dot(nj, &p);
                    if len < EPS {
                        if rhs < -EPS {
                            // Facet entirely outside a parallel constraint.
                            sub_rows.clear();
                            break;
                        }
                        continue;
                    }
                    sub_rows.push((proj.iter().map(|x| x / len).collect(), rhs / len));
                }
                if sub_rows.is_empty() {
                    continue;
                }
                vol += c * volume_hrep(dim - 1, &sub_rows);
            }
            vol / dim as f64
        }
    }
}

fn area_hrep_2d(rows: &[(Coords, f64)]) -> f64 {
    // Vertices from all constraint pairs, then hull area by angular sort.
    let hs: Vec<HalfSpace> = rows
        .iter()
        .map(|(n, c)| HalfSpace {
            n: n.clone(),
            c: *c,
            tag: FacetTag::Cut(0),
        })
        .collect();
    let verts = enumerate_vertices(2, &hs);
    if verts.len() < 3 {
        return 0.0;
    }
    let cx = verts.iter().map(|v| v[0]).sum::<f64>() / verts.len() as f64;
    let cy = verts.iter().map(|v| v[1]).sum::<f64>() / verts.len() as f64;
    let mut pts: Vec<[f64; 2]> = verts.iter().map(|v| [v[0], v[1]]).collect();
    pts.sort_by(|a, b| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.partial_cmp(&tb).unwrap()
    });
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s.abs()
}

/// Orthonormal basis of the complement of `n` (unit), by Gram-Schmidt over
/// the standard basis, skipping the axis most aligned with `n`.
fn orthonormal_complement(n: &[f64]) -> Vec<Coords> {
    let dim = n.len();
    let skip = (0..dim)
        .max_by(|&i, &j| n[i].abs().partial_cmp(&n[j].abs()).unwrap())
        .unwrap();
    let mut basis: Vec<Coords> = Vec::with_capacity(dim - 1);
    for i in 0..dim {
        if i == skip {
            continue;
        }
        let mut v: Coords = SmallVec::from_elem(0.0, dim);
        v[i] = 1.0;
        let d = dot(&v, n);
        for (x, nn) in v.iter_mut().zip(n) {
            *x -= d * nn;
        }
        for e in &basis {
            let d = dot(&v, e);
            for (x, ee) in v.iter_mut().zip(e.iter()) {
                *x -= d * ee;
            }
        }
        let len = norm(&v);
        for x in v.iter_mut() {
            *x /= len;
        }
        basis.push(v);
    }
    basis
}

/// Orders coplanar face vertices into a loop by angle around their mean,
/// within the plane with normal `n`.
fn order_face_vertices(n: &[f64], face: &[&Coords]) -> Vec<Coords> {
    let basis = orthonormal_complement(n);
    let dim = n.len();
    let mut mean: Coords = SmallVec::from_elem(0.0, dim);
    for v in face {
        for (m, x) in mean.iter_mut().zip(v.iter()) {
            *m += x;
        }
    }
    for m in mean.iter_mut() {
        *m /= face.len() as f64;
    }
    let mut keyed: Vec<(f64, Coords)> = face
        .iter()
        .map(|v| {
            let rel: Vec<f64> = v.iter().zip(&mean).map(|(a, b)| a - b).collect();
            let x = dot(&rel, &basis[0]);
            let y = dot(&rel, &basis[1]);
            (y.atan2(x), (*v).clone())
        })
        .collect();
    keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    keyed.into_iter().map(|(_, v)| v).collect()
}

//! Planar convex polygon kernel: counter-clockwise vertex loop with one
//! provenance tag per edge.

use super::FacetTag;
use crate::error::{Error, Result};
use crate::EPS;
use serde::{Deserialize, Serialize};

#[inline]
fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = sub(a, b);
    dot2(d, d).sqrt()
}

/// Convex polygon; `tags[i]` is the provenance of the edge from `verts[i]`
/// to `verts[(i+1) % n]`. Vertices run counter-clockwise and successive
/// vertices closer than ε are merged on construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Polygon2 {
    verts: Vec<[f64; 2]>,
    tags: Vec<FacetTag>,
}

impl Polygon2 {
    pub fn new(verts: Vec<[f64; 2]>, tags: Vec<FacetTag>) -> Result<Self> {
        if verts.len() != tags.len() {
            return Err(Error::invalid("one tag per edge required"));
        }
        let mut p = Polygon2 { verts, tags };
        p.merge_close_vertices();
        p.validate()?;
        Ok(p)
    }

    /// Convenience constructor for test bodies; every edge gets the same tag.
    pub fn from_vertices(verts: Vec<[f64; 2]>) -> Result<Self> {
        let tags = vec![FacetTag::Cut(0); verts.len()];
        Polygon2::new(verts, tags)
    }

    fn merge_close_vertices(&mut self) {
        let n = self.verts.len();
        if n < 2 {
            return;
        }
        let mut verts = Vec::with_capacity(n);
        let mut tags = Vec::with_capacity(n);
        for i in 0..n {
            let j = (i + 1) % n;
            // Dropping a zero-length edge keeps the *other* edge's tag.
            if dist(self.verts[i], self.verts[j]) > EPS {
                verts.push(self.verts[i]);
                tags.push(self.tags[i]);
            }
        }
        self.verts = verts;
        self.tags = tags;
    }

    fn validate(&self) -> Result<()> {
        if self.verts.len() < 3 {
            return Err(Error::DegeneratePolytope(3));
        }
        let area = self.area();
        if !(area > EPS * EPS) {
            return Err(Error::DegeneratePolytope(3));
        }
        let n = self.verts.len();
        for i in 0..n {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            let c = self.verts[(i + 2) % n];
            // Convexity up to ε: the turn at b must not be clockwise by more
            // than the tolerance at this edge scale.
            if cross(sub(b, a), sub(c, b)) < -EPS * (dist(a, b) + dist(b, c)) {
                return Err(Error::invalid("polygon is not convex counter-clockwise"));
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.verts
    }

    pub fn tags(&self) -> &[FacetTag] {
        &self.tags
    }

    pub fn edge_count(&self) -> usize {
        self.verts.len()
    }

    /// Signed area by the shoelace formula; positive for CCW loops.
    pub fn area(&self) -> f64 {
        let n = self.verts.len();
        let mut s = 0.0;
        for i in 0..n {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            s += cross(a, b);
        }
        0.5 * s
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.verts.len();
        (0..n)
            .map(|i| dist(self.verts[i], self.verts[(i + 1) % n]))
            .sum()
    }

    pub fn centroid(&self) -> [f64; 2] {
        let n = self.verts.len();
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut s = 0.0;
        for i in 0..n {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            let w = cross(a, b);
            s += w;
            cx += (a[0] + b[0]) * w;
            cy += (a[1] + b[1]) * w;
        }
        [cx / (3.0 * s), cy / (3.0 * s)]
    }

    pub fn support(&self, u: [f64; 2]) -> f64 {
        self.verts
            .iter()
            .map(|v| dot2(*v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf_support(&self, u: [f64; 2]) -> f64 {
        self.verts
            .iter()
            .map(|v| dot2(*v, u))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn width(&self, u: [f64; 2]) -> f64 {
        self.support(u) - self.inf_support(u)
    }

    pub fn diameter(&self) -> f64 {
        let n = self.verts.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(dist(self.verts[i], self.verts[j]));
            }
        }
        best
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let n = self.verts.len();
        (0..n).all(|i| {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            cross(sub(b, a), sub(p, a)) >= -EPS * dist(a, b)
        })
    }

    pub fn translate(&self, v: [f64; 2]) -> Self {
        Polygon2 {
            verts: self.verts.iter().map(|p| [p[0] + v[0], p[1] + v[1]]).collect(),
            tags: self.tags.clone(),
        }
    }

    pub fn scale(&self, r: f64) -> Self {
        Polygon2 {
            verts: self.verts.iter().map(|p| [p[0] * r, p[1] * r]).collect(),
            tags: self.tags.clone(),
        }
    }

    /// Splits along {⟨x, u⟩ = alpha} into the (H⁺, H⁻) parts, tagging the new
    /// chord edge in both children with `tag`. Returns `None` when the line
    /// misses the interior or passes within ε of a vertex (grazing); the
    /// caller resamples. Also reports the chord endpoints.
    pub fn split(
        &self,
        u: [f64; 2],
        alpha: f64,
        tag: FacetTag,
    ) -> Option<(Polygon2, Polygon2)> {
        self.split_with_chord(u, alpha, tag).map(|(a, b, _)| (a, b))
    }

    pub fn split_with_chord(
        &self,
        u: [f64; 2],
        alpha: f64,
        tag: FacetTag,
    ) -> Option<(Polygon2, Polygon2, [[f64; 2]; 2])> {
        let n = self.verts.len();
        let mut d = Vec::with_capacity(n);
        let mut any_pos = false;
        let mut any_neg = false;
        for v in &self.verts {
            let di = dot2(*v, u) - alpha;
            if di.abs() <= EPS {
                return None; // grazing a vertex
            }
            any_pos |= di > 0.0;
            any_neg |= di < 0.0;
            d.push(di);
        }
        if !any_pos || !any_neg {
            return None; // misses the interior
        }

        let mut plus: Vec<([f64; 2], FacetTag)> = Vec::with_capacity(n + 1);
        let mut minus: Vec<([f64; 2], FacetTag)> = Vec::with_capacity(n + 1);
        let mut chord = [[0.0; 2]; 2];
        let mut crossings = 0usize;
        for i in 0..n {
            let j = (i + 1) % n;
            let (vi, di, ti) = (self.verts[i], d[i], self.tags[i]);
            let dj = d[j];
            if di > 0.0 {
                plus.push((vi, ti));
            } else {
                minus.push((vi, ti));
            }
            if (di > 0.0) != (dj > 0.0) {
                let t = di / (di - dj);
                let vj = self.verts[j];
                let c = [vi[0] + t * (vj[0] - vi[0]), vi[1] + t * (vj[1] - vi[1])];
                if crossings < 2 {
                    chord[crossings] = c;
                }
                crossings += 1;
                if dj > 0.0 {
                    // Crossing into H⁺: the remainder of edge i continues in
                    // the plus child; the minus child turns onto the chord.
                    plus.push((c, ti));
                    minus.push((c, tag));
                } else {
                    minus.push((c, ti));
                    plus.push((c, tag));
                }
            }
        }
        // Strict convexity plus the graze rejection force exactly two
        // boundary crossings.
        debug_assert_eq!(crossings, 2);

        let build = |pairs: Vec<([f64; 2], FacetTag)>| -> Option<Polygon2> {
            let (verts, tags) = pairs.into_iter().unzip();
            Polygon2::new(verts, tags).ok()
        };
        let p = build(plus)?;
        let m = build(minus)?;
        Some((p, m, chord))
    }

    /// Intersection with the half-plane {⟨x, u⟩ ≤ c}; boundary-touching
    /// vertices are kept. New boundary edges get `tag`. `None` when the
    /// intersection has empty interior.
    pub fn clip_halfplane(&self, u: [f64; 2], c: f64, tag: FacetTag) -> Option<Polygon2> {
        let n = self.verts.len();
        let d: Vec<f64> = self.verts.iter().map(|v| dot2(*v, u) - c).collect();
        let keep: Vec<bool> = d.iter().map(|&x| x <= EPS).collect();
        if keep.iter().all(|&k| k) {
            return Some(self.clone());
        }
        if keep.iter().all(|&k| !k) {
            return None;
        }
        let mut out: Vec<([f64; 2], FacetTag)> = Vec::with_capacity(n + 2);
        for i in 0..n {
            let j = (i + 1) % n;
            if keep[i] {
                out.push((self.verts[i], self.tags[i]));
            }
            if keep[i] != keep[j] {
                let (di, dj) = (d[i], d[j]);
                let t = if (di - dj).abs() > f64::MIN_POSITIVE {
                    (di / (di - dj)).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let (vi, vj) = (self.verts[i], self.verts[j]);
                let cpt = [vi[0] + t * (vj[0] - vi[0]), vi[1] + t * (vj[1] - vi[1])];
                if keep[j] {
                    out.push((cpt, self.tags[i]));
                } else {
                    out.push((cpt, tag));
                }
            }
        }
        let (verts, tags) = out.into_iter().unzip();
        Polygon2::new(verts, tags).ok()
    }

    /// Intersection of two convex polygons; facets contributed by `other`
    /// carry `other`'s tags. `None` when the interior is empty.
    pub fn intersect(&self, other: &Polygon2) -> Option<Polygon2> {
        let n = other.verts.len();
        let mut acc = self.clone();
        for i in 0..n {
            let a = other.verts[i];
            let b = other.verts[(i + 1) % n];
            let e = sub(b, a);
            let len = dist(a, b);
            // Outward normal of a CCW edge points right of the edge vector.
            let u = [e[1] / len, -e[0] / len];
            let c = dot2(u, a);
            acc = acc.clip_halfplane(u, c, other.tags[i])?;
        }
        Some(acc)
    }
}

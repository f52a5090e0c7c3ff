use super::point::{orient, point_segment_distance, Point};
use crate::error::GeometryError;
use serde::{Deserialize, Serialize};

/// Simple polygon stored as an open vertex loop (the first vertex is not repeated).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn of(points: &[Point]) -> Self {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Self { min, max }
    }

    pub fn overlaps(&self, other: &BoundingBox, tol: f64) -> bool {
        self.min.x <= other.max.x + tol
            && other.min.x <= self.max.x + tol
            && self.min.y <= other.max.y + tol
            && other.min.y <= self.max.y + tol
    }

    pub fn diameter(&self) -> f64 {
        self.min.dist(self.max)
    }
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Self {
        Self { vertices }
    }

    pub fn rectangle(min: Point, max: Point) -> Self {
        Self::new(vec![
            min,
            Point::new(max.x, min.y),
            max,
            Point::new(min.x, max.y),
        ])
    }

    pub fn unit_square() -> Self {
        Self::rectangle(Point::new(0.0, 0.0), Point::new(1.0, 1.0))
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    /// Edges as (start, end) pairs in vertex order.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn bbox(&self) -> BoundingBox {
        BoundingBox::of(&self.vertices)
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    /// Reorders the vertices counter-clockwise.
    pub fn into_ccw(mut self) -> Self {
        if self.signed_area() < 0.0 {
            self.vertices.reverse();
        }
        self
    }

    /// Crossing-number point-in-polygon test; boundary points are unspecified.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn on_boundary(&self, p: Point, tol: f64) -> bool {
        self.edges().any(|(a, b)| point_segment_distance(p, a, b) <= tol)
    }

    /// Checks that no two non-adjacent edges touch and no edge is degenerate.
    pub fn check_simple(&self, tol: f64) -> Result<(), GeometryError> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(GeometryError::NotSimple(format!("polygon has only {n} vertices")));
        }
        let edges: Vec<_> = self.edges().collect();
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a.dist(b) <= tol {
                return Err(GeometryError::NotSimple(format!("degenerate edge {i} at {a:?}")));
            }
            for (j, &(c, d)) in edges.iter().enumerate().skip(i + 1) {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // adjacent edges may only share their common vertex
                    let (far1, far2) = if j == i + 1 { (a, d) } else { (b, c) };
                    if point_segment_distance(far2, a, b) <= tol
                        || point_segment_distance(far1, c, d) <= tol
                    {
                        return Err(GeometryError::NotSimple(format!("edges {i} and {j} fold back")));
                    }
                    continue;
                }
                if segments_touch(a, b, c, d, tol) {
                    return Err(GeometryError::NotSimple(format!(
                        "edges {i} and {j} intersect"
                    )));
                }
            }
        }
        if self.area() <= tol * tol {
            return Err(GeometryError::NotSimple("polygon has zero area".into()));
        }
        Ok(())
    }

    /// Ear-clipping triangulation of a simple polygon. Triangles are counter-clockwise.
    pub fn triangulate(&self) -> Result<Vec<[Point; 3]>, GeometryError> {
        let poly = self.clone().into_ccw();
        let scale = poly.bbox().diameter().max(f64::MIN_POSITIVE);
        let eps = 1e-14 * scale * scale;
        let mut idx: Vec<usize> = (0..poly.len()).collect();
        let v = &poly.vertices;
        let mut tris = Vec::with_capacity(poly.len().saturating_sub(2));
        let mut guard = 0;
        while idx.len() > 3 {
            guard += 1;
            if guard > 10 * poly.len() * poly.len() + 10 {
                return Err(GeometryError::NotSimple("ear clipping did not terminate".into()));
            }
            let m = idx.len();
            let mut clipped = false;
            for k in 0..m {
                let ip = idx[(k + m - 1) % m];
                let ic = idx[k];
                let inx = idx[(k + 1) % m];
                let (a, b, c) = (v[ip], v[ic], v[inx]);
                let o = orient(a, b, c);
                if o.abs() <= eps {
                    // collinear vertex contributes no area
                    idx.remove(k);
                    clipped = true;
                    break;
                }
                if o < 0.0 {
                    continue;
                }
                let blocked = idx.iter().any(|&q| {
                    let p = v[q];
                    q != ip
                        && q != ic
                        && q != inx
                        && p != a
                        && p != b
                        && p != c
                        && point_in_closed_triangle(p, a, b, c, eps)
                });
                if blocked {
                    continue;
                }
                tris.push([a, b, c]);
                idx.remove(k);
                clipped = true;
                break;
            }
            if !clipped {
                return Err(GeometryError::NotSimple("no ear found while triangulating".into()));
            }
        }
        if idx.len() == 3 {
            let t = [v[idx[0]], v[idx[1]], v[idx[2]]];
            if orient(t[0], t[1], t[2]) > eps {
                tris.push(t);
            }
        }
        Ok(tris)
    }
}

pub fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        s += v[i].cross(v[(i + 1) % n]);
    }
    0.5 * s
}

fn point_in_closed_triangle(p: Point, a: Point, b: Point, c: Point, eps: f64) -> bool {
    orient(a, b, p) >= -eps && orient(b, c, p) >= -eps && orient(c, a, p) >= -eps
}

/// True when the closed segments [a,b] and [c,d] come within `tol` of each other.
pub fn segments_touch(a: Point, b: Point, c: Point, d: Point, tol: f64) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    point_segment_distance(c, a, b) <= tol
        || point_segment_distance(d, a, b) <= tol
        || point_segment_distance(a, c, d) <= tol
        || point_segment_distance(b, c, d) <= tol
}

/// Sutherland-Hodgman clip of `subject` against the half plane to the left of a -> b.
pub fn clip_halfplane(subject: &[Point], a: Point, b: Point) -> Vec<Point> {
    let n = subject.len();
    let mut out = Vec::with_capacity(n + 2);
    if n == 0 {
        return out;
    }
    let side = |p: Point| orient(a, b, p);
    for i in 0..n {
        let cur = subject[i];
        let next = subject[(i + 1) % n];
        let sc = side(cur);
        let sn = side(next);
        if sc >= 0.0 {
            out.push(cur);
        }
        if (sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0) {
            let t = sc / (sc - sn);
            out.push(cur.lerp(next, t));
        }
    }
    out
}

/// Intersection of a convex `subject` with a convex counter-clockwise `clip` polygon.
pub fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut out = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if out.len() < 3 {
            return Vec::new();
        }
        out = clip_halfplane(&out, clip[i], clip[(i + 1) % n]);
    }
    if out.len() < 3 {
        Vec::new()
    } else {
        out
    }
}

/// Cyrus-Beck clipping of the segment a -> b against a convex counter-clockwise polygon.
/// Returns the parameter interval of the part inside, if non-empty.
pub fn clip_segment_convex(a: Point, b: Point, convex: &[Point]) -> Option<(f64, f64)> {
    let d = b - a;
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    let n = convex.len();
    for i in 0..n {
        let p = convex[i];
        let q = convex[(i + 1) % n];
        // inside: orient(p, q, x) >= 0
        let num = orient(p, q, a);
        let den = (q - p).cross(d);
        if den == 0.0 {
            if num < 0.0 {
                return None;
            }
            continue;
        }
        let t = -num / den;
        if den > 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}

//! Extraction of the skeleton (the union of interior subdomain interfaces)
//! from a tiling by simple polygons.

use super::point::{point_segment_distance, Point};
use super::polygon::Polygon;
use crate::error::GeometryError;
use serde::Serialize;

/// A maximal piece of interface shared by exactly two subdomains, stored as a polyline.
///
/// The polyline is oriented counter-clockwise with respect to `pair.0`, so the
/// outward normal of subdomain `pair.0` on every leg is the leg direction rotated clockwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkeletonComponent {
    pub points: Vec<Point>,
    pub pair: (usize, usize),
}

impl SkeletonComponent {
    pub fn legs(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.legs().map(|(a, b)| a.dist(b)).sum()
    }

    /// Unit normal of a leg pointing out of subdomain `pair.0`.
    pub fn leg_normal(a: Point, b: Point) -> Point {
        (b - a).rot_cw().normalized()
    }

    pub fn contains_point(&self, p: Point, tol: f64) -> bool {
        self.legs().any(|(a, b)| point_segment_distance(p, a, b) <= tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryKind {
    /// Piece of the outer boundary, where the hybrid variable is zero.
    Outer,
    /// Piece of the given skeleton component.
    Skeleton(usize),
}

/// A straight piece of a subdomain boundary, oriented counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPiece {
    pub a: Point,
    pub b: Point,
    pub kind: BoundaryKind,
}

impl BoundaryPiece {
    pub fn outward_normal(&self) -> Point {
        (self.b - self.a).rot_cw().normalized()
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }
}

#[derive(Debug, Clone, Copy)]
enum Owner {
    Outer,
    Neighbour(usize),
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: Point,
    b: Point,
    owner: Owner,
}

fn collinear_with(a: Point, b: Point, c: Point, d: Point, tol: f64) -> bool {
    let dir = (b - a).normalized();
    let off_c = (c - a).cross(dir).abs();
    let off_d = (d - a).cross(dir).abs();
    off_c <= tol && off_d <= tol
}

/// Splits every subdomain edge into pieces with a unique owner on the other side.
fn classify_edges(
    domain: &Polygon,
    subdomains: &[Polygon],
    tol: f64,
) -> Result<Vec<Vec<Piece>>, GeometryError> {
    let mut out = Vec::with_capacity(subdomains.len());
    for (i, poly) in subdomains.iter().enumerate() {
        let mut pieces = Vec::new();
        for (a, b) in poly.edges() {
            let len = a.dist(b);
            let dir = (b - a) * (1.0 / len);
            let param = |p: Point| (p - a).dot(dir) / len;
            let mut cuts = vec![0.0, 1.0];
            let mut add_cuts_from = |c: Point, d: Point| {
                if collinear_with(a, b, c, d, tol) {
                    for p in [c, d] {
                        let t = param(p);
                        if t > 0.0 && t < 1.0 {
                            cuts.push(t);
                        }
                    }
                }
            };
            for (j, other) in subdomains.iter().enumerate() {
                if j != i {
                    for (c, d) in other.edges() {
                        add_cuts_from(c, d);
                    }
                }
            }
            for (c, d) in domain.edges() {
                add_cuts_from(c, d);
            }
            cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            cuts.dedup_by(|x, y| (*x - *y).abs() * len <= tol);
            if let Some(last) = cuts.last_mut() {
                *last = 1.0;
            }
            for w in cuts.windows(2) {
                // keep exact vertex coordinates at the edge ends
                let pa = if w[0] == 0.0 { a } else { a.lerp(b, w[0]) };
                let pb = if w[1] == 1.0 { b } else { a.lerp(b, w[1]) };
                if pa.dist(pb) <= tol {
                    continue;
                }
                let mid = pa.lerp(pb, 0.5);
                let on_outer = domain.edges().any(|(c, d)| {
                    collinear_with(a, b, c, d, tol) && point_segment_distance(mid, c, d) <= tol
                });
                let mut neighbours = Vec::new();
                for (j, other) in subdomains.iter().enumerate() {
                    if j != i
                        && other.edges().any(|(c, d)| {
                            collinear_with(a, b, c, d, tol)
                                && point_segment_distance(mid, c, d) <= tol
                        })
                    {
                        neighbours.push(j);
                    }
                }
                let owner = match (on_outer, neighbours.as_slice()) {
                    (true, []) => Owner::Outer,
                    (false, [j]) => Owner::Neighbour(*j),
                    (false, []) => {
                        return Err(GeometryError::DanglingEdge {
                            subdomain: i,
                            from: (pa.x, pa.y),
                            to: (pb.x, pb.y),
                        })
                    }
                    (_, [j, ..]) => return Err(GeometryError::Overlap(i, *j, 0.0)),
                };
                pieces.push(Piece { a: pa, b: pb, owner });
            }
        }
        out.push(pieces);
    }
    Ok(out)
}

/// Extracts the skeleton components and the classified boundary of every subdomain.
///
/// Components are split wherever three or more subdomains meet, or where the
/// interface reaches the outer boundary, so each component separates exactly two subdomains.
pub fn extract_skeleton(
    domain: &Polygon,
    subdomains: &[Polygon],
    tol: f64,
) -> Result<(Vec<SkeletonComponent>, Vec<Vec<BoundaryPiece>>), GeometryError> {
    let classified = classify_edges(domain, subdomains, tol)?;

    let touches = |p: Point, k: usize| subdomains[k].on_boundary(p, tol);
    let on_domain_boundary = |p: Point| domain.on_boundary(p, tol);

    let mut components = Vec::new();
    // component index per (subdomain, piece), filled for the lower-indexed side first
    let mut labels: Vec<Vec<Option<usize>>> =
        classified.iter().map(|p| vec![None; p.len()]).collect();

    let n = subdomains.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let ids: Vec<usize> = classified[i]
                .iter()
                .enumerate()
                .filter(|(_, p)| matches!(p.owner, Owner::Neighbour(k) if k == j))
                .map(|(idx, _)| idx)
                .collect();
            if ids.is_empty() {
                continue;
            }
            let pieces = &classified[i];
            let continues_at = |v: Point| {
                let count = ids
                    .iter()
                    .filter(|&&q| pieces[q].a.approx_eq(v, tol) || pieces[q].b.approx_eq(v, tol))
                    .count();
                count == 2
                    && !on_domain_boundary(v)
                    && !(0..n).any(|k| k != i && k != j && touches(v, k))
            };
            let mut visited = vec![false; ids.len()];
            let mut chains: Vec<Vec<usize>> = Vec::new();
            // open chains first: start at pieces whose start point is a chain end
            let mut order: Vec<usize> = (0..ids.len())
                .filter(|&s| !continues_at(pieces[ids[s]].a))
                .collect();
            order.extend(0..ids.len());
            for s in order {
                if visited[s] {
                    continue;
                }
                let mut chain = vec![s];
                visited[s] = true;
                let mut cur = s;
                loop {
                    let end = pieces[ids[cur]].b;
                    if !continues_at(end) {
                        break;
                    }
                    let next = (0..ids.len())
                        .find(|&q| !visited[q] && pieces[ids[q]].a.approx_eq(end, tol));
                    match next {
                        Some(q) => {
                            visited[q] = true;
                            chain.push(q);
                            cur = q;
                        }
                        None => break,
                    }
                }
                chains.push(chain);
            }
            for chain in chains {
                let comp_id = components.len();
                let mut points = vec![pieces[ids[chain[0]]].a];
                for &q in &chain {
                    labels[i][ids[q]] = Some(comp_id);
                    points.push(pieces[ids[q]].b);
                }
                components.push(SkeletonComponent {
                    points: merge_collinear(points, tol),
                    pair: (i, j),
                });
            }
        }
    }

    // label the higher-indexed side by locating piece midpoints on the components
    for (i, pieces) in classified.iter().enumerate() {
        for (q, piece) in pieces.iter().enumerate() {
            if let Owner::Neighbour(j) = piece.owner {
                if j < i {
                    let mid = piece.a.lerp(piece.b, 0.5);
                    let comp = components
                        .iter()
                        .position(|c| c.pair == (j, i) && c.contains_point(mid, tol))
                        .ok_or_else(|| {
                            GeometryError::InvalidPartition(format!(
                                "interface piece of subdomain {i} not matched by subdomain {j}"
                            ))
                        })?;
                    labels[i][q] = Some(comp);
                }
            }
        }
    }

    let boundaries = classified
        .iter()
        .zip(&labels)
        .map(|(pieces, labels)| {
            pieces
                .iter()
                .zip(labels)
                .map(|(p, l)| BoundaryPiece {
                    a: p.a,
                    b: p.b,
                    kind: match p.owner {
                        Owner::Outer => BoundaryKind::Outer,
                        Owner::Neighbour(_) => BoundaryKind::Skeleton(l.expect("labelled")),
                    },
                })
                .collect()
        })
        .collect();

    Ok((components, boundaries))
}

fn merge_collinear(points: Vec<Point>, tol: f64) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            if point_segment_distance(b, a, p) <= tol && (b - a).dot(p - b) > 0.0 {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}

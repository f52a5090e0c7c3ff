//! Independent oracles and property checks shared by the integration tests.
#![allow(dead_code)]

use hycut::forms::assembly::{assemble_face_jumps, sparse, Triplets};
use hycut::forms::{assemble_ghost_penalty_bulk, BlockSystem, Discretization, MethodParams, SkeletonMode};
use hycut::geometry::{
    cut_cell_quadrature, ActiveMesh, BackgroundGrid, CellKind, PartitionSpec, Point, Polygon,
    PolygonalPartition, Region,
};
use hycut::solver::linalg::{dot, matvec, norm};
use hycut::solver::SchurOperator;
use hycut::spaces::{FeSpace, SpaceMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>() - 0.5).collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(a: &[f64], k: usize) -> Vec<f64> {
    (0..k).fold(vec![1.0], |acc, _| poly_mul(&acc, a))
}

/// Integral of x^a y^b over a simple counter-clockwise polygon, from the boundary
/// integral of x^(a+1) y^b / (a+1) dy, each edge expanded exactly in its parameter.
pub fn green_monomial(poly: &[Point], a: usize, b: usize) -> f64 {
    let mut total = 0.0;
    for k in 0..poly.len() {
        let (p, q) = (poly[k], poly[(k + 1) % poly.len()]);
        let x = [p.x, q.x - p.x];
        let y = [p.y, q.y - p.y];
        let integrand = poly_mul(&poly_pow(&x, a + 1), &poly_pow(&y, b));
        let s: f64 = integrand.iter().enumerate().map(|(i, c)| c / (i + 1) as f64).sum();
        total += s * (q.y - p.y) / (a + 1) as f64;
    }
    total
}

/// Star-shaped polygon around (0.5, 0.5) with `k` vertices, one per angular sector.
pub fn random_star(k: usize, rng: &mut ChaCha8Rng) -> Polygon {
    let sector = std::f64::consts::TAU / k as f64;
    let v = (0..k)
        .map(|i| {
            let t = (i as f64 + 0.1 + 0.8 * rng.random::<f64>()) * sector;
            let r = 0.15 + 0.3 * rng.random::<f64>();
            Point::new(0.5 + r * t.cos(), 0.5 + r * t.sin())
        })
        .collect();
    Polygon::new(v).into_ccw()
}

/// Worst relative error of cellwise cut quadrature against Green's theorem over
/// all monomials of total degree <= order.
pub fn quadrature_exactness_error(poly: &Polygon, n: usize, order: usize) -> f64 {
    let grid = BackgroundGrid::unit_square(n, CellKind::Quad);
    let tris = poly.triangulate().expect("simple polygon");
    let rules: Vec<_> = (0..grid.num_cells())
        .filter_map(|c| cut_cell_quadrature(&grid.cell_vertices(c), &tris, order).ok())
        .collect();
    let mut worst = 0.0f64;
    for deg in 0..=order {
        for a in 0..=deg {
            let b = deg - a;
            let exact = green_monomial(&poly.vertices, a, b);
            let approx: f64 = rules.iter().map(|r| r.integrate(|x| x.x.powi(a as i32) * x.y.powi(b as i32))).sum();
            worst = worst.max((approx - exact).abs() / exact.abs().max(1e-300));
        }
    }
    worst
}

/// Relative deviation of the summed active-mesh areas from the domain area.
pub fn coverage_error(part: &PolygonalPartition, grid: &BackgroundGrid) -> f64 {
    let total: f64 = (0..part.num_subdomains())
        .map(|i| {
            let mesh = ActiveMesh::build(grid, part, Region::Bulk(i)).unwrap();
            (0..mesh.len()).map(|k| mesh.cell_quadrature(k, 1).measure()).sum::<f64>()
        })
        .sum();
    let area = part.domain.area();
    (total - area).abs() / area
}

/// Random polynomial with coordinate degree <= p: tensor degree on quads, total on triangles.
#[derive(Debug, Clone)]
pub struct Poly {
    pub terms: Vec<(usize, usize, f64)>,
}

impl Poly {
    pub fn random(p: usize, kind: CellKind, rng: &mut ChaCha8Rng) -> Self {
        let mut terms = Vec::new();
        for a in 0..=p {
            for b in 0..=p {
                if kind == CellKind::Triangle && a + b > p {
                    continue;
                }
                terms.push((a, b, 2.0 * rng.random::<f64>() - 1.0));
            }
        }
        Self { terms }
    }

    pub fn eval(&self, x: Point) -> f64 {
        self.terms
            .iter()
            .map(|&(a, b, c)| c * x.x.powi(a as i32) * x.y.powi(b as i32))
            .sum()
    }
}

fn two_halves(x: f64) -> PolygonalPartition {
    PolygonalPartition::build(&PartitionSpec::TwoHalves { interface_x: x }).unwrap()
}

/// Worst pointwise interpolation error of a global polynomial on a cut bulk space.
pub fn reproduction_error(p: usize, kind: CellKind, n: usize, cut: f64, rng: &mut ChaCha8Rng) -> f64 {
    let grid = BackgroundGrid::unit_square(n, kind);
    let mesh = ActiveMesh::build(&grid, &two_halves(cut), Region::Bulk(0)).unwrap();
    let space = FeSpace::on_active_mesh(&mesh, p, SpaceMode::Bulk).unwrap();
    let poly = Poly::random(p, kind, rng);
    let coeffs = space.interpolate(|x| poly.eval(x));
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let k = rng.random_range(0..space.num_cells());
        let v = &space.cells[k].vertices;
        // random convex combination of the cell vertices
        let mut w: Vec<f64> = v.iter().map(|_| rng.random::<f64>()).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        let x = v.iter().zip(&w).fold(Point::default(), |acc, (&q, &t)| acc + q * t);
        worst = worst.max((space.value(&coeffs, k, x) - poly.eval(x)).abs());
    }
    worst
}

fn apply(n: usize, t: &Triplets, v: &[f64]) -> Vec<f64> {
    matvec(&sparse(n, n, t).unwrap(), v)
}

/// Largest entry of S v for S the bulk ghost penalty or the skeleton band face jumps and
/// v the interpolant of a global polynomial of degree <= p.
pub fn stabilization_consistency_error(p: usize, n: usize, cut: f64, rng: &mut ChaCha8Rng) -> f64 {
    let part = two_halves(cut);
    let disc = Discretization::new(
        part,
        BackgroundGrid::unit_square(n, CellKind::Quad),
        SkeletonMode::GlobalBackgroundGrid,
        p,
        p,
    )
    .unwrap();
    let params = MethodParams::defaults(p, p);
    let poly = Poly::random(p, CellKind::Quad, rng);
    let mut worst = 0.0f64;
    for space in disc.bulk_spaces.iter().chain(&disc.skeleton_spaces) {
        let v = space.interpolate(|x| poly.eval(x));
        let t = match space.mode {
            SpaceMode::Bulk => assemble_ghost_penalty_bulk(space, &params.c_bulk, params.segment_order),
            _ => {
                let h = space.h;
                let c = &params.c_skel;
                assemble_face_jumps(space, &space.ghost_faces, |l| c[l - 1] * h.powi(2 * l as i32), p, params.segment_order)
            }
        };
        assert!(!t.is_empty());
        let r = apply(space.n_dofs, &t, &v);
        worst = r.iter().fold(worst, |m, x| m.max(x.abs()));
    }
    worst
}

pub fn cut_system(n: usize, p: usize, cut: f64, mode: SkeletonMode, beta: Option<f64>) -> BlockSystem {
    let disc = Discretization::new(two_halves(cut), BackgroundGrid::unit_square(n, CellKind::Quad), mode, p, p).unwrap();
    let rhs = |i: usize, x: Point| 1.0 + i as f64 * x.x;
    let mut params = MethodParams::defaults(p, p);
    if let Some(b) = beta {
        params = params.with_beta(b);
    }
    BlockSystem::assemble(&disc, &params, &rhs).unwrap()
}

/// Largest bulk entry of A [v0; T_h v0] relative to the largest entry of A [v0; 0].
pub fn orthogonality_error(sys: &BlockSystem, rng: &mut ChaCha8Rng) -> f64 {
    let op = SchurOperator::new(sys).unwrap();
    let v0 = random_vec(op.dim(), rng);
    let mut ext = v0.clone();
    let mut plain = v0.clone();
    for w in op.apply_th(&v0) {
        plain.extend(std::iter::repeat_n(0.0, w.len()));
        ext.extend(w);
    }
    let a = sys.full_matrix().unwrap();
    let scale = matvec(&a, &plain).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let r = matvec(&a, &ext);
    r[op.dim()..].iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale
}

/// Symmetry defect |<Sv,w> - <v,Sw>| / (|v||w|) and the Rayleigh quotient <Sv,v> / |v|^2.
pub fn schur_symmetry_and_energy(sys: &BlockSystem, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let op = SchurOperator::new(sys).unwrap();
    let v = random_vec(op.dim(), rng);
    let w = random_vec(op.dim(), rng);
    let (sv, sw) = (op.apply(&v), op.apply(&w));
    let defect = (dot(&sv, &w) - dot(&v, &sw)).abs() / (norm(&v) * norm(&w));
    (defect, dot(&sv, &v) / dot(&v, &v))
}

/// Maximum of |A - A^T| relative to the maximum of |A|.
pub fn asymmetry(sys: &BlockSystem) -> f64 {
    let a = sys.full_matrix().unwrap();
    let mut entries = std::collections::HashMap::new();
    let mut max = 0.0f64;
    for t in a.triplet_iter() {
        *entries.entry((t.row, t.col)).or_insert(0.0) += *t.val;
    }
    for v in entries.values() {
        max = max.max(v.abs());
    }
    let mut worst = 0.0f64;
    for (&(r, c), &v) in &entries {
        let w = entries.get(&(c, r)).copied().unwrap_or(0.0);
        worst = worst.max((v - w).abs());
    }
    worst / max
}

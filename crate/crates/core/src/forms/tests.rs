use super::*;
use crate::geometry::{BackgroundGrid, CellKind, PartitionSpec, Point, PolygonalPartition};
use faer::Side;

fn halves(x: f64, n: usize, p: usize, p0: usize, mode: SkeletonMode) -> Discretization {
    let part = PolygonalPartition::build(&PartitionSpec::TwoHalves { interface_x: x }).unwrap();
    Discretization::new(part, BackgroundGrid::unit_square(n, CellKind::Quad), mode, p, p0).unwrap()
}

fn quad_form(m: &SparseMatrix, v: &[f64], w: &[f64]) -> f64 {
    m.triplet_iter().map(|e| v[e.row] * e.val * w[e.col]).sum()
}

fn dense(m: &SparseMatrix) -> faer::Mat<f64> {
    m.to_dense()
}

fn min_eigenvalue(m: &SparseMatrix) -> f64 {
    let ev = dense(m).self_adjoint_eigenvalues(Side::Lower).unwrap();
    ev.into_iter().fold(f64::INFINITY, f64::min)
}

fn zero_rhs(_: usize, _: Point) -> f64 {
    0.0
}

const CUT: f64 = 0.5 + 0.25 / 3.0;

#[test]
fn stiffness_kills_constants_and_measures_area() {
    let d = halves(CUT, 4, 1, 1, SkeletonMode::GlobalBackgroundGrid);
    let space = &d.bulk_spaces[0];
    let t = assemble_bulk_stiffness(space, &d.bulk_meshes[0], 1.0, 5);
    let k = assembly::sparse(space.n_dofs, space.n_dofs, &t).unwrap();
    let ones = vec![1.0; space.n_dofs];
    let ko: f64 = quad_form(&k, &ones, &ones);
    assert!(ko.abs() < 1e-14);
    let x = space.interpolate(|p| p.x);
    assert!((quad_form(&k, &x, &x) - CUT).abs() < 1e-13);
}

#[test]
fn dirichlet_energy_converges_quadratically() {
    let f = |p: Point| (p.x * 2.0).sin() * (p.y + 1.0).ln();
    let exact = {
        // fine tensor Gauss reference of |grad f|^2 over [0, CUT] x [0, 1]
        let (xs, ws) = crate::geometry::quadrature::gauss_legendre(40);
        let mut s = 0.0;
        for (xi, wi) in xs.iter().zip(&ws) {
            for (yj, wj) in xs.iter().zip(&ws) {
                let (x, y) = (xi * CUT, *yj);
                let gx = 2.0 * (2.0 * x).cos() * (y + 1.0).ln();
                let gy = (2.0 * x).sin() / (y + 1.0);
                s += wi * wj * CUT * (gx * gx + gy * gy);
            }
        }
        s
    };
    let err = |n: usize| {
        let part = PolygonalPartition::build(&PartitionSpec::TwoHalves { interface_x: CUT }).unwrap();
        let d = Discretization::new(
            part,
            BackgroundGrid::unit_square(n, CellKind::Quad),
            SkeletonMode::GlobalBackgroundGrid,
            1,
            1,
        )
        .unwrap();
        let s = &d.bulk_spaces[0];
        let k = assembly::sparse(s.n_dofs, s.n_dofs, &assemble_bulk_stiffness(s, &d.bulk_meshes[0], 1.0, 5))
            .unwrap();
        let v = s.interpolate(f);
        (quad_form(&k, &v, &v) - exact).abs()
    };
    let (e1, e2) = (err(8), err(16));
    assert!(e2 < e1 / 3.0, "{e1} {e2}");
}

#[test]
fn nitsche_penalty_of_unit_jump() {
    let d = halves(CUT, 4, 1, 1, SkeletonMode::GlobalBackgroundGrid);
    let params = MethodParams::defaults(1, 1);
    let layout = DofLayout::new(&d);
    let nit = assemble_nitsche(&d, 0, &params, &layout.skeleton_offsets);
    let n0 = d.bulk_spaces[0].n_dofs;
    let aii = assembly::sparse(n0, n0, &nit.aii).unwrap();
    let ones = vec![1.0; n0];
    // v_i = 1, v_0 = 0: only the penalty over the whole boundary survives
    let perimeter = 2.0 * (CUT + 1.0);
    let expected = params.beta / d.h(0) * perimeter;
    assert!((quad_form(&aii, &ones, &ones) - expected).abs() < 1e-11 * expected);

    // matched constants on the interface leave only the outer boundary penalty
    let ns = layout.n_skeleton;
    let a0i = assembly::sparse(ns, n0, &nit.a0i).unwrap();
    let a00 = assembly::sparse(ns, ns, &nit.a00).unwrap();
    let s1 = vec![1.0; ns];
    let total = quad_form(&aii, &ones, &ones) + 2.0 * quad_form(&a0i, &s1, &ones) + quad_form(&a00, &s1, &s1);
    let outer = params.beta / d.h(0) * (perimeter - 1.0);
    assert!((total - outer).abs() < 1e-11 * outer);
}

#[test]
fn full_matrix_is_symmetric_and_bulk_blocks_decouple() {
    for mode in [SkeletonMode::GlobalBackgroundGrid, SkeletonMode::SingleElementInterfaces] {
        let d = halves(CUT, 8, 2, 2, mode);
        let sys = BlockSystem::assemble(&d, &MethodParams::defaults(2, 2), &zero_rhs).unwrap();
        let a = dense(&sys.full_matrix().unwrap());
        let n = a.nrows();
        let mut max = 0.0f64;
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                max = max.max(a[(i, j)].abs());
                asym = asym.max((a[(i, j)] - a[(j, i)]).abs());
            }
        }
        assert!(asym <= 1e-12 * max);
        let (o0, o1) = (sys.layout.bulk_offsets[0], sys.layout.bulk_offsets[1]);
        for i in o0..o1 {
            for j in o1..n {
                assert_eq!(a[(i, j)], 0.0);
            }
        }
    }
}

#[test]
fn ghost_penalty_vanishes_on_global_polynomials() {
    for p in 1..=3 {
        let d = halves(CUT, 8, p, p, SkeletonMode::GlobalBackgroundGrid);
        let s = &d.bulk_spaces[0];
        assert!(!s.ghost_faces.is_empty());
        let c = vec![1.0; p];
        let g = assembly::sparse(s.n_dofs, s.n_dofs, &assemble_ghost_penalty_bulk(s, &c, 2 * p + 1)).unwrap();
        let v = s.interpolate(|x| (x.x - 0.3).powi(p as i32) + x.x * x.y.powi(p as i32 - 1) + 2.0);
        for k in 0..s.n_dofs {
            let mut e = vec![0.0; s.n_dofs];
            e[k] = 1.0;
            assert!(quad_form(&g, &v, &e).abs() < 1e-11, "p={p}");
        }
    }
}

#[test]
fn ghost_penalty_of_a_kink() {
    // v = |x - 0.5| on Q1 has gradient jump 2 across the face column x = 0.5
    let d = halves(CUT, 4, 1, 1, SkeletonMode::GlobalBackgroundGrid);
    let s = &d.bulk_spaces[0];
    let h = s.h;
    let faces: Vec<_> = s
        .ghost_faces
        .iter()
        .filter(|f| (f.face.a.x - 0.5).abs() < 1e-14 && (f.face.b.x - 0.5).abs() < 1e-14)
        .copied()
        .take(1)
        .collect();
    assert_eq!(faces.len(), 1);
    let t = assembly::assemble_face_jumps(s, &faces, |l| [1e-3][l - 1] * h.powi(2 * l as i32 - 1), 1, 3);
    let g = assembly::sparse(s.n_dofs, s.n_dofs, &t).unwrap();
    let v = s.interpolate(|x| (x.x - 0.5).abs());
    let expected = 1e-3 * h * 4.0 * h;
    assert!((quad_form(&g, &v, &v) - expected).abs() < 1e-15);
}

#[test]
fn skeleton_stabilization_examples() {
    let d = halves(CUT, 4, 1, 1, SkeletonMode::GlobalBackgroundGrid);
    let s = &d.skeleton_spaces[0];
    let c = [1e-3];
    let t = assemble_skeleton_stabilization(s, &d.skeleton_segments[0], &c, 3);
    let m = assembly::sparse(s.n_dofs, s.n_dofs, &t).unwrap();
    let ones = vec![1.0; s.n_dofs];
    assert!(quad_form(&m, &ones, &ones).abs() < 1e-16);
    // distance along the normal of the vertical segment
    let v = s.interpolate(|p| p.x - CUT);
    let expected = 1e-3 * s.h * s.h * 1.0;
    assert!((quad_form(&m, &v, &v) - expected).abs() < 1e-15);
    // constant in the normal direction
    let q2 = halves(CUT, 4, 2, 2, SkeletonMode::GlobalBackgroundGrid);
    let s2 = &q2.skeleton_spaces[0];
    let t2 = assemble_skeleton_stabilization(s2, &q2.skeleton_segments[0], &[0.0, 0.0], 5);
    assert!(t2.is_empty());
    let t2 = assemble_skeleton_stabilization(s2, &q2.skeleton_segments[0], &[1.0, 1.0], 5);
    let m2 = assembly::sparse(s2.n_dofs, s2.n_dofs, &t2).unwrap();
    let w = s2.interpolate(|p| p.y * p.y - p.y);
    assert!(quad_form(&m2, &w, &w).abs() < 1e-11);
}

#[test]
fn load_sums() {
    let d = halves(CUT, 4, 2, 2, SkeletonMode::GlobalBackgroundGrid);
    let s = &d.bulk_spaces[1];
    let l = assemble_load(s, &d.bulk_meshes[1], |_| 1.0, 9);
    assert!((l.iter().sum::<f64>() - (1.0 - CUT)).abs() < 1e-13);
    let z = assemble_load(s, &d.bulk_meshes[1], |_| 0.0, 9);
    assert!(z.iter().all(|&v| v == 0.0));
    // a smooth source against a high-order tensor reference
    let f = |p: Point| (3.0 * p.x).sin() * (2.0 * p.y).cos();
    let l = assemble_load(s, &d.bulk_meshes[1], f, 13);
    let (xs, ws) = crate::geometry::quadrature::gauss_legendre(30);
    let mut reference = 0.0;
    for (xi, wi) in xs.iter().zip(&ws) {
        for (yj, wj) in xs.iter().zip(&ws) {
            let x = CUT + xi * (1.0 - CUT);
            reference += wi * wj * (1.0 - CUT) * f(Point::new(x, *yj));
        }
    }
    assert!((l.iter().sum::<f64>() - reference).abs() < 1e-10);
}

struct Constant(usize);

impl ExactSolution for Constant {
    fn bulk(&self, i: usize, _: Point) -> f64 {
        if i == self.0 {
            1.0
        } else {
            0.0
        }
    }
    fn bulk_gradient(&self, _: usize, _: Point) -> Point {
        Point::default()
    }
    fn skeleton(&self, _: usize, _: Point) -> f64 {
        0.0
    }
}

#[test]
fn energy_norm_examples() {
    let d = halves(CUT, 4, 1, 1, SkeletonMode::GlobalBackgroundGrid);
    let params = MethodParams::defaults(1, 1);
    let layout = DofLayout::new(&d);
    let zero = vec![0.0; layout.n_total];
    assert_eq!(energy_norm(&d, &layout, &zero, &params), 0.0);
    let mut d1 = d.clone();
    d1.partition.set_coefficients(&[1.0, 1.0]).unwrap();
    let u = interpolate(&d1, &layout, &Constant(0));
    let e = energy_norm(&d1, &layout, &u, &params);
    let perimeter = 2.0 * (CUT + 1.0);
    assert!((e * e - perimeter / d1.h(0)).abs() < 1e-11);
    assert!(energy_error(&d1, &layout, &u, &Constant(0), &params) < 1e-13);
    let l2 = l2_errors(&d1, &layout, &u, &Constant(0), &params);
    assert!(l2.total < 1e-14 && l2.skeleton < 1e-14);
}

#[test]
fn penalty_threshold() {
    let d = halves(0.5 + 0.125 * 0.3, 8, 1, 1, SkeletonMode::GlobalBackgroundGrid);
    let good = BlockSystem::assemble(&d, &MethodParams::defaults(1, 1), &zero_rhs).unwrap();
    assert!(min_eigenvalue(&good.full_matrix().unwrap()) > 0.0);
    let bad = BlockSystem::assemble(&d, &MethodParams::defaults(1, 1).with_beta(0.01), &zero_rhs).unwrap();
    assert!(min_eigenvalue(&bad.full_matrix().unwrap()) <= 0.0);
}

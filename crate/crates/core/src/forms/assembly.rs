//! Assembly of the hybridized system in skeleton/bulk blocks.

use super::discretization::{BoundarySegment, Discretization, SkeletonSegment};
use super::params::MethodParams;
use crate::error::{Result, SolverError};
use crate::geometry::quadrature::segment_rule;
use crate::geometry::{ActiveMesh, GhostFace, Point};
use crate::spaces::FeSpace;
use faer::sparse::{SparseColMat, Triplet};
use rayon::prelude::*;

pub type Triplets = Vec<Triplet<usize, usize, f64>>;
pub type SparseMatrix = SparseColMat<usize, f64>;

/// Source term evaluated as `f(subdomain, x)`.
pub type Rhs<'a> = &'a (dyn Fn(usize, Point) -> f64 + Sync);

/// Adds `m` (row-major, rows x cols) at the given global indices.
fn scatter(out: &mut Triplets, rows: &[usize], cols: &[usize], m: &[f64]) {
    let nc = cols.len();
    for (r, &gr) in rows.iter().enumerate() {
        for (c, &gc) in cols.iter().enumerate() {
            let v = m[r * nc + c];
            if v != 0.0 {
                out.push(Triplet::new(gr, gc, v));
            }
        }
    }
}

fn offset(t: Triplets, dr: usize, dc: usize) -> impl Iterator<Item = Triplet<usize, usize, f64>> {
    t.into_iter()
        .map(move |e| Triplet::new(e.row + dr, e.col + dc, e.val))
}

pub fn sparse(nrows: usize, ncols: usize, t: &[Triplet<usize, usize, f64>]) -> Result<SparseMatrix> {
    SparseColMat::try_new_from_triplets(nrows, ncols, t)
        .map_err(|e| SolverError::Sparse(format!("{e:?}")).into())
}

/// (a grad v, grad w) over the part of each active cell inside the subdomain.
pub fn assemble_bulk_stiffness(space: &FeSpace, mesh: &ActiveMesh, a: f64, order: usize) -> Triplets {
    let mut out = Vec::new();
    let n = space.basis.len();
    let mut local = vec![0.0; n * n];
    for (k, cell) in space.cells.iter().enumerate() {
        local.iter_mut().for_each(|v| *v = 0.0);
        let rule = mesh.cell_quadrature(k, order);
        for (&x, &w) in rule.points.iter().zip(&rule.weights) {
            let g = space.basis_gradients(k, x);
            for r in 0..n {
                for c in 0..n {
                    local[r * n + c] += w * a * g[r].dot(g[c]);
                }
            }
        }
        scatter(&mut out, &cell.dofs, &cell.dofs, &local);
    }
    out
}

/// Sum over faces and l of weight(l) * ([D_n^l v], [D_n^l w])_F.
pub fn assemble_face_jumps(
    space: &FeSpace,
    faces: &[GhostFace],
    weight: impl Fn(usize) -> f64,
    max_order: usize,
    quad_order: usize,
) -> Triplets {
    let mut out = Vec::new();
    let n = space.basis.len();
    let mut local = vec![0.0; 4 * n * n];
    let mut jump = vec![0.0; 2 * n];
    for gf in faces {
        let (k, m) = gf.cells;
        let face = &gf.face;
        let rule = segment_rule(face.a, face.b, quad_order);
        local.iter_mut().for_each(|v| *v = 0.0);
        for l in 1..=max_order {
            let wl = weight(l);
            if wl == 0.0 {
                continue;
            }
            for (&x, &w) in rule.points.iter().zip(&rule.weights) {
                let dk = space.basis_directional(k, x, face.normal, l);
                let dm = space.basis_directional(m, x, face.normal, l);
                jump[..n].copy_from_slice(&dk);
                jump[n..].iter_mut().zip(&dm).for_each(|(j, d)| *j = -d);
                for r in 0..2 * n {
                    for c in 0..2 * n {
                        local[r * 2 * n + c] += w * wl * jump[r] * jump[c];
                    }
                }
            }
        }
        let dofs: Vec<usize> = space.cells[k]
            .dofs
            .iter()
            .chain(&space.cells[m].dofs)
            .copied()
            .collect();
        scatter(&mut out, &dofs, &dofs, &local);
    }
    out
}

/// Bulk ghost penalty: sum_l c_l h^(2l-1) ([D_n^l v], [D_n^l w]) over the ghost faces.
pub fn assemble_ghost_penalty_bulk(space: &FeSpace, c: &[f64], quad_order: usize) -> Triplets {
    let h = space.h;
    assemble_face_jumps(
        space,
        &space.ghost_faces,
        |l| c[l - 1] * h.powi(2 * l as i32 - 1),
        c.len().min(space.basis.degree),
        quad_order,
    )
}

/// Skeleton stabilization: normal derivatives along the component plus face jumps in the band.
pub fn assemble_skeleton_stabilization(
    space: &FeSpace,
    segments: &[SkeletonSegment],
    c: &[f64],
    quad_order: usize,
) -> Triplets {
    let h = space.h;
    let weight = |l: usize| c[l - 1] * h.powi(2 * l as i32);
    let max_order = c.len().min(space.basis.degree);
    let mut out = assemble_face_jumps(space, &space.ghost_faces, weight, max_order, quad_order);
    let n = space.basis.len();
    let mut local = vec![0.0; n * n];
    for seg in segments {
        local.iter_mut().for_each(|v| *v = 0.0);
        let rule = segment_rule(seg.a, seg.b, quad_order);
        for l in 1..=max_order {
            let wl = weight(l);
            if wl == 0.0 {
                continue;
            }
            for (&x, &w) in rule.points.iter().zip(&rule.weights) {
                let d = space.basis_directional(seg.cell, x, seg.normal, l);
                for r in 0..n {
                    for cc in 0..n {
                        local[r * n + cc] += w * wl * d[r] * d[cc];
                    }
                }
            }
        }
        let dofs = &space.cells[seg.cell].dofs;
        scatter(&mut out, dofs, dofs, &local);
    }
    out
}

/// Nitsche terms of one subdomain.
#[derive(Debug, Default)]
pub struct NitscheBlocks {
    /// Bulk-bulk entries in local bulk numbering.
    pub aii: Triplets,
    /// Rows in global skeleton numbering, columns in local bulk numbering.
    pub a0i: Triplets,
    /// Global skeleton numbering.
    pub a00: Triplets,
}

/// -(n.a grad v_i, [w]) - ([v], n.a grad w_i) + (beta a / h [v], [w]) on the subdomain boundary,
/// with [v] = v_i - v_0 and v_0 = 0 on the outer boundary.
pub fn assemble_nitsche(
    disc: &Discretization,
    i: usize,
    params: &MethodParams,
    skeleton_offsets: &[usize],
) -> NitscheBlocks {
    let space = &disc.bulk_spaces[i];
    let a = disc.partition.subdomains[i].coefficient;
    let gamma = params.beta * a / disc.h(i);
    let n = space.basis.len();
    let mut out = NitscheBlocks::default();
    let mut kii = vec![0.0; n * n];
    for seg in &disc.boundary[i] {
        let BoundarySegment {
            a: pa,
            b: pb,
            normal,
            bulk_cell,
            skeleton,
        } = *seg;
        let rule = segment_rule(pa, pb, params.segment_order);
        kii.iter_mut().for_each(|v| *v = 0.0);
        let skel = skeleton.map(|(j, cell)| (&disc.skeleton_spaces[j], cell, skeleton_offsets[j]));
        let m = skel.map_or(0, |(s, _, _)| s.basis.len());
        let mut k0i = vec![0.0; m * n];
        let mut k00 = vec![0.0; m * m];
        for (&x, &w) in rule.points.iter().zip(&rule.weights) {
            let phi = space.basis_values(bulk_cell, x);
            let dn: Vec<f64> = space
                .basis_gradients(bulk_cell, x)
                .iter()
                .map(|g| a * g.dot(normal))
                .collect();
            for r in 0..n {
                for c in 0..n {
                    kii[r * n + c] += w * (-dn[c] * phi[r] - phi[c] * dn[r] + gamma * phi[c] * phi[r]);
                }
            }
            if let Some((sspace, scell, _)) = skel {
                let psi = sspace.basis_values(scell, x);
                for r in 0..m {
                    for c in 0..n {
                        k0i[r * n + c] += w * (dn[c] * psi[r] - gamma * phi[c] * psi[r]);
                    }
                    for c in 0..m {
                        k00[r * m + c] += w * gamma * psi[c] * psi[r];
                    }
                }
            }
        }
        let bulk_dofs = &space.cells[bulk_cell].dofs;
        scatter(&mut out.aii, bulk_dofs, bulk_dofs, &kii);
        if let Some((sspace, scell, off)) = skel {
            let sdofs: Vec<usize> = sspace.cells[scell].dofs.iter().map(|d| d + off).collect();
            scatter(&mut out.a0i, &sdofs, bulk_dofs, &k0i);
            scatter(&mut out.a00, &sdofs, &sdofs, &k00);
        }
    }
    out
}

/// (f, w) over the subdomain for every bulk basis function.
pub fn assemble_load(space: &FeSpace, mesh: &ActiveMesh, f: impl Fn(Point) -> f64, order: usize) -> Vec<f64> {
    let mut load = vec![0.0; space.n_dofs];
    for (k, cell) in space.cells.iter().enumerate() {
        let rule = mesh.cell_quadrature(k, order);
        for (&x, &w) in rule.points.iter().zip(&rule.weights) {
            let fx = f(x);
            if fx == 0.0 {
                continue;
            }
            let phi = space.basis_values(k, x);
            for (&d, p) in cell.dofs.iter().zip(&phi) {
                load[d] += w * fx * p;
            }
        }
    }
    load
}

/// Offsets of each space in the global unknown vector: skeleton components first, then subdomains.
#[derive(Debug, Clone, PartialEq)]
pub struct DofLayout {
    pub skeleton_offsets: Vec<usize>,
    pub skeleton_sizes: Vec<usize>,
    pub bulk_offsets: Vec<usize>,
    pub bulk_sizes: Vec<usize>,
    pub n_skeleton: usize,
    pub n_total: usize,
}

impl DofLayout {
    pub fn new(disc: &Discretization) -> Self {
        let skeleton_sizes: Vec<usize> = disc.skeleton_spaces.iter().map(|s| s.n_dofs).collect();
        let bulk_sizes: Vec<usize> = disc.bulk_spaces.iter().map(|s| s.n_dofs).collect();
        let mut acc = 0;
        let skeleton_offsets = skeleton_sizes
            .iter()
            .map(|&s| {
                acc += s;
                acc - s
            })
            .collect();
        let n_skeleton = acc;
        let bulk_offsets = bulk_sizes
            .iter()
            .map(|&s| {
                acc += s;
                acc - s
            })
            .collect();
        Self {
            skeleton_offsets,
            skeleton_sizes,
            bulk_offsets,
            bulk_sizes,
            n_skeleton,
            n_total: acc,
        }
    }

    pub fn skeleton<'a>(&self, u: &'a [f64], j: usize) -> &'a [f64] {
        let o = self.skeleton_offsets[j];
        &u[o..o + self.skeleton_sizes[j]]
    }

    pub fn bulk<'a>(&self, u: &'a [f64], i: usize) -> &'a [f64] {
        let o = self.bulk_offsets[i];
        &u[o..o + self.bulk_sizes[i]]
    }
}

/// The hybridized system in blocks.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub layout: DofLayout,
    /// Skeleton-skeleton block over all components.
    pub a00: SparseMatrix,
    /// Skeleton-bulk blocks, `n_skeleton x n_i`.
    pub a0i: Vec<SparseMatrix>,
    /// Bulk-bulk block of each subdomain.
    pub aii: Vec<SparseMatrix>,
    /// Skeleton load; zero for this problem class.
    pub l0: Vec<f64>,
    pub li: Vec<Vec<f64>>,
}

impl BlockSystem {
    pub fn assemble(disc: &Discretization, params: &MethodParams, rhs: Rhs<'_>) -> Result<Self> {
        let layout = DofLayout::new(disc);
        let ns = layout.n_skeleton;
        let parts: Vec<(Triplets, Triplets, Triplets, Vec<f64>)> = (0..disc.num_subdomains())
            .into_par_iter()
            .map(|i| {
                let space = &disc.bulk_spaces[i];
                let mesh = &disc.bulk_meshes[i];
                let a = disc.partition.subdomains[i].coefficient;
                let mut aii = assemble_bulk_stiffness(space, mesh, a, params.bulk_order);
                aii.extend(assemble_ghost_penalty_bulk(space, &params.c_bulk, params.segment_order));
                let nit = assemble_nitsche(disc, i, params, &layout.skeleton_offsets);
                aii.extend(nit.aii);
                let load = assemble_load(space, mesh, |x| rhs(i, x), params.bulk_order);
                (aii, nit.a0i, nit.a00, load)
            })
            .collect();
        let stab: Vec<Triplets> = disc
            .skeleton_spaces
            .par_iter()
            .zip(&disc.skeleton_segments)
            .map(|(space, segs)| {
                assemble_skeleton_stabilization(space, segs, &params.c_skel, params.segment_order)
            })
            .collect();

        let mut t00: Triplets = Vec::new();
        for (j, t) in stab.into_iter().enumerate() {
            t00.extend(offset(t, layout.skeleton_offsets[j], layout.skeleton_offsets[j]));
        }
        let mut a0i = Vec::new();
        let mut aii = Vec::new();
        let mut li = Vec::new();
        for (i, (tii, t0i, t00_i, load)) in parts.into_iter().enumerate() {
            t00.extend(t00_i);
            let ni = layout.bulk_sizes[i];
            aii.push(sparse(ni, ni, &tii)?);
            a0i.push(sparse(ns, ni, &t0i)?);
            li.push(load);
        }
        Ok(Self {
            a00: sparse(ns, ns, &t00)?,
            a0i,
            aii,
            l0: vec![0.0; ns],
            li,
            layout,
        })
    }

    pub fn n_skeleton(&self) -> usize {
        self.layout.n_skeleton
    }

    pub fn num_subdomains(&self) -> usize {
        self.aii.len()
    }

    /// The global matrix with skeleton unknowns first.
    pub fn full_matrix(&self) -> Result<SparseMatrix> {
        let n = self.layout.n_total;
        let mut t: Triplets = self.a00.triplet_iter().map(|e| Triplet::new(e.row, e.col, *e.val)).collect();
        for i in 0..self.num_subdomains() {
            let o = self.layout.bulk_offsets[i];
            for e in self.aii[i].triplet_iter() {
                t.push(Triplet::new(e.row + o, e.col + o, *e.val));
            }
            for e in self.a0i[i].triplet_iter() {
                t.push(Triplet::new(e.row, e.col + o, *e.val));
                t.push(Triplet::new(e.col + o, e.row, *e.val));
            }
        }
        sparse(n, n, &t)
    }

    pub fn full_load(&self) -> Vec<f64> {
        let mut l = self.l0.clone();
        for li in &self.li {
            l.extend_from_slice(li);
        }
        l
    }
}

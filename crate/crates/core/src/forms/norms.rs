//! Energy and L2 norms of discrete fields and their errors.

use super::assembly::DofLayout;
use super::discretization::Discretization;
use super::params::MethodParams;
use crate::geometry::quadrature::segment_rule;
use crate::geometry::Point;
use rayon::prelude::*;

/// Piecewise exact solution: one field per subdomain and one per skeleton component.
pub trait ExactSolution: Sync {
    fn bulk(&self, i: usize, x: Point) -> f64;
    fn bulk_gradient(&self, i: usize, x: Point) -> Point;
    fn skeleton(&self, j: usize, x: Point) -> f64;
}

/// The zero field; errors against it are norms of the discrete field.
pub struct Zero;

impl ExactSolution for Zero {
    fn bulk(&self, _: usize, _: Point) -> f64 {
        0.0
    }
    fn bulk_gradient(&self, _: usize, _: Point) -> Point {
        Point::default()
    }
    fn skeleton(&self, _: usize, _: Point) -> f64 {
        0.0
    }
}

/// Extra quadrature degrees for non-polynomial exact solutions.
const EXTRA_ORDER: usize = 4;

/// Energy norm of u - u_h:
/// sum_i |grad e_i|^2_{a_i, Omega_i} + h |grad e_i|^2_{a_i, dOmega_i} + h^-1 |e_i - e_0|^2_{a_i, dOmega_i},
/// with e_0 = 0 on the outer boundary.
pub fn energy_error(
    disc: &Discretization,
    layout: &DofLayout,
    uh: &[f64],
    exact: &dyn ExactSolution,
    params: &MethodParams,
) -> f64 {
    let bulk_order = params.bulk_order + EXTRA_ORDER;
    let seg_order = params.segment_order + EXTRA_ORDER;
    let total: f64 = (0..disc.num_subdomains())
        .into_par_iter()
        .map(|i| {
            let space = &disc.bulk_spaces[i];
            let mesh = &disc.bulk_meshes[i];
            let a = disc.partition.subdomains[i].coefficient;
            let h = disc.h(i);
            let ui = layout.bulk(uh, i);
            let mut s = 0.0;
            for k in 0..space.num_cells() {
                let rule = mesh.cell_quadrature(k, bulk_order);
                s += rule.integrate(|x| {
                    let g = exact.bulk_gradient(i, x) - space.gradient(ui, k, x);
                    a * g.dot(g)
                });
            }
            for seg in &disc.boundary[i] {
                let rule = segment_rule(seg.a, seg.b, seg_order);
                s += rule.integrate(|x| {
                    let g = exact.bulk_gradient(i, x) - space.gradient(ui, seg.bulk_cell, x);
                    let ei = exact.bulk(i, x) - space.value(ui, seg.bulk_cell, x);
                    let e0 = match seg.skeleton {
                        Some((j, cell)) => {
                            exact.skeleton(j, x)
                                - disc.skeleton_spaces[j].value(layout.skeleton(uh, j), cell, x)
                        }
                        None => 0.0,
                    };
                    a * (h * g.dot(g) + (ei - e0).powi(2) / h)
                });
            }
            s
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    total.sqrt()
}

/// Energy norm of a discrete field.
pub fn energy_norm(disc: &Discretization, layout: &DofLayout, uh: &[f64], params: &MethodParams) -> f64 {
    energy_error(disc, layout, uh, &Zero, params)
}

#[derive(Debug, Clone, PartialEq)]
pub struct L2Errors {
    /// Error on each subdomain.
    pub bulk: Vec<f64>,
    /// Root of the summed squares over subdomains.
    pub total: f64,
    /// Error over the whole skeleton.
    pub skeleton: f64,
}

pub fn l2_errors(
    disc: &Discretization,
    layout: &DofLayout,
    uh: &[f64],
    exact: &dyn ExactSolution,
    params: &MethodParams,
) -> L2Errors {
    let bulk_order = params.bulk_order + EXTRA_ORDER;
    let seg_order = params.segment_order + EXTRA_ORDER;
    let bulk: Vec<f64> = (0..disc.num_subdomains())
        .into_par_iter()
        .map(|i| {
            let space = &disc.bulk_spaces[i];
            let ui = layout.bulk(uh, i);
            (0..space.num_cells())
                .map(|k| {
                    disc.bulk_meshes[i]
                        .cell_quadrature(k, bulk_order)
                        .integrate(|x| (exact.bulk(i, x) - space.value(ui, k, x)).powi(2))
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let skel2: f64 = disc
        .skeleton_segments
        .iter()
        .enumerate()
        .map(|(j, segs)| {
            let space = &disc.skeleton_spaces[j];
            let u0 = layout.skeleton(uh, j);
            segs.iter()
                .map(|s| {
                    segment_rule(s.a, s.b, seg_order)
                        .integrate(|x| (exact.skeleton(j, x) - space.value(u0, s.cell, x)).powi(2))
                })
                .sum::<f64>()
        })
        .sum();
    L2Errors {
        total: bulk.iter().map(|e| e * e).sum::<f64>().sqrt(),
        bulk,
        skeleton: skel2.sqrt(),
    }
}

/// Nodal interpolant of an exact solution in the global layout.
pub fn interpolate(disc: &Discretization, layout: &DofLayout, exact: &dyn ExactSolution) -> Vec<f64> {
    let mut u = vec![0.0; layout.n_total];
    for (j, space) in disc.skeleton_spaces.iter().enumerate() {
        let o = layout.skeleton_offsets[j];
        for (k, &p) in space.dof_points.iter().enumerate() {
            u[o + k] = exact.skeleton(j, p);
        }
    }
    for (i, space) in disc.bulk_spaces.iter().enumerate() {
        let o = layout.bulk_offsets[i];
        for (k, &p) in space.dof_points.iter().enumerate() {
            u[o + k] = exact.bulk(i, p);
        }
    }
    u
}

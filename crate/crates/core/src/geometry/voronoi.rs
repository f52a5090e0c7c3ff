use super::point::Point;
use super::polygon::{clip_halfplane, Polygon};

/// Voronoi cells of `seeds` clipped to a convex `domain`.
///
/// Cells are built by half-plane clipping and their vertices are snapped to a
/// common set so that neighbouring cells share bit-identical edge endpoints.
pub fn voronoi_cells(domain: &Polygon, seeds: &[Point]) -> Vec<Polygon> {
    let domain = domain.clone().into_ccw();
    let extent = domain.bbox().diameter();
    let mut cells: Vec<Vec<Point>> = seeds
        .iter()
        .enumerate()
        .map(|(i, &si)| {
            let mut cell = domain.vertices.clone();
            for (j, &sj) in seeds.iter().enumerate() {
                if i == j || cell.len() < 3 {
                    continue;
                }
                let n = sj - si;
                let m = si.lerp(sj, 0.5);
                // keep { x : (x - m) . n <= 0 }, the left side of m -> m + rot90(n)
                cell = clip_halfplane(&cell, m, m + Point::new(-n.y, n.x));
            }
            cell
        })
        .collect();

    snap_vertices(&mut cells, 1e-9 * extent);
    cells.into_iter().map(Polygon::new).collect()
}

fn snap_vertices(cells: &mut [Vec<Point>], tol: f64) {
    let mut reps: Vec<Point> = Vec::new();
    for cell in cells.iter_mut() {
        for p in cell.iter_mut() {
            match reps.iter().find(|r| r.approx_eq(*p, tol)) {
                Some(r) => *p = *r,
                None => reps.push(*p),
            }
        }
        cell.dedup();
        while cell.len() > 1 && cell.first() == cell.last() {
            cell.pop();
        }
    }
}

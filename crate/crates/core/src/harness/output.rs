//! CSV and JSON writers for reports, field rasters and geometry dumps.

use super::study::{Solved, StudyReport};
use crate::error::{Error, Result};
use crate::forms::Discretization;
use crate::geometry::{ActiveMesh, BackgroundGrid, PolygonalPartition, Point, Region};
use std::path::Path;

pub const REPORT_HEADER: [&str; 12] = [
    "h",
    "p",
    "dofs_bulk",
    "dofs_skeleton",
    "energy_error",
    "l2_error",
    "l2_error_skeleton",
    "kappa",
    "lambda_max",
    "lambda_min",
    "cg_iters",
    "seconds",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_report_csv(path: &Path, report: &StudyReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(REPORT_HEADER).map_err(csv_err)?;
    for r in &report.rows {
        w.write_record([
            r.h.to_string(),
            r.p.to_string(),
            r.dofs_bulk.to_string(),
            r.dofs_skeleton.to_string(),
            opt(r.energy_error),
            opt(r.l2_error),
            opt(r.l2_error_skeleton),
            opt(r.kappa),
            opt(r.lambda_max),
            opt(r.lambda_min),
            opt(r.cg_iters),
            r.seconds.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `report.csv` and `report.json` into `dir`.
pub fn write_report(dir: &Path, report: &StudyReport) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_report_csv(&dir.join("report.csv"), report)?;
    let json = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.into()))?;
    std::fs::write(dir.join("report.json"), json + "\n")?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub subdomain: usize,
}

/// Discrete bulk field sampled at the centres of a raster with `per_unit` samples per unit length.
pub fn field_raster(solved: &Solved, per_unit: usize) -> Vec<FieldSample> {
    let disc = &solved.disc;
    let layout = &solved.system.layout;
    let bb = disc.partition.domain.bbox();
    let d = 1.0 / per_unit as f64;
    let nx = ((bb.max.x - bb.min.x) / d).round().max(1.0) as usize;
    let ny = ((bb.max.y - bb.min.y) / d).round().max(1.0) as usize;
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let x = Point::new(bb.min.x + (i as f64 + 0.5) * d, bb.min.y + (j as f64 + 0.5) * d);
            let Some(s) = disc.partition.locate(x) else {
                continue;
            };
            if let Some(value) = bulk_value(disc, layout.bulk(&solved.solution.u, s), s, x) {
                out.push(FieldSample {
                    x: x.x,
                    y: x.y,
                    value,
                    subdomain: s,
                });
            }
        }
    }
    out
}

fn bulk_value(disc: &Discretization, coeffs: &[f64], s: usize, x: Point) -> Option<f64> {
    let space = &disc.bulk_spaces[s];
    let cell = disc
        .grid
        .cells_containing(x)
        .into_iter()
        .find_map(|c| space.cell_of_grid(c))?;
    Some(space.value(coeffs, cell, x))
}

pub fn write_field(path: &Path, samples: &[FieldSample]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["x", "y", "value", "subdomain_id"]).map_err(csv_err)?;
    for s in samples {
        w.write_record([s.x.to_string(), s.y.to_string(), s.value.to_string(), s.subdomain.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Active meshes of every subdomain and skeleton component.
pub fn active_meshes(part: &PolygonalPartition, grid: &BackgroundGrid) -> Result<Vec<ActiveMesh>> {
    let regions = (0..part.num_subdomains())
        .map(Region::Bulk)
        .chain((0..part.num_skeleton_components()).map(Region::Skeleton));
    regions
        .map(|r| ActiveMesh::build(grid, part, r).map_err(Error::from))
        .collect()
}

/// Writes `geometry.csv` (cell_id, region_id, status) and `ghost_faces.csv` into `dir`.
pub fn write_geometry(dir: &Path, meshes: &[ActiveMesh]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("geometry.csv")).map_err(csv_err)?;
    w.write_record(["cell_id", "region_id", "status"]).map_err(csv_err)?;
    for m in meshes {
        for c in &m.cells {
            w.write_record([c.id.to_string(), m.region.to_string(), c.status.to_string()])
                .map_err(csv_err)?;
        }
    }
    w.flush()?;
    let mut g = csv::Writer::from_path(dir.join("ghost_faces.csv")).map_err(csv_err)?;
    g.write_record(["region_id", "cell_a", "cell_b", "x0", "y0", "x1", "y1"])
        .map_err(csv_err)?;
    for m in meshes {
        for f in &m.ghost_faces {
            let (a, b) = f.cells;
            g.write_record([
                m.region.to_string(),
                m.cells[a].id.to_string(),
                m.cells[b].id.to_string(),
                f.face.a.x.to_string(),
                f.face.a.y.to_string(),
                f.face.b.x.to_string(),
                f.face.b.y.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    g.flush()?;
    Ok(())
}

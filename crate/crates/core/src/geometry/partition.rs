use super::point::Point;
use super::polygon::{clip_convex, Polygon};
use super::skeleton::{extract_skeleton, BoundaryKind, BoundaryPiece, SkeletonComponent};
use super::voronoi::voronoi_cells;
use crate::error::GeometryError;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Partition presets and explicit polygon lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PartitionSpec {
    /// Unit square split by the vertical line `x = interface_x`.
    TwoHalves {
        #[serde(default = "default_interface_x")]
        interface_x: f64,
    },
    /// Unit square split into three subdomains by polyline interfaces meeting at a triple point.
    ThreeSubdomains,
    /// Voronoi diagram of `seeds` uniformly distributed points, clipped to the unit square.
    Voronoi {
        seeds: usize,
        #[serde(default)]
        rng_seed: Option<u64>,
    },
    /// `n x n` array of equal squares.
    Checkerboard { n: usize },
    /// The unit square as a single subdomain.
    Single,
    Explicit {
        polygons: Vec<Vec<[f64; 2]>>,
        #[serde(default)]
        domain: Option<Vec<[f64; 2]>>,
    },
}

fn default_interface_x() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Subdomain {
    pub polygon: Polygon,
    /// Constant conductivity on the subdomain.
    pub coefficient: f64,
    /// Triangulation of the polygon used for cut-cell clipping.
    #[serde(skip)]
    pub triangles: Vec<[Point; 3]>,
}

impl Subdomain {
    pub fn diameter(&self) -> f64 {
        self.polygon.diameter()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolygonalPartition {
    pub domain: Polygon,
    pub subdomains: Vec<Subdomain>,
    pub skeleton: Vec<SkeletonComponent>,
    /// Boundary of each subdomain, split into outer and skeleton pieces.
    pub boundaries: Vec<Vec<BoundaryPiece>>,
    /// Absolute geometric tolerance.
    pub tol: f64,
}

/// Relative geometric tolerance, scaled by the domain extent.
pub const GEOMETRIC_TOL: f64 = 1e-12;

impl PolygonalPartition {
    /// Validates a tiling of `domain` by `polygons` and extracts its skeleton.
    pub fn from_polygons(domain: Polygon, polygons: Vec<Polygon>) -> Result<Self, GeometryError> {
        let domain = domain.into_ccw();
        let extent = domain.bbox().diameter();
        let tol = GEOMETRIC_TOL * extent;
        domain.check_simple(tol)?;
        let polygons: Vec<Polygon> = polygons.into_iter().map(Polygon::into_ccw).collect();
        let mut subdomains = Vec::with_capacity(polygons.len());
        for (i, poly) in polygons.iter().enumerate() {
            poly.check_simple(tol).map_err(|e| {
                GeometryError::NotSimple(format!("subdomain {i}: {e}"))
            })?;
            let triangles = poly.triangulate()?;
            subdomains.push(Subdomain {
                polygon: poly.clone(),
                coefficient: 1.0,
                triangles,
            });
        }
        if subdomains.is_empty() {
            return Err(GeometryError::InvalidPartition("no subdomains".into()));
        }

        let domain_area = domain.area();
        let covered: f64 = subdomains.iter().map(|s| s.polygon.area()).sum();
        if (covered - domain_area).abs() > GEOMETRIC_TOL * domain_area {
            return Err(GeometryError::Gap {
                covered,
                domain: domain_area,
            });
        }
        check_overlaps(&subdomains, domain_area)?;

        let (skeleton, boundaries) = extract_skeleton(&domain, &polygons, tol)?;
        let partition = Self {
            domain,
            subdomains,
            skeleton,
            boundaries,
            tol,
        };
        partition.check_boundary_lengths()?;
        Ok(partition)
    }

    pub fn build(spec: &PartitionSpec) -> Result<Self, GeometryError> {
        let square = Polygon::unit_square();
        match spec {
            PartitionSpec::TwoHalves { interface_x } => {
                let x = *interface_x;
                if !(x > 0.0 && x < 1.0) {
                    return Err(GeometryError::InvalidPartition(format!(
                        "interface_x = {x} is not inside (0, 1)"
                    )));
                }
                Self::from_polygons(
                    square,
                    vec![
                        Polygon::rectangle(Point::new(0.0, 0.0), Point::new(x, 1.0)),
                        Polygon::rectangle(Point::new(x, 0.0), Point::new(1.0, 1.0)),
                    ],
                )
            }
            PartitionSpec::ThreeSubdomains => {
                let mut p = Self::from_polygons(square, three_subdomain_polygons())?;
                p.set_coefficients(&[1.0, 2.0, 3.0])?;
                Ok(p)
            }
            PartitionSpec::Voronoi { seeds, rng_seed } => {
                if *seeds == 0 {
                    return Err(GeometryError::InvalidPartition("voronoi needs seeds".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(rng_seed.unwrap_or(0));
                let points: Vec<Point> = (0..*seeds)
                    .map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>()))
                    .collect();
                let coefficients: Vec<f64> =
                    (0..*seeds).map(|_| 0.01 + rng.random::<f64>()).collect();
                let cells = voronoi_cells(&square, &points);
                let mut p = Self::from_polygons(square, cells)?;
                p.set_coefficients(&coefficients)?;
                Ok(p)
            }
            PartitionSpec::Checkerboard { n } => {
                let n = *n;
                if n == 0 {
                    return Err(GeometryError::InvalidPartition("checkerboard needs n > 0".into()));
                }
                let h = 1.0 / n as f64;
                let mut polys = Vec::with_capacity(n * n);
                for j in 0..n {
                    for i in 0..n {
                        polys.push(Polygon::rectangle(
                            Point::new(i as f64 * h, j as f64 * h),
                            Point::new((i + 1) as f64 * h, (j + 1) as f64 * h),
                        ));
                    }
                }
                Self::from_polygons(square, polys)
            }
            PartitionSpec::Single => Self::from_polygons(square.clone(), vec![square]),
            PartitionSpec::Explicit { polygons, domain } => {
                let to_poly = |v: &Vec<[f64; 2]>| Polygon::new(v.iter().map(|&p| p.into()).collect());
                let domain = domain.as_ref().map(to_poly).unwrap_or(square);
                Self::from_polygons(domain, polygons.iter().map(to_poly).collect())
            }
        }
    }

    pub fn set_coefficients(&mut self, coefficients: &[f64]) -> Result<(), GeometryError> {
        if coefficients.len() != self.subdomains.len() {
            return Err(GeometryError::InvalidPartition(format!(
                "{} coefficients given for {} subdomains",
                coefficients.len(),
                self.subdomains.len()
            )));
        }
        if let Some(bad) = coefficients.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
            return Err(GeometryError::InvalidPartition(format!(
                "coefficient {bad} is not positive"
            )));
        }
        for (s, &a) in self.subdomains.iter_mut().zip(coefficients) {
            s.coefficient = a;
        }
        Ok(())
    }

    pub fn num_subdomains(&self) -> usize {
        self.subdomains.len()
    }

    pub fn num_skeleton_components(&self) -> usize {
        self.skeleton.len()
    }

    pub fn outer_boundary_edges(&self, subdomain: usize) -> impl Iterator<Item = &BoundaryPiece> {
        self.boundaries[subdomain]
            .iter()
            .filter(|p| p.kind == BoundaryKind::Outer)
    }

    /// Index of the subdomain containing `p`, if any.
    pub fn locate(&self, p: Point) -> Option<usize> {
        self.subdomains.iter().position(|s| s.polygon.contains(p))
    }

    pub fn min_subdomain_diameter(&self) -> f64 {
        self.subdomains
            .iter()
            .map(Subdomain::diameter)
            .fold(f64::INFINITY, f64::min)
    }

    fn check_boundary_lengths(&self) -> Result<(), GeometryError> {
        let perimeters: f64 = self.subdomains.iter().map(|s| s.polygon.perimeter()).sum();
        let skeleton: f64 = self.skeleton.iter().map(SkeletonComponent::length).sum();
        let outer: f64 = (0..self.subdomains.len())
            .flat_map(|i| self.outer_boundary_edges(i))
            .map(BoundaryPiece::length)
            .sum();
        let mismatch = (perimeters - 2.0 * skeleton - outer).abs();
        if mismatch > GEOMETRIC_TOL * perimeters.max(1.0) * 10.0 {
            return Err(GeometryError::InvalidPartition(format!(
                "skeleton and outer edges do not cover the subdomain boundaries (mismatch {mismatch:e})"
            )));
        }
        Ok(())
    }
}

fn check_overlaps(subdomains: &[Subdomain], domain_area: f64) -> Result<(), GeometryError> {
    let boxes: Vec<_> = subdomains.iter().map(|s| s.polygon.bbox()).collect();
    for i in 0..subdomains.len() {
        for j in (i + 1)..subdomains.len() {
            if !boxes[i].overlaps(&boxes[j], 0.0) {
                continue;
            }
            let mut shared = 0.0;
            for ti in &subdomains[i].triangles {
                for tj in &subdomains[j].triangles {
                    let clipped = clip_convex(ti, tj);
                    if clipped.len() >= 3 {
                        shared += super::polygon::signed_area(&clipped);
                    }
                }
            }
            if shared > GEOMETRIC_TOL * domain_area * 10.0 {
                return Err(GeometryError::Overlap(i, j, shared));
            }
        }
    }
    Ok(())
}

/// Polyline approximation of a three-subdomain layout: a wavy interface from the
/// bottom to the top edge, and a second interface from its midpoint to the right edge.
fn three_subdomain_polygons() -> Vec<Polygon> {
    let p = |x: f64, y: f64| Point::new(x, y);
    let triple = p(0.38, 0.5);
    vec![
        Polygon::new(vec![
            p(0.0, 0.0),
            p(0.30, 0.0),
            p(0.42, 0.25),
            triple,
            p(0.33, 0.75),
            p(0.45, 1.0),
            p(0.0, 1.0),
        ]),
        Polygon::new(vec![
            p(0.30, 0.0),
            p(1.0, 0.0),
            p(1.0, 0.52),
            p(0.8, 0.6),
            p(0.6, 0.42),
            triple,
            p(0.42, 0.25),
        ]),
        Polygon::new(vec![
            triple,
            p(0.6, 0.42),
            p(0.8, 0.6),
            p(1.0, 0.52),
            p(1.0, 1.0),
            p(0.45, 1.0),
            p(0.33, 0.75),
        ]),
    ]
}

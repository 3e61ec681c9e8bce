//! Conforming 2D polygonal meshes: topology, generators, geometric metrics and
//! quality measures.

mod generate;
mod identities;
mod metrics;
mod quality;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::geom::Point2;
use crate::{Error, Result};

pub use generate::{build_cartesian, perturb, stretch, triangulate, warp, Axis, TriangulationPattern};
pub use identities::{validate_identities, CellResiduals, IdentityReport};
pub use metrics::{compute_metrics, CellMetrics, FaceMetrics, FaceSide, FaceView, MeshMetrics};
pub use quality::{quality_report, QualityReport};

/// A straight face between two vertices.
///
/// `vertices` are ordered as the owner cell traverses them (counterclockwise), so the
/// owner-outward normal is the edge vector rotated clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub vertices: [usize; 2],
    pub owner: usize,
    /// `None` on the domain boundary.
    pub neighbor: Option<usize>,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.neighbor.is_none()
    }
}

/// Vertices, counterclockwise cell cycles and the derived face connectivity.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point2>,
    cells: Vec<Vec<usize>>,
    faces: Vec<Face>,
    /// `cell_faces[c][k]` is the face on the edge from vertex `k` to `k + 1` of cell `c`.
    cell_faces: Vec<Vec<usize>>,
}

impl Mesh {
    /// Builds the face list and validates the tessellation.
    ///
    /// Cells must be simple counterclockwise polygons with positive area; every
    /// edge may be shared by at most two cells, traversed in opposite directions.
    pub fn new(vertices: Vec<Point2>, cells: Vec<Vec<usize>>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidMesh { cell: None, reason: "mesh has no cells".into() });
        }
        if let Some(v) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidMesh { cell: None, reason: format!("vertex {v} is not finite") });
        }
        for (c, cycle) in cells.iter().enumerate() {
            validate_cell(&vertices, c, cycle)?;
        }

        let mut faces: Vec<Face> = Vec::new();
        let mut cell_faces = Vec::with_capacity(cells.len());
        let mut by_edge: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (c, cycle) in cells.iter().enumerate() {
            let mut local = Vec::with_capacity(cycle.len());
            for k in 0..cycle.len() {
                let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
                let key = (a.min(b), a.max(b));
                match by_edge.get(&key) {
                    None => {
                        by_edge.insert(key, faces.len());
                        local.push(faces.len());
                        faces.push(Face { vertices: [a, b], owner: c, neighbor: None });
                    }
                    Some(&f) => {
                        let face = &mut faces[f];
                        if face.neighbor.is_some() {
                            return Err(Error::InvalidMesh {
                                cell: Some(c),
                                reason: format!("edge ({a}, {b}) is shared by more than two cells"),
                            });
                        }
                        if face.vertices != [b, a] {
                            return Err(Error::InvalidMesh {
                                cell: Some(c),
                                reason: format!(
                                    "edge ({a}, {b}) is traversed in the same direction as cell {}",
                                    face.owner
                                ),
                            });
                        }
                        if face.owner == c {
                            return Err(Error::InvalidMesh {
                                cell: Some(c),
                                reason: format!("edge ({a}, {b}) appears twice in the cell"),
                            });
                        }
                        face.neighbor = Some(c);
                        local.push(f);
                    }
                }
            }
            cell_faces.push(local);
        }

        Ok(Self { vertices, cells, faces, cell_faces })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn cell_faces(&self, cell: usize) -> &[usize] {
        &self.cell_faces[cell]
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_boundary_faces(&self) -> usize {
        self.faces.iter().filter(|f| f.is_boundary()).count()
    }

    /// Vertex coordinates of a cell, in cycle order.
    pub fn cell_polygon(&self, cell: usize) -> impl ExactSizeIterator<Item = Point2> + '_ {
        self.cells[cell].iter().map(move |&v| self.vertices[v])
    }

    /// True for every vertex touched by a boundary face.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut on = alloc::vec![false; self.vertices.len()];
        for f in self.faces.iter().filter(|f| f.is_boundary()) {
            on[f.vertices[0]] = true;
            on[f.vertices[1]] = true;
        }
        on
    }

    /// Cells incident to each vertex.
    pub fn vertex_cells(&self) -> Vec<Vec<usize>> {
        let mut adj = alloc::vec![Vec::new(); self.vertices.len()];
        for (c, cycle) in self.cells.iter().enumerate() {
            for &v in cycle {
                adj[v].push(c);
            }
        }
        adj
    }

    /// Total area of all cells.
    pub fn total_area(&self) -> f64 {
        (0..self.n_cells()).map(|c| signed_area(self.cell_polygon(c))).sum()
    }

    /// Same topology with new vertex coordinates. Re-runs validation.
    pub fn with_vertices(&self, vertices: Vec<Point2>) -> Result<Mesh> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} vertices, got {}",
                self.vertices.len(),
                vertices.len()
            )));
        }
        Mesh::new(vertices, self.cells.clone())
    }
}

fn validate_cell(vertices: &[Point2], c: usize, cycle: &[usize]) -> Result<()> {
    if cycle.len() < 3 {
        return Err(Error::InvalidMesh { cell: Some(c), reason: format!("{} vertices, need at least 3", cycle.len()) });
    }
    if let Some(&v) = cycle.iter().find(|&&v| v >= vertices.len()) {
        return Err(Error::InvalidMesh {
            cell: Some(c),
            reason: format!("vertex index {v} out of range (have {})", vertices.len()),
        });
    }
    for (k, &v) in cycle.iter().enumerate() {
        if cycle[k + 1..].contains(&v) {
            return Err(Error::InvalidMesh { cell: Some(c), reason: format!("vertex {v} repeated") });
        }
    }
    let poly: Vec<Point2> = cycle.iter().map(|&v| vertices[v]).collect();
    let area = signed_area(poly.iter().copied());
    if area == 0.0 || !area.is_finite() {
        return Err(Error::DegenerateCell { cell: c, area });
    }
    if area < 0.0 {
        return Err(Error::InvalidMesh { cell: Some(c), reason: "clockwise orientation".into() });
    }
    if !is_simple(&poly) {
        return Err(Error::InvalidMesh { cell: Some(c), reason: "self-intersecting polygon".into() });
    }
    Ok(())
}

/// Shoelace area, positive for counterclockwise cycles. Coordinates are taken
/// relative to the first vertex.
pub(crate) fn signed_area<I: IntoIterator<Item = Point2>>(poly: I) -> f64 {
    let mut it = poly.into_iter();
    let Some(p0) = it.next() else { return 0.0 };
    let mut prev = match it.next() {
        Some(p) => p - p0,
        None => return 0.0,
    };
    let mut twice = 0.0;
    for p in it {
        let cur = p - p0;
        twice += prev.cross(cur);
        prev = cur;
    }
    0.5 * twice
}

/// True when no two non-adjacent edges of the closed polygon touch or cross, and
/// no two adjacent edges fold back onto each other.
pub(crate) fn is_simple(poly: &[Point2]) -> bool {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        // Adjacent edge folding back over this one.
        let c = poly[(i + 2) % n];
        if (b - a).cross(c - b) == 0.0 && (b - a).dot(c - b) < 0.0 {
            return false;
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            if segments_touch(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn segments_touch(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return true;
    }
    let on = |p: Point2, q: Point2, r: Point2, o: f64| {
        o == 0.0 && r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

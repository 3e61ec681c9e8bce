use alloc::vec::Vec;

use super::Mesh;
use crate::geom::{Point2, Vec2};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMetrics {
    /// Cell area Ω.
    pub volume: f64,
    pub centroid: Point2,
    pub perimeter: f64,
}

/// Per-face geometry, oriented owner → neighbor.
///
/// On boundary faces the far side is the owner centroid mirrored across the face
/// line, so `far_point`, `join`, `distance` and `join_unit` are defined everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceMetrics {
    pub owner: usize,
    pub neighbor: Option<usize>,
    /// Face length Δs.
    pub area: f64,
    /// Unit normal pointing out of the owner.
    pub normal: Vec2,
    /// `normal * area`.
    pub area_vector: Vec2,
    /// Edge midpoint.
    pub centroid: Point2,
    pub far_point: Point2,
    /// `far_point - owner centroid`.
    pub join: Vec2,
    pub distance: f64,
    /// `join / distance`.
    pub join_unit: Vec2,
}

impl FaceMetrics {
    pub fn is_boundary(&self) -> bool {
        self.neighbor.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceSide {
    Owner,
    Neighbor,
}

/// A face as seen from one of its cells: every vector points away from that cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceView {
    pub face: usize,
    pub side: FaceSide,
    /// The cell on the other side, `None` for a boundary face.
    pub far_cell: Option<usize>,
    pub area: f64,
    pub normal: Vec2,
    pub area_vector: Vec2,
    pub centroid: Point2,
    pub far_point: Point2,
    pub join: Vec2,
    pub distance: f64,
    pub join_unit: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshMetrics {
    pub cells: Vec<CellMetrics>,
    pub faces: Vec<FaceMetrics>,
    /// Faces of each cell in cycle order.
    pub cell_faces: Vec<Vec<usize>>,
    /// Boundary faces in face order.
    pub boundary_faces: Vec<usize>,
    /// Position of each face in `boundary_faces`.
    pub boundary_slot: Vec<Option<usize>>,
    pub total_volume: f64,
}

impl MeshMetrics {
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Characteristic size `(V / N)^(1/2)`.
    pub fn h(&self) -> f64 {
        libm::sqrt(self.total_volume / self.cells.len() as f64)
    }

    /// The faces of `cell`, oriented outward from it.
    pub fn views(&self, cell: usize) -> impl ExactSizeIterator<Item = FaceView> + '_ {
        self.cell_faces[cell].iter().map(move |&f| self.view(cell, f))
    }

    /// Face `face` oriented outward from `cell`, which must be its owner or neighbor.
    pub fn view(&self, cell: usize, face: usize) -> FaceView {
        let fm = &self.faces[face];
        if fm.owner == cell {
            FaceView {
                face,
                side: FaceSide::Owner,
                far_cell: fm.neighbor,
                area: fm.area,
                normal: fm.normal,
                area_vector: fm.area_vector,
                centroid: fm.centroid,
                far_point: fm.far_point,
                join: fm.join,
                distance: fm.distance,
                join_unit: fm.join_unit,
            }
        } else {
            debug_assert_eq!(fm.neighbor, Some(cell));
            FaceView {
                face,
                side: FaceSide::Neighbor,
                far_cell: Some(fm.owner),
                area: fm.area,
                normal: -fm.normal,
                area_vector: -fm.area_vector,
                centroid: fm.centroid,
                far_point: self.cells[fm.owner].centroid,
                join: -fm.join,
                distance: fm.distance,
                join_unit: -fm.join_unit,
            }
        }
    }
}

/// Areas and centroids by triangle-fan shoelace decomposition; face normals,
/// centroids and centroid joins.
pub fn compute_metrics(mesh: &Mesh) -> Result<MeshMetrics> {
    let mut cells = Vec::with_capacity(mesh.n_cells());
    for c in 0..mesh.n_cells() {
        let poly: Vec<Point2> = mesh.cell_polygon(c).collect();
        let p0 = poly[0];
        let (mut twice_area, mut cx, mut cy, mut perimeter) = (0.0, 0.0, 0.0, 0.0);
        for k in 0..poly.len() {
            let a = poly[k] - p0;
            let b = poly[(k + 1) % poly.len()] - p0;
            let w = a.cross(b);
            twice_area += w;
            cx += (a.x + b.x) * w;
            cy += (a.y + b.y) * w;
            perimeter += (b - a).norm();
        }
        let volume = 0.5 * twice_area;
        if !(volume > 0.0 && volume.is_finite()) {
            return Err(Error::DegenerateCell { cell: c, area: volume });
        }
        let centroid = Point2::new(p0.x + cx / (3.0 * twice_area), p0.y + cy / (3.0 * twice_area));
        cells.push(CellMetrics { volume, centroid, perimeter });
    }

    let mut faces = Vec::with_capacity(mesh.n_faces());
    let mut boundary_faces = Vec::new();
    let mut boundary_slot = Vec::with_capacity(mesh.n_faces());
    for (f, face) in mesh.faces().iter().enumerate() {
        let a = mesh.vertices()[face.vertices[0]];
        let b = mesh.vertices()[face.vertices[1]];
        let edge = b - a;
        let area = edge.norm();
        let normal = edge.rot_cw() * (1.0 / area);
        let centroid = a.midpoint(b);
        let xo = cells[face.owner].centroid;
        let far_point = match face.neighbor {
            Some(n) => {
                boundary_slot.push(None);
                cells[n].centroid
            }
            None => {
                boundary_slot.push(Some(boundary_faces.len()));
                boundary_faces.push(f);
                let offset = (centroid - xo).dot(normal);
                if !(offset > 0.0) {
                    return Err(Error::DegenerateFace { face: f });
                }
                xo + normal * (2.0 * offset)
            }
        };
        let join = far_point - xo;
        let distance = join.norm();
        if !(distance > 0.0) {
            return Err(Error::DegenerateFace { face: f });
        }
        faces.push(FaceMetrics {
            owner: face.owner,
            neighbor: face.neighbor,
            area,
            normal,
            area_vector: normal * area,
            centroid,
            far_point,
            join,
            distance,
            join_unit: join * (1.0 / distance),
        });
    }

    let cell_faces = (0..mesh.n_cells()).map(|c| mesh.cell_faces(c).to_vec()).collect();
    let total_volume = cells.iter().map(|c| c.volume).sum();
    Ok(MeshMetrics { cells, faces, cell_faces, boundary_faces, boundary_slot, total_volume })
}

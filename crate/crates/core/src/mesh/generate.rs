//! Test-mesh generators and coordinate transforms.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{is_simple, signed_area, Mesh};
use crate::geom::Point2;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangulationPattern {
    /// Every quad is cut along its first-to-third-vertex diagonal.
    Diagonal,
    /// Diagonals alternate between face-adjacent quads (checkerboard).
    Alternating,
}

/// `nx × ny` axis-aligned quads tiling the rectangle.
///
/// Vertex `(i, j)` has index `j * (nx + 1) + i`; cells are numbered row by row
/// starting at the lower-left corner.
pub fn build_cartesian(nx: usize, ny: usize, x_range: (f64, f64), y_range: (f64, f64)) -> Result<Mesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument(format!("cell counts must be positive, got {nx}x{ny}")));
    }
    let nonempty = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && b > a;
    if !nonempty(x_range) || !nonempty(y_range) {
        return Err(Error::InvalidArgument(format!("degenerate range {x_range:?} x {y_range:?}")));
    }
    let coord = |(a, b): (f64, f64), k: usize, n: usize| {
        if k == n {
            b
        } else {
            a + (b - a) * (k as f64 / n as f64)
        }
    };
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(Point2::new(coord(x_range, i, nx), coord(y_range, j, ny)));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    Mesh::new(vertices, cells)
}

/// Random displacement of interior vertices.
///
/// Each interior vertex moves by independent uniform offsets in x and y, each
/// bounded by `amplitude` times the shortest edge incident to the vertex in the
/// input mesh. Vertices are visited in index order. A move that would tangle an
/// incident cell is retried at half size, then dropped.
pub fn perturb(mesh: &Mesh, amplitude: f64, seed: u64) -> Result<Mesh> {
    if !(0.0..0.5).contains(&amplitude) {
        return Err(Error::InvalidArgument(format!("perturbation amplitude {amplitude} outside [0, 0.5)")));
    }
    let on_boundary = mesh.boundary_vertices();
    let vertex_cells = mesh.vertex_cells();
    let mut shortest = vec![f64::INFINITY; mesh.n_vertices()];
    for cycle in mesh.cells() {
        for k in 0..cycle.len() {
            let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
            let len = mesh.vertices()[a].distance(mesh.vertices()[b]);
            shortest[a] = shortest[a].min(len);
            shortest[b] = shortest[b].min(len);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = mesh.vertices().to_vec();
    for v in 0..coords.len() {
        if on_boundary[v] || vertex_cells[v].is_empty() {
            continue;
        }
        let bound = amplitude * shortest[v];
        let dx = bound * rng.gen_range(-1.0..=1.0);
        let dy = bound * rng.gen_range(-1.0..=1.0);
        let origin = coords[v];
        for scale in [1.0, 0.5] {
            coords[v] = Point2::new(origin.x + scale * dx, origin.y + scale * dy);
            if vertex_cells[v].iter().all(|&c| cell_is_valid(&coords, &mesh.cells()[c])) {
                break;
            }
            coords[v] = origin;
        }
    }
    mesh.with_vertices(coords)
}

fn cell_is_valid(coords: &[Point2], cycle: &[usize]) -> bool {
    let poly: Vec<Point2> = cycle.iter().map(|&v| coords[v]).collect();
    signed_area(poly.iter().copied()) > 0.0 && is_simple(&poly)
}

/// Splits every quadrilateral into two triangles.
///
/// If the preferred diagonal would leave a non-positive triangle (non-convex
/// quad) the other diagonal is used.
pub fn triangulate(mesh: &Mesh, pattern: TriangulationPattern) -> Result<Mesh> {
    if let Some(c) = mesh.cells().iter().position(|cyc| cyc.len() != 4) {
        return Err(Error::InvalidArgument(format!(
            "triangulate needs quadrilaterals; cell {c} has {} vertices",
            mesh.cells()[c].len()
        )));
    }
    let flip = match pattern {
        TriangulationPattern::Diagonal => vec![false; mesh.n_cells()],
        TriangulationPattern::Alternating => two_color(mesh),
    };
    let v = mesh.vertices();
    let area = |a: usize, b: usize, c: usize| signed_area([v[a], v[b], v[c]]);
    let mut cells = Vec::with_capacity(2 * mesh.n_cells());
    for (c, q) in mesh.cells().iter().enumerate() {
        let along_02 = [[q[0], q[1], q[2]], [q[0], q[2], q[3]]];
        let along_13 = [[q[1], q[2], q[3]], [q[1], q[3], q[0]]];
        let ok = |tris: &[[usize; 3]; 2]| tris.iter().all(|t| area(t[0], t[1], t[2]) > 0.0);
        let (first, second) = if flip[c] { (along_13, along_02) } else { (along_02, along_13) };
        let chosen = if ok(&first) { first } else { second };
        cells.extend(chosen.iter().map(|t| t.to_vec()));
    }
    Mesh::new(v.to_vec(), cells)
}

/// Breadth-first two-colouring of the cell adjacency graph.
fn two_color(mesh: &Mesh) -> Vec<bool> {
    let mut color: Vec<Option<bool>> = vec![None; mesh.n_cells()];
    let mut queue = VecDeque::new();
    for start in 0..mesh.n_cells() {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            let here = color[c].unwrap_or(false);
            for &f in mesh.cell_faces(c) {
                let face = &mesh.faces()[f];
                let other = if face.owner == c { face.neighbor } else { Some(face.owner) };
                if let Some(o) = other {
                    if color[o].is_none() {
                        color[o] = Some(!here);
                        queue.push_back(o);
                    }
                }
            }
        }
    }
    color.into_iter().map(|c| c.unwrap_or(false)).collect()
}

/// Geometric grading along one axis.
///
/// The distinct coordinate lines along `axis` (there are `n + 1` of them) are
/// remapped so that consecutive spacings grow by `ratio`; the extent is kept.
/// Intended for structured input, before any perturbation.
pub fn stretch(mesh: &Mesh, ratio: f64, axis: Axis) -> Result<Mesh> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::InvalidArgument(format!("stretch ratio must be positive, got {ratio}")));
    }
    let get = |p: &Point2| match axis {
        Axis::X => p.x,
        Axis::Y => p.y,
    };
    let mut lines: Vec<f64> = mesh.vertices().iter().map(get).collect();
    lines.sort_by(f64::total_cmp);
    let (lo, hi) = (lines[0], lines[lines.len() - 1]);
    let tol = 1e-12 * (hi - lo);
    lines.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let n = (lines.len() - 1) as f64;

    let map = |t: f64| -> f64 {
        let s = (t - lo) / (hi - lo);
        if s <= 0.0 {
            return lo;
        }
        if s >= 1.0 {
            return hi;
        }
        let graded = if (ratio - 1.0).abs() < 1e-14 {
            s
        } else {
            libm::expm1(s * n * libm::log(ratio)) / libm::expm1(n * libm::log(ratio))
        };
        lo + (hi - lo) * graded
    };
    let coords = mesh
        .vertices()
        .iter()
        .map(|p| match axis {
            Axis::X => Point2::new(map(p.x), p.y),
            Axis::Y => Point2::new(p.x, map(p.y)),
        })
        .collect();
    mesh.with_vertices(coords)
}

/// Smooth sinusoidal warp of the bounding box onto itself:
/// `x += A·Lx·sin(2πx̂)·sin(2πŷ)` and likewise for `y`, with `x̂, ŷ` the
/// normalised coordinates. Boundary vertices stay on the boundary.
pub fn warp(mesh: &Mesh, amplitude: f64) -> Result<Mesh> {
    if !amplitude.is_finite() {
        return Err(Error::InvalidArgument(format!("warp amplitude {amplitude} is not finite")));
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in mesh.vertices() {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let (lx, ly) = (x1 - x0, y1 - y0);
    let coords = mesh
        .vertices()
        .iter()
        .map(|p| {
            let (s, t) = ((p.x - x0) / lx, (p.y - y0) / ly);
            let bump = libm::sin(2.0 * PI * s) * libm::sin(2.0 * PI * t);
            Point2::new(p.x + amplitude * lx * bump, p.y + amplitude * ly * bump)
        })
        .collect();
    mesh.with_vertices(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::compute_metrics;

    #[test]
    fn cartesian_counts() {
        let m = build_cartesian(2, 2, (0.0, 1.0), (0.0, 1.0)).unwrap();
        assert_eq!(m.n_cells(), 4);
        assert_eq!(m.n_vertices(), 9);
        assert_eq!(m.n_faces(), 12);
        assert_eq!(m.n_boundary_faces(), 8);
    }

    #[test]
    fn cartesian_uniform_volumes() {
        let m = build_cartesian(10, 10, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let g = compute_metrics(&m).unwrap();
        assert!(g.cells.iter().all(|c| (c.volume - 0.01).abs() < 1e-15));
    }

    #[test]
    fn cartesian_rejects_bad_arguments() {
        assert!(build_cartesian(0, 4, (0.0, 1.0), (0.0, 1.0)).is_err());
        assert!(build_cartesian(4, 4, (1.0, 1.0), (0.0, 1.0)).is_err());
        assert!(build_cartesian(4, 4, (0.0, 1.0), (0.0, f64::NAN)).is_err());
    }

    #[test]
    fn zero_amplitude_is_identity() {
        let m = build_cartesian(5, 4, (0.0, 1.0), (0.0, 1.0)).unwrap();
        assert_eq!(perturb(&m, 0.0, 11).unwrap(), m);
    }

    #[test]
    fn perturb_is_deterministic() {
        let m = build_cartesian(8, 8, (0.0, 1.0), (0.0, 1.0)).unwrap();
        assert_eq!(perturb(&m, 0.2, 7).unwrap(), perturb(&m, 0.2, 7).unwrap());
        assert_ne!(perturb(&m, 0.2, 7).unwrap(), perturb(&m, 0.2, 8).unwrap());
    }

    #[test]
    fn perturb_moves_only_interior_vertex() {
        let m = build_cartesian(2, 2, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let p = perturb(&m, 0.3, 1).unwrap();
        let moved: Vec<usize> = (0..m.n_vertices()).filter(|&v| m.vertices()[v] != p.vertices()[v]).collect();
        assert_eq!(moved, vec![4]);
        let d = p.vertices()[4] - m.vertices()[4];
        assert!(d.x.abs() <= 0.3 * 0.5 && d.y.abs() <= 0.3 * 0.5);
    }

    #[test]
    fn perturb_rejects_large_amplitude() {
        let m = build_cartesian(2, 2, (0.0, 1.0), (0.0, 1.0)).unwrap();
        assert!(perturb(&m, 0.5, 1).is_err());
        assert!(perturb(&m, -0.1, 1).is_err());
    }

    #[test]
    fn diagonal_triangulation() {
        let m = build_cartesian(2, 2, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let t = triangulate(&m, TriangulationPattern::Diagonal).unwrap();
        assert_eq!(t.n_cells(), 8);
        let g = compute_metrics(&t).unwrap();
        assert!(g.cells.iter().all(|c| (c.volume - 0.125).abs() < 1e-15));
    }

    #[test]
    fn single_quad_splits_along_shared_diagonal() {
        let m = build_cartesian(1, 1, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let t = triangulate(&m, TriangulationPattern::Diagonal).unwrap();
        assert_eq!(t.n_cells(), 2);
        let interior: Vec<_> = t.faces().iter().filter(|f| !f.is_boundary()).collect();
        assert_eq!(interior.len(), 1);
        let [a, b] = interior[0].vertices;
        assert_eq!((a.min(b), a.max(b)), (0, 3));
    }

    #[test]
    fn alternating_triangulation_uses_both_diagonals() {
        let m = build_cartesian(4, 4, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let t = triangulate(&m, TriangulationPattern::Alternating).unwrap();
        assert_eq!(t.n_cells(), 32);
        assert!((t.total_area() - m.total_area()).abs() < 1e-15);
        // Neighbouring quads 0 and 1 use different diagonals.
        assert_eq!(t.cells()[0][0], 0);
        assert_eq!(t.cells()[2][0], 2);
    }

    #[test]
    fn triangulate_rejects_triangles() {
        let m = build_cartesian(1, 1, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let t = triangulate(&m, TriangulationPattern::Diagonal).unwrap();
        assert!(matches!(triangulate(&t, TriangulationPattern::Diagonal), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn stretch_unit_ratio_is_identity() {
        let m = build_cartesian(6, 3, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let s = stretch(&m, 1.0, Axis::X).unwrap();
        for (a, b) in m.vertices().iter().zip(s.vertices()) {
            assert!((a.x - b.x).abs() < 1e-15 && a.y == b.y);
        }
    }

    #[test]
    fn stretch_spacings_follow_geometric_series() {
        let m = build_cartesian(4, 1, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let s = stretch(&m, 2.0, Axis::X).unwrap();
        let xs: Vec<f64> = (0..=4).map(|i| s.vertices()[i].x).collect();
        let expected = [0.0, 1.0 / 15.0, 3.0 / 15.0, 7.0 / 15.0, 1.0];
        for (x, e) in xs.iter().zip(expected) {
            assert!((x - e).abs() < 1e-15, "{xs:?}");
        }
    }

    #[test]
    fn stretch_rejects_nonpositive_ratio() {
        let m = build_cartesian(2, 2, (0.0, 1.0), (0.0, 1.0)).unwrap();
        assert!(stretch(&m, 0.0, Axis::Y).is_err());
    }

    #[test]
    fn warp_keeps_area_and_boundary() {
        let m = build_cartesian(8, 8, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let w = warp(&m, 0.05).unwrap();
        assert!((w.total_area() - 1.0).abs() < 1e-14);
        let on_b = m.boundary_vertices();
        for (v, _) in on_b.iter().enumerate().filter(|(_, &b)| b) {
            assert!((w.vertices()[v] - m.vertices()[v]).norm() < 1e-15);
        }
    }
}

//! Plain-text mesh format.
//!
//! ```text
//! fvmesh 1
//! vertices 4
//! 0 0
//! 1 0
//! 1 1
//! 0 1
//! cells 1
//! 4 0 1 2 3
//! ```
//!
//! Cells list their vertex count followed by vertex indices in counter-clockwise
//! order. Blank lines and `#` comments are ignored. Coordinates are written with
//! the shortest representation that reads back to the same `f64`.

use std::fmt::Write as _;
use std::path::Path;

use fvgrad_core::geom::Point2;
use fvgrad_core::mesh::Mesh;

use crate::{AppError, Result};

const MAGIC: &str = "fvmesh 1";

pub fn format_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "vertices {}", mesh.n_vertices());
    for p in mesh.vertices() {
        let _ = writeln!(out, "{:?} {:?}", p.x, p.y);
    }
    let _ = writeln!(out, "cells {}", mesh.n_cells());
    for cell in mesh.cells() {
        let _ = write!(out, "{}", cell.len());
        for v in cell {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_mesh(mesh: &Mesh, path: &Path) -> Result<()> {
    std::fs::write(path, format_mesh(mesh)).map_err(|e| AppError::io(path, e))
}

pub fn read_mesh(path: &Path) -> Result<Mesh> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    parse_mesh(&text, path)
}

/// Parses the text format; `origin` only labels error messages.
pub fn parse_mesh(text: &str, origin: &Path) -> Result<Mesh> {
    let err = |line: usize, message: String| AppError::Parse { path: origin.to_path_buf(), line, message };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| lines.next().ok_or_else(|| err(text.lines().count().max(1), format!("missing {what}")));

    let (n, header) = next("header")?;
    if header.split_whitespace().collect::<Vec<_>>() != ["fvmesh", "1"] {
        return Err(err(n, format!("expected `{MAGIC}`, found `{header}`")));
    }
    let count = |(n, line): (usize, &str), key: &str| -> Result<usize> {
        match line.split_whitespace().collect::<Vec<_>>()[..] {
            [k, c] if k == key => c.parse().map_err(|_| err(n, format!("bad {key} count `{c}`"))),
            _ => Err(err(n, format!("expected `{key} <count>`, found `{line}`"))),
        }
    };

    let nv = count(next("vertex count")?, "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, line) = next("vertex record")?;
        let xy: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err(n, format!("bad vertex record `{line}`")))?;
        match xy[..] {
            [x, y] if x.is_finite() && y.is_finite() => vertices.push(Point2::new(x, y)),
            _ => return Err(err(n, format!("vertex record needs two finite coordinates, found `{line}`"))),
        }
    }

    let nc = count(next("cell count")?, "cells")?;
    let mut cells = Vec::with_capacity(nc);
    for c in 0..nc {
        let (n, line) = next("cell record")?;
        let ids: Vec<usize> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err(n, format!("bad cell record {c}: `{line}`")))?;
        let Some((&k, verts)) = ids.split_first() else {
            return Err(err(n, format!("empty cell record {c}")));
        };
        if k != verts.len() {
            return Err(err(n, format!("cell record {c} declares {k} vertices but lists {}", verts.len())));
        }
        if let Some(&bad) = verts.iter().find(|&&v| v >= nv) {
            return Err(err(n, format!("cell record {c} references vertex {bad}, only {nv} vertices")));
        }
        cells.push(verts.to_vec());
    }
    if let Some((n, line)) = lines.next() {
        return Err(err(n, format!("unexpected trailing content `{line}`")));
    }
    Ok(Mesh::new(vertices, cells)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fvgrad_core::mesh::{build_cartesian, perturb};

    fn parse(text: &str) -> Result<Mesh> {
        parse_mesh(text, Path::new("m.txt"))
    }

    #[test]
    fn round_trip_is_exact() {
        let m = perturb(&build_cartesian(5, 3, (0.0, 1.0), (0.0, 0.7)).unwrap(), 0.3, 2).unwrap();
        let back = parse(&format_mesh(&m)).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.cells(), m.cells());
        assert_eq!(format_mesh(&back), format_mesh(&m));
    }

    #[test]
    fn comments_and_blank_lines() {
        let m =
            parse("# unit square\nfvmesh 1\n\nvertices 4\n0 0\n1 0\n1 1 # corner\n0 1\ncells 1\n4 0 1 2 3\n").unwrap();
        assert_eq!(m.n_cells(), 1);
    }

    #[test]
    fn out_of_range_vertex_names_cell_and_line() {
        let e = parse("fvmesh 1\nvertices 3\n0 0\n1 0\n0 1\ncells 1\n3 0 1 7\n").unwrap_err();
        let msg = e.to_string();
        assert!(matches!(e, AppError::Parse { line: 7, .. }), "{msg}");
        assert!(msg.contains("cell record 0") && msg.contains("vertex 7"), "{msg}");
    }

    #[test]
    fn empty_cell_list_is_invalid_mesh() {
        let e = parse("fvmesh 1\nvertices 3\n0 0\n1 0\n0 1\ncells 0\n").unwrap_err();
        assert!(matches!(e, AppError::Core(fvgrad_core::Error::InvalidMesh { .. })), "{e}");
    }

    #[test]
    fn malformed_records() {
        for (text, line) in [
            ("mesh 2\n", 1),
            ("fvmesh 1\nvertices x\n", 2),
            ("fvmesh 1\nvertices 1\n0\n", 3),
            ("fvmesh 1\nvertices 3\n0 0\n1 0\n0 1\ncells 1\n4 0 1 2\n", 7),
            ("fvmesh 1\nvertices 3\n0 0\n1 0\n0 1\ncells 1\n3 0 1 2\nextra\n", 8),
        ] {
            match parse(text) {
                Err(AppError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(parse("fvmesh 1\nvertices 2\n0 0\n"), Err(AppError::Parse { .. })));
    }

    #[test]
    fn duplicate_vertex_in_cell_is_rejected() {
        let e = parse("fvmesh 1\nvertices 4\n0 0\n1 0\n1 1\n0 1\ncells 1\n4 0 1 1 3\n").unwrap_err();
        assert!(matches!(e, AppError::Core(_)), "{e}");
    }
}

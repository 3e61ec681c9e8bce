use alloc::vec::Vec;

use super::MeshMetrics;

/// Non-orthogonality and skewness of interior faces, aspect ratio of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    /// Interior faces, in face order.
    pub faces: Vec<usize>,
    /// `acos(n_f · r_f)` in radians, parallel to `faces`.
    pub non_orthogonality: Vec<f64>,
    /// Distance from the face centroid to where the centroid join crosses the face
    /// line, over the centroid distance. Parallel to `faces`.
    pub skewness: Vec<f64>,
    /// Longest over shortest edge, per cell.
    pub aspect_ratio: Vec<f64>,
    pub max_non_orthogonality: f64,
    pub mean_non_orthogonality: f64,
    pub max_skewness: f64,
    pub mean_skewness: f64,
    pub h: f64,
}

pub fn quality_report(metrics: &MeshMetrics) -> QualityReport {
    let mut faces = Vec::new();
    let mut non_orthogonality = Vec::new();
    let mut skewness = Vec::new();
    for (f, fm) in metrics.faces.iter().enumerate().filter(|(_, fm)| !fm.is_boundary()) {
        let cos = fm.normal.dot(fm.join_unit).clamp(-1.0, 1.0);
        let xo = metrics.cells[fm.owner].centroid;
        let across = fm.join.dot(fm.normal);
        let skew = if across > 0.0 {
            let t = (fm.centroid - xo).dot(fm.normal) / across;
            let hit = xo + fm.join * t;
            hit.distance(fm.centroid) / fm.distance
        } else {
            f64::INFINITY
        };
        faces.push(f);
        non_orthogonality.push(libm::acos(cos));
        skewness.push(skew);
    }
    let aspect_ratio = metrics
        .cell_faces
        .iter()
        .map(|fs| {
            let (lo, hi) = fs.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &f| {
                let a = metrics.faces[f].area;
                (lo.min(a), hi.max(a))
            });
            hi / lo
        })
        .collect();
    let stats = |v: &[f64]| {
        if v.is_empty() {
            (0.0, 0.0)
        } else {
            (v.iter().copied().fold(0.0, f64::max), v.iter().sum::<f64>() / v.len() as f64)
        }
    };
    let (max_non_orthogonality, mean_non_orthogonality) = stats(&non_orthogonality);
    let (max_skewness, mean_skewness) = stats(&skewness);
    QualityReport {
        faces,
        non_orthogonality,
        skewness,
        aspect_ratio,
        max_non_orthogonality,
        mean_non_orthogonality,
        max_skewness,
        mean_skewness,
        h: metrics.h(),
    }
}

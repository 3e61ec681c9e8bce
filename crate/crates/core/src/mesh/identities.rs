use alloc::vec::Vec;

use super::MeshMetrics;
use crate::geom::Vec2;

/// Normalised residuals of the closed-polygon identities for one cell.
///
/// The four volume identities `Σ (x_f − x_i) n_x Δs = Ω`, `Σ (x_f − x_i) n_y Δs = 0`,
/// `Σ (y_f − y_i) n_x Δs = 0` and `Σ (y_f − y_i) n_y Δs = Ω` are normalised by Ω;
/// the closure `Σ S_f = 0` by the cell perimeter.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CellResiduals {
    pub xx: f64,
    pub xy: f64,
    pub yx: f64,
    pub yy: f64,
    pub closure: f64,
    /// `|Σ S_f|` before normalisation.
    pub closure_raw: f64,
}

impl CellResiduals {
    pub fn max(&self) -> f64 {
        self.xx.max(self.xy).max(self.yx).max(self.yy).max(self.closure)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub cells: Vec<CellResiduals>,
    /// Componentwise maximum over cells.
    pub max: CellResiduals,
    pub tol: f64,
    pub passed: bool,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.max.max()
    }

    pub fn worst_cell(&self) -> Option<usize> {
        (0..self.cells.len()).max_by(|&a, &b| self.cells[a].max().total_cmp(&self.cells[b].max()))
    }
}

pub fn validate_identities(metrics: &MeshMetrics, tol: f64) -> IdentityReport {
    let mut cells = Vec::with_capacity(metrics.n_cells());
    let mut max = CellResiduals::default();
    for (c, cm) in metrics.cells.iter().enumerate() {
        let (mut xx, mut xy, mut yx, mut yy) = (0.0, 0.0, 0.0, 0.0);
        let mut closure = Vec2::ZERO;
        for v in metrics.views(c) {
            let d = v.centroid - cm.centroid;
            xx += d.x * v.area_vector.x;
            xy += d.x * v.area_vector.y;
            yx += d.y * v.area_vector.x;
            yy += d.y * v.area_vector.y;
            closure += v.area_vector;
        }
        let r = CellResiduals {
            xx: (xx - cm.volume).abs() / cm.volume,
            xy: xy.abs() / cm.volume,
            yx: yx.abs() / cm.volume,
            yy: (yy - cm.volume).abs() / cm.volume,
            closure: closure.norm() / cm.perimeter,
            closure_raw: closure.norm(),
        };
        max.xx = max.xx.max(r.xx);
        max.xy = max.xy.max(r.xy);
        max.yx = max.yx.max(r.yx);
        max.yy = max.yy.max(r.yy);
        max.closure = max.closure.max(r.closure);
        max.closure_raw = max.closure_raw.max(r.closure_raw);
        cells.push(r);
    }
    let passed = cells.iter().all(|r| r.max() <= tol);
    IdentityReport { cells, max, tol, passed }
}

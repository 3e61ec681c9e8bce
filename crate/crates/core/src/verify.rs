//! Error norms, observed orders and refinement studies.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::fields::{exact_gradients, sample, ManufacturedField, ScalarField};
use crate::gradcore::{CellStencil, DirectionalSample, GradientField, SolveDiagnostics, SolverParams};
use crate::mesh::{
    build_cartesian, compute_metrics, perturb, stretch, triangulate, warp, Axis, Mesh, MeshMetrics,
    TriangulationPattern,
};
use crate::schemes::{Reconstructor, SchemeSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Volume-weighted norms of the gradient error, per component and of its magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub x: Norms,
    pub y: Norms,
    pub combined: Norms,
}

pub fn error_norms(computed: &GradientField, exact: &GradientField, metrics: &MeshMetrics) -> Result<ErrorNorms> {
    let n = metrics.n_cells();
    if computed.len() != n || exact.len() != n {
        return Err(Error::InvalidArgument(format!(
            "gradient fields of {} and {} cells on a mesh of {n}",
            computed.len(),
            exact.len()
        )));
    }
    let mut acc = [Norms::default(); 3];
    let mut volume = 0.0;
    for ((g, e), c) in computed.gradients.iter().zip(&exact.gradients).zip(&metrics.cells) {
        let d = *g - *e;
        for (norms, v) in acc.iter_mut().zip([d.x.abs(), d.y.abs(), d.norm()]) {
            norms.l1 += c.volume * v;
            norms.l2 += c.volume * v * v;
            norms.linf = norms.linf.max(v);
        }
        volume += c.volume;
    }
    let [x, y, combined] = acc.map(|m| Norms { l1: m.l1 / volume, l2: libm::sqrt(m.l2 / volume), linf: m.linf });
    Ok(ErrorNorms { x, y, combined })
}

/// Observed order of accuracy between two levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Value(f64),
    /// The finer level reproduced the exact gradient.
    Exact,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Value(p) => write!(f, "{p:.6}"),
            Order::Exact => f.write_str("EXACT"),
        }
    }
}

/// `p = log(e_coarse/e_fine) / log(h_coarse/h_fine)`.
pub fn observed_order(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> Result<Order> {
    if !(h_fine > 0.0 && h_coarse > h_fine) {
        return Err(Error::InvalidArgument(format!("mesh sizes {h_coarse} -> {h_fine} do not refine")));
    }
    if !(e_coarse >= 0.0 && e_fine >= 0.0) {
        return Err(Error::InvalidArgument(format!("errors {e_coarse}, {e_fine} must be non-negative")));
    }
    if e_fine == 0.0 {
        return Ok(Order::Exact);
    }
    Ok(Order::Value(libm::log(e_coarse / e_fine) / libm::log(h_coarse / h_fine)))
}

/// Exact stencil data: `b·∇φ` evaluated at every element anchor.
pub fn exact_stencil_samples<F: ScalarField + ?Sized>(
    stencils: &[CellStencil],
    field: &F,
) -> Vec<Vec<DirectionalSample>> {
    stencils
        .iter()
        .map(|s| s.elements.iter().map(|e| DirectionalSample::explicit(e.b.dot(field.gradient(e.anchor)))).collect())
        .collect()
}

/// Mesh sequences on the unit square. Irregularity is held fixed under refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshFamily {
    Cartesian,
    Perturbed { amplitude: f64, seed: u64 },
    Triangulated { pattern: TriangulationPattern, amplitude: f64, seed: u64 },
    Stretched { ratio: f64, axis: Axis },
    Warped { amplitude: f64 },
}

impl MeshFamily {
    /// The `level`-th mesh, `nx × ny` cells before any triangulation.
    /// Random perturbations use seed `seed + level`. A stretching ratio applies
    /// at level 0; level `l` uses `ratio^(1/2^l)` so the grading is fixed.
    pub fn build(&self, nx: usize, ny: usize, level: usize) -> Result<Mesh> {
        let base = build_cartesian(nx, ny, (0.0, 1.0), (0.0, 1.0))?;
        match *self {
            MeshFamily::Cartesian => Ok(base),
            MeshFamily::Perturbed { amplitude, seed } => perturb(&base, amplitude, seed.wrapping_add(level as u64)),
            MeshFamily::Triangulated { pattern, amplitude, seed } => {
                let m =
                    if amplitude > 0.0 { perturb(&base, amplitude, seed.wrapping_add(level as u64))? } else { base };
                triangulate(&m, pattern)
            }
            MeshFamily::Stretched { ratio, axis } => {
                stretch(&base, libm::pow(ratio, libm::exp2(-(level as f64))), axis)
            }
            MeshFamily::Warped { amplitude } => warp(&base, amplitude),
        }
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshFamily::Cartesian => f.write_str("cartesian"),
            MeshFamily::Perturbed { amplitude, seed } => write!(f, "perturbed:a={amplitude}:seed={seed}"),
            MeshFamily::Triangulated { pattern, amplitude, seed } => {
                let p = match pattern {
                    TriangulationPattern::Diagonal => "diagonal",
                    TriangulationPattern::Alternating => "alternating",
                };
                write!(f, "triangulated:{p}:a={amplitude}:seed={seed}")
            }
            MeshFamily::Stretched { ratio, axis } => {
                let a = match axis {
                    Axis::X => "x",
                    Axis::Y => "y",
                };
                write!(f, "stretched:r={ratio}:{a}")
            }
            MeshFamily::Warped { amplitude } => write!(f, "warped:a={amplitude}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyPlan {
    pub family: MeshFamily,
    /// Cells along x and y on level 0; both doubled on every further level.
    pub base: (usize, usize),
    pub levels: usize,
}

impl StudyPlan {
    pub fn validate(&self) -> Result<()> {
        let (nx, ny) = self.base;
        if nx == 0 || ny == 0 || self.levels == 0 {
            return Err(Error::InvalidArgument(format!(
                "study needs base sizes and levels >= 1, got {nx}x{ny} and {}",
                self.levels
            )));
        }
        Ok(())
    }

    pub fn size(&self, level: usize) -> (usize, usize) {
        (self.base.0 << level, self.base.1 << level)
    }

    pub fn mesh(&self, level: usize) -> Result<Mesh> {
        let (nx, ny) = self.size(level);
        self.family.build(nx, ny, level)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LevelStatus {
    Ok,
    NotConverged,
    Failed(String),
}

impl fmt::Display for LevelStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelStatus::Ok => f.write_str("ok"),
            LevelStatus::NotConverged => f.write_str("not-converged"),
            LevelStatus::Failed(m) => write!(f, "failed: {m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelResult {
    pub level: usize,
    pub h: f64,
    pub n_cells: usize,
    pub norms: Option<ErrorNorms>,
    pub diagnostics: Option<SolveDiagnostics>,
    pub status: LevelStatus,
}

impl LevelResult {
    pub fn failed(level: usize, h: f64, n_cells: usize, err: &Error) -> Self {
        LevelResult { level, h, n_cells, norms: None, diagnostics: None, status: LevelStatus::Failed(err.to_string()) }
    }
}

/// Error and diagnostics of one scheme on one prepared mesh. Failures are recorded.
pub fn run_level<F: ScalarField + ?Sized>(
    level: usize,
    metrics: &MeshMetrics,
    spec: &SchemeSpec,
    field: &F,
    params: SolverParams,
) -> LevelResult {
    let (h, n_cells) = (metrics.h(), metrics.n_cells());
    let outcome = Reconstructor::new(metrics, spec).and_then(|r| {
        let g = r.run(&sample(field, metrics), params)?;
        let norms = error_norms(&g, &exact_gradients(field, metrics), metrics)?;
        Ok((g.diagnostics, norms))
    });
    match outcome {
        Ok((d, norms)) => LevelResult {
            level,
            h,
            n_cells,
            norms: Some(norms),
            diagnostics: Some(d),
            status: if d.converged { LevelStatus::Ok } else { LevelStatus::NotConverged },
        },
        Err(e) => LevelResult::failed(level, h, n_cells, &e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub scheme: String,
    pub field: String,
    pub family: String,
    pub levels: Vec<LevelResult>,
}

impl ConvergenceReport {
    /// Combined L2 order of each level against the previous one; `None` for the
    /// first level or when either level failed.
    pub fn orders(&self) -> Vec<Option<Order>> {
        let mut out = Vec::with_capacity(self.levels.len());
        out.push(None);
        for w in self.levels.windows(2) {
            let p = match (&w[0].norms, &w[1].norms) {
                (Some(c), Some(f)) => observed_order(c.combined.l2, f.combined.l2, w[0].h, w[1].h).ok(),
                _ => None,
            };
            out.push(p);
        }
        out.truncate(self.levels.len());
        out
    }

    /// Order between the two finest levels.
    pub fn finest_order(&self) -> Option<Order> {
        self.orders().last().copied().flatten()
    }
}

/// One report per (scheme, field), in input order. Mesh metrics are shared
/// across all schemes and fields of a level.
pub fn convergence_study(
    schemes: &[SchemeSpec],
    fields: &[ManufacturedField],
    plan: &StudyPlan,
    params: SolverParams,
) -> Result<Vec<ConvergenceReport>> {
    plan.validate()?;
    let family = plan.family.to_string();
    let mut reports: Vec<ConvergenceReport> = schemes
        .iter()
        .flat_map(|s| {
            let family = &family;
            fields.iter().map(move |f| ConvergenceReport {
                scheme: s.name(),
                field: f.to_string(),
                family: family.clone(),
                levels: Vec::with_capacity(plan.levels),
            })
        })
        .collect();
    for level in 0..plan.levels {
        let metrics = plan.mesh(level).and_then(|m| compute_metrics(&m));
        let mut r = reports.iter_mut();
        for spec in schemes {
            for field in fields {
                let report = r.next().expect("report per case");
                let result = match &metrics {
                    Ok(g) => run_level(level, g, spec, field, params),
                    Err(e) => {
                        let (nx, ny) = plan.size(level);
                        LevelResult::failed(level, libm::sqrt(1.0 / (nx * ny) as f64), nx * ny, e)
                    }
                };
                report.levels.push(result);
            }
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;
    use crate::mesh::compute_metrics;
    use alloc::vec;

    fn field(v: Vec<Vec2>) -> GradientField {
        GradientField::explicit(v)
    }

    #[test]
    fn norms_of_identical_fields_vanish() {
        let g = compute_metrics(&build_cartesian(3, 3, (0.0, 1.0), (0.0, 1.0)).unwrap()).unwrap();
        let a = field(vec![Vec2::new(1.0, -2.0); 9]);
        assert_eq!(error_norms(&a, &a, &g).unwrap(), ErrorNorms::default());
    }

    #[test]
    fn single_cell_norms() {
        let g = compute_metrics(&build_cartesian(1, 1, (0.0, 1.0), (0.0, 1.0)).unwrap()).unwrap();
        let n = error_norms(&field(vec![Vec2::new(1.0, 1.0)]), &field(vec![Vec2::ZERO]), &g).unwrap();
        let r2 = core::f64::consts::SQRT_2;
        assert!((n.combined.l2 - r2).abs() < 1e-15);
        assert!((n.combined.linf - r2).abs() < 1e-15);
        assert_eq!(n.x.l1, 1.0);
    }

    #[test]
    fn two_half_cells() {
        let g = compute_metrics(&build_cartesian(2, 1, (0.0, 1.0), (0.0, 1.0)).unwrap()).unwrap();
        let n = error_norms(&field(vec![Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]), &field(vec![Vec2::ZERO; 2]), &g)
            .unwrap();
        assert_eq!(n.combined.l2, 1.0);
        assert_eq!(n.x.l2, libm::sqrt(0.5));
    }

    #[test]
    fn size_mismatch() {
        let g = compute_metrics(&build_cartesian(2, 1, (0.0, 1.0), (0.0, 1.0)).unwrap()).unwrap();
        let a = field(vec![Vec2::ZERO]);
        assert!(matches!(error_norms(&a, &a, &g), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn orders() {
        assert_eq!(observed_order(0.1, 0.05, 0.2, 0.1).unwrap(), Order::Value(1.0));
        match observed_order(0.1, 0.025, 0.2, 0.1).unwrap() {
            Order::Value(p) => assert!((p - 2.0).abs() < 1e-14),
            Order::Exact => panic!(),
        }
        assert_eq!(observed_order(1e-3, 0.0, 0.2, 0.1).unwrap(), Order::Exact);
        assert!(observed_order(0.1, 0.05, 0.1, 0.2).is_err());
    }

    #[test]
    fn linear_study_is_exact_at_every_level() {
        let plan = StudyPlan { family: MeshFamily::Perturbed { amplitude: 0.3, seed: 1 }, base: (4, 4), levels: 3 };
        let lin = ManufacturedField::Linear { c0: 1.0, c1: 2.0, c2: 3.0 };
        let reports = convergence_study(&["ulsq".parse().unwrap()], &[lin], &plan, SolverParams::default()).unwrap();
        let r = &reports[0];
        assert_eq!(r.levels.len(), 3);
        for l in &r.levels {
            assert!(l.norms.unwrap().combined.linf < 1e-11);
        }
        assert!(r.levels.windows(2).all(|w| w[1].h < w[0].h));
    }

    #[test]
    fn single_level_has_no_order() {
        let plan = StudyPlan { family: MeshFamily::Cartesian, base: (4, 4), levels: 1 };
        let reports =
            convergence_study(&["tg".parse().unwrap()], &[ManufacturedField::Trig], &plan, SolverParams::default())
                .unwrap();
        assert_eq!(reports[0].orders(), vec![None]);
        assert_eq!(reports[0].finest_order(), None);
    }

    #[test]
    fn family_seeds_advance_with_level() {
        let fam = MeshFamily::Perturbed { amplitude: 0.3, seed: 9 };
        let a = fam.build(4, 4, 0).unwrap();
        let b = perturb(&build_cartesian(4, 4, (0.0, 1.0), (0.0, 1.0)).unwrap(), 0.3, 9).unwrap();
        let c = fam.build(4, 4, 1).unwrap();
        assert_eq!(a.vertices(), b.vertices());
        assert_ne!(a.vertices(), c.vertices());
    }
}

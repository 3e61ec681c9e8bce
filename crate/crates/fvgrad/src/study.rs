//! Parallel convergence studies.

use fvgrad_core::mesh::{compute_metrics, MeshMetrics};
use fvgrad_core::verify::{run_level, ConvergenceReport, LevelResult};
use rayon::prelude::*;

use crate::config::StudyConfig;
use crate::Result;

/// Runs every (scheme, field, level) case as an independent job. Reports come
/// back in configuration order, identical to a sequential run.
pub fn run_study(config: &StudyConfig) -> Result<Vec<ConvergenceReport>> {
    let plan = &config.plan;
    plan.validate()?;
    let meshes: Vec<fvgrad_core::Result<MeshMetrics>> =
        (0..plan.levels).into_par_iter().map(|l| plan.mesh(l).and_then(|m| compute_metrics(&m))).collect();

    let cases: Vec<(usize, usize, usize)> = (0..config.schemes.len())
        .flat_map(|s| (0..config.fields.len()).flat_map(move |f| (0..plan.levels).map(move |l| (s, f, l))))
        .collect();
    let results: Vec<LevelResult> = cases
        .par_iter()
        .map(|&(s, f, level)| match &meshes[level] {
            Ok(g) => run_level(level, g, &config.schemes[s], &config.fields[f], config.solver),
            Err(e) => {
                let (nx, ny) = plan.size(level);
                LevelResult::failed(level, (1.0 / (nx * ny) as f64).sqrt(), nx * ny, e)
            }
        })
        .collect();

    let family = plan.family.to_string();
    let mut results = results.into_iter();
    let mut reports = Vec::with_capacity(config.schemes.len() * config.fields.len());
    for scheme in &config.schemes {
        for field in &config.fields {
            reports.push(ConvergenceReport {
                scheme: scheme.name(),
                field: field.to_string(),
                family: family.clone(),
                levels: results.by_ref().take(plan.levels).collect(),
            });
        }
    }
    Ok(reports)
}

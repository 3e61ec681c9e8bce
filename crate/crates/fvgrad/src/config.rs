//! Study configuration: an INI file with `[mesh]`, `[schemes]`, `[fields]`,
//! `[solver]` and `[output]` sections.
//!
//! ```ini
//! [mesh]
//! generator = perturbed   # cartesian | perturbed | triangulated | stretched | warped
//! nx = 8
//! ny = 8
//! amplitude = 0.3
//! seed = 1
//! levels = 4
//!
//! [schemes]
//! ids = gg:mean, ulsq, wlsq:q=1, mgg
//!
//! [fields]
//! ids = trig, linear:1,2,3
//!
//! [solver]
//! tol = 1e-10
//! max_iter = 200
//! relax = 1
//!
//! [output]
//! path = consistency.csv
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use fvgrad_core::fields::ManufacturedField;
use fvgrad_core::gradcore::SolverParams;
use fvgrad_core::mesh::{Axis, TriangulationPattern};
use fvgrad_core::schemes::SchemeSpec;
use fvgrad_core::verify::{MeshFamily, StudyPlan};
use ini::{Ini, Properties};

use crate::{AppError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub plan: StudyPlan,
    pub schemes: Vec<SchemeSpec>,
    pub fields: Vec<ManufacturedField>,
    pub solver: SolverParams,
    /// Where the CSV goes; standard output when absent.
    pub output: Option<PathBuf>,
}

const KEYS: [(&str, &[&str]); 5] = [
    ("mesh", &["generator", "nx", "ny", "amplitude", "seed", "levels", "ratio", "axis", "pattern"]),
    ("schemes", &["ids"]),
    ("fields", &["ids"]),
    ("solver", &["tol", "max_iter", "relax"]),
    ("output", &["path"]),
];

fn bad(msg: String) -> AppError {
    AppError::Config(msg)
}

fn value<T: FromStr>(props: Option<&Properties>, section: &str, key: &str) -> Result<Option<T>> {
    match props.and_then(|p| p.get(key)) {
        None => Ok(None),
        Some(raw) => {
            raw.trim().parse().map(Some).map_err(|_| bad(format!("[{section}] {key} = `{raw}` is not a valid value")))
        }
    }
}

/// Splits a comma list; `linear:c0,c1,c2` keeps its own commas.
fn split_field_ids(list: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut parts = list.split(',').map(str::trim).filter(|s| !s.is_empty());
    while let Some(p) = parts.next() {
        if p.starts_with("linear:") {
            let rest: Vec<&str> = parts.by_ref().take(2).collect();
            out.push(std::iter::once(p).chain(rest).collect::<Vec<_>>().join(","));
        } else {
            out.push(p.to_string());
        }
    }
    out
}

impl StudyConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            AppError::Config(m) => AppError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| bad(e.to_string()))?;
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(bad(format!("key `{k}` outside any section")));
                }
                continue;
            };
            let allowed =
                KEYS.iter().find(|(s, _)| *s == section).ok_or_else(|| bad(format!("unknown section [{section}]")))?.1;
            if let Some((k, _)) = props.iter().find(|(k, _)| !allowed.contains(k)) {
                return Err(bad(format!("unknown key `{k}` in [{section}]")));
            }
        }

        let mesh = ini.section(Some("mesh"));
        let generator: String = value(mesh, "mesh", "generator")?.unwrap_or_else(|| "cartesian".into());
        let nx: usize = value(mesh, "mesh", "nx")?.ok_or_else(|| bad("[mesh] nx is required".into()))?;
        let ny: usize = value(mesh, "mesh", "ny")?.unwrap_or(nx);
        let levels: usize = value(mesh, "mesh", "levels")?.unwrap_or(4);
        let seed: u64 = value(mesh, "mesh", "seed")?.unwrap_or(0);
        let amplitude: Option<f64> = value(mesh, "mesh", "amplitude")?;
        let family = match generator.as_str() {
            "cartesian" => MeshFamily::Cartesian,
            "perturbed" => MeshFamily::Perturbed { amplitude: amplitude.unwrap_or(0.3), seed },
            "triangulated" => {
                let pattern = match value::<String>(mesh, "mesh", "pattern")?.as_deref() {
                    None | Some("alternating") => TriangulationPattern::Alternating,
                    Some("diagonal") => TriangulationPattern::Diagonal,
                    Some(p) => return Err(bad(format!("[mesh] pattern `{p}` (expected diagonal or alternating)"))),
                };
                MeshFamily::Triangulated { pattern, amplitude: amplitude.unwrap_or(0.0), seed }
            }
            "stretched" => {
                let axis = match value::<String>(mesh, "mesh", "axis")?.as_deref() {
                    None | Some("x") => Axis::X,
                    Some("y") => Axis::Y,
                    Some(a) => return Err(bad(format!("[mesh] axis `{a}` (expected x or y)"))),
                };
                MeshFamily::Stretched { ratio: value(mesh, "mesh", "ratio")?.unwrap_or(1.2), axis }
            }
            "warped" => MeshFamily::Warped { amplitude: amplitude.unwrap_or(0.05) },
            g => {
                return Err(bad(format!(
                    "[mesh] generator `{g}` (expected cartesian, perturbed, triangulated, stretched or warped)"
                )))
            }
        };
        if nx == 0 || ny == 0 || levels == 0 {
            return Err(bad(format!("[mesh] nx, ny and levels must be >= 1 (got {nx}, {ny}, {levels})")));
        }

        let list = |section: &str| -> Result<String> {
            value(ini.section(Some(section)), section, "ids")?
                .ok_or_else(|| bad(format!("[{section}] ids is required")))
        };
        let schemes = list("schemes")?
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<SchemeSpec>().map_err(|e| bad(format!("[schemes] {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let fields = split_field_ids(&list("fields")?)
            .iter()
            .map(|s| s.parse::<ManufacturedField>().map_err(|e| bad(format!("[fields] {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if schemes.is_empty() || fields.is_empty() {
            return Err(bad("at least one scheme and one field are required".into()));
        }

        let solver_props = ini.section(Some("solver"));
        let defaults = SolverParams::default();
        let solver = SolverParams {
            tol: value(solver_props, "solver", "tol")?.unwrap_or(defaults.tol),
            max_iter: value(solver_props, "solver", "max_iter")?.unwrap_or(defaults.max_iter),
            relax: value(solver_props, "solver", "relax")?.unwrap_or(defaults.relax),
        };
        if !(solver.tol >= 0.0) || !(solver.relax > 0.0 && solver.relax <= 1.0) {
            return Err(bad(format!(
                "[solver] needs tol >= 0 and 0 < relax <= 1 (got {}, {})",
                solver.tol, solver.relax
            )));
        }

        let output = value::<String>(ini.section(Some("output")), "output", "path")?.map(PathBuf::from);
        Ok(StudyConfig { plan: StudyPlan { family, base: (nx, ny), levels }, schemes, fields, solver, output })
    }
}

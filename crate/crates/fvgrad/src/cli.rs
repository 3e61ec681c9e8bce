//! The `fvgrad` command line.
//!
//! Exit codes: 0 success, 1 validation or reconstruction failure, 2 input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fvgrad_core::fields::{exact_gradients, sample, ManufacturedField};
use fvgrad_core::gradcore::SolverParams;
use fvgrad_core::mesh::{
    build_cartesian, compute_metrics, perturb, quality_report, stretch, triangulate, validate_identities, warp, Axis,
    Mesh, TriangulationPattern,
};
use fvgrad_core::schemes::{Reconstructor, SchemeSpec};
use fvgrad_core::verify::error_norms;
use fvgrad_core::Error as CoreError;

use crate::config::StudyConfig;
use crate::{meshio, report, study, AppError, Result};

/// Identity residual above which `validate` fails.
pub const VALIDATE_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "fvgrad", version, about = "Finite-volume gradient reconstruction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a mesh on the unit square.
    GenMesh(GenMeshArgs),
    /// Check the closed-polygon identities and report mesh quality.
    Validate {
        mesh: PathBuf,
        #[arg(long, default_value_t = VALIDATE_TOL)]
        tol: f64,
    },
    /// Reconstruct the gradient of a manufactured field and compare with the exact one.
    Reconstruct(ReconstructArgs),
    /// Run a convergence study described by a configuration file.
    Study {
        config: PathBuf,
        /// Overrides `[output] path`; `-` for standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PatternArg {
    Diagonal,
    Alternating,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    X,
    Y,
}

#[derive(Debug, Args)]
struct GenMeshArgs {
    /// Cells along x and y, e.g. `16x16`.
    #[arg(long, value_parser = parse_dims)]
    cartesian: (usize, usize),
    /// Random vertex displacement as a fraction of the shortest incident edge.
    #[arg(long)]
    perturb: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Geometric grading ratio between consecutive spacings.
    #[arg(long)]
    stretch: Option<f64>,
    #[arg(long, value_enum, default_value = "x")]
    axis: AxisArg,
    /// Smooth sinusoidal warp amplitude.
    #[arg(long)]
    warp: Option<f64>,
    /// Split every quadrilateral into two triangles.
    #[arg(long, value_enum)]
    triangulate: Option<PatternArg>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    mesh: PathBuf,
    /// Scheme id, e.g. `ulsq`, `wlsq:q=2`, `flex:tg:alpha=0.5:two-step`.
    scheme: String,
    /// Field id: `linear:c0,c1,c2`, `quadratic`, `trig` or `exp`.
    field: String,
    #[arg(long, default_value_t = SolverParams::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = SolverParams::default().max_iter)]
    max_iter: usize,
    #[arg(long, default_value_t = SolverParams::default().relax)]
    relax: f64,
    /// Per-cell gradient CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NXxNY, got `{s}`"))?;
    let n = |t: &str| match t.trim().parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("cell counts must be positive integers, got `{s}`")),
    };
    Ok((n(a)?, n(b)?))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let outcome = match cli.command {
        Command::GenMesh(a) => gen_mesh(a),
        Command::Validate { mesh, tol } => validate(&mesh, tol),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Study { config, out } => run_study(&config, out),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &AppError) -> u8 {
    match e {
        AppError::Core(
            CoreError::SingularStencil { .. } | CoreError::SingularTensor { .. } | CoreError::Divergence { .. },
        ) => 1,
        _ => 2,
    }
}

fn usage(e: CoreError) -> AppError {
    AppError::Usage(e.to_string())
}

fn gen_mesh(a: GenMeshArgs) -> Result<u8> {
    let (nx, ny) = a.cartesian;
    let mut mesh = build_cartesian(nx, ny, (0.0, 1.0), (0.0, 1.0)).map_err(usage)?;
    if let Some(r) = a.stretch {
        let axis = match a.axis {
            AxisArg::X => Axis::X,
            AxisArg::Y => Axis::Y,
        };
        mesh = stretch(&mesh, r, axis).map_err(usage)?;
    }
    if let Some(amp) = a.perturb {
        mesh = perturb(&mesh, amp, a.seed).map_err(usage)?;
    }
    if let Some(amp) = a.warp {
        mesh = warp(&mesh, amp).map_err(usage)?;
    }
    if let Some(p) = a.triangulate {
        let pattern = match p {
            PatternArg::Diagonal => TriangulationPattern::Diagonal,
            PatternArg::Alternating => TriangulationPattern::Alternating,
        };
        mesh = triangulate(&mesh, pattern).map_err(usage)?;
    }
    match &a.out {
        Some(path) => {
            meshio::write_mesh(&mesh, path)?;
            println!("wrote {} cells, {} vertices to {}", mesh.n_cells(), mesh.n_vertices(), path.display());
        }
        None => print!("{}", meshio::format_mesh(&mesh)),
    }
    Ok(0)
}

fn load(path: &Path) -> Result<(Mesh, fvgrad_core::mesh::MeshMetrics)> {
    let mesh = meshio::read_mesh(path)?;
    let metrics = compute_metrics(&mesh)?;
    Ok((mesh, metrics))
}

fn validate(path: &Path, tol: f64) -> Result<u8> {
    let (mesh, g) = load(path)?;
    let ids = validate_identities(&g, tol);
    let q = quality_report(&g);
    println!("cells {}  faces {}  boundary faces {}", mesh.n_cells(), mesh.n_faces(), mesh.n_boundary_faces());
    println!("total area {}  h {:e}", g.total_volume, g.h());
    let m = ids.max;
    print!("max identity residual {:e}", ids.max_residual());
    if let Some(c) = ids.worst_cell() {
        print!(" (cell {c})");
    }
    println!();
    println!("  xx {:e}  xy {:e}  yx {:e}  yy {:e}  closure {:e}", m.xx, m.xy, m.yx, m.yy, m.closure);
    println!(
        "non-orthogonality max {:.4} deg  mean {:.4} deg",
        q.max_non_orthogonality.to_degrees(),
        q.mean_non_orthogonality.to_degrees()
    );
    println!("skewness max {:.4}  mean {:.4}", q.max_skewness, q.mean_skewness);
    println!("aspect ratio max {:.4}", q.aspect_ratio.iter().copied().fold(1.0, f64::max));
    if ids.passed {
        println!("PASS (tol {tol:e})");
        Ok(0)
    } else {
        println!("FAIL (tol {tol:e})");
        Ok(1)
    }
}

fn reconstruct(a: ReconstructArgs) -> Result<u8> {
    let spec: SchemeSpec = a.scheme.parse().map_err(usage)?;
    let field: ManufacturedField = a.field.parse().map_err(usage)?;
    let params = SolverParams { tol: a.tol, max_iter: a.max_iter, relax: a.relax };
    let (_, g) = load(&a.mesh)?;
    let grad = Reconstructor::new(&g, &spec)?.run(&sample(&field, &g), params)?;
    let exact = exact_gradients(&field, &g);
    let norms = error_norms(&grad, &exact, &g)?;

    if let Some(path) = &a.out {
        let file = std::fs::File::create(path).map_err(|e| AppError::io(path, e))?;
        let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
        w.write_record(["cell", "x", "y", "grad_x", "grad_y", "exact_x", "exact_y"])?;
        for (c, ((v, e), cm)) in grad.gradients.iter().zip(&exact.gradients).zip(&g.cells).enumerate() {
            let row = [cm.centroid.x, cm.centroid.y, v.x, v.y, e.x, e.y].map(|x| x.to_string());
            w.write_record(std::iter::once(c.to_string()).chain(row))?;
        }
        w.flush().map_err(|e| AppError::io(path, e))?;
    }

    let d = grad.diagnostics;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "scheme    {spec}");
    let _ = writeln!(out, "field     {field}");
    let _ = writeln!(out, "cells     {}", g.n_cells());
    let _ = writeln!(out, "h         {:e}", g.h());
    let _ = writeln!(out, "iters     {}", d.iterations);
    let _ = writeln!(out, "residual  {:e}", d.residual);
    let _ = writeln!(out, "status    {}", if d.converged { "ok" } else { "not-converged" });
    let _ = writeln!(out, "L1        {:e}", norms.combined.l1);
    let _ = writeln!(out, "L2        {:e}", norms.combined.l2);
    let _ = writeln!(out, "Linf      {:e}", norms.combined.linf);
    Ok(if d.converged { 0 } else { 1 })
}

fn run_study(path: &Path, out: Option<PathBuf>) -> Result<u8> {
    let config = StudyConfig::load(path)?;
    let reports = study::run_study(&config)?;
    for r in &reports {
        let failed = r.levels.iter().filter(|l| l.status != fvgrad_core::verify::LevelStatus::Ok).count();
        let order = r.finest_order().map(|o| o.to_string()).unwrap_or_else(|| "-".into());
        eprintln!("{:<36} {:<16} order_L2 {order:<10} {failed} level(s) not ok", r.scheme, r.field);
    }
    match out.or(config.output) {
        Some(p) if p.as_os_str() != "-" => {
            let file = std::fs::File::create(&p).map_err(|e| AppError::io(&p, e))?;
            report::write_csv(&reports, std::io::BufWriter::new(file))?;
            eprintln!("wrote {}", p.display());
        }
        _ => report::write_csv(&reports, std::io::stdout().lock())?,
    }
    Ok(0)
}

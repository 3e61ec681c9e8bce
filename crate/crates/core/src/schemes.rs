//! Gradient schemes as geometric-vector-pair configurations.
//!
//! | scheme | neighbourhood        | a                | b                |
//! |--------|----------------------|------------------|------------------|
//! | GG     | face centroids       | S_f              | x_f − x_i        |
//! | MGG    | face centroids       | x_f − x_i        | S_f              |
//! | LSQ    | neighbour centroids  | w (x_j − x_i)    | w (x_j − x_i)    |
//! | FLSQ   | face centroids       | S_f              | n_f              |
//! | TG     | join ∩ face          | w S_f            | w (x_j − x_i)    |
//!
//! Every element is tied to one face of the cell. Across a boundary face the
//! neighbour is the owner centroid mirrored in the face, carrying the exact field
//! value there (see [`crate::fields::BoundarySample::ghost_value`]); its gradient
//! is taken to be the owner's.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::fields::FieldSamples;
use crate::geom::{Point2, Vec2};
use crate::gradcore::{
    assemble_stencils, reconstruct_explicit, solve_implicit, CellStencil, DirectionalSample, GradientField, PairRule,
    SampleKind, SolveDiagnostics, SolverParams, StencilElement,
};
use crate::mesh::{FaceView, MeshMetrics};
use crate::{Error, Result};

/// How a Green-Gauss face value is interpolated from the two adjacent cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceInterpolation {
    /// `½(φ_i + φ_j)`
    ArithmeticMean,
    /// Weights `1/|x_f − x_i|` and `1/|x_f − x_j|`.
    InverseDistance,
    /// Arithmetic mean moved from the centroid midpoint to the face centroid with
    /// the averaged gradient of the previous iterate. Exact for linear fields.
    SkewCorrected,
}

/// Element weights `w = |x_j − x_i|^(−q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightRule {
    Unweighted,
    InverseDistance { exponent: f64 },
}

impl WeightRule {
    pub fn weight(&self, distance: f64) -> f64 {
        match *self {
            WeightRule::Unweighted => 1.0,
            WeightRule::InverseDistance { exponent } => libm::pow(distance, -exponent),
        }
    }
}

/// Split parameter of the Zwart / flexible directional derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaMode {
    Constant(f64),
    /// `α = n_f · r_f` per face.
    NormalDotJoin,
}

impl AlphaMode {
    fn value(&self, v: &FaceView) -> f64 {
        match *self {
            AlphaMode::Constant(a) => a,
            AlphaMode::NormalDotJoin => v.normal.dot(v.join_unit),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlexibleParams {
    pub alpha: AlphaMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlexMode {
    /// Gradient average taken from a completed base-scheme reconstruction.
    TwoStep,
    /// Gradient average taken from the iterate; solved to a fixed point.
    Implicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Explicit,
    Implicit,
    TwoStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighborhood {
    FaceCenters,
    NeighborCellCenters,
    JoinFaceIntersections,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchemeKind {
    GreenGauss(FaceInterpolation),
    ModifiedGreenGauss(AlphaMode),
    LeastSquares(WeightRule),
    FaceLeastSquares(AlphaMode),
    TaylorGauss(WeightRule),
    Flexible { base: Box<SchemeSpec>, params: FlexibleParams, mode: FlexMode },
}

/// A named gradient scheme: neighbourhood, pair rule, sample rule and mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    kind: SchemeKind,
}

pub fn make_green_gauss(interp: FaceInterpolation) -> SchemeSpec {
    SchemeSpec { kind: SchemeKind::GreenGauss(interp) }
}

pub fn make_mgg(alpha: AlphaMode) -> SchemeSpec {
    SchemeSpec { kind: SchemeKind::ModifiedGreenGauss(alpha) }
}

pub fn make_lsq(weights: WeightRule) -> SchemeSpec {
    SchemeSpec { kind: SchemeKind::LeastSquares(weights) }
}

pub fn make_flsq() -> SchemeSpec {
    SchemeSpec { kind: SchemeKind::FaceLeastSquares(AlphaMode::NormalDotJoin) }
}

pub fn make_tg(weights: WeightRule) -> SchemeSpec {
    SchemeSpec { kind: SchemeKind::TaylorGauss(weights) }
}

/// α-damped variant of `base`. Nesting flexible schemes is not supported.
pub fn make_flexible(base: SchemeSpec, params: FlexibleParams, mode: FlexMode) -> Result<SchemeSpec> {
    if let SchemeKind::Flexible { .. } = base.kind {
        return Err(Error::UnsupportedScheme(format!("flexible base `{base}` is itself flexible")));
    }
    if let AlphaMode::Constant(a) = params.alpha {
        if !a.is_finite() {
            return Err(Error::InvalidArgument(format!("alpha {a} is not finite")));
        }
    }
    Ok(SchemeSpec { kind: SchemeKind::Flexible { base: Box::new(base), params, mode } })
}

impl SchemeSpec {
    pub fn kind(&self) -> &SchemeKind {
        &self.kind
    }

    pub fn mode(&self) -> Mode {
        match &self.kind {
            SchemeKind::GreenGauss(FaceInterpolation::SkewCorrected) => Mode::Implicit,
            SchemeKind::GreenGauss(_) | SchemeKind::LeastSquares(_) | SchemeKind::TaylorGauss(_) => Mode::Explicit,
            SchemeKind::ModifiedGreenGauss(_) | SchemeKind::FaceLeastSquares(_) => Mode::Implicit,
            SchemeKind::Flexible { mode: FlexMode::TwoStep, .. } => Mode::TwoStep,
            SchemeKind::Flexible { mode: FlexMode::Implicit, .. } => Mode::Implicit,
        }
    }

    pub fn neighborhood(&self) -> Neighborhood {
        match &self.kind {
            SchemeKind::GreenGauss(_) | SchemeKind::ModifiedGreenGauss(_) | SchemeKind::FaceLeastSquares(_) => {
                Neighborhood::FaceCenters
            }
            SchemeKind::LeastSquares(_) => Neighborhood::NeighborCellCenters,
            SchemeKind::TaylorGauss(_) => Neighborhood::JoinFaceIntersections,
            SchemeKind::Flexible { base, .. } => base.neighborhood(),
        }
    }

    /// The scheme id, e.g. `wlsq:q=2` or `flex:tg:alpha=0.5:two-step`.
    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl PairRule for SchemeSpec {
    fn elements(&self, metrics: &MeshMetrics, cell: usize, out: &mut Vec<StencilElement>) {
        let xi = metrics.cells[cell].centroid;
        for v in metrics.views(cell) {
            let to_face = v.centroid - xi;
            let (anchor, a, b) = match &self.kind {
                SchemeKind::GreenGauss(_) => (v.centroid, v.area_vector, to_face),
                SchemeKind::ModifiedGreenGauss(_) => (v.centroid, to_face, v.area_vector),
                SchemeKind::LeastSquares(w) => {
                    let d = v.join * w.weight(v.distance);
                    (v.far_point, d, d)
                }
                SchemeKind::FaceLeastSquares(_) => (v.centroid, v.area_vector, v.normal),
                SchemeKind::TaylorGauss(w) => {
                    let w = w.weight(v.distance);
                    (join_face_intersection(xi, &v), v.area_vector * w, v.join * w)
                }
                SchemeKind::Flexible { base, .. } => {
                    let start = out.len();
                    base.elements(metrics, cell, out);
                    debug_assert_eq!(out.len() - start, metrics.cell_faces[cell].len());
                    return;
                }
            };
            out.push(StencilElement { anchor, a, b, face: v.face, far_cell: v.far_cell });
        }
    }
}

/// Where the line from `xi` along the centroid join meets the face line.
fn join_face_intersection(xi: Point2, v: &FaceView) -> Point2 {
    let across = v.join.dot(v.normal);
    if across > 0.0 {
        xi + v.join * ((v.centroid - xi).dot(v.normal) / across)
    } else {
        v.centroid
    }
}

/// `b · ∇φ ≈ α|b| (φ_j − φ_i)/|x_j − x_i| + (b − α|b| r_f) · ½(∇φ_i + ∇φ_j)`.
///
/// The first term is the compact two-point difference along the centroid join,
/// the second covers the rest of `b` with the averaged gradient.
#[allow(clippy::too_many_arguments)]
pub fn split_directional_derivative(
    b: Vec2,
    alpha: f64,
    phi_i: f64,
    phi_j: f64,
    grad_i: Vec2,
    grad_j: Vec2,
    join_unit: Vec2,
    distance: f64,
) -> f64 {
    let bn = b.norm();
    let avg = (grad_i + grad_j) * 0.5;
    alpha * bn * (phi_j - phi_i) / distance + (b - join_unit * (alpha * bn)).dot(avg)
}

/// Zwart face-normal derivative scaled by the face length, i.e. `S_f · ∇φ`:
/// `[α (φ_j − φ_i)/|x_j − x_i| + ½(∇φ_i + ∇φ_j)·(n_f − α r_f)] Δs_f`.
pub fn zwart_normal_derivative(
    phi_i: f64,
    phi_j: f64,
    grad_i: Vec2,
    grad_j: Vec2,
    face: &FaceView,
    alpha: f64,
) -> Result<DirectionalSample> {
    if !(face.distance > 0.0) {
        return Err(Error::DegenerateFace { face: face.face });
    }
    let value = split_directional_derivative(
        face.area_vector,
        alpha,
        phi_i,
        phi_j,
        grad_i,
        grad_j,
        face.join_unit,
        face.distance,
    );
    Ok(DirectionalSample { value, kind: SampleKind::Implicit })
}

/// Stencils and auxiliary reconstructions for one scheme on one mesh, built once
/// and reused across fields.
#[derive(Debug, Clone)]
pub struct Reconstructor<'m> {
    metrics: &'m MeshMetrics,
    spec: SchemeSpec,
    stencils: Vec<CellStencil>,
    /// Explicit GG with inverse-distance interpolation, for initial iterates.
    starter: Option<Box<Reconstructor<'m>>>,
    /// The base scheme of a flexible variant.
    base: Option<Box<Reconstructor<'m>>>,
}

impl<'m> Reconstructor<'m> {
    pub fn new(metrics: &'m MeshMetrics, spec: &SchemeSpec) -> Result<Self> {
        let stencils = assemble_stencils(metrics, spec)?;
        let (starter, base) = match &spec.kind {
            SchemeKind::Flexible { base, .. } => (None, Some(Box::new(Reconstructor::new(metrics, base)?))),
            _ if spec.mode() == Mode::Implicit => (
                Some(Box::new(Reconstructor::new(metrics, &make_green_gauss(FaceInterpolation::InverseDistance))?)),
                None,
            ),
            _ => (None, None),
        };
        Ok(Self { metrics, spec: spec.clone(), stencils, starter, base })
    }

    pub fn stencils(&self) -> &[CellStencil] {
        &self.stencils
    }

    pub fn spec(&self) -> &SchemeSpec {
        &self.spec
    }

    /// Gradients of the sampled field.
    ///
    /// Implicit schemes start from inverse-distance Green-Gauss gradients, except
    /// flexible variants, which start from their base scheme.
    pub fn run(&self, data: &FieldSamples, params: SolverParams) -> Result<GradientField> {
        if data.cell_values.len() != self.metrics.n_cells() || data.boundary.len() != self.metrics.boundary_faces.len()
        {
            return Err(Error::InvalidArgument(format!(
                "field samples for {} cells / {} boundary faces, mesh has {} / {}",
                data.cell_values.len(),
                data.boundary.len(),
                self.metrics.n_cells(),
                self.metrics.boundary_faces.len()
            )));
        }
        match &self.spec.kind {
            SchemeKind::Flexible { params: flex, mode, .. } => {
                let base = self.base.as_ref().expect("flexible base").run(data, params)?;
                let alpha = flex.alpha;
                match mode {
                    FlexMode::TwoStep => {
                        let tilde = &base.gradients;
                        let samples = self.collect(|st, k| self.flexible_sample(data, alpha, st, k, tilde));
                        let mut out = reconstruct_explicit(&self.stencils, &samples)?;
                        out.diagnostics = base.diagnostics;
                        Ok(out)
                    }
                    FlexMode::Implicit => solve_implicit(
                        &self.stencils,
                        |st, k, g| self.flexible_sample(data, alpha, st, k, g),
                        base.gradients,
                        params,
                    ),
                }
            }
            _ if self.spec.mode() == Mode::Implicit => {
                let init = self.starter.as_ref().expect("initial iterate").run(data, params)?;
                solve_implicit(&self.stencils, |st, k, g| self.implicit_sample(data, st, k, g), init.gradients, params)
            }
            _ => {
                let samples = self.collect(|st, k| self.explicit_sample(data, st, k));
                reconstruct_explicit(&self.stencils, &samples)
            }
        }
    }

    fn collect<F: Fn(&CellStencil, usize) -> f64>(&self, f: F) -> Vec<Vec<DirectionalSample>> {
        self.stencils
            .iter()
            .map(|st| (0..st.elements.len()).map(|k| DirectionalSample::explicit(f(st, k))).collect())
            .collect()
    }

    fn sides(&self, data: &FieldSamples, st: &CellStencil, k: usize) -> (FaceView, f64, f64) {
        let e = &st.elements[k];
        let v = self.metrics.view(st.cell, e.face);
        (v, data.cell_values[st.cell], data.far_value(self.metrics, e.far_cell, e.face))
    }

    fn explicit_sample(&self, data: &FieldSamples, st: &CellStencil, k: usize) -> f64 {
        let (v, phi_i, phi_j) = self.sides(data, st, k);
        match &self.spec.kind {
            SchemeKind::GreenGauss(FaceInterpolation::ArithmeticMean) => 0.5 * (phi_j - phi_i),
            SchemeKind::GreenGauss(FaceInterpolation::InverseDistance) => {
                let wi = 1.0 / v.centroid.distance(self.metrics.cells[st.cell].centroid);
                let wj = 1.0 / v.centroid.distance(v.far_point);
                (wi * phi_i + wj * phi_j) / (wi + wj) - phi_i
            }
            SchemeKind::LeastSquares(w) | SchemeKind::TaylorGauss(w) => w.weight(v.distance) * (phi_j - phi_i),
            _ => unreachable!("explicit sample requested for {}", self.spec),
        }
    }

    fn implicit_sample(&self, data: &FieldSamples, st: &CellStencil, k: usize, grads: &[Vec2]) -> f64 {
        let (v, phi_i, phi_j) = self.sides(data, st, k);
        let gi = grads[st.cell];
        let gj = st.elements[k].far_cell.map_or(gi, |j| grads[j]);
        match &self.spec.kind {
            SchemeKind::GreenGauss(FaceInterpolation::SkewCorrected) => {
                let xi = self.metrics.cells[st.cell].centroid;
                let offset = v.centroid - xi.midpoint(v.far_point);
                0.5 * (phi_i + phi_j) + (gi + gj).dot(offset) * 0.5 - phi_i
            }
            SchemeKind::ModifiedGreenGauss(alpha) => {
                let a = alpha.value(&v);
                split_directional_derivative(v.area_vector, a, phi_i, phi_j, gi, gj, v.join_unit, v.distance)
            }
            SchemeKind::FaceLeastSquares(alpha) => {
                let a = alpha.value(&v);
                split_directional_derivative(v.normal, a, phi_i, phi_j, gi, gj, v.join_unit, v.distance)
            }
            _ => unreachable!("implicit sample requested for {}", self.spec),
        }
    }

    fn flexible_sample(
        &self,
        data: &FieldSamples,
        alpha: AlphaMode,
        st: &CellStencil,
        k: usize,
        grads: &[Vec2],
    ) -> f64 {
        let (v, phi_i, phi_j) = self.sides(data, st, k);
        let gi = grads[st.cell];
        let gj = st.elements[k].far_cell.map_or(gi, |j| grads[j]);
        split_directional_derivative(st.elements[k].b, alpha.value(&v), phi_i, phi_j, gi, gj, v.join_unit, v.distance)
    }
}

/// One-shot reconstruction; see [`Reconstructor`] to reuse stencils.
pub fn reconstruct(
    metrics: &MeshMetrics,
    spec: &SchemeSpec,
    data: &FieldSamples,
    params: SolverParams,
) -> Result<GradientField> {
    Reconstructor::new(metrics, spec)?.run(data, params)
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SchemeKind::GreenGauss(FaceInterpolation::ArithmeticMean) => f.write_str("gg:mean"),
            SchemeKind::GreenGauss(FaceInterpolation::InverseDistance) => f.write_str("gg:idw"),
            SchemeKind::GreenGauss(FaceInterpolation::SkewCorrected) => f.write_str("gg:skew"),
            SchemeKind::ModifiedGreenGauss(AlphaMode::NormalDotJoin) => f.write_str("mgg"),
            SchemeKind::ModifiedGreenGauss(AlphaMode::Constant(a)) => write!(f, "mgg:alpha={a}"),
            SchemeKind::LeastSquares(WeightRule::Unweighted) => f.write_str("ulsq"),
            SchemeKind::LeastSquares(WeightRule::InverseDistance { exponent }) => write!(f, "wlsq:q={exponent}"),
            SchemeKind::FaceLeastSquares(AlphaMode::NormalDotJoin) => f.write_str("flsq"),
            SchemeKind::FaceLeastSquares(AlphaMode::Constant(a)) => write!(f, "flsq:alpha={a}"),
            SchemeKind::TaylorGauss(WeightRule::Unweighted) => f.write_str("tg"),
            SchemeKind::TaylorGauss(WeightRule::InverseDistance { exponent }) => write!(f, "tg:w={exponent}"),
            SchemeKind::Flexible { base, params, mode } => {
                let mode = match mode {
                    FlexMode::TwoStep => "two-step",
                    FlexMode::Implicit => "implicit",
                };
                match params.alpha {
                    AlphaMode::Constant(a) => write!(f, "flex:{base}:alpha={a}:{mode}"),
                    AlphaMode::NormalDotJoin => write!(f, "flex:{base}:alpha=ndotr:{mode}"),
                }
            }
        }
    }
}

fn parse_number(id: &str, text: &str) -> Result<f64> {
    text.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::UnknownScheme(String::from(id)))
}

fn parse_alpha(id: &str, text: &str) -> Result<AlphaMode> {
    if text == "ndotr" {
        Ok(AlphaMode::NormalDotJoin)
    } else {
        Ok(AlphaMode::Constant(parse_number(id, text)?))
    }
}

impl FromStr for SchemeSpec {
    type Err = Error;

    fn from_str(id: &str) -> Result<Self> {
        let id = id.trim();
        let unknown = || Error::UnknownScheme(String::from(id));
        if let Some(rest) = id.strip_prefix("flex:") {
            let mut parts = rest.rsplitn(3, ':');
            let (mode, alpha, base) = match (parts.next(), parts.next(), parts.next()) {
                (Some(m), Some(a), Some(b)) => (m, a, b),
                _ => return Err(unknown()),
            };
            let mode = match mode {
                "two-step" => FlexMode::TwoStep,
                "implicit" => FlexMode::Implicit,
                _ => return Err(unknown()),
            };
            let alpha = parse_alpha(id, alpha.strip_prefix("alpha=").ok_or_else(unknown)?)?;
            let base: SchemeSpec = base.parse().map_err(|e| match e {
                Error::UnknownScheme(_) => unknown(),
                other => other,
            })?;
            return make_flexible(base, FlexibleParams { alpha }, mode);
        }
        Ok(match id {
            "gg:mean" => make_green_gauss(FaceInterpolation::ArithmeticMean),
            "gg:idw" => make_green_gauss(FaceInterpolation::InverseDistance),
            "gg:skew" => make_green_gauss(FaceInterpolation::SkewCorrected),
            "mgg" => make_mgg(AlphaMode::NormalDotJoin),
            "ulsq" => make_lsq(WeightRule::Unweighted),
            "flsq" => make_flsq(),
            "tg" => make_tg(WeightRule::Unweighted),
            _ => {
                if let Some(q) = id.strip_prefix("wlsq:q=") {
                    make_lsq(WeightRule::InverseDistance { exponent: parse_number(id, q)? })
                } else if let Some(q) = id.strip_prefix("tg:w=") {
                    make_tg(WeightRule::InverseDistance { exponent: parse_number(id, q)? })
                } else if let Some(a) = id.strip_prefix("mgg:alpha=") {
                    make_mgg(parse_alpha(id, a)?)
                } else if let Some(a) = id.strip_prefix("flsq:alpha=") {
                    SchemeSpec { kind: SchemeKind::FaceLeastSquares(parse_alpha(id, a)?) }
                } else {
                    return Err(unknown());
                }
            }
        })
    }
}

/// Diagnostics of explicit schemes, for callers that tabulate every scheme alike.
pub const EXPLICIT_DIAGNOSTICS: SolveDiagnostics = SolveDiagnostics::EXPLICIT;

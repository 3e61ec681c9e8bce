//! Dyadic-sum gradient reconstruction.
//!
//! Every scheme picks, for each cell, a set of stencil elements carrying a pair of
//! geometric vectors `(a, b)`. The dyadic sum `P = Σ a ⊗ b` is inverted once per
//! cell, and a gradient is recovered from directional derivatives `b · ∇φ` as
//!
//! ```text
//! ∇φ_i = P⁻¹ Σ a (b · ∇φ)
//! ```
//!
//! Samples of `b · ∇φ` are either explicit (built from cell values) or implicit
//! (depend on the gradient field itself); the latter are solved by Jacobi
//! fixed-point iteration in [`solve_implicit`].

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::geom::{Point2, Tensor2, Vec2};
use crate::mesh::MeshMetrics;
use crate::{Error, Result};

/// One neighbourhood point of a cell with its geometric vector pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilElement {
    pub anchor: Point2,
    pub a: Vec2,
    pub b: Vec2,
    /// Face of the cell this element is associated with.
    pub face: usize,
    /// Cell across that face, `None` on the boundary.
    pub far_cell: Option<usize>,
}

/// Produces the stencil elements of a cell from mesh metrics alone.
pub trait PairRule {
    fn elements(&self, metrics: &MeshMetrics, cell: usize, out: &mut Vec<StencilElement>);
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellStencil {
    pub cell: usize,
    pub elements: Vec<StencilElement>,
    /// `Σ a ⊗ b`.
    pub dyadic_sum: Tensor2,
    pub inverse: Tensor2,
    /// `‖P‖_F ‖P⁻¹‖_F`.
    pub condition: f64,
}

impl CellStencil {
    pub fn new(cell: usize, elements: Vec<StencilElement>) -> Result<Self> {
        let dyadic_sum = elements.iter().fold(Tensor2::ZERO, |p, e| p + Tensor2::dyad(e.a, e.b));
        let inverse = dyadic_sum.inverse().map_err(|e| match e {
            Error::SingularTensor { det, scale } => Error::SingularStencil { cell, det, scale },
            other => other,
        })?;
        let condition = dyadic_sum.frobenius() * inverse.frobenius();
        Ok(Self { cell, elements, dyadic_sum, inverse, condition })
    }

    /// `P⁻¹ Σ a_k s_k` for directional-derivative values `s_k`, one per element.
    pub fn reconstruct<I: IntoIterator<Item = f64>>(&self, samples: I) -> Vec2 {
        let sum = self.elements.iter().zip(samples).fold(Vec2::ZERO, |acc, (e, s)| acc + e.a * s);
        self.inverse.apply(sum)
    }
}

/// One stencil per cell, with the dyadic sum inverted and cached.
pub fn assemble_stencils<R: PairRule + ?Sized>(metrics: &MeshMetrics, rule: &R) -> Result<Vec<CellStencil>> {
    let mut out = Vec::with_capacity(metrics.n_cells());
    for cell in 0..metrics.n_cells() {
        let mut elements = Vec::new();
        rule.elements(metrics, cell, &mut elements);
        out.push(CellStencil::new(cell, elements)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    /// Built from scalar values only.
    Explicit,
    /// Depends on a gradient iterate.
    Implicit,
}

/// A value of `b · ∇φ` at a stencil anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalSample {
    pub value: f64,
    pub kind: SampleKind,
}

impl DirectionalSample {
    pub const fn explicit(value: f64) -> Self {
        Self { value, kind: SampleKind::Explicit }
    }
}

/// Two-point difference along `b`: with `φ1 = φ(x + δ1 b)` and `φ2 = φ(x + δ2 b)`,
/// `b · ∇φ ≈ (φ2 − φ1) / (δ2 − δ1)`.
pub fn two_point_directional_derivative(phi1: f64, phi2: f64, delta1: f64, delta2: f64) -> Result<DirectionalSample> {
    if delta1 == delta2 || !(delta2 - delta1).is_finite() {
        return Err(Error::InvalidArgument(format!("two-point offsets must differ, got {delta1} and {delta2}")));
    }
    Ok(DirectionalSample::explicit((phi2 - phi1) / (delta2 - delta1)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveDiagnostics {
    pub iterations: usize,
    /// Last max-cell relative change; zero for explicit reconstruction.
    pub residual: f64,
    pub converged: bool,
}

impl SolveDiagnostics {
    pub const EXPLICIT: SolveDiagnostics = SolveDiagnostics { iterations: 0, residual: 0.0, converged: true };
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub gradients: Vec<Vec2>,
    pub diagnostics: SolveDiagnostics,
}

impl GradientField {
    pub fn explicit(gradients: Vec<Vec2>) -> Self {
        Self { gradients, diagnostics: SolveDiagnostics::EXPLICIT }
    }

    pub fn len(&self) -> usize {
        self.gradients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gradients.is_empty()
    }

    /// Largest `|g_i − h_i|` over cells.
    pub fn max_difference(&self, other: &GradientField) -> f64 {
        self.gradients.iter().zip(&other.gradients).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max)
    }
}

/// `∇φ_i = P⁻¹ Σ a_f s_f` for every cell.
pub fn reconstruct_explicit(stencils: &[CellStencil], samples: &[Vec<DirectionalSample>]) -> Result<GradientField> {
    if stencils.len() != samples.len() {
        return Err(Error::InvalidArgument(format!(
            "{} stencils but samples for {} cells",
            stencils.len(),
            samples.len()
        )));
    }
    let mut gradients = Vec::with_capacity(stencils.len());
    for (st, s) in stencils.iter().zip(samples) {
        if s.len() != st.elements.len() {
            return Err(Error::InvalidArgument(format!(
                "cell {}: {} elements but {} samples",
                st.cell,
                st.elements.len(),
                s.len()
            )));
        }
        if s.iter().any(|x| x.kind != SampleKind::Explicit) {
            return Err(Error::InvalidArgument(format!(
                "cell {}: implicit sample in explicit reconstruction",
                st.cell
            )));
        }
        gradients.push(st.reconstruct(s.iter().map(|x| x.value)));
    }
    Ok(GradientField::explicit(gradients))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    /// Stop once the max-cell change relative to the largest gradient drops to this.
    pub tol: f64,
    pub max_iter: usize,
    /// Under-relaxation factor in `(0, 1]`.
    pub relax: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 200, relax: 1.0 }
    }
}

/// Jacobi fixed-point iteration for schemes whose samples depend on the gradient.
///
/// `sample(stencil, k, iterate)` returns `b · ∇φ` for element `k` of `stencil`
/// given the previous iterate. Each sweep reads only iterate `k` and writes
/// iterate `k + 1`, so the result does not depend on cell ordering.
///
/// Running out of iterations is not an error: the field comes back with
/// `converged == false`. A non-finite iterate is.
pub fn solve_implicit<F>(
    stencils: &[CellStencil],
    sample: F,
    initial: Vec<Vec2>,
    params: SolverParams,
) -> Result<GradientField>
where
    F: Fn(&CellStencil, usize, &[Vec2]) -> f64,
{
    if initial.len() != stencils.len() {
        return Err(Error::InvalidArgument(format!(
            "initial iterate has {} cells, stencils {}",
            initial.len(),
            stencils.len()
        )));
    }
    if !(params.relax > 0.0 && params.relax <= 1.0) {
        return Err(Error::InvalidArgument(format!("relaxation {} outside (0, 1]", params.relax)));
    }
    if params.tol.is_nan() || params.tol < 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance {} must be non-negative", params.tol)));
    }

    let mut current = initial;
    let mut next = vec![Vec2::ZERO; current.len()];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while !(residual <= params.tol) && iterations < params.max_iter {
        iterations += 1;
        let (mut change, mut scale) = (0.0_f64, 0.0_f64);
        for (st, slot) in stencils.iter().zip(next.iter_mut()) {
            let fresh = st.reconstruct((0..st.elements.len()).map(|k| sample(st, k, &current)));
            let old = current[st.cell];
            let g = old + (fresh - old) * params.relax;
            if !g.is_finite() {
                return Err(Error::Divergence { iteration: iterations, cell: st.cell });
            }
            change = change.max((g - old).norm());
            scale = scale.max(g.norm());
            *slot = g;
        }
        residual = if scale > 0.0 { change / scale } else { change };
        core::mem::swap(&mut current, &mut next);
    }
    Ok(GradientField {
        gradients: current,
        diagnostics: SolveDiagnostics { iterations, residual, converged: residual <= params.tol },
    })
}

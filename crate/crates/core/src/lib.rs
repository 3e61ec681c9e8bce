//! Cell-centred finite-volume gradient reconstruction on 2D polygonal meshes.
//!
//! Every scheme is a choice of geometric vector pairs `(a_f, b_f)` per stencil
//! element. The gradient of cell `i` is
//!
//! ```text
//! ∇φ_i = P⁻¹ Σ_f a_f (b_f · ∇φ)_f,    P = Σ_f a_f ⊗ b_f
//! ```
//!
//! where `(b_f · ∇φ)_f` is a directional-derivative sample built from cell values
//! (explicit schemes) or cell values and the gradient iterate (implicit schemes).
//!
//! ```
//! use fvgrad_core::fields::{sample, ManufacturedField};
//! use fvgrad_core::gradcore::SolverParams;
//! use fvgrad_core::mesh::{build_cartesian, compute_metrics, perturb};
//! use fvgrad_core::schemes::{reconstruct, SchemeSpec};
//!
//! let mesh = perturb(&build_cartesian(8, 8, (0.0, 1.0), (0.0, 1.0))?, 0.3, 7)?;
//! let metrics = compute_metrics(&mesh)?;
//! let field = ManufacturedField::Linear { c0: 1.0, c1: 2.0, c2: 3.0 };
//! let scheme: SchemeSpec = "wlsq:q=1".parse()?;
//! let grad = reconstruct(&metrics, &scheme, &sample(&field, &metrics), SolverParams::default())?;
//! assert!(grad.gradients.iter().all(|g| (g.x - 2.0).abs() < 1e-11 && (g.y - 3.0).abs() < 1e-11));
//! # Ok::<(), fvgrad_core::Error>(())
//! ```
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod fields;
pub mod geom;
pub mod gradcore;
pub mod mesh;
pub mod schemes;
pub mod verify;

pub use error::{Error, Result};

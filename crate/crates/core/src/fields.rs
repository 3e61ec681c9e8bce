//! Manufactured scalar fields with analytic gradients.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::geom::{Point2, Vec2};
use crate::gradcore::GradientField;
use crate::mesh::MeshMetrics;
use crate::{Error, Result};

/// A smooth scalar field defined on the whole plane.
pub trait ScalarField {
    fn value(&self, p: Point2) -> f64;
    fn gradient(&self, p: Point2) -> Vec2;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ManufacturedField {
    /// `c0 + c1·x + c2·y`
    Linear { c0: f64, c1: f64, c2: f64 },
    /// `x² + x·y + y²`
    Quadratic,
    /// `sin(2πx)·sin(2πy)`
    Trig,
    /// `exp(x + 2y)`
    Exponential,
}

impl ScalarField for ManufacturedField {
    fn value(&self, p: Point2) -> f64 {
        let Point2 { x, y } = p;
        match *self {
            Self::Linear { c0, c1, c2 } => c0 + c1 * x + c2 * y,
            Self::Quadratic => x * x + x * y + y * y,
            Self::Trig => libm::sin(2.0 * PI * x) * libm::sin(2.0 * PI * y),
            Self::Exponential => libm::exp(x + 2.0 * y),
        }
    }

    fn gradient(&self, p: Point2) -> Vec2 {
        let Point2 { x, y } = p;
        match *self {
            Self::Linear { c1, c2, .. } => Vec2::new(c1, c2),
            Self::Quadratic => Vec2::new(2.0 * x + y, x + 2.0 * y),
            Self::Trig => {
                let (sx, cx) = (libm::sin(2.0 * PI * x), libm::cos(2.0 * PI * x));
                let (sy, cy) = (libm::sin(2.0 * PI * y), libm::cos(2.0 * PI * y));
                Vec2::new(2.0 * PI * cx * sy, 2.0 * PI * sx * cy)
            }
            Self::Exponential => {
                let e = libm::exp(x + 2.0 * y);
                Vec2::new(e, 2.0 * e)
            }
        }
    }
}

impl ManufacturedField {
    pub const CATALOG: [ManufacturedField; 4] = [
        ManufacturedField::Linear { c0: 1.0, c1: 2.0, c2: 3.0 },
        ManufacturedField::Quadratic,
        ManufacturedField::Trig,
        ManufacturedField::Exponential,
    ];
}

impl fmt::Display for ManufacturedField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear { c0, c1, c2 } => write!(f, "linear:{c0},{c1},{c2}"),
            Self::Quadratic => f.write_str("quadratic"),
            Self::Trig => f.write_str("trig"),
            Self::Exponential => f.write_str("exp"),
        }
    }
}

impl FromStr for ManufacturedField {
    type Err = Error;

    /// `linear:c0,c1,c2 | quadratic | trig | exp`
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "quadratic" => return Ok(Self::Quadratic),
            "trig" => return Ok(Self::Trig),
            "exp" => return Ok(Self::Exponential),
            _ => {}
        }
        let coeffs = s.strip_prefix("linear:").ok_or_else(|| Error::UnknownField(String::from(s)))?;
        let c: Vec<f64> = coeffs
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<core::result::Result<_, _>>()
            .map_err(|_| Error::UnknownField(String::from(s)))?;
        match c[..] {
            [c0, c1, c2] if c.iter().all(|v| v.is_finite()) => Ok(Self::Linear { c0, c1, c2 }),
            _ => Err(Error::UnknownField(format!("{s} (linear needs three finite coefficients)"))),
        }
    }
}

/// Exact data on one boundary face, normal taken outward from the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub face: usize,
    /// φ at the face centroid.
    pub value: f64,
    /// ∂φ/∂n at the face centroid.
    pub normal_derivative: f64,
    /// φ at the mirrored owner centroid (`FaceMetrics::far_point`).
    pub ghost_value: f64,
}

/// Pointwise values at cell centroids plus exact boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSamples {
    pub cell_values: Vec<f64>,
    /// Parallel to `MeshMetrics::boundary_faces`.
    pub boundary: Vec<BoundarySample>,
}

impl FieldSamples {
    /// Value on the far side of `face` seen from `cell`: the other cell's value,
    /// or the ghost value on the boundary.
    pub fn far_value(&self, metrics: &MeshMetrics, far_cell: Option<usize>, face: usize) -> f64 {
        match far_cell {
            Some(j) => self.cell_values[j],
            None => self.boundary[metrics.boundary_slot[face].expect("boundary face")].ghost_value,
        }
    }
}

pub fn sample<F: ScalarField + ?Sized>(field: &F, metrics: &MeshMetrics) -> FieldSamples {
    let cell_values = metrics.cells.iter().map(|c| field.value(c.centroid)).collect();
    let boundary = metrics
        .boundary_faces
        .iter()
        .map(|&f| {
            let fm = &metrics.faces[f];
            BoundarySample {
                face: f,
                value: field.value(fm.centroid),
                normal_derivative: field.gradient(fm.centroid).dot(fm.normal),
                ghost_value: field.value(fm.far_point),
            }
        })
        .collect();
    FieldSamples { cell_values, boundary }
}

/// Analytic gradients at the cell centroids.
pub fn exact_gradients<F: ScalarField + ?Sized>(field: &F, metrics: &MeshMetrics) -> GradientField {
    GradientField::explicit(metrics.cells.iter().map(|c| field.gradient(c.centroid)).collect())
}

//! Planar points, vectors and 2×2 tensors.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::{Error, Result};

/// Relative determinant threshold below which a 2×2 tensor is treated as singular.
pub const SINGULAR_DET_RATIO: f64 = 1e-13;

/// A position in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

/// A displacement, normal, gradient or any other planar vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn distance(self, other: Point2) -> f64 {
        (other - self).norm()
    }

    /// The point as a vector from the origin.
    pub fn to_vec(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    /// Rotation by −90°: for an edge traversed counterclockwise around a cell this
    /// points out of the cell.
    pub fn rot_cw(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, rhs: Vec2) -> Vec2 {
        rhs * self
    }
}

impl Sub for Point2 {
    type Output = Vec2;
    fn sub(self, rhs: Point2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Add<Vec2> for Point2 {
    type Output = Point2;
    fn add(self, rhs: Vec2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

/// Second-order tensor in the plane, stored row-major.
///
/// `xy` is the entry in row x, column y, so `dyad(a, b).xy == a.x * b.y`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tensor2 {
    pub xx: f64,
    pub xy: f64,
    pub yx: f64,
    pub yy: f64,
}

impl Tensor2 {
    pub const ZERO: Tensor2 = Tensor2 { xx: 0.0, xy: 0.0, yx: 0.0, yy: 0.0 };
    pub const IDENTITY: Tensor2 = Tensor2 { xx: 1.0, xy: 0.0, yx: 0.0, yy: 1.0 };

    pub const fn new(xx: f64, xy: f64, yx: f64, yy: f64) -> Self {
        Self { xx, xy, yx, yy }
    }

    /// The dyadic product `a ⊗ b`, acting on `u` as `a (b · u)`.
    pub fn dyad(a: Vec2, b: Vec2) -> Self {
        Self::new(a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y)
    }

    pub fn diagonal(d: f64) -> Self {
        Self::new(d, 0.0, 0.0, d)
    }

    pub fn transpose(self) -> Self {
        Self::new(self.xx, self.yx, self.xy, self.yy)
    }

    pub fn det(self) -> f64 {
        self.xx * self.yy - self.xy * self.yx
    }

    pub fn scale(self, c: f64) -> Self {
        Self::new(self.xx * c, self.xy * c, self.yx * c, self.yy * c)
    }

    pub fn apply(self, v: Vec2) -> Vec2 {
        Vec2::new(self.xx * v.x + self.xy * v.y, self.yx * v.x + self.yy * v.y)
    }

    pub fn matmul(self, o: Tensor2) -> Tensor2 {
        Tensor2::new(
            self.xx * o.xx + self.xy * o.yx,
            self.xx * o.xy + self.xy * o.yy,
            self.yx * o.xx + self.yy * o.yx,
            self.yx * o.xy + self.yy * o.yy,
        )
    }

    pub fn frobenius(self) -> f64 {
        libm::sqrt(self.xx * self.xx + self.xy * self.xy + self.yx * self.yx + self.yy * self.yy)
    }

    /// Largest absolute entry.
    pub fn max_abs(self) -> f64 {
        self.xx.abs().max(self.xy.abs()).max(self.yx.abs()).max(self.yy.abs())
    }

    /// Product of the Euclidean norms of the two rows; the reference scale for
    /// the singularity test.
    pub fn row_norm_product(self) -> f64 {
        libm::hypot(self.xx, self.xy) * libm::hypot(self.yx, self.yy)
    }

    pub fn is_finite(&self) -> bool {
        self.xx.is_finite() && self.xy.is_finite() && self.yx.is_finite() && self.yy.is_finite()
    }

    /// Adjugate-over-determinant inverse.
    ///
    /// Fails when `|det| <= 1e-13 * row_norm_product`, which also covers the zero
    /// tensor and non-finite input.
    pub fn inverse(self) -> Result<Tensor2> {
        let det = self.det();
        let scale = self.row_norm_product();
        if !(det.is_finite() && scale.is_finite()) || det.abs() <= SINGULAR_DET_RATIO * scale {
            return Err(Error::SingularTensor { det, scale });
        }
        let inv = 1.0 / det;
        Ok(Tensor2::new(self.yy * inv, -self.xy * inv, -self.yx * inv, self.xx * inv))
    }
}

impl Add for Tensor2 {
    type Output = Tensor2;
    fn add(self, o: Tensor2) -> Tensor2 {
        Tensor2::new(self.xx + o.xx, self.xy + o.xy, self.yx + o.yx, self.yy + o.yy)
    }
}

impl AddAssign for Tensor2 {
    fn add_assign(&mut self, o: Tensor2) {
        *self = *self + o;
    }
}

impl Sub for Tensor2 {
    type Output = Tensor2;
    fn sub(self, o: Tensor2) -> Tensor2 {
        Tensor2::new(self.xx - o.xx, self.xy - o.xy, self.yx - o.yx, self.yy - o.yy)
    }
}

/// Inverse of a 2×2 tensor; see [`Tensor2::inverse`].
pub fn invert_tensor2(t: Tensor2) -> Result<Tensor2> {
    t.inverse()
}

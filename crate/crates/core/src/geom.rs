//! Points, displacement vectors and the handful of planar primitives the
//! spiral constructions need.

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::SpiralError;
use crate::scalar::{lit, Real};

/// A location in the plane. `y` grows upward.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

/// A displacement between two points.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::new(T::zero(), T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: Point<T>) -> T {
        (*self - other).norm()
    }

    pub fn to_vec(self) -> Vec2<T> {
        Vec2::new(self.x, self.y)
    }

    /// Lossy conversion into `f64` coordinates.
    pub fn to_f64(self) -> Point<f64> {
        Point::new(
            self.x.to_f64().unwrap_or(f64::NAN),
            self.y.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl<T: Real> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2<T>) -> T {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Vec2<T>) -> T {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    /// Counter-clockwise quarter turn.
    pub fn rotate_ccw(self) -> Self {
        Vec2::new(-self.y, self.x)
    }

    /// Clockwise quarter turn.
    pub fn rotate_cw(self) -> Self {
        Vec2::new(self.y, -self.x)
    }

    pub fn scale(self, k: T) -> Self {
        Vec2::new(self.x * k, self.y * k)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Real> Sub for Point<T> {
    type Output = Vec2<T>;
    fn sub(self, rhs: Point<T>) -> Vec2<T> {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> Add<Vec2<T>> for Point<T> {
    type Output = Point<T>;
    fn add(self, rhs: Vec2<T>) -> Point<T> {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> Sub<Vec2<T>> for Point<T> {
    type Output = Point<T>;
    fn sub(self, rhs: Vec2<T>) -> Point<T> {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> Add for Vec2<T> {
    type Output = Vec2<T>;
    fn add(self, rhs: Vec2<T>) -> Vec2<T> {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> Sub for Vec2<T> {
    type Output = Vec2<T>;
    fn sub(self, rhs: Vec2<T>) -> Vec2<T> {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> Neg for Vec2<T> {
    type Output = Vec2<T>;
    fn neg(self) -> Vec2<T> {
        Vec2::new(-self.x, -self.y)
    }
}

impl<T: Real> Mul<T> for Vec2<T> {
    type Output = Vec2<T>;
    fn mul(self, k: T) -> Vec2<T> {
        self.scale(k)
    }
}

/// A circle given by centre and radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Circle<T> {
    pub center: Point<T>,
    pub radius: T,
}

impl<T: Real> Circle<T> {
    /// Signed distance from `p` to the circle (positive outside).
    pub fn signed_distance(&self, p: Point<T>) -> T {
        p.distance(self.center) - self.radius
    }
}

/// Slope `Δy/Δx` of the line through `a` and `b`.
pub fn slope<T: Real>(a: Point<T>, b: Point<T>) -> T {
    let d = b - a;
    d.y / d.x
}

/// Intersection of the infinite lines through `(a0, a1)` and `(b0, b1)`.
///
/// Fails with [`SpiralError::DegenerateLines`] when the direction vectors are
/// parallel to within `|det| <= 1e-300`.
pub fn line_intersection<T: Real>(
    a0: Point<T>,
    a1: Point<T>,
    b0: Point<T>,
    b1: Point<T>,
) -> Result<Point<T>, SpiralError> {
    let da = a1 - a0;
    let db = b1 - b0;
    let det = da.cross(db);
    if det.abs() <= lit(1e-300) || !det.is_finite() {
        return Err(SpiralError::DegenerateLines);
    }
    let t = (b0 - a0).cross(db) / det;
    Ok(a0 + da * t)
}

/// Axis-aligned rectangle, used for overlap and adjacency checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aabb<T> {
    pub min: Point<T>,
    pub max: Point<T>,
}

impl<T: Real> Aabb<T> {
    pub fn new(min: Point<T>, max: Point<T>) -> Self {
        Aabb { min, max }
    }

    pub fn from_points<I: IntoIterator<Item = Point<T>>>(points: I) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut bb = Aabb::new(first, first);
        for p in it {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    pub fn union(&self, other: &Aabb<T>) -> Aabb<T> {
        Aabb::new(
            Point::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            Point::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        )
    }

    pub fn width(&self) -> T {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> T {
        self.max.y - self.min.y
    }

    /// Area of the intersection with `other` (0 when disjoint or touching).
    pub fn overlap_area(&self, other: &Aabb<T>) -> T {
        let (wx, wy) = self.overlap_extents(other);
        wx.max(T::zero()) * wy.max(T::zero())
    }

    /// Signed overlap lengths along x and y; negative means a gap.
    pub fn overlap_extents(&self, other: &Aabb<T>) -> (T, T) {
        let wx = self.max.x.min(other.max.x) - self.min.x.max(other.min.x);
        let wy = self.max.y.min(other.max.y) - self.min.y.max(other.min.y);
        (wx, wy)
    }
}

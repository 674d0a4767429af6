//! Whirling-square spirals for an arbitrary growth ratio `m > 1`.
//!
//! The kernel is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the `*64` aliases below cover the common case.

pub mod diagonals;
pub mod error;
pub mod fitting;
pub mod geom;
pub mod render;
pub mod scalar;
pub mod sections;
pub mod simplex;
pub mod spiral;
pub mod tables;
pub mod verify;

pub use error::{Result, SpiralError};
pub use geom::{Aabb, Circle, Point, Vec2};
pub use scalar::Real;
pub use spiral::{Heading, Pole, PoleMethod, QuarterArc, SpiralSpec, Square};

pub type Point64 = Point<f64>;
pub type Point32 = Point<f32>;
pub type Vec64 = Vec2<f64>;
pub type SpiralSpec64 = SpiralSpec<f64>;
pub type SpiralSpec32 = SpiralSpec<f32>;
pub type Square64 = Square<f64>;
pub type Pole64 = Pole<f64>;
pub type DiagonalReport64 = diagonals::DiagonalReport<f64>;
pub type PFibResult64 = sections::PFibResult<f64>;

/// The golden ratio.
pub const PHI: f64 = 1.618_033_988_749_895;

//! Diagonals through the extreme vertices of the first four squares.
//!
//! `A` is the upper-left corner of square 0, `B` the upper-right corner of
//! square 1, `C` the lower-right corner of square 2 and `D` the lower-left
//! corner of square 3. `E` is the lower-right corner of square 0. The
//! diagonals `d1 = AC` and `d2 = BD` are perpendicular, cross at the pole and
//! have length ratio `m`.

use serde::Serialize;

use crate::error::Result;
use crate::geom::{line_intersection, slope, Point, Vec2};
use crate::scalar::Real;
use crate::spiral::{pole_closed, SpiralSpec};

/// The five named vertices in the spiral's global frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremeVertices<T> {
    pub a: Point<T>,
    pub b: Point<T>,
    pub c: Point<T>,
    pub d: Point<T>,
    pub e: Point<T>,
}

/// Offsets of A, B, C, D from E.
fn local_offsets<T: Real>(spec: &SpiralSpec<T>) -> [Vec2<T>; 4] {
    let l = spec.side();
    let m = spec.ratio();
    let l1 = l / m;
    let l2 = l1 / m;
    let l3 = l2 / m;
    let bottom = l - l1 - l2;
    [
        Vec2::new(-l, l),
        Vec2::new(l1, l),
        Vec2::new(l1, bottom),
        Vec2::new(l1 - l2 - l3, bottom),
    ]
}

pub fn extreme_vertices<T: Real>(spec: &SpiralSpec<T>) -> ExtremeVertices<T> {
    let e = spec.lower_right();
    let [a, b, c, d] = local_offsets(spec);
    ExtremeVertices {
        a: e + a,
        b: e + b,
        c: e + c,
        d: e + d,
        e,
    }
}

/// Diagonal vectors `(d1, d2)` along AC and BD, from their component formulas.
///
/// As written, `d1 = (-L - L/m, L/m + L/m²)` points from `C` to `A` and
/// `d2 = (L/m² + L/m³, L/m + L/m²)` points from `D` to `B`.
pub fn diagonal_vectors<T: Real>(spec: &SpiralSpec<T>) -> (Vec2<T>, Vec2<T>) {
    let l = spec.side();
    let m = spec.ratio();
    let l1 = l / m;
    let l2 = l1 / m;
    let l3 = l2 / m;
    (Vec2::new(-l - l1, l1 + l2), Vec2::new(l2 + l3, l1 + l2))
}

/// Crossing point of line AC with line BD.
pub fn diagonal_intersection<T: Real>(spec: &SpiralSpec<T>) -> Result<Point<T>> {
    let v = extreme_vertices(spec);
    line_intersection(v.a, v.c, v.b, v.d)
}

/// Pole direction from `E` and its perpendicular, both scaled by `L`.
///
/// `v_eye = L·(a, m·a)` and `u_eye = L·(-m·a, a)` with `a = (m-1)/(m²+1)`.
pub fn eye_vectors<T: Real>(spec: &SpiralSpec<T>) -> (Vec2<T>, Vec2<T>) {
    let m = spec.ratio();
    let a = (m - T::one()) / (m * m + T::one());
    let l = spec.side();
    (Vec2::new(l * a, l * m * a), Vec2::new(-l * m * a, l * a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalReport<T> {
    pub m: T,
    pub vertices: ExtremeVertices<T>,
    pub d1: Vec2<T>,
    pub d2: Vec2<T>,
    /// `|d1·d2| / (‖d1‖‖d2‖)`.
    pub orthogonality_residual: T,
    /// `|v_eye·u_eye| / (‖v_eye‖‖u_eye‖)`.
    pub eye_orthogonality_residual: T,
    pub intersection: Point<T>,
    /// Distance from the diagonal crossing to the closed-form pole.
    pub pole_distance: T,
    pub length_ratio: T,
    /// Slopes of AC and BD, expected `-1/m` and `m`.
    pub slopes: (T, T),
}

pub fn compute_report<T: Real>(spec: &SpiralSpec<T>) -> Result<DiagonalReport<T>> {
    let vertices = extreme_vertices(spec);
    let (d1, d2) = diagonal_vectors(spec);
    let (v_eye, u_eye) = eye_vectors(spec);
    let intersection = diagonal_intersection(spec)?;
    let pole = pole_closed(spec).point;
    Ok(DiagonalReport {
        m: spec.ratio(),
        vertices,
        d1,
        d2,
        orthogonality_residual: d1.dot(d2).abs() / (d1.norm() * d2.norm()),
        eye_orthogonality_residual: v_eye.dot(u_eye).abs() / (v_eye.norm() * u_eye.norm()),
        intersection,
        pole_distance: intersection.distance(pole),
        length_ratio: d1.norm() / d2.norm(),
        slopes: (slope(vertices.a, vertices.c), slope(vertices.b, vertices.d)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spiral::whirl_squares;
    use approx::assert_abs_diff_eq;

    const PHI: f64 = 1.618_033_988_749_895;
    const GRID: [f64; 9] = [
        1.01,
        1.1,
        1.2851990332,
        1.3247179572,
        1.4655712318,
        PHI,
        2.0,
        5.0,
        60.0,
    ];

    fn unit(m: f64) -> SpiralSpec<f64> {
        SpiralSpec::unit(m).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn vertices_at_ratio_two() {
        let s = unit(2.0);
        let v = extreme_vertices(&s);
        let e = s.lower_right();
        assert_eq!(v.e, Point::new(0.5, -0.5));
        assert_eq!(v.a - e, Vec2::new(-1.0, 1.0));
        assert_eq!(v.b - e, Vec2::new(0.5, 1.0));
        assert_eq!(v.c - e, Vec2::new(0.5, 0.25));
        assert_eq!(v.d - e, Vec2::new(0.125, 0.25));
    }

    #[test]
    fn vertices_come_from_the_squares() {
        for &m in &GRID {
            let s = SpiralSpec::new(m, 2.5, Point::new(-1.0, 3.0)).unwrap();
            let sq = whirl_squares(&s, 4).unwrap();
            let v = extreme_vertices(&s);
            assert!(v.a.distance(sq[0].vertices()[1]) < 1e-14);
            assert!(v.b.distance(sq[1].vertices()[0]) < 1e-14);
            assert!(v.c.distance(sq[2].vertices()[3]) < 1e-14);
            assert!(v.d.distance(sq[3].vertices()[2]) < 1e-14);
            assert_eq!(v.e, s.lower_right());
            assert_eq!(v.a - v.e, Vec2::new(-2.5, 2.5));
        }
    }

    #[test]
    fn diagonal_vectors_at_ratio_two() {
        let (d1, d2) = diagonal_vectors(&unit(2.0));
        assert_eq!(d1, Vec2::new(-1.5, 0.75));
        assert_eq!(d2, Vec2::new(0.375, 0.75));
        assert_eq!(d1.dot(d2), 0.0);
        assert_abs_diff_eq!(d1.norm() / d2.norm(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn diagonal_vectors_match_vertex_differences() {
        for &m in &GRID {
            let s = unit(m);
            let v = extreme_vertices(&s);
            let (d1, d2) = diagonal_vectors(&s);
            assert!(((v.a - v.c) - d1).norm() < 1e-14);
            assert!(((v.b - v.d) - d2).norm() < 1e-14);
        }
    }

    #[test]
    fn intersection_is_the_pole() {
        let p = diagonal_intersection(&unit(2.0)).unwrap();
        assert_abs_diff_eq!(p.x, 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(p.y, -0.1, epsilon = 1e-14);
        for &m in &GRID {
            let s = unit(m);
            let p = diagonal_intersection(&s).unwrap();
            assert!(p.distance(pole_closed(&s).point) < 1e-12, "m={m}");
        }
    }

    #[test]
    fn report_on_grid() {
        let r = compute_report(&unit(2.0)).unwrap();
        assert_abs_diff_eq!(r.length_ratio, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.slopes.0, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.slopes.1, 2.0, epsilon = 1e-15);
        for &m in &GRID {
            let r = compute_report(&unit(m)).unwrap();
            assert!(r.orthogonality_residual < 1e-12, "m={m}");
            assert!(r.eye_orthogonality_residual < 1e-12, "m={m}");
            assert!(r.pole_distance < 1e-12, "m={m}");
            assert!(rel(r.length_ratio, m) < 1e-12, "m={m}");
            assert!(rel(r.slopes.0, -1.0 / m) < 1e-12, "m={m}");
            assert!(rel(r.slopes.1, m) < 1e-12, "m={m}");
        }
    }

    // The scalar witnesses used when proving the diagonal properties by hand.
    #[test]
    fn proof_witnesses() {
        for &m in &GRID {
            let s = unit(m);
            let (d1, d2) = diagonal_vectors(&s);
            // Quarter turn of d2 is parallel to d1 with factor 1/m.
            let d3 = d2.rotate_ccw();
            assert!((d3 - d1.scale(1.0 / m)).norm() < 1e-14);

            let a = (m - 1.0) / (m * m + 1.0);
            let b = 1.0 - 1.0 / m - 1.0 / (m * m);
            let (v_eye, u_eye) = eye_vectors(&s);
            assert!(v_eye.dot(u_eye).abs() < 1e-15);
            assert_eq!(v_eye, Vec2::new(a, m * a));

            // Line v + t·u passes through A and C.
            let hit_a = v_eye + u_eye.scale((m + 1.0) / (m - 1.0));
            assert!((hit_a - Vec2::new(-1.0, 1.0)).norm() < 1e-10 * (1.0 + 1.0 / (m - 1.0)));
            let hit_c = v_eye + u_eye.scale((b - 1.0) / (m - 1.0));
            assert!((hit_c - Vec2::new(1.0 / m, b)).norm() < 1e-12);
            // Line t·v passes through B and D.
            let hit_b = v_eye.scale(1.0 / (m * a));
            assert!((hit_b - Vec2::new(1.0 / m, 1.0)).norm() < 1e-12);
            let hit_d = v_eye.scale(b / (m * a));
            assert!((hit_d - Vec2::new(b / m, b)).norm() < 1e-12);
        }
    }
}

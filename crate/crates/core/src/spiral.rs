//! Whirling squares: construction, square centres, the pole and the
//! quarter-arc spiral drawn through the squares.
//!
//! Frame: y grows upward. The first square has side `L` and centre
//! `(X0, Y0)`. Each following square has side shrunk by `m` and is placed
//! clockwise around its predecessor (right, down, left, up, right, ...),
//! driven by a four-state automaton.

use serde::Serialize;

use crate::error::{Result, SpiralError};
use crate::geom::{Aabb, Circle, Point, Vec2};
use crate::scalar::{alternating, count, lit, powu, Real};

/// Default cap on the number of squares a caller may request.
pub const DEFAULT_SQUARE_CAP: usize = 64;

/// Default relative tolerance for the iterative pole search.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Iteration floor for the iterative pole search.
pub const POLE_ITERATION_FLOOR: usize = 10_000;

/// Absolute ceiling for the iterative pole search, whatever the ratio.
pub const POLE_ITERATION_CEILING: usize = 50_000_000;

/// Growth ratio, first side and first centre of an m-spiral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpiralSpec<T> {
    m: T,
    side: T,
    center0: Point<T>,
}

impl<T: Real> SpiralSpec<T> {
    /// Validates `m > 1`, `side > 0` and a finite centre.
    pub fn new(m: T, side: T, center0: Point<T>) -> Result<Self> {
        if !m.is_finite() || m <= T::one() {
            return Err(SpiralError::RatioOutOfRange {
                m: m.to_f64().unwrap_or(f64::NAN),
            });
        }
        if !side.is_finite() || side <= T::zero() {
            return Err(SpiralError::BadSide {
                side: side.to_f64().unwrap_or(f64::NAN),
            });
        }
        if !center0.is_finite() {
            return Err(SpiralError::BadCenter);
        }
        Ok(SpiralSpec { m, side, center0 })
    }

    /// Unit first square centred at the origin.
    pub fn unit(m: T) -> Result<Self> {
        Self::new(m, T::one(), Point::origin())
    }

    pub fn ratio(&self) -> T {
        self.m
    }

    /// Side `L` of the first square.
    pub fn side(&self) -> T {
        self.side
    }

    pub fn center0(&self) -> Point<T> {
        self.center0
    }

    /// Upper-right vertex of the first square.
    pub fn upper_right(&self) -> Point<T> {
        let h = self.side / lit(2.0);
        Point::new(self.center0.x + h, self.center0.y + h)
    }

    /// Lower-right vertex of the first square.
    pub fn lower_right(&self) -> Point<T> {
        let h = self.side / lit(2.0);
        Point::new(self.center0.x + h, self.center0.y - h)
    }

    /// Side of square `i`, `L / m^i`.
    pub fn side_of(&self, i: usize) -> T {
        self.side / powu(self.m, i)
    }

    /// `(m - 1) / (m² + 1)`: horizontal pole offset from the right edge, per unit side.
    fn horizontal_gain(&self) -> T {
        (self.m - T::one()) / (self.m * self.m + T::one())
    }

    /// `(m + 1) / (m² + 1)`: vertical pole drop below the top edge, per unit side.
    fn vertical_gain(&self) -> T {
        (self.m + T::one()) / (self.m * self.m + T::one())
    }
}

/// Automaton state: where the next square goes relative to the current one.
///
/// The numeric labels follow the classical presentation of the automaton
/// (1 = right, 2 = down, 3 = left, 4 = up).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Heading {
    Right,
    Down,
    Left,
    Up,
}

impl Heading {
    pub fn number(self) -> u8 {
        match self {
            Heading::Right => 1,
            Heading::Down => 2,
            Heading::Left => 3,
            Heading::Up => 4,
        }
    }

    pub fn next(self) -> Heading {
        match self {
            Heading::Right => Heading::Down,
            Heading::Down => Heading::Left,
            Heading::Left => Heading::Up,
            Heading::Up => Heading::Right,
        }
    }

    /// Heading that produced square `i`. Square 0 is booked as `Up`, the
    /// predecessor of the first real transition.
    pub fn of_square(i: usize) -> Heading {
        match i % 4 {
            0 => Heading::Up,
            1 => Heading::Right,
            2 => Heading::Down,
            _ => Heading::Left,
        }
    }

    /// Displacement from the centre of a square of side `side` to the centre
    /// of the next square (side `side / m`) in this direction.
    fn step<T: Real>(self, side: T, m: T) -> Vec2<T> {
        let two: T = lit(2.0);
        let half = side / two;
        let half_next = side / (two * m);
        match self {
            Heading::Right => Vec2::new(half + half_next, half - half_next),
            Heading::Down => Vec2::new(half - half_next, -half - half_next),
            Heading::Left => Vec2::new(-half - half_next, -half + half_next),
            Heading::Up => Vec2::new(-half + half_next, half + half_next),
        }
    }
}

/// One square of the whirl.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Square<T> {
    pub index: usize,
    pub center: Point<T>,
    pub side: T,
    pub state: Heading,
}

impl<T: Real> Square<T> {
    /// Corners counter-clockwise from the upper-right one.
    pub fn vertices(&self) -> [Point<T>; 4] {
        square_vertices(self.center, self.side)
    }

    pub fn bounds(&self) -> Aabb<T> {
        let h = self.side / lit(2.0);
        Aabb::new(
            Point::new(self.center.x - h, self.center.y - h),
            Point::new(self.center.x + h, self.center.y + h),
        )
    }

    pub fn circumcircle(&self) -> Circle<T> {
        Circle {
            center: self.center,
            radius: self.side / T::SQRT_2(),
        }
    }
}

/// Corners of an axis-aligned square, counter-clockwise from upper-right.
pub fn square_vertices<T: Real>(center: Point<T>, side: T) -> [Point<T>; 4] {
    let h = side / lit(2.0);
    [
        Point::new(center.x + h, center.y + h),
        Point::new(center.x - h, center.y + h),
        Point::new(center.x - h, center.y - h),
        Point::new(center.x + h, center.y - h),
    ]
}

/// Infinite iterator over the squares produced by the automaton.
#[derive(Debug, Clone)]
pub struct Whirl<T> {
    m: T,
    center: Point<T>,
    side: T,
    index: usize,
    heading: Heading,
}

impl<T: Real> Whirl<T> {
    pub fn new(spec: &SpiralSpec<T>) -> Self {
        Whirl {
            m: spec.m,
            center: spec.center0,
            side: spec.side,
            index: 0,
            heading: Heading::Right,
        }
    }
}

impl<T: Real> Iterator for Whirl<T> {
    type Item = Square<T>;

    fn next(&mut self) -> Option<Square<T>> {
        let sq = Square {
            index: self.index,
            center: self.center,
            side: self.side,
            state: Heading::of_square(self.index),
        };
        self.center = self.center + self.heading.step(self.side, self.m);
        self.side = self.side / self.m;
        self.heading = self.heading.next();
        self.index += 1;
        Some(sq)
    }
}

/// First `n` squares, `1 <= n <= cap`.
pub fn whirl_squares<T: Real>(spec: &SpiralSpec<T>, n: usize) -> Result<Vec<Square<T>>> {
    whirl_squares_capped(spec, n, DEFAULT_SQUARE_CAP)
}

pub fn whirl_squares_capped<T: Real>(
    spec: &SpiralSpec<T>,
    n: usize,
    cap: usize,
) -> Result<Vec<Square<T>>> {
    check_square_count(n, cap)?;
    Ok(Whirl::new(spec).take(n).collect())
}

fn check_square_count(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(SpiralError::TooSmall {
            requested: 0,
            min: 1,
        });
    }
    if n > cap {
        return Err(SpiralError::CapExceeded { requested: n, cap });
    }
    Ok(())
}

/// Centre of square `i` after `i` automaton steps.
pub fn square_center_recursive<T: Real>(spec: &SpiralSpec<T>, i: usize) -> Point<T> {
    Whirl::new(spec)
        .nth(i)
        .map(|sq| sq.center)
        .expect("whirl is infinite")
}

/// `(-1/m²)^⌊i/2⌋`, the part of the centre that has not yet converged.
fn decay<T: Real>(m: T, i: usize) -> T {
    powu(-T::one() / (m * m), i / 2)
}

/// Closed-form centre of square `i`.
pub fn square_center_closed<T: Real>(spec: &SpiralSpec<T>, i: usize) -> Point<T> {
    let m = spec.m;
    let k1 = T::one() - decay(m, i);
    let k2 = alternating::<T>(i / 2) / (lit::<T>(2.0) * powu(m, i));
    let ur = spec.upper_right();
    Point::new(
        ur.x + spec.side * (k1 * spec.horizontal_gain() - alternating::<T>(i) * k2),
        ur.y - spec.side * (k1 * spec.vertical_gain() + k2),
    )
}

/// Offset of square `i`'s centre from the pole, from the same closed form
/// but with the converged part cancelled symbolically. Stays accurate when
/// the offset is far below the coordinate magnitude.
pub fn center_offset_from_pole<T: Real>(spec: &SpiralSpec<T>, i: usize) -> Vec2<T> {
    let m = spec.m;
    let rest = decay(m, i);
    let k2 = alternating::<T>(i / 2) / (lit::<T>(2.0) * powu(m, i));
    Vec2::new(
        spec.side * (-rest * spec.horizontal_gain() - alternating::<T>(i) * k2),
        spec.side * (rest * spec.vertical_gain() - k2),
    )
}

/// How a pole estimate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoleMethod {
    ClosedForm,
    Iterative,
}

/// The limit point of the square centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pole<T> {
    pub point: Point<T>,
    pub method: PoleMethod,
    /// Distance between the last two iterates; zero for the closed form.
    pub residual: T,
    pub iterations: usize,
}

/// The pole written from the upper-right and from the lower-right vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleForms<T> {
    pub from_upper_right: Point<T>,
    pub from_lower_right: Point<T>,
}

impl<T: Real> PoleForms<T> {
    /// Largest coordinate difference relative to the coordinate magnitude.
    pub fn relative_disagreement(&self) -> T {
        let rel = |a: T, b: T| {
            let scale = a.abs().max(b.abs());
            if scale == T::zero() {
                T::zero()
            } else {
                (a - b).abs() / scale
            }
        };
        rel(self.from_upper_right.x, self.from_lower_right.x)
            .max(rel(self.from_upper_right.y, self.from_lower_right.y))
    }
}

pub fn pole_forms<T: Real>(spec: &SpiralSpec<T>) -> PoleForms<T> {
    let ur = spec.upper_right();
    let lr = spec.lower_right();
    let l = spec.side;
    let dx = l * spec.horizontal_gain();
    PoleForms {
        from_upper_right: Point::new(ur.x + dx, ur.y - l * spec.vertical_gain()),
        from_lower_right: Point::new(lr.x + dx, lr.y + l * spec.m * spec.horizontal_gain()),
    }
}

/// Closed-form pole.
pub fn pole_closed<T: Real>(spec: &SpiralSpec<T>) -> Pole<T> {
    let forms = pole_forms(spec);
    debug_assert!(
        forms.relative_disagreement() <= lit::<T>(64.0) * T::epsilon()
            || (forms.from_upper_right - forms.from_lower_right).norm()
                <= lit::<T>(64.0) * T::epsilon() * spec.side,
        "pole forms disagree: {forms:?}"
    );
    Pole {
        point: forms.from_upper_right,
        method: PoleMethod::ClosedForm,
        residual: T::zero(),
        iterations: 0,
    }
}

/// Number of automaton steps after which each step moves less than
/// `tol · L`, from the geometric decay of the step length, plus a margin.
pub fn pole_iteration_bound<T: Real>(m: T, tol: T) -> usize {
    let needed = ((T::one() / tol).ln() / m.ln()).ceil();
    needed
        .to_usize()
        .map(|n| n.saturating_add(8))
        .unwrap_or(usize::MAX)
}

/// Iterates the automaton until a step moves less than `tol · L`.
///
/// The iteration cap is the larger of [`POLE_ITERATION_FLOOR`] and the
/// geometric-decay bound, limited by [`POLE_ITERATION_CEILING`].
pub fn pole_iterative<T: Real>(spec: &SpiralSpec<T>, tol: T) -> Result<Pole<T>> {
    check_tol(tol)?;
    let cap = pole_iteration_bound(spec.m, tol).clamp(POLE_ITERATION_FLOOR, POLE_ITERATION_CEILING);
    pole_iterative_capped(spec, tol, cap)
}

pub fn pole_iterative_capped<T: Real>(spec: &SpiralSpec<T>, tol: T, cap: usize) -> Result<Pole<T>> {
    check_tol(tol)?;
    let threshold = tol * spec.side;
    let mut whirl = Whirl::new(spec);
    let mut prev = whirl.next().expect("whirl is infinite").center;
    for n in 1..=cap {
        let cur = whirl.next().expect("whirl is infinite").center;
        let moved = cur.distance(prev);
        if moved < threshold {
            return Ok(Pole {
                point: cur,
                method: PoleMethod::Iterative,
                residual: moved,
                iterations: n,
            });
        }
        prev = cur;
    }
    let best = prev.to_f64();
    Err(SpiralError::MaxIterations {
        iterations: cap,
        best_x: best.x,
        best_y: best.y,
    })
}

fn check_tol<T: Real>(tol: T) -> Result<()> {
    if !(tol > T::zero() && tol < T::one()) {
        return Err(SpiralError::ToleranceOutOfRange {
            tol: tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Circle through the four corners of square `i`; it also passes through the pole.
pub fn circumscribed_circle<T: Real>(spec: &SpiralSpec<T>, i: usize) -> Circle<T> {
    Circle {
        center: square_center_closed(spec, i),
        radius: spec.side_of(i) / T::SQRT_2(),
    }
}

/// Quarter-circle arc inscribed in one square, swept clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarterArc<T> {
    pub square: usize,
    pub center: Point<T>,
    pub radius: T,
    /// Polar angle of `start` about `center`; the arc ends a quarter turn
    /// clockwise from here.
    pub start_angle: T,
    pub start: Point<T>,
    pub end: Point<T>,
}

impl<T: Real> QuarterArc<T> {
    /// `samples >= 2` points from `start` to `end` inclusive.
    pub fn sample(&self, samples: usize) -> Vec<Point<T>> {
        let last = samples.saturating_sub(1).max(1);
        (0..samples)
            .map(|k| {
                if k == 0 {
                    self.start
                } else if k == last {
                    self.end
                } else {
                    self.point_at(count::<T>(k) / count::<T>(last))
                }
            })
            .collect()
    }

    /// Point at fraction `t ∈ [0, 1]` of the sweep.
    pub fn point_at(&self, t: T) -> Point<T> {
        let a = self.start_angle - T::FRAC_PI_2() * t;
        Point::new(
            self.center.x + self.radius * a.cos(),
            self.center.y + self.radius * a.sin(),
        )
    }
}

/// The quarter arcs of the first `n_squares` squares. Consecutive arcs share
/// their junction point exactly.
pub fn spiral_arcs<T: Real>(spec: &SpiralSpec<T>, n_squares: usize) -> Result<Vec<QuarterArc<T>>> {
    spiral_arcs_capped(spec, n_squares, DEFAULT_SQUARE_CAP)
}

pub fn spiral_arcs_capped<T: Real>(
    spec: &SpiralSpec<T>,
    n_squares: usize,
    cap: usize,
) -> Result<Vec<QuarterArc<T>>> {
    let squares = whirl_squares_capped(spec, n_squares, cap)?;
    let mut arcs: Vec<QuarterArc<T>> = Vec::with_capacity(squares.len());
    for sq in &squares {
        // Corner indices into `vertices()`: 0 = UR, 1 = UL, 2 = LL, 3 = LR.
        let [ur, ul, ll, lr] = sq.vertices();
        let (center, start, end, start_angle) = match sq.index % 4 {
            0 => (lr, ll, ur, T::PI()),
            1 => (ll, ul, lr, T::FRAC_PI_2()),
            2 => (ul, ur, ll, T::zero()),
            _ => (ur, lr, ul, -T::FRAC_PI_2()),
        };
        let start = arcs.last().map_or(start, |prev| prev.end);
        arcs.push(QuarterArc {
            square: sq.index,
            center,
            radius: sq.side,
            start_angle,
            start,
            end,
        });
    }
    Ok(arcs)
}

/// Continuous polyline through the arcs, `samples_per_arc >= 2` points per
/// arc with junctions emitted once.
pub fn arc_polyline<T: Real>(
    spec: &SpiralSpec<T>,
    n_squares: usize,
    samples_per_arc: usize,
) -> Result<Vec<Point<T>>> {
    if samples_per_arc < 2 {
        return Err(SpiralError::TooSmall {
            requested: samples_per_arc,
            min: 2,
        });
    }
    let arcs = spiral_arcs(spec, n_squares)?;
    let mut out = Vec::with_capacity(arcs.len() * (samples_per_arc - 1) + 1);
    for (k, arc) in arcs.iter().enumerate() {
        let pts = arc.sample(samples_per_arc);
        let skip = usize::from(k > 0);
        out.extend(pts.into_iter().skip(skip));
    }
    Ok(out)
}

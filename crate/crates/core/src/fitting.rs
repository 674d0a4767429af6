//! Recovering the growth ratio and pole from points sampled along a spiral.
//!
//! The model is logarithmic in the quarter-turn: about the pole, the radius
//! shrinks by `m` every quarter turn,
//!
//! ```text
//! log r(τ) = log r0 - (τ / (π/2))·log m
//! ```
//!
//! where `τ` is the turning angle travelled since the first sample. For a
//! fixed pole this is a straight-line fit in `(τ, log r)`; the pole itself is
//! found by a multi-start simplex search over the plane.
//!
//! The whirling-square spiral is only piecewise circular, so a perfect fit
//! does not exist and noiseless samples leave a small, measurable bias.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Result, SpiralError};
use crate::geom::{Aabb, Point};
use crate::scalar::{count, lit, Real};
use crate::simplex::{self, SimplexOptions};
use crate::spiral::{spiral_arcs_capped, SpiralSpec};

/// Minimum number of sample points.
pub const MIN_SAMPLES: usize = 8;

/// Noiseless synthetic spirals walk squares until the side has shrunk by
/// this factor.
pub const SYNTH_DEPTH_SHRINK: f64 = 1e5;
/// With noise, the innermost side stays above this many `σ·L`; smaller
/// squares would be lost in the noise.
pub const SYNTH_SIDE_PER_SIGMA: f64 = 6.25;
pub const SYNTH_MIN_SQUARES: usize = 4;
pub const SYNTH_MAX_SQUARES: usize = 64;

/// Maximum simplex iterations per start.
pub const FIT_MAX_ITERATIONS: usize = 500;
/// Relative objective spread at which a start counts as converged.
pub const FIT_FTOL: f64 = 1e-12;

/// Ratio of angle travelled backward to angle travelled forward above which
/// samples are declared unordered.
pub const MAX_BACKWARD_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet<T> {
    pub points: Vec<Point<T>>,
    /// Noise scale relative to `L`, when synthetic.
    pub noise_sigma: Option<T>,
    pub seed: Option<u64>,
}

impl<T: Real> SampleSet<T> {
    pub fn new(points: Vec<Point<T>>) -> Result<Self> {
        check_points(&points)?;
        Ok(SampleSet {
            points,
            noise_sigma: None,
            seed: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Applies `f` to every point, keeping the metadata.
    pub fn map_points<F: FnMut(Point<T>) -> Point<T>>(&self, f: F) -> Self {
        SampleSet {
            points: self.points.iter().copied().map(f).collect(),
            noise_sigma: self.noise_sigma,
            seed: self.seed,
        }
    }
}

fn check_points<T: Real>(points: &[Point<T>]) -> Result<()> {
    if points.len() < MIN_SAMPLES {
        return Err(SpiralError::TooFewPoints {
            got: points.len(),
            need: MIN_SAMPLES,
        });
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(SpiralError::NonFiniteSample);
    }
    Ok(())
}

/// Number of squares walked by [`synth_samples`] for ratio `m` and
/// relative noise `noise_sigma`.
///
/// The walk covers a side shrink of `min(SYNTH_DEPTH_SHRINK,
/// 1 / (SYNTH_SIDE_PER_SIGMA·σ))`, clamped to
/// `[SYNTH_MIN_SQUARES, SYNTH_MAX_SQUARES]` squares.
pub fn synth_depth<T: Real>(m: T, noise_sigma: T) -> usize {
    let mut shrink: T = lit(SYNTH_DEPTH_SHRINK);
    if noise_sigma > T::zero() {
        shrink = shrink.min(T::one() / (lit::<T>(SYNTH_SIDE_PER_SIGMA) * noise_sigma));
    }
    let k = (shrink.max(T::one()).ln() / m.ln()).ceil();
    k.to_usize()
        .map(|k| k.saturating_add(1))
        .unwrap_or(SYNTH_MAX_SQUARES)
        .clamp(SYNTH_MIN_SQUARES, SYNTH_MAX_SQUARES)
}

/// `n_points` spread evenly (in sweep angle) along the quarter arcs of the
/// first [`synth_depth`] squares, plus isotropic Gaussian noise of scale
/// `noise_sigma·L`. Deterministic given `seed`.
pub fn synth_samples<T: Real>(
    spec: &SpiralSpec<T>,
    n_points: usize,
    noise_sigma: T,
    seed: u64,
) -> Result<SampleSet<T>> {
    synth_samples_with_depth(
        spec,
        synth_depth(spec.ratio(), noise_sigma),
        n_points,
        noise_sigma,
        seed,
    )
}

pub fn synth_samples_with_depth<T: Real>(
    spec: &SpiralSpec<T>,
    n_squares: usize,
    n_points: usize,
    noise_sigma: T,
    seed: u64,
) -> Result<SampleSet<T>> {
    if n_points < MIN_SAMPLES {
        return Err(SpiralError::TooFewPoints {
            got: n_points,
            need: MIN_SAMPLES,
        });
    }
    if !noise_sigma.is_finite() || noise_sigma < T::zero() {
        return Err(SpiralError::BadNoise {
            sigma: noise_sigma.to_f64().unwrap_or(f64::NAN),
        });
    }
    let arcs = spiral_arcs_capped(spec, n_squares, n_squares.max(1))?;
    let total = count::<T>(arcs.len());
    let last = count::<T>(n_points - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = noise_sigma * spec.side();

    let points = (0..n_points)
        .map(|k| {
            let t = total * count::<T>(k) / last;
            let idx = t.floor().to_usize().unwrap_or(0).min(arcs.len() - 1);
            let frac = t - count::<T>(idx);
            let arc = &arcs[idx];
            let p = if frac == T::zero() {
                arc.start
            } else if frac == T::one() {
                arc.end
            } else {
                arc.point_at(frac)
            };
            if scale > T::zero() {
                let dx: f64 = StandardNormal.sample(&mut rng);
                let dy: f64 = StandardNormal.sample(&mut rng);
                Point::new(p.x + scale * lit::<T>(dx), p.y + scale * lit::<T>(dy))
            } else {
                p
            }
        })
        .collect();

    Ok(SampleSet {
        points,
        noise_sigma: Some(noise_sigma),
        seed: Some(seed),
    })
}

/// Polar view of the samples about a candidate pole.
struct Polar<T> {
    /// Turning angle since the first sample, oriented to increase overall.
    turn: Vec<T>,
    log_r: Vec<T>,
    /// Total angle travelled against the overall direction.
    backward_turn: T,
    /// Total angle travelled along it.
    forward_turn: T,
    /// `+1` for counter-clockwise winding, `-1` otherwise.
    orient: T,
}

fn polar<T: Real>(points: &[Point<T>], pole: Point<T>) -> Option<Polar<T>> {
    let mut turn = Vec::with_capacity(points.len());
    let mut log_r = Vec::with_capacity(points.len());
    let mut prev_angle = T::zero();
    let mut acc = T::zero();
    for (k, p) in points.iter().enumerate() {
        let d = *p - pole;
        let r = d.norm();
        if !(r > T::zero()) || !r.is_finite() {
            return None;
        }
        let angle = d.y.atan2(d.x);
        if k > 0 {
            acc = acc + wrap_angle(angle - prev_angle);
        }
        prev_angle = angle;
        turn.push(acc);
        log_r.push(r.ln());
    }
    let orient = if acc < T::zero() { -T::one() } else { T::one() };
    let mut backward_turn = T::zero();
    let mut forward_turn = T::zero();
    for k in 0..turn.len() {
        turn[k] = turn[k] * orient;
        if k > 0 {
            let step = turn[k] - turn[k - 1];
            if step < T::zero() {
                backward_turn = backward_turn - step;
            } else {
                forward_turn = forward_turn + step;
            }
        }
    }
    Some(Polar {
        turn,
        log_r,
        backward_turn,
        forward_turn,
        orient,
    })
}

fn wrap_angle<T: Real>(a: T) -> T {
    let tau = T::TAU();
    let mut a = a % tau;
    if a > T::PI() {
        a = a - tau;
    } else if a <= -T::PI() {
        a = a + tau;
    }
    a
}

/// Least-squares line `log r = intercept + slope·turn`.
struct LineFit<T> {
    intercept: T,
    slope: T,
    sse: T,
}

fn fit_line<T: Real>(x: &[T], y: &[T]) -> Option<LineFit<T>> {
    let n = count::<T>(x.len());
    let mx = x.iter().fold(T::zero(), |a, &v| a + v) / n;
    let my = y.iter().fold(T::zero(), |a, &v| a + v) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&xi, &yi) in x.iter().zip(y) {
        sxx = sxx + (xi - mx) * (xi - mx);
        sxy = sxy + (xi - mx) * (yi - my);
    }
    if !(sxx > T::zero()) {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let e = yi - intercept - slope * xi;
            e * e
        })
        .fold(T::zero(), |a, v| a + v);
    Some(LineFit {
        intercept,
        slope,
        sse,
    })
}

/// Minimum winding, in quarter turns, for a candidate pole to be admissible.
pub const MIN_QUARTER_TURNS: f64 = 2.0;

fn too_many_backward<T: Real>(pol: &Polar<T>) -> bool {
    pol.backward_turn > lit::<T>(MAX_BACKWARD_FRACTION) * pol.forward_turn
}

/// Sum of squared log-radius residuals about `pole`; `+∞` for poles the
/// samples wind around less than [`MIN_QUARTER_TURNS`] times. Without that
/// restriction a pole far away makes `log r` nearly constant and the fit
/// trivially good.
fn objective<T: Real>(points: &[Point<T>], pole: Point<T>) -> T {
    let Some(pol) = polar(points, pole) else {
        return T::infinity();
    };
    let winding = *pol.turn.last().expect("non-empty") / T::FRAC_PI_2();
    if winding < lit(MIN_QUARTER_TURNS) {
        return T::infinity();
    }
    fit_line(&pol.turn, &pol.log_r).map_or(T::infinity(), |l| l.sse)
}

/// Gauss–Newton steps after the simplex search.
pub const POLISH_MAX_STEPS: usize = 30;
/// Relative objective rise tolerated per polish step.
const POLISH_F_SLACK: f64 = 1e-9;

/// Refines `pole` by Gauss–Newton on the joint residuals
/// `log r_k - c - b·τ_k` over `(pole.x, pole.y, c, b)`.
///
/// Function values alone pin a minimum down only to about `√ε`; the
/// stationarity condition solved here is sharp to near machine precision.
/// Steps that leave the admissible region or raise the objective beyond
/// rounding are rejected.
fn polish<T: Real>(points: &[Point<T>], pole: Point<T>, scale: T) -> (Point<T>, usize) {
    let mut pole = pole;
    let mut f = objective(points, pole);
    let mut steps = 0;
    for _ in 0..POLISH_MAX_STEPS {
        let Some(pol) = polar(points, pole) else {
            break;
        };
        let Some(line) = fit_line(&pol.turn, &pol.log_r) else {
            break;
        };
        let orient = pol.orient;
        let b = line.slope;
        let c = line.intercept;
        let d0 = points[0] - pole;
        let r0sq = d0.norm_squared();

        let mut jtj = [[T::zero(); 4]; 4];
        let mut jte = [T::zero(); 4];
        for (k, p) in points.iter().enumerate() {
            let d = *p - pole;
            let rsq = d.norm_squared();
            let e = pol.log_r[k] - c - b * pol.turn[k];
            let dtheta_dx = d.y / rsq - d0.y / r0sq;
            let dtheta_dy = -d.x / rsq + d0.x / r0sq;
            let row = [
                -d.x / rsq - b * orient * dtheta_dx,
                -d.y / rsq - b * orient * dtheta_dy,
                -T::one(),
                -pol.turn[k],
            ];
            for i in 0..4 {
                jte[i] = jte[i] + row[i] * e;
                for j in 0..4 {
                    jtj[i][j] = jtj[i][j] + row[i] * row[j];
                }
            }
        }
        let Some(delta) = solve4(jtj, jte.map(|v| -v)) else {
            break;
        };
        let candidate = Point::new(pole.x + delta[0], pole.y + delta[1]);
        let fc = objective(points, candidate);
        // Near the optimum `f` is flat to rounding, so allow that much rise.
        if !(fc <= f + f.abs() * lit::<T>(POLISH_F_SLACK)) {
            break;
        }
        let moved = delta[0].abs().max(delta[1].abs());
        pole = candidate;
        f = fc;
        steps += 1;
        if moved <= scale * T::epsilon() * lit::<T>(64.0) {
            break;
        }
    }
    (pole, steps)
}

/// Gaussian elimination with partial pivoting on a 4×4 system.
fn solve4<T: Real>(mut a: [[T; 4]; 4], mut b: [T; 4]) -> Option<[T; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if !(a[piv][col].abs() > T::zero()) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let factor = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] = a[row][k] - factor * a[col][k];
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = [T::zero(); 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for k in row + 1..4 {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Median of a non-empty slice (mean of the middle pair for even lengths).
fn median<T: Real>(values: &mut [T]) -> T {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / lit(2.0)
    }
}

/// Median ratio between the radius at each sample and the radius a quarter
/// turn further along, about `pole`.
pub fn quarter_turn_ratio<T: Real>(samples: &SampleSet<T>, pole: Point<T>) -> Result<T> {
    check_points(&samples.points)?;
    let pol = polar(&samples.points, pole).ok_or(SpiralError::InsufficientCoverage {
        quarter_turns: 0.0,
        need: 2.0,
    })?;
    let mut pairs: Vec<(T, T)> = pol
        .turn
        .iter()
        .copied()
        .zip(pol.log_r.iter().copied())
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let lo = pairs[0].0;
    let hi = pairs[pairs.len() - 1].0;
    let quarter = T::FRAC_PI_2();
    let span = (hi - lo) / quarter;
    if span < lit(2.0) {
        return Err(SpiralError::InsufficientCoverage {
            quarter_turns: span.to_f64().unwrap_or(0.0),
            need: 2.0,
        });
    }

    let interp = |t: T| -> T {
        let j = pairs
            .partition_point(|&(x, _)| x < t)
            .clamp(1, pairs.len() - 1);
        let (x0, y0) = pairs[j - 1];
        let (x1, y1) = pairs[j];
        if x1 == x0 {
            y0
        } else {
            y0 + (y1 - y0) * (t - x0) / (x1 - x0)
        }
    };
    let mut ratios: Vec<T> = pairs
        .iter()
        .filter(|&&(t, _)| t + quarter <= hi)
        .map(|&(t, lr)| (lr - interp(t + quarter)).exp())
        .collect();
    let ratio = median(&mut ratios);
    Ok(if ratio < T::one() {
        T::one() / ratio
    } else {
        ratio
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult<T> {
    pub m_hat: T,
    pub pole_hat: Point<T>,
    /// Fitted radius at the first sample's angle.
    pub r0_hat: T,
    /// RMS of the log-radius residuals.
    pub residual_norm: T,
    pub iterations: usize,
    pub converged: bool,
}

fn centroid<T: Real>(points: &[Point<T>]) -> Point<T> {
    let n = count::<T>(points.len());
    let (sx, sy) = points
        .iter()
        .fold((T::zero(), T::zero()), |(ax, ay), p| (ax + p.x, ay + p.y));
    Point::new(sx / n, sy / n)
}

/// Grid cells per axis for each level of the pole pre-scan.
pub const SCAN_CELLS: usize = 32;
/// Zoom levels of the pre-scan; each level rescans ±2 cells around the
/// previous best point.
pub const SCAN_LEVELS: usize = 3;

/// Best admissible pole on a zooming grid, starting from the bounding box
/// of `region`.
fn grid_scan<T: Real>(points: &[Point<T>], region: &[Point<T>]) -> Option<Point<T>> {
    let mut bb = Aabb::from_points(region.iter().copied())?;
    let cells = count::<T>(SCAN_CELLS);
    let mut best: Option<(T, Point<T>)> = None;
    for _ in 0..SCAN_LEVELS {
        for iy in 0..=SCAN_CELLS {
            for ix in 0..=SCAN_CELLS {
                let p = Point::new(
                    bb.min.x + bb.width() * count::<T>(ix) / cells,
                    bb.min.y + bb.height() * count::<T>(iy) / cells,
                );
                let f = objective(points, p);
                if f.is_finite() && best.is_none_or(|(bf, _)| f < bf) {
                    best = Some((f, p));
                }
            }
        }
        let (_, c) = best?;
        let hx = bb.width() * lit::<T>(2.0) / cells;
        let hy = bb.height() * lit::<T>(2.0) / cells;
        bb = Aabb::new(
            Point::new(c.x - hx, c.y - hy),
            Point::new(c.x + hx, c.y + hy),
        );
    }
    best.map(|(_, p)| p)
}

/// Fits `(pole, m, r0)` to ordered samples.
///
/// Starts: `init_pole` when given, the best points of zooming grid scans
/// over all samples and over the first and last quarter of them, then the sample centroid offset by one
/// median radius along ±x and ±y. The best start wins; ties go to the
/// earliest.
pub fn fit_spiral<T: Real>(
    samples: &SampleSet<T>,
    init_pole: Option<Point<T>>,
    init_m: Option<T>,
) -> Result<FitResult<T>> {
    let points = &samples.points;
    check_points(points)?;

    let center = centroid(points);
    let mut radii: Vec<T> = points.iter().map(|p| p.distance(center)).collect();
    let spread = median(&mut radii);
    if !(spread > T::zero()) {
        return Err(SpiralError::InsufficientCoverage {
            quarter_turns: 0.0,
            need: 2.0,
        });
    }

    let m0 = init_m
        .filter(|m| m.is_finite() && *m > T::one())
        .or_else(|| quarter_turn_ratio(samples, init_pole.unwrap_or(center)).ok())
        .unwrap_or_else(|| lit(2.0));
    // Initial simplex edge: a fraction of the sample spread that grows with
    // how far the pole sits from the samples' middle.
    let edge = (spread * (m0 - T::one()) / (m0 + T::one()))
        .max(spread * lit(0.05))
        .min(spread * lit(0.5));

    let mut starts = Vec::with_capacity(8);
    starts.extend(init_pole);
    // The pole hides inside the innermost turn, next to one end of the
    // sequence; scan around both ends as well as the whole set.
    let end = (points.len() / 4).max(2);
    starts.extend(grid_scan(points, points));
    starts.extend(grid_scan(points, &points[..end]));
    starts.extend(grid_scan(points, &points[points.len() - end..]));
    starts.push(Point::new(center.x + spread, center.y));
    starts.push(Point::new(center.x - spread, center.y));
    starts.push(Point::new(center.x, center.y + spread));
    starts.push(Point::new(center.x, center.y - spread));

    let opts = SimplexOptions {
        max_iterations: FIT_MAX_ITERATIONS,
        ftol_rel: lit(FIT_FTOL),
        ftol_abs: T::min_positive_value(),
        xtol: spread * lit(1e-13),
    };

    let mut best: Option<simplex::SimplexResult<T>> = None;
    for s in &starts {
        let run = simplex::minimize(
            |x| objective(points, Point::new(x[0], x[1])),
            [s.x, s.y],
            edge,
            &opts,
        );
        if best.as_ref().is_none_or(|b| run.f < b.f) {
            best = Some(run);
        }
    }
    let best = best.expect("at least four starts");
    let (pole_hat, polish_steps) = if best.f.is_finite() {
        polish(points, Point::new(best.x[0], best.x[1]), spread)
    } else {
        (Point::new(best.x[0], best.x[1]), 0)
    };

    let pol = polar(points, pole_hat).ok_or(SpiralError::InsufficientCoverage {
        quarter_turns: 0.0,
        need: 2.0,
    })?;
    if !best.f.is_finite() || too_many_backward(&pol) {
        return Err(SpiralError::InputNotOrdered);
    }
    let line = fit_line(&pol.turn, &pol.log_r).ok_or(SpiralError::InsufficientCoverage {
        quarter_turns: 0.0,
        need: 2.0,
    })?;
    let m_hat = (line.slope.abs() * T::FRAC_PI_2()).exp();
    Ok(FitResult {
        m_hat,
        pole_hat,
        r0_hat: line.intercept.exp(),
        residual_norm: (line.sse / count::<T>(points.len())).sqrt(),
        iterations: best.iterations + polish_steps,
        converged: best.converged,
    })
}

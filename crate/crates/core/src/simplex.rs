//! Derivative-free Nelder–Mead minimisation in two dimensions.

use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions<T> {
    pub max_iterations: usize,
    /// Stop once `f_worst - f_best <= ftol_rel·|f_best| + ftol_abs` ...
    pub ftol_rel: T,
    pub ftol_abs: T,
    /// ... and every vertex is within `xtol` of the best one.
    pub xtol: T,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexResult<T> {
    pub x: [T; 2],
    pub f: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimises `f` starting from the triangle `x0, x0 + h·e_x, x0 + h·e_y`.
///
/// Non-finite objective values are treated as `+∞`.
pub fn minimize<T, F>(mut f: F, x0: [T; 2], h: T, opts: &SimplexOptions<T>) -> SimplexResult<T>
where
    T: Real,
    F: FnMut([T; 2]) -> T,
{
    let mut eval = |x: [T; 2]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            T::infinity()
        }
    };
    let half: T = lit(0.5);
    let two: T = lit(2.0);

    let mut pts = [x0, [x0[0] + h, x0[1]], [x0[0], x0[1] + h]];
    let mut vals = [eval(pts[0]), eval(pts[1]), eval(pts[2])];
    let mut iterations = 0;
    let mut converged = false;

    loop {
        // Stable sort by value keeps the earliest vertex on ties.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            vals[a]
                .partial_cmp(&vals[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        pts = [pts[order[0]], pts[order[1]], pts[order[2]]];
        vals = [vals[order[0]], vals[order[1]], vals[order[2]]];

        let spread = vals[2] - vals[0];
        let diam = pts[1..]
            .iter()
            .map(|p| (p[0] - pts[0][0]).abs().max((p[1] - pts[0][1]).abs()))
            .fold(T::zero(), T::max);
        if vals[0].is_finite()
            && spread <= opts.ftol_rel * vals[0].abs() + opts.ftol_abs
            && diam <= opts.xtol
        {
            converged = true;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        iterations += 1;

        let centroid = [
            (pts[0][0] + pts[1][0]) * half,
            (pts[0][1] + pts[1][1]) * half,
        ];
        let along = |t: T| {
            [
                centroid[0] + t * (pts[2][0] - centroid[0]),
                centroid[1] + t * (pts[2][1] - centroid[1]),
            ]
        };

        let xr = along(-T::one());
        let fr = eval(xr);
        if fr < vals[0] {
            let xe = along(-two);
            let fe = eval(xe);
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
            continue;
        }
        if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[2] {
            let xc = along(-half);
            (xc, eval(xc))
        } else {
            let xc = along(half);
            (xc, eval(xc))
        };
        if fc < vals[2].min(fr) {
            pts[2] = xc;
            vals[2] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        for k in 1..3 {
            pts[k] = [
                pts[0][0] + half * (pts[k][0] - pts[0][0]),
                pts[0][1] + half * (pts[k][1] - pts[0][1]),
            ];
            vals[k] = eval(pts[k]);
        }
    }

    SimplexResult {
        x: pts[0],
        f: vals[0],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SimplexOptions<f64> {
        SimplexOptions {
            max_iterations: 500,
            ftol_rel: 1e-12,
            ftol_abs: 1e-300,
            xtol: 1e-10,
        }
    }

    #[test]
    fn quadratic_bowl() {
        let r = minimize(
            |x| (x[0] - 3.0).powi(2) + 10.0 * (x[1] + 1.0).powi(2),
            [0.0, 0.0],
            1.0,
            &opts(),
        );
        assert!(r.converged);
        assert!((r.x[0] - 3.0).abs() < 1e-9 && (r.x[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn rosenbrock() {
        let mut o = opts();
        o.max_iterations = 2000;
        let r = minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            [-1.2, 1.0],
            0.5,
            &o,
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn non_finite_values_are_avoided() {
        let r = minimize(
            |x| {
                if x[0] < 0.0 {
                    f64::NAN
                } else {
                    (x[0] - 1.0).powi(2) + x[1] * x[1]
                }
            },
            [0.5, 0.5],
            0.4,
            &opts(),
        );
        assert!((r.x[0] - 1.0).abs() < 1e-8);
    }
}

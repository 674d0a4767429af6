use thiserror::Error;

/// Everything that can go wrong while building or measuring a spiral.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpiralError {
    #[error("ratio m must be finite and greater than 1, got {m}")]
    RatioOutOfRange { m: f64 },
    #[error("side length must be finite and positive, got {side}")]
    BadSide { side: f64 },
    #[error("first-square center must have finite coordinates")]
    BadCenter,
    #[error("tolerance must lie in (0, 1), got {tol}")]
    ToleranceOutOfRange { tol: f64 },
    #[error("no convergence after {iterations} iterations (best estimate ({best_x}, {best_y}))")]
    MaxIterations {
        iterations: usize,
        best_x: f64,
        best_y: f64,
    },
    #[error("requested {requested} items, cap is {cap}")]
    CapExceeded { requested: usize, cap: usize },
    #[error("at least {min} required, got {requested}")]
    TooSmall { requested: usize, min: usize },
    #[error("lines are parallel")]
    DegenerateLines,
    #[error("tolerance must lie in (0, 1e-6), got {tol}")]
    BadTolerance { tol: f64 },
    #[error("root solver stalled with residual {residual}")]
    RootNotConverged { residual: f64 },
    #[error("need at least {need} sample points, got {got}")]
    TooFewPoints { got: usize, need: usize },
    #[error("samples cover {quarter_turns:.3} quarter-turns, need at least {need}")]
    InsufficientCoverage { quarter_turns: f64, need: f64 },
    #[error("samples are not ordered along the spiral")]
    InputNotOrdered,
    #[error("sample points must be finite")]
    NonFiniteSample,
    #[error("noise sigma must be finite and non-negative, got {sigma}")]
    BadNoise { sigma: f64 },
    #[error("invalid render options: {0}")]
    InvalidOptions(String),
    #[error("rendered geometry failed its numeric re-check: {0}")]
    RenderCheck(String),
}

pub type Result<T, E = SpiralError> = std::result::Result<T, E>;

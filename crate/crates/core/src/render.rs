//! SVG figures of whirling-square spirals.
//!
//! Kernel coordinates (y up) are written verbatim into the path data; a single
//! `matrix(s 0 0 -s tx ty)` on the outer group maps them onto the pixel
//! canvas. Stroke widths and dash lengths are given in pixels and converted to
//! user units so they render at the requested size.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::diagonals::extreme_vertices;
use crate::error::{Result, SpiralError};
use crate::geom::{Aabb, Point};
use crate::spiral::{
    arc_polyline, pole_closed, spiral_arcs_capped, whirl_squares_capped, SpiralSpec,
    DEFAULT_SQUARE_CAP,
};

pub const MIN_CANVAS_PX: u32 = 64;
pub const MAX_MARGIN_FRACTION: f64 = 0.45;

/// How far a pole marker may sit from the `L/√2` circle, relative to `L`.
pub const POLE_CIRCLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Squares,
    Arcs,
    Diagonals,
    Circumcircles,
    PoleCircle,
    Pole,
}

impl Layer {
    pub const ALL: [Layer; 6] = [
        Layer::Squares,
        Layer::Arcs,
        Layer::Diagonals,
        Layer::Circumcircles,
        Layer::PoleCircle,
        Layer::Pole,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Layer::Squares => "squares",
            Layer::Arcs => "arcs",
            Layer::Diagonals => "diagonals",
            Layer::Circumcircles => "circumcircles",
            Layer::PoleCircle => "pole_circle",
            Layer::Pole => "pole",
        }
    }

    pub fn from_id(id: &str) -> Option<Layer> {
        Layer::ALL.into_iter().find(|l| l.id() == id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub stroke: String,
    /// Pixels.
    pub width_px: f64,
    /// Alternating dash and gap lengths in pixels; empty for solid.
    pub dash_px: Vec<f64>,
    pub fill: Option<String>,
}

impl Style {
    fn solid(stroke: &str, width_px: f64) -> Self {
        Style {
            stroke: stroke.into(),
            width_px,
            dash_px: Vec::new(),
            fill: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub width_px: u32,
    pub height_px: u32,
    pub margin_fraction: f64,
    pub layers: BTreeSet<Layer>,
    pub squares: Style,
    pub arcs: Style,
    pub diagonals: Style,
    pub circumcircles: Style,
    pub pole_circle: Style,
    pub pole: Style,
    /// Radius of pole markers in pixels.
    pub pole_marker_px: f64,
    /// Draw arcs as sampled polylines instead of arc commands.
    pub arcs_as_polyline: bool,
    pub polyline_samples: usize,
    /// Further ratios whose poles (same `L` and first square) are marked.
    pub extra_pole_ratios: Vec<f64>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            width_px: 800,
            height_px: 600,
            margin_fraction: 0.05,
            layers: [Layer::Squares, Layer::Arcs, Layer::Diagonals, Layer::Pole]
                .into_iter()
                .collect(),
            squares: Style::solid("#444444", 1.0),
            arcs: Style::solid("#c0392b", 1.5),
            diagonals: Style {
                dash_px: vec![6.0, 4.0],
                ..Style::solid("#2c3e50", 1.0)
            },
            circumcircles: Style::solid("#7f8c8d", 0.75),
            pole_circle: Style {
                dash_px: vec![2.0, 3.0],
                ..Style::solid("#2980b9", 1.0)
            },
            pole: Style {
                fill: Some("#000000".into()),
                ..Style::solid("none", 0.0)
            },
            pole_marker_px: 3.0,
            arcs_as_polyline: false,
            polyline_samples: 16,
            extra_pole_ratios: Vec::new(),
        }
    }
}

impl RenderOptions {
    pub fn with_layers<I: IntoIterator<Item = Layer>>(mut self, layers: I) -> Self {
        self.layers = layers.into_iter().collect();
        self
    }

    pub fn style(&self, layer: Layer) -> &Style {
        match layer {
            Layer::Squares => &self.squares,
            Layer::Arcs => &self.arcs,
            Layer::Diagonals => &self.diagonals,
            Layer::Circumcircles => &self.circumcircles,
            Layer::PoleCircle => &self.pole_circle,
            Layer::Pole => &self.pole,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SpiralError::InvalidOptions(msg));
        if self.width_px < MIN_CANVAS_PX || self.height_px < MIN_CANVAS_PX {
            return bad(format!(
                "canvas {}x{} is below the {MIN_CANVAS_PX} px minimum",
                self.width_px, self.height_px
            ));
        }
        if !(0.0..=MAX_MARGIN_FRACTION).contains(&self.margin_fraction) {
            return bad(format!(
                "margin fraction {} outside [0, {MAX_MARGIN_FRACTION}]",
                self.margin_fraction
            ));
        }
        if self.arcs_as_polyline && self.polyline_samples < 2 {
            return bad("polyline needs at least 2 samples per arc".into());
        }
        if !(self.pole_marker_px.is_finite() && self.pole_marker_px > 0.0) {
            return bad(format!("pole marker radius {}", self.pole_marker_px));
        }
        for layer in Layer::ALL {
            let s = self.style(layer);
            if !(s.width_px.is_finite() && s.width_px >= 0.0)
                || s.dash_px.iter().any(|d| !(d.is_finite() && *d >= 0.0))
            {
                return bad(format!("bad stroke for layer {}", layer.id()));
            }
        }
        Ok(())
    }
}

/// Map from kernel coordinates to pixels: `(s·x + tx, −s·y + ty)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frame {
    pub scale: f64,
    pub tx: f64,
    pub ty: f64,
}

impl Frame {
    fn fit(bounds: &Aabb<f64>, opts: &RenderOptions) -> Frame {
        let w = f64::from(opts.width_px);
        let h = f64::from(opts.height_px);
        let usable = 1.0 - 2.0 * opts.margin_fraction;
        let bw = bounds.width().max(f64::MIN_POSITIVE);
        let bh = bounds.height().max(f64::MIN_POSITIVE);
        let scale = (w * usable / bw).min(h * usable / bh);
        let cx = 0.5 * (bounds.min.x + bounds.max.x);
        let cy = 0.5 * (bounds.min.y + bounds.max.y);
        Frame {
            scale,
            tx: 0.5 * w - scale * cx,
            ty: 0.5 * h + scale * cy,
        }
    }

    pub fn to_px(&self, p: Point<f64>) -> Point<f64> {
        Point::new(self.scale * p.x + self.tx, -self.scale * p.y + self.ty)
    }
}

/// Everything a figure contains, in kernel coordinates.
struct Scene {
    squares: Vec<(Point<f64>, f64)>,
    arcs: Vec<crate::spiral::QuarterArc<f64>>,
    polyline: Vec<Point<f64>>,
    diagonals: [(Point<f64>, Point<f64>); 2],
    circumcircles: Vec<(Point<f64>, f64)>,
    pole_circle: (Point<f64>, f64),
    poles: Vec<Point<f64>>,
}

impl Scene {
    fn build(spec: &SpiralSpec<f64>, n: usize, opts: &RenderOptions) -> Result<Scene> {
        let squares = whirl_squares_capped(spec, n, DEFAULT_SQUARE_CAP)?;
        let arcs = spiral_arcs_capped(spec, n, DEFAULT_SQUARE_CAP)?;
        let polyline = if opts.arcs_as_polyline {
            arc_polyline(spec, n, opts.polyline_samples)?
        } else {
            Vec::new()
        };
        let v = extreme_vertices(spec);
        let l = spec.side();
        let c0 = spec.center0();
        let mut poles = vec![pole_closed(spec).point];
        for &m in &opts.extra_pole_ratios {
            let other = SpiralSpec::new(m, l, c0)?;
            poles.push(pole_closed(&other).point);
        }
        let radius = l / std::f64::consts::SQRT_2;
        for p in &poles {
            let off = (p.distance(c0) - radius).abs();
            if !(off <= POLE_CIRCLE_TOL * l) {
                return Err(SpiralError::RenderCheck(format!(
                    "pole ({}, {}) is {off:e} off the pole circle",
                    p.x, p.y
                )));
            }
        }
        Ok(Scene {
            circumcircles: squares
                .iter()
                .map(|s| (s.center, s.circumcircle().radius))
                .collect(),
            squares: squares.iter().map(|s| (s.center, s.side)).collect(),
            arcs,
            polyline,
            diagonals: [(v.a, v.c), (v.b, v.d)],
            pole_circle: (c0, radius),
            poles,
        })
    }

    fn bounds(&self, layers: &BTreeSet<Layer>) -> Aabb<f64> {
        let disc = |c: Point<f64>, r: f64| {
            Aabb::new(Point::new(c.x - r, c.y - r), Point::new(c.x + r, c.y + r))
        };
        let mut boxes: Vec<Aabb<f64>> = Vec::new();
        for layer in layers {
            match layer {
                Layer::Squares => boxes.extend(self.squares.iter().map(|&(c, s)| disc(c, 0.5 * s))),
                Layer::Arcs => boxes.extend(Aabb::from_points(
                    self.arcs.iter().flat_map(|a| a.sample(9)),
                )),
                Layer::Diagonals => boxes.extend(Aabb::from_points(
                    self.diagonals.iter().flat_map(|&(a, b)| [a, b]),
                )),
                Layer::Circumcircles => {
                    boxes.extend(self.circumcircles.iter().map(|&(c, r)| disc(c, r)))
                }
                Layer::PoleCircle => boxes.push(disc(self.pole_circle.0, self.pole_circle.1)),
                Layer::Pole => boxes.extend(Aabb::from_points(self.poles.iter().copied())),
            }
        }
        // With nothing drawn, or only points, frame the first square too.
        let first = disc(self.squares[0].0, 0.5 * self.squares[0].1);
        match boxes.into_iter().reduce(|a, b| a.union(&b)) {
            Some(b) if b.width() > 0.0 && b.height() > 0.0 => b,
            Some(b) => b.union(&first),
            None => first,
        }
    }
}

fn style_attrs(out: &mut String, style: &Style, scale: f64) {
    let fill = style.fill.as_deref().unwrap_or("none");
    write!(
        out,
        r#" fill="{fill}" stroke="{}" stroke-width="{}""#,
        style.stroke,
        style.width_px / scale
    )
    .unwrap();
    if !style.dash_px.is_empty() {
        let dash: Vec<String> = style
            .dash_px
            .iter()
            .map(|d| (d / scale).to_string())
            .collect();
        write!(out, r#" stroke-dasharray="{}""#, dash.join(" ")).unwrap();
    }
}

/// The frame [`render_svg`] uses for these inputs.
pub fn render_frame(
    spec: &SpiralSpec<f64>,
    n_squares: usize,
    opts: &RenderOptions,
) -> Result<Frame> {
    opts.validate()?;
    let scene = Scene::build(spec, n_squares, opts)?;
    Ok(Frame::fit(&scene.bounds(&opts.layers), opts))
}

/// SVG 1.1 document with one `<g id="…">` per requested layer.
///
/// The view is fitted to the union of the drawn layers plus the margin.
pub fn render_svg(
    spec: &SpiralSpec<f64>,
    n_squares: usize,
    opts: &RenderOptions,
) -> Result<String> {
    opts.validate()?;
    let scene = Scene::build(spec, n_squares, opts)?;
    let frame = Frame::fit(&scene.bounds(&opts.layers), opts);
    if !(frame.scale.is_finite()
        && frame.scale > 0.0
        && frame.tx.is_finite()
        && frame.ty.is_finite())
    {
        return Err(SpiralError::RenderCheck(format!(
            "degenerate view {frame:?}"
        )));
    }
    let s = frame.scale;
    let (w, h) = (opts.width_px, opts.height_px);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<g id="figure" transform="matrix({s} 0 0 {} {} {})">"#,
        -s, frame.tx, frame.ty
    )
    .unwrap();

    for &layer in &opts.layers {
        write!(out, r#"<g id="{}""#, layer.id()).unwrap();
        style_attrs(&mut out, opts.style(layer), s);
        out.push_str(">\n");
        match layer {
            Layer::Squares => {
                for &(c, side) in &scene.squares {
                    writeln!(
                        out,
                        r#"<rect x="{}" y="{}" width="{side}" height="{side}"/>"#,
                        c.x - 0.5 * side,
                        c.y - 0.5 * side
                    )
                    .unwrap();
                }
            }
            Layer::Arcs => {
                if opts.arcs_as_polyline {
                    let pts: Vec<String> = scene
                        .polyline
                        .iter()
                        .map(|p| format!("{},{}", p.x, p.y))
                        .collect();
                    writeln!(out, r#"<polyline points="{}"/>"#, pts.join(" ")).unwrap();
                } else {
                    let first = scene.arcs[0].start;
                    write!(out, r#"<path d="M {} {}"#, first.x, first.y).unwrap();
                    // Clockwise in the y-up frame is sweep-flag 0.
                    for a in &scene.arcs {
                        write!(
                            out,
                            " A {r} {r} 0 0 0 {} {}",
                            a.end.x,
                            a.end.y,
                            r = a.radius
                        )
                        .unwrap();
                    }
                    out.push_str("\"/>\n");
                }
            }
            Layer::Diagonals => {
                for &(a, b) in &scene.diagonals {
                    writeln!(
                        out,
                        r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                        a.x, a.y, b.x, b.y
                    )
                    .unwrap();
                }
            }
            Layer::Circumcircles => {
                for &(c, r) in &scene.circumcircles {
                    writeln!(out, r#"<circle cx="{}" cy="{}" r="{r}"/>"#, c.x, c.y).unwrap();
                }
            }
            Layer::PoleCircle => {
                let (c, r) = scene.pole_circle;
                writeln!(out, r#"<circle cx="{}" cy="{}" r="{r}"/>"#, c.x, c.y).unwrap();
            }
            Layer::Pole => {
                let r = opts.pole_marker_px / s;
                for p in &scene.poles {
                    writeln!(out, r#"<circle cx="{}" cy="{}" r="{r}"/>"#, p.x, p.y).unwrap();
                }
            }
        }
        out.push_str("</g>\n");
    }
    out.push_str("</g>\n</svg>\n");

    if out.contains("NaN") || out.contains("inf") {
        return Err(SpiralError::RenderCheck(
            "non-finite coordinate in output".into(),
        ));
    }
    Ok(out)
}

use std::collections::BTreeSet;

use mspiral::render::{render_frame, render_svg, Layer, RenderOptions};
use mspiral::spiral::{pole_closed, SpiralSpec};
use mspiral::verify::DEFAULT_GRID;
use mspiral::Point;

fn numbers(s: &str) -> Vec<f64> {
    s.split([' ', ',', '(', ')'])
        .filter_map(|t| t.parse::<f64>().ok())
        .collect()
}

/// `(a, d, e, f)` of the outer `matrix(a 0 0 d e f)`.
fn outer_matrix(doc: &roxmltree::Document) -> (f64, f64, f64, f64) {
    let g = doc
        .descendants()
        .find(|n| n.attribute("transform").is_some())
        .unwrap();
    let t = g.attribute("transform").unwrap();
    assert!(t.starts_with("matrix("));
    let v = numbers(t);
    assert_eq!(v.len(), 6);
    assert_eq!((v[1], v[2]), (0.0, 0.0));
    (v[0], v[3], v[4], v[5])
}

#[test]
fn well_formed_with_finite_coordinates() {
    for m in DEFAULT_GRID {
        let spec = SpiralSpec::new(m, 3.0, Point::new(-2.0, 1.0)).unwrap();
        let opts = RenderOptions::default().with_layers(Layer::ALL);
        let svg = render_svg(&spec, 12, &opts).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let root = doc.root_element();
        assert_eq!(root.tag_name().name(), "svg");
        assert_eq!(root.attribute("version"), Some("1.1"));
        for node in doc.descendants().filter(|n| n.is_element()) {
            for attr in node.attributes() {
                if [
                    "x", "y", "width", "height", "cx", "cy", "r", "x1", "y1", "x2", "y2",
                ]
                .contains(&attr.name())
                {
                    let v: f64 = attr.value().parse().unwrap();
                    assert!(v.is_finite(), "m={m} {}={}", attr.name(), attr.value());
                }
                if ["d", "points", "transform"].contains(&attr.name()) {
                    assert!(!attr.value().contains("NaN") && !attr.value().contains("inf"));
                }
            }
        }
    }
}

#[test]
fn groups_present_iff_requested() {
    let spec = SpiralSpec::unit(1.7).unwrap();
    let subsets: [&[Layer]; 4] = [
        &[],
        &[Layer::Squares],
        &[Layer::Arcs, Layer::Pole, Layer::PoleCircle],
        &Layer::ALL,
    ];
    for layers in subsets {
        let opts = RenderOptions::default().with_layers(layers.iter().copied());
        let svg = render_svg(&spec, 6, &opts).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let ids: BTreeSet<&str> = doc
            .descendants()
            .filter(|n| n.has_tag_name("g"))
            .filter_map(|n| n.attribute("id"))
            .filter(|id| *id != "figure")
            .collect();
        let want: BTreeSet<&str> = layers.iter().map(|l| l.id()).collect();
        assert_eq!(ids, want);
    }
}

#[test]
fn pole_marker_maps_onto_the_pole_pixel() {
    for m in DEFAULT_GRID {
        let spec = SpiralSpec::new(m, 2.0, Point::new(5.0, -3.0)).unwrap();
        let opts = RenderOptions::default();
        let svg = render_svg(&spec, 10, &opts).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let (a, d, e, f) = outer_matrix(&doc);
        assert!(a > 0.0 && d == -a, "exactly one flip, uniform scale");
        let marker = doc
            .descendants()
            .find(|n| n.attribute("id") == Some("pole"))
            .unwrap()
            .children()
            .find(|n| n.has_tag_name("circle"))
            .unwrap();
        let cx: f64 = marker.attribute("cx").unwrap().parse().unwrap();
        let cy: f64 = marker.attribute("cy").unwrap().parse().unwrap();
        let pole = pole_closed(&spec).point;
        let (px, py) = (a * cx + e, d * cy + f);
        let (ex, ey) = (a * pole.x + e, d * pole.y + f);
        assert!((px - ex).abs() < 0.5 && (py - ey).abs() < 0.5, "m={m}");
        assert!((0.0..=800.0).contains(&px) && (0.0..=600.0).contains(&py));
        let frame = render_frame(&spec, 10, &opts).unwrap();
        let q = frame.to_px(pole);
        assert!((q.x - px).abs() < 1e-9 && (q.y - py).abs() < 1e-9);
    }
}

#[test]
fn grid_poles_lie_on_the_rendered_circle() {
    let spec = SpiralSpec::unit(2.0).unwrap();
    let opts = RenderOptions {
        extra_pole_ratios: DEFAULT_GRID.to_vec(),
        ..RenderOptions::default().with_layers([Layer::Pole, Layer::PoleCircle])
    };
    let svg = render_svg(&spec, 4, &opts).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let circle = doc
        .descendants()
        .find(|n| n.attribute("id") == Some("pole_circle"))
        .unwrap()
        .children()
        .find(|n| n.has_tag_name("circle"))
        .unwrap();
    let get = |n: roxmltree::Node, k: &str| -> f64 { n.attribute(k).unwrap().parse().unwrap() };
    let (ccx, ccy, r) = (get(circle, "cx"), get(circle, "cy"), get(circle, "r"));
    assert!((r - 0.5f64.sqrt()).abs() < 1e-15);
    let markers: Vec<_> = doc
        .descendants()
        .find(|n| n.attribute("id") == Some("pole"))
        .unwrap()
        .children()
        .filter(|n| n.has_tag_name("circle"))
        .collect();
    assert_eq!(markers.len(), 1 + DEFAULT_GRID.len());
    for mk in markers {
        let d = ((get(mk, "cx") - ccx).powi(2) + (get(mk, "cy") - ccy).powi(2)).sqrt();
        assert!((d - r).abs() < 1e-12, "marker off circle by {}", d - r);
    }
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let spec = SpiralSpec::new(1.3247179572, 1.5, Point::new(0.1, 0.2)).unwrap();
    let opts = RenderOptions {
        extra_pole_ratios: vec![2.0, 3.0],
        ..RenderOptions::default().with_layers(Layer::ALL)
    };
    let a = render_svg(&spec, 20, &opts).unwrap();
    let b = render_svg(&spec, 20, &opts).unwrap();
    assert_eq!(a.as_bytes(), b.as_bytes());
}

#[test]
fn arc_path_endpoints_are_square_corners() {
    let spec = SpiralSpec::unit(2.0).unwrap();
    let svg = render_svg(
        &spec,
        3,
        &RenderOptions::default().with_layers([Layer::Arcs]),
    )
    .unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let d = doc
        .descendants()
        .find(|n| n.has_tag_name("path"))
        .unwrap()
        .attribute("d")
        .unwrap();
    let v = numbers(d);
    // M x y, then per arc: r r rot large sweep x y.
    assert_eq!(v.len(), 2 + 3 * 7);
    assert_eq!((v[0], v[1]), (-0.5, -0.5));
    for k in 0..3 {
        let arc = &v[2 + 7 * k..2 + 7 * (k + 1)];
        assert_eq!(arc[4], 0.0, "sweep flag");
        assert_eq!(arc[3], 0.0, "large-arc flag");
    }
    assert_eq!((v[7], v[8]), (0.5, 0.5));
}

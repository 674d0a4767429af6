use mspiral::spiral::{square_center_closed, SpiralSpec};
use mspiral::tables::{emit_centers_csv, emit_pfib_csv};
use mspiral::Point;

#[test]
fn centers_round_trip() {
    for m in [1.01, 1.3247179572, mspiral::PHI, 2.0, 60.0] {
        let spec = SpiralSpec::new(m, 2.5, Point::new(-1.25, 3.0)).unwrap();
        let text = emit_centers_csv(&spec, 40).unwrap();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(rdr.headers().unwrap(), vec!["i", "x", "y", "side"]);
        let mut n = 0;
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec.unwrap();
            let i: usize = rec[0].parse().unwrap();
            assert_eq!(i, k);
            let x: f64 = rec[1].parse().unwrap();
            let y: f64 = rec[2].parse().unwrap();
            let side: f64 = rec[3].parse().unwrap();
            let c = square_center_closed(&spec, i);
            let close = |a: f64, b: f64| a == b || ((a - b) / b).abs() <= 1e-15;
            assert!(close(x, c.x) && close(y, c.y), "m={m} i={i}");
            assert!(close(side, spec.side_of(i)));
            n += 1;
        }
        assert_eq!(n, 41);
    }
}

#[test]
fn first_row_is_the_spec() {
    let spec = SpiralSpec::new(3.0, 0.125, Point::new(0.5, -0.25)).unwrap();
    let text = emit_centers_csv(&spec, 0).unwrap();
    assert_eq!(text, "i,x,y,side\n0,0.5,-0.25,0.125\n");
}

#[test]
fn pfib_parses() {
    let text = emit_pfib_csv(64).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let alphas: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[1].parse().unwrap())
        .collect();
    assert_eq!(alphas.len(), 65);
    assert!(alphas.windows(2).all(|w| w[0] > w[1]));
}

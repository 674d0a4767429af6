//! CSV tables of square centres and p-Fibonacci ratios.

use crate::error::{Result, SpiralError};
use crate::sections::p_fibonacci_table;
use crate::spiral::{square_center_closed, SpiralSpec, DEFAULT_SQUARE_CAP};

/// `printf("%.17g")`.
pub fn fmt_g17(x: f64) -> String {
    fmt_g(x, 17)
}

/// `printf("%.{digits}g")`: `digits` significant digits, trailing zeros
/// dropped, scientific notation below `1e-4` and from `10^digits` up.
pub fn fmt_g(x: f64, digits: usize) -> String {
    let digits = digits.clamp(1, 17) as i32;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    // `{:e}` rounds correctly to the requested mantissa length.
    let sci = format!("{:.*e}", (digits - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Header `i,x,y,side`, then rows `0..=max_i` from the closed-form centres.
pub fn emit_centers_csv(spec: &SpiralSpec<f64>, max_i: usize) -> Result<String> {
    if max_i > DEFAULT_SQUARE_CAP {
        return Err(SpiralError::CapExceeded {
            requested: max_i,
            cap: DEFAULT_SQUARE_CAP,
        });
    }
    let rows = (0..=max_i).map(|i| {
        let c = square_center_closed(spec, i);
        vec![
            i.to_string(),
            fmt_g17(c.x),
            fmt_g17(c.y),
            fmt_g17(spec.side_of(i)),
        ]
    });
    Ok(csv_text(&["i", "x", "y", "side"], rows))
}

/// Header `p,alpha,residual,iterations`, rows `0..=p_max`.
pub fn emit_pfib_csv(p_max: usize) -> Result<String> {
    let table = p_fibonacci_table::<f64>(p_max)?;
    let rows = table.into_iter().map(|r| {
        vec![
            r.p.to_string(),
            fmt_g17(r.alpha),
            fmt_g17(r.residual),
            r.iterations.to_string(),
        ]
    });
    Ok(csv_text(&["p", "alpha", "residual", "iterations"], rows))
}

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use mspiral::fitting::{fit_spiral, synth_samples, SampleSet};
use mspiral::render::{render_svg, Layer, RenderOptions};
use mspiral::sections::{p_fibonacci, P_MAX_CAP};
use mspiral::spiral::{pole_closed, pole_iterative, SpiralSpec, DEFAULT_TOL};
use mspiral::tables::{emit_centers_csv, emit_pfib_csv, fmt_g, fmt_g17};
use mspiral::verify::{run_suite, DEFAULT_GRID, DEFAULT_MAX_I};
use mspiral::Point;

/// Whirling-square spirals: poles, centre tables, p-Fibonacci ratios,
/// property checks, fitting and SVG figures.
#[derive(Parser, Debug)]
#[command(name = "mspiral", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Side ratio between consecutive squares (m > 1).
    #[arg(long, global = true)]
    m: Option<f64>,
    /// Side of the first square.
    #[arg(long = "L", global = true, default_value_t = 1.0)]
    side: f64,
    /// Centre of the first square as `x,y`.
    #[arg(long, global = true, value_parser = parse_point, default_value = "0,0", allow_hyphen_values = true)]
    origin: Point<f64>,
    /// Tolerance for the iterative pole or the p-Fibonacci root.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for synthetic samples.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the closed-form and iterative pole.
    Pole,
    /// CSV of square centres `i,x,y,side`.
    Centers {
        #[arg(long, default_value_t = 10)]
        max_i: usize,
    },
    /// CSV of p-Fibonacci ratios.
    Pfib {
        #[arg(long, default_value_t = 5)]
        p_max: usize,
    },
    /// Run the property suite and print the JSON report; exits 1 on any failure.
    Verify {
        /// Comma-separated ratios.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_MAX_I)]
        max_i: usize,
    },
    /// Fit a ratio and pole to ordered samples; prints JSON.
    Fit(FitArgs),
    /// Draw an SVG figure.
    Render(RenderArgs),
}

#[derive(Args, Debug)]
struct FitArgs {
    /// CSV with columns x,y (header optional). Omit to fit synthetic samples.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Number of synthetic samples.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Synthetic noise, relative to L.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    init_pole: Option<Point<f64>>,
    #[arg(long)]
    init_m: Option<f64>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    /// Number of squares.
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 800)]
    width: u32,
    #[arg(long, default_value_t = 600)]
    height: u32,
    #[arg(long, default_value_t = 0.05)]
    margin: f64,
    /// Comma-separated layers: squares, arcs, diagonals, circumcircles, pole, pole_circle.
    #[arg(long, value_delimiter = ',', value_parser = parse_layer)]
    layers: Option<Vec<Layer>>,
    /// Draw arcs as polylines.
    #[arg(long)]
    polyline: bool,
    /// Extra ratios whose poles are marked.
    #[arg(long, value_delimiter = ',')]
    pole_ratios: Vec<f64>,
}

fn parse_point(s: &str) -> Result<Point<f64>, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok(Point::new(parse(x)?, parse(y)?))
}

fn parse_layer(s: &str) -> Result<Layer, String> {
    Layer::from_id(s.trim()).ok_or_else(|| {
        let names: Vec<_> = Layer::ALL.iter().map(|l| l.id()).collect();
        format!("unknown layer {s:?} (expected one of {})", names.join(", "))
    })
}

/// A command-line mistake that clap cannot see, such as a missing `--m`.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

impl Global {
    fn spec(&self, command: &str) -> anyhow::Result<SpiralSpec<f64>> {
        let m = self
            .m
            .ok_or_else(|| Usage(format!("`{command}` needs --m")))?;
        Ok(SpiralSpec::new(m, self.side, self.origin)?)
    }
}

fn read_samples(path: &PathBuf) -> anyhow::Result<SampleSet<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut points = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() < 2 {
            bail!("line {}: expected x,y", k + 1);
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => points.push(Point::new(x, y)),
            _ if k == 0 => continue,
            _ => bail!("line {}: cannot parse {:?}", k + 1, rec.as_slice()),
        }
    }
    Ok(SampleSet::new(points)?)
}

/// Output text and whether the command succeeded.
fn execute(cli: &Cli) -> anyhow::Result<(String, bool)> {
    let g = &cli.global;
    match &cli.command {
        Command::Pole => {
            let spec = g.spec("pole")?;
            let closed = pole_closed(&spec).point;
            let it = pole_iterative(&spec, g.tol.unwrap_or(DEFAULT_TOL))?;
            let text = format!(
                "closed: ({},{})\niterative: ({},{}) iterations={} residual={}\n",
                fmt_g(closed.x, 15),
                fmt_g(closed.y, 15),
                fmt_g(it.point.x, 15),
                fmt_g(it.point.y, 15),
                it.iterations,
                fmt_g(it.residual, 3),
            );
            Ok((text, true))
        }
        Command::Centers { max_i } => Ok((emit_centers_csv(&g.spec("centers")?, *max_i)?, true)),
        Command::Pfib { p_max } => match g.tol {
            None => Ok((emit_pfib_csv(*p_max)?, true)),
            Some(tol) => {
                if *p_max > P_MAX_CAP {
                    bail!(mspiral::SpiralError::CapExceeded {
                        requested: *p_max,
                        cap: P_MAX_CAP
                    });
                }
                let mut text = String::from("p,alpha,residual,iterations\n");
                for p in 0..=*p_max {
                    let r = p_fibonacci(p, tol)?;
                    text.push_str(&format!(
                        "{},{},{},{}\n",
                        r.p,
                        fmt_g17(r.alpha),
                        fmt_g17(r.residual),
                        r.iterations
                    ));
                }
                Ok((text, true))
            }
        },
        Command::Verify { grid, max_i } => {
            let grid = grid.clone().unwrap_or_else(|| DEFAULT_GRID.to_vec());
            let report = run_suite(&grid, g.side, *max_i)?;
            let mut text = report.to_json();
            text.push('\n');
            Ok((text, report.all_passed()))
        }
        Command::Fit(args) => {
            let samples = match &args.input {
                Some(path) => read_samples(path)?,
                None => synth_samples(&g.spec("fit")?, args.n, args.sigma, g.seed)?,
            };
            let fit = fit_spiral(&samples, args.init_pole, args.init_m)?;
            let mut text = serde_json::to_string_pretty(&fit)?;
            text.push('\n');
            Ok((text, true))
        }
        Command::Render(args) => {
            let spec = g.spec("render")?;
            let mut opts = RenderOptions {
                width_px: args.width,
                height_px: args.height,
                margin_fraction: args.margin,
                arcs_as_polyline: args.polyline,
                extra_pole_ratios: args.pole_ratios.clone(),
                ..RenderOptions::default()
            };
            if let Some(layers) = &args.layers {
                opts.layers = layers.iter().copied().collect();
            }
            Ok((render_svg(&spec, args.n, &opts)?, true))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((text, ok)) => {
            let written = match &cli.global.out {
                Some(path) => {
                    fs::write(path, &text).with_context(|| format!("writing {}", path.display()))
                }
                None => std::io::stdout()
                    .write_all(text.as_bytes())
                    .context("writing output"),
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(failure_code(&e))
        }
    }
}

/// 2 for command-line mistakes (as clap uses), 1 for everything else.
fn failure_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Usage>().is_some() {
        2
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> anyhow::Result<(String, bool)> {
        let cli = Cli::try_parse_from(std::iter::once("mspiral").chain(args.iter().copied()))?;
        execute(&cli)
    }

    #[test]
    fn pole_at_ratio_two() {
        let (text, ok) = run(&["pole", "--m", "2"]).unwrap();
        assert!(ok);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("closed: (0.7,-0.1)"));
        assert!(lines.next().unwrap().starts_with("iterative: (0.7"));
    }

    #[test]
    fn global_flags_go_either_side_of_the_subcommand() {
        let a = run(&["--m", "2", "--L", "3", "--origin", "-1,2", "pole"]).unwrap();
        let b = run(&["pole", "--origin", "-1,2", "--L", "3", "--m", "2"]).unwrap();
        assert_eq!(a, b);
        assert!(a.0.starts_with("closed: (1.1,1.7)"));
    }

    #[test]
    fn missing_ratio_is_a_usage_error() {
        for cmd in ["pole", "centers", "render", "fit"] {
            let e = run(&[cmd]).unwrap_err();
            assert_eq!(failure_code(&e), 2, "{cmd}");
        }
    }

    #[test]
    fn bad_values_are_computation_errors() {
        for args in [
            &["pole", "--m", "1"][..],
            &["centers", "--m", "2", "--max-i", "65"],
            &["pfib", "--p-max", "65"],
            &["pfib", "--p-max", "65", "--tol", "1e-12"],
            &["verify", "--max-i", "65"],
            &["render", "--m", "2", "--width", "10"],
        ] {
            let e = run(args).unwrap_err();
            assert_eq!(failure_code(&e), 1, "{args:?}");
        }
    }

    #[test]
    fn clap_rejects_malformed_flags() {
        for args in [
            &["bogus"][..],
            &["pole", "--m", "x"],
            &["pole", "--m", "2", "--origin", "1"],
            &["render", "--m", "2", "--layers", "squares,spokes"],
        ] {
            let cli = Cli::try_parse_from(std::iter::once("mspiral").chain(args.iter().copied()));
            assert_eq!(cli.unwrap_err().exit_code(), 2, "{args:?}");
        }
    }

    #[test]
    fn centers_table() {
        let (text, _) = run(&["centers", "--m", "2", "--max-i", "2"]).unwrap();
        assert_eq!(
            text,
            "i,x,y,side\n0,0,0,1\n1,0.75,0.25,0.5\n2,0.875,-0.125,0.25\n"
        );
    }

    #[test]
    fn pfib_with_and_without_tolerance() {
        let (default, _) = run(&["pfib", "--p-max", "3"]).unwrap();
        let (loose, _) = run(&["pfib", "--p-max", "3", "--tol", "1e-8"]).unwrap();
        assert_eq!(default.lines().count(), 5);
        assert_eq!(loose, default);
        let e = run(&["pfib", "--tol", "1e-6"]).unwrap_err();
        assert_eq!(failure_code(&e), 1);
    }

    #[test]
    fn verify_flags_a_bad_grid_entry_without_erroring() {
        let (text, ok) = run(&["verify", "--grid", "1,2", "--max-i", "3"]).unwrap();
        assert!(!ok);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["summary"]["passed"].as_u64().unwrap() > 0);
        let (_, ok) = run(&["verify", "--grid", "2,5", "--max-i", "3"]).unwrap();
        assert!(ok);
    }

    #[test]
    fn fit_reads_csv_with_or_without_header() {
        let spec = SpiralSpec::unit(2.0).unwrap();
        let set = synth_samples(&spec, 60, 0.0, 0).unwrap();
        let (synthetic, _) = run(&["fit", "--m", "2", "--n", "60"]).unwrap();
        for header in [true, false] {
            let mut f = tempfile::NamedTempFile::new().unwrap();
            if header {
                writeln!(f, "x,y").unwrap();
            }
            for p in &set.points {
                writeln!(f, "{},{}", fmt_g17(p.x), fmt_g17(p.y)).unwrap();
            }
            let path = f.path().to_str().unwrap();
            let (from_file, _) = run(&["fit", "--input", path]).unwrap();
            assert_eq!(from_file, synthetic);
        }
    }

    #[test]
    fn fit_rejects_garbage_rows() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "x,y\n1,2\nthree,4").unwrap();
        let e = run(&["fit", "--input", f.path().to_str().unwrap()]).unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }

    #[test]
    fn render_layers_and_pole_ratios() {
        let (svg, _) = run(&[
            "render",
            "--m",
            "2",
            "--n",
            "4",
            "--layers",
            "squares,pole",
            "--pole-ratios",
            "5,60",
        ])
        .unwrap();
        assert!(svg.contains(r#"id="squares""#) && svg.contains(r#"id="pole""#));
        assert!(!svg.contains(r#"id="arcs""#));
        assert_eq!(svg.matches("<circle").count(), 3);
    }
}

//! Command-line front end for the phase rank toolkit.
//!
//! Every subcommand reads a matrix from `--input FILE` (JSON) or
//! `--matrix` (inline grammar `"1,1,1;1,i,-i;1,1,e^{ipi/3}"`), except the
//! synthetic ones (`colop-region`, `volume`, `upper-bound`, `slice`).
//! Randomized paths honor `--seed`, falling back to the `PHASERANK_SEED`
//! environment variable and then zero. Output goes to stdout or
//! `--out PATH`; JSON results carry a `provenance` object naming the
//! method behind each field, CSV and SVG outputs carry comment headers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use phaserank::bounds::{analyze, structural_upper_bound};
use phaserank::detvec::hull_plot_data;
use phaserank::error::{Error, Result};
use phaserank::io::{load_matrix, matrix_to_json, parse_sign_matrix};
use phaserank::matrix::PhaseMatrix;
use phaserank::rank3::{decide_rank3, witness_rank3, WitnessOutcome};
use phaserank::raster::{coamoeba_slice, colop_region_raster, SliceTemplate};
use phaserank::scaling::{
    colop_volume_fraction, coverage_check_3xm, search_noncolopsided_scaling,
    sign_rank_is_maximal, CellStatus, Scalar, TorusGrid, DEFAULT_RESOLUTION,
};
use phaserank::svg::{coverage_svg, hull_svg, membership_svg, slice_svgs};

#[derive(Parser)]
#[command(name = "phaserank", version, about = "Phase rank analysis for complex phase matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MatrixInput {
    /// Path to a matrix file (JSON: angles, angles_pi, or signs).
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Inline matrix, e.g. "1,1,1;1,i,-i;1,1,e^{ipi/3}".
    #[arg(long, value_name = "ENTRIES")]
    matrix: Option<String>,
}

impl MatrixInput {
    fn load(&self) -> Result<PhaseMatrix> {
        load_matrix(self.input.as_deref(), self.matrix.as_deref())
    }
}

#[derive(Args)]
struct OutputArg {
    /// Write the result here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl OutputArg {
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                std::fs::write(path, text)?;
                Ok(())
            }
            None => {
                use std::io::Write;
                let mut stdout = std::io::stdout().lock();
                // tolerate a closed pipe (e.g. piping into `head`)
                match writeln!(stdout, "{}", text.trim_end_matches('\n')) {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                    other => other.map_err(Error::from),
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Full rank report: exact decisions where available plus bounds.
    Analyze {
        #[command(flatten)]
        matrix: MatrixInput,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Exact phase rank of a 3x3 matrix, with a witness when deficient.
    Rank3 {
        #[command(flatten)]
        matrix: MatrixInput,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Explicit rank-deficient witness matrix for a 3x3 input.
    Witness {
        #[command(flatten)]
        matrix: MatrixInput,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Torus coverage certificate for a 3xm matrix.
    Coverage {
        #[command(flatten)]
        matrix: MatrixInput,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Raster of the colopsided region of three points on the circle.
    ColopRegion {
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long, value_enum, default_value = "svg")]
        format: Format,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Determinant monomial points and their convex hull.
    DetvecHull {
        #[command(flatten)]
        matrix: MatrixInput,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Search for a row scaling making every column non-colopsided.
    ScalingSearch {
        #[command(flatten)]
        matrix: MatrixInput,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Decide whether a sign pattern has maximal sign rank.
    SignMax {
        #[command(flatten)]
        matrix: MatrixInput,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Monte-Carlo estimate of the colopsided volume fraction.
    Volume {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Structural upper bound on phase rank from the matrix shape alone.
    UpperBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Sweep free entries of a 3x3 template and raster the rank decision.
    Slice {
        /// Template in the inline grammar with t1/t2/t3 free markers.
        #[arg(long, value_name = "ENTRIES")]
        template: String,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: OutputArg,
    },
}

/// Round to four decimals, ties to even, for stable report output.
fn round4(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let scaled = x * 1e4;
    let floor = scaled.floor();
    let frac = scaled - floor;
    let units = if (frac - 0.5).abs() < 1e-9 {
        if (floor as i64).rem_euclid(2) == 0 {
            floor
        } else {
            floor + 1.0
        }
    } else {
        scaled.round()
    };
    units / 1e4
}

fn seed_or_env(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("PHASERANK_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

fn provenance(entries: &[(&str, &str)]) -> Value {
    let map: BTreeMap<&str, &str> = entries.iter().copied().collect();
    json!(map)
}

fn csv_header(fields: &[(&str, &str)]) -> String {
    let mut s = String::new();
    for (k, v) in fields {
        let _ = writeln!(s, "# {}: {}", k, v);
    }
    s
}

fn svg_with_header(svg: &str, fields: &[(&str, &str)]) -> String {
    let mut s = String::new();
    for (k, v) in fields {
        let _ = writeln!(s, "<!-- {}: {} -->", k, v);
    }
    s + svg
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json serialization")
}

fn run_analyze(matrix: &MatrixInput, output: &OutputArg) -> Result<()> {
    let theta = matrix.load()?;
    let report = analyze(&theta)?;
    let mut body = serde_json::to_value(&report).map_err(|e| Error::Internal(e.to_string()))?;
    if let Some(obj) = body.as_object_mut() {
        for key in ["forster_lb", "forster_star_lb", "gamma2_lb"] {
            if let Some(v) = obj.get_mut(key) {
                if let Some(x) = v.as_f64() {
                    *v = json!(round4(x));
                }
            }
        }
    }
    output.emit(&pretty(&body))
}

fn run_rank3(matrix: &MatrixInput, output: &OutputArg) -> Result<()> {
    let theta = matrix.load()?;
    let decision = decide_rank3(&theta)?;
    let witness = if decision.rank < 3 {
        match witness_rank3(&theta)? {
            WitnessOutcome::Witness(w) => Some(w),
            WitnessOutcome::RankIsThree => None,
        }
    } else {
        None
    };
    let body = json!({
        "rank": decision.rank,
        "certificate": decision.certificate,
        "margin": decision.margin,
        "boundary": decision.boundary,
        "witness": witness,
        "provenance": provenance(&[
            ("rank", "relative-interior test of the determinant monomial vector"),
            ("witness", "balanced monomial coefficients lifted to log-moduli"),
        ]),
    });
    output.emit(&pretty(&body))
}

fn run_witness(matrix: &MatrixInput, output: &OutputArg) -> Result<()> {
    let theta = matrix.load()?;
    let body = match witness_rank3(&theta)? {
        WitnessOutcome::Witness(w) => json!({
            "rank_deficient": true,
            "matrix": w.matrix,
            "det_residual": w.det_residual,
            "row_swap": w.row_swap,
            "phases": matrix_to_json(&theta),
            "provenance": provenance(&[
                ("matrix", "balanced monomial coefficients lifted to log-moduli"),
                ("det_residual", "determinant of the emitted matrix"),
            ]),
        }),
        WitnessOutcome::RankIsThree => json!({
            "rank_deficient": false,
            "rank": 3,
            "provenance": provenance(&[
                ("rank", "colopsided determinant monomial vector"),
            ]),
        }),
    };
    output.emit(&pretty(&body))
}

fn coverage_csv(grid: &TorusGrid) -> String {
    let mut s = String::from("s,t,status\n");
    let h = std::f64::consts::TAU / grid.resolution as f64;
    for a in 0..grid.resolution {
        for b in 0..grid.resolution {
            let status = match grid.cells[a * grid.resolution + b] {
                CellStatus::CertifiedCovered => "covered",
                CellStatus::UncoveredWitness => "uncovered",
                CellStatus::Unresolved => "unresolved",
            };
            let _ = writeln!(s, "{:.6},{:.6},{}", (a as f64 + 0.5) * h, (b as f64 + 0.5) * h, status);
        }
    }
    s
}

fn run_coverage(
    matrix: &MatrixInput,
    resolution: usize,
    format: Format,
    output: &OutputArg,
) -> Result<()> {
    let theta = matrix.load()?;
    let cert = coverage_check_3xm(&theta, resolution)?;
    let header = [
        ("verdict", "torus coverage grid with Lipschitz margin bounds"),
        ("witness", "exactly re-verified non-colopsided scaling point"),
    ];
    match format {
        Format::Json => {
            let covered = cert
                .grid
                .cells
                .iter()
                .filter(|c| **c == CellStatus::CertifiedCovered)
                .count();
            let body = json!({
                "verdict": cert.verdict,
                "precondition_ok": cert.precondition_ok,
                "resolution": cert.grid.resolution,
                "covered_cells": covered,
                "total_cells": cert.grid.cells.len(),
                "witness": cert.grid.witness,
                "provenance": provenance(&header),
            });
            output.emit(&pretty(&body))
        }
        Format::Csv => output.emit(&(csv_header(&header) + &coverage_csv(&cert.grid))),
        Format::Svg => output.emit(&svg_with_header(&coverage_svg(&cert.grid), &header)),
    }
}

fn run_colop_region(resolution: usize, format: Format, output: &OutputArg) -> Result<()> {
    let membership = colop_region_raster(resolution)?;
    let header = [(
        "membership",
        "largest circular gap of three unit points (0, u, v)",
    )];
    match format {
        Format::Json => {
            let body = json!({
                "resolution": resolution,
                "membership": membership,
                "provenance": provenance(&header),
            });
            output.emit(&pretty(&body))
        }
        Format::Csv => {
            let mut s = csv_header(&header) + "u,v,colopsided\n";
            let h = std::f64::consts::TAU / resolution as f64;
            for a in 0..resolution {
                for b in 0..resolution {
                    let _ = writeln!(
                        s,
                        "{:.6},{:.6},{}",
                        (a as f64 + 0.5) * h,
                        (b as f64 + 0.5) * h,
                        membership[a * resolution + b]
                    );
                }
            }
            output.emit(&s)
        }
        Format::Svg => output.emit(&svg_with_header(
            &membership_svg(resolution, &membership),
            &header,
        )),
    }
}

fn run_detvec_hull(matrix: &MatrixInput, format: Format, output: &OutputArg) -> Result<()> {
    let theta = matrix.load()?;
    let points = hull_plot_data(&theta)?;
    let header = [(
        "points",
        "determinant expansion monomial phases with hull vertices marked",
    )];
    match format {
        Format::Json => {
            let body = json!({
                "points": points,
                "provenance": provenance(&header),
            });
            output.emit(&pretty(&body))
        }
        Format::Csv => {
            let mut s = csv_header(&header) + "re,im,multiplicity,hull_vertex\n";
            for p in &points {
                let _ = writeln!(s, "{:.12},{:.12},{},{}", p.re, p.im, p.multiplicity, p.is_hull_vertex);
            }
            output.emit(&s)
        }
        Format::Svg => output.emit(&svg_with_header(&hull_svg(&points), &header)),
    }
}

fn run_scaling_search(
    matrix: &MatrixInput,
    restarts: usize,
    seed: Option<u64>,
    output: &OutputArg,
) -> Result<()> {
    let theta = matrix.load()?;
    let seed = seed_or_env(seed);
    let found = search_noncolopsided_scaling(&theta, restarts, seed)?;
    let body = match found {
        Some(y) => {
            let scalars: Vec<Value> = y
                .scalars
                .iter()
                .map(|s| match s {
                    Scalar::Zero => json!({"zero": true}),
                    Scalar::Unit(a) => json!({"angle": a.value()}),
                })
                .collect();
            json!({
                "found": true,
                "seed": seed,
                "scaling": scalars,
                "provenance": provenance(&[(
                    "scaling",
                    "multi-start coordinate descent, re-verified exactly",
                )]),
            })
        }
        None => json!({
            "found": false,
            "seed": seed,
            "provenance": provenance(&[(
                "found",
                "multi-start coordinate descent; absence is not a proof",
            )]),
        }),
    };
    output.emit(&pretty(&body))
}

fn load_signs(matrix: &MatrixInput) -> Result<Vec<Vec<i8>>> {
    match (&matrix.input, &matrix.matrix) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)?;
            if text.trim_start().starts_with('{') {
                let v: Value =
                    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
                let signs = v
                    .get("signs")
                    .ok_or_else(|| Error::Parse("expected a \"signs\" field".into()))?;
                serde_json::from_value(signs.clone()).map_err(|e| Error::Parse(e.to_string()))
            } else {
                parse_sign_matrix(&text)
            }
        }
        (None, Some(s)) => parse_sign_matrix(s),
        _ => Err(Error::Domain(
            "provide exactly one of an input file or an inline matrix".into(),
        )),
    }
}

fn run_sign_max(matrix: &MatrixInput, output: &OutputArg) -> Result<()> {
    let signs = load_signs(matrix)?;
    let maximal = sign_rank_is_maximal(&signs)?;
    let body = json!({
        "rows": signs.len(),
        "cols": signs.first().map_or(0, |r| r.len()),
        "maximal": maximal,
        "provenance": provenance(&[(
            "maximal",
            "exhaustive row scaling over zero and sign scalars",
        )]),
    });
    output.emit(&pretty(&body))
}

fn run_volume(n: usize, samples: usize, seed: Option<u64>, output: &OutputArg) -> Result<()> {
    let seed = seed_or_env(seed);
    let fraction = colop_volume_fraction(n, samples, seed)?;
    let expected = if n <= 63 {
        Some(n as f64 / (1u64 << (n - 1)) as f64)
    } else {
        None
    };
    let body = json!({
        "n": n,
        "samples": samples,
        "seed": seed,
        "fraction": fraction,
        "expected": expected,
        "provenance": provenance(&[
            ("fraction", "Monte-Carlo estimate of the colopsided region"),
            ("expected", "closed-form volume of the colopsided region"),
        ]),
    });
    output.emit(&pretty(&body))
}

fn run_upper_bound(n: usize, m: usize, output: &OutputArg) -> Result<()> {
    let b = structural_upper_bound(n, m)?;
    let body = json!({
        "bound": b.bound,
        "n": b.rows,
        "m": b.cols,
        "k_star": b.k_star,
        "lambert_lower": b.lambert_lower,
        "lambert_upper": b.lambert_upper,
        "provenance": provenance(&[
            ("bound", "counting bound over rank-k unit-vector configurations"),
            ("lambert_lower", "Lambert-function bracket of the threshold"),
        ]),
    });
    output.emit(&pretty(&body))
}

fn run_slice(
    template: &str,
    resolution: usize,
    format: Format,
    output: &OutputArg,
) -> Result<()> {
    let template = SliceTemplate::parse(template)?;
    let raster = coamoeba_slice(&template, resolution)?;
    let header = [(
        "membership",
        "exact 3x3 rank decision over the swept torus grid",
    )];
    match format {
        Format::Json => {
            let body = json!({
                "resolution": raster.resolution,
                "axes": raster.axes,
                "membership": raster.membership,
                "provenance": provenance(&header),
            });
            output.emit(&pretty(&body))
        }
        Format::Csv => {
            let mut s = csv_header(&header);
            let h = std::f64::consts::TAU / resolution.max(1) as f64;
            match raster.axes {
                0 => {
                    s.push_str("member\n");
                    let _ = writeln!(s, "{}", raster.membership[0]);
                }
                2 => {
                    s.push_str("t1,t2,member\n");
                    for a in 0..resolution {
                        for b in 0..resolution {
                            let _ = writeln!(
                                s,
                                "{:.6},{:.6},{}",
                                (a as f64 + 0.5) * h,
                                (b as f64 + 0.5) * h,
                                raster.membership[a * resolution + b]
                            );
                        }
                    }
                }
                _ => {
                    s.push_str("t1,t2,t3,member\n");
                    for l in 0..resolution {
                        for a in 0..resolution {
                            for b in 0..resolution {
                                let idx = ((l * resolution) + a) * resolution + b;
                                let _ = writeln!(
                                    s,
                                    "{:.6},{:.6},{:.6},{}",
                                    (l as f64 + 0.5) * h,
                                    (a as f64 + 0.5) * h,
                                    (b as f64 + 0.5) * h,
                                    raster.membership[idx]
                                );
                            }
                        }
                    }
                }
            }
            output.emit(&s)
        }
        Format::Svg => {
            if raster.axes == 0 {
                return Err(Error::Domain(
                    "svg output needs two or three swept axes".into(),
                ));
            }
            let panels = slice_svgs(raster.resolution, raster.axes, &raster.membership);
            let joined = panels.join("\n");
            output.emit(&svg_with_header(&joined, &header))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Analyze { matrix, output } => run_analyze(matrix, output),
        Command::Rank3 { matrix, output } => run_rank3(matrix, output),
        Command::Witness { matrix, output } => run_witness(matrix, output),
        Command::Coverage {
            matrix,
            resolution,
            format,
            output,
        } => run_coverage(matrix, *resolution, *format, output),
        Command::ColopRegion {
            resolution,
            format,
            output,
        } => run_colop_region(*resolution, *format, output),
        Command::DetvecHull {
            matrix,
            format,
            output,
        } => run_detvec_hull(matrix, *format, output),
        Command::ScalingSearch {
            matrix,
            restarts,
            seed,
            output,
        } => run_scaling_search(matrix, *restarts, *seed, output),
        Command::SignMax { matrix, output } => run_sign_max(matrix, output),
        Command::Volume {
            n,
            samples,
            seed,
            output,
        } => run_volume(*n, *samples, *seed, output),
        Command::UpperBound { n, m, output } => run_upper_bound(*n, *m, output),
        Command::Slice {
            template,
            resolution,
            format,
            output,
        } => run_slice(template, *resolution, *format, output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

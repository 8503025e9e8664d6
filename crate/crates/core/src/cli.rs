//! Command-line front end. Every subcommand calls one library routine and
//! formats the result.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{
    audit_grid, check_conjectures, emit_figure_data, find_max, find_q2_root, limit_at_one,
    mc_residual_check, step_grid, verify_table, FigureId, LimitSelector, Table, TableFormat,
    TableId,
};
use crate::autocov::{rho_prefix, HurstIndex};
use crate::bilateral::{bilateral_determinants, norm_bilateral, q_coefficients, BilateralMethod};
use crate::error::{FgnError, Result};
use crate::format::{fmt_raw, fmt_trimmed};
use crate::gramians::{build_gram, cholesky, GramKind};
use crate::onesided::{
    gamma, martingale_coeffs, norm_one_sided, MartingaleDenominator, OneSidedMethod,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_GOLDEN_MISMATCH: i32 = 4;

const GRID_HELP: &str =
    "Hurst index: a single value or a grid `a:b:h` (b is included when within h/2 of a step)";

#[derive(Debug, Parser)]
#[command(
    name = "fgn",
    version,
    about = "Projection coefficients of fractional Gaussian noise"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Print full precision instead of 6 decimals.
    #[arg(long, global = true)]
    pub raw: bool,
    /// Write output to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Solve,
    Recursive,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Fbm,
    Fgn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Denominator {
    Printed,
    Innovation,
}

#[derive(Debug, Args)]
pub struct HurstArg {
    #[arg(long, help = GRID_HELP)]
    pub hurst: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Autocovariances rho_0..rho_m.
    Rho {
        #[command(flatten)]
        h: HurstArg,
        #[arg(long)]
        max_lag: u64,
    },
    /// Cholesky triangle of the fBm or fGn Gram matrix, one row per line.
    Cholesky {
        #[arg(long)]
        hurst: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Kind::Fgn)]
        kind: Kind,
    },
    /// One-sided coefficients Gamma_n^k, k = 2..n.
    Gamma {
        #[command(flatten)]
        h: HurstArg,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Method::Solve)]
        method: Method,
    },
    /// Martingale coefficients R_k, k = 2..n.
    Martingale {
        #[command(flatten)]
        h: HurstArg,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Denominator::Printed)]
        denominator: Denominator,
    },
    /// Bilateral coefficients Q_j^k, k = 1..j.
    Q {
        #[command(flatten)]
        h: HurstArg,
        #[arg(long)]
        window: usize,
        #[arg(long, value_enum, default_value_t = Method::Solve)]
        method: Method,
    },
    /// Norms R_1(n) and R_2(n).
    Norms {
        #[command(flatten)]
        h: HurstArg,
        #[arg(long)]
        n: usize,
    },
    /// Window-three determinants D3, D31, D32, D33 (H = 1 allowed).
    Determinants {
        #[command(flatten)]
        h: HurstArg,
    },
    /// Grid audits of the conjectures and coefficient patterns.
    Conjectures {
        /// Defaults to 0.55:0.95:0.05 plus 0.99.
        #[arg(long, help = GRID_HELP)]
        hurst: Option<String>,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
    },
    /// Zeros of H -> Q_j^2(H).
    Roots {
        /// Windows to search; defaults to 3..=10.
        #[arg(long, value_delimiter = ',')]
        window: Vec<usize>,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Maximum of H -> Q_j^k(H).
    Maxima {
        #[arg(long)]
        window: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Extrapolated value at H = 1 of Q_j^k, or of the row sum when k is omitted.
    Limits {
        #[arg(long)]
        window: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Coefficient, norm and root tables; `--verify` compares with the bundled golden files.
    Tables {
        /// Q@0.51, Q@0.6, Q@0.7, Q@0.8, Q@0.9, Q@0.99, NORMS, ROOTS or ALL.
        #[arg(long, default_value = "ALL")]
        table: String,
        #[arg(long)]
        verify: bool,
    },
    /// Data series behind the coefficient, determinant and norm plots.
    Figures {
        /// Q1..Q5, QSECOND, D31_D33, D32, D32_D1, D32_D2, NORMS_VS_N, NORMS_VS_H.
        #[arg(long)]
        figure: String,
        #[arg(long, default_value_t = 512)]
        points: usize,
    },
    /// Monte Carlo check of the bilateral interpolation error variance.
    McCheck {
        #[arg(long, default_value_t = 0.7)]
        hurst: f64,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 200_000)]
        paths: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

enum Failure {
    Lib(FgnError),
    Mismatch(String),
    Io(io::Error),
}

impl From<FgnError> for Failure {
    fn from(e: FgnError) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

struct Ctx {
    format: Format,
    raw: bool,
}

impl Ctx {
    fn num(&self, v: f64) -> String {
        if self.raw {
            fmt_raw(v)
        } else {
            fmt_trimmed(v, 6)
        }
    }

    fn line(&self, values: impl IntoIterator<Item = f64>) -> String {
        values
            .into_iter()
            .map(|v| self.num(v))
            .collect::<Vec<_>>()
            .join(",")
    }

    fn json(&self, meta: serde_json::Value, rows: impl Serialize) -> String {
        let mut s = serde_json::to_string_pretty(&json!({ "meta": meta, "rows": rows }))
            .expect("serializable");
        s.push('\n');
        s
    }
}

/// Parses a single value or an `a:b:h` grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| FgnError::Parse(format!("bad number {s:?} in {spec:?}")))
    };
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [a, b, h] => step_grid(num(a)?, num(b)?, num(h)?),
        _ => Err(FgnError::Parse(format!(
            "expected a value or a:b:h, got {spec:?}"
        ))),
    }
}

fn open_grid(spec: &str) -> Result<Vec<HurstIndex>> {
    parse_grid(spec)?.into_iter().map(HurstIndex::new).collect()
}

/// One output line per `H`; the `H` column is added only for grids.
fn per_h(
    ctx: &Ctx,
    hs: &[HurstIndex],
    f: impl Fn(HurstIndex) -> Result<Vec<f64>>,
) -> Result<String> {
    let rows = hs
        .iter()
        .map(|&h| Ok((h.value(), f(h)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(match ctx.format {
        Format::Json => ctx.json(
            json!({}),
            rows.iter()
                .map(|(h, v)| json!({"hurst": h, "values": v}))
                .collect::<Vec<_>>(),
        ),
        Format::Csv => {
            let mut out = String::new();
            for (h, v) in &rows {
                if hs.len() > 1 {
                    out.push_str(&ctx.num(*h));
                    out.push(',');
                }
                out.push_str(&ctx.line(v.iter().copied()));
                out.push('\n');
            }
            out
        }
    })
}

/// Header plus rows of labelled records.
fn records(ctx: &Ctx, header: &[&str], rows: &[Vec<f64>], meta: serde_json::Value) -> String {
    match ctx.format {
        Format::Json => {
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| {
                    header
                        .iter()
                        .map(|h| h.to_string())
                        .zip(r.iter().map(|v| json!(v)))
                        .collect()
                })
                .collect();
            ctx.json(meta, objs)
        }
        Format::Csv => {
            let mut out = header.join(",");
            out.push('\n');
            for r in rows {
                out.push_str(&ctx.line(r.iter().copied()));
                out.push('\n');
            }
            out
        }
    }
}

fn one_sided_method(m: Method) -> Result<OneSidedMethod> {
    match m {
        Method::Solve => Ok(OneSidedMethod::Solve),
        Method::Recursive => Ok(OneSidedMethod::Recursive),
        Method::Closed => Err(FgnError::Domain(
            "no closed form for the one-sided coefficients".into(),
        )),
    }
}

fn execute(cli: &Cli) -> std::result::Result<String, Failure> {
    let ctx = Ctx {
        format: cli.format,
        raw: cli.raw,
    };
    let out = match &cli.command {
        Command::Rho { h, max_lag } => per_h(&ctx, &open_grid(&h.hurst)?, |h| {
            Ok(rho_prefix(h, *max_lag).into_vec())
        })?,
        Command::Cholesky { hurst, n, kind } => {
            let kind = match kind {
                Kind::Fbm => GramKind::Fbm,
                Kind::Fgn => GramKind::Fgn,
            };
            let tri = cholesky(&build_gram(HurstIndex::new(*hurst)?, kind, *n)?)?;
            let rows: Vec<Vec<f64>> = (1..=*n).map(|k| tri.row(k).to_vec()).collect();
            match ctx.format {
                Format::Json => ctx.json(
                    json!({"hurst": hurst, "n": n, "kind": format!("{kind:?}")}),
                    &rows,
                ),
                Format::Csv => rows
                    .iter()
                    .map(|r| ctx.line(r.iter().copied()) + "\n")
                    .collect(),
            }
        }
        Command::Gamma { h, n, method } => {
            let m = one_sided_method(*method)?;
            per_h(&ctx, &open_grid(&h.hurst)?, |h| {
                Ok(gamma(h, *n, m)?.as_slice().to_vec())
            })?
        }
        Command::Martingale { h, n, denominator } => {
            let d = match denominator {
                Denominator::Printed => MartingaleDenominator::AsPrinted,
                Denominator::Innovation => MartingaleDenominator::InnovationVariance,
            };
            per_h(&ctx, &open_grid(&h.hurst)?, |h| {
                Ok(martingale_coeffs(h, *n, d)?.as_slice().to_vec())
            })?
        }
        Command::Q { h, window, method } => {
            let m = match method {
                Method::Solve => BilateralMethod::Solve,
                Method::Recursive => BilateralMethod::Recursive,
                Method::Closed => BilateralMethod::Closed,
            };
            per_h(&ctx, &open_grid(&h.hurst)?, |h| {
                Ok(q_coefficients(h, *window, m)?.as_slice().to_vec())
            })?
        }
        Command::Norms { h, n } => {
            let rows = open_grid(&h.hurst)?
                .into_iter()
                .map(|h| {
                    Ok(vec![
                        h.value(),
                        *n as f64,
                        norm_one_sided(h, *n)?,
                        norm_bilateral(h, *n)?,
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            records(&ctx, &["hurst", "n", "R1", "R2"], &rows, json!({}))
        }
        Command::Determinants { h } => {
            let rows = parse_grid(&h.hurst)?
                .into_iter()
                .map(|v| {
                    let d = bilateral_determinants(HurstIndex::with_limit(v)?)?;
                    Ok(vec![v, d.d3, d.d31, d.d32, d.d33])
                })
                .collect::<Result<Vec<_>>>()?;
            records(
                &ctx,
                &["hurst", "D3", "D31", "D32", "D33"],
                &rows,
                json!({}),
            )
        }
        Command::Conjectures { hurst, n_max } => {
            let grid = match hurst {
                Some(spec) => parse_grid(spec)?,
                None => audit_grid(),
            };
            let reports = check_conjectures(&grid, *n_max)?;
            match ctx.format {
                Format::Json => ctx.json(json!({"grid": grid, "n_max": n_max}), &reports),
                Format::Csv => {
                    let mut out = String::from("id,status,checked,violations,first_hurst,first_n,first_k,first_value,failures,sightings\n");
                    for r in &reports {
                        let first = r.first_violation.map_or_else(
                            || ",,,".to_string(),
                            |v| {
                                format!("{},{},{},{}", ctx.num(v.hurst), v.n, v.k, ctx.num(v.value))
                            },
                        );
                        out.push_str(&format!(
                            "{},{},{},{},{},{},{}\n",
                            r.id.label(),
                            r.status.label(),
                            r.checked,
                            r.violations,
                            first,
                            r.failures.len(),
                            r.sightings.len()
                        ));
                    }
                    out
                }
            }
        }
        Command::Roots { window, tol } => {
            let windows = if window.is_empty() {
                (3..=10).collect()
            } else {
                window.clone()
            };
            let rows = windows
                .iter()
                .map(|&j| {
                    let r = find_q2_root(j, *tol)?;
                    Ok(vec![j as f64, r.root, r.bracket_width, r.residual])
                })
                .collect::<Result<Vec<_>>>()?;
            records(
                &ctx,
                &["window", "root", "bracket_width", "residual"],
                &rows,
                json!({"tol": tol}),
            )
        }
        Command::Maxima { window, k, tol } => {
            let m = find_max(*window, *k, *tol)?;
            let rows = vec![vec![m.window as f64, m.k as f64, m.argmax, m.value]];
            records(
                &ctx,
                &["window", "k", "argmax", "value"],
                &rows,
                json!({"tol": tol, "certified": m.certified}),
            )
        }
        Command::Limits { window, k, depth } => {
            let selector = match k {
                Some(k) => LimitSelector::Coefficient {
                    window: *window,
                    k: *k,
                },
                None => LimitSelector::Sum { window: *window },
            };
            let e = limit_at_one(selector, *depth)?;
            let rows = vec![vec![e.value, e.uncertainty, e.depth as f64]];
            records(
                &ctx,
                &["limit", "uncertainty", "depth"],
                &rows,
                json!({"selector": selector}),
            )
        }
        Command::Tables { table, verify } => {
            let ids = if table.eq_ignore_ascii_case("ALL") {
                TableId::all()
            } else {
                vec![table.parse()?]
            };
            if *verify {
                let mut out = String::new();
                let mut bad = Vec::new();
                for id in &ids {
                    let r = verify_table(id)?;
                    out.push_str(&format!(
                        "{} {} cells={} max_dev={:.2e} tol={:.1e}\n",
                        if r.ok() { "ok" } else { "MISMATCH" },
                        r.table,
                        r.checked,
                        r.max_deviation,
                        r.tolerance
                    ));
                    for m in &r.mismatches {
                        out.push_str(&format!(
                            "  row {} col {}: expected {} got {:?}\n",
                            m.row, m.column, m.expected, m.got
                        ));
                    }
                    if !r.ok() {
                        bad.push(r.table.clone());
                    }
                }
                if !bad.is_empty() {
                    return Err(Failure::Mismatch(out));
                }
                out
            } else {
                let format = match ctx.format {
                    Format::Csv => TableFormat::Csv,
                    Format::Json => TableFormat::Json,
                };
                let mut out = String::new();
                for id in &ids {
                    let t = Table::build(id)?;
                    if ids.len() > 1 && format == TableFormat::Csv {
                        out.push_str(&format!("# {id}\n"));
                    }
                    match format {
                        TableFormat::Csv => out.push_str(&t.to_csv()),
                        TableFormat::Json => {
                            out.push_str(&t.to_json());
                            out.push('\n');
                        }
                    }
                }
                out
            }
        }
        Command::Figures { figure, points } => {
            let s = emit_figure_data(figure.parse::<FigureId>()?, *points)?;
            match ctx.format {
                Format::Csv => s.to_csv(),
                Format::Json => s.to_json() + "\n",
            }
        }
        Command::McCheck {
            hurst,
            n,
            paths,
            seed,
        } => {
            let h = HurstIndex::new(*hurst)?;
            let seeds = [*seed, seed.wrapping_add(1)];
            let rows = seeds
                .iter()
                .map(|&s| {
                    let r = mc_residual_check(h, *n, *paths, s)?;
                    Ok(vec![s as f64, r.empirical, r.expected, r.std_error, r.z])
                })
                .collect::<Result<Vec<_>>>()?;
            records(
                &ctx,
                &["seed", "empirical", "expected", "std_error", "z"],
                &rows,
                json!({"hurst": hurst, "n": n, "paths": paths}),
            )
        }
    };
    Ok(out)
}

fn emit(cli: &Cli, text: &str, out: &mut dyn Write) -> io::Result<()> {
    match &cli.output {
        Some(path) => File::create(path)?.write_all(text.as_bytes()),
        None => out.write_all(text.as_bytes()),
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let (text, code) = match execute(&cli) {
        Ok(text) => (text, EXIT_OK),
        Err(Failure::Mismatch(text)) => (text, EXIT_GOLDEN_MISMATCH),
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            return if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            };
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = emit(&cli, &text, out) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    code
}

//! Command-line driver.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 branch budget exhausted,
//! 3 `check` found a residual of too low valuation.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_traits::Zero;

use crate::field::rational::{parse_rational, Rational};
use crate::field::KScalar;
use crate::gevrey::{grid_step, report, GevreyReport};
use crate::json::{gevrey_json, outcome_json, series_list_from_json};
use crate::parser::{parse_polynomial, parse_series};
use crate::polygon::NewtonPolygon;
use crate::qdiff::{substitute_series, PuiseuxSeries, QDiffPolynomial};
use crate::solver::{solve_exact, solve_numeric, SolveOutcome, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

/// Overrides the default `--max-branches`.
pub const MAX_BRANCHES_ENV: &str = "QPUISEUX_MAX_BRANCHES";
const DEFAULT_MAX_BRANCHES: usize = 64;

#[derive(Parser, Debug)]
#[command(
    name = "qpuiseux",
    version,
    about = "Puiseux series solutions of q-difference equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute truncated solutions.
    Solve {
        /// Equation text, or @FILE.
        #[arg(allow_hyphen_values = true)]
        equation: String,
        #[arg(long, default_value = "10")]
        trunc: String,
        #[arg(long)]
        max_branches: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Numeric value of q, e.g. 2 or 0.5+1.5i (numeric mode; default 2).
        #[arg(long)]
        q: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Print the Newton polygon.
    Polygon {
        #[arg(allow_hyphen_values = true)]
        equation: String,
        /// Also write the point cloud as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Estimate the q-Gevrey order of each solution branch.
    Gevrey {
        #[arg(allow_hyphen_values = true)]
        equation: String,
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long, default_value = "50:200")]
        window: String,
        /// Solve up to this exponent (default: the window's upper end).
        #[arg(long)]
        trunc: Option<String>,
        #[arg(long)]
        max_branches: Option<usize>,
        /// Write `m,log_abs_coeff,pointwise_s_m` rows for the first branch.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Verify a candidate solution.
    Check {
        #[arg(allow_hyphen_values = true)]
        equation: String,
        /// A `solve` JSON result, a series JSON object, or an expression in x and q.
        #[arg(long)]
        solution: PathBuf,
    },
}

struct Failure {
    code: i32,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        msg: msg.into(),
    }
}

/// Runs the CLI on `args` (including the program name); returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Solve {
            equation,
            trunc,
            max_branches,
            mode,
            q,
            format,
        } => {
            let p = read_equation(&equation)?;
            let trunc = parse_positive(&trunc, "--trunc")?;
            let mut cfg = SolverConfig::new(trunc.clone());
            cfg.max_branches = max_branches_or_default(max_branches)?;
            match mode {
                Mode::Exact => {
                    if let Some(q) = &q {
                        cfg.q_value = Some(parse_complex(q)?);
                    }
                    let res = solve_exact(&p, &cfg).map_err(|e| usage(e.to_string()))?;
                    emit_solve(out, &p, &res, &trunc, None, format)
                }
                Mode::Numeric => {
                    let q = q.unwrap_or_else(|| "2".into());
                    let qv = parse_complex(&q)?;
                    let res = solve_numeric(&p, &cfg, qv).map_err(|e| usage(e.to_string()))?;
                    emit_solve(out, &p, &res, &trunc, Some(&q), format)
                }
            }
        }
        Command::Polygon { equation, csv } => {
            let p = read_equation(&equation)?;
            let np = NewtonPolygon::build(&p).map_err(|e| usage(e.to_string()))?;
            write_out(out, &np.to_string())?;
            if let Some(path) = csv {
                std::fs::write(&path, np.to_csv())
                    .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(EXIT_OK)
        }
        Command::Gevrey {
            equation,
            q,
            window,
            trunc,
            max_branches,
            csv,
        } => {
            let p = read_equation(&equation)?;
            let qv = parse_complex(&q)?;
            let window = parse_window(&window)?;
            let trunc = match trunc {
                Some(t) => parse_positive(&t, "--trunc")?,
                None => Rational::from_integer(window.1.max(1).into()),
            };
            let mut cfg = SolverConfig::new(trunc);
            cfg.max_branches = max_branches_or_default(max_branches)?;
            let res = solve_exact(&p, &cfg).map_err(|e| usage(e.to_string()))?;
            let n = p.order();
            let mut rows = Vec::new();
            let mut first: Option<(GevreyReport, f64)> = None;
            for b in &res.branches {
                let entry = match report(b, n, qv, window) {
                    Ok(r) => {
                        let ln_q = qv.norm().ln();
                        let v = serde_json::json!({
                            "series": b.series.to_string(),
                            "step": grid_step(b).to_string(),
                            "report": gevrey_json(&r),
                        });
                        if first.is_none() {
                            first = Some((r, ln_q));
                        }
                        v
                    }
                    Err(e) => serde_json::json!({
                        "series": b.series.to_string(),
                        "error": e.to_string(),
                    }),
                };
                rows.push(entry);
            }
            let doc = serde_json::json!({
                "equation": p.to_string(),
                "order": n.to_string(),
                "q": q,
                "window": [window.0.to_string(), window.1.to_string()],
                "branches": rows,
                "budget_exceeded": res.budget_exceeded,
            });
            write_out(out, &pretty(&doc))?;
            if let Some(path) = csv {
                let Some((r, ln_q)) = first else {
                    return Err(usage("no branch has a Gevrey estimate to write"));
                };
                let emp = crate::gevrey::EmpiricalOrder {
                    s_emp: r.s_emp,
                    s_pointwise: r.s_pointwise,
                    fit_window: r.fit_window,
                    per_m: r.per_m,
                };
                std::fs::write(&path, emp.to_csv(ln_q))
                    .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(if res.budget_exceeded {
                EXIT_BUDGET
            } else {
                EXIT_OK
            })
        }
        Command::Check { equation, solution } => {
            let p = read_equation(&equation)?;
            let text = std::fs::read_to_string(&solution)
                .map_err(|e| usage(format!("cannot read {}: {e}", solution.display())))?;
            let series = read_solutions(&text)?;
            let mut ok = true;
            for s in &series {
                let (valuation, pass) = check_residual(&p, s);
                ok &= pass;
                write_out(
                    out,
                    &format!(
                        "{}: residual valuation {valuation}\n",
                        if pass { "ok" } else { "FAIL" }
                    ),
                )?;
            }
            Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    }
}

/// Residual valuation text (`inf` for zero) and whether it clears the
/// series' own truncation.
pub fn check_residual(p: &QDiffPolynomial<KScalar>, s: &PuiseuxSeries<KScalar>) -> (String, bool) {
    let r = substitute_series(p, s, &());
    match (r.valuation(), s.trunc()) {
        (None, None) => ("inf".into(), true),
        (None, Some(t)) => (format!(">{t}"), true),
        (Some(v), Some(t)) => (v.to_string(), v > t),
        (Some(v), None) => (v.to_string(), false),
    }
}

fn read_solutions(text: &str) -> Result<Vec<PuiseuxSeries<KScalar>>, Failure> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| usage(format!("invalid JSON: {e}")))?;
        series_list_from_json(&v).map_err(|e| usage(e.to_string()))
    } else {
        parse_series(text.trim())
            .map(|s| vec![s])
            .map_err(|e| usage(e.to_string()))
    }
}

fn emit_solve<C: crate::field::Coefficient>(
    out: &mut dyn Write,
    p: &QDiffPolynomial<KScalar>,
    res: &SolveOutcome<C>,
    trunc: &Rational,
    q: Option<&str>,
    format: Format,
) -> Result<i32, Failure> {
    match format {
        Format::Json => write_out(out, &pretty(&outcome_json(p, res, trunc, q)))?,
        Format::Text => {
            let mut s = format!("equation: {p}\n");
            for (i, b) in res.branches.iter().enumerate() {
                s.push_str(&format!(
                    "[{}] {}  residual valuation {}\n    y = {}\n",
                    i + 1,
                    b.status,
                    b.residual_valuation,
                    b.series
                ));
                if let Some(pv) = &b.pivot {
                    s.push_str(&format!(
                        "    pivot at alpha = {}, D(mu) = {}, d = {}\n",
                        pv.alpha, pv.divisor, pv.ramification
                    ));
                }
                for n in &b.notes {
                    s.push_str(&format!("    note: {n}\n"));
                }
            }
            for d in &res.diagnostics {
                s.push_str(&format!("diagnostic: {d}\n"));
            }
            if res.budget_exceeded {
                s.push_str("branch budget exhausted\n");
            }
            write_out(out, &s)?;
        }
    }
    Ok(if res.budget_exceeded {
        EXIT_BUDGET
    } else {
        EXIT_OK
    })
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn write_out(out: &mut dyn Write, s: &str) -> Result<(), Failure> {
    out.write_all(s.as_bytes())
        .map_err(|e| usage(format!("cannot write output: {e}")))
}

fn read_equation(arg: &str) -> Result<QDiffPolynomial<KScalar>, Failure> {
    let text = match arg.strip_prefix('@') {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))?
        }
        None => arg.to_string(),
    };
    parse_polynomial(text.trim()).map_err(|e| usage(e.to_string()))
}

fn parse_positive(s: &str, flag: &str) -> Result<Rational, Failure> {
    parse_rational(s)
        .filter(|r| *r > Rational::zero())
        .ok_or_else(|| usage(format!("{flag} expects a positive rational, got {s:?}")))
}

fn max_branches_or_default(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(n) = flag {
        return if n == 0 {
            Err(usage("--max-branches must be at least 1"))
        } else {
            Ok(n)
        };
    }
    match std::env::var(MAX_BRANCHES_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| usage(format!("{MAX_BRANCHES_ENV} must be a positive integer"))),
        Err(_) => Ok(DEFAULT_MAX_BRANCHES),
    }
}

fn parse_window(s: &str) -> Result<(u64, u64), Failure> {
    let bad = || usage(format!("--window expects LO:HI with LO <= HI, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_complex(s: &str) -> Result<Complex64, Failure> {
    parse_complex_value(s).ok_or_else(|| usage(format!("cannot read {s:?} as a complex number")))
}

/// Accepts `a`, `bi`, `a+bi`, `a-bi` with decimal `a`, `b`.
pub fn parse_complex_value(s: &str) -> Option<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let num = |x: &str| -> Option<f64> {
        match x {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => x.parse::<f64>().ok(),
        }
    };
    let z = if let Some(body) = t.strip_suffix('i') {
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(i, c)| {
                (c == '+' || c == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E')
            })
            .map(|(i, _)| i)
            .last();
        match split {
            Some(i) => Complex64::new(num(&body[..i])?, num(&body[i..])?),
            None => Complex64::new(0.0, num(body)?),
        }
    } else {
        Complex64::new(t.parse::<f64>().ok()?, 0.0)
    };
    (z.re.is_finite() && z.im.is_finite()).then_some(z)
}

/// Entry point for the binary.
pub fn main_exit_code() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

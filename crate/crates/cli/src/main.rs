//! `rr`: evaluate real recursive terms, tabulate them, iterate maps and run
//! differential-algebraicity probes.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use realrec::dalg::{self, Annihilator};
use realrec::eval::{grid_to_csv, plot_data};
use realrec::iterate::{build_iteration, eval_iteration, iteration_config};
use realrec::{eval_grid, parse, EvalOutcome, Evaluator, SemanticsConfig, Term};
use serde_json::json;

use config::Overrides;

#[derive(Parser, Debug)]
#[command(name = "rr", version, about = "Interpreter for real recursive function terms")]
struct Cli {
    /// TOML configuration file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, global = true, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a term at one point
    Eval {
        expr: String,
        /// Comma-separated coordinates (empty for nullary terms)
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        at: String,
    },
    /// Evaluate along one coordinate
    Grid {
        expr: String,
        #[arg(long, default_value_t = 0)]
        axis: usize,
        #[arg(long, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 25)]
        n: usize,
        /// The other coordinates; defaults to zeros
        #[arg(long, allow_hyphen_values = true)]
        fixed: Option<String>,
        /// Also write gnuplot-ready data with gaps at undefined points
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Evaluate the compiled iteration of an m -> m map for k = 1..kmax
    Iterate {
        fexpr: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, default_value_t = 3)]
        kmax: u32,
    },
    /// Search for a polynomial relation among derivatives of a term
    DaProbe {
        expr: String,
        #[arg(long, default_value_t = 0)]
        direction: usize,
        #[arg(long = "N", default_value_t = 2)]
        order: usize,
        #[arg(long = "d", default_value_t = 2)]
        degree: u32,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        /// Points as `x,y;x,y;…`
        #[arg(long, allow_hyphen_values = true, conflicts_with = "range")]
        points: Option<String>,
        /// `lo:hi:n` along the direction, other coordinates from --fixed
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        fixed: Option<String>,
    },
    /// The gamma-check probe across several R with exp/sin controls
    DemoGamma {
        #[arg(long = "R", default_value = "2,4,8")]
        rs: String,
        /// Defaults to 10 points spread over [0.5, 3]
        #[arg(long)]
        xs: Option<String>,
        #[arg(long = "N", default_value_t = 2)]
        order: usize,
        #[arg(long = "d", default_value_t = 2)]
        degree: u32,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
    },
    /// Show the semantic variants and the effective configuration
    Semantics,
}

/// Library defaults with the integrator tightened so that the ten printed
/// decimals are settled.
fn cli_default() -> SemanticsConfig {
    let mut c = SemanticsConfig::default();
    c.tol.rel_tol = 1e-12;
    c.tol.abs_tol = 1e-14;
    c
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{s}");
}

fn numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<f64>().with_context(|| format!("not a number: {x:?}")))
        .collect()
}

fn term(src: &str) -> Result<Term> {
    parse(src).map_err(|e| anyhow!("cannot parse {src:?}: {e}"))
}

fn show_values(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.10}")).collect::<Vec<_>>().join(", ")
}

enum Usage {
    Error(anyhow::Error),
    Undefined,
}

impl From<anyhow::Error> for Usage {
    fn from(e: anyhow::Error) -> Self {
        Usage::Error(e)
    }
}

fn run(cli: Cli) -> Result<(), Usage> {
    let file = cli.config.as_deref();
    let cfg = |base: SemanticsConfig| config::resolve(base, file, &cli.overrides);
    match cli.command {
        Command::Eval { expr, at } => {
            let t = term(&expr)?;
            let p = numbers(&at)?;
            if p.len() != t.arity().inputs {
                return Err(anyhow!("{expr} takes {} inputs, got {}", t.arity().inputs, p.len()).into());
            }
            let ev = Evaluator::new(cfg(cli_default())?);
            let out = ev.eval(&t, &p);
            if cli.format == Format::Json {
                emit(&out.to_json(&ev.notes()).to_string());
            }
            match out {
                EvalOutcome::Defined(v) => {
                    if cli.format == Format::Csv {
                        emit(&show_values(&v));
                    }
                    for n in ev.notes() {
                        eprintln!("note: {n}");
                    }
                }
                EvalOutcome::Undefined(u) => {
                    match &u.witness {
                        Some(w) => eprintln!("Undefined: {} ({w})", u.reason.name()),
                        None => eprintln!("Undefined: {}", u.reason.name()),
                    }
                    return Err(Usage::Undefined);
                }
            }
        }
        Command::Grid {
            expr,
            axis,
            lo,
            hi,
            n,
            fixed,
            plot,
        } => {
            let t = term(&expr)?;
            let fixed = match fixed {
                Some(s) => numbers(&s)?,
                None => vec![0.0; t.arity().inputs],
            };
            let rows = eval_grid(&t, axis, lo, hi, n, &fixed, &cfg(cli_default())?).map_err(anyhow::Error::from)?;
            match cli.format {
                Format::Csv => emit(grid_to_csv(&rows).trim_end()),
                Format::Json => {
                    let arr: Vec<_> = rows.iter().map(|(x, o)| json!({"coord": x, "outcome": o.to_json(&[])})).collect();
                    emit(&serde_json::Value::Array(arr).to_string());
                }
            }
            if let Some(path) = plot {
                std::fs::write(&path, plot_data(&rows)).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Iterate { fexpr, v, kmax } => {
            let f = term(&fexpr)?;
            let v = numbers(&v)?;
            if v.len() != f.arity().inputs {
                return Err(anyhow!("v has {} coordinates, f takes {}", v.len(), f.arity().inputs).into());
            }
            let bundle = build_iteration(&f).map_err(anyhow::Error::from)?;
            let ev = Evaluator::new(cfg(iteration_config())?);
            let rows: Vec<(u32, EvalOutcome)> = (1..=kmax).map(|k| (k, eval_iteration(&bundle, &v, k, &ev))).collect();
            match cli.format {
                Format::Csv => {
                    emit("k,defined,value");
                    for (k, o) in &rows {
                        match o {
                            EvalOutcome::Defined(x) => {
                                let vals: Vec<String> = x.iter().map(|y| format!("{y:.10}")).collect();
                                emit(&format!("{k},true,{}", vals.join(";")));
                            }
                            EvalOutcome::Undefined(u) => emit(&format!("{k},false,{}", u.reason.name())),
                        }
                    }
                }
                Format::Json => {
                    let arr: Vec<_> = rows.iter().map(|(k, o)| json!({"k": k, "outcome": o.to_json(&[])})).collect();
                    emit(&serde_json::Value::Array(arr).to_string());
                }
            }
        }
        Command::DaProbe {
            expr,
            direction,
            order,
            degree,
            eps,
            points,
            range,
            fixed,
        } => {
            let t = term(&expr)?;
            let inputs = t.arity().inputs;
            let points: Vec<Vec<f64>> = match (points, range) {
                (Some(s), _) => s.split(';').map(numbers).collect::<Result<_>>()?,
                (None, Some(r)) => {
                    let parts: Vec<&str> = r.split(':').collect();
                    let [lo, hi, n] = parts[..] else {
                        return Err(anyhow!("--range wants lo:hi:n").into());
                    };
                    let (lo, hi): (f64, f64) = (lo.parse().context("range lo")?, hi.parse().context("range hi")?);
                    let n: usize = n.parse().context("range n")?;
                    if n < 2 {
                        return Err(anyhow!("--range needs n >= 2").into());
                    }
                    let base = match fixed {
                        Some(s) => numbers(&s)?,
                        None => vec![0.0; inputs],
                    };
                    if base.len() != inputs || direction >= inputs {
                        return Err(anyhow!("--fixed or --direction does not match {inputs} inputs").into());
                    }
                    (0..n)
                        .map(|i| {
                            let mut p = base.clone();
                            p[direction] = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                            p
                        })
                        .collect()
                }
                (None, None) => return Err(anyhow!("give --points or --range").into()),
            };
            let ev = Evaluator::new(cfg(cli_default())?);
            let result = dalg::find_annihilator(&ev, &t, &points, direction, order, degree, eps).map_err(anyhow::Error::from)?;
            let mut report = serde_json::to_value(&result).map_err(anyhow::Error::from)?;
            report["found"] = json!(matches!(result, Annihilator::Found(_)));
            if let Annihilator::Found(c) = &result {
                let w = dalg::wronskian_reduce(&ev, &t, c, &points[..points.len().min(5)], direction);
                report["wronskian"] = match w {
                    Ok(w) => serde_json::to_value(w).map_err(anyhow::Error::from)?,
                    Err(e) => json!({"error": e.to_string()}),
                };
            }
            emit(&serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?);
        }
        Command::DemoGamma {
            rs,
            xs,
            order,
            degree,
            eps,
        } => {
            let rs = numbers(&rs)?;
            let xs = match xs {
                Some(s) => numbers(&s)?,
                None => (0..10).map(|i| 0.5 + 2.5 * i as f64 / 9.0).collect(),
            };
            if rs.iter().chain(&xs).any(|v| *v <= 0.0) {
                return Err(anyhow!("R and x must be positive").into());
            }
            let ev = Evaluator::new(cfg(cli_default())?);
            let report = dalg::gamma_check_probe(&ev, &rs, &xs, order, degree, eps).map_err(anyhow::Error::from)?;
            emit(&serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?);
        }
        Command::Semantics => {
            let c = cfg(cli_default())?;
            emit("pr          strict | campagnolo   recursion: integrand defined everywhere, or isolated singular points crossed");
            emit("mn-combine  both | either         minimization: both one-sided roots required, or either suffices");
            emit("mn-domain   all | sym | fwd | zero where the body must be defined for a root to count");
            emit("mn-isolated                       tolerate isolated undefined points (not with zero)");
            emit("");
            emit(&serde_json::to_string_pretty(&c).map_err(anyhow::Error::from)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Usage::Undefined) => ExitCode::from(2),
        Err(Usage::Error(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

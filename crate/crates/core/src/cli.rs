//! The `mpskit` command line.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 input or model error,
//! 3 size guard. `MPSKIT_THREADS` caps the worker pool.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::algebra::{add, add_shared_kernel};
use crate::analysis::{fit_activated_mps, run_gp_experiment, FitConfig, GpExperimentConfig, Target};
use crate::boolean::{
    boolean_feature_maps, compile, complexity_report, minimize, parse_expr, to_dnf, verify, TruthTable,
};
use crate::error::{Error, Result};
use crate::flatten::{flatten, flatten_activated, named_kernel};
use crate::io::Model;
use crate::mps::contract;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SIZE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "mpskit", version, about = "Matrix product state toolkit")]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct BoolSource {
    /// Boolean expression, e.g. "X1 | !X2".
    #[arg(long)]
    pub expr: Option<String>,
    /// Truth-table file.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compile a boolean function into an MPS.
    Compile {
        #[command(flatten)]
        source: BoolSource,
        /// Arity for --expr (default: highest variable index, at least 1).
        #[arg(long)]
        arity: Option<usize>,
        /// Minimize the cover before compiling.
        #[arg(long)]
        minimize: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a compiled MPS against a truth table.
    Verify {
        #[arg(long)]
        mps: PathBuf,
        #[command(flatten)]
        source: BoolSource,
    },
    /// Evaluate a model at input points.
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated input; repeatable.
        #[arg(long = "x", allow_hyphen_values = true)]
        xs: Vec<String>,
        /// File with one comma- or space-separated input per line.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Contract all bonds into the explicit one-hidden-layer weights.
    Flatten {
        #[arg(long)]
        model: PathBuf,
        /// Include monomial names of the kernel slots.
        #[arg(long)]
        names: bool,
        /// Write the flat network document here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sum of two activated models.
    Add {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Keep the (identical) kernels shared instead of stacking them.
        #[arg(long)]
        shared_kernel: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Scalar multiple of an activated model.
    Scale {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        /// Reparameterize the sigmoid constant instead of the output weights.
        #[arg(long)]
        via_c: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo check of the Gaussian-process limit.
    GpCheck {
        /// TOML config; unspecified keys take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        /// Comma-separated widths overriding the config.
        #[arg(long)]
        widths: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        /// Write the report table here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Fit an activated MPS to a built-in target.
    Fit {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        /// sin, gaussian_bump, smooth_step, polynomial or zero.
        #[arg(long)]
        target: Option<String>,
        /// Label dimension (hidden units).
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        /// Write the fitted model here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complexity of a boolean function, or a summary of a model file.
    Report {
        #[arg(long, conflicts_with_all = ["expr", "table"])]
        model: Option<PathBuf>,
        #[arg(long)]
        expr: Option<String>,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        arity: Option<usize>,
    },
}

/// Outcome of a command: an exit code plus text for stdout.
struct Outcome {
    code: i32,
    text: String,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { code: EXIT_OK, text }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Size { .. } => EXIT_SIZE,
        Error::BatchItem { source, .. } => exit_code(source),
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INPUT;
    }
    match execute(&cli) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("MPSKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("MPSKIT_THREADS must be a positive integer, got {v:?}")))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn load_table(source: &BoolSource, arity: Option<usize>) -> Result<TruthTable> {
    match (&source.expr, &source.table) {
        (Some(e), _) => {
            let expr = parse_expr(e)?;
            TruthTable::from_expr(&expr, arity.unwrap_or(expr.max_var().max(1)))
        }
        (None, Some(p)) => TruthTable::parse(&std::fs::read_to_string(p)?),
        (None, None) => Err(Error::Config("one of --expr or --table is required".into())),
    }
}

fn load_activated(path: &Path) -> Result<crate::algebra::ActivatedMps> {
    match Model::load(path)? {
        Model::Activated(a) => Ok(a),
        Model::Plain { .. } => Err(Error::Format(format!(
            "{} holds a plain mps; this command needs an activated_mps",
            path.display()
        ))),
    }
}

fn parse_point(s: &str) -> Result<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Format(format!("bad number {t:?} in input {s:?}")))
        })
        .collect()
}

fn fmt_values(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Compile {
            source,
            arity,
            minimize: min,
            out,
        } => {
            let table = load_table(source, *arity)?;
            let n = table.arity();
            let dnf = to_dnf(&table);
            let cover = if *min { minimize(&dnf) } else { dnf.clone() };
            let mps = compile(&cover, n)?;
            let bonds = mps.bond_dims();
            Model::Plain {
                mps,
                feature_maps: boolean_feature_maps(n),
            }
            .save(out)?;
            let report = complexity_report(&dnf);
            if cli.json {
                Ok(Outcome::ok(json(&serde_json::json!({
                    "out": out,
                    "minimized": min,
                    "terms_compiled": cover.len(),
                    "bond_dims": bonds,
                    "complexity": report,
                }))))
            } else {
                Ok(Outcome::ok(format!(
                    "wrote {}\narity {n}, {} terms compiled, bond dims {bonds:?}\n{}",
                    out.display(),
                    cover.len(),
                    complexity_text(&report)
                )))
            }
        }
        Command::Verify { mps, source } => {
            let model = Model::load(mps)?;
            let Model::Plain { mps, feature_maps } = model else {
                return Err(Error::Format("verify needs a plain mps document".into()));
            };
            let table = load_table(source, Some(mps.len()))?;
            let r = verify(&mps, &feature_maps, &table)?;
            let code = if r.passed() { EXIT_OK } else { EXIT_MISMATCH };
            let text = if cli.json {
                json(&serde_json::json!({
                    "passed": r.passed(),
                    "rows_checked": r.rows_checked,
                    "rows_total": r.rows_total,
                    "exhaustive": r.exhaustive,
                    "first_mismatch": r.first_mismatch.map(|(row, got)| serde_json::json!({
                        "row": row, "expected": i64::from(table.get(row)), "got": got
                    })),
                }))
            } else {
                match r.first_mismatch {
                    None => format!("PASS {}/{}\n", r.rows_checked, r.rows_total),
                    Some((row, got)) => {
                        let bits: String = table.row_bits(row).iter().map(|&b| if b { '1' } else { '0' }).collect();
                        format!(
                            "FAIL row {row} ({bits}): expected {}, got {got}\n",
                            i64::from(table.get(row))
                        )
                    }
                }
            };
            Ok(Outcome { code, text })
        }
        Command::Eval { model, xs, points } => {
            let model = Model::load(model)?;
            let mut inputs: Vec<Vec<f64>> = xs.iter().map(|s| parse_point(s)).collect::<Result<_>>()?;
            if let Some(p) = points {
                for line in std::fs::read_to_string(p)?.lines() {
                    let line = line.trim();
                    if !line.is_empty() && !line.starts_with('#') {
                        inputs.push(parse_point(line)?);
                    }
                }
            }
            if inputs.is_empty() {
                return Err(Error::Config("no inputs given (use --x or --points)".into()));
            }
            let values: Vec<Vec<f64>> = inputs
                .iter()
                .map(|x| match &model {
                    Model::Plain { mps, feature_maps } => contract(mps, feature_maps, x),
                    Model::Activated(a) => a.eval(x).map(|v| vec![v]),
                })
                .collect::<Result<_>>()?;
            if cli.json {
                Ok(Outcome::ok(json(&values)))
            } else {
                Ok(Outcome::ok(values.iter().map(|v| fmt_values(v) + "\n").collect()))
            }
        }
        Command::Flatten { model, names, out } => {
            let f = match Model::load(model)? {
                Model::Plain { mps, feature_maps } => flatten(&mps, &feature_maps)?,
                Model::Activated(a) => flatten_activated(&a)?,
            };
            let doc = f.to_json(*names)?;
            if let Some(p) = out {
                std::fs::write(p, format!("{doc}\n"))?;
            }
            if cli.json {
                return Ok(Outcome::ok(format!("{doc}\n")));
            }
            let labels = if *names { Some(named_kernel(&f)?) } else { None };
            let mut text = format!("D={} S={} phys_dims={:?}\n", f.label_dim(), f.size(), f.phys_dims());
            for (k, multi) in f.kernel().iter().enumerate() {
                let w: Vec<f64> = f.weights().column(k).to_vec();
                let name = labels.as_ref().map(|l| format!(" {}", l[k])).unwrap_or_default();
                text.push_str(&format!("{k} {multi:?}{name} {}\n", fmt_values(&w)));
            }
            Ok(Outcome::ok(text))
        }
        Command::Add {
            a,
            b,
            shared_kernel,
            out,
        } => {
            let (a, b) = (load_activated(a)?, load_activated(b)?);
            let sum = if *shared_kernel {
                add_shared_kernel(&a, &b)?
            } else {
                add(&a, &b)?
            };
            let summary = model_summary(sum.core(), Some(sum.label_dim()));
            Model::Activated(sum).save(out)?;
            Ok(Outcome::ok(if cli.json {
                json(&summary)
            } else {
                summary_text(&summary)
            }))
        }
        Command::Scale { model, k, via_c, out } => {
            let a = load_activated(model)?;
            let scaled = if *via_c { a.scale_via_c(*k)? } else { a.scale(*k) };
            let summary = model_summary(scaled.core(), Some(scaled.label_dim()));
            Model::Activated(scaled).save(out)?;
            Ok(Outcome::ok(if cli.json {
                json(&summary)
            } else {
                summary_text(&summary)
            }))
        }
        Command::GpCheck {
            config,
            seed,
            widths,
            samples,
            out,
            csv,
        } => {
            let mut cfg: GpExperimentConfig = read_config(config.as_deref())?;
            cfg.seed = *seed;
            if let Some(w) = widths {
                cfg.widths = w
                    .split(',')
                    .map(|t| t.trim().parse().map_err(|_| Error::Config(format!("bad width {t:?}"))))
                    .collect::<Result<_>>()?;
            }
            if let Some(s) = samples {
                cfg.n_samples = *s;
            }
            let report = run_gp_experiment(&cfg)?;
            let table = report.to_table();
            if let Some(p) = out {
                std::fs::write(p, &table)?;
            }
            if let Some(p) = csv {
                std::fs::write(p, report.to_csv())?;
            }
            let decreasing = report.median_kurtosis_strictly_decreasing();
            if cli.json {
                Ok(Outcome::ok(json(&serde_json::json!({
                    "report": report,
                    "median_kurtosis_strictly_decreasing": decreasing,
                    "covariance_drift_sigmas": report.covariance_drift(),
                }))))
            } else {
                Ok(Outcome::ok(format!(
                    "{table}median |excess kurtosis| strictly decreasing: {decreasing}\n"
                )))
            }
        }
        Command::Fit {
            config,
            seed,
            target,
            width,
            iterations,
            learning_rate,
            out,
        } => {
            let mut cfg: FitConfig = read_config(config.as_deref())?;
            cfg.seed = *seed;
            if let Some(t) = target {
                cfg.target = Target::from_name(t)?;
            }
            if let Some(w) = width {
                cfg.model.label_dim = *w;
            }
            if let Some(i) = iterations {
                cfg.iterations = *i;
            }
            if let Some(lr) = learning_rate {
                cfg.learning_rate = *lr;
            }
            let record = fit_activated_mps(&cfg)?;
            if let Some(p) = out {
                Model::Activated(record.model.clone()).save(p)?;
            }
            let final_loss = record.error_curve.last().copied().unwrap_or(f64::NAN);
            if cli.json {
                Ok(Outcome::ok(json(&serde_json::json!({
                    "sup_error": record.sup_error,
                    "final_loss": final_loss,
                    "grad_check": record.grad_check,
                    "diverged_at": record.diverged_at,
                    "iterations": record.error_curve.len() - 1,
                }))))
            } else {
                let mut text = format!(
                    "grad_check {:.3e}\nfinal loss {final_loss:.6e}\nsup error {:.6}\n",
                    record.grad_check, record.sup_error
                );
                if let Some(it) = record.diverged_at {
                    text.push_str(&format!("diverged at iteration {it}\n"));
                }
                Ok(Outcome::ok(text))
            }
        }
        Command::Report {
            model,
            expr,
            table,
            arity,
        } => {
            if let Some(p) = model {
                let m = Model::load(p)?;
                let d = match &m {
                    Model::Plain { .. } => None,
                    Model::Activated(a) => Some(a.label_dim()),
                };
                let summary = model_summary(m.mps(), d);
                return Ok(Outcome::ok(if cli.json {
                    json(&summary)
                } else {
                    summary_text(&summary)
                }));
            }
            let source = BoolSource {
                expr: expr.clone(),
                table: table.clone(),
            };
            let report = complexity_report(&to_dnf(&load_table(&source, *arity)?));
            Ok(Outcome::ok(if cli.json {
                json(&report)
            } else {
                complexity_text(&report)
            }))
        }
    }
}

fn read_config<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => toml::from_str(&std::fs::read_to_string(p)?).map_err(|e| Error::Config(e.to_string())),
    }
}

fn complexity_text(r: &crate::boolean::ComplexityReport) -> String {
    format!(
        "terms m = {}, minimized m' = {} (bond dim {})\nparameters {} (minimized {})\n",
        r.m, r.m_minimized, r.bond_dim_minimized, r.parameter_count, r.parameter_count_minimized
    )
}

#[derive(Serialize)]
struct ModelSummary {
    sites: usize,
    boundary: crate::mps::Boundary,
    phys_dims: Vec<usize>,
    bond_dims: Vec<usize>,
    label_site: Option<usize>,
    label_dim: Option<usize>,
    parameter_count: usize,
}

fn model_summary(mps: &crate::mps::Mps, label_dim: Option<usize>) -> ModelSummary {
    ModelSummary {
        sites: mps.len(),
        boundary: mps.boundary(),
        phys_dims: mps.phys_dims(),
        bond_dims: mps.bond_dims(),
        label_site: mps.label_site(),
        label_dim,
        parameter_count: mps.parameter_count(),
    }
}

fn summary_text(s: &ModelSummary) -> String {
    format!(
        "sites {} ({:?}), phys dims {:?}, bond dims {:?}, label {:?} x {:?}, parameters {}\n",
        s.sites, s.boundary, s.phys_dims, s.bond_dims, s.label_site, s.label_dim, s.parameter_count
    )
}

// SPDX-License-Identifier: Apache-2.0

//! Argument parsing and dispatch for the `gaussteady` binary.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gaussteady_core::{CatalogId, CatalogParams, Tolerances};

use crate::commands::{self, EvolveOptions, LevelChoice, Method, Report};
use crate::document::{Document, Source};
use crate::error::{CliError, EXIT_INPUT, EXIT_OK};
use crate::sweep::{self, CriterionSel, Quantity, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "gaussteady", version, about = "Steady states, bona-fide criteria and reservoir engineering for linear open bosonic systems")]
pub struct Cli {
    /// Emit JSON instead of text or CSV.
    #[arg(long, global = true)]
    pub json: bool,
    /// Uniform tolerance for the eigenvalue zero band and the residual checks.
    #[arg(long, global = true, value_name = "FLOAT")]
    pub tol: Option<f64>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Where the model comes from.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Model or covariance document (JSON); `-` reads standard input.
    #[arg(value_name = "MODEL")]
    pub model: Option<PathBuf>,
    /// Use a catalog entry instead of a document.
    #[arg(long, value_name = "ID", conflicts_with = "model")]
    pub catalog: Option<String>,
    /// Catalog parameter overrides, `name=value`, repeatable or comma-separated.
    #[arg(long = "set", visible_alias = "params", value_name = "NAME=VALUE", value_delimiter = ',')]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Drift, diffusion, stability and the steady covariance matrix.
    Steady(ModelArgs),
    /// Bona-fide criteria on the steady state and/or the environment.
    Criteria {
        #[command(flatten)]
        model: ModelArgs,
        /// uncertainty, classicality, separability, steering_one, steering_two or all.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        kind: Vec<String>,
        /// 1-based modes forming part two, e.g. `2` or `2,3`. Defaults to the last mode.
        #[arg(long, value_delimiter = ',')]
        partition: Option<Vec<usize>>,
        /// state, env or both.
        #[arg(long, default_value = "both")]
        level: String,
    },
    /// Grid over catalog parameters, written as CSV.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// Catalog parameter (or alias) varied along the first axis.
        #[arg(long)]
        param: String,
        /// `a:b:steps`.
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        /// Optional second axis; the first axis is the outer loop.
        #[arg(long, requires = "range2")]
        param2: Option<String>,
        #[arg(long, requires = "param2", allow_hyphen_values = true)]
        range2: Option<String>,
        /// abscissa, state:<criterion>, env:<criterion> or a closed-form threshold name.
        #[arg(long, value_delimiter = ',')]
        quantity: Vec<String>,
        /// Bisection-refined zero crossing `level:criterion` in the `--bisect` parameter.
        #[arg(long, value_delimiter = ',', requires = "bisect")]
        threshold: Vec<String>,
        /// Parameter the thresholds are located in.
        #[arg(long)]
        bisect: Option<String>,
        /// Bisection bracket `lo:hi`.
        #[arg(long, default_value = "1e-6:1000", allow_hyphen_values = true)]
        bracket: String,
        /// Bisection stops once the bracket is narrower than this.
        #[arg(long, default_value_t = 1e-10)]
        xtol: f64,
        /// 1-based modes forming part two. Defaults to the last mode.
        #[arg(long, value_delimiter = ',')]
        partition: Option<Vec<usize>>,
    },
    /// Reservoir whose unique steady state is a target covariance matrix.
    Engineer {
        /// Covariance document `{"cm": [[...]]}`.
        #[arg(long, value_name = "PATH", conflicts_with = "catalog")]
        target: Option<PathBuf>,
        /// Catalog entry; `tmtss` uses its squeezed thermal target directly.
        #[arg(long, value_name = "ID")]
        catalog: Option<String>,
        #[arg(long = "set", visible_alias = "params", value_name = "NAME=VALUE", value_delimiter = ',')]
        set: Vec<String>,
        /// gibbs or covariant.
        #[arg(long, default_value = "gibbs")]
        method: String,
        /// Rate of the reference drift `−βI`; defaults to 1/2 (ζ/2 for tmtss).
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Fixed-step integration of the mean and covariance; CSV trajectory.
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        /// Defaults to 40/|spectral abscissa|.
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Keep every k-th step; defaults to about a thousand rows.
        #[arg(long)]
        record_every: Option<usize>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
        /// Initial covariance document; defaults to the vacuum.
        #[arg(long, value_name = "PATH")]
        v0: Option<PathBuf>,
    },
    /// Symplectic eigenvalues and Williamson form of a covariance matrix or steady state.
    Williamson(ModelArgs),
    /// Spectrum of the drift and asymptotic stability.
    Stability(ModelArgs),
}

fn read_document(path: &PathBuf) -> Result<Document, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Document::from_json(&s)
    } else {
        Document::load(path)
    }
}

fn parse_assignments(items: &[String]) -> Result<Vec<(String, f64)>, CliError> {
    items
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| CliError::input(format!("expected name=value, got {s:?}")))?;
            let x: f64 = v.trim().parse().map_err(|_| CliError::input(format!("{v:?} is not a number")))?;
            Ok((k.trim().to_string(), x))
        })
        .collect()
}

fn load_model(args: &ModelArgs) -> Result<Document, CliError> {
    let mut doc = match (&args.model, &args.catalog) {
        (Some(p), None) => read_document(p)?,
        (None, Some(id)) => Document::catalog(id.parse::<CatalogId>().map_err(CliError::input)?, CatalogParams::new()),
        _ => return Err(CliError::input("give a model document or --catalog")),
    };
    for (k, v) in parse_assignments(&args.set)? {
        doc.set_param(&k, v)?;
    }
    if let Source::Catalog { id, params } = &doc.source {
        params.resolve(*id).map_err(CliError::input)?;
    }
    Ok(doc)
}

fn tolerances(cli_tol: Option<f64>, doc: Option<&Document>) -> Result<Tolerances, CliError> {
    let mut t = Tolerances::default();
    if let Some(d) = doc {
        t = d.tolerances.apply(t)?;
    }
    if let Some(x) = cli_tol {
        t = Tolerances::uniform(x).map_err(CliError::input)?;
        t.stability_margin = doc.and_then(|d| d.tolerances.stability_margin).unwrap_or(t.stability_margin);
    }
    Ok(t)
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Steady(m) => {
            let doc = load_model(m)?;
            commands::steady(&doc, &tolerances(cli.tol, Some(&doc))?)
        }
        Command::Stability(m) => {
            let doc = load_model(m)?;
            commands::stability(&doc, &tolerances(cli.tol, Some(&doc))?)
        }
        Command::Williamson(m) => {
            let doc = load_model(m)?;
            commands::williamson(&doc, &tolerances(cli.tol, Some(&doc))?)
        }
        Command::Criteria { model, kind, partition, level } => {
            let doc = load_model(model)?;
            let kinds: Vec<CriterionSel> = if kind.iter().any(|k| k == "all") {
                Vec::new()
            } else {
                kind.iter().map(|k| k.parse()).collect::<Result<_, _>>()?
            };
            let level: LevelChoice = level.parse()?;
            commands::criteria(&doc, &kinds, partition.as_deref(), level, &tolerances(cli.tol, Some(&doc))?)
        }
        Command::Sweep { model, param, range, param2, range2, quantity, threshold, bisect, bracket, xtol, partition } => {
            let doc = load_model(model)?;
            let mut axes = vec![(param.clone(), sweep::parse_range(range)?)];
            if let (Some(p), Some(r)) = (param2, range2) {
                axes.push((p.clone(), sweep::parse_range(r)?));
            }
            let quantities: Vec<Quantity> = quantity.iter().map(|q| q.parse()).collect::<Result<_, _>>()?;
            let bracket = sweep::parse_bracket(bracket)?;
            let thresholds = match bisect {
                Some(b) => threshold.iter().map(|t| sweep::parse_threshold(t, b, bracket)).collect::<Result<_, _>>()?,
                None => Vec::new(),
            };
            let spec = SweepSpec { axes, quantities, thresholds, part_two: partition.clone(), xtol: *xtol };
            let tol = tolerances(cli.tol, Some(&doc))?;
            let table = sweep::run_sweep(&doc, &spec, &tol)?;
            let json = serde_json::json!({
                "header": table.header,
                "rows": table.rows.iter().map(|r| crate::output::vector_json(r)).collect::<Vec<_>>(),
            });
            let csv = crate::output::csv_table(&table.header, &table.rows);
            Ok(Report { text: csv.clone(), json, csv: Some(csv), code: EXIT_OK })
        }
        Command::Engineer { target, catalog, set, method, beta } => {
            let method: Method = method.parse()?;
            match (target, catalog) {
                (Some(p), None) => {
                    if !set.is_empty() {
                        return Err(CliError::input("--set applies to --catalog targets only"));
                    }
                    let doc = read_document(p)?;
                    let tol = tolerances(cli.tol, Some(&doc))?;
                    let Source::Covariance(v) = &doc.source else {
                        return Err(CliError::input("--target must be a covariance document {\"cm\": [[...]]}"));
                    };
                    commands::engineer_cm(v, method, beta.unwrap_or(0.5), &tol)
                }
                (None, Some(id)) => {
                    let id: CatalogId = id.parse().map_err(CliError::input)?;
                    let mut doc = Document::catalog(id, CatalogParams::new());
                    for (k, v) in parse_assignments(set)? {
                        doc.set_param(&k, v)?;
                    }
                    let Source::Catalog { params, .. } = &doc.source else { unreachable!("built as a catalog document") };
                    commands::engineer_catalog(id, params, method, *beta, &tolerances(cli.tol, None)?)
                }
                _ => Err(CliError::input("give --target or --catalog")),
            }
        }
        Command::Evolve { model, t_end, dt, record_every, x0, v0 } => {
            let doc = load_model(model)?;
            let v0 = match v0 {
                Some(p) => match read_document(p)?.source {
                    Source::Covariance(v) => Some(v),
                    _ => return Err(CliError::input("--v0 must be a covariance document")),
                },
                None => None,
            };
            let opts = EvolveOptions { t_end: *t_end, dt: *dt, record_every: *record_every, x0: x0.clone(), v0 };
            commands::evolve_cmd(&doc, &opts, &tolerances(cli.tol, Some(&doc))?)
        }
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let report = match dispatch(&cli) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.code;
        }
    };
    let body = report.render(cli.json);
    let written = match &cli.output {
        Some(p) => std::fs::write(p, body.as_bytes()),
        None => out.write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_INPUT;
    }
    report.code
}

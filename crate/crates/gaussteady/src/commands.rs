// SPDX-License-Identifier: Apache-2.0

//! One function per subcommand. Each returns a [`Report`] carrying text, JSON and an exit code.

use gaussteady_core::evolution::default_step;
use gaussteady_core::lyapunov::{residual, steady_state};
use gaussteady_core::numerics::{norm_inf, relative_difference};
use gaussteady_core::williamson::{beta_recipe, two_mode_squeezer};
use gaussteady_core::{
    catalog_analytic, engineer_covariant_target, engineer_gibbs_target, environment_criterion, evolve, stability_check,
    state_criterion, symplectic_spectrum, williamson_decompose, AnalyticQuantity, CatalogId, CatalogParams,
    CovarianceMatrix, CriterionResult, EngineeredReservoir, Error, GaussianDynamics, Level, Partition, RMat, RVec,
    StabilityReport, Tolerances,
};
use serde_json::{json, Value};

use crate::document::{explicit_document, Document, Source};
use crate::error::{CliError, EXIT_OK, EXIT_STABILITY};
use crate::output::{complex_json, complex_text, csv_table, fmt_f64, matrix_json, matrix_text, num, vector_json, vector_text};
use crate::sweep::{partition_for, CriterionSel};

/// Rendered command output. `csv` replaces `text` when present and JSON was not requested.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub csv: Option<String>,
    pub code: u8,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, csv: None, code: EXIT_OK }
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            crate::output::to_json(&self.json)
        } else if let Some(c) = &self.csv {
            c.clone()
        } else {
            self.text.clone()
        }
    }
}

fn dynamics(doc: &Document, tol: &Tolerances) -> Result<GaussianDynamics, CliError> {
    doc.model()?.dynamics(tol).map_err(CliError::input)
}

fn stability_json(r: &StabilityReport) -> Value {
    json!({
        "status": r.status.name(),
        "spectral_abscissa": num(r.spectral_abscissa),
        "spectrum": complex_json(&r.spectrum),
    })
}

fn require_as(r: &StabilityReport) -> Result<(), CliError> {
    if r.is_as() {
        Ok(())
    } else {
        Err(CliError::new(
            EXIT_STABILITY,
            format!("drift is {} (spectral abscissa {})", r.status.name(), fmt_f64(r.spectral_abscissa)),
        ))
    }
}

fn lyapunov_residual(dy: &GaussianDynamics, v: &RMat) -> f64 {
    let r = residual(dy.gamma(), v, dy.diffusion());
    let scale = norm_inf(dy.diffusion()).max(norm_inf(dy.gamma()) * norm_inf(v));
    if scale > 0.0 { r / scale } else { r }
}

/// `Γ`, `D`, stability and the steady covariance matrix.
pub fn steady(doc: &Document, tol: &Tolerances) -> Result<Report, CliError> {
    let dy = dynamics(doc, tol)?;
    let st = stability_check(&dy, tol);
    require_as(&st)?;
    let v = steady_state(&dy, tol)?;
    let res = lyapunov_residual(&dy, v.matrix());
    let mean = dy.mean_fixed_point(tol)?;
    let analytic = match &doc.source {
        Source::Catalog { id, params } => catalog_analytic(*id, AnalyticQuantity::SteadyCm, params)
            .ok()
            .and_then(|a| a.matrix().map(|m| relative_difference(v.matrix(), m))),
        _ => None,
    };
    let mut text = String::new();
    text.push_str(&format!("modes: {}\n", dy.modes()));
    text.push_str("drift Γ:\n");
    text.push_str(&matrix_text(dy.gamma(), "  "));
    text.push_str("diffusion D:\n");
    text.push_str(&matrix_text(dy.diffusion(), "  "));
    text.push_str(&format!("stability: {}\n", st.status.name()));
    text.push_str(&format!("spectral abscissa: {}\n", fmt_f64(st.spectral_abscissa)));
    text.push_str(&format!("spectrum of Γ: {}\n", complex_text(&st.spectrum)));
    text.push_str("steady covariance V:\n");
    text.push_str(&matrix_text(v.matrix(), "  "));
    text.push_str(&format!("steady mean: {}\n", vector_text(mean.as_slice())));
    text.push_str(&format!("relative Lyapunov residual: {}\n", fmt_f64(res)));
    if let Some(a) = analytic {
        text.push_str(&format!("closed-form deviation: {}\n", fmt_f64(a)));
    }
    let json = json!({
        "modes": dy.modes(),
        "gamma": matrix_json(dy.gamma()),
        "diffusion": matrix_json(dy.diffusion()),
        "stability": stability_json(&st),
        "cm": matrix_json(v.matrix()),
        "mean": vector_json(mean.as_slice()),
        "lyapunov_residual": num(res),
        "closed_form_deviation": analytic.map(num).unwrap_or(Value::Null),
    });
    Ok(Report::ok(text, json))
}

pub fn stability(doc: &Document, tol: &Tolerances) -> Result<Report, CliError> {
    let dy = dynamics(doc, tol)?;
    let st = stability_check(&dy, tol);
    let mut text = format!("stability: {}\nspectral abscissa: {}\nspectrum of Γ: {}\n", st.status.name(), fmt_f64(st.spectral_abscissa), complex_text(&st.spectrum));
    if !st.is_as() {
        text.push_str("no unique steady state: the drift must be asymptotically stable\n");
    }
    let code = if st.is_as() { EXIT_OK } else { EXIT_STABILITY };
    Ok(Report { text, json: stability_json(&st), csv: None, code })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelChoice {
    State,
    Env,
    Both,
}

impl std::str::FromStr for LevelChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "state" => Ok(LevelChoice::State),
            "env" | "environment" => Ok(LevelChoice::Env),
            "both" => Ok(LevelChoice::Both),
            _ => Err(CliError::input(format!("unknown level {s:?} (state, env or both)"))),
        }
    }
}

fn result_json(sel: CriterionSel, r: &CriterionResult) -> Value {
    json!({
        "criterion": sel.name(),
        "partition": r.kind.partition().map(|p| p.to_string()),
        "level": r.level.name(),
        "spectrum": vector_json(&r.spectrum),
        "inertia": {"positive": r.inertia.positive, "zero": r.inertia.zero, "negative": r.inertia.negative},
        "verdict": r.verdict.name(),
        "conclusiveness": r.conclusiveness.name(),
        "outcome": r.outcome().name(),
        "bound_entanglement_possible": r.bound_entanglement_possible,
        "summary": r.summary(),
    })
}

/// Criteria at the requested levels. `kinds` empty means every criterion that applies.
pub fn criteria(
    doc: &Document,
    kinds: &[CriterionSel],
    part_two: Option<&[usize]>,
    level: LevelChoice,
    tol: &Tolerances,
) -> Result<Report, CliError> {
    let (v, dy) = match &doc.source {
        Source::Covariance(m) => {
            if level == LevelChoice::Env {
                return Err(CliError::input("environment criteria need a model, not a covariance matrix"));
            }
            (Some(CovarianceMatrix::new(m.clone(), tol)?), None)
        }
        _ => {
            let dy = dynamics(doc, tol)?;
            require_as(&stability_check(&dy, tol))?;
            let v = if level == LevelChoice::Env { None } else { Some(steady_state(&dy, tol)?) };
            (v, if level == LevelChoice::State { None } else { Some(dy) })
        }
    };
    let n = v.as_ref().map(|v| v.modes()).or(dy.as_ref().map(|d| d.modes())).unwrap_or(0);
    let partition: Option<Partition> = partition_for(n, part_two)?;
    let selected: Vec<CriterionSel> = if kinds.is_empty() {
        CriterionSel::ALL.iter().copied().filter(|c| partition.is_some() || !c.needs_partition()).collect()
    } else {
        kinds.to_vec()
    };
    let mut results = Vec::new();
    for sel in &selected {
        let kind = sel.kind(partition.as_ref())?;
        if let Some(v) = &v {
            results.push((*sel, state_criterion(v, &kind, tol)?));
        }
        if let Some(d) = &dy {
            results.push((*sel, environment_criterion(d, &kind, tol)?));
        }
    }
    let mut text = String::new();
    for (sel, r) in &results {
        let part = r.kind.partition().map(|p| format!(" part two {p}")).unwrap_or_default();
        let level = match r.level {
            Level::State => "state",
            Level::Environment => "env",
        };
        text.push_str(&format!(
            "{:<13}{part} [{level}]: {} ({}, {}) inertia {} min eigenvalue {}: {}\n",
            sel.name(),
            r.outcome().name(),
            r.verdict.name(),
            r.conclusiveness.name(),
            r.inertia,
            fmt_f64(r.min_eigenvalue()),
            r.summary()
        ));
        text.push_str(&format!("    spectrum: {}\n", vector_text(&r.spectrum)));
    }
    let json = json!({
        "modes": n,
        "results": results.iter().map(|(s, r)| result_json(*s, r)).collect::<Vec<_>>(),
    });
    Ok(Report::ok(text, json))
}

/// Symplectic spectrum and diagonalizing symplectic of a covariance matrix, or of a model's steady state.
pub fn williamson(doc: &Document, tol: &Tolerances) -> Result<Report, CliError> {
    let m = match &doc.source {
        Source::Covariance(m) => m.clone(),
        _ => {
            let dy = dynamics(doc, tol)?;
            require_as(&stability_check(&dy, tol))?;
            steady_state(&dy, tol)?.into_inner()
        }
    };
    let w = williamson_decompose(&m, tol)?;
    let spectrum = symplectic_spectrum(&m, tol)?;
    let mus = w.symplectic_eigenvalues();
    let physical = mus.iter().all(|mu| *mu >= 1.0 - tol.eig_zero_band);
    let pure = w.is_pure(tol.eig_zero_band);
    let mut text = String::new();
    text.push_str(&format!("symplectic eigenvalues (descending): {}\n", vector_text(&spectrum)));
    text.push_str(&format!("physical (all ≥ 1): {physical}\npure: {pure}\n"));
    text.push_str("symplectic S with S M Sᵀ = Λ:\n");
    text.push_str(&matrix_text(&w.s, "  "));
    text.push_str("Λ:\n");
    text.push_str(&matrix_text(&w.lambda, "  "));
    text.push_str(&format!(
        "congruence residual: {}\nsymplectic residual: {}\n",
        fmt_f64(w.congruence_residual),
        fmt_f64(w.symplectic_residual)
    ));
    let json = json!({
        "symplectic_eigenvalues": vector_json(&spectrum),
        "physical": physical,
        "pure": pure,
        "s": matrix_json(&w.s),
        "lambda": matrix_json(&w.lambda),
        "congruence_residual": num(w.congruence_residual),
        "symplectic_residual": num(w.symplectic_residual),
    });
    Ok(Report::ok(text, json))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Gibbs,
    Covariant,
}

impl std::str::FromStr for Method {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "gibbs" => Ok(Method::Gibbs),
            "covariant" => Ok(Method::Covariant),
            _ => Err(CliError::input(format!("unknown method {s:?} (gibbs or covariant)"))),
        }
    }
}

fn engineering_error(e: Error) -> CliError {
    match e {
        Error::InvalidParameter { .. } | Error::DimensionMismatch(_) | Error::NotSymmetric { .. } | Error::ZeroModes => {
            CliError::input(e)
        }
        _ => CliError::engineering(e),
    }
}

// gate for "all symplectic eigenvalues equal", as for the engineering post-check
const DEGENERACY_GATE: f64 = 1e3;

/// Reservoir whose unique steady state is the covariance matrix `target`.
///
/// `gibbs` needs a target proportional to a pure state (`αSSᵀ`) and uses `Γ′ = −βI`.
/// `covariant` accepts any physical target and transports `(−βI, 2βΛ)` from its
/// Williamson form.
pub fn engineer_cm(target: &RMat, method: Method, beta: f64, tol: &Tolerances) -> Result<Report, CliError> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(CliError::input("--beta must be positive"));
    }
    let w = williamson_decompose(target, tol).map_err(engineering_error)?;
    let mus = w.symplectic_eigenvalues();
    let lo = mus.first().copied().unwrap_or(f64::NAN);
    let hi = mus.last().copied().unwrap_or(f64::NAN);
    if lo < 1.0 - tol.eig_zero_band {
        return Err(CliError::engineering(format!(
            "target violates the uncertainty relation (smallest symplectic eigenvalue {})",
            fmt_f64(lo)
        )));
    }
    let s_inv = w.s.clone().try_inverse().ok_or_else(|| CliError::engineering("singular symplectic"))?;
    let res = match method {
        Method::Gibbs => {
            if hi - lo > DEGENERACY_GATE * tol.residual_tol * hi {
                return Err(CliError::engineering(format!(
                    "gibbs needs equal symplectic eigenvalues, found {}; use --method covariant",
                    vector_text(&mus)
                )));
            }
            let alpha = (mus.iter().sum::<f64>() / mus.len() as f64).max(1.0);
            let dim = target.nrows();
            let g = RMat::identity(dim, dim) * -beta;
            engineer_gibbs_target(&s_inv, alpha, Some(&g), tol).map_err(engineering_error)?
        }
        Method::Covariant => {
            let (g, d) = beta_recipe(&w.lambda, beta).map_err(engineering_error)?;
            engineer_covariant_target(&w.lambda, &g, &d, &w.s, tol).map_err(engineering_error)?
        }
    };
    reservoir_report(res, target, method, tol)
}

/// Reservoir for a catalog entry. The squeezed thermal target goes straight through the
/// Gibbs recipe with `S_r` and `α = 2n̄ + 1`; other entries target their solved steady state.
pub fn engineer_catalog(id: CatalogId, params: &CatalogParams, method: Method, beta: Option<f64>, tol: &Tolerances) -> Result<Report, CliError> {
    if id == CatalogId::Tmtss && method == Method::Gibbs {
        let p = params.resolve(id).map_err(CliError::input)?;
        let s = two_mode_squeezer(p.get("r")).map_err(CliError::input)?;
        let alpha = 2.0 * p.get("nbar") + 1.0;
        let beta = beta.unwrap_or(0.5 * p.get("zeta"));
        if !(beta > 0.0) {
            return Err(CliError::input("--beta must be positive"));
        }
        let g = RMat::identity(4, 4) * -beta;
        let res = engineer_gibbs_target(&s, alpha, Some(&g), tol).map_err(engineering_error)?;
        let target = res.target.clone();
        return reservoir_report(res, &target, method, tol);
    }
    let doc = Document::catalog(id, params.clone());
    let dy = dynamics(&doc, tol)?;
    require_as(&stability_check(&dy, tol))?;
    let v = steady_state(&dy, tol)?;
    engineer_cm(v.matrix(), method, beta.unwrap_or(0.5), tol)
}

fn reservoir_report(res: EngineeredReservoir, requested: &RMat, method: Method, tol: &Tolerances) -> Result<Report, CliError> {
    let model = res.realization.model(tol).map_err(engineering_error)?;
    let rebuilt = model.dynamics(tol).map_err(engineering_error)?;
    let rebuild_dev = relative_difference(rebuilt.gamma(), &res.gamma_p).max(relative_difference(rebuilt.diffusion(), &res.diffusion_p));
    let v = steady_state(&rebuilt, tol).map_err(engineering_error)?;
    let lyap = lyapunov_residual(&rebuilt, requested);
    let target_dev = relative_difference(v.matrix(), requested);
    let gate = DEGENERACY_GATE * tol.residual_tol;
    let pass = res.steady_state_deviation <= gate && target_dev <= gate && rebuild_dev <= gate;
    if !pass {
        return Err(CliError::engineering(format!(
            "verification failed: steady-state deviation {}, target deviation {}, rebuild deviation {}",
            fmt_f64(res.steady_state_deviation),
            fmt_f64(target_dev),
            fmt_f64(rebuild_dev)
        )));
    }
    let method_name = match method {
        Method::Gibbs => "gibbs",
        Method::Covariant => "covariant",
    };
    let lambdas: Vec<Value> = res
        .realization
        .lambdas
        .iter()
        .zip(&res.realization.weights)
        .map(|(l, w)| {
            json!({
                "weight": num(*w),
                "lambda_re": vector_json(&l.iter().map(|z| z.re).collect::<Vec<_>>()),
                "lambda_im": vector_json(&l.iter().map(|z| z.im).collect::<Vec<_>>()),
            })
        })
        .collect();
    let mut text = String::new();
    text.push_str(&format!("method: {method_name}\n"));
    text.push_str("target V:\n");
    text.push_str(&matrix_text(requested, "  "));
    text.push_str("engineered drift Γ_p:\n");
    text.push_str(&matrix_text(&res.gamma_p, "  "));
    text.push_str("engineered diffusion D_p:\n");
    text.push_str(&matrix_text(&res.diffusion_p, "  "));
    text.push_str("Hamiltonian Hessian:\n");
    text.push_str(&matrix_text(&res.realization.hessian, "  "));
    for (k, (l, w)) in res.realization.lambdas.iter().zip(&res.realization.weights).enumerate() {
        text.push_str(&format!("jump {k} (weight {}):\n", fmt_f64(*w)));
        text.push_str(&format!("  re: {}\n", vector_text(&l.iter().map(|z| z.re).collect::<Vec<_>>())));
        text.push_str(&format!("  im: {}\n", vector_text(&l.iter().map(|z| z.im).collect::<Vec<_>>())));
    }
    text.push_str(&format!(
        "verification: pass (steady-state deviation {}, target deviation {}, rebuild deviation {}, Lyapunov residual {})\n",
        fmt_f64(res.steady_state_deviation),
        fmt_f64(target_dev),
        fmt_f64(rebuild_dev),
        fmt_f64(lyap)
    ));
    let model_doc = serde_json::to_value(explicit_document(&model)).map_err(CliError::input)?;
    let json = json!({
        "method": method_name,
        "target": matrix_json(requested),
        "gamma_p": matrix_json(&res.gamma_p),
        "diffusion_p": matrix_json(&res.diffusion_p),
        "hessian": matrix_json(&res.realization.hessian),
        "jumps": lambdas,
        "model": model_doc,
        "verification": {
            "pass": pass,
            "steady_state_deviation": num(res.steady_state_deviation),
            "target_deviation": num(target_dev),
            "rebuild_deviation": num(rebuild_dev),
            "lyapunov_residual": num(lyap),
        },
    });
    Ok(Report::ok(text, json))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvolveOptions {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub record_every: Option<usize>,
    pub x0: Option<Vec<f64>>,
    pub v0: Option<RMat>,
}

/// Trajectory as CSV (`t`, means, upper-triangle CM entries) plus a JSON summary.
pub fn evolve_cmd(doc: &Document, opts: &EvolveOptions, tol: &Tolerances) -> Result<Report, CliError> {
    let dy = dynamics(doc, tol)?;
    let st = stability_check(&dy, tol);
    let d = 2 * dy.modes();
    let t_end = match opts.t_end {
        Some(t) => t,
        None => {
            require_as(&st)?;
            40.0 / st.spectral_abscissa.abs()
        }
    };
    let dt = opts.dt.unwrap_or_else(|| default_step(&dy));
    let x0 = match &opts.x0 {
        Some(x) if x.len() != d => return Err(CliError::input(format!("--x0 needs {d} values"))),
        Some(x) => RVec::from_vec(x.clone()),
        None => RVec::zeros(d),
    };
    let v0 = opts.v0.clone().unwrap_or_else(|| RMat::identity(d, d));
    if v0.nrows() != d {
        return Err(CliError::input(format!("initial covariance must be {d}×{d}")));
    }
    let steps = (t_end / dt).ceil().max(1.0) as usize;
    let every = opts.record_every.unwrap_or_else(|| (steps / 1000).max(1));
    let tr = evolve(&dy, &x0, &v0, t_end, Some(dt), Some(every), tol).map_err(|e| match e {
        Error::NonFinite { .. } => CliError::new(EXIT_STABILITY, e.to_string()),
        e => CliError::input(e),
    })?;

    let mut header = vec![String::from("t")];
    header.extend((1..=d).map(|i| format!("x{i}")));
    for i in 1..=d {
        for j in i..=d {
            header.push(format!("v{i}_{j}"));
        }
    }
    let rows: Vec<Vec<f64>> = tr
        .times
        .iter()
        .zip(&tr.means)
        .zip(&tr.cms)
        .map(|((t, x), v)| {
            let mut r = vec![*t];
            r.extend(x.iter());
            for i in 0..d {
                for j in i..d {
                    r.push(v[(i, j)]);
                }
            }
            r
        })
        .collect();
    let last = tr.last_cm().cloned().unwrap_or_else(|| v0.clone());
    let deviation = if st.is_as() {
        steady_state(&dy, tol).ok().map(|v| relative_difference(&last, v.matrix()))
    } else {
        None
    };
    let mut text = format!("t_end: {}\ndt: {}\nrecorded samples: {}\nterminal covariance:\n", fmt_f64(t_end), fmt_f64(dt), tr.len());
    text.push_str(&matrix_text(&last, "  "));
    if let Some(dv) = deviation {
        text.push_str(&format!("relative deviation from the steady state: {}\n", fmt_f64(dv)));
    }
    let json = json!({
        "t_end": num(t_end),
        "dt": num(dt),
        "samples": tr.len(),
        "terminal_cm": matrix_json(&last),
        "terminal_mean": vector_json(tr.last_mean().map(|m| m.as_slice()).unwrap_or(&[])),
        "steady_state_deviation": deviation.map(num).unwrap_or(Value::Null),
        "stability": stability_json(&st),
    });
    Ok(Report { text, json, csv: Some(csv_table(&header, &rows)), code: EXIT_OK })
}

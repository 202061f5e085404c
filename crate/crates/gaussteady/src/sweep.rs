// SPDX-License-Identifier: Apache-2.0

//! Parameter grids over catalog models, evaluated in parallel and emitted in grid order.

use std::str::FromStr;

use gaussteady_core::criteria::bisect;
use gaussteady_core::lyapunov::steady_state;
use gaussteady_core::{
    catalog_analytic, catalog_build, environment_criterion, stability_check, state_criterion, AnalyticQuantity,
    CatalogId, CatalogParams, CriterionKind, GaussianDynamics, Level, Partition, SteeringSide, Tolerances,
};
use rayon::prelude::*;

use crate::document::{with_override, Document, Source};
use crate::error::CliError;

/// `a:b:steps`, evenly spaced and inclusive. `a = b` yields one point whatever `steps` says.
pub fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::input(format!("range {s:?} must look like a:b:steps"));
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(CliError::input(format!("range {s:?} has a non-finite end")));
    }
    if a == b {
        return Ok(vec![a]);
    }
    match n {
        0 => Err(CliError::input(format!("range {s:?} needs at least one step"))),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|k| if k == n - 1 { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect()),
    }
}

/// `lo:hi` for bisection brackets.
pub fn parse_bracket(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::input(format!("bracket {s:?} must look like lo:hi with lo < hi"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// A criterion without its partition, which comes from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionSel {
    Uncertainty,
    Classicality,
    Separability,
    SteeringOne,
    SteeringTwo,
}

impl CriterionSel {
    pub const ALL: [CriterionSel; 5] = [
        CriterionSel::Uncertainty,
        CriterionSel::Classicality,
        CriterionSel::Separability,
        CriterionSel::SteeringOne,
        CriterionSel::SteeringTwo,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CriterionSel::Uncertainty => "uncertainty",
            CriterionSel::Classicality => "classicality",
            CriterionSel::Separability => "separability",
            CriterionSel::SteeringOne => "steering_one",
            CriterionSel::SteeringTwo => "steering_two",
        }
    }

    pub fn needs_partition(&self) -> bool {
        !matches!(self, CriterionSel::Uncertainty | CriterionSel::Classicality)
    }

    pub fn kind(&self, partition: Option<&Partition>) -> Result<CriterionKind, CliError> {
        let part = || {
            partition.cloned().ok_or_else(|| CliError::input(format!("{} needs a bipartition (at least two modes)", self.name())))
        };
        Ok(match self {
            CriterionSel::Uncertainty => CriterionKind::Uncertainty,
            CriterionSel::Classicality => CriterionKind::Classicality,
            CriterionSel::Separability => CriterionKind::Separability(part()?),
            CriterionSel::SteeringOne => CriterionKind::Steerability { partition: part()?, side: SteeringSide::PartOne },
            CriterionSel::SteeringTwo => CriterionKind::Steerability { partition: part()?, side: SteeringSide::PartTwo },
        })
    }
}

impl FromStr for CriterionSel {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        match key.as_str() {
            "steerability_one" | "steer_one" => return Ok(CriterionSel::SteeringOne),
            "steerability_two" | "steer_two" => return Ok(CriterionSel::SteeringTwo),
            _ => {}
        }
        CriterionSel::ALL
            .iter()
            .copied()
            .find(|c| c.name() == key)
            .ok_or_else(|| CliError::input(format!("unknown criterion {s:?}")))
    }
}

pub fn parse_level(s: &str) -> Result<Level, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "state" => Ok(Level::State),
        "env" | "environment" => Ok(Level::Environment),
        _ => Err(CliError::input(format!("unknown level {s:?} (state or env)"))),
    }
}

fn level_token(l: Level) -> &'static str {
    match l {
        Level::State => "state",
        Level::Environment => "env",
    }
}

/// One numeric column of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Abscissa,
    /// Smallest eigenvalue of the tested matrix.
    MinEigenvalue(Level, CriterionSel),
    /// A scalar closed form of the catalog model.
    Analytic(AnalyticQuantity),
}

impl Quantity {
    pub fn header(&self) -> String {
        match self {
            Quantity::Abscissa => "abscissa".into(),
            Quantity::MinEigenvalue(l, c) => format!("{}:{}", level_token(*l), c.name()),
            Quantity::Analytic(q) => q.name().into(),
        }
    }
}

impl FromStr for Quantity {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if s == "abscissa" {
            return Ok(Quantity::Abscissa);
        }
        if let Some((l, c)) = s.split_once(':') {
            return Ok(Quantity::MinEigenvalue(parse_level(l)?, c.parse()?));
        }
        match s.parse::<AnalyticQuantity>() {
            Ok(q) if scalar_analytic(q) => Ok(Quantity::Analytic(q)),
            Ok(q) => Err(CliError::input(format!("{q} is not a scalar quantity"))),
            Err(_) => Err(CliError::input(format!(
                "unknown quantity {s:?} (abscissa, state:<criterion>, env:<criterion> or a closed-form threshold)"
            ))),
        }
    }
}

fn scalar_analytic(q: AnalyticQuantity) -> bool {
    use AnalyticQuantity as A;
    matches!(
        q,
        A::SeparabilityThreshold
            | A::ClassicalityThreshold
            | A::ExactSeparabilityThreshold
            | A::ExactClassicalityThreshold
            | A::SteeringThreshold
    )
}

/// Bisection-refined zero crossing of one criterion's minimal eigenvalue in `param`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSpec {
    pub level: Level,
    pub criterion: CriterionSel,
    pub param: String,
    pub lo: f64,
    pub hi: f64,
}

impl ThresholdSpec {
    pub fn header(&self) -> String {
        format!("threshold:{}:{}:{}", level_token(self.level), self.criterion.name(), self.param)
    }
}

/// `level:criterion`, e.g. `env:separability`.
pub fn parse_threshold(s: &str, param: &str, bracket: (f64, f64)) -> Result<ThresholdSpec, CliError> {
    let (l, c) = s
        .split_once(':')
        .ok_or_else(|| CliError::input(format!("threshold {s:?} must look like level:criterion")))?;
    Ok(ThresholdSpec { level: parse_level(l)?, criterion: c.parse()?, param: param.to_string(), lo: bracket.0, hi: bracket.1 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Outer axis first.
    pub axes: Vec<(String, Vec<f64>)>,
    pub quantities: Vec<Quantity>,
    pub thresholds: Vec<ThresholdSpec>,
    /// 1-based modes of part two; defaults to the last mode.
    pub part_two: Option<Vec<usize>>,
    pub xtol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn partition_for(n: usize, part_two: Option<&[usize]>) -> Result<Option<Partition>, CliError> {
    match part_two {
        Some(p) => {
            if p.iter().any(|&k| k == 0) {
                return Err(CliError::input("partition modes are numbered from 1"));
            }
            let idx: Vec<usize> = p.iter().map(|k| k - 1).collect();
            Ok(Some(Partition::new(n, &idx).map_err(CliError::input)?))
        }
        None if n >= 2 => Ok(Some(Partition::last(n, 1).map_err(CliError::input)?)),
        None => Ok(None),
    }
}

fn min_eigenvalue(dy: &GaussianDynamics, level: Level, kind: &CriterionKind, tol: &Tolerances) -> gaussteady_core::Result<f64> {
    let r = match level {
        Level::State => state_criterion(&steady_state(dy, tol)?, kind, tol)?,
        Level::Environment => environment_criterion(dy, kind, tol)?,
    };
    Ok(r.min_eigenvalue())
}

struct Cell<'a> {
    id: CatalogId,
    params: CatalogParams,
    kinds: &'a [Option<CriterionKind>],
    threshold_kinds: &'a [CriterionKind],
}

impl Cell<'_> {
    fn evaluate(&self, spec: &SweepSpec, tol: &Tolerances) -> Vec<f64> {
        let model = catalog_build(self.id, &self.params).and_then(|m| m.dynamics(tol));
        let mut out = Vec::with_capacity(spec.quantities.len() + spec.thresholds.len());
        let mut state_cache = None;
        for (q, kind) in spec.quantities.iter().zip(self.kinds) {
            let v = match (q, &model) {
                (_, Err(_)) => f64::NAN,
                (Quantity::Abscissa, Ok(dy)) => stability_check(dy, tol).spectral_abscissa,
                (Quantity::MinEigenvalue(Level::State, _), Ok(dy)) => {
                    let v = state_cache.get_or_insert_with(|| steady_state(dy, tol));
                    match (v, kind) {
                        (Ok(v), Some(k)) => state_criterion(v, k, tol).map(|r| r.min_eigenvalue()).unwrap_or(f64::NAN),
                        _ => f64::NAN,
                    }
                }
                (Quantity::MinEigenvalue(Level::Environment, _), Ok(dy)) => match kind {
                    Some(k) => environment_criterion(dy, k, tol).map(|r| r.min_eigenvalue()).unwrap_or(f64::NAN),
                    None => f64::NAN,
                },
                (Quantity::Analytic(a), Ok(_)) => {
                    catalog_analytic(self.id, *a, &self.params).ok().and_then(|v| v.scalar()).unwrap_or(f64::NAN)
                }
            };
            out.push(v);
        }
        for (t, kind) in spec.thresholds.iter().zip(self.threshold_kinds) {
            let f = |x: f64| {
                let p = with_override(self.id, &self.params, &t.param, x)
                    .map_err(|e| gaussteady_core::Error::Precondition(e.message))?;
                let dy = catalog_build(self.id, &p)?.dynamics(tol)?;
                min_eigenvalue(&dy, t.level, kind, tol)
            };
            out.push(bisect(f, t.lo, t.hi, spec.xtol).unwrap_or(f64::NAN));
        }
        out
    }
}

/// Evaluates every grid point of a catalog document. Cells whose model cannot be built,
/// is not stable, or has no sign change in a bracket come out as `NaN`.
pub fn run_sweep(doc: &Document, spec: &SweepSpec, tol: &Tolerances) -> Result<SweepTable, CliError> {
    let Source::Catalog { id, params } = &doc.source else {
        return Err(CliError::input("parameter sweeps need a catalog model"));
    };
    let id = *id;
    if spec.axes.is_empty() {
        return Err(CliError::input("a sweep needs at least one parameter"));
    }
    if spec.quantities.is_empty() && spec.thresholds.is_empty() {
        return Err(CliError::input("nothing to compute: give --quantity or --threshold"));
    }
    if !(spec.xtol > 0.0) {
        return Err(CliError::input("bisection tolerance must be positive"));
    }
    for (name, _) in &spec.axes {
        with_override(id, params, name, 0.0)?;
    }
    for t in &spec.thresholds {
        with_override(id, params, &t.param, 0.0)?;
    }
    let partition = partition_for(id.modes(), spec.part_two.as_deref())?;
    let kinds: Vec<Option<CriterionKind>> = spec
        .quantities
        .iter()
        .map(|q| match q {
            Quantity::MinEigenvalue(_, c) => c.kind(partition.as_ref()).map(Some),
            _ => Ok(None),
        })
        .collect::<Result<_, _>>()?;
    let threshold_kinds: Vec<CriterionKind> =
        spec.thresholds.iter().map(|t| t.criterion.kind(partition.as_ref())).collect::<Result<_, _>>()?;

    // grid index in lexicographic order, outer axis slowest
    let sizes: Vec<usize> = spec.axes.iter().map(|(_, v)| v.len()).collect();
    let total: usize = sizes.iter().product();
    let points: Vec<Vec<f64>> = (0..total)
        .map(|mut k| {
            let mut idx = vec![0; sizes.len()];
            for (a, &s) in sizes.iter().enumerate().rev() {
                idx[a] = k % s;
                k /= s;
            }
            idx.iter().enumerate().map(|(a, &i)| spec.axes[a].1[i]).collect()
        })
        .collect();
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|pt| {
            let mut p = params.clone();
            for ((name, _), &x) in spec.axes.iter().zip(pt) {
                // names were checked above
                p = with_override(id, &p, name, x).unwrap_or_else(|_| p.clone());
            }
            let cell = Cell { id, params: p, kinds: &kinds, threshold_kinds: &threshold_kinds };
            let mut row = pt.clone();
            row.extend(cell.evaluate(spec, tol));
            row
        })
        .collect();

    let mut header: Vec<String> = spec.axes.iter().map(|(n, _)| n.clone()).collect();
    header.extend(spec.quantities.iter().map(Quantity::header));
    header.extend(spec.thresholds.iter().map(ThresholdSpec::header));
    Ok(SweepTable { header, rows })
}

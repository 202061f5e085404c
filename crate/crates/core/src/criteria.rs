// SPDX-License-Identifier: Apache-2.0

//! Bona-fide relations `V + Ξ ≥ 0` on a state, or their shifted-diffusion form on `(Γ, D)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::lyapunov::{shifted_q, shifted_q_symmetric, CovarianceMatrix};
use crate::model::{require_stable, GaussianDynamics};
use crate::numerics::{
    classify, hermitian_defect, hermitian_spectrum_unchecked, j_matrix, to_complex, Definiteness, InertiaIndex,
    Tolerances,
};
use crate::{CMat, Complex64, Error, RMat, Result};

/// Bipartition of the modes; the momenta of part two flip under partial time inversion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    part_two: Vec<usize>,
}

impl Partition {
    /// `part_two` holds 0-based mode indices.
    pub fn new(n: usize, part_two: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroModes);
        }
        let mut p: Vec<usize> = part_two.to_vec();
        p.sort_unstable();
        p.dedup();
        if p.len() != part_two.len() {
            return Err(Error::InvalidPartition("repeated mode index".into()));
        }
        if let Some(&k) = p.iter().find(|&&k| k >= n) {
            return Err(Error::InvalidPartition(format!("mode {} out of range 1..{n}", k + 1)));
        }
        if p.is_empty() || p.len() == n {
            return Err(Error::InvalidPartition("part two must be a non-empty proper subset".into()));
        }
        Ok(Partition { n, part_two: p })
    }

    /// Last `n2` modes form part two.
    pub fn last(n: usize, n2: usize) -> Result<Self> {
        if n2 > n {
            return Err(Error::InvalidPartition(format!("{n2} modes requested out of {n}")));
        }
        let idx: Vec<usize> = (n - n2..n).collect();
        Self::new(n, &idx)
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn part_two(&self) -> &[usize] {
        &self.part_two
    }

    pub fn part_one(&self) -> Vec<usize> {
        (0..self.n).filter(|k| !self.part_two.contains(k)).collect()
    }

    /// Roles of the two parts exchanged.
    pub fn swapped(&self) -> Partition {
        Partition { n: self.n, part_two: self.part_one() }
    }

    /// Diagonal `T` flipping the momenta of part two.
    pub fn time_inversion(&self) -> RMat {
        let mut t = RMat::identity(2 * self.n, 2 * self.n);
        for &k in &self.part_two {
            t[(self.n + k, self.n + k)] = -1.0;
        }
        t
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, k) in self.part_two.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", k + 1)?;
        }
        f.write_str("}")
    }
}

/// Which part is tested for being steered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SteeringSide {
    /// Uses `Π = ½(J + T J T)` with `T` flipping part two: `J` on part one, zero on part two.
    PartOne,
    /// Same with the roles exchanged.
    PartTwo,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CriterionKind {
    Uncertainty,
    Classicality,
    Separability(Partition),
    Steerability { partition: Partition, side: SteeringSide },
}

impl CriterionKind {
    pub fn name(&self) -> &'static str {
        match self {
            CriterionKind::Uncertainty => "uncertainty",
            CriterionKind::Classicality => "classicality",
            CriterionKind::Separability(_) => "separability",
            CriterionKind::Steerability { .. } => "steerability",
        }
    }

    pub fn partition(&self) -> Option<&Partition> {
        match self {
            CriterionKind::Separability(p) | CriterionKind::Steerability { partition: p, .. } => Some(p),
            _ => None,
        }
    }

    /// Label of the property certified when the matrix is positive semidefinite.
    pub fn holds_label(&self) -> &'static str {
        match self {
            CriterionKind::Uncertainty => "physical",
            CriterionKind::Classicality => "classical",
            CriterionKind::Separability(_) => "separable",
            CriterionKind::Steerability { .. } => "non-steerable",
        }
    }

    pub fn violated_label(&self) -> &'static str {
        match self {
            CriterionKind::Uncertainty => "unphysical",
            CriterionKind::Classicality => "nonclassical",
            CriterionKind::Separability(_) => "entangled",
            CriterionKind::Steerability { .. } => "steerable",
        }
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriterionKind::Separability(p) => write!(f, "separability{p}"),
            CriterionKind::Steerability { partition, side } => {
                let s = match side {
                    SteeringSide::PartOne => 1,
                    SteeringSide::PartTwo => 2,
                };
                write!(f, "steerability{partition}[part {s}]")
            }
            k => f.write_str(k.name()),
        }
    }
}

fn check_partition(p: &Partition, n: usize) -> Result<()> {
    if p.n != n {
        return Err(Error::InvalidPartition(format!("partition is for {} modes, system has {n}", p.n)));
    }
    Ok(())
}

/// `½(J + TJT)`, with `T` chosen by `side`.
pub fn steering_form(partition: &Partition, side: SteeringSide) -> RMat {
    let n = partition.n;
    let t = match side {
        SteeringSide::PartOne => partition.time_inversion(),
        SteeringSide::PartTwo => partition.swapped().time_inversion(),
    };
    let j = j_matrix(n);
    (&j + &t * &j * &t) * 0.5
}

/// The shift `Ξ` of each relation `V + Ξ ≥ 0`.
pub fn xi_matrix(kind: &CriterionKind, n: usize) -> Result<CMat> {
    if n == 0 {
        return Err(Error::ZeroModes);
    }
    let i = Complex64::new(0.0, 1.0);
    Ok(match kind {
        CriterionKind::Uncertainty => to_complex(&j_matrix(n)) * i,
        CriterionKind::Classicality => -CMat::identity(2 * n, 2 * n),
        CriterionKind::Separability(p) => {
            check_partition(p, n)?;
            let t = p.time_inversion();
            to_complex(&(&t * j_matrix(n) * &t)) * i
        }
        CriterionKind::Steerability { partition, side } => {
            check_partition(partition, n)?;
            to_complex(&steering_form(partition, *side)) * i
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    State,
    Environment,
}

impl Level {
    pub fn name(&self) -> &'static str {
        match self {
            Level::State => "state",
            Level::Environment => "environment",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Violated,
    Marginal,
}

impl Verdict {
    fn from_definiteness(d: Definiteness) -> Self {
        match d {
            Definiteness::PositiveDefinite => Verdict::Holds,
            Definiteness::PositiveSemidefiniteMarginal => Verdict::Marginal,
            Definiteness::Indefinite => Verdict::Violated,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Marginal => "marginal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Conclusiveness {
    IffCondition,
    SufficientOnly,
}

impl Conclusiveness {
    pub fn name(&self) -> &'static str {
        match self {
            Conclusiveness::IffCondition => "iff",
            Conclusiveness::SufficientOnly => "sufficient",
        }
    }
}

/// What may be concluded about the steady state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Holds,
    Violated,
    Marginal,
    Inconclusive,
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::Violated => "violated",
            Outcome::Marginal => "marginal",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub kind: CriterionKind,
    pub level: Level,
    pub tested_matrix: CMat,
    /// Ascending.
    pub spectrum: Vec<f64>,
    pub inertia: InertiaIndex,
    pub verdict: Verdict,
    pub conclusiveness: Conclusiveness,
    /// PPT holds across a cut with more than one mode on each side.
    pub bound_entanglement_possible: bool,
}

impl CriterionResult {
    pub fn outcome(&self) -> Outcome {
        match (self.verdict, self.conclusiveness) {
            (Verdict::Holds, _) => Outcome::Holds,
            (Verdict::Marginal, _) => Outcome::Marginal,
            (Verdict::Violated, Conclusiveness::IffCondition) => Outcome::Violated,
            (Verdict::Violated, Conclusiveness::SufficientOnly) => Outcome::Inconclusive,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum.first().copied().unwrap_or(f64::NAN)
    }

    /// Human-readable conclusion.
    pub fn summary(&self) -> String {
        let what = match self.outcome() {
            Outcome::Holds | Outcome::Marginal => {
                if self.bound_entanglement_possible {
                    String::from("PPT (separable or bound entangled)")
                } else {
                    String::from(self.kind.holds_label())
                }
            }
            Outcome::Violated => String::from(self.kind.violated_label()),
            Outcome::Inconclusive => format!("inconclusive ({} condition fails)", self.kind.holds_label()),
        };
        if self.outcome() == Outcome::Marginal {
            format!("{what} (boundary)")
        } else {
            what
        }
    }
}

fn finish(
    kind: &CriterionKind,
    level: Level,
    m: CMat,
    conclusiveness: Conclusiveness,
    tol: &Tolerances,
) -> CriterionResult {
    let spectrum = hermitian_spectrum_unchecked(&m);
    let inertia = classify(&spectrum, tol);
    let verdict = Verdict::from_definiteness(Definiteness::from_inertia(&inertia));
    let bound = match kind {
        CriterionKind::Separability(p) => {
            p.part_two.len() > 1 && p.n - p.part_two.len() > 1 && verdict != Verdict::Violated
        }
        _ => false,
    };
    CriterionResult {
        kind: kind.clone(),
        level,
        tested_matrix: m,
        spectrum,
        inertia,
        verdict,
        conclusiveness,
        bound_entanglement_possible: bound,
    }
}

/// `V + Ξ ≥ 0`, always an iff.
pub fn state_criterion(v: &CovarianceMatrix, kind: &CriterionKind, tol: &Tolerances) -> Result<CriterionResult> {
    let n = v.modes();
    let xi = xi_matrix(kind, n)?;
    let m = to_complex(v.matrix()) + xi;
    Ok(finish(kind, Level::State, m, Conclusiveness::IffCondition, tol))
}

/// Decides the relation from `(Γ, D)` without solving for the state.
///
/// Non-symmetric drifts use `D − ΞΓᵀ − ΓΞ`, which is sufficient only. Symmetric
/// drifts use `D − {Ξ, Γ}`; that test is exact when `Γ` also commutes with it and
/// sufficient otherwise. The uncertainty relation always holds here: its shifted
/// matrix is `2Υ*`, which is checked.
pub fn environment_criterion(
    dynamics: &GaussianDynamics,
    kind: &CriterionKind,
    tol: &Tolerances,
) -> Result<CriterionResult> {
    require_stable(dynamics.gamma(), tol)?;
    let n = dynamics.modes();
    let xi = xi_matrix(kind, n)?;
    let g = to_complex(dynamics.gamma());
    let d = to_complex(dynamics.diffusion());
    if let CriterionKind::Uncertainty = kind {
        let m = shifted_q(&d, &g, &xi, tol)?;
        let twice = dynamics.upsilon().map(|z| z.conj() * 2.0);
        let dev = crate::numerics::relative_difference(&m, &twice);
        if dev > tol.residual_tol {
            return Err(Error::SolverFailure(format!("D_[iJ] differs from 2Υ* by {dev:.3e}")));
        }
        let mut r = finish(kind, Level::Environment, m, Conclusiveness::IffCondition, tol);
        r.verdict = Verdict::Holds;
        return Ok(r);
    }
    if hermitian_defect(dynamics.gamma()) <= tol.residual_tol {
        let s = shifted_q_symmetric(&d, &g, &xi, tol)?;
        let c = if s.exact { Conclusiveness::IffCondition } else { Conclusiveness::SufficientOnly };
        Ok(finish(kind, Level::Environment, s.matrix, c, tol))
    } else {
        let m = shifted_q(&d, &g, &xi, tol)?;
        Ok(finish(kind, Level::Environment, m, Conclusiveness::SufficientOnly, tol))
    }
}

/// Either a solved state or the dynamics that produces it.
#[derive(Debug, Clone, Copy)]
pub enum Subject<'a> {
    State(&'a CovarianceMatrix),
    Environment(&'a GaussianDynamics),
}

impl Subject<'_> {
    pub fn modes(&self) -> usize {
        match self {
            Subject::State(v) => v.modes(),
            Subject::Environment(d) => d.modes(),
        }
    }
}

pub fn evaluate(subject: Subject<'_>, kind: &CriterionKind, tol: &Tolerances) -> Result<CriterionResult> {
    match subject {
        Subject::State(v) => state_criterion(v, kind, tol),
        Subject::Environment(d) => environment_criterion(d, kind, tol),
    }
}

/// Steering tested in both directions across one cut.
pub fn steerability_both_parts(
    subject: Subject<'_>,
    partition: &Partition,
    tol: &Tolerances,
) -> Result<(CriterionResult, CriterionResult)> {
    let one = CriterionKind::Steerability { partition: partition.clone(), side: SteeringSide::PartOne };
    let two = CriterionKind::Steerability { partition: partition.clone(), side: SteeringSide::PartTwo };
    Ok((evaluate(subject, &one, tol)?, evaluate(subject, &two, tol)?))
}

/// Every single-mode cut `{k}` versus the rest.
pub fn single_mode_partitions(n: usize) -> Result<Vec<Partition>> {
    if n < 2 {
        return Err(Error::InvalidPartition(format!("{n} mode(s) admit no bipartition")));
    }
    (0..n).map(|k| Partition::new(n, &[k])).collect()
}

/// Sign change of `f` on `[lo, hi]` located to `xtol` by bisection.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return Err(Error::Precondition(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        if hi - lo <= xtol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

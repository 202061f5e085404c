// SPDX-License-Identifier: Apache-2.0

//! Worked example systems with their closed forms.
//!
//! Each [`CatalogId`] has a fixed parameter record with defaults. Closed forms are
//! the LE-consistent ones; where a commonly quoted formula disagrees with the
//! Lyapunov equation, the consistent version is used and the tests say so.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::Float;

use crate::model::{LindbladVector, ModelSpec, QuadraticHamiltonian};
use crate::numerics::{sort_complex, Tolerances};
use crate::williamson::{engineer_gibbs_target, two_mode_squeezer};
use crate::{CVec, Complex64, Error, RMat, Result};

/// Threshold functions report `+∞` for occupations below this.
pub const OCCUPATION_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CatalogId {
    /// Two coupled oscillators, each in its own thermal bath.
    TwoOscThermal,
    /// The same pair after a rotating-wave approximation of the coupling.
    TwoOscRwa,
    /// Single degenerate parametric oscillator damped into vacuum.
    Opo,
    /// Two parametric oscillators in cascade sharing one output channel.
    CascadedOpo,
    /// Parametric pair with a phase-changed coupling and thermal baths; `Γ = Γᵀ`.
    OpoThermal,
    /// Two-mode squeezed thermal target, realized through the Gibbs recipe.
    Tmtss,
}

type Defaults = &'static [(&'static str, f64)];
type Aliases = &'static [(&'static str, &'static [&'static str])];

impl CatalogId {
    pub const ALL: [CatalogId; 6] = [
        CatalogId::TwoOscThermal,
        CatalogId::TwoOscRwa,
        CatalogId::Opo,
        CatalogId::CascadedOpo,
        CatalogId::OpoThermal,
        CatalogId::Tmtss,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CatalogId::TwoOscThermal => "two_osc_thermal",
            CatalogId::TwoOscRwa => "two_osc_rwa",
            CatalogId::Opo => "opo",
            CatalogId::CascadedOpo => "cascaded_opo",
            CatalogId::OpoThermal => "opo_thermal",
            CatalogId::Tmtss => "tmtss",
        }
    }

    pub fn modes(&self) -> usize {
        match self {
            CatalogId::Opo => 1,
            _ => 2,
        }
    }

    /// Canonical parameter names with their defaults.
    pub fn parameters(&self) -> Defaults {
        match self {
            CatalogId::TwoOscThermal => &[
                ("omega1", 0.5),
                ("omega2", 0.5),
                ("kappa", 1.0),
                ("zeta1", 0.3),
                ("zeta2", 0.3),
                ("n1", 1.0),
                ("n2", 1.0),
            ],
            CatalogId::TwoOscRwa => &[
                ("varpi1", 1.0),
                ("varpi2", 1.0),
                ("coupling", 0.3),
                ("zeta1", 0.2),
                ("zeta2", 0.5),
                ("n1", 1.0),
                ("n2", 0.4),
            ],
            CatalogId::Opo => &[("epsilon", 0.5), ("kappa", 1.0)],
            CatalogId::CascadedOpo => &[("epsilon1", 0.2), ("epsilon2", 0.4), ("kappa", 1.0)],
            CatalogId::OpoThermal => &[("epsilon", 0.1), ("kappa", 1.0), ("zeta", 2.0), ("n", 1.0)],
            CatalogId::Tmtss => &[("r", 0.5), ("nbar", 0.5), ("zeta", 1.0)],
        }
    }

    /// Shorthands that set several canonical parameters at once.
    pub fn aliases(&self) -> Aliases {
        match self {
            CatalogId::TwoOscThermal => {
                &[("omega", &["omega1", "omega2"]), ("zeta", &["zeta1", "zeta2"]), ("n", &["n1", "n2"])]
            }
            CatalogId::TwoOscRwa => &[
                ("varpi", &["varpi1", "varpi2"]),
                ("zeta", &["zeta1", "zeta2"]),
                ("n", &["n1", "n2"]),
                ("Omega", &["coupling"]),
            ],
            CatalogId::Tmtss => &[("n", &["nbar"])],
            _ => &[],
        }
    }

    /// Canonical names behind `name`, or `None` if the id has no such parameter.
    pub fn expand(&self, name: &str) -> Option<Vec<&'static str>> {
        if let Some((n, _)) = self.parameters().iter().find(|(n, _)| *n == name) {
            return Some(vec![*n]);
        }
        self.aliases().iter().find(|(a, _)| *a == name).map(|(_, t)| t.to_vec())
    }
}

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CatalogId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| *c != '_' && *c != '-').collect::<String>().to_ascii_lowercase();
        CatalogId::ALL
            .iter()
            .copied()
            .find(|id| id.name().replace('_', "") == key)
            .ok_or_else(|| Error::param("catalog", format!("unknown id {s:?}")))
    }
}

/// Named parameter overrides; anything unset takes the id's default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CatalogParams {
    values: BTreeMap<String, f64>,
}

impl CatalogParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: &str, value: f64) -> &mut Self {
        self.values.insert(name.to_string(), value);
        self
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Full record for `id`. Aliases are applied before canonical names, so a canonical override wins.
    pub fn resolve(&self, id: CatalogId) -> Result<ResolvedParams> {
        let mut out: BTreeMap<&'static str, f64> = id.parameters().iter().copied().collect();
        let mut canonical = Vec::new();
        for (name, &value) in &self.values {
            if !value.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
            let targets = id
                .expand(name)
                .ok_or_else(|| Error::param(name, format!("not a parameter of {id}")))?;
            if targets.len() == 1 && targets[0] == name.as_str() {
                canonical.push((targets[0], value));
            } else {
                for t in targets {
                    out.insert(t, value);
                }
            }
        }
        for (t, v) in canonical {
            out.insert(t, v);
        }
        let r = ResolvedParams { id, values: out };
        r.validate()?;
        Ok(r)
    }
}

/// Every parameter of one id, validated.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedParams {
    id: CatalogId,
    values: BTreeMap<&'static str, f64>,
}

impl ResolvedParams {
    pub fn id(&self) -> CatalogId {
        self.id
    }

    pub fn get(&self, name: &str) -> f64 {
        // names come from the id's own record; a miss is a programming error
        self.values.get(name).copied().unwrap_or(f64::NAN)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.values.iter().map(|(k, v)| (*k, *v))
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in &self.values {
            let bad = |why: &str| Err(Error::param(*name, why));
            if name.starts_with("zeta") && *v < 0.0 {
                return bad("couplings must be non-negative");
            }
            if (name.starts_with('n')) && *v < 0.0 {
                return bad("occupations must be non-negative");
            }
            if *name == "kappa" {
                let strict = !matches!(self.id, CatalogId::TwoOscThermal);
                if *v < 0.0 || (strict && *v == 0.0) {
                    return bad(if strict { "must be positive" } else { "must be non-negative" });
                }
            }
        }
        if self.id == CatalogId::Tmtss && !(self.get("zeta") > 0.0) {
            return Err(Error::param("zeta", "the engineered reservoir needs a positive rate"));
        }
        Ok(())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Jumps `√(ζ(N̄+1)) a_k` and `√(ζN̄) a_k†` of a thermal bath on mode `k`; zero-weight jumps are omitted.
pub fn thermal_bath(n: usize, k: usize, zeta: f64, nbar: f64) -> Result<Vec<LindbladVector>> {
    if k >= n {
        return Err(Error::dims(format!("mode {k} out of range for {n} modes")));
    }
    if !(zeta >= 0.0 && nbar >= 0.0) {
        return Err(Error::param("thermal bath", "rates and occupations must be non-negative"));
    }
    let mut a = CVec::zeros(2 * n);
    a[k] = c(0.0, 1.0);
    a[n + k] = c(-1.0, 0.0);
    let mut out = Vec::new();
    let down = zeta * (nbar + 1.0) / 2.0;
    let up = zeta * nbar / 2.0;
    if down > 0.0 {
        out.push(LindbladVector::new(&a * c(Float::sqrt(down), 0.0)));
    }
    if up > 0.0 {
        out.push(LindbladVector::new(a.map(|z| z.conj()) * c(Float::sqrt(up), 0.0)));
    }
    Ok(out)
}

fn symmetric_entries(n: usize, entries: &[(usize, usize, f64)]) -> RMat {
    let mut h = RMat::zeros(2 * n, 2 * n);
    for &(i, j, v) in entries {
        h[(i, j)] = v;
        h[(j, i)] = v;
    }
    h
}

/// The model of `id` at `params`. Stability is not required here.
pub fn catalog_build(id: CatalogId, params: &CatalogParams) -> Result<ModelSpec> {
    let p = params.resolve(id)?;
    let tol = Tolerances::default();
    let g = |k: &str| p.get(k);
    let model = match id {
        CatalogId::TwoOscThermal => {
            let (w1, w2, k) = (g("omega1"), g("omega2"), g("kappa"));
            let h = symmetric_entries(
                2,
                &[(0, 0, w1 + k / 2.0), (1, 1, w2 + k / 2.0), (0, 1, -k / 2.0), (2, 2, w1), (3, 3, w2)],
            );
            let mut ls = thermal_bath(2, 0, g("zeta1"), g("n1"))?;
            ls.extend(thermal_bath(2, 1, g("zeta2"), g("n2"))?);
            ModelSpec::new(QuadraticHamiltonian::quadratic(h, &tol)?, ls)?
        }
        CatalogId::TwoOscRwa => {
            let (v1, v2, om) = (g("varpi1"), g("varpi2"), g("coupling"));
            let h = symmetric_entries(2, &[(0, 0, v1), (1, 1, v2), (0, 1, om), (2, 2, v1), (3, 3, v2), (2, 3, om)]);
            let mut ls = thermal_bath(2, 0, g("zeta1"), g("n1"))?;
            ls.extend(thermal_bath(2, 1, g("zeta2"), g("n2"))?);
            ModelSpec::new(QuadraticHamiltonian::quadratic(h, &tol)?, ls)?
        }
        CatalogId::Opo => {
            let (e, k) = (g("epsilon"), g("kappa"));
            let h = symmetric_entries(1, &[(0, 1, e / 2.0)]);
            let s = Float::sqrt(k / 2.0);
            ModelSpec::new(QuadraticHamiltonian::quadratic(h, &tol)?, vec![LindbladVector::from_slice(&[c(0.0, s), c(-s, 0.0)])])?
        }
        CatalogId::CascadedOpo => {
            let (e1, e2, k) = (g("epsilon1"), g("epsilon2"), g("kappa"));
            // the cross term makes mode 1 drive mode 2
            let h = symmetric_entries(2, &[(0, 2, e1 / 2.0), (1, 3, e2 / 2.0), (0, 3, -k / 2.0), (1, 2, k / 2.0)]);
            let s = Float::sqrt(k / 2.0);
            let l = LindbladVector::from_slice(&[c(0.0, s), c(0.0, s), c(-s, 0.0), c(-s, 0.0)]);
            ModelSpec::new(QuadraticHamiltonian::quadratic(h, &tol)?, vec![l])?
        }
        CatalogId::OpoThermal => {
            let (e, k) = (g("epsilon"), g("kappa"));
            let h = symmetric_entries(2, &[(0, 2, e / 2.0), (1, 3, e / 2.0), (1, 2, k / 2.0), (0, 3, k / 2.0)]);
            let mut ls = thermal_bath(2, 0, g("zeta"), g("n"))?;
            ls.extend(thermal_bath(2, 1, g("zeta"), g("n"))?);
            ModelSpec::new(QuadraticHamiltonian::quadratic(h, &tol)?, ls)?
        }
        CatalogId::Tmtss => {
            let s = two_mode_squeezer(g("r"))?;
            let gp = RMat::identity(4, 4) * (-g("zeta") / 2.0);
            let res = engineer_gibbs_target(&s, 2.0 * g("nbar") + 1.0, Some(&gp), &tol)?;
            res.realization.model(&tol)?
        }
    };
    Ok(model)
}

/// Named closed-form quantities. Spectra are ascending; thresholds are in `ζ/κ`
/// except for the squeezed target, whose thresholds are squeezing parameters `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnalyticQuantity {
    SteadyCm,
    GammaSpectrum,
    CmSpectrum,
    ClassicalityEnvSpectrum,
    /// Environment separability matrix for the cut `{1} | {2}`.
    SeparabilityEnvSpectrum,
    /// Environment steering matrix with [`SteeringSide::PartOne`](crate::SteeringSide::PartOne).
    SteeringEnvSpectrumPartOne,
    SteeringEnvSpectrumPartTwo,
    /// Sufficient (environment-level) separability threshold.
    SeparabilityThreshold,
    ClassicalityThreshold,
    /// State-level (exact) separability threshold.
    ExactSeparabilityThreshold,
    ExactClassicalityThreshold,
    SteeringThreshold,
}

impl AnalyticQuantity {
    pub const ALL: [AnalyticQuantity; 12] = [
        AnalyticQuantity::SteadyCm,
        AnalyticQuantity::GammaSpectrum,
        AnalyticQuantity::CmSpectrum,
        AnalyticQuantity::ClassicalityEnvSpectrum,
        AnalyticQuantity::SeparabilityEnvSpectrum,
        AnalyticQuantity::SteeringEnvSpectrumPartOne,
        AnalyticQuantity::SteeringEnvSpectrumPartTwo,
        AnalyticQuantity::SeparabilityThreshold,
        AnalyticQuantity::ClassicalityThreshold,
        AnalyticQuantity::ExactSeparabilityThreshold,
        AnalyticQuantity::ExactClassicalityThreshold,
        AnalyticQuantity::SteeringThreshold,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AnalyticQuantity::SteadyCm => "steady_cm",
            AnalyticQuantity::GammaSpectrum => "gamma_spectrum",
            AnalyticQuantity::CmSpectrum => "cm_spectrum",
            AnalyticQuantity::ClassicalityEnvSpectrum => "classicality_env_spectrum",
            AnalyticQuantity::SeparabilityEnvSpectrum => "separability_env_spectrum",
            AnalyticQuantity::SteeringEnvSpectrumPartOne => "steering_env_spectrum_part_one",
            AnalyticQuantity::SteeringEnvSpectrumPartTwo => "steering_env_spectrum_part_two",
            AnalyticQuantity::SeparabilityThreshold => "separability_threshold",
            AnalyticQuantity::ClassicalityThreshold => "classicality_threshold",
            AnalyticQuantity::ExactSeparabilityThreshold => "exact_separability_threshold",
            AnalyticQuantity::ExactClassicalityThreshold => "exact_classicality_threshold",
            AnalyticQuantity::SteeringThreshold => "steering_threshold",
        }
    }
}

impl fmt::Display for AnalyticQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnalyticQuantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AnalyticQuantity::ALL
            .iter()
            .copied()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::param("quantity", format!("unknown quantity {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticValue {
    Scalar(f64),
    Matrix(RMat),
    Spectrum(Vec<f64>),
    ComplexSpectrum(Vec<Complex64>),
}

impl AnalyticValue {
    pub fn scalar(&self) -> Option<f64> {
        match self {
            AnalyticValue::Scalar(x) => Some(*x),
            _ => None,
        }
    }

    pub fn matrix(&self) -> Option<&RMat> {
        match self {
            AnalyticValue::Matrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn spectrum(&self) -> Option<&[f64]> {
        match self {
            AnalyticValue::Spectrum(s) => Some(s),
            _ => None,
        }
    }

    pub fn complex_spectrum(&self) -> Option<&[Complex64]> {
        match self {
            AnalyticValue::ComplexSpectrum(s) => Some(s),
            _ => None,
        }
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn undefined(id: CatalogId, q: AnalyticQuantity, why: &str) -> Error {
    Error::UndefinedQuantity(format!("{q} for {id}{why}"))
}

fn spectrum(mut v: Vec<f64>) -> AnalyticValue {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    AnalyticValue::Spectrum(v)
}

fn complex_spectrum(mut v: Vec<Complex64>) -> AnalyticValue {
    sort_complex(&mut v);
    AnalyticValue::ComplexSpectrum(v)
}

fn floor_guard(ns: &[f64], f: impl FnOnce() -> f64) -> f64 {
    if ns.iter().any(|&n| n < OCCUPATION_FLOOR) {
        f64::INFINITY
    } else {
        f()
    }
}

/// `√x` for `x > 0`, and `0` once the radicand closes.
fn open_sqrt(x: f64) -> f64 {
    if x > 0.0 {
        Float::sqrt(x)
    } else {
        0.0
    }
}

/// Separability threshold `S(N̄₁, N̄₂)` in `ζ/κ` from the environment criterion.
pub fn separability_surface(n1: f64, n2: f64) -> f64 {
    floor_guard(&[n1, n2], || {
        Float::sqrt((2.0 * n1 + 1.0) * (2.0 * n2 + 1.0) / (16.0 * n1 * n2 * (n1 + 1.0) * (n2 + 1.0)))
    })
}

/// Classicality threshold `P(N̄₁, N̄₂)` in `ζ/κ` from the environment criterion.
pub fn classicality_surface(n1: f64, n2: f64) -> f64 {
    floor_guard(&[n1, n2], || (n1 + n2) / (4.0 * n1 * n2))
}

/// Exact classicality threshold `P′(N̄)` of the symmetric pair at ratio `ω/κ`.
pub fn exact_classicality_curve(n: f64, omega_over_kappa: f64) -> f64 {
    let b = 2.0 * omega_over_kappa + 1.0;
    floor_guard(&[n], || open_sqrt(1.0 / (4.0 * n * n) - b * b))
}

/// Exact separability threshold `S′(N̄)` of the symmetric pair at ratio `ω/κ`.
pub fn exact_separability_curve(n: f64, omega_over_kappa: f64) -> f64 {
    let b = 2.0 * omega_over_kappa + 1.0;
    floor_guard(&[n], || open_sqrt(1.0 / (16.0 * n * n * (n + 1.0) * (n + 1.0)) - b * b))
}

/// Steady state of the symmetric two-oscillator system.
pub fn two_osc_steady_cm(omega: f64, kappa: f64, zeta: f64, nbar: f64) -> RMat {
    let a = 2.0 * nbar + 1.0;
    let cf = a * kappa / (zeta * zeta + 4.0 * omega * (omega + kappa));
    let outer = RMat::from_row_slice(2, 2, &[omega, zeta / 2.0, zeta / 2.0, -(omega + kappa)]);
    let m = RMat::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, -1.0]);
    RMat::identity(4, 4) * a + outer.kronecker(&m) * cf
}

fn rwa_cm(om: f64, z1: f64, z2: f64, n1: f64, n2: f64) -> RMat {
    let s = z1 + z2;
    let q = 4.0 * om * om + z1 * z2;
    let base = 2.0 * (z1 * n1 + z2 * n2) / s;
    let v1 = base + 2.0 * (n1 - n2) * z1 * z2 * z2 / (s * q) + 1.0;
    let v2 = base + 2.0 * (n2 - n1) * z1 * z1 * z2 / (s * q) + 1.0;
    let v14 = 4.0 * z1 * z2 * om * (n2 - n1) / (s * q);
    RMat::from_row_slice(4, 4, &[v1, 0.0, 0.0, v14, 0.0, v2, -v14, 0.0, 0.0, -v14, v1, 0.0, v14, 0.0, 0.0, v2])
}

fn cascaded_cm(e1: f64, e2: f64, k: f64) -> RMat {
    let gm = (e1 + e2 - 2.0 * k) * (e1 - k);
    let gp = (e1 + e2 + 2.0 * k) * (e1 + k);
    let hp = (e1 * e1 + e1 * e2 + e1 * k + 2.0 * k * k - k * e2) / (e2 - k);
    let hm = (e1 * e1 + e1 * e2 - e1 * k + 2.0 * k * k + k * e2) / (e2 + k);
    let x = 2.0 * k * e1;
    let mut v = RMat::zeros(4, 4);
    v[(0, 0)] = k / (k - e1);
    v[(0, 1)] = -x / gm;
    v[(1, 0)] = -x / gm;
    v[(1, 1)] = -k * hp / gm;
    v[(2, 2)] = k / (k + e1);
    v[(2, 3)] = x / gp;
    v[(3, 2)] = x / gp;
    v[(3, 3)] = k * hm / gp;
    v
}

/// `−(d/2)Γ⁻¹` for the commuting pair `Γ = Γᵀ`, `D = dI`.
fn opo_thermal_cm(e: f64, k: f64, z: f64, n: f64) -> RMat {
    let d = z * (2.0 * n + 1.0);
    let block = |a: f64, b: f64| {
        // inverse of ½[[a, b], [b, a]]
        let det = a * a - b * b;
        RMat::from_row_slice(2, 2, &[a, -b, -b, a]) * (2.0 / det)
    };
    let mut v = RMat::zeros(4, 4);
    v.view_mut((0, 0), (2, 2)).copy_from(&(block(e - z, k) * (-d / 2.0)));
    v.view_mut((2, 2), (2, 2)).copy_from(&(block(-(e + z), -k) * (-d / 2.0)));
    v
}

/// Closed-form `quantity` of `id` at `params`.
pub fn catalog_analytic(id: CatalogId, quantity: AnalyticQuantity, params: &CatalogParams) -> Result<AnalyticValue> {
    use AnalyticQuantity as Q;
    let p = params.resolve(id)?;
    let g = |k: &str| p.get(k);
    let none = |why: &str| Err(undefined(id, quantity, why));
    match id {
        CatalogId::TwoOscThermal => {
            let (w1, w2, k, z1, z2, n1, n2) =
                (g("omega1"), g("omega2"), g("kappa"), g("zeta1"), g("zeta2"), g("n1"), g("n2"));
            let sym_z = same(z1, z2) && same(w1, w2);
            let sym_all = sym_z && same(n1, n2);
            let (w, z, n) = (w1, z1, n1);
            match quantity {
                Q::SteadyCm if sym_all => Ok(AnalyticValue::Matrix(two_osc_steady_cm(w, k, z, n))),
                Q::GammaSpectrum if sym_z => {
                    let r = Complex64::new(w * (w + k), 0.0).sqrt();
                    let i = c(0.0, 1.0);
                    let h = c(-z / 2.0, 0.0);
                    Ok(complex_spectrum(vec![h + i * w, h - i * w, h + i * r, h - i * r]))
                }
                Q::SeparabilityEnvSpectrum if sym_z => {
                    let dn = n1 - n2;
                    let inner = Float::sqrt(k.powi(4) / 4.0 + z * z * k * k + 4.0 * z.powi(4) * dn * dn);
                    let base = z * (n1 + n2 + 1.0);
                    let outer = k * k / 2.0 + z * z * dn * dn + z * z;
                    let mut v = Vec::new();
                    for s in [1.0, -1.0] {
                        let r = Float::sqrt(outer + s * inner);
                        v.push(base + r);
                        v.push(base - r);
                    }
                    Ok(spectrum(v))
                }
                Q::ClassicalityEnvSpectrum if sym_z => {
                    let r = Float::sqrt(k * k / 4.0 + z * z * (n1 - n2) * (n1 - n2));
                    let base = z * (n1 + n2);
                    Ok(spectrum(vec![base + k / 2.0 + r, base + k / 2.0 - r, base - k / 2.0 + r, base - k / 2.0 - r]))
                }
                Q::SteeringEnvSpectrumPartOne | Q::SteeringEnvSpectrumPartTwo if sym_all => {
                    let a = z * (2.0 * n + 1.0);
                    let r = 0.5 * Float::sqrt(4.0 * z * z + k * k);
                    Ok(spectrum(vec![a, a, a - r, a + r]))
                }
                Q::SeparabilityThreshold => Ok(AnalyticValue::Scalar(separability_surface(n1, n2))),
                Q::ClassicalityThreshold => Ok(AnalyticValue::Scalar(classicality_surface(n1, n2))),
                Q::ExactSeparabilityThreshold if sym_all => Ok(AnalyticValue::Scalar(exact_separability_curve(n, w / k))),
                Q::ExactClassicalityThreshold if sym_all => Ok(AnalyticValue::Scalar(exact_classicality_curve(n, w / k))),
                Q::SteeringThreshold if sym_all => {
                    Ok(AnalyticValue::Scalar(floor_guard(&[n], || 1.0 / (4.0 * Float::sqrt(n * (n + 1.0))))))
                }
                Q::SteadyCm
                | Q::GammaSpectrum
                | Q::SeparabilityEnvSpectrum
                | Q::ClassicalityEnvSpectrum
                | Q::SteeringEnvSpectrumPartOne
                | Q::SteeringEnvSpectrumPartTwo
                | Q::ExactSeparabilityThreshold
                | Q::ExactClassicalityThreshold
                | Q::SteeringThreshold => none(" needs equal frequencies, couplings and occupations"),
                Q::CmSpectrum => none(""),
            }
        }
        CatalogId::TwoOscRwa => {
            let (v1, v2, om, z1, z2, n1, n2) =
                (g("varpi1"), g("varpi2"), g("coupling"), g("zeta1"), g("zeta2"), g("n1"), g("n2"));
            if !same(v1, v2) {
                return none(" needs equal frequencies");
            }
            match quantity {
                Q::SteadyCm if z1 + z2 > 0.0 && (z2 > 0.0 || z1 > 0.0) => {
                    if z2 == 0.0 {
                        return Ok(AnalyticValue::Matrix(RMat::identity(4, 4) * (2.0 * n1 + 1.0)));
                    }
                    if z1 == 0.0 {
                        return Ok(AnalyticValue::Matrix(RMat::identity(4, 4) * (2.0 * n2 + 1.0)));
                    }
                    Ok(AnalyticValue::Matrix(rwa_cm(om, z1, z2, n1, n2)))
                }
                Q::GammaSpectrum => {
                    let r = Complex64::new((z1 - z2) * (z1 - z2) - 16.0 * om * om, 0.0).sqrt() * 0.25;
                    let base = c(-(z1 + z2) / 4.0, 0.0);
                    let i = c(0.0, v1);
                    Ok(complex_spectrum(vec![base + r + i, base + r - i, base - r + i, base - r - i]))
                }
                Q::CmSpectrum if same(z1, z2) && z1 > 0.0 => {
                    let d = (n1 - n2) / Float::sqrt(1.0 + 4.0 * om * om / (z1 * z1));
                    let a = n1 + n2 + 1.0;
                    Ok(spectrum(vec![a - d, a - d, a + d, a + d]))
                }
                Q::ClassicalityEnvSpectrum if same(z1, z2) => {
                    let z = z1;
                    Ok(spectrum(vec![2.0 * z * n1, 2.0 * z * n1, 2.0 * z * n2, 2.0 * z * n2]))
                }
                _ => none(""),
            }
        }
        CatalogId::Opo => {
            let (e, k) = (g("epsilon"), g("kappa"));
            match quantity {
                Q::SteadyCm if k > e.abs() => {
                    Ok(AnalyticValue::Matrix(RMat::from_row_slice(2, 2, &[k / (k - e), 0.0, 0.0, k / (k + e)])))
                }
                Q::SteadyCm => none(" outside the stable region"),
                Q::GammaSpectrum => Ok(complex_spectrum(vec![c((e - k) / 2.0, 0.0), c(-(e + k) / 2.0, 0.0)])),
                Q::CmSpectrum if k > e.abs() => Ok(spectrum(vec![k / (k - e), k / (k + e)])),
                Q::ClassicalityEnvSpectrum => Ok(spectrum(vec![e, -e])),
                _ => none(""),
            }
        }
        CatalogId::CascadedOpo => {
            let (e1, e2, k) = (g("epsilon1"), g("epsilon2"), g("kappa"));
            let s5 = Float::sqrt(5.0f64);
            let s17 = Float::sqrt(17.0f64);
            match quantity {
                Q::SteadyCm if k > e1.abs().max(e2.abs()) => Ok(AnalyticValue::Matrix(cascaded_cm(e1, e2, k))),
                Q::SteadyCm => none(" outside the stable region"),
                Q::GammaSpectrum => Ok(complex_spectrum(vec![
                    c(-(k + e1) / 2.0, 0.0),
                    c(-(k - e1) / 2.0, 0.0),
                    c(-(k + e2) / 2.0, 0.0),
                    c(-(k - e2) / 2.0, 0.0),
                ])),
                Q::SeparabilityEnvSpectrum => Ok(spectrum(vec![(1.0 + s5) * k, (1.0 - s5) * k, 2.0 * k, 0.0])),
                Q::SteeringEnvSpectrumPartOne => {
                    Ok(spectrum(vec![(3.0 + s17) * k / 2.0, (3.0 - s17) * k / 2.0, k, 0.0]))
                }
                Q::SteeringEnvSpectrumPartTwo => Ok(spectrum(vec![
                    (1.0 + s5) * k / 2.0,
                    (1.0 - s5) * k / 2.0,
                    (3.0 + s5) * k / 2.0,
                    (3.0 - s5) * k / 2.0,
                ])),
                _ => none(""),
            }
        }
        CatalogId::OpoThermal => {
            let (e, k, z, n) = (g("epsilon"), g("kappa"), g("zeta"), g("n"));
            match quantity {
                Q::SteadyCm if z > e.abs() + k => Ok(AnalyticValue::Matrix(opo_thermal_cm(e, k, z, n))),
                Q::SteadyCm => none(" outside the stable region"),
                Q::GammaSpectrum => Ok(complex_spectrum(vec![
                    c((-z + e + k) / 2.0, 0.0),
                    c((-z - e - k) / 2.0, 0.0),
                    c((-z + e - k) / 2.0, 0.0),
                    c((-z - e + k) / 2.0, 0.0),
                ])),
                Q::ClassicalityEnvSpectrum => {
                    let a = 2.0 * z * n;
                    Ok(spectrum(vec![a + e + k, a - e - k, a + e - k, a - e + k]))
                }
                Q::SeparabilityEnvSpectrum => {
                    let (a, b) = (2.0 * z * n, 2.0 * z * (n + 1.0));
                    Ok(spectrum(vec![a + k, a - k, b + k, b - k]))
                }
                Q::SteeringEnvSpectrumPartOne | Q::SteeringEnvSpectrumPartTwo => {
                    let r = 0.5 * Float::sqrt(z * z + k * k);
                    let (a, b) = ((2.0 * n + 0.5) * z, (2.0 * n + 1.5) * z);
                    Ok(spectrum(vec![a - r, a + r, b - r, b + r]))
                }
                Q::ClassicalityThreshold | Q::ExactClassicalityThreshold => {
                    Ok(AnalyticValue::Scalar(floor_guard(&[n], || (e / k + 1.0) / (2.0 * n))))
                }
                Q::SeparabilityThreshold | Q::ExactSeparabilityThreshold => {
                    Ok(AnalyticValue::Scalar(floor_guard(&[n], || 1.0 / (2.0 * n))))
                }
                Q::SteeringThreshold => Ok(AnalyticValue::Scalar(floor_guard(&[n], || {
                    let a = 4.0 * n + 1.0;
                    1.0 / Float::sqrt(a * a - 1.0)
                }))),
                Q::CmSpectrum => none(""),
            }
        }
        CatalogId::Tmtss => {
            let (r, nb, z) = (g("r"), g("nbar"), g("zeta"));
            let a = 2.0 * nb + 1.0;
            match quantity {
                Q::SteadyCm => {
                    let s = two_mode_squeezer(r)?;
                    Ok(AnalyticValue::Matrix(&s * s.transpose() * a))
                }
                Q::GammaSpectrum => Ok(complex_spectrum(vec![c(-z / 2.0, 0.0); 4])),
                Q::CmSpectrum => {
                    let (lo, hi) = (a * Float::exp(-2.0 * r), a * Float::exp(2.0 * r));
                    Ok(spectrum(vec![lo, lo, hi, hi]))
                }
                Q::SeparabilityThreshold | Q::ExactSeparabilityThreshold => Ok(AnalyticValue::Scalar(0.5 * Float::ln(a))),
                Q::SteeringThreshold => Ok(AnalyticValue::Scalar(0.5 * Float::acosh(a))),
                _ => none(""),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{bisect, environment_criterion, state_criterion, CriterionKind, Partition, SteeringSide};
    use crate::lyapunov::steady_state;
    use crate::model::stability_check;
    use crate::numerics::{real_spectrum, relative_difference};
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn dynamics(id: CatalogId, p: &CatalogParams) -> crate::GaussianDynamics {
        catalog_build(id, p).unwrap().dynamics(&tol()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], t: f64) -> bool {
        let s = b.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= t * s)
    }

    fn env_spec(id: CatalogId, p: &CatalogParams, kind: &CriterionKind) -> Vec<f64> {
        environment_criterion(&dynamics(id, p), kind, &tol()).unwrap().spectrum
    }

    fn sep() -> CriterionKind {
        CriterionKind::Separability(Partition::new(2, &[1]).unwrap())
    }

    fn steer(side: SteeringSide) -> CriterionKind {
        CriterionKind::Steerability { partition: Partition::new(2, &[1]).unwrap(), side }
    }

    #[test]
    fn ids_round_trip() {
        for id in CatalogId::ALL {
            assert_eq!(id.name().parse::<CatalogId>().unwrap(), id);
        }
        assert_eq!("CascadedOPO".parse::<CatalogId>().unwrap(), CatalogId::CascadedOpo);
        assert_eq!("TMTSS".parse::<CatalogId>().unwrap(), CatalogId::Tmtss);
        assert!("nope".parse::<CatalogId>().is_err());
        for q in AnalyticQuantity::ALL {
            assert_eq!(q.name().parse::<AnalyticQuantity>().unwrap(), q);
        }
    }

    #[test]
    fn params_aliases_and_rejections() {
        let p = CatalogParams::new().with("zeta", 0.7).with("zeta2", 0.1).resolve(CatalogId::TwoOscThermal).unwrap();
        assert_eq!(p.get("zeta1"), 0.7);
        assert_eq!(p.get("zeta2"), 0.1);
        assert!(CatalogParams::new().with("bogus", 1.0).resolve(CatalogId::Opo).is_err());
        assert!(CatalogParams::new().with("n", -1.0).resolve(CatalogId::OpoThermal).is_err());
        assert!(CatalogParams::new().with("kappa", 0.0).resolve(CatalogId::Opo).is_err());
        assert!(CatalogParams::new().with("kappa", 0.0).resolve(CatalogId::TwoOscThermal).is_ok());
        assert!(CatalogParams::new().with("epsilon", f64::NAN).resolve(CatalogId::Opo).is_err());
    }

    #[test]
    fn two_osc_drift_and_diffusion_entrywise() {
        let p = CatalogParams::new()
            .with("omega1", 0.5)
            .with("omega2", 0.7)
            .with("kappa", 1.0)
            .with("zeta1", 0.3)
            .with("zeta2", 0.4)
            .with("n1", 1.2)
            .with("n2", 0.8);
        let dy = dynamics(CatalogId::TwoOscThermal, &p);
        #[rustfmt::skip]
        let g = RMat::from_row_slice(4, 4, &[
            -0.15, 0.0, 0.5, 0.0,
            0.0, -0.2, 0.0, 0.7,
            -1.0, 0.5, -0.15, 0.0,
            0.5, -1.2, 0.0, -0.2,
        ]);
        assert!((dy.gamma() - g).amax() < 1e-15);
        let d = RMat::from_diagonal(&crate::RVec::from_vec(vec![0.3 * 3.4, 0.4 * 2.6, 0.3 * 3.4, 0.4 * 2.6]));
        assert!((dy.diffusion() - d).amax() < 1e-15);
    }

    #[test]
    fn two_osc_closed_form() {
        for (w, k, z, n) in [(0.5, 1.0, 0.3, 1.1), (2.0, 0.4, 1.5, 0.1), (0.1, 3.0, 0.05, 4.0)] {
            let p = CatalogParams::new().with("omega", w).with("kappa", k).with("zeta", z).with("n", n);
            let v = steady_state(&dynamics(CatalogId::TwoOscThermal, &p), &tol()).unwrap();
            let a = catalog_analytic(CatalogId::TwoOscThermal, AnalyticQuantity::SteadyCm, &p).unwrap();
            assert!(relative_difference(v.matrix(), a.matrix().unwrap()) < 1e-12);
        }
    }

    #[test]
    fn two_osc_closed_form_needs_symmetry() {
        let p = CatalogParams::new().with("n1", 1.0).with("n2", 2.0);
        assert!(matches!(
            catalog_analytic(CatalogId::TwoOscThermal, AnalyticQuantity::SteadyCm, &p),
            Err(Error::UndefinedQuantity(_))
        ));
    }

    #[test]
    fn two_osc_env_spectra() {
        let p = CatalogParams::new().with("omega", 0.6).with("kappa", 1.3).with("zeta", 0.4).with("n1", 1.5).with("n2", 0.3);
        for (q, kind) in [
            (AnalyticQuantity::SeparabilityEnvSpectrum, sep()),
            (AnalyticQuantity::ClassicalityEnvSpectrum, CriterionKind::Classicality),
        ] {
            let a = catalog_analytic(CatalogId::TwoOscThermal, q, &p).unwrap();
            assert!(close(&env_spec(CatalogId::TwoOscThermal, &p, &kind), a.spectrum().unwrap(), 1e-12), "{q}");
        }
        let p = CatalogParams::new().with("omega", 0.6).with("kappa", 1.3).with("zeta", 0.4).with("n", 0.7);
        for (q, side) in [
            (AnalyticQuantity::SteeringEnvSpectrumPartOne, SteeringSide::PartOne),
            (AnalyticQuantity::SteeringEnvSpectrumPartTwo, SteeringSide::PartTwo),
        ] {
            let a = catalog_analytic(CatalogId::TwoOscThermal, q, &p).unwrap();
            assert!(close(&env_spec(CatalogId::TwoOscThermal, &p, &steer(side)), a.spectrum().unwrap(), 1e-12));
        }
    }

    #[test]
    fn gamma_spectra_match_everywhere() {
        let cases = [
            (CatalogId::TwoOscThermal, CatalogParams::new().with("omega", 0.8).with("zeta", 0.2).with("n1", 3.0)),
            (CatalogId::TwoOscRwa, CatalogParams::new().with("coupling", 0.05)),
            (CatalogId::TwoOscRwa, CatalogParams::new().with("coupling", 0.4)),
            (CatalogId::Opo, CatalogParams::new()),
            (CatalogId::CascadedOpo, CatalogParams::new().with("epsilon2", -0.7)),
            (CatalogId::OpoThermal, CatalogParams::new()),
            (CatalogId::Tmtss, CatalogParams::new()),
        ];
        for (id, p) in cases {
            let a = catalog_analytic(id, AnalyticQuantity::GammaSpectrum, &p).unwrap();
            let got = stability_check(&dynamics(id, &p), &tol()).spectrum;
            let want = a.complex_spectrum().unwrap();
            assert_eq!(got.len(), want.len());
            // match as multisets
            let mut rest: Vec<Complex64> = want.to_vec();
            for z in got {
                let k = rest.iter().position(|w| (w - z).norm() < 1e-9).unwrap_or_else(|| panic!("{id}: {z} not in {rest:?}"));
                rest.remove(k);
            }
        }
    }

    #[test]
    fn rwa_closed_form_and_limit() {
        let p = CatalogParams::new().with("zeta1", 0.4).with("zeta2", 0.9).with("coupling", 0.7).with("n1", 2.0).with("n2", 0.3);
        let v = steady_state(&dynamics(CatalogId::TwoOscRwa, &p), &tol()).unwrap();
        let a = catalog_analytic(CatalogId::TwoOscRwa, AnalyticQuantity::SteadyCm, &p).unwrap();
        assert!(relative_difference(v.matrix(), a.matrix().unwrap()) < 1e-12);
        let p0 = p.clone().with("zeta2", 0.0);
        let v0 = steady_state(&dynamics(CatalogId::TwoOscRwa, &p0), &tol()).unwrap();
        assert!(relative_difference(v0.matrix(), &(RMat::identity(4, 4) * 5.0)) < 1e-12);
        let uneven = p.clone().with("varpi2", 1.4);
        assert!(catalog_analytic(CatalogId::TwoOscRwa, AnalyticQuantity::SteadyCm, &uneven).is_err());
    }

    #[test]
    fn rwa_spectra() {
        let p = CatalogParams::new().with("zeta", 0.6).with("coupling", 0.45).with("n1", 1.7).with("n2", 0.2);
        let dy = dynamics(CatalogId::TwoOscRwa, &p);
        let v = steady_state(&dy, &tol()).unwrap();
        let mut got: Vec<f64> = nalgebra::SymmetricEigen::new(v.matrix().clone()).eigenvalues.iter().copied().collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let a = catalog_analytic(CatalogId::TwoOscRwa, AnalyticQuantity::CmSpectrum, &p).unwrap();
        assert!(close(&got, a.spectrum().unwrap(), 1e-12));
        let a = catalog_analytic(CatalogId::TwoOscRwa, AnalyticQuantity::ClassicalityEnvSpectrum, &p).unwrap();
        assert!(close(&env_spec(CatalogId::TwoOscRwa, &p, &CriterionKind::Classicality), a.spectrum().unwrap(), 1e-12));
    }

    #[test]
    fn opo_forms() {
        let dy = dynamics(CatalogId::Opo, &CatalogParams::new().with("epsilon", 0.0).with("kappa", 2.0));
        assert!((dy.gamma() + RMat::identity(2, 2)).amax() < 1e-15);
        assert!((dy.diffusion() - RMat::identity(2, 2) * 2.0).amax() < 1e-15);
        let p = CatalogParams::new().with("epsilon", 0.3).with("kappa", 0.8);
        let v = steady_state(&dynamics(CatalogId::Opo, &p), &tol()).unwrap();
        let a = catalog_analytic(CatalogId::Opo, AnalyticQuantity::SteadyCm, &p).unwrap();
        assert!(relative_difference(v.matrix(), a.matrix().unwrap()) < 1e-14);
        let a = catalog_analytic(CatalogId::Opo, AnalyticQuantity::ClassicalityEnvSpectrum, &p).unwrap();
        assert!(close(&env_spec(CatalogId::Opo, &p, &CriterionKind::Classicality), a.spectrum().unwrap(), 1e-12));
    }

    #[test]
    fn cascaded_forms() {
        let k = 1.4;
        let p = CatalogParams::new().with("epsilon1", 0.5).with("epsilon2", -0.9).with("kappa", k);
        let dy = dynamics(CatalogId::CascadedOpo, &p);
        #[rustfmt::skip]
        let g = RMat::from_row_slice(4, 4, &[
            (0.5 - k) / 2.0, 0.0, 0.0, 0.0,
            -k, (-0.9 - k) / 2.0, 0.0, 0.0,
            0.0, 0.0, -(0.5 + k) / 2.0, 0.0,
            0.0, 0.0, -k, -(-0.9 + k) / 2.0,
        ]);
        assert!((dy.gamma() - g).amax() < 1e-14);
        let d = RMat::from_element(2, 2, k);
        let mut dd = RMat::zeros(4, 4);
        dd.view_mut((0, 0), (2, 2)).copy_from(&d);
        dd.view_mut((2, 2), (2, 2)).copy_from(&d);
        assert!((dy.diffusion() - dd).amax() < 1e-14);
        let v = steady_state(&dy, &tol()).unwrap();
        let a = catalog_analytic(CatalogId::CascadedOpo, AnalyticQuantity::SteadyCm, &p).unwrap();
        assert!(relative_difference(v.matrix(), a.matrix().unwrap()) < 1e-12);
        for (q, kind) in [
            (AnalyticQuantity::SeparabilityEnvSpectrum, sep()),
            (AnalyticQuantity::SteeringEnvSpectrumPartOne, steer(SteeringSide::PartOne)),
            (AnalyticQuantity::SteeringEnvSpectrumPartTwo, steer(SteeringSide::PartTwo)),
        ] {
            let a = catalog_analytic(CatalogId::CascadedOpo, q, &p).unwrap();
            assert!(close(&env_spec(CatalogId::CascadedOpo, &p, &kind), a.spectrum().unwrap(), 1e-12), "{q}");
        }
    }

    #[test]
    fn opo_thermal_forms() {
        let p = CatalogParams::new().with("epsilon", 0.2).with("kappa", 0.5).with("zeta", 1.1).with("n", 0.6);
        let dy = dynamics(CatalogId::OpoThermal, &p);
        assert!(dy.is_gamma_symmetric(&tol()));
        let v = steady_state(&dy, &tol()).unwrap();
        let a = catalog_analytic(CatalogId::OpoThermal, AnalyticQuantity::SteadyCm, &p).unwrap();
        assert!(relative_difference(v.matrix(), a.matrix().unwrap()) < 1e-12);
        for (q, kind) in [
            (AnalyticQuantity::SeparabilityEnvSpectrum, sep()),
            (AnalyticQuantity::ClassicalityEnvSpectrum, CriterionKind::Classicality),
            (AnalyticQuantity::SteeringEnvSpectrumPartOne, steer(SteeringSide::PartOne)),
        ] {
            let a = catalog_analytic(CatalogId::OpoThermal, q, &p).unwrap();
            assert!(close(&env_spec(CatalogId::OpoThermal, &p, &kind), a.spectrum().unwrap(), 1e-12), "{q}");
        }
    }

    #[test]
    fn tmtss_via_gibbs_recipe() {
        let p = CatalogParams::new().with("r", 0.7).with("nbar", 0.4).with("zeta", 0.5);
        let dy = dynamics(CatalogId::Tmtss, &p);
        assert!((dy.gamma() + RMat::identity(4, 4) * 0.25).amax() < 1e-12);
        let v = steady_state(&dy, &tol()).unwrap();
        let a = catalog_analytic(CatalogId::Tmtss, AnalyticQuantity::SteadyCm, &p).unwrap();
        assert!(relative_difference(v.matrix(), a.matrix().unwrap()) < 1e-10);
    }

    #[test]
    fn threshold_guards() {
        assert_eq!(separability_surface(0.0, 1.0), f64::INFINITY);
        assert_eq!(classicality_surface(1.0, 1e-13), f64::INFINITY);
        assert_eq!(exact_classicality_curve(0.0, 0.5), f64::INFINITY);
        // radicand closed: exact threshold is zero
        assert_eq!(exact_classicality_curve(1.0, 0.5), 0.0);
        assert_eq!(exact_separability_curve(0.2, 0.5), 0.0);
        assert!(exact_separability_curve(0.05, 0.5) > 0.0);
    }

    #[test]
    fn fig1_surfaces_ordered() {
        for i in 1..10 {
            for j in 1..10 {
                let (a, b) = (0.3 * i as f64, 0.25 * j as f64);
                assert!(separability_surface(a, b) < classicality_surface(a, b));
            }
        }
    }

    #[test]
    fn exact_curves_by_state_bisection() {
        let (w, k) = (0.5, 1.0);
        for n in [0.03, 0.06, 0.09] {
            for (kind, want) in [
                (CriterionKind::Classicality, exact_classicality_curve(n, w / k)),
                (sep(), exact_separability_curve(n, w / k)),
            ] {
                let f = |z: f64| -> Result<f64> {
                    let p = CatalogParams::new().with("omega", w).with("kappa", k).with("zeta", z * k).with("n", n);
                    let v = steady_state(&dynamics(CatalogId::TwoOscThermal, &p), &tol())?;
                    Ok(state_criterion(&v, &kind, &tol())?.min_eigenvalue())
                };
                let got = bisect(f, want * 0.5, want * 1.5 + 0.01, 1e-10).unwrap();
                assert!((got - want).abs() < 1e-7, "{n} {kind}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn tmtss_flips() {
        let nbar = 0.8;
        let p = CatalogParams::new().with("nbar", nbar);
        for (q, kind) in [
            (AnalyticQuantity::SeparabilityThreshold, sep()),
            (AnalyticQuantity::SteeringThreshold, steer(SteeringSide::PartOne)),
        ] {
            let want = catalog_analytic(CatalogId::Tmtss, q, &p).unwrap().scalar().unwrap();
            let f = |r: f64| -> Result<f64> {
                let a = catalog_analytic(CatalogId::Tmtss, AnalyticQuantity::SteadyCm, &p.clone().with("r", r))?;
                let v = crate::CovarianceMatrix::new(a.matrix().unwrap().clone(), &tol())?;
                Ok(state_criterion(&v, &kind, &tol())?.min_eigenvalue())
            };
            let got = bisect(f, 0.0, 3.0, 1e-12).unwrap();
            assert!((got - want).abs() < 1e-8, "{q}: {got} vs {want}");
        }
    }

    #[test]
    fn pure_cascaded_state_is_squeezed_vacuum() {
        // ε₁ = −ε₂ gives a pure state
        let (e1, k) = (0.4, 1.0);
        let p = CatalogParams::new().with("epsilon1", e1).with("epsilon2", -e1).with("kappa", k);
        let v = steady_state(&dynamics(CatalogId::CascadedOpo, &p), &tol()).unwrap();
        let s = crate::williamson::opo_symplectic(Float::sqrt((k + e1) / (k - e1))).unwrap();
        assert!(relative_difference(v.matrix(), &(&s * s.transpose())) < 1e-12);
    }

    #[test]
    fn spectra_are_sorted() {
        let a = catalog_analytic(CatalogId::CascadedOpo, AnalyticQuantity::SeparabilityEnvSpectrum, &CatalogParams::new()).unwrap();
        let s = a.spectrum().unwrap();
        assert!(s.windows(2).all(|w| w[0] <= w[1]));
        let g = real_spectrum(&RMat::identity(2, 2));
        assert_eq!(g.len(), 2);
    }

    proptest! {
        #[test]
        fn oracle_agreement_grid(
            w in 0.05f64..3.0, k in 0.1f64..3.0, z in 0.05f64..3.0, n in 0.0f64..4.0,
            e1 in -0.9f64..0.9, e2 in -0.9f64..0.9,
            om in 0.0f64..2.0, z1 in 0.05f64..2.0, z2 in 0.05f64..2.0, n2 in 0.0f64..3.0,
        ) {
            let cases = [
                (CatalogId::TwoOscThermal, CatalogParams::new().with("omega", w).with("kappa", k).with("zeta", z).with("n", n)),
                (CatalogId::TwoOscRwa, CatalogParams::new().with("coupling", om).with("zeta1", z1).with("zeta2", z2).with("n1", n).with("n2", n2)),
                (CatalogId::Opo, CatalogParams::new().with("epsilon", e1 * k).with("kappa", k)),
                (CatalogId::CascadedOpo, CatalogParams::new().with("epsilon1", e1 * k).with("epsilon2", e2 * k).with("kappa", k)),
                (CatalogId::OpoThermal, CatalogParams::new().with("epsilon", e1.abs()).with("kappa", k).with("zeta", e1.abs() + k + z).with("n", n)),
                (CatalogId::Tmtss, CatalogParams::new().with("r", e1).with("nbar", n).with("zeta", z)),
            ];
            for (id, p) in cases {
                let v = steady_state(&dynamics(id, &p), &tol()).unwrap();
                let a = catalog_analytic(id, AnalyticQuantity::SteadyCm, &p).unwrap();
                prop_assert!(relative_difference(v.matrix(), a.matrix().unwrap()) <= 1e-8, "{}", id);
            }
        }
    }
}

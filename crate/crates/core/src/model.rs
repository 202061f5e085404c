// SPDX-License-Identifier: Apache-2.0

//! From a quadratic Hamiltonian and linear jump operators to drift and diffusion.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::SymmetricEigen;
use num_traits::Float;

use crate::numerics::{
    antisymmetric_part, check_phase_space, fro, hermitian_part, imag_part, j_matrix, psd_verdict, real_part,
    real_spectrum, require_symmetric, spectral_abscissa, Definiteness, Tolerances,
};
use crate::{CMat, CVec, Complex64, Error, RMat, RVec, Result};

/// `H = ½ xᵀ H x + ξᵀ x + H₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian {
    hessian: RMat,
    linear: RVec,
    offset: f64,
}

impl QuadraticHamiltonian {
    pub fn new(hessian: RMat, linear: RVec, offset: f64, tol: &Tolerances) -> Result<Self> {
        let n = check_phase_space(&hessian, "Hessian")?;
        require_symmetric(&hessian, "Hessian", tol)?;
        if linear.len() != 2 * n {
            return Err(Error::dims(format!("linear term has length {}, expected {}", linear.len(), 2 * n)));
        }
        if hessian.iter().chain(linear.iter()).any(|x| !x.is_finite()) || !offset.is_finite() {
            return Err(Error::param("hamiltonian", "non-finite entry"));
        }
        Ok(QuadraticHamiltonian { hessian: hermitian_part(&hessian), linear, offset })
    }

    pub fn quadratic(hessian: RMat, tol: &Tolerances) -> Result<Self> {
        let d = hessian.nrows();
        Self::new(hessian, RVec::zeros(d), 0.0, tol)
    }

    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroModes);
        }
        Ok(QuadraticHamiltonian { hessian: RMat::zeros(2 * n, 2 * n), linear: RVec::zeros(2 * n), offset: 0.0 })
    }

    pub fn modes(&self) -> usize {
        self.hessian.nrows() / 2
    }

    pub fn hessian(&self) -> &RMat {
        &self.hessian
    }

    pub fn linear(&self) -> &RVec {
        &self.linear
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }
}

/// Jump operator `L = λ·Jx + μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladVector {
    pub lambda: CVec,
    pub mu: Complex64,
}

impl LindbladVector {
    pub fn new(lambda: CVec) -> Self {
        LindbladVector { lambda, mu: Complex64::new(0.0, 0.0) }
    }

    pub fn with_offset(lambda: CVec, mu: Complex64) -> Self {
        LindbladVector { lambda, mu }
    }

    pub fn from_slice(lambda: &[Complex64]) -> Self {
        Self::new(CVec::from_column_slice(lambda))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub hamiltonian: QuadraticHamiltonian,
    pub lindblad: Vec<LindbladVector>,
}

impl ModelSpec {
    pub fn new(hamiltonian: QuadraticHamiltonian, lindblad: Vec<LindbladVector>) -> Result<Self> {
        let d = 2 * hamiltonian.modes();
        for (k, l) in lindblad.iter().enumerate() {
            if l.lambda.len() != d {
                return Err(Error::dims(format!("Lindblad vector {k} has length {}, expected {d}", l.lambda.len())));
            }
        }
        Ok(ModelSpec { hamiltonian, lindblad })
    }

    pub fn modes(&self) -> usize {
        self.hamiltonian.modes()
    }

    pub fn dynamics(&self, tol: &Tolerances) -> Result<GaussianDynamics> {
        build_dynamics(&self.hamiltonian, &self.lindblad, tol)
    }
}

/// Drift `Γ`, diffusion `D`, `Υ = Σ λλ†` and the mean-value offset of a Gaussian Lindblad dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDynamics {
    gamma: RMat,
    diffusion: RMat,
    upsilon: CMat,
    hessian: RMat,
    eta: RVec,
    drift: RVec,
}

impl GaussianDynamics {
    /// Accepts any `(Γ, D)` whose implied `Υ` is positive semidefinite.
    pub fn from_drift_diffusion(gamma: &RMat, diffusion: &RMat, tol: &Tolerances) -> Result<Self> {
        let r = realize_lindblad(gamma, diffusion, tol)?;
        let d = gamma.nrows();
        Ok(GaussianDynamics {
            gamma: gamma.clone(),
            diffusion: hermitian_part(diffusion),
            upsilon: r.upsilon,
            hessian: r.hessian,
            eta: RVec::zeros(d),
            drift: RVec::zeros(d),
        })
    }

    pub fn modes(&self) -> usize {
        self.gamma.nrows() / 2
    }

    pub fn gamma(&self) -> &RMat {
        &self.gamma
    }

    pub fn diffusion(&self) -> &RMat {
        &self.diffusion
    }

    pub fn upsilon(&self) -> &CMat {
        &self.upsilon
    }

    pub fn hessian(&self) -> &RMat {
        &self.hessian
    }

    pub fn eta(&self) -> &RVec {
        &self.eta
    }

    /// `ξ − η`, the constant term of the mean-value flow.
    pub fn drift(&self) -> &RVec {
        &self.drift
    }

    pub fn is_gamma_symmetric(&self, tol: &Tolerances) -> bool {
        crate::numerics::hermitian_defect(&self.gamma) <= tol.residual_tol
    }

    /// Stationary mean `x̄` with `ξ − η + Γx̄ = 0`.
    pub fn mean_fixed_point(&self, tol: &Tolerances) -> Result<RVec> {
        require_stable(&self.gamma, tol)?;
        let rhs = -&self.drift;
        let x = self.gamma.clone().lu().solve(&rhs).ok_or(Error::Singular("drift matrix"))?;
        let res = (&self.gamma * &x + &self.drift).amax();
        if res > tol.residual_tol * self.drift.amax().max(1.0) {
            return Err(Error::SolverFailure(format!("mean fixed point residual {res:.3e}")));
        }
        Ok(x)
    }
}

fn compose(hessian: &RMat, upsilon: &CMat) -> (RMat, RMat) {
    let n = hessian.nrows() / 2;
    let j = j_matrix(n);
    let im = antisymmetric_part(&imag_part(upsilon));
    let gamma = &j * hessian - im * &j;
    let diffusion = hermitian_part(&real_part(upsilon)) * 2.0;
    (gamma, diffusion)
}

fn upsilon_of(lambdas: &[LindbladVector], d: usize) -> CMat {
    let mut u = CMat::zeros(d, d);
    for l in lambdas {
        u += &l.lambda * l.lambda.adjoint();
    }
    hermitian_part(&u)
}

pub fn build_dynamics(
    ham: &QuadraticHamiltonian,
    lindblad: &[LindbladVector],
    tol: &Tolerances,
) -> Result<GaussianDynamics> {
    let d = 2 * ham.modes();
    let mut eta = RVec::zeros(d);
    for (k, l) in lindblad.iter().enumerate() {
        if l.lambda.len() != d {
            return Err(Error::dims(format!("Lindblad vector {k} has length {}, expected {d}", l.lambda.len())));
        }
        if l.lambda.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::param("lambda", "non-finite entry"));
        }
        eta += l.lambda.map(|z| (l.mu.conj() * z).im);
    }
    let upsilon = upsilon_of(lindblad, d);
    if psd_verdict(&upsilon, tol)? == Definiteness::Indefinite {
        return Err(Error::SolverFailure("Σλλ† came out indefinite".into()));
    }
    let (gamma, diffusion) = compose(ham.hessian(), &upsilon);
    let drift = ham.linear() - &eta;
    Ok(GaussianDynamics { gamma, diffusion, upsilon, hessian: ham.hessian().clone(), eta, drift })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityStatus {
    AsymptoticallyStable,
    Marginal,
    Unstable,
}

impl StabilityStatus {
    pub fn name(&self) -> &'static str {
        match self {
            StabilityStatus::AsymptoticallyStable => "asymptotically stable",
            StabilityStatus::Marginal => "marginally stable",
            StabilityStatus::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub status: StabilityStatus,
    pub spectral_abscissa: f64,
    /// Sorted by real part, then imaginary part.
    pub spectrum: Vec<Complex64>,
}

impl StabilityReport {
    pub fn is_as(&self) -> bool {
        self.status == StabilityStatus::AsymptoticallyStable
    }

    pub fn of_matrix(gamma: &RMat, tol: &Tolerances) -> Self {
        let spectrum = real_spectrum(gamma);
        let a = spectral_abscissa(&spectrum);
        let status = if a < -tol.stability_margin {
            StabilityStatus::AsymptoticallyStable
        } else if a <= tol.stability_margin {
            StabilityStatus::Marginal
        } else {
            StabilityStatus::Unstable
        };
        StabilityReport { status, spectral_abscissa: a, spectrum }
    }

    pub fn into_result(self) -> Result<Self> {
        match self.status {
            StabilityStatus::AsymptoticallyStable => Ok(self),
            StabilityStatus::Marginal => Err(Error::MarginallyStable { abscissa: self.spectral_abscissa }),
            StabilityStatus::Unstable => Err(Error::NotAsymptoticallyStable { abscissa: self.spectral_abscissa }),
        }
    }
}

pub fn stability_check(dynamics: &GaussianDynamics, tol: &Tolerances) -> StabilityReport {
    StabilityReport::of_matrix(&dynamics.gamma, tol)
}

/// Spectral abscissa of a stable drift, or the matching stability error.
pub(crate) fn require_stable(gamma: &RMat, tol: &Tolerances) -> Result<f64> {
    Ok(StabilityReport::of_matrix(gamma, tol).into_result()?.spectral_abscissa)
}

/// A Hamiltonian and jump set reproducing a given `(Γ, D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladRealization {
    pub hessian: RMat,
    pub upsilon: CMat,
    pub lambdas: Vec<CVec>,
    /// Eigenvalues of `Υ` that produced the jump vectors, descending.
    pub weights: Vec<f64>,
}

impl LindbladRealization {
    pub fn model(&self, tol: &Tolerances) -> Result<ModelSpec> {
        let ham = QuadraticHamiltonian::quadratic(self.hessian.clone(), tol)?;
        ModelSpec::new(ham, self.lambdas.iter().cloned().map(LindbladVector::new).collect())
    }
}

pub fn realize_lindblad(gamma: &RMat, diffusion: &RMat, tol: &Tolerances) -> Result<LindbladRealization> {
    let n = check_phase_space(gamma, "drift")?;
    if diffusion.shape() != gamma.shape() {
        return Err(Error::dims("drift and diffusion shapes differ"));
    }
    require_symmetric(diffusion, "diffusion", tol)?;
    if gamma.iter().chain(diffusion.iter()).any(|x| !x.is_finite()) {
        return Err(Error::param("dynamics", "non-finite entry"));
    }
    let dsym = hermitian_part(diffusion);
    if psd_verdict(&dsym, tol)? == Definiteness::Indefinite {
        let min = crate::numerics::hermitian_spectrum_unchecked(&dsym)[0];
        return Err(Error::NotPositiveDefinite { what: "diffusion (must be PSD)", min_eigenvalue: min });
    }
    let j = j_matrix(n);
    let gjt = gamma * j.transpose();
    let s = hermitian_part(&gjt);
    let a = antisymmetric_part(&gjt);
    let hessian = hermitian_part(&(-(&j * s * &j)));
    let im = -a;
    let upsilon = CMat::from_fn(2 * n, 2 * n, |r, c| Complex64::new(0.5 * dsym[(r, c)], im[(r, c)]));

    let eig = SymmetricEigen::new(upsilon.clone());
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let band = tol.eig_zero_band * scale;
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -band {
        return Err(Error::NotRealizable { eigenvalue: min });
    }
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].partial_cmp(&eig.eigenvalues[x]).unwrap_or(core::cmp::Ordering::Equal));
    let mut lambdas = Vec::new();
    let mut weights = Vec::new();
    for k in order {
        let nu = eig.eigenvalues[k];
        if nu > band {
            lambdas.push(eig.eigenvectors.column(k).into_owned() * Complex64::new(Float::sqrt(nu), 0.0));
            weights.push(nu);
        }
    }

    // round trip through the forward map
    let jumps: Vec<LindbladVector> = lambdas.iter().cloned().map(LindbladVector::new).collect();
    let (g2, d2) = compose(&hessian, &upsilon_of(&jumps, 2 * n));
    let size = fro(gamma).max(fro(&dsym)).max(1.0);
    let err = fro(&(&g2 - gamma)).max(fro(&(&d2 - &dsym)));
    let allowed = (tol.residual_tol + 4.0 * (2 * n) as f64 * tol.eig_zero_band) * size;
    if err > allowed {
        return Err(Error::SolverFailure(format!("Lindblad realization round trip error {err:.3e}")));
    }
    Ok(LindbladRealization { hessian, upsilon, lambdas, weights })
}

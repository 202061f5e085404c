// SPDX-License-Identifier: Apache-2.0

//! `AP + PA† + Q = 0` for a stable `A`, two ways.

use alloc::format;

use nalgebra::ComplexField;
use num_traits::Float;

use crate::expm::expm;
use crate::model::{require_stable, GaussianDynamics};
use crate::numerics::{
    check_phase_space, check_square, complex_abscissa, fro, hermitian_defect, hermitian_part, norm_inf,
    real_part, require_hermitian, require_symmetric, to_complex, Tolerances,
};
use crate::{CMat, Complex64, Error, RMat, Result};

/// Data of `⌊P, A, Q⌉`: `A` asymptotically stable, `Q` Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovProblem {
    a: CMat,
    q: CMat,
    abscissa: f64,
    real: bool,
}

impl LyapunovProblem {
    pub fn new(a: CMat, q: CMat, tol: &Tolerances) -> Result<Self> {
        let m = check_square(&a, "A")?;
        if q.shape() != (m, m) {
            return Err(Error::dims(format!("Q is {}x{}, A is {m}x{m}", q.nrows(), q.ncols())));
        }
        if m == 0 {
            return Err(Error::ZeroModes);
        }
        if a.iter().chain(q.iter()).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::param("lyapunov", "non-finite entry"));
        }
        require_hermitian(&q, "Q", tol)?;
        let abscissa = complex_abscissa(&a);
        if abscissa >= -tol.stability_margin {
            return Err(if abscissa <= tol.stability_margin {
                Error::MarginallyStable { abscissa }
            } else {
                Error::NotAsymptoticallyStable { abscissa }
            });
        }
        let real = a.iter().chain(q.iter()).all(|z| z.im == 0.0);
        Ok(LyapunovProblem { a, q: hermitian_part(&q), abscissa, real })
    }

    pub fn real(a: &RMat, q: &RMat, tol: &Tolerances) -> Result<Self> {
        Self::new(to_complex(a), to_complex(q), tol)
    }

    /// `⌊V, Γ, D⌉`.
    pub fn steady_state(dynamics: &GaussianDynamics, tol: &Tolerances) -> Result<Self> {
        require_stable(dynamics.gamma(), tol)?;
        Self::real(dynamics.gamma(), dynamics.diffusion(), tol)
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn q(&self) -> &CMat {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn spectral_abscissa(&self) -> f64 {
        self.abscissa
    }

    pub fn is_real(&self) -> bool {
        self.real
    }
}

/// `‖AP + PA† + Q‖∞`.
pub fn residual<T: ComplexField<RealField = f64>>(
    a: &nalgebra::DMatrix<T>,
    p: &nalgebra::DMatrix<T>,
    q: &nalgebra::DMatrix<T>,
) -> f64 {
    norm_inf(&(a * p + p * a.adjoint() + q))
}

/// Kronecker-vectorized solve: `(I⊗A + Ā⊗I) vec P = −vec Q`, column-major `vec`.
fn kron_solve<T: ComplexField<RealField = f64>>(
    a: &nalgebra::DMatrix<T>,
    q: &nalgebra::DMatrix<T>,
) -> Result<nalgebra::DMatrix<T>> {
    let m = a.nrows();
    let mm = m * m;
    let mut k = nalgebra::DMatrix::<T>::zeros(mm, mm);
    for j in 0..m {
        for i in 0..m {
            let row = i + j * m;
            // (I⊗A): A[i,k] δ_{jl}
            for c in 0..m {
                k[(row, c + j * m)] += a[(i, c)].clone();
            }
            // (Ā⊗I): conj(A)[j,l] δ_{ik}
            for l in 0..m {
                k[(row, i + l * m)] += a[(j, l)].clone().conjugate();
            }
        }
    }
    let rhs = nalgebra::DVector::<T>::from_iterator(mm, q.iter().map(|x| -x.clone()));
    let x = k.lu().solve(&rhs).ok_or(Error::Singular("Kronecker Lyapunov operator"))?;
    Ok(nalgebra::DMatrix::<T>::from_column_slice(m, m, x.as_slice()))
}

fn check_residual<T: ComplexField<RealField = f64>>(
    a: &nalgebra::DMatrix<T>,
    p: &nalgebra::DMatrix<T>,
    q: &nalgebra::DMatrix<T>,
    tol: &Tolerances,
) -> Result<()> {
    let r = residual(a, p, q);
    let scale = norm_inf(q).max(norm_inf(a) * norm_inf(p));
    if !r.is_finite() || r > tol.residual_tol * scale {
        return Err(Error::SolverFailure(format!("Lyapunov residual {r:.3e} exceeds {:.3e}", tol.residual_tol * scale)));
    }
    Ok(())
}

/// Unique Hermitian solution of `AP + PA† + Q = 0`.
pub fn solve(problem: &LyapunovProblem, tol: &Tolerances) -> Result<CMat> {
    if problem.real {
        let a = real_part(&problem.a);
        let q = real_part(&problem.q);
        return Ok(to_complex(&solve_real_checked(&a, &q, tol)?));
    }
    let p = hermitian_part(&kron_solve(&problem.a, &problem.q)?);
    check_residual(&problem.a, &p, &problem.q, tol)?;
    Ok(p)
}

fn solve_real_checked(a: &RMat, q: &RMat, tol: &Tolerances) -> Result<RMat> {
    let p = hermitian_part(&kron_solve(a, q)?);
    check_residual(a, &p, q, tol)?;
    Ok(p)
}

/// Real instance `AP + PAᵀ + Q = 0`; `A` must be stable and `Q` symmetric.
pub fn solve_real(a: &RMat, q: &RMat, tol: &Tolerances) -> Result<RMat> {
    LyapunovProblem::real(a, q, tol)?;
    solve_real_checked(a, &hermitian_part(q), tol)
}

/// Symmetric `2n×2n` covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(RMat);

impl CovarianceMatrix {
    pub fn new(v: RMat, tol: &Tolerances) -> Result<Self> {
        check_phase_space(&v, "covariance matrix")?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("covariance matrix", "non-finite entry"));
        }
        require_symmetric(&v, "covariance matrix", tol)?;
        Ok(CovarianceMatrix(hermitian_part(&v)))
    }

    pub fn modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn matrix(&self) -> &RMat {
        &self.0
    }

    pub fn into_inner(self) -> RMat {
        self.0
    }
}

impl AsRef<RMat> for CovarianceMatrix {
    fn as_ref(&self) -> &RMat {
        &self.0
    }
}

/// Steady-state covariance matrix of a stable dynamics.
pub fn steady_state(dynamics: &GaussianDynamics, tol: &Tolerances) -> Result<CovarianceMatrix> {
    require_stable(dynamics.gamma(), tol)?;
    let v = solve_real_checked(dynamics.gamma(), dynamics.diffusion(), tol)?;
    Ok(CovarianceMatrix(v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSolution {
    pub p: CMat,
    pub horizon: f64,
    pub steps: usize,
    /// `‖e^{AT} P̂ e^{A†T}‖_F / ‖P̂‖_F`, the relative size of the neglected tail.
    pub truncation_estimate: f64,
    /// Set when the tail estimate exceeds `residual_tol`.
    pub truncation_warning: bool,
}

pub fn default_horizon(abscissa: f64) -> f64 {
    40.0 / abscissa.abs()
}

/// Simpson quadrature of `∫₀^T e^{At} Q e^{A†t} dt`.
///
/// `horizon` defaults to `40/|abscissa|`; `steps` (rounded up to even) defaults to
/// a grid with `h‖A‖∞ ≈ 0.02`.
pub fn solve_integral(
    problem: &LyapunovProblem,
    horizon: Option<f64>,
    steps: Option<usize>,
    tol: &Tolerances,
) -> Result<IntegralSolution> {
    let alpha = problem.abscissa;
    let minimum = 10.0 / alpha.abs();
    let t = horizon.unwrap_or_else(|| default_horizon(alpha));
    if !(t >= minimum) {
        return Err(Error::HorizonTooShort { horizon: t, minimum });
    }
    let na = norm_inf(&problem.a);
    let mut n = steps.unwrap_or_else(|| Float::ceil(t * na / 0.02).clamp(200.0, 4.0e6) as usize);
    if n < 2 {
        n = 2;
    }
    if n % 2 == 1 {
        n += 1;
    }
    let h = t / n as f64;
    let m = problem.dim();
    let e = expm(&(&problem.a * Complex64::new(h, 0.0)))?;
    let mut pow = CMat::identity(m, m);
    let mut acc = CMat::zeros(m, m);
    for k in 0..=n {
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let node = &pow * &problem.q * pow.adjoint();
        acc += node * Complex64::new(w, 0.0);
        if k < n {
            pow = &e * &pow;
        }
    }
    let p = hermitian_part(&(acc * Complex64::new(h / 3.0, 0.0)));
    // pow = e^{AT} now
    let tail = &pow * &p * pow.adjoint();
    let scale = fro(&p);
    let est = if scale == 0.0 { 0.0 } else { fro(&tail) / scale };
    Ok(IntegralSolution { p, horizon: t, steps: n, truncation_estimate: est, truncation_warning: est > tol.residual_tol })
}

/// `Q_[Ξ] = Q − ΞA† − AΞ`.
pub fn shifted_q(q: &CMat, a: &CMat, xi: &CMat, tol: &Tolerances) -> Result<CMat> {
    let m = check_square(a, "A")?;
    if q.shape() != (m, m) || xi.shape() != (m, m) {
        return Err(Error::dims("Q, A and Ξ must share one square shape"));
    }
    require_hermitian(q, "Q", tol)?;
    require_hermitian(xi, "Ξ", tol)?;
    Ok(hermitian_part(&(q - xi * a.adjoint() - a * xi)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedQ {
    pub matrix: CMat,
    /// `A` commutes with `Q̃_[Ξ]`, so the sign of `Q̃_[Ξ]` is exactly that of `P + Ξ`.
    pub exact: bool,
}

/// `Q̃_[Ξ] = Q − (ΞA + AΞ)` for self-adjoint `A`.
///
/// `Q̃ ≥ 0` always implies `P + Ξ ≥ 0`. The converse needs more than `A = A†`:
/// it holds when `A` and `Q̃` commute, because then `P + Ξ = ½(−A)⁻¹Q̃`.
pub fn shifted_q_symmetric(q: &CMat, a: &CMat, xi: &CMat, tol: &Tolerances) -> Result<ShiftedQ> {
    let dev = hermitian_defect(a);
    if dev > tol.residual_tol {
        return Err(Error::Precondition(format!("A is not self-adjoint (relative deviation {dev:.3e})")));
    }
    let matrix = shifted_q(q, a, xi, tol)?;
    let comm = a * &matrix - &matrix * a;
    let scale = (fro(a) * fro(&matrix)).max(f64::MIN_POSITIVE);
    let exact = fro(&comm) <= tol.residual_tol * scale;
    Ok(ShiftedQ { matrix, exact })
}

/// Real parts of a real-valued complex solution, for callers that know the problem is real.
pub fn real_solution(p: &CMat) -> RMat {
    real_part(p)
}

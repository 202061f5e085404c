// SPDX-License-Identifier: Apache-2.0

//! Symplectic diagonalization and reservoirs engineered for a target state.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::SymmetricEigen;
use num_traits::Float;

use crate::lyapunov::solve_real;
use crate::model::{realize_lindblad, require_stable, LindbladRealization};
use crate::numerics::{
    check_phase_space, fro, hermitian_part, j_matrix, psd_verdict, relative_difference, require_symmetric, sqrt_pd,
    Definiteness, Tolerances,
};
use crate::{Error, RMat, RVec, Result};

/// `SMSᵀ = Λ` with `S` symplectic and `Λ = diag(μ₁..μₙ, μ₁..μₙ)`, `μ` ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct WilliamsonDecomposition {
    pub s: RMat,
    pub lambda: RMat,
    /// Residual of `SMSᵀ − Λ` relative to `‖M‖`.
    pub congruence_residual: f64,
    /// `‖SJSᵀ − J‖/‖J‖`.
    pub symplectic_residual: f64,
}

impl WilliamsonDecomposition {
    /// `μ₁ ≤ … ≤ μₙ`.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let n = self.lambda.nrows() / 2;
        (0..n).map(|k| self.lambda[(k, k)]).collect()
    }

    /// All symplectic eigenvalues equal one within `band`.
    pub fn is_pure(&self, band: f64) -> bool {
        self.symplectic_eigenvalues().iter().all(|m| (m - 1.0).abs() <= band)
    }
}

fn require_pd(m: &RMat, what: &'static str, tol: &Tolerances) -> Result<usize> {
    let n = check_phase_space(m, what)?;
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::param(what, "non-finite entry"));
    }
    require_symmetric(m, what, tol)?;
    Ok(n)
}

/// `μ_k` such that `Spec(JM) = {±iμ_k}`, descending.
pub fn symplectic_spectrum(m: &RMat, tol: &Tolerances) -> Result<Vec<f64>> {
    require_pd(m, "M", tol)?;
    let (root, _) = sqrt_pd(m, "M", tol)?;
    let n = m.nrows() / 2;
    let k = &root * j_matrix(n) * &root;
    // KᵀK is symmetric with eigenvalues μ_k², each twice
    let mut e: Vec<f64> = SymmetricEigen::new(hermitian_part(&(k.transpose() * &k))).eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    Ok((0..n).map(|i| Float::sqrt(0.5 * (e[2 * i] + e[2 * i + 1]).max(0.0))).collect())
}

pub fn is_symplectic(w: &RMat, tol: &Tolerances) -> Result<bool> {
    if w.nrows() != w.ncols() {
        return Err(Error::dims("W must be square"));
    }
    if w.nrows() % 2 == 1 {
        return Err(Error::dims("symplectic matrices have even dimension"));
    }
    if w.nrows() == 0 {
        return Err(Error::ZeroModes);
    }
    let j = j_matrix(w.nrows() / 2);
    Ok(fro(&(w * &j * w.transpose() - &j)) <= tol.residual_tol * fro(&j))
}

fn require_symplectic(w: &RMat, tol: &Tolerances) -> Result<()> {
    if is_symplectic(w, tol)? {
        return Ok(());
    }
    let j = j_matrix(w.nrows() / 2);
    Err(Error::NotSymplectic { deviation: fro(&(w * &j * w.transpose() - &j)) / fro(&j) })
}

fn project_out(v: &RVec, basis: &[RVec]) -> RVec {
    let mut r = v.clone();
    // two passes keep the result orthogonal to working precision
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(&r);
            r -= b * c;
        }
    }
    r
}

/// Symplectic diagonalization of a positive definite `M`.
///
/// `K = M^{1/2}JM^{1/2}` is antisymmetric. Eigenvectors `u` of `KᵀK` are paired with
/// `w = −Ku/‖Ku‖` into an orthogonal `O` that brings `K` to `ΛJ`, and then
/// `S = Λ^{1/2}OM^{−1/2}`. Both defining identities are checked before returning.
pub fn williamson_decompose(m: &RMat, tol: &Tolerances) -> Result<WilliamsonDecomposition> {
    let n = require_pd(m, "M", tol)?;
    let (root, inv_root) = sqrt_pd(m, "M", tol)?;
    let j = j_matrix(n);
    let k = &root * &j * &root;
    let eig = SymmetricEigen::new(hermitian_part(&(k.transpose() * &k)));
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(core::cmp::Ordering::Equal));

    let mut used = alloc::vec![false; 2 * n];
    let mut basis: Vec<RVec> = Vec::with_capacity(2 * n);
    let mut pairs: Vec<(f64, RVec, RVec)> = Vec::with_capacity(n);
    while pairs.len() < n {
        let residuals: Vec<(usize, RVec)> = order
            .iter()
            .filter(|&&i| !used[i])
            .map(|&i| (i, project_out(&eig.eigenvectors.column(i).into_owned(), &basis)))
            .collect();
        let pick = residuals
            .iter()
            .find(|(_, r)| r.norm() >= 0.5)
            .or_else(|| residuals.iter().max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap_or(core::cmp::Ordering::Equal)))
            .ok_or_else(|| Error::SolverFailure("ran out of eigenvectors while pairing".into()))?;
        let (idx, r) = (pick.0, pick.1.clone());
        used[idx] = true;
        let rn = r.norm();
        if !(rn > 1e-8) {
            return Err(Error::SolverFailure("degenerate pairing in symplectic diagonalization".into()));
        }
        let u = r / rn;
        let ku = &k * &u;
        let mu = ku.norm();
        if !(mu > 0.0) {
            return Err(Error::NotPositiveDefinite { what: "M", min_eigenvalue: 0.0 });
        }
        let w = project_out(&(-ku / mu), core::slice::from_ref(&u));
        let w = project_out(&w, &basis);
        let w = &w / w.norm();
        basis.push(u.clone());
        basis.push(w.clone());
        pairs.push((mu, u, w));
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));

    let mut o = RMat::zeros(2 * n, 2 * n);
    let mut half = RMat::zeros(2 * n, 2 * n);
    let mut lambda = RMat::zeros(2 * n, 2 * n);
    for (i, (mu, u, w)) in pairs.iter().enumerate() {
        o.row_mut(i).copy_from(&u.transpose());
        o.row_mut(n + i).copy_from(&w.transpose());
        // μ from the Rayleigh quotient of K on the pair
        let mu = 0.5 * (u.dot(&(&k * w)) + mu);
        for idx in [i, n + i] {
            lambda[(idx, idx)] = mu;
            half[(idx, idx)] = Float::sqrt(mu);
        }
    }
    let s = &half * o * &inv_root;
    let congruence_residual = fro(&(&s * m * s.transpose() - &lambda)) / fro(m);
    let symplectic_residual = fro(&(&s * &j * s.transpose() - &j)) / fro(&j);
    // both identities inherit the conditioning of M
    let cond = lambda[(2 * n - 1, 2 * n - 1)] / lambda[(0, 0)];
    let gate = tol.residual_tol * cond.max(1.0);
    if symplectic_residual > gate {
        return Err(Error::NotSymplectic { deviation: symplectic_residual });
    }
    if congruence_residual > gate {
        return Err(Error::SolverFailure(format!("Williamson congruence residual {congruence_residual:.3e}")));
    }
    Ok(WilliamsonDecomposition { s, lambda, congruence_residual, symplectic_residual })
}

/// A reservoir `(Γ_p, D_p)` whose unique steady state is `target`, with one realizing model.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineeredReservoir {
    pub gamma_p: RMat,
    pub diffusion_p: RMat,
    pub target: RMat,
    pub realization: LindbladRealization,
    /// `‖solve(Γ_p, D_p) − target‖/‖target‖`.
    pub steady_state_deviation: f64,
}

// deliberately loose; the tests pin the achieved accuracy much tighter
const ENGINEERING_GATE: f64 = 1e3;

fn finish(gamma_p: RMat, diffusion_p: RMat, target: RMat, tol: &Tolerances) -> Result<EngineeredReservoir> {
    require_stable(&gamma_p, tol)?;
    let diffusion_p = hermitian_part(&diffusion_p);
    let target = hermitian_part(&target);
    let realization = realize_lindblad(&gamma_p, &diffusion_p, tol)?;
    let v = solve_real(&gamma_p, &diffusion_p, tol)?;
    let dev = relative_difference(&v, &target);
    if dev > ENGINEERING_GATE * tol.residual_tol {
        return Err(Error::SolverFailure(format!("engineered steady state misses the target by {dev:.3e}")));
    }
    Ok(EngineeredReservoir { gamma_p, diffusion_p, target, realization, steady_state_deviation: dev })
}

/// Reservoir with steady state `αSSᵀ` from a drift `Γ′` with `Γ′ + Γ′ᵀ ≤ 0` (default `−½I`).
///
/// `Γ_p = SΓ′S⁻¹` and `D_p = −αS(Γ′ + Γ′ᵀ)Sᵀ`.
pub fn engineer_gibbs_target(s: &RMat, alpha: f64, gamma_prime: Option<&RMat>, tol: &Tolerances) -> Result<EngineeredReservoir> {
    require_symplectic(s, tol)?;
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::param("alpha", "must be finite and at least 1"));
    }
    let dim = s.nrows();
    let g = match gamma_prime {
        Some(g) => {
            if g.shape() != s.shape() {
                return Err(Error::dims("Γ′ and S shapes differ"));
            }
            g.clone()
        }
        None => RMat::identity(dim, dim) * -0.5,
    };
    let sym = &g + g.transpose();
    if psd_verdict(&(-&sym), tol)? == Definiteness::Indefinite {
        return Err(Error::Precondition("Γ′ + Γ′ᵀ is not negative semidefinite".into()));
    }
    require_stable(&g, tol)?;
    let s_inv = s.clone().try_inverse().ok_or(Error::Singular("S"))?;
    let gamma_p = s * &g * s_inv;
    let diffusion_p = s * sym * s.transpose() * -alpha;
    let target = s * s.transpose() * alpha;
    finish(gamma_p, diffusion_p, target, tol)
}

/// Transports a solved triple `⌊Λ, Γ′, D′⌉` to `⌊S⁻¹ΛS⁻ᵀ, S⁻¹Γ′S, S⁻¹D′S⁻ᵀ⌉`.
pub fn engineer_covariant_target(
    lambda: &RMat,
    gamma_prime: &RMat,
    diffusion_prime: &RMat,
    s: &RMat,
    tol: &Tolerances,
) -> Result<EngineeredReservoir> {
    check_phase_space(lambda, "Λ")?;
    if gamma_prime.shape() != lambda.shape() || diffusion_prime.shape() != lambda.shape() || s.shape() != lambda.shape() {
        return Err(Error::dims("Λ, Γ′, D′ and S must share one shape"));
    }
    require_symmetric(diffusion_prime, "D′", tol)?;
    require_stable(gamma_prime, tol)?;
    let r = gamma_prime * lambda + lambda * gamma_prime.transpose() + diffusion_prime;
    let scale = fro(diffusion_prime).max(fro(&(gamma_prime * lambda))).max(f64::MIN_POSITIVE);
    if fro(&r) > tol.residual_tol * scale {
        return Err(Error::Precondition(format!("input triple violates its Lyapunov equation by {:.3e}", fro(&r) / scale)));
    }
    require_symplectic(s, tol)?;
    let s_inv = s.clone().try_inverse().ok_or(Error::Singular("S"))?;
    let gamma_p = &s_inv * gamma_prime * s;
    let diffusion_p = &s_inv * diffusion_prime * s_inv.transpose();
    let target = &s_inv * lambda * s_inv.transpose();
    finish(gamma_p, diffusion_p, target, tol)
}

/// `Γ′ = −βI`, `D′ = 2βΛ`: the simplest triple with steady state `Λ`.
pub fn beta_recipe(lambda: &RMat, beta: f64) -> Result<(RMat, RMat)> {
    check_phase_space(lambda, "Λ")?;
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::param("beta", "must be positive"));
    }
    let d = lambda.nrows();
    Ok((RMat::identity(d, d) * -beta, lambda * (2.0 * beta)))
}

/// Two-mode squeezer acting as `[[c, s], [s, c]]` on positions and `[[c, −s], [−s, c]]` on momenta.
pub fn two_mode_squeezer(r: f64) -> Result<RMat> {
    if !r.is_finite() {
        return Err(Error::param("r", "must be finite"));
    }
    let (c, s) = (Float::cosh(r), Float::sinh(r));
    Ok(RMat::from_row_slice(4, 4, &[c, s, 0.0, 0.0, s, c, 0.0, 0.0, 0.0, 0.0, c, -s, 0.0, 0.0, -s, c]))
}

/// Symplectic whose `SSᵀ` is the pure two-mode state with squeeze factor `e`.
pub fn opo_symplectic(e: f64) -> Result<RMat> {
    if !(e.is_finite() && e > 0.0) {
        return Err(Error::param("epsilon", "squeeze factor must be positive"));
    }
    let (a, b) = ((1.0 + e) / 2.0, (1.0 - e) / 2.0);
    let (c, d) = ((1.0 + e) / (2.0 * e), (e - 1.0) / (2.0 * e));
    Ok(RMat::from_row_slice(4, 4, &[a, b, 0.0, 0.0, b, a, 0.0, 0.0, 0.0, 0.0, c, d, 0.0, 0.0, d, c]))
}

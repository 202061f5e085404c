// SPDX-License-Identifier: Apache-2.0

//! Covariance of the Lyapunov equation under `V → WVWᵀ`, and the structures it enforces.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::lyapunov::solve_real;
use crate::model::{require_stable, LindbladVector, ModelSpec, QuadraticHamiltonian};
use crate::numerics::{
    check_phase_space, check_square, fro, hermitian_part, j_matrix, psd_verdict, relative_difference, to_complex,
    Definiteness, Tolerances,
};
use crate::{Error, RMat, Result};

/// Invertible `W` acting as `V → WVWᵀ`, `Γ → WΓW⁻¹`, `D → WDWᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceTransform {
    w: RMat,
    w_inv: RMat,
    orthogonal: bool,
    symplectic: bool,
}

impl CovarianceTransform {
    pub fn new(w: RMat, tol: &Tolerances) -> Result<Self> {
        let d = check_square(&w, "W")?;
        if d == 0 {
            return Err(Error::ZeroModes);
        }
        let w_inv = w.clone().try_inverse().ok_or(Error::Singular("W"))?;
        let id = RMat::identity(d, d);
        if relative_difference(&(&w * &w_inv), &id) > tol.residual_tol.max(1e-12) * 10.0 {
            return Err(Error::Singular("W is numerically singular"));
        }
        let orthogonal = fro(&(&w * w.transpose() - &id)) <= tol.residual_tol * fro(&id);
        let symplectic = d % 2 == 0 && {
            let j = j_matrix(d / 2);
            fro(&(&w * &j * w.transpose() - &j)) <= tol.residual_tol * fro(&j)
        };
        Ok(CovarianceTransform { w, w_inv, orthogonal, symplectic })
    }

    pub fn identity(dim: usize) -> Self {
        let id = RMat::identity(dim, dim);
        CovarianceTransform { w: id.clone(), w_inv: id, orthogonal: true, symplectic: dim % 2 == 0 }
    }

    pub fn matrix(&self) -> &RMat {
        &self.w
    }

    pub fn inverse_matrix(&self) -> &RMat {
        &self.w_inv
    }

    pub fn inverse(&self) -> CovarianceTransform {
        CovarianceTransform {
            w: self.w_inv.clone(),
            w_inv: self.w.clone(),
            orthogonal: self.orthogonal,
            symplectic: self.symplectic,
        }
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonal
    }

    pub fn is_symplectic(&self) -> bool {
        self.symplectic
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn congruence(&self, m: &RMat) -> RMat {
        hermitian_part(&(&self.w * m * self.w.transpose()))
    }

    pub fn similarity(&self, m: &RMat) -> RMat {
        &self.w * m * &self.w_inv
    }

    /// `H → W⁻ᵀHW⁻¹`, `λ → Wλ`; only meaningful for symplectic `W`.
    pub fn apply_model(&self, model: &ModelSpec, tol: &Tolerances) -> Result<ModelSpec> {
        if !self.symplectic {
            return Err(Error::Precondition("model transport needs a symplectic W".into()));
        }
        if model.modes() * 2 != self.dim() {
            return Err(Error::dims("W and model sizes differ"));
        }
        let h = model.hamiltonian.hessian();
        let h2 = self.w_inv.transpose() * h * &self.w_inv;
        let xi = self.w_inv.transpose() * model.hamiltonian.linear();
        let ham = QuadraticHamiltonian::new(hermitian_part(&h2), xi, model.hamiltonian.offset(), tol)?;
        let wc = to_complex(&self.w);
        let ls = model.lindblad.iter().map(|l| LindbladVector::with_offset(&wc * &l.lambda, l.mu)).collect();
        ModelSpec::new(ham, ls)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovTriple {
    pub gamma: RMat,
    pub diffusion: RMat,
    pub cm: Option<RMat>,
}

fn same_shape(gamma: &RMat, d: &RMat, w: &CovarianceTransform) -> Result<()> {
    check_square(gamma, "Γ")?;
    if d.shape() != gamma.shape() || w.dim() != gamma.nrows() {
        return Err(Error::dims("Γ, D and W must share one square shape"));
    }
    Ok(())
}

/// `(WΓW⁻¹, WDWᵀ, WVWᵀ)`; a supplied `V` that solves the original equation is checked to solve the new one.
pub fn transform_triple(triple: &LyapunovTriple, w: &CovarianceTransform, tol: &Tolerances) -> Result<LyapunovTriple> {
    same_shape(&triple.gamma, &triple.diffusion, w)?;
    let gamma = w.similarity(&triple.gamma);
    let diffusion = w.congruence(&triple.diffusion);
    let cm = match &triple.cm {
        None => None,
        Some(v) => {
            if v.shape() != triple.gamma.shape() {
                return Err(Error::dims("V shape differs from Γ"));
            }
            let v2 = w.congruence(v);
            let scale_before = fro(&triple.diffusion).max(fro(&(&triple.gamma * v)));
            let r_before = fro(&(&triple.gamma * v + v * triple.gamma.transpose() + &triple.diffusion));
            if r_before <= tol.residual_tol * scale_before {
                let scale = fro(&diffusion).max(fro(&(&gamma * &v2)));
                let r = fro(&(&gamma * &v2 + &v2 * gamma.transpose() + &diffusion));
                if r > tol.residual_tol * scale.max(f64::MIN_POSITIVE) * 10.0 {
                    return Err(Error::SolverFailure(format!("transformed residual {r:.3e}")));
                }
            }
            Some(v2)
        }
    };
    Ok(LyapunovTriple { gamma, diffusion, cm })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub gamma_invariant: bool,
    pub d_invariant: bool,
    /// Both invariant with a stable drift, so the steady state is invariant too.
    pub implies_v_invariant: bool,
    pub gamma_deviation: f64,
    pub d_deviation: f64,
    /// `‖WVWᵀ − V‖/‖V‖` on the solved state, when implied.
    pub v_deviation: Option<f64>,
}

pub fn invariance_check(gamma: &RMat, d: &RMat, w: &CovarianceTransform, tol: &Tolerances) -> Result<InvarianceReport> {
    same_shape(gamma, d, w)?;
    let gamma_deviation = relative_difference(&w.similarity(gamma), gamma);
    let d_deviation = relative_difference(&w.congruence(d), d);
    let gamma_invariant = gamma_deviation <= tol.residual_tol;
    let d_invariant = d_deviation <= tol.residual_tol;
    let mut implies = false;
    let mut v_deviation = None;
    if gamma_invariant && d_invariant && require_stable(gamma, tol).is_ok() {
        implies = true;
        let v = solve_real(gamma, d, tol)?;
        let dev = relative_difference(&w.congruence(&v), &v);
        if dev > tol.residual_tol * 10.0 {
            return Err(Error::SolverFailure(format!("invariant equation produced a non-invariant state ({dev:.3e})")));
        }
        v_deviation = Some(dev);
    }
    Ok(InvarianceReport { gamma_invariant, d_invariant, implies_v_invariant: implies, gamma_deviation, d_deviation, v_deviation })
}

/// Entry patterns forced by the common symmetries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureTemplate {
    /// `[[A, 0], [0, B]]`: invariance under `diag(I, −I)`, no position-momentum correlations.
    BlockDiagonalQP,
    /// `[[A, B], [B, A]]`: invariance under the exchange of positions and momenta.
    SwapSymmetric,
    /// `m₁I + m₂J`: invariance under every symplectic rotation.
    KnInvariant,
    /// `[[A, B], [−B, A]]`: invariance under `J`.
    JInvariant,
    /// `[[Γ₁, Γ₂], [−Γ₂, Γ₁]]` with diagonal blocks: invariance under local rotations.
    /// Symmetric matrices of this form are `diag(v₁..vₙ, v₁..vₙ)`.
    LocalRotationInvariant,
}

impl StructureTemplate {
    pub const ALL: [StructureTemplate; 5] = [
        StructureTemplate::BlockDiagonalQP,
        StructureTemplate::SwapSymmetric,
        StructureTemplate::KnInvariant,
        StructureTemplate::JInvariant,
        StructureTemplate::LocalRotationInvariant,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StructureTemplate::BlockDiagonalQP => "block_diagonal_qp",
            StructureTemplate::SwapSymmetric => "swap_symmetric",
            StructureTemplate::KnInvariant => "kn_invariant",
            StructureTemplate::JInvariant => "j_invariant",
            StructureTemplate::LocalRotationInvariant => "local_rotation_invariant",
        }
    }

    /// The part of `m` the template forbids.
    fn defect(&self, m: &RMat, n: usize) -> RMat {
        let a = m.view((0, 0), (n, n)).into_owned();
        let b = m.view((0, n), (n, n)).into_owned();
        let c = m.view((n, 0), (n, n)).into_owned();
        let d = m.view((n, n), (n, n)).into_owned();
        let mut out = RMat::zeros(2 * n, 2 * n);
        let mut put = |r: usize, col: usize, x: RMat| out.view_mut((r, col), (n, n)).copy_from(&x);
        match self {
            StructureTemplate::BlockDiagonalQP => {
                put(0, n, b);
                put(n, 0, c);
            }
            StructureTemplate::SwapSymmetric => {
                put(0, 0, &a - &d);
                put(0, n, &b - &c);
            }
            StructureTemplate::JInvariant => {
                put(0, 0, &a - &d);
                put(0, n, &b + &c);
            }
            StructureTemplate::KnInvariant => {
                let m1 = (a.trace() + d.trace()) / (2 * n) as f64;
                let m2 = (b.trace() - c.trace()) / (2 * n) as f64;
                let template = RMat::identity(2 * n, 2 * n) * m1 + j_matrix(n) * m2;
                return m - template;
            }
            StructureTemplate::LocalRotationInvariant => {
                let off = |x: &RMat| {
                    let mut y = x.clone();
                    y.fill_diagonal(0.0);
                    y
                };
                put(0, 0, &a - &d + off(&a) + off(&d));
                put(0, n, &b + &c + off(&b) + off(&c));
            }
        }
        out
    }
}

/// Relative Frobenius test of the template pattern.
pub fn match_template(m: &RMat, template: StructureTemplate, tol: &Tolerances) -> Result<bool> {
    let n = check_phase_space(m, "matrix")?;
    let scale = fro(m);
    if scale == 0.0 {
        return Ok(true);
    }
    Ok(fro(&template.defect(m, n)) <= tol.residual_tol * scale)
}

/// Templates that `m` satisfies.
pub fn detect_templates(m: &RMat, tol: &Tolerances) -> Result<Vec<StructureTemplate>> {
    let mut out = Vec::new();
    for t in StructureTemplate::ALL {
        if match_template(m, t, tol)? {
            out.push(t);
        }
    }
    Ok(out)
}

/// `[[Y, Z], [−Z, Y]]` after checking `YYᵀ + ZZᵀ = I` and `YZᵀ = ZYᵀ`.
pub fn symplectic_rotation(y: &RMat, z: &RMat, tol: &Tolerances) -> Result<RMat> {
    let n = check_square(y, "Y")?;
    if z.shape() != (n, n) || n == 0 {
        return Err(Error::dims("Y and Z must be square of one size"));
    }
    let id = RMat::identity(n, n);
    let e1 = fro(&(y * y.transpose() + z * z.transpose() - &id));
    let e2 = fro(&(y * z.transpose() - z * y.transpose()));
    if e1.max(e2) > tol.residual_tol * fro(&id) * 10.0 {
        return Err(Error::NotSymplectic { deviation: e1.max(e2) });
    }
    let mut r = RMat::zeros(2 * n, 2 * n);
    r.view_mut((0, 0), (n, n)).copy_from(y);
    r.view_mut((n, n), (n, n)).copy_from(y);
    r.view_mut((0, n), (n, n)).copy_from(z);
    r.view_mut((n, 0), (n, n)).copy_from(&-z);
    Ok(r)
}

/// Independent rotation by `θ_k` in each `(q_k, p_k)` plane.
pub fn local_rotation(angles: &[f64]) -> Result<RMat> {
    let n = angles.len();
    if n == 0 {
        return Err(Error::ZeroModes);
    }
    let mut r = RMat::zeros(2 * n, 2 * n);
    for (k, &t) in angles.iter().enumerate() {
        let (s, c) = (Float::sin(t), Float::cos(t));
        r[(k, k)] = c;
        r[(n + k, n + k)] = c;
        r[(k, n + k)] = s;
        r[(n + k, k)] = -s;
    }
    Ok(r)
}

/// `diag(I, −I)`: flips every momentum.
pub fn momentum_flip(n: usize) -> RMat {
    let mut w = RMat::identity(2 * n, 2 * n);
    for k in n..2 * n {
        w[(k, k)] = -1.0;
    }
    w
}

/// `[[0, I], [I, 0]]`: exchanges positions and momenta.
pub fn position_momentum_swap(n: usize) -> RMat {
    let mut w = RMat::zeros(2 * n, 2 * n);
    for k in 0..n {
        w[(k, n + k)] = 1.0;
        w[(n + k, k)] = 1.0;
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsCondition {
    /// The steady state is `αI`.
    pub alpha: f64,
}

/// Detects `α(Γ + Γᵀ) + D = 0` with `α > 0`, whose steady state is `αI`.
pub fn gibbs_condition(gamma: &RMat, d: &RMat, tol: &Tolerances) -> Result<Option<GibbsCondition>> {
    check_square(gamma, "Γ")?;
    if d.shape() != gamma.shape() {
        return Err(Error::dims("Γ and D shapes differ"));
    }
    let s = gamma + gamma.transpose();
    if psd_verdict(&(-&s), tol)? == Definiteness::Indefinite {
        return Err(Error::Precondition("Γ + Γᵀ is not negative semidefinite".into()));
    }
    require_stable(gamma, tol)?;
    let tr = gamma.trace();
    let alpha = -0.5 * d.trace() / tr;
    if !(alpha.is_finite() && alpha > 0.0) {
        return Ok(None);
    }
    let defect = fro(&(&s * alpha + d));
    if defect > tol.residual_tol * fro(d).max(fro(&s) * alpha) {
        return Ok(None);
    }
    let v = solve_real(gamma, d, tol)?;
    let n = gamma.nrows();
    let dev = relative_difference(&v, &(RMat::identity(n, n) * alpha));
    if dev > tol.residual_tol * 10.0 {
        return Err(Error::SolverFailure(format!("Gibbs-type equation solved to a non-scalar state ({dev:.3e})")));
    }
    Ok(Some(GibbsCondition { alpha }))
}

// SPDX-License-Identifier: Apache-2.0

//! Fixed-step integration of the mean `ẋ = Γx + ξ − η` and the covariance `V̇ = ΓV + VΓᵀ + D`.

use alloc::vec::Vec;

use num_traits::Float;

use crate::model::GaussianDynamics;
use crate::numerics::{hermitian_part, norm_inf, require_symmetric, Tolerances};
use crate::{Error, RMat, RVec, Result};

/// Sampled solution; `times` strictly increasing and every CM symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub means: Vec<RVec>,
    pub cms: Vec<RMat>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_cm(&self) -> Option<&RMat> {
        self.cms.last()
    }

    pub fn last_mean(&self) -> Option<&RVec> {
        self.means.last()
    }
}

/// `min(1e−3, 0.05/‖Γ‖∞)`.
pub fn default_step(dynamics: &GaussianDynamics) -> f64 {
    let g = norm_inf(dynamics.gamma());
    if g > 0.0 {
        (0.05 / g).min(1e-3)
    } else {
        1e-3
    }
}

/// Classical RK4 from `(x0, V0)` to `t_end` with step `dt` (default [`default_step`]).
///
/// Every `record_every`-th step is stored (1 when `None`) along with the endpoints.
/// Convergence to the steady state is only meaningful for a stable `Γ`, but
/// integration itself is allowed either way.
pub fn evolve(
    dynamics: &GaussianDynamics,
    x0: &RVec,
    v0: &RMat,
    t_end: f64,
    dt: Option<f64>,
    record_every: Option<usize>,
    tol: &Tolerances,
) -> Result<Trajectory> {
    let dim = dynamics.gamma().nrows();
    if x0.len() != dim || v0.shape() != (dim, dim) {
        return Err(Error::dims("initial mean and covariance must match the dynamics"));
    }
    require_symmetric(v0, "initial covariance", tol)?;
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::param("t_end", "must be finite and non-negative"));
    }
    let dt = dt.unwrap_or_else(|| default_step(dynamics));
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let every = record_every.unwrap_or(1);
    if every == 0 {
        return Err(Error::param("record_every", "must be positive"));
    }
    let g = dynamics.gamma();
    let gt = g.transpose();
    let d = dynamics.diffusion();
    let b = dynamics.drift();
    let fx = |x: &RVec| g * x + b;
    let fv = |v: &RMat| g * v + v * &gt + d;

    let steps = Float::ceil(t_end / dt) as usize;
    let mut x = x0.clone();
    let mut v = hermitian_part(v0);
    let mut out = Trajectory { times: alloc::vec![0.0], means: alloc::vec![x.clone()], cms: alloc::vec![v.clone()] };
    let mut t = 0.0;
    for step in 1..=steps {
        // the last step lands exactly on t_end
        let h = if step == steps { t_end - t } else { dt };
        if h <= 0.0 {
            break;
        }
        let k1 = fx(&x);
        let k2 = fx(&(&x + &k1 * (h / 2.0)));
        let k3 = fx(&(&x + &k2 * (h / 2.0)));
        let k4 = fx(&(&x + &k3 * h));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let m1 = fv(&v);
        let m2 = fv(&(&v + &m1 * (h / 2.0)));
        let m3 = fv(&(&v + &m2 * (h / 2.0)));
        let m4 = fv(&(&v + &m3 * h));
        v += (m1 + m2 * 2.0 + m3 * 2.0 + m4) * (h / 6.0);
        v = hermitian_part(&v);
        t = if step == steps { t_end } else { step as f64 * dt };
        if x.iter().chain(v.iter()).any(|z| !z.is_finite()) {
            return Err(Error::NonFinite { step });
        }
        if step % every == 0 || step == steps {
            out.times.push(t);
            out.means.push(x.clone());
            out.cms.push(v.clone());
        }
    }
    Ok(out)
}

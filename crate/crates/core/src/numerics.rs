// SPDX-License-Identifier: Apache-2.0

//! Phase-space conventions and spectral primitives.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::{ComplexField, DMatrix, SymmetricEigen};
use num_traits::Float;

use crate::{CMat, Complex64, Error, RMat, Result};

/// Numerical knobs shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// An eigenvalue is zero when `|ν| <= eig_zero_band * max(1, max|ν|)`.
    pub eig_zero_band: f64,
    /// A drift is stable when its spectral abscissa is below `-stability_margin`.
    pub stability_margin: f64,
    /// Relative bound on Lyapunov residuals and symmetry defects.
    pub residual_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eig_zero_band: 1e-9, stability_margin: 1e-10, residual_tol: 1e-9 }
    }
}

impl Tolerances {
    pub fn new(eig_zero_band: f64, stability_margin: f64, residual_tol: f64) -> Result<Self> {
        let t = Tolerances { eig_zero_band, stability_margin, residual_tol };
        t.validate()?;
        Ok(t)
    }

    /// Same tolerance for the zero band and the residuals; the stability margin keeps its default.
    pub fn uniform(tol: f64) -> Result<Self> {
        Self::new(tol, Self::default().stability_margin, tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eig_zero_band", self.eig_zero_band),
            ("stability_margin", self.stability_margin),
            ("residual_tol", self.residual_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, "must be finite and strictly positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    /// `(q₁..qₙ, p₁..pₙ)`, the storage convention.
    BlockQP,
    /// `(q₁, p₁, .., qₙ, pₙ)`.
    InterleavedQP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeOrdering {
    n: usize,
    layout: Layout,
}

impl ModeOrdering {
    pub fn new(n: usize, layout: Layout) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroModes);
        }
        Ok(ModeOrdering { n, layout })
    }

    pub fn block(n: usize) -> Result<Self> {
        Self::new(n, Layout::BlockQP)
    }

    pub fn interleaved(n: usize) -> Result<Self> {
        Self::new(n, Layout::InterleavedQP)
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// `perm[i]` is the block-ordered index of the `i`-th coordinate in this layout.
    pub fn to_block_indices(&self) -> Vec<usize> {
        let n = self.n;
        match self.layout {
            Layout::BlockQP => (0..2 * n).collect(),
            Layout::InterleavedQP => (0..2 * n).map(|i| if i % 2 == 0 { i / 2 } else { n + i / 2 }).collect(),
        }
    }
}

/// The canonical form `J = [[0, I], [-I, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n: usize,
    j: RMat,
}

impl SymplecticForm {
    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &RMat {
        &self.j
    }

    pub fn into_matrix(self) -> RMat {
        self.j
    }

    pub fn complex(&self) -> CMat {
        to_complex(&self.j)
    }
}

pub fn symplectic_form(n: usize) -> Result<SymplecticForm> {
    if n == 0 {
        return Err(Error::ZeroModes);
    }
    Ok(SymplecticForm { n, j: j_matrix(n) })
}

/// `J` without the mode-count check; `n = 0` gives the empty matrix.
pub(crate) fn j_matrix(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = 1.0;
        j[(n + k, k)] = -1.0;
    }
    j
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct InertiaIndex {
    pub positive: usize,
    pub zero: usize,
    pub negative: usize,
}

impl InertiaIndex {
    pub fn dimension(&self) -> usize {
        self.positive + self.zero + self.negative
    }
}

impl core::fmt::Display for InertiaIndex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "({},{},{})", self.positive, self.zero, self.negative)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefiniteMarginal,
    Indefinite,
}

impl Definiteness {
    pub fn from_inertia(i: &InertiaIndex) -> Self {
        if i.negative > 0 {
            Definiteness::Indefinite
        } else if i.zero > 0 {
            Definiteness::PositiveSemidefiniteMarginal
        } else {
            Definiteness::PositiveDefinite
        }
    }

    pub fn is_psd(&self) -> bool {
        !matches!(self, Definiteness::Indefinite)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Definiteness::PositiveDefinite => "positive_definite",
            Definiteness::PositiveSemidefiniteMarginal => "positive_semidefinite_marginal",
            Definiteness::Indefinite => "indefinite",
        }
    }
}

/// Frobenius norm for real or complex matrices.
pub(crate) fn fro<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    let s = m.iter().map(|x| x.clone().modulus_squared()).sum::<f64>();
    Float::sqrt(s)
}

/// Maximum absolute row sum.
pub fn norm_inf<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|x| x.clone().modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖a − b‖_F / max(‖a‖_F, ‖b‖_F)`, zero when both vanish.
pub fn relative_difference<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    let scale = fro(a).max(fro(b));
    if scale == 0.0 {
        0.0
    } else {
        fro(&(a - b)) / scale
    }
}

pub(crate) fn check_square<T: nalgebra::Scalar>(m: &DMatrix<T>, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::dims(format!("{what} is {}x{}, expected square", m.nrows(), m.ncols())));
    }
    Ok(m.nrows())
}

pub(crate) fn check_phase_space<T: nalgebra::Scalar>(m: &DMatrix<T>, what: &str) -> Result<usize> {
    let d = check_square(m, what)?;
    if d == 0 {
        return Err(Error::ZeroModes);
    }
    if d % 2 != 0 {
        return Err(Error::dims(format!("{what} has odd dimension {d}")));
    }
    Ok(d / 2)
}

/// Relative anti-Hermitian defect `‖M − M†‖_F / ‖M‖_F`.
pub fn hermitian_defect<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    let s = fro(m);
    if s == 0.0 {
        0.0
    } else {
        fro(&(m - m.adjoint())) / s
    }
}

pub(crate) fn require_hermitian<T: ComplexField<RealField = f64>>(
    m: &DMatrix<T>,
    what: &'static str,
    tol: &Tolerances,
) -> Result<()> {
    check_square(m, what)?;
    let deviation = hermitian_defect(m);
    if deviation > tol.residual_tol {
        return Err(Error::NotHermitian { what, deviation });
    }
    Ok(())
}

pub(crate) fn require_symmetric(m: &RMat, what: &'static str, tol: &Tolerances) -> Result<()> {
    check_square(m, what)?;
    let deviation = hermitian_defect(m);
    if deviation > tol.residual_tol {
        return Err(Error::NotSymmetric { what, deviation });
    }
    Ok(())
}

pub fn hermitian_part<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> DMatrix<T> {
    let half = T::from_real(0.5);
    (m + m.adjoint()) * half
}

pub fn antisymmetric_part(m: &RMat) -> RMat {
    (m - m.transpose()) * 0.5
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

/// Eigenvalues of a self-adjoint matrix, ascending. The input is Hermitian-symmetrized first.
pub fn hermitian_spectrum<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, tol: &Tolerances) -> Result<Vec<f64>> {
    require_hermitian(m, "self-adjoint input", tol)?;
    Ok(hermitian_spectrum_unchecked(m))
}

pub(crate) fn hermitian_spectrum_unchecked<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let e = SymmetricEigen::new(hermitian_part(m));
    let mut v: Vec<f64> = e.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v
}

/// Signature of a spectrum against the relative zero band.
pub fn classify(spectrum: &[f64], tol: &Tolerances) -> InertiaIndex {
    let scale = spectrum.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let band = tol.eig_zero_band * scale;
    let mut idx = InertiaIndex::default();
    for &v in spectrum {
        if v.abs() <= band {
            idx.zero += 1;
        } else if v > 0.0 {
            idx.positive += 1;
        } else {
            idx.negative += 1;
        }
    }
    idx
}

pub fn inertia<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, tol: &Tolerances) -> Result<InertiaIndex> {
    let spec = hermitian_spectrum(m, tol)?;
    Ok(classify(&spec, tol))
}

pub fn psd_verdict<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, tol: &Tolerances) -> Result<Definiteness> {
    Ok(Definiteness::from_inertia(&inertia(m, tol)?))
}

/// Congruence by the permutation between two layouts with the same mode count.
pub fn reorder(m: &RMat, from: ModeOrdering, to: ModeOrdering) -> Result<RMat> {
    if from.n != to.n {
        return Err(Error::dims(format!("orderings have {} and {} modes", from.n, to.n)));
    }
    let d = check_square(m, "reordered matrix")?;
    if d != 2 * from.n {
        return Err(Error::dims(format!("matrix is {d}x{d}, ordering needs {}", 2 * from.n)));
    }
    let src = from.to_block_indices();
    let dst = to.to_block_indices();
    // position in `from` of each block index
    let mut inv = alloc::vec![0usize; d];
    for (i, &b) in src.iter().enumerate() {
        inv[b] = i;
    }
    let p: Vec<usize> = dst.iter().map(|&b| inv[b]).collect();
    Ok(RMat::from_fn(d, d, |i, j| m[(p[i], p[j])]))
}

/// Eigenvalues of a real matrix sorted by real part, then imaginary part.
pub fn real_spectrum(m: &RMat) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v = bounded_eigenvalues(m);
    sort_complex(&mut v);
    v
}

// nalgebra's unbounded Schur iteration can cycle forever on some exactly structured
// inputs, so cap it and retry on an orthogonally similar matrix
fn bounded_eigenvalues(m: &RMat) -> Vec<Complex64> {
    const MAX_SWEEPS: usize = 2000;
    if let Some(s) = m.clone().try_schur(f64::EPSILON, MAX_SWEEPS) {
        return s.complex_eigenvalues().iter().copied().collect();
    }
    let d = m.nrows();
    for k in 1..=4 {
        let mut q = RMat::identity(d, d);
        for i in 0..d {
            for j in (i + 1)..d {
                let th = 0.37 * k as f64 + 0.11 * (i + 2 * j) as f64;
                let (sn, cs) = Float::sin_cos(th);
                let mut g = RMat::identity(d, d);
                g[(i, i)] = cs;
                g[(j, j)] = cs;
                g[(i, j)] = -sn;
                g[(j, i)] = sn;
                q = q * g;
            }
        }
        let rotated = q.transpose() * m * &q;
        if let Some(s) = rotated.try_schur(f64::EPSILON, MAX_SWEEPS) {
            return s.complex_eigenvalues().iter().copied().collect();
        }
    }
    let c: CMat = m.map(|x| Complex64::new(x, 0.0));
    match c.try_schur(f64::EPSILON, 10 * MAX_SWEEPS) {
        Some(s) => s.eigenvalues().map(|e| e.iter().copied().collect()).unwrap_or_default(),
        None => alloc::vec![Complex64::new(f64::NAN, f64::NAN); d],
    }
}

/// Eigenvalues of a complex matrix, through the real embedding `[[Re, −Im], [Im, Re]]`.
///
/// The embedding doubles every eigenvalue together with its conjugate, so only
/// the real parts are trustworthy as a multiset; this is enough for the abscissa.
pub fn complex_abscissa(m: &CMat) -> f64 {
    let d = m.nrows();
    if d == 0 {
        return f64::NEG_INFINITY;
    }
    let big = RMat::from_fn(2 * d, 2 * d, |i, j| {
        let z = m[(i % d, j % d)];
        match (i < d, j < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    spectral_abscissa(&real_spectrum(&big))
}

pub fn spectral_abscissa(spectrum: &[Complex64]) -> f64 {
    spectrum.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| {
        a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
    });
}

/// Symmetric square root and inverse square root of a positive definite matrix.
pub(crate) fn sqrt_pd(m: &RMat, what: &'static str, tol: &Tolerances) -> Result<(RMat, RMat)> {
    require_symmetric(m, what, tol)?;
    let e = SymmetricEigen::new(hermitian_part(m));
    let scale = e.eigenvalues.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let min = e.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > tol.eig_zero_band * scale) {
        return Err(Error::NotPositiveDefinite { what, min_eigenvalue: min });
    }
    let u = &e.eigenvectors;
    let d = e.eigenvalues.len();
    let s = RMat::from_diagonal(&e.eigenvalues.map(Float::sqrt));
    let si = RMat::from_diagonal(&e.eigenvalues.map(|x| 1.0 / Float::sqrt(x)));
    let root = u * s * u.transpose();
    let inv_root = u * si * u.transpose();
    debug_assert_eq!(root.nrows(), d);
    Ok((hermitian_part(&root), hermitian_part(&inv_root)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn single_mode_form() {
        let j = symplectic_form(1).unwrap();
        assert_eq!(j.matrix(), &RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn zero_modes_rejected() {
        assert_eq!(symplectic_form(0), Err(Error::ZeroModes));
    }

    #[test]
    fn form_identities() {
        for n in 1..=8 {
            let j = symplectic_form(n).unwrap().into_matrix();
            let id = RMat::identity(2 * n, 2 * n);
            assert_eq!(&j * j.transpose(), id);
            assert_eq!(&j * &j, -&id);
            assert_eq!(j.transpose(), -&j);
            assert!((j.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inertia_identity() {
        let i = inertia(&RMat::identity(4, 4), &tol()).unwrap();
        assert_eq!(i, InertiaIndex { positive: 4, zero: 0, negative: 0 });
    }

    #[test]
    fn inertia_signature() {
        let m = RMat::from_diagonal(&crate::RVec::from_vec(alloc::vec![1.0, 0.0, -1.0]));
        assert_eq!(inertia(&m, &tol()).unwrap(), InertiaIndex { positive: 1, zero: 1, negative: 1 });
    }

    #[test]
    fn inertia_rejects_non_self_adjoint() {
        let m = RMat::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(inertia(&m, &tol()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn zero_band_is_relative() {
        let big = 1e6;
        let spec = [big, 1e-4, -1e-4];
        // 1e-4 lies inside 1e-9 * 1e6 = 1e-3
        assert_eq!(classify(&spec, &tol()), InertiaIndex { positive: 1, zero: 2, negative: 0 });
        assert_eq!(classify(&[1.0, 1e-4], &tol()).zero, 0);
    }

    #[test]
    fn marginal_boundary() {
        let v = RMat::identity(2, 2);
        let d = psd_verdict(&(&v - RMat::identity(2, 2)), &tol()).unwrap();
        assert_eq!(d, Definiteness::PositiveSemidefiniteMarginal);
    }

    #[test]
    fn complex_hermitian_inertia() {
        // iJ has eigenvalues ±1
        let ij = symplectic_form(2).unwrap().complex() * Complex64::new(0.0, 1.0);
        assert_eq!(inertia(&ij, &tol()).unwrap(), InertiaIndex { positive: 2, zero: 0, negative: 2 });
    }

    #[test]
    fn single_mode_reorder_is_identity() {
        let m = RMat::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let r = reorder(&m, ModeOrdering::block(1).unwrap(), ModeOrdering::interleaved(1).unwrap()).unwrap();
        assert_eq!(r, m);
    }

    #[test]
    fn reorder_j_gives_direct_sum() {
        for n in 1..=5 {
            let j = j_matrix(n);
            let r = reorder(&j, ModeOrdering::block(n).unwrap(), ModeOrdering::interleaved(n).unwrap()).unwrap();
            let mut expect = RMat::zeros(2 * n, 2 * n);
            for k in 0..n {
                expect[(2 * k, 2 * k + 1)] = 1.0;
                expect[(2 * k + 1, 2 * k)] = -1.0;
            }
            assert_eq!(r, expect);
        }
    }

    #[test]
    fn reorder_block_diagonal_qp() {
        // Γ₁ ⊕ Γ₂ acting on q and p separately becomes 2x2 blocks per mode pair
        let n = 2;
        let mut m = RMat::zeros(4, 4);
        m[(0, 0)] = 1.0;
        m[(0, 1)] = 2.0;
        m[(1, 0)] = 3.0;
        m[(1, 1)] = 4.0;
        m[(2, 2)] = 5.0;
        m[(2, 3)] = 6.0;
        m[(3, 2)] = 7.0;
        m[(3, 3)] = 8.0;
        let r = reorder(&m, ModeOrdering::block(n).unwrap(), ModeOrdering::interleaved(n).unwrap()).unwrap();
        // q₁,p₁,q₂,p₂: no q-p coupling inside a mode
        assert_eq!(r[(0, 1)], 0.0);
        assert_eq!(r[(2, 3)], 0.0);
        assert_eq!(r[(0, 2)], 2.0);
        assert_eq!(r[(1, 3)], 6.0);
    }

    #[test]
    fn reorder_dimension_mismatch() {
        let m = RMat::identity(4, 4);
        assert!(reorder(&m, ModeOrdering::block(3).unwrap(), ModeOrdering::interleaved(3).unwrap()).is_err());
    }

    #[test]
    fn tolerances_must_be_positive() {
        assert!(Tolerances::new(0.0, 1e-10, 1e-9).is_err());
        assert!(Tolerances::new(1e-9, f64::NAN, 1e-9).is_err());
        assert!(Tolerances::new(1e-9, 1e-10, 1e-9).is_ok());
    }

    #[test]
    fn complex_abscissa_matches_real() {
        let a = RMat::from_row_slice(2, 2, &[-1.0, 3.0, -3.0, -1.0]);
        let s = spectral_abscissa(&real_spectrum(&a));
        assert!((s + 1.0).abs() < 1e-12);
        assert!((complex_abscissa(&to_complex(&a)) + 1.0).abs() < 1e-12);
        let shifted = to_complex(&a) + CMat::identity(2, 2) * Complex64::new(0.5, 2.0);
        assert!((complex_abscissa(&shifted) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn near_scalar_spectrum_terminates() {
        // similarity images of −I/2 used to stall the Schur sweep
        for (r, t) in [(0.5, 0.3), (-1.4, -0.9), (1.2, 0.7), (0.05, 0.0)] {
            let s = crate::williamson::two_mode_squeezer(r).unwrap() * crate::symmetry::local_rotation(&[t, 2.0 * t]).unwrap();
            let g = &s * (RMat::identity(4, 4) * -0.5) * s.clone().try_inverse().unwrap();
            for z in real_spectrum(&g) {
                assert!((z - Complex64::new(-0.5, 0.0)).norm() < 1e-6, "{z}");
            }
        }
    }

    fn hermitian(n: usize) -> impl Strategy<Value = CMat> {
        proptest::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |v| {
            let a = CMat::from_fn(n, n, |i, j| Complex64::new(v[i * n + j], v[n * n + i * n + j]));
            &a + a.adjoint()
        })
    }

    proptest! {
        #[test]
        fn inertia_sums_to_dimension(m in (1usize..7).prop_flat_map(hermitian)) {
            let i = inertia(&m, &tol()).unwrap();
            prop_assert_eq!(i.dimension(), m.nrows());
        }

        #[test]
        fn inertia_congruence_invariant(
            m in hermitian(4),
            w in proptest::collection::vec(-1.0f64..1.0, 32),
        ) {
            let w = CMat::from_fn(4, 4, |i, j| Complex64::new(w[i * 4 + j], w[16 + i * 4 + j]))
                + CMat::identity(4, 4) * Complex64::new(3.0, 0.0);
            let spec = hermitian_spectrum(&m, &tol()).unwrap();
            // keep away from the band so the congruence cannot move a sign
            prop_assume!(spec.iter().all(|v| v.abs() > 1e-3));
            let c = &w * &m * w.adjoint();
            prop_assert_eq!(inertia(&m, &tol()).unwrap(), inertia(&c, &tol()).unwrap());
        }

        #[test]
        fn reorder_round_trip(n in 1usize..6, seed in proptest::collection::vec(-5.0f64..5.0, 144)) {
            let d = 2 * n;
            let m = RMat::from_fn(d, d, |i, j| seed[i * d + j]);
            let b = ModeOrdering::block(n).unwrap();
            let il = ModeOrdering::interleaved(n).unwrap();
            let there = reorder(&m, b, il).unwrap();
            let back = reorder(&there, il, b).unwrap();
            prop_assert_eq!(&back, &m);
            let mut a: Vec<f64> = m.iter().copied().collect();
            let mut c: Vec<f64> = there.iter().copied().collect();
            a.sort_by(|x, y| x.partial_cmp(y).unwrap());
            c.sort_by(|x, y| x.partial_cmp(y).unwrap());
            prop_assert_eq!(a, c);
        }
    }
}

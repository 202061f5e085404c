// SPDX-License-Identifier: Apache-2.0

//! Dense matrix exponential by scaling and squaring with a degree-13 Padé approximant.

use nalgebra::{ComplexField, DMatrix};
use num_traits::Float;

use crate::{Error, Result};

const B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA_13: f64 = 5.371920351148152;

fn norm1<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|x| x.clone().modulus()).sum::<f64>()).fold(0.0, f64::max)
}

/// `e^A` for a square matrix.
pub fn expm<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let d = a.nrows();
    if d != a.ncols() {
        return Err(Error::dims("exponential of a non-square matrix"));
    }
    if d == 0 {
        return Ok(a.clone());
    }
    let nrm = norm1(a);
    if !nrm.is_finite() {
        return Err(Error::SolverFailure("non-finite matrix in exponential".into()));
    }
    let s = if nrm > THETA_13 { Float::ceil(Float::log2(nrm / THETA_13)) as i32 } else { 0 };
    let scale = Float::powi(2.0f64, -s);
    let a = a * T::from_real(scale);

    let c = |k: usize| T::from_real(B[k]);
    let id = DMatrix::<T>::identity(d, d);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let inner_u = &a6 * (&a6 * c(13) + &a4 * c(11) + &a2 * c(9));
    let u = &a * (inner_u + &a6 * c(7) + &a4 * c(5) + &a2 * c(3) + &id * c(1));
    let inner_v = &a6 * (&a6 * c(12) + &a4 * c(10) + &a2 * c(8));
    let v = inner_v + &a6 * c(6) + &a4 * c(4) + &a2 * c(2) + &id * c(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or(Error::Singular("Padé denominator"))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

//! One-step and transfer matrices.
//!
//! `A_j(z) = [[(z - b_j)/a_j, -1/a_j], [a_j, 0]]` has determinant one and
//! `T_n(z) = A_n(z) ... A_1(z)` maps `(1, 0)` to `(p_n, a_n p_{n-1})`.
//! Norms are Frobenius throughout.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::Result;
use crate::jacobi::JacobiParams;

/// Scalars a [`Mat2`] can hold.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + PartialEq + std::fmt::Debug
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn abs2(self) -> f64;
    fn neg(self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn abs2(self) -> f64 {
        self * self
    }
    fn neg(self) -> Self {
        -self
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
    fn neg(self) -> Self {
        -self
    }
}

/// A 2×2 matrix `[[m11, m12], [m21, m22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    pub m11: T,
    pub m12: T,
    pub m21: T,
    pub m22: T,
}

/// `T_n(z)` at complex energy.
pub type TransferMatrix = Mat2<Complex64>;

impl<T: Scalar> Mat2<T> {
    pub fn new(m11: T, m12: T, m21: T, m22: T) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn det(&self) -> T {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// Squared Frobenius norm.
    pub fn norm_sq(&self) -> f64 {
        self.m11.abs2() + self.m12.abs2() + self.m21.abs2() + self.m22.abs2()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Entrywise multiple by a real factor.
    pub fn scale(&self, f: f64) -> Self {
        let f = T::from_real(f);
        Self::new(self.m11 * f, self.m12 * f, self.m21 * f, self.m22 * f)
    }

    /// Adjugate; equals the inverse when `det = 1`.
    pub fn adjugate(&self) -> Self {
        Self::new(self.m22, self.m12.neg(), self.m21.neg(), self.m11)
    }
}

impl Mat2<f64> {
    pub fn to_complex(self) -> Mat2<Complex64> {
        Mat2::new(
            Complex64::from(self.m11),
            Complex64::from(self.m12),
            Complex64::from(self.m21),
            Complex64::from(self.m22),
        )
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.m11 * r.m11 + self.m12 * r.m21,
            self.m11 * r.m12 + self.m12 * r.m22,
            self.m21 * r.m11 + self.m22 * r.m21,
            self.m21 * r.m12 + self.m22 * r.m22,
        )
    }
}

impl<T: Scalar> Add for Mat2<T> {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(self.m11 + r.m11, self.m12 + r.m12, self.m21 + r.m21, self.m22 + r.m22)
    }
}

impl<T: Scalar> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(self.m11 - r.m11, self.m12 - r.m12, self.m21 - r.m21, self.m22 - r.m22)
    }
}

/// `A_j(z)` for `1 <= j <= len`.
pub fn one_step<T: Scalar>(params: &JacobiParams, j: usize, z: T) -> Mat2<T> {
    let a = params.a(j);
    let inv = 1.0 / a;
    Mat2::new(
        (z - T::from_real(params.b(j))) * T::from_real(inv),
        T::from_real(-inv),
        T::from_real(a),
        T::zero(),
    )
}

/// `A_n(z) ... A_1(z)`; the identity for `n = 0`.
pub fn transfer_matrix(params: &JacobiParams, z: Complex64, n: usize) -> Result<TransferMatrix> {
    transfer_product(params, z, n)
}

/// Real-energy transfer matrix.
pub fn transfer_matrix_real(params: &JacobiParams, x: f64, n: usize) -> Result<Mat2<f64>> {
    transfer_product(params, x, n)
}

fn transfer_product<T: Scalar>(params: &JacobiParams, z: T, n: usize) -> Result<Mat2<T>> {
    params.require(n)?;
    let mut t = Mat2::identity();
    for j in 1..=n {
        t = one_step(params, j, z) * t;
    }
    Ok(t)
}

/// Calls `f(j, T_j(z))` for `j = 0..=n` while accumulating the product.
pub fn for_each_transfer<T: Scalar>(
    params: &JacobiParams,
    z: T,
    n: usize,
    mut f: impl FnMut(usize, &Mat2<T>),
) -> Result<()> {
    params.require(n)?;
    let mut t = Mat2::identity();
    f(0, &t);
    for j in 1..=n {
        t = one_step(params, j, z) * t;
        f(j, &t);
    }
    Ok(())
}

/// `(1/(n+1)) Σ_{j=0}^{n} ||T_j(x)||²` with `T_0 = I`.
pub fn transfer_norm_cesaro(params: &JacobiParams, x: f64, n: usize) -> Result<f64> {
    let mut sum = 0.0;
    for_each_transfer(params, x, n, |_, t| sum += t.norm_sq())?;
    Ok(sum / (n + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::evaluate_polys;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn first_step_at_origin() {
        let t = transfer_matrix(&JacobiParams::free(1), c(0.0), 1).unwrap();
        assert_eq!(t, Mat2::new(c(0.0), c(-1.0), c(1.0), c(0.0)));
    }

    #[test]
    fn quarter_rotation_fourth_power() {
        let t = transfer_matrix(&JacobiParams::free(4), c(0.0), 4).unwrap();
        assert!((t - Mat2::identity()).norm() < 1e-15);
    }

    #[test]
    fn unit_determinant() {
        let params = JacobiParams::new(
            (1..=40).map(|j| 0.5 + (j as f64 * 0.37).sin().abs()).collect(),
            (1..=40).map(|j| (j as f64 * 1.3).cos()).collect(),
        )
        .unwrap();
        for z in [Complex64::new(0.3, 0.0), Complex64::new(-1.1, 0.4), Complex64::new(2.0, -3.0)] {
            let t = transfer_matrix(&params, z, 40).unwrap();
            let scale = t.norm_sq();
            assert!((t.det() - c(1.0)).norm() < 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn cesaro_free_origin() {
        let params = JacobiParams::free(50);
        assert_eq!(transfer_norm_cesaro(&params, 0.0, 0).unwrap(), 2.0);
        for n in [1, 7, 50] {
            assert!((transfer_norm_cesaro(&params, 0.0, n).unwrap() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn columns_match_polynomials() {
        let params = JacobiParams::new(
            (1..=60).map(|j| 1.0 + 0.3 * (j as f64).sin()).collect(),
            (1..=60).map(|j| 0.5 * (j as f64 * 0.7).cos()).collect(),
        )
        .unwrap();
        let x = 0.4;
        let polys = evaluate_polys(&params, x, 60).unwrap();
        for n in 1..=60 {
            let t = transfer_matrix_real(&params, x, n).unwrap();
            let an = params.a(n);
            let expect = [polys.p[n], polys.q[n], an * polys.p[n - 1], an * polys.q[n - 1]];
            let got = [t.m11, t.m12, t.m21, t.m22];
            let scale = t.norm();
            for (e, g) in expect.iter().zip(got) {
                assert!((e - g).abs() < 1e-10 * scale);
            }
        }
    }
}

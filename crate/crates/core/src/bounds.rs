//! Checks of the perturbed transfer-matrix bounds
//!
//! ```text
//! (1/(n+1)) Σ_{j≤n} ||T_j(x0 + z/(n+1))||² ≤ C exp(2C|z|/α₋)
//! ||T_n(x0 + z/(n+1))|| ≤ C^{1/2} exp(C|z|/α₋)
//! ```
//!
//! and of the ℓ¹ perturbation bound `||T̃_n|| ≤ C1 exp(C1² C2 C3 (1/α₋ + 1/α'₋))`.
//! Norms are Frobenius; the constants are realized as maxima over `m ≤ n`.

use num_complex::Complex64;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::jacobi::JacobiParams;
use crate::transfer::{one_step, Mat2, Scalar};

/// Relative slack in `lhs ≤ rhs (1 + BOUND_SLACK)`.
pub const BOUND_SLACK: f64 = 1e-10;

/// Outcome of one bound check. `lhs` and `rhs` overflow to infinity for
/// strongly growing instances; `holds` is decided from `log_lhs`/`log_rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub x0: f64,
    pub z: (f64, f64),
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub constant_c: f64,
    pub holds: bool,
    pub margin: f64,
}

impl BoundReport {
    fn from_logs(x0: f64, z: Complex64, n: usize, log_lhs: f64, log_rhs: f64, constant_c: f64) -> Self {
        let (lhs, rhs) = (log_lhs.exp(), log_rhs.exp());
        Self {
            x0,
            z: (z.re, z.im),
            n,
            lhs,
            rhs,
            log_lhs,
            log_rhs,
            constant_c,
            holds: log_lhs <= log_rhs + BOUND_SLACK.ln_1p(),
            margin: rhs - lhs,
        }
    }
}

fn alpha_minus_upto(params: &JacobiParams, n: usize) -> f64 {
    params.a_slice()[..n.max(1).min(params.len())].iter().copied().fold(f64::INFINITY, f64::min)
}

fn beta_upto(params: &JacobiParams, n: usize) -> f64 {
    params.b_slice()[..n.min(params.len())].iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Renormalize the running product once its squared norm passes this.
const RESCALE_AT: f64 = 1e200;

/// `ln ||T_j(z)||²` for `j = 0..=n`, finite even where the norms overflow.
fn log_norms_sq<T: Scalar>(params: &JacobiParams, z: T, n: usize) -> Result<Vec<f64>> {
    params.require(n)?;
    let mut out = Vec::with_capacity(n + 1);
    let mut t: Mat2<T> = Mat2::identity();
    let mut log_scale = 0.0;
    out.push(t.norm_sq().ln());
    for k in 1..=n {
        t = one_step(params, k, z) * t;
        let nsq = t.norm_sq();
        if nsq > RESCALE_AT {
            t = t.scale(1.0 / nsq.sqrt());
            log_scale += nsq.ln();
            out.push(log_scale);
        } else {
            out.push(nsq.ln() + log_scale);
        }
    }
    Ok(out)
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `kappa·factor·C·|z|/α₋` with `C = exp(log_c)`; zero when `|z| = 0` even if `C` overflows.
fn exponent(kappa: f64, factor: f64, log_c: f64, z: Complex64, alpha_minus: f64) -> f64 {
    let r = kappa * factor * z.norm() / alpha_minus;
    if r == 0.0 {
        0.0
    } else {
        r * log_c.exp()
    }
}

fn log_max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Cesàro form, with `C = max_{m≤n} (1/(m+1)) Σ_{j≤m} ||T_j(x0)||²`.
pub fn check_cesaro_bound(params: &JacobiParams, x0: f64, z: Complex64, n: usize) -> Result<BoundReport> {
    check_cesaro_bound_scaled(params, x0, z, n, 1.0)
}

/// [`check_cesaro_bound`] with the exponent multiplied by `kappa`.
pub fn check_cesaro_bound_scaled(
    params: &JacobiParams,
    x0: f64,
    z: Complex64,
    n: usize,
    kappa: f64,
) -> Result<BoundReport> {
    let mut log_sum = f64::NEG_INFINITY;
    let mut log_c = f64::NEG_INFINITY;
    for (m, v) in log_norms_sq(params, x0, n)?.into_iter().enumerate() {
        log_sum = log_add(log_sum, v);
        log_c = log_c.max(log_sum - ((m + 1) as f64).ln());
    }
    let w = Complex64::new(x0, 0.0) + z / (n + 1) as f64;
    let log_lhs = log_norms_sq(params, w, n)?.into_iter().fold(f64::NEG_INFINITY, log_add) - ((n + 1) as f64).ln();
    let log_rhs = log_c + exponent(kappa, 2.0, log_c, z, alpha_minus_upto(params, n));
    Ok(BoundReport::from_logs(x0, z, n, log_lhs, log_rhs, log_c.exp()))
}

/// Pointwise form, with `C = max_{m≤n} ||T_m(x0)||²`.
pub fn check_sup_bound(params: &JacobiParams, x0: f64, z: Complex64, n: usize) -> Result<BoundReport> {
    check_sup_bound_scaled(params, x0, z, n, 1.0)
}

/// [`check_sup_bound`] with the exponent multiplied by `kappa`.
pub fn check_sup_bound_scaled(params: &JacobiParams, x0: f64, z: Complex64, n: usize, kappa: f64) -> Result<BoundReport> {
    let log_c = log_max(&log_norms_sq(params, x0, n)?);
    let w = Complex64::new(x0, 0.0) + z / (n + 1) as f64;
    let log_lhs = 0.5 * log_norms_sq(params, w, n)?[n];
    let log_rhs = 0.5 * log_c + exponent(kappa, 1.0, log_c, z, alpha_minus_upto(params, n));
    Ok(BoundReport::from_logs(x0, z, n, log_lhs, log_rhs, log_c.exp()))
}

fn perturbed(params: &JacobiParams, delta_a: &[f64], delta_b: &[f64], n: usize) -> Result<JacobiParams> {
    params.require(n)?;
    if delta_a.len() < n || delta_b.len() < n {
        return Err(Error::InvalidPerturbation(format!(
            "perturbation has {} / {} entries, need {n}",
            delta_a.len(),
            delta_b.len()
        )));
    }
    let a: Vec<f64> = (1..=n).map(|j| params.a(j) + delta_a[j - 1]).collect();
    let b: Vec<f64> = (1..=n).map(|j| params.b(j) + delta_b[j - 1]).collect();
    if let Some(j) = a.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::InvalidPerturbation(format!("perturbed a_{} = {} is not positive", j + 1, a[j])));
    }
    JacobiParams::new(a, b).map_err(|e| Error::InvalidPerturbation(e.to_string()))
}

/// Entrywise constant for `||Ã_j - A_j|| ≤ C3 (|δa_j| + |δb_j|)(1/α₋ + 1/α'₋)`
/// at energy `x0`.
pub fn l1_constant(x0: f64, beta: f64, alpha_min: f64) -> f64 {
    ((x0.abs() + beta + 1.0) / alpha_min + alpha_min).max(1.0)
}

/// ℓ¹ perturbation bound with `C1 = max_{m≤n} ||T_m(x0)||`,
/// `C2 = Σ_{j≤n} (|δa_j| + |δb_j|)` and `C3` from [`l1_constant`].
pub fn check_l1_perturbation(
    params: &JacobiParams,
    delta_a: &[f64],
    delta_b: &[f64],
    x0: f64,
    n: usize,
) -> Result<BoundReport> {
    let tilde = perturbed(params, delta_a, delta_b, n)?;
    let log_c1 = 0.5 * log_max(&log_norms_sq(params, x0, n)?);
    let c2: f64 = (0..n).map(|j| delta_a[j].abs() + delta_b[j].abs()).sum();
    let am = alpha_minus_upto(params, n);
    let am_t = alpha_minus_upto(&tilde, n);
    let c3 = l1_constant(x0, beta_upto(params, n), am.min(am_t));
    let log_lhs = 0.5 * log_norms_sq(&tilde, x0, n)?[n];
    let r = c2 * c3 * (1.0 / am + 1.0 / am_t);
    let log_rhs = log_c1 + if r == 0.0 { 0.0 } else { r * (2.0 * log_c1).exp() };
    Ok(BoundReport::from_logs(x0, Complex64::new(0.0, 0.0), n, log_lhs, log_rhs, c3))
}

/// `max_{m≤n} ||T̃_m(x0)||` for the perturbed parameters.
pub fn perturbed_norm_sup(params: &JacobiParams, delta_a: &[f64], delta_b: &[f64], x0: f64, n: usize) -> Result<f64> {
    let tilde = perturbed(params, delta_a, delta_b, n)?;
    Ok((0.5 * log_max(&log_norms_sq(&tilde, x0, n)?)).exp())
}

/// Complex double-double scalar for the telescoping product.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    re: TwoFloat,
    im: TwoFloat,
}

impl Dd {
    fn new(re: TwoFloat, im: TwoFloat) -> Self {
        Self { re, im }
    }
}

impl std::ops::Add for Dd {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(self.re + r.re, self.im + r.im)
    }
}

impl std::ops::Sub for Dd {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(self.re - r.re, self.im - r.im)
    }
}

impl std::ops::Mul for Dd {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self::new(self.re * r.re - self.im * r.im, self.re * r.im + self.im * r.re)
    }
}

impl Scalar for Dd {
    fn zero() -> Self {
        Self::from_real(0.0)
    }
    fn one() -> Self {
        Self::from_real(1.0)
    }
    fn from_real(x: f64) -> Self {
        Self::new(TwoFloat::from(x), TwoFloat::from(0.0))
    }
    fn abs2(self) -> f64 {
        let (re, im) = (self.re.hi(), self.im.hi());
        re * re + im * im
    }
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

// One-step matrix with `1/a_j` in double-double, so its determinant is one
// to working precision and the adjugate is the inverse.
fn dd_step(params: &JacobiParams, j: usize, z: Complex64) -> Mat2<Dd> {
    let a = TwoFloat::from(params.a(j));
    let inv = TwoFloat::from(1.0) / a;
    let re = (TwoFloat::from(z.re) - TwoFloat::from(params.b(j))) * inv;
    let im = TwoFloat::from(z.im) * inv;
    let zero = TwoFloat::from(0.0);
    Mat2::new(Dd::new(re, im), Dd::new(-inv, zero), Dd::new(a, zero), Dd::zero())
}

/// Compares `Π_{k=n}^{1} (1 + B_k)` with `B_k = T_k⁻¹ (Ã_k - A_k) T_{k-1}`,
/// `Ã` the one-step matrices at `x0 + z/(n+1)`, against `T_n⁻¹ T̃_n` computed
/// directly. The difference is normalized by `||T_n|| ||T̃_n||`, the size of
/// the terms the direct product is formed from.
///
/// The product amplifies rounding by roughly `max_k ||T_k||² |z|`, so it is
/// accumulated in double-double arithmetic.
pub fn telescoping_residual(params: &JacobiParams, x0: f64, z: Complex64, n: usize) -> Result<f64> {
    params.require(n)?;
    let x = Complex64::new(x0, 0.0);
    let w = x + z / (n + 1) as f64;
    let mut t: Mat2<Dd> = Mat2::identity();
    let mut t_tilde: Mat2<Dd> = Mat2::identity();
    let mut prod: Mat2<Dd> = Mat2::identity();
    for k in 1..=n {
        let a = dd_step(params, k, x);
        let a_tilde = dd_step(params, k, w);
        let t_next = a * t;
        let b = t_next.adjugate() * (a_tilde - a) * t;
        prod = (Mat2::identity() + b) * prod;
        t = t_next;
        t_tilde = a_tilde * t_tilde;
    }
    let direct = t.adjugate() * t_tilde;
    Ok((prod - direct).norm() / (t.norm() * t_tilde.norm()))
}

/// Pairs of consecutive radii along `z = r·dir` at which the Cesàro left
/// side decreases by more than `tol` (relative). Reported, not asserted.
pub fn monotonicity_violations(
    params: &JacobiParams,
    x0: f64,
    dir: Complex64,
    radii: &[f64],
    n: usize,
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    let values = radii
        .iter()
        .map(|&r| check_cesaro_bound(params, x0, dir * r, n).map(|rep| rep.lhs))
        .collect::<Result<Vec<f64>>>()?;
    Ok(radii
        .windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| v[1] < v[0] * (1.0 - tol))
        .map(|(r, _)| (r[0], r[1]))
        .collect())
}

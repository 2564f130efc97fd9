//! Jacobi parameters and the three-term recurrence.
//!
//! Parameters are stored 1-based: `a(1)` is the first off-diagonal entry of
//! the Jacobi matrix and `b(1)` its top-left diagonal entry. With
//! `p_{-1} = 0`, `p_0 = 1` the orthonormal polynomials obey
//!
//! ```text
//! x p_n(x) = a_{n+1} p_{n+1}(x) + b_{n+1} p_n(x) + a_n p_{n-1}(x)
//! ```
//!
//! and the second-kind polynomials `q_n` obey the same recurrence with
//! `q_0 = 0`, `q_1 = -1/a_1`.

use crate::error::{Error, Result};

/// Values above this trigger a uniform rescale of a [`PolySequence`].
pub const OVERFLOW_GUARD: f64 = 1e150;

/// A finite prefix `{a_j, b_j}_{j=1}^{len}` of Jacobi parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiParams {
    a: Vec<f64>,
    b: Vec<f64>,
    alpha_minus: f64,
    alpha_plus: f64,
    beta: f64,
}

impl JacobiParams {
    /// Builds a parameter prefix. `a[0]` is `a_1`, `b[0]` is `b_1`.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidParams(format!(
                "a has {} entries but b has {}",
                a.len(),
                b.len()
            )));
        }
        if let Some((j, v)) = a
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidParams(format!("a_{} = {v} is not positive", j + 1)));
        }
        if let Some((j, v)) = b.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("b_{} = {v} is not finite", j + 1)));
        }
        let alpha_minus = a.iter().copied().fold(f64::INFINITY, f64::min);
        let alpha_plus = a.iter().copied().fold(0.0, f64::max);
        let beta = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Ok(Self {
            a,
            b,
            alpha_minus,
            alpha_plus,
            beta,
        })
    }

    /// Free Jacobi parameters `a ≡ 1`, `b ≡ 0` (Chebyshev polynomials of the
    /// second kind in `x/2`).
    pub fn free(len: usize) -> Self {
        Self::new(vec![1.0; len], vec![0.0; len]).expect("free parameters are valid")
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `a_j` for `1 <= j <= len`.
    #[inline]
    pub fn a(&self, j: usize) -> f64 {
        self.a[j - 1]
    }

    /// `b_j` for `1 <= j <= len`.
    #[inline]
    pub fn b(&self, j: usize) -> f64 {
        self.b[j - 1]
    }

    pub fn a_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn b_slice(&self) -> &[f64] {
        &self.b
    }

    /// `min_j a_j` over the stored prefix (infinite when empty).
    pub fn alpha_minus(&self) -> f64 {
        self.alpha_minus
    }

    pub fn alpha_plus(&self) -> f64 {
        self.alpha_plus
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Radius of a disk around the origin containing the spectrum of every
    /// truncation: `beta + 2 alpha_plus`.
    pub fn spectral_radius_bound(&self) -> f64 {
        self.beta + 2.0 * self.alpha_plus
    }

    /// Parameters of the once-stripped sequence `{a_{j+1}, b_{j+1}}`.
    pub fn stripped(&self) -> Result<Self> {
        if self.is_empty() {
            return Err(Error::ParameterExhaustion {
                requested: 1,
                available: 0,
            });
        }
        Self::new(self.a[1..].to_vec(), self.b[1..].to_vec())
    }

    pub(crate) fn require(&self, n: usize) -> Result<()> {
        if n > self.len() {
            Err(Error::ParameterExhaustion {
                requested: n,
                available: self.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// Values `p_0..p_n` and `q_0..q_n` at a real point.
///
/// When growth exceeds [`OVERFLOW_GUARD`] every stored value is divided by a
/// common factor; the true values are `stored * exp(scale_log)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySequence {
    pub x: f64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub scale_log: f64,
}

impl PolySequence {
    pub fn degree(&self) -> usize {
        self.p.len() - 1
    }

    /// Common factor relating stored and true values.
    pub fn scale(&self) -> f64 {
        self.scale_log.exp()
    }

    /// Largest normalized residual of the recurrence over all interior
    /// triples, measured against the magnitude of the terms involved.
    pub fn recurrence_residual(&self, params: &JacobiParams) -> f64 {
        let mut worst = 0.0_f64;
        for seq in [&self.p, &self.q] {
            for k in 1..self.degree() {
                let lhs = self.x * seq[k];
                let rhs = params.a(k + 1) * seq[k + 1] + params.b(k + 1) * seq[k] + params.a(k) * seq[k - 1];
                let size = (self.x * seq[k]).abs()
                    + (params.a(k + 1) * seq[k + 1]).abs()
                    + (params.b(k + 1) * seq[k]).abs()
                    + (params.a(k) * seq[k - 1]).abs();
                if size > f64::MIN_POSITIVE {
                    worst = worst.max((lhs - rhs).abs() / size);
                }
            }
        }
        worst
    }
}

/// Evaluates `p_0..p_n` and `q_0..q_n` at `x` by forward recurrence.
pub fn evaluate_polys(params: &JacobiParams, x: f64, n: usize) -> Result<PolySequence> {
    params.require(n)?;
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("x = {x} is not finite")));
    }
    let mut p = Vec::with_capacity(n + 1);
    let mut q = Vec::with_capacity(n + 1);
    let mut scale_log = 0.0;
    p.push(1.0);
    q.push(0.0);
    if n >= 1 {
        let a1 = params.a(1);
        p.push((x - params.b(1)) / a1);
        q.push(-1.0 / a1);
    }
    for k in 1..n {
        let a_next = params.a(k + 1);
        let c = x - params.b(k + 1);
        let a_k = params.a(k);
        let p_next = (c * p[k] - a_k * p[k - 1]) / a_next;
        let q_next = (c * q[k] - a_k * q[k - 1]) / a_next;
        p.push(p_next);
        q.push(q_next);
        let big = p_next.abs().max(q_next.abs());
        if big > OVERFLOW_GUARD {
            let inv = 1.0 / big;
            p.iter_mut().chain(q.iter_mut()).for_each(|v| *v *= inv);
            scale_log += big.ln();
        }
    }
    Ok(PolySequence { x, p, q, scale_log })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_a() {
        assert!(JacobiParams::new(vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(JacobiParams::new(vec![1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn cached_bounds() {
        let j = JacobiParams::new(vec![0.5, 2.0, 1.0], vec![-3.0, 1.0, 0.5]).unwrap();
        assert_eq!(j.alpha_minus(), 0.5);
        assert_eq!(j.alpha_plus(), 2.0);
        assert_eq!(j.beta(), 3.0);
    }

    #[test]
    fn free_at_origin() {
        let s = evaluate_polys(&JacobiParams::free(2), 0.0, 2).unwrap();
        assert_eq!(s.p, vec![1.0, 0.0, -1.0]);
        assert_eq!(s.q, vec![0.0, -1.0, 0.0]);
        assert_eq!(s.scale_log, 0.0);
    }

    #[test]
    fn free_cubic() {
        let params = JacobiParams::free(3);
        for &x in &[-1.7, -0.3, 0.0, 0.9, 2.5] {
            let s = evaluate_polys(&params, x, 3).unwrap();
            let exact: f64 = x * x * x - 2.0 * x;
            assert!((s.p[3] - exact).abs() < 1e-14 * (1.0 + exact.abs()));
        }
    }

    #[test]
    fn exhaustion() {
        let err = evaluate_polys(&JacobiParams::free(3), 0.0, 4).unwrap_err();
        assert_eq!(
            err,
            Error::ParameterExhaustion {
                requested: 4,
                available: 3
            }
        );
    }

    #[test]
    fn overflow_guard_outside_spectrum() {
        let n = 500;
        let params = JacobiParams::free(n);
        let s = evaluate_polys(&params, 3.0, n).unwrap();
        assert!(s.scale_log > 0.0);
        assert!(s.p.iter().chain(s.q.iter()).all(|v| v.is_finite()));
        assert!(s.recurrence_residual(&params) < 1e-12);
        // p_n(3) ~ c r^n with r = (3 + sqrt 5)/2.
        let rate = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        let log_pn = s.p[n].abs().ln() + s.scale_log;
        assert!((log_pn / n as f64 - rate).abs() < 5e-3);
        // invariants on the leading entries after rescale
        let f = (-s.scale_log).exp();
        assert!((s.p[0] - f).abs() <= 1e-13 * f);
        assert_eq!(s.q[0], 0.0);
        assert!((s.q[1] + f).abs() <= 1e-13 * f);
    }
}

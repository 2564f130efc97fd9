//! Christoffel–Darboux kernel `K_n(x, y) = Σ_{j=0}^{n} p_j(x) p_j(y)`,
//! its scaled ratios, the Lubinsky wiggle and the derivative identities.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jacobi::{evaluate_polys, JacobiParams, PolySequence};

/// Relative tolerance for the direct-sum vs CD-formula cross-check.
pub const CD_TOLERANCE: f64 = 1e-8;

/// Largest grid step used by [`wiggle_deviation`].
pub const WIGGLE_STEP: f64 = 0.1;

/// Whether [`kernel_with`] cross-checks the direct sum against the CD formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdCheck {
    Enabled,
    Disabled,
}

/// Separation below which the CD formula is skipped: `1e-6 (1 + |x|)`.
pub fn cd_threshold(x: f64) -> f64 {
    1e-6 * (1.0 + x.abs())
}

/// `K_n(x, y)` by direct summation with the CD formula as a diagnostic.
pub fn kernel(params: &JacobiParams, x: f64, y: f64, n: usize) -> Result<f64> {
    kernel_with(params, x, y, n, CdCheck::Enabled)
}

pub fn kernel_with(params: &JacobiParams, x: f64, y: f64, n: usize, check: CdCheck) -> Result<f64> {
    params.require(n)?;
    let degree = if check == CdCheck::Enabled && (x - y).abs() > cd_threshold(x) && params.len() > n {
        n + 1
    } else {
        n
    };
    let px = evaluate_polys(params, x, degree)?;
    let py = evaluate_polys(params, y, degree)?;
    let (direct, abs_sum) = scaled_sum(&px, &py, n);
    if degree > n {
        let cd = cd_formula_scaled(params, &px, &py, n);
        if abs_sum > 0.0 {
            let rel_err = (direct - cd).abs() / abs_sum;
            if !(rel_err <= CD_TOLERANCE) {
                return Err(Error::CdMismatch { rel_err });
            }
        }
    }
    Ok(direct * (px.scale_log + py.scale_log).exp())
}

/// Kernel from precomputed sequences (both of degree ≥ n).
pub fn kernel_from_polys(px: &PolySequence, py: &PolySequence, n: usize) -> f64 {
    scaled_sum(px, py, n).0 * (px.scale_log + py.scale_log).exp()
}

/// Right side of the CD formula,
/// `a_{n+1} [p_{n+1}(x) p_n(y) - p_n(x) p_{n+1}(y)] / (x - y)`.
/// Requires sequences of degree ≥ n+1 and `x != y`.
pub fn cd_formula(params: &JacobiParams, px: &PolySequence, py: &PolySequence, n: usize) -> f64 {
    cd_formula_scaled(params, px, py, n) * (px.scale_log + py.scale_log).exp()
}

fn cd_formula_scaled(params: &JacobiParams, px: &PolySequence, py: &PolySequence, n: usize) -> f64 {
    params.a(n + 1) * (px.p[n + 1] * py.p[n] - px.p[n] * py.p[n + 1]) / (px.x - py.x)
}

// Σ p_j(x) p_j(y) in the stored scale, ascending j, plus Σ |p_j(x) p_j(y)|.
fn scaled_sum(px: &PolySequence, py: &PolySequence, n: usize) -> (f64, f64) {
    px.p[..=n]
        .iter()
        .zip(&py.p[..=n])
        .fold((0.0, 0.0), |(s, t), (u, v)| (s + u * v, t + (u * v).abs()))
}

/// How offsets are turned into arguments of the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingMode {
    /// `x0 + a/n`
    Plain,
    /// `x0 + a/(n ρ_n)` with `ρ_n = w(x0) K_n(x0, x0)/n`
    Weak,
}

/// Matrix of ratios `K_n(x0 + a/s, x0 + b/s) / K_n(x0, x0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelGrid {
    pub x0: f64,
    pub n: usize,
    pub offsets: Vec<f64>,
    /// `values[i][k]` pairs `offsets[i]` with `offsets[k]`.
    pub values: Vec<Vec<f64>>,
    pub scaling_mode: ScalingMode,
    pub rho_n: Option<f64>,
}

/// `sin(t)/t` with the removable singularity filled in.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

impl KernelGrid {
    /// Reference value `sin(πρ(b-a))/(πρ(b-a))`. In weak mode the density is
    /// already absorbed by the scaling and `rho` is ignored.
    pub fn sinc_reference(&self, a: f64, b: f64, rho: f64) -> f64 {
        let r = match self.scaling_mode {
            ScalingMode::Plain => rho,
            ScalingMode::Weak => 1.0,
        };
        sinc(PI * r * (b - a))
    }

    /// `max |ratio - sinc|` over the grid.
    pub fn sinc_deviation(&self, rho: f64) -> f64 {
        let mut worst = 0.0_f64;
        for (i, &a) in self.offsets.iter().enumerate() {
            for (k, &b) in self.offsets.iter().enumerate() {
                worst = worst.max((self.values[i][k] - self.sinc_reference(a, b, rho)).abs());
            }
        }
        worst
    }
}

/// Fills the ratio matrix around `x0`. Weak mode needs the weight `w(x0)`.
pub fn scaled_grid(
    params: &JacobiParams,
    x0: f64,
    n: usize,
    offsets: &[f64],
    scaling_mode: ScalingMode,
    w_x0: Option<f64>,
) -> Result<KernelGrid> {
    let center = evaluate_polys(params, x0, n)?;
    let (k00, _) = scaled_sum(&center, &center, n);
    if !(k00 > 0.0) {
        return Err(Error::DegenerateCenter(k00));
    }
    let (scale, rho_n) = match scaling_mode {
        ScalingMode::Plain => (n as f64, None),
        ScalingMode::Weak => {
            let w = w_x0.ok_or_else(|| {
                Error::InvalidArgument("weak scaling requires the weight at x0".into())
            })?;
            if !(w > 0.0) {
                return Err(Error::InvalidArgument(format!("weight w(x0) = {w} must be positive")));
            }
            let k_true = k00 * (2.0 * center.scale_log).exp();
            let rho = w * k_true / n as f64;
            (n as f64 * rho, Some(rho))
        }
    };
    let seqs = offsets
        .iter()
        .map(|&a| evaluate_polys(params, x0 + a / scale, n))
        .collect::<Result<Vec<_>>>()?;
    let m = offsets.len();
    let mut values = vec![vec![0.0; m]; m];
    for i in 0..m {
        for k in i..m {
            let (s, _) = scaled_sum(&seqs[i], &seqs[k], n);
            let log_ratio = seqs[i].scale_log + seqs[k].scale_log - 2.0 * center.scale_log;
            let v = s / k00 * log_ratio.exp();
            values[i][k] = v;
            values[k][i] = v;
        }
    }
    Ok(KernelGrid {
        x0,
        n,
        offsets: offsets.to_vec(),
        values,
        scaling_mode,
        rho_n,
    })
}

/// `(1/n) K_n(x0 + a/n, x0 + a/n)`.
pub fn scaled_diagonal(params: &JacobiParams, x0: f64, n: usize, a: f64) -> Result<f64> {
    let s = evaluate_polys(params, x0 + a / n as f64, n)?;
    Ok(kernel_from_polys(&s, &s, n) / n as f64)
}

/// Symmetric sample grid `{i·A/m : |i| <= m}` with step at most [`WIGGLE_STEP`].
pub fn wiggle_grid(big_a: f64) -> Vec<f64> {
    let m = (big_a / WIGGLE_STEP).ceil() as i64;
    if m == 0 {
        return vec![0.0];
    }
    let step = big_a / m as f64;
    (-m..=m).map(|i| i as f64 * step).collect()
}

/// `max_{|a| <= A} |K_n(x0 + a/n, x0 + a/n)/K_n(x0, x0) - 1|` on [`wiggle_grid`].
pub fn wiggle_deviation(params: &JacobiParams, x0: f64, n: usize, big_a: f64) -> Result<f64> {
    if !(big_a >= 0.0 && big_a.is_finite()) {
        return Err(Error::InvalidArgument(format!("A = {big_a} must be a finite nonnegative number")));
    }
    let center = evaluate_polys(params, x0, n)?;
    let (k00, _) = scaled_sum(&center, &center, n);
    if !(k00 > 0.0) {
        return Err(Error::DegenerateCenter(k00));
    }
    let mut worst = 0.0_f64;
    for a in wiggle_grid(big_a) {
        let s = evaluate_polys(params, x0 + a / n as f64, n)?;
        let (kaa, _) = scaled_sum(&s, &s, n);
        let ratio = kaa / k00 * (2.0 * (s.scale_log - center.scale_log)).exp();
        worst = worst.max((ratio - 1.0).abs());
    }
    Ok(worst)
}

// Σ_{k<j} G(j, k) p_k with G(j, k) = p_j q_k - p_k q_j, for stored values
// `p`. G(j, ·) is run backward from G(j, j) = 0, G(j, j-1) = 1/a_j (the
// Wronskian), which avoids the cancellation of splitting G into p_j q_k and
// p_k q_j. Returns the sum in a scale with log factor `.1`.
fn green_sum(params: &JacobiParams, x: f64, p: &[f64], j: usize) -> (f64, f64) {
    if j == 0 {
        return (0.0, 0.0);
    }
    const LIMIT: f64 = 1e150;
    let mut log_scale = 0.0;
    let mut g_next = 0.0;
    let mut g = 1.0 / params.a(j);
    let mut sum = g * p[j - 1];
    for k in (1..j).rev() {
        let g_prev = ((x - params.b(k + 1)) * g - params.a(k + 1) * g_next) / params.a(k);
        g_next = g;
        g = g_prev;
        sum += g * p[k - 1];
        if g.abs() > LIMIT {
            g /= LIMIT;
            g_next /= LIMIT;
            sum /= LIMIT;
            log_scale += LIMIT.ln();
        }
    }
    (sum, log_scale)
}

/// `d/da (1/n) K_n(x0 + a/n, x0 + a/n)` at `a = 0`, that is
/// `(2/n²) Σ_{j≤n} p_j p_j'` with each `p_j'` from the identity of
/// [`derivative_identity`].
pub fn diagonal_derivative(params: &JacobiParams, x0: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("diagonal derivative needs n >= 1".into()));
    }
    let s = evaluate_polys(params, x0, n)?;
    let mut total = 0.0;
    for j in 1..=n {
        let (sum, log_scale) = green_sum(params, x0, &s.p, j);
        let term = s.p[j] * sum;
        if term != 0.0 {
            total += term.signum() * (term.abs().ln() + log_scale + 2.0 * s.scale_log).exp();
        }
    }
    let nf = n as f64;
    Ok(2.0 / (nf * nf) * total)
}

/// Step in `a` for [`diagonal_derivative_fd`].
pub const DIAGONAL_FD_STEP: f64 = 1e-4;

/// Central difference of `a ↦ (1/n) K_n(x0 + a/n, x0 + a/n)` at `a = 0`.
pub fn diagonal_derivative_fd(params: &JacobiParams, x0: f64, n: usize) -> Result<f64> {
    let h = DIAGONAL_FD_STEP;
    let up = scaled_diagonal(params, x0, n, h)?;
    let down = scaled_diagonal(params, x0, n, -h)?;
    Ok((up - down) / (2.0 * h))
}

/// `p_n'(x0)` from the variation-of-parameters identity
/// `Σ_{m<n} (p_n q_m - p_m q_n) p_m`.
pub fn derivative_identity(params: &JacobiParams, x0: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let s = evaluate_polys(params, x0, n)?;
    let (sum, log_scale) = green_sum(params, x0, &s.p, n);
    Ok(sum * (log_scale + s.scale_log).exp())
}

/// `p_n'(x0)` by Richardson-extrapolated central differences.
pub fn derivative_finite_difference(params: &JacobiParams, x0: f64, n: usize) -> Result<f64> {
    let h = 2e-3 / n.max(1) as f64;
    let pn = |x: f64| -> Result<f64> {
        let s = evaluate_polys(params, x, n)?;
        Ok(s.p[n] * s.scale_log.exp())
    };
    let d = |h: f64| -> Result<f64> { Ok((pn(x0 + h)? - pn(x0 - h)?) / (2.0 * h)) };
    let (d1, d2) = (d(h)?, d(h / 2.0)?);
    Ok((4.0 * d2 - d1) / 3.0)
}

/// `|p_n'` (identity) `- p_n'` (finite differences)`| / max(1, |p_n'|)`.
pub fn derivative_identity_check(params: &JacobiParams, x0: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("derivative check needs n >= 1".into()));
    }
    let exact = derivative_identity(params, x0, n)?;
    let fd = derivative_finite_difference(params, x0, n)?;
    Ok((exact - fd).abs() / exact.abs().max(1.0))
}

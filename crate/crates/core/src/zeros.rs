//! Zeros of `p_n` as eigenvalues of the truncated Jacobi matrix `J_{n;F}`.
//!
//! Everything is driven by the Sturm count of negative pivots in the
//! `LDLᵗ` factorization of `J_{n;F} - E`, which also serves the density of
//! states and the oscillation checks.

use crate::error::{Error, Result};
use crate::jacobi::JacobiParams;
use crate::kernel::kernel_with;
use crate::kernel::CdCheck;

/// Upper limit on the number of zeros a window may hold.
pub const MAX_WINDOW_ZEROS: usize = 1_000_000;

/// Replacement for an exactly vanishing pivot. Positive, so an eigenvalue
/// sitting exactly at `E` is not counted as lying below it.
const PIVOT_FLOOR: f64 = f64::MIN_POSITIVE / f64::EPSILON;

/// `#{eigenvalues of J_{n;F} < E}`.
pub fn eig_count(params: &JacobiParams, n: usize, e: f64) -> Result<usize> {
    params.require(n)?;
    Ok(sturm_count(params.a_slice(), params.b_slice(), n, e))
}

fn sturm_count(a: &[f64], b: &[f64], n: usize, e: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for k in 0..n {
        let coupling = if k == 0 { 0.0 } else { a[k - 1] * a[k - 1] / d };
        d = b[k] - e - coupling;
        if d == 0.0 {
            d = PIVOT_FLOOR;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Sturm counter bound to one truncation.
#[derive(Debug, Clone, Copy)]
pub struct EigCounter<'a> {
    params: &'a JacobiParams,
    n: usize,
}

impl<'a> EigCounter<'a> {
    pub fn new(params: &'a JacobiParams, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("truncation size must be at least 1".into()));
        }
        params.require(n)?;
        Ok(Self { params, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count_below(&self, e: f64) -> usize {
        sturm_count(self.params.a_slice(), self.params.b_slice(), self.n, e)
    }

    /// Gershgorin enclosure of the spectrum of `J_{n;F}`.
    pub fn bounds(&self) -> (f64, f64) {
        let (a, b) = (self.params.a_slice(), self.params.b_slice());
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..self.n {
            let left = if k > 0 { a[k - 1] } else { 0.0 };
            let right = if k + 1 < self.n { a[k] } else { 0.0 };
            lo = lo.min(b[k] - left - right);
            hi = hi.max(b[k] + left + right);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection, to absolute
    /// tolerance `tol`, starting from an enclosing bracket.
    pub fn eigenvalue(&self, k: usize, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
        debug_assert!(self.count_below(lo) <= k && self.count_below(hi) > k);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Zeros of `p_n` in `[x0 - W, x0 + W]` with the local labelling
/// `x_{-1} < x0 <= x_0 < x_1 < ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroWindow {
    pub x0: f64,
    pub n: usize,
    pub half_width: f64,
    /// Sorted zeros in the window.
    pub zeros: Vec<f64>,
    /// Position in `zeros` of `x_0^{(n)}(x0)`, the first zero `>= x0`.
    /// Equals `zeros.len()` when no window zero lies at or above `x0`.
    pub origin: usize,
}

impl ZeroWindow {
    /// `x_j^{(n)}(x0)` if it lies in the window.
    pub fn zero(&self, j: i64) -> Option<f64> {
        let pos = self.origin as i64 + j;
        if pos < 0 {
            return None;
        }
        self.zeros.get(pos as usize).copied()
    }

    /// Local labels of the stored zeros, ascending.
    pub fn labels(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.zeros.len()).map(move |i| i as i64 - self.origin as i64)
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

/// Bisection tolerance for window zeros, `1e-13 (1 + |x0|)`.
pub fn zero_tolerance(x0: f64) -> f64 {
    1e-13 * (1.0 + x0.abs())
}

/// Zeros of `p_n` in `[x0 - W, x0 + W]`. An infinite `W` returns all `n` zeros.
pub fn zeros_in_window(params: &JacobiParams, n: usize, x0: f64, half_width: f64) -> Result<ZeroWindow> {
    if !(half_width > 0.0) {
        return Err(Error::InvalidArgument(format!("window half-width {half_width} must be positive")));
    }
    let counter = EigCounter::new(params, n)?;
    let (glo, ghi) = counter.bounds();
    let pad = 1e-9 * (1.0 + glo.abs().max(ghi.abs()));
    let lo = (x0 - half_width).max(glo - pad);
    let hi = (x0 + half_width).min(ghi + pad);
    let tol = zero_tolerance(x0);
    let mut zeros = Vec::new();
    if lo <= hi {
        // eigenvalues in [lo, hi]: indices count(lo) .. count(hi+)
        let first = counter.count_below(lo);
        let hi_open = next_up(hi);
        let end = counter.count_below(hi_open);
        if end - first > MAX_WINDOW_ZEROS {
            return Err(Error::WindowTooLarge(end - first));
        }
        zeros.reserve(end - first);
        let mut bracket_lo = lo;
        for k in first..end {
            let z = counter.eigenvalue(k, bracket_lo, hi_open, tol);
            zeros.push(z);
            // the next eigenvalue is no smaller than this one
            let candidate = (z - tol).max(lo);
            bracket_lo = if counter.count_below(candidate) <= k + 1 { candidate } else { lo };
        }
    }
    let origin = zeros.partition_point(|&z| z < x0);
    Ok(ZeroWindow {
        x0,
        n,
        half_width,
        zeros,
        origin,
    })
}

fn next_up(x: f64) -> f64 {
    if x.is_infinite() {
        return x;
    }
    x + f64::EPSILON * x.abs().max(f64::MIN_POSITIVE)
}

/// All zeros of `p_n`, ascending.
pub fn all_zeros(params: &JacobiParams, n: usize) -> Result<Vec<f64>> {
    Ok(zeros_in_window(params, n, 0.0, f64::INFINITY)?.zeros)
}

/// Local spacing statistics of a window.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockStats {
    /// Label `j` of each spacing `x_{j+1} - x_j`.
    pub labels: Vec<i64>,
    /// `(x_{j+1} - x_j)/(x_1 - x_0)`.
    pub quasi_ratios: Vec<f64>,
    /// `|n (x_{j+1} - x_j) - 1/ρ|` when a reference density is supplied.
    pub strong_errors: Option<Vec<f64>>,
}

pub fn clock_stats(window: &ZeroWindow, rho_ref: Option<f64>) -> Result<ClockStats> {
    if window.len() < 4 {
        return Err(Error::InsufficientZeros {
            needed: 4,
            found: window.len(),
        });
    }
    let (z0, z1) = match (window.zero(0), window.zero(1)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::InsufficientZeros {
                needed: 4,
                found: window.len(),
            })
        }
    };
    let base = z1 - z0;
    let n = window.n as f64;
    let mut labels = Vec::with_capacity(window.len() - 1);
    let mut quasi = Vec::with_capacity(window.len() - 1);
    let mut strong = rho_ref.map(|_| Vec::with_capacity(window.len() - 1));
    for (i, pair) in window.zeros.windows(2).enumerate() {
        let gap = pair[1] - pair[0];
        labels.push(i as i64 - window.origin as i64);
        quasi.push(gap / base);
        if let (Some(errs), Some(rho)) = (strong.as_mut(), rho_ref) {
            errs.push((n * gap - 1.0 / rho).abs());
        }
    }
    Ok(ClockStats {
        labels,
        quasi_ratios: quasi,
        strong_errors: strong,
    })
}

/// Number of zeros of `p_n` in the half-open interval `[lo, hi)`.
pub fn count_in_interval(params: &JacobiParams, n: usize, lo: f64, hi: f64) -> Result<usize> {
    if n == 0 || hi <= lo {
        return Ok(0);
    }
    Ok(eig_count(params, n, hi)?.saturating_sub(eig_count(params, n, lo)?))
}

/// `|#zeros of p_n(·, ω) - #zeros of p_{n-1}(·, Sω)|` in `[lo, hi)`;
/// `params_shifted` holds the once-shifted parameters.
pub fn interlacing_defect(
    params: &JacobiParams,
    params_shifted: &JacobiParams,
    n: usize,
    interval: (f64, f64),
) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidArgument("interlacing needs n >= 1".into()));
    }
    let (lo, hi) = interval;
    let here = count_in_interval(params, n, lo, hi)?;
    let there = count_in_interval(params_shifted, n - 1, lo, hi)?;
    Ok(here.abs_diff(there))
}

/// Outcome of one Markov–Stieltjes comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovStieltjes {
    /// `μ([x_k, x_j])`
    pub lhs: f64,
    /// `Σ_{ℓ=k+1}^{j-1} 1/K_n(x_ℓ, x_ℓ)`
    pub rhs: f64,
    pub holds: bool,
}

impl MarkovStieltjes {
    /// Re-evaluates `holds` with the right side multiplied by `factor`.
    pub fn holds_with_rhs_factor(&self, factor: f64) -> bool {
        self.lhs >= self.rhs * factor - 1e-10
    }
}

/// Compares the measure of `[x_k, x_j]` with the Christoffel sums between
/// them, where `x_1 < ... < x_n` are the zeros of `p_n` (1-based).
pub fn markov_stieltjes_check(
    params: &JacobiParams,
    mu_cdf: &dyn Fn(f64) -> f64,
    n: usize,
    j: usize,
    k: usize,
) -> Result<MarkovStieltjes> {
    if j < k + 2 || k == 0 || j > n {
        return Err(Error::Index(format!("need 1 <= k, k + 2 <= j <= n; got k = {k}, j = {j}, n = {n}")));
    }
    let zeros = all_zeros(params, n)?;
    markov_stieltjes_from_zeros(params, mu_cdf, n, &zeros, j, k)
}

/// Same as [`markov_stieltjes_check`] with precomputed zeros.
pub fn markov_stieltjes_from_zeros(
    params: &JacobiParams,
    mu_cdf: &dyn Fn(f64) -> f64,
    n: usize,
    zeros: &[f64],
    j: usize,
    k: usize,
) -> Result<MarkovStieltjes> {
    if j < k + 2 || k == 0 || j > zeros.len() {
        return Err(Error::Index(format!("need 1 <= k, k + 2 <= j <= n; got k = {k}, j = {j}")));
    }
    let lhs = mu_cdf(zeros[j - 1]) - mu_cdf(zeros[k - 1]);
    let mut rhs = 0.0;
    for l in (k + 1)..j {
        let x = zeros[l - 1];
        rhs += 1.0 / kernel_with(params, x, x, n, CdCheck::Disabled)?;
    }
    Ok(MarkovStieltjes {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-10,
    })
}

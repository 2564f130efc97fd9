//! Density of states by zero counting, by the weighted Christoffel function
//! and by Kotani's formula, plus closed-form reference densities.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{m_boundary, seed_depth};
use crate::error::{Error, Result};
use crate::kernel::{kernel_with, CdCheck};
use crate::models::{realize, sample_phases, ErgodicModel, ModelKind};
use crate::zeros::EigCounter;

/// Differencing bandwidth `h = 20/n`.
pub fn bandwidth(n: usize) -> f64 {
    20.0 / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DosMethod {
    Counting,
    Kernel,
    Kotani,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DOSEstimate {
    pub method: DosMethod,
    pub n: usize,
    pub samples: usize,
    pub bandwidth: f64,
    pub grid: Vec<f64>,
    /// Integrated density `N(E)/n`.
    pub nu_cdf: Vec<f64>,
    pub rho: Vec<f64>,
}

impl DOSEstimate {
    /// Trapezoid integral of `rho` over the grid.
    pub fn mass(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.rho.windows(2))
            .map(|(g, r)| 0.5 * (g[1] - g[0]) * (r[0] + r[1]))
            .sum()
    }
}

/// Counting function interpolated linearly between consecutive eigenvalues,
/// with value `k + 1/2` at the `k`-th (0-based) eigenvalue.
fn interpolated_count(counter: &EigCounter<'_>, y: f64) -> f64 {
    let n = counter.n();
    let k = counter.count_below(y);
    if k == 0 || k == n {
        return k as f64;
    }
    // brackets grow from the typical spacing; the fraction only needs to be
    // resolved relative to the spacing
    let tol = 1e-8 / n as f64;
    let mut step = 1.0 / n as f64;
    while counter.count_below(y - step) > k - 1 {
        step *= 2.0;
    }
    let left = counter.eigenvalue(k - 1, y - step, y, tol);
    let mut step = 1.0 / n as f64;
    while counter.count_below(y + step) <= k {
        step *= 2.0;
    }
    let right = counter.eigenvalue(k, y, y + step, tol);
    let frac = if right > left { (y - left) / (right - left) } else { 0.5 };
    k as f64 - 0.5 + frac.clamp(0.0, 1.0)
}

/// `ν_n` on a sorted grid: `nu_cdf(E) = #{zeros of p_n < E}/n`, density by
/// central differences of the interpolated counting function.
pub fn dos_counting(model: &ErgodicModel, omega_shift: i64, n: usize, grid: &[f64]) -> Result<DOSEstimate> {
    check_grid(grid)?;
    let params = realize(model, omega_shift, n)?;
    let counter = EigCounter::new(&params, n)?;
    let h = bandwidth(n);
    let nf = n as f64;
    let rows: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&e| {
            let cdf = counter.count_below(e) as f64 / nf;
            let up = interpolated_count(&counter, e + h);
            let down = interpolated_count(&counter, e - h);
            (cdf, (up - down) / (2.0 * h * nf))
        })
        .collect();
    let (nu_cdf, rho) = rows.into_iter().unzip();
    Ok(DOSEstimate {
        method: DosMethod::Counting,
        n,
        samples: 1,
        bandwidth: h,
        grid: grid.to_vec(),
        nu_cdf,
        rho,
    })
}

/// Density `w(E) (1/(n+1)) K_n(E, E)` with `w = Im m(E + iε)/π`; `nu_cdf` is
/// its running trapezoid integral over the grid.
pub fn dos_kernel(model: &ErgodicModel, omega_shift: i64, n: usize, grid: &[f64], epsilon: f64) -> Result<DOSEstimate> {
    check_grid(grid)?;
    let params = realize(model, omega_shift, n)?;
    let depth = seed_depth(epsilon);
    let rho = grid
        .par_iter()
        .map(|&e| {
            let w = m_boundary(model, omega_shift, e, epsilon, depth)?.weight();
            let k = kernel_with(&params, e, e, n, CdCheck::Disabled)?;
            Ok(w * k / (n + 1) as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut nu_cdf = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    nu_cdf.push(0.0);
    for i in 1..grid.len() {
        acc += 0.5 * (grid[i] - grid[i - 1]) * (rho[i] + rho[i - 1]);
        nu_cdf.push(acc.min(1.0));
    }
    Ok(DOSEstimate {
        method: DosMethod::Kernel,
        n,
        samples: 1,
        bandwidth: 0.0,
        grid: grid.to_vec(),
        nu_cdf,
        rho,
    })
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|e| !e.is_finite()) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("energy grid must be finite and sorted".into()));
    }
    Ok(())
}

/// Maximal grid spans of length `> 5h` over which `nu_cdf` moves by less than
/// `1/(2n)`, excluding the regions below and above the spectrum.
pub fn detect_gaps(est: &DOSEstimate) -> Vec<(f64, f64)> {
    let flat = 0.5 / est.n as f64;
    let min_span = 5.0 * est.bandwidth;
    let mut gaps = Vec::new();
    let mut start = 0;
    let g = &est.grid;
    let f = &est.nu_cdf;
    for i in 1..=g.len() {
        if i == g.len() || (f[i] - f[start]).abs() >= flat {
            let end = i - 1;
            let interior = f[start] > 0.0 && f[start] < 1.0;
            if interior && g[end] - g[start] > min_span {
                gaps.push((g[start], g[end]));
            }
            start = i;
        }
    }
    gaps
}

/// Monte Carlo estimate of `ρ(x) = (1/2π) E[1/(a_0² Im m(x + iε))]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KotaniEstimate {
    pub x: f64,
    pub epsilon: f64,
    pub rho: f64,
    /// Sample standard deviation over `√samples`.
    pub stderr: f64,
    pub samples: usize,
}

/// Phase average of `|u_0⁺|²/(2π)`.
///
/// Rotation models draw `θ` uniformly, periodic models average over one
/// period of shifts, the free model needs a single evaluation and random
/// models draw shifts.
pub fn dos_kotani(model: &ErgodicModel, x: f64, epsilon: f64, phase_samples: usize, seed: u64) -> Result<KotaniEstimate> {
    if phase_samples == 0 {
        return Err(Error::InvalidArgument("phase_samples must be at least 1".into()));
    }
    let depth = seed_depth(epsilon);
    let sample = |m: &ErgodicModel, shift: i64| -> Result<f64> {
        let b = m_boundary(m, shift, x, epsilon, depth)?;
        let a0 = m.coefficient(shift).0;
        Ok(1.0 / (TAU * a0 * a0 * b.m[0].im))
    };
    let values: Vec<f64> = match &model.kind {
        ModelKind::Free => vec![sample(model, 0)?],
        ModelKind::AlmostMathieu { .. } => {
            let thetas = sample_phases(model, phase_samples, seed)?;
            thetas
                .par_iter()
                .map(|&t| sample(&model.with_theta(t)?, 0))
                .collect::<Result<_>>()?
        }
        ModelKind::Periodic { a, .. } => {
            let p = a.len() as i64;
            (0..p).into_par_iter().map(|s| sample(model, s)).collect::<Result<_>>()?
        }
        ModelKind::Anderson { .. } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let span = 1_i64 << 30;
            let shifts: Vec<i64> = (0..phase_samples).map(|_| rng.gen_range(-span..span)).collect();
            shifts.par_iter().map(|&s| sample(model, s)).collect::<Result<_>>()?
        }
    };
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let stderr = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    } else {
        0.0
    };
    Ok(KotaniEstimate {
        x,
        epsilon,
        rho: mean,
        stderr,
        samples: values.len(),
    })
}

/// Equilibrium density of `[a, b]`, `1/(π √((x - a)(b - x)))`.
pub fn equilibrium_density((a, b): (f64, f64), x: f64) -> Result<f64> {
    if !(a < x && x < b) {
        return Err(Error::Domain(format!("x = {x} is not inside ({a}, {b})")));
    }
    Ok(1.0 / (PI * ((x - a) * (b - x)).sqrt()))
}

/// Distribution function of the equilibrium measure of `[-2, 2]`.
pub fn arcsine_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + (x / 2.0).asin() / PI
    }
}

/// Distribution function of the semicircle `√(4 - t²)/(2π) dt`, the spectral
/// measure of free Jacobi parameters.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
    }
}

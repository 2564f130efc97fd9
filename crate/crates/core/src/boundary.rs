//! Boundary values of m-functions along a shift orbit, Deift–Simon waves and
//! the Cesàro averages built from them.
//!
//! `m(z, ω) = 1/(-z + b_1(ω) - a_1(ω)² m(z, Sω))` is iterated backward from
//! a Herglotz seed far out along the orbit. At `Im z = ε > 0` the map is a
//! strict contraction of the upper half plane, so the seed is forgotten after
//! roughly `1/ε` steps.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jacobi::evaluate_polys;
use crate::models::{realize, ErgodicModel};

/// Default `ε` schedule for boundary-value extrapolation.
pub const EPSILON_SCHEDULE: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Relative disagreement above which the extrapolated value is not trusted.
pub const EXTRAPOLATION_TOLERANCE: f64 = 0.01;

/// Largest orbit held in memory, about 0.8 GB of m-values.
pub const MAX_ORBIT_DEPTH: usize = 50_000_000;

/// Orbit steps needed at `Im z = ε` to forget the seed.
pub fn seed_depth(epsilon: f64) -> usize {
    (20.0 / epsilon).ceil() as usize
}

/// m-values `m(x + iε, S^j ω)` for `j = 0..=depth`, with `ω = S^shift ω_0`.
///
/// Shifts `0..=window` are propagated at the real energy `x`; the remaining
/// tail uses `x + iε`. With `window = 0` the whole orbit sits at `x + iε`.
#[derive(Debug, Clone, PartialEq)]
pub struct MBoundary {
    pub x: f64,
    pub epsilon: f64,
    pub shift: i64,
    pub window: usize,
    pub m: Vec<Complex64>,
}

impl MBoundary {
    pub fn depth(&self) -> usize {
        self.m.len() - 1
    }

    /// `m` at `S^j ω`.
    pub fn at(&self, j: usize) -> Complex64 {
        self.m[j]
    }

    /// Weight estimate `Im m / π` at `S^j ω`.
    pub fn w(&self, j: usize) -> f64 {
        self.m[j].im / std::f64::consts::PI
    }

    /// `φ = -Arg(-m)`, in `(0, π)` whenever `Im m > 0`.
    pub fn phi(&self, j: usize) -> f64 {
        -(-self.m[j]).arg()
    }

    pub fn weight(&self) -> f64 {
        self.w(0)
    }
}

/// Upper-half-plane root of `a² m² + (z - b) m + 1 = 0`, the fixed point of
/// the recursion with constant coefficients.
pub fn free_field_m(z: Complex64, a: f64, b: f64) -> Complex64 {
    let c = z - b;
    let disc = (c * c - 4.0 * a * a).sqrt();
    let r1 = (-c + disc) / (2.0 * a * a);
    let r2 = (-c - disc) / (2.0 * a * a);
    if r1.im >= r2.im {
        r1
    } else {
        r2
    }
}

/// m-orbit at `x + iε` over shifts `0..=depth`.
pub fn m_boundary(model: &ErgodicModel, omega_shift: i64, x: f64, epsilon: f64, depth: usize) -> Result<MBoundary> {
    orbit(model, omega_shift, x, epsilon, depth, 0)
}

/// m-orbit whose first `window` shifts obey the recursion at the real energy
/// exactly, preceded by a regularizing tail of [`seed_depth`] steps at
/// `x + iε`. This is the orbit Deift–Simon waves are built from.
pub fn boundary_orbit(model: &ErgodicModel, omega_shift: i64, x: f64, epsilon: f64, window: usize) -> Result<MBoundary> {
    let depth = window.saturating_add(seed_depth(epsilon));
    orbit(model, omega_shift, x, epsilon, depth, window)
}

fn orbit(model: &ErgodicModel, shift: i64, x: f64, epsilon: f64, depth: usize, window: usize) -> Result<MBoundary> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
    }
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("x = {x} is not finite")));
    }
    if depth == 0 || depth > MAX_ORBIT_DEPTH {
        return Err(Error::InvalidArgument(format!(
            "orbit depth {depth} is outside 1..={MAX_ORBIT_DEPTH}"
        )));
    }
    model.validate()?;
    model.check_range(shift, shift + depth as i64 + 1)?;
    let z_reg = Complex64::new(x, epsilon);
    let z_real = Complex64::new(x, 0.0);
    let mut m = vec![Complex64::new(0.0, 0.0); depth + 1];
    let (a_tail, b_tail) = model.coefficient(shift + depth as i64 + 1);
    m[depth] = free_field_m(z_reg, a_tail, b_tail);
    for j in (0..depth).rev() {
        let z = if j < window { z_real } else { z_reg };
        let (a1, b1) = model.coefficient(shift + j as i64 + 1);
        let v = 1.0 / (-z + b1 - a1 * a1 * m[j + 1]);
        if !(v.im > 0.0 && v.re.is_finite()) {
            return Err(Error::HerglotzViolation { shift: j, im: v.im });
        }
        m[j] = v;
    }
    Ok(MBoundary {
        x,
        epsilon,
        shift,
        window,
        m,
    })
}

/// Boundary value `m(x + i0, ω)` extrapolated linearly in `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolated {
    pub schedule: Vec<f64>,
    pub raw: Vec<Complex64>,
    pub extrapolated: Complex64,
    pub converged: bool,
    /// `Im m` moves monotonically along the schedule.
    pub monotone: bool,
}

impl Extrapolated {
    /// The extrapolated value when converged, else the smallest-`ε` value.
    pub fn best(&self) -> Complex64 {
        if self.converged {
            self.extrapolated
        } else {
            *self.raw.last().expect("nonempty schedule")
        }
    }
}

/// Runs [`m_boundary`] at each `ε` of `schedule` (decreasing) and
/// extrapolates the two smallest to `ε = 0`.
pub fn m_extrapolated(model: &ErgodicModel, omega_shift: i64, x: f64, schedule: &[f64]) -> Result<Extrapolated> {
    if schedule.len() < 2 || schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("schedule needs at least two strictly decreasing epsilons".into()));
    }
    let raw = schedule
        .iter()
        .map(|&eps| m_boundary(model, omega_shift, x, eps, seed_depth(eps)).map(|b| b.m[0]))
        .collect::<Result<Vec<_>>>()?;
    let k = raw.len();
    let (e1, e2) = (schedule[k - 2], schedule[k - 1]);
    let (m1, m2) = (raw[k - 2], raw[k - 1]);
    let extrapolated = m2 - (m1 - m2) * (e2 / (e1 - e2));
    let converged = (extrapolated - m2).norm() <= EXTRAPOLATION_TOLERANCE * m2.norm() && extrapolated.im > 0.0;
    let diffs: Vec<f64> = raw.windows(2).map(|w| w[1].im - w[0].im).collect();
    let monotone = diffs.iter().all(|d| *d >= 0.0) || diffs.iter().all(|d| *d <= 0.0);
    Ok(Extrapolated {
        schedule: schedule.to_vec(),
        raw,
        extrapolated,
        converged,
        monotone,
    })
}

/// The Deift–Simon solution `u⁺` at a real energy.
#[derive(Debug, Clone, PartialEq)]
pub struct DeiftSimonWave {
    pub x: f64,
    /// `u_0⁺ .. u_{n+1}⁺`.
    pub u_plus: Vec<Complex64>,
    /// `s_0 = 0, s_1 .. s_n`.
    pub s: Vec<f64>,
    /// `(u_0⁺, u_1⁺)`.
    pub seeds: (Complex64, Complex64),
    /// `a_0 .. a_{n+1}` of the realized parameters.
    a: Vec<f64>,
    /// `1/(a_k √Im m(S^k ω))` for `k = 0..=n`, i.e. `u_0⁺(S^k ω)`.
    shifted_seed: Vec<f64>,
}

impl DeiftSimonWave {
    pub fn n(&self) -> usize {
        self.s.len() - 1
    }

    /// `u_n⁻ = conj(u_n⁺)`.
    pub fn u_minus(&self, k: usize) -> Complex64 {
        self.u_plus[k].conj()
    }

    /// `u_0⁺(S^k ω)`.
    pub fn shifted_seed(&self, k: usize) -> f64 {
        self.shifted_seed[k]
    }

    /// `max_k |a_k(u_{k+1} ū_k - ū_{k+1} u_k) + 2i|` over `k = 0..=n`.
    pub fn wronskian_error(&self) -> f64 {
        let two_i = Complex64::new(0.0, 2.0);
        (0..=self.n())
            .map(|k| {
                let (u, v) = (self.u_plus[k], self.u_plus[k + 1]);
                (self.a[k] * (v * u.conj() - v.conj() * u) + two_i).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max_k |u_k e^{i s_k} - u_0⁺(S^k ω)| / |u_0⁺(S^k ω)|` over `k = 0..=n`.
    pub fn phase_factorization_error(&self) -> f64 {
        (0..=self.n())
            .map(|k| {
                let lhs = self.u_plus[k] * Complex64::from_polar(1.0, self.s[k]);
                let rhs = self.shifted_seed[k];
                (lhs - rhs).norm() / rhs.abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Builds `u⁺` for `k = 0..=n+1` at real `x` from a boundary orbit.
pub fn deift_simon_wave(model: &ErgodicModel, omega_shift: i64, x: f64, epsilon: f64, n: usize) -> Result<DeiftSimonWave> {
    let orbit = boundary_orbit(model, omega_shift, x, epsilon, n + 1)?;
    wave_from_orbit(model, &orbit, n)
}

/// As [`deift_simon_wave`], reusing an orbit with at least `n + 1` shifts.
pub fn wave_from_orbit(model: &ErgodicModel, orbit: &MBoundary, n: usize) -> Result<DeiftSimonWave> {
    if orbit.depth() < n + 1 {
        return Err(Error::ParameterExhaustion {
            requested: n + 1,
            available: orbit.depth(),
        });
    }
    let shift = orbit.shift;
    model.check_range(shift, shift + n as i64 + 1)?;
    let coef: Vec<(f64, f64)> = (0..=n as i64 + 1).map(|k| model.coefficient(shift + k)).collect();
    let a: Vec<f64> = coef.iter().map(|c| c.0).collect();

    let m0 = orbit.m[0];
    let root = m0.im.sqrt();
    let u0 = Complex64::new(1.0 / (a[0] * root), 0.0);
    let u1 = -m0 / root;

    let mut u = Vec::with_capacity(n + 2);
    u.push(u0);
    u.push(u1);
    for k in 1..=n {
        let (ak, bk) = coef[k];
        let next = ((orbit.x - bk) * u[k] - a[k - 1] * u[k - 1]) / ak;
        u.push(next);
    }

    let mut s = Vec::with_capacity(n + 1);
    s.push(0.0);
    for j in 1..=n {
        let phi = orbit.phi(j - 1);
        // Im m below rounding relative to |m|: x sits in a gap of this orbit
        if !(phi > 0.0 && phi < std::f64::consts::PI) {
            return Err(Error::HerglotzViolation {
                shift: j - 1,
                im: orbit.m[j - 1].im,
            });
        }
        s.push(s[j - 1] + phi);
    }
    let shifted_seed = (0..=n).map(|k| 1.0 / (a[k] * orbit.m[k].im.sqrt())).collect();

    Ok(DeiftSimonWave {
        x: orbit.x,
        u_plus: u,
        s,
        seeds: (u0, u1),
        a,
        shifted_seed,
    })
}

/// `p_j = Im u⁺_{j+1} / Im u⁺_1` for `j = 0..=n`.
pub fn recover_p_from_u(wave: &DeiftSimonWave, n: usize) -> Result<Vec<f64>> {
    if n + 1 >= wave.u_plus.len() {
        return Err(Error::ParameterExhaustion {
            requested: n,
            available: wave.u_plus.len().saturating_sub(2),
        });
    }
    let d = wave.u_plus[1].im;
    if d == 0.0 {
        return Err(Error::DegenerateNormalization);
    }
    Ok(wave.u_plus[1..=n + 1].iter().map(|u| u.im / d).collect())
}

/// Cesàro averages along one orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct CesaroAverages {
    pub n: usize,
    /// `(1/(n+1)) Σ_{j=0}^{n} p_j²`.
    pub avg_p2: f64,
    /// `(1/(n+1)) Σ_{j=0}^{n} q_j²`.
    pub avg_q2: f64,
    /// `(1/n) Σ_{j=1}^{n} (Im u_j⁺)²`.
    pub avg_im_u2: f64,
    /// `(1/n) Σ_{j=1}^{n} (u_j⁺)²`.
    pub avg_u2: Complex64,
    /// `avg_im_u2 / π`.
    pub rho_l: f64,
    /// Weight estimate `Im m(x + i0, ω)/π` at the base point.
    pub weight: f64,
    /// `1 - s_n/(nπ)`, the rotation-number estimate of `ν((-∞, x])`.
    pub ids_from_rotation: f64,
}

impl CesaroAverages {
    pub fn r(&self) -> f64 {
        self.avg_u2.re
    }

    pub fn i(&self) -> f64 {
        self.avg_u2.im
    }

    /// `w · (1/(n+1)) K_n(x, x)`, the kernel-side density.
    pub fn kernel_density(&self) -> f64 {
        self.weight * self.avg_p2
    }
}

pub fn cesaro_averages(model: &ErgodicModel, omega_shift: i64, x: f64, epsilon: f64, n: usize) -> Result<CesaroAverages> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let wave = deift_simon_wave(model, omega_shift, x, epsilon, n)?;
    let params = realize(model, omega_shift, n)?;
    let polys = evaluate_polys(&params, x, n)?;
    let scale = (2.0 * polys.scale_log).exp();
    let denom = (n + 1) as f64;
    let avg_p2 = polys.p.iter().map(|v| v * v).sum::<f64>() * scale / denom;
    let avg_q2 = polys.q.iter().map(|v| v * v).sum::<f64>() * scale / denom;
    let mut sum_im = 0.0;
    let mut sum_sq = Complex64::new(0.0, 0.0);
    for u in &wave.u_plus[1..=n] {
        sum_im += u.im * u.im;
        sum_sq += u * u;
    }
    let avg_im_u2 = sum_im / n as f64;
    let weight = wave.u_plus[1].im.powi(2) / std::f64::consts::PI;
    Ok(CesaroAverages {
        n,
        avg_p2,
        avg_q2,
        avg_im_u2,
        avg_u2: sum_sq / n as f64,
        rho_l: avg_im_u2 / std::f64::consts::PI,
        weight,
        ids_from_rotation: 1.0 - wave.s[n] / (n as f64 * std::f64::consts::PI),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::GOLDEN_MEAN;
    use std::f64::consts::PI;

    fn amo(theta: f64) -> ErgodicModel {
        ErgodicModel::almost_mathieu(0.5, GOLDEN_MEAN, theta).unwrap()
    }

    #[test]
    fn degenerate_epsilon_is_an_error() {
        let model = ErgodicModel::free();
        for eps in [0.0, -1.0, f64::NAN, 1e-12] {
            assert!(matches!(boundary_orbit(&model, 0, 0.3, eps, 10), Err(Error::InvalidArgument(_))));
        }
    }

    #[test]
    fn free_field_at_i() {
        let m = free_field_m(Complex64::new(0.0, 1.0), 1.0, 0.0);
        assert!((m - Complex64::new(0.0, (5f64.sqrt() - 1.0) / 2.0)).norm() < 1e-15);
        let b = m_boundary(&ErgodicModel::free(), 0, 0.0, 1.0, 5).unwrap();
        assert!((b.m[0] - m).norm() < 1e-14);
    }

    #[test]
    fn free_weight_at_origin() {
        let b = m_boundary(&ErgodicModel::free(), 0, 0.0, 1e-6, 10).unwrap();
        assert!((b.m[0] - Complex64::new(0.0, 1.0)).norm() < 1e-5);
        assert!((b.weight() - 1.0 / PI).abs() < 1e-5);
        assert!((b.phi(0) - PI / 2.0).abs() < 1e-5);
    }

    #[test]
    fn depth_doubling() {
        let m = amo(0.3);
        let eps = 1e-3;
        let d = seed_depth(eps);
        let b1 = m_boundary(&m, 0, 0.4, eps, d).unwrap();
        let b2 = m_boundary(&m, 0, 0.4, eps, 2 * d).unwrap();
        assert!((b1.m[0] - b2.m[0]).norm() < 1e-10);
    }

    #[test]
    fn herglotz_along_orbit() {
        let b = m_boundary(&amo(1.7), 3, -0.8, 1e-2, 3000).unwrap();
        assert!(b.m.iter().all(|m| m.im > 0.0));
        for j in 0..20 {
            let phi = b.phi(j);
            assert!(phi > 0.0 && phi < PI);
        }
    }

    #[test]
    fn rejects_bad_epsilon() {
        assert!(m_boundary(&ErgodicModel::free(), 0, 0.0, 0.0, 5).is_err());
        assert!(m_boundary(&ErgodicModel::free(), 0, 0.0, 1e-2, 0).is_err());
    }

    #[test]
    fn extrapolation_free() {
        let e = m_extrapolated(&ErgodicModel::free(), 0, 1.0, &EPSILON_SCHEDULE).unwrap();
        assert!(e.converged);
        assert!(e.monotone);
        let exact = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
        assert!((e.best() - exact).norm() < 1e-6);
        assert!((e.raw[2] - exact).norm() > (e.extrapolated - exact).norm());
    }

    #[test]
    fn free_wave_at_origin() {
        let w = deift_simon_wave(&ErgodicModel::free(), 0, 0.0, 1e-6, 12).unwrap();
        for (k, u) in w.u_plus.iter().enumerate() {
            let expect = Complex64::from_polar(1.0, -(k as f64) * PI / 2.0);
            assert!((u - expect).norm() < 1e-5, "k={k}: {u}");
        }
        assert!((w.s[4] - 2.0 * PI).abs() < 1e-5);
        let p = recover_p_from_u(&w, 8).unwrap();
        let expect = [1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0];
        for (a, b) in p.iter().zip(expect) {
            assert!((a - b).abs() < 1e-5);
        }
        assert_eq!(p[0], 1.0);
    }

    #[test]
    fn wave_contracts_almost_mathieu() {
        let m = amo(0.9);
        let n = 2000;
        let w = deift_simon_wave(&m, 0, 0.3, 1e-4, n).unwrap();
        assert!(w.seeds.0.im == 0.0);
        assert!(w.wronskian_error() < 1e-8);
        assert!(w.phase_factorization_error() < 1e-6);
        let p = recover_p_from_u(&w, n).unwrap();
        let params = realize(&m, 0, n).unwrap();
        let direct = evaluate_polys(&params, 0.3, n).unwrap();
        for (j, pj) in p.iter().enumerate().skip(1) {
            let norm = (direct.p[j].powi(2) + (params.a(j) * direct.p[j - 1]).powi(2)).sqrt();
            assert!((pj - direct.p[j]).abs() < 1e-6 * norm);
        }
    }

    #[test]
    fn free_cesaro_at_origin() {
        let c = cesaro_averages(&ErgodicModel::free(), 0, 0.0, 1e-6, 4000).unwrap();
        assert!((c.avg_im_u2 - 0.5).abs() < 1e-3);
        assert!((c.rho_l - 1.0 / (2.0 * PI)).abs() < 1e-3);
        assert!(c.avg_u2.norm() < 1e-3);
        assert!((c.avg_p2 - 0.5).abs() < 1e-3);
        assert!((c.ids_from_rotation - 0.5).abs() < 1e-3);
    }

    #[test]
    fn rotation_tracks_integrated_density() {
        // arcsine distribution function at x = 1 is 2/3
        let c = cesaro_averages(&ErgodicModel::free(), 0, 1.0, 1e-6, 3000).unwrap();
        assert!((c.ids_from_rotation - 2.0 / 3.0).abs() < 1e-3);
        assert!((c.kernel_density() - c.rho_l).abs() < 1e-2 * c.rho_l);
    }
}

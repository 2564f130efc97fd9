//! Ergodic families of Jacobi parameters `a_n(ω) = A(S^{n-1}ω)`,
//! `b_n(ω) = B(S^{n-1}ω)`.
//!
//! Coefficients are addressed by an absolute integer index `k`, with
//! `coefficient(k) = (a_k(ω), b_k(ω))`. Shifting `ω` by `s` moves the index
//! by `s`, and `k = 0` gives the `a_0(ω) = A(S^{-1}ω)` needed for two-sided
//! constructions.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::JacobiParams;

/// `(√5 - 1)/2`.
pub const GOLDEN_MEAN: f64 = 0.618_033_988_749_894_9;

/// Default generation range, large enough for any desk-scale run.
pub const DEFAULT_RANGE: (i64, i64) = (-(1 << 40), 1 << 40);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// `a ≡ 1`, `b ≡ 0`.
    Free,
    /// `a_k = a[(k-1) mod p]`, `b_k = b[(k-1) mod p]`.
    Periodic { a: Vec<f64>, b: Vec<f64> },
    /// `a ≡ 1`, `b_k = 2λ cos(παk + θ)`.
    AlmostMathieu { lambda: f64, alpha: f64, theta: f64 },
    /// `a ≡ 1`, `b_k` i.i.d. uniform on `[-W/2, W/2]`.
    Anderson { coupling: f64, seed: Option<u64> },
}

/// A model plus the two-sided index range it may be realized on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicModel {
    pub kind: ModelKind,
    pub n_min: i64,
    pub n_max: i64,
}

impl ErgodicModel {
    pub fn new(kind: ModelKind) -> Result<Self> {
        let model = Self {
            kind,
            n_min: DEFAULT_RANGE.0,
            n_max: DEFAULT_RANGE.1,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn free() -> Self {
        Self::new(ModelKind::Free).expect("free model is valid")
    }

    pub fn almost_mathieu(lambda: f64, alpha: f64, theta: f64) -> Result<Self> {
        Self::new(ModelKind::AlmostMathieu { lambda, alpha, theta })
    }

    pub fn periodic(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        Self::new(ModelKind::Periodic { a, b })
    }

    pub fn anderson(coupling: f64, seed: u64) -> Result<Self> {
        Self::new(ModelKind::Anderson {
            coupling,
            seed: Some(seed),
        })
    }

    pub fn with_range(mut self, n_min: i64, n_max: i64) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::InvalidArgument(format!("empty generation range [{n_min}, {n_max}]")));
        }
        self.n_min = n_min;
        self.n_max = n_max;
        Ok(self)
    }

    /// Same family with phase `θ` replaced (almost Mathieu only).
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        match &self.kind {
            ModelKind::AlmostMathieu { lambda, alpha, .. } => Ok(Self {
                kind: ModelKind::AlmostMathieu {
                    lambda: *lambda,
                    alpha: *alpha,
                    theta,
                },
                ..self.clone()
            }),
            other => Err(Error::UnsupportedModel(format!("{other:?} has no rotation phase"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ModelKind::Free => Ok(()),
            ModelKind::Periodic { a, b } => {
                if a.is_empty() || a.len() != b.len() {
                    return Err(Error::InvalidParams("periodic tables must be nonempty and of equal length".into()));
                }
                if a.iter().any(|v| !(v.is_finite() && *v > 0.0)) || b.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParams("periodic tables need positive a and finite b".into()));
                }
                Ok(())
            }
            ModelKind::AlmostMathieu { lambda, alpha, theta } => {
                if [lambda, alpha, theta].iter().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::InvalidParams("almost Mathieu parameters must be finite".into()))
                }
            }
            ModelKind::Anderson { coupling, seed } => {
                if !coupling.is_finite() {
                    return Err(Error::InvalidParams("coupling must be finite".into()));
                }
                if seed.is_none() {
                    return Err(Error::SeedRequired);
                }
                Ok(())
            }
        }
    }

    /// `(a_k(ω), b_k(ω))` for any integer `k`.
    pub fn coefficient(&self, k: i64) -> (f64, f64) {
        match &self.kind {
            ModelKind::Free => (1.0, 0.0),
            ModelKind::Periodic { a, b } => {
                let i = (k - 1).rem_euclid(a.len() as i64) as usize;
                (a[i], b[i])
            }
            ModelKind::AlmostMathieu { lambda, alpha, theta } => {
                (1.0, 2.0 * lambda * (PI * alpha * k as f64 + theta).cos())
            }
            ModelKind::Anderson { coupling, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or_default());
                rng.set_stream(k as u64);
                let u: f64 = rng.gen();
                (1.0, coupling * (u - 0.5))
            }
        }
    }

    /// Lower bound on `a` over the whole family.
    pub fn alpha_minus(&self) -> f64 {
        match &self.kind {
            ModelKind::Periodic { a, .. } => a.iter().copied().fold(f64::INFINITY, f64::min),
            _ => 1.0,
        }
    }

    /// Upper bound on `|b|` over the whole family.
    pub fn beta_bound(&self) -> f64 {
        match &self.kind {
            ModelKind::Free => 0.0,
            ModelKind::Periodic { b, .. } => b.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
            ModelKind::AlmostMathieu { lambda, .. } => 2.0 * lambda.abs(),
            ModelKind::Anderson { coupling, .. } => 0.5 * coupling.abs(),
        }
    }

    pub fn alpha_plus(&self) -> f64 {
        match &self.kind {
            ModelKind::Periodic { a, .. } => a.iter().copied().fold(0.0, f64::max),
            _ => 1.0,
        }
    }

    /// Whether `realize` gives the same parameters for every shift.
    pub fn is_shift_invariant(&self) -> bool {
        match &self.kind {
            ModelKind::Free => true,
            ModelKind::Periodic { a, .. } => a.len() == 1,
            ModelKind::AlmostMathieu { lambda, .. } => *lambda == 0.0,
            ModelKind::Anderson { coupling, .. } => *coupling == 0.0,
        }
    }

    /// Errors unless indices `lo..=hi` lie in the generation range.
    pub fn check_range(&self, lo: i64, hi: i64) -> Result<()> {
        if lo < self.n_min || hi > self.n_max {
            Err(Error::OutOfRange {
                lo,
                hi,
                min: self.n_min,
                max: self.n_max,
            })
        } else {
            Ok(())
        }
    }
}

/// Parameters `{a_j(S^k ω), b_j(S^k ω)}_{j=1}^{n}`.
pub fn realize(model: &ErgodicModel, omega_shift: i64, n: usize) -> Result<JacobiParams> {
    model.validate()?;
    model.check_range(omega_shift + 1, omega_shift + n as i64)?;
    let (a, b): (Vec<f64>, Vec<f64>) = (1..=n as i64).map(|j| model.coefficient(omega_shift + j)).unzip();
    JacobiParams::new(a, b)
}

/// `count` i.i.d. uniform phases in `[0, 2π)` for a rotation model.
pub fn sample_phases(model: &ErgodicModel, count: usize, seed: u64) -> Result<Vec<f64>> {
    if !matches!(model.kind, ModelKind::AlmostMathieu { .. }) {
        return Err(Error::UnsupportedModel("phase sampling needs a rotation (almost Mathieu) model".into()));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("phase count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| rng.gen_range(0.0..TAU)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn almost_mathieu_first_coefficient() {
        let m = ErgodicModel::almost_mathieu(0.5, GOLDEN_MEAN, 0.0).unwrap();
        let p = realize(&m, 0, 5).unwrap();
        let expect = (PI * GOLDEN_MEAN).cos();
        assert!((p.b(1) - expect).abs() < 1e-15);
        assert!((p.b(1) + 0.3623).abs() < 1e-4);
        assert!(p.a_slice().iter().all(|&a| a == 1.0));
        assert!(p.beta() <= 1.0);
    }

    #[test]
    fn period_one_is_free() {
        let m = ErgodicModel::periodic(vec![1.0], vec![0.0]).unwrap();
        for shift in [-7, 0, 3] {
            assert_eq!(realize(&m, shift, 10).unwrap(), JacobiParams::free(10));
        }
    }

    #[test]
    fn shift_consistency() {
        let models = [
            ErgodicModel::almost_mathieu(0.7, GOLDEN_MEAN, 1.1).unwrap(),
            ErgodicModel::periodic(vec![1.0, 0.5, 2.0], vec![0.1, -0.3, 0.0]).unwrap(),
            ErgodicModel::anderson(2.0, 17).unwrap(),
        ];
        for m in &models {
            let k = 4;
            let base = realize(m, 0, 20 + k as usize).unwrap();
            let shifted = realize(m, k, 20).unwrap();
            for j in 1..=20 {
                assert_eq!(shifted.a(j), base.a(j + k as usize));
                assert_eq!(shifted.b(j), base.b(j + k as usize));
            }
        }
    }

    #[test]
    fn anderson_needs_seed() {
        let err = ErgodicModel::new(ModelKind::Anderson {
            coupling: 1.0,
            seed: None,
        })
        .unwrap_err();
        assert_eq!(err, Error::SeedRequired);
    }

    #[test]
    fn anderson_is_reproducible_and_bounded() {
        let m = ErgodicModel::anderson(3.0, 99).unwrap();
        let p1 = realize(&m, -5, 100).unwrap();
        let p2 = realize(&m, -5, 100).unwrap();
        assert_eq!(p1, p2);
        assert!(p1.beta() <= 1.5);
    }

    #[test]
    fn out_of_range() {
        let m = ErgodicModel::free().with_range(0, 10).unwrap();
        assert!(realize(&m, 0, 10).is_ok());
        assert!(matches!(realize(&m, 1, 10), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn phases() {
        let m = ErgodicModel::almost_mathieu(0.5, GOLDEN_MEAN, 0.0).unwrap();
        assert_eq!(sample_phases(&m, 1, 7).unwrap(), sample_phases(&m, 1, 7).unwrap());
        assert!(sample_phases(&m, 0, 7).is_err());
        assert!(matches!(sample_phases(&ErgodicModel::free(), 3, 7), Err(Error::UnsupportedModel(_))));
        let th = sample_phases(&m, 10_000, 3).unwrap();
        assert!(th.iter().all(|t| (0.0..TAU).contains(t)));
        let (c, s) = th.iter().fold((0.0, 0.0), |(c, s), t| (c + t.cos(), s + t.sin()));
        let modulus = (c * c + s * s).sqrt() / th.len() as f64;
        assert!(modulus < 0.05);
    }

    #[test]
    fn weyl_average_of_potential() {
        let n = 10_000;
        let m = ErgodicModel::almost_mathieu(0.5, GOLDEN_MEAN, 0.4).unwrap();
        let p = realize(&m, 0, n).unwrap();
        let mean = p.b_slice().iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 10.0 / n as f64);
    }
}

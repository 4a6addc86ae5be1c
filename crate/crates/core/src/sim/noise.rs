// SPDX-License-Identifier: MIT OR Apache-2.0

//! The four noise processes used in the simulations.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{CpError, Result};

/// Samples discarded before an autoregressive path is recorded.
pub const BURN_IN: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NoiseKind {
    /// iid `N(0, sigma^2)`.
    N1,
    /// iid `t_5 * sigma * sqrt(0.6)`, unit variance when `sigma = 1`.
    N2,
    /// Gaussian AR(1).
    N3,
    /// AR(1) with `t_5` innovations.
    N4,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 4] = [NoiseKind::N1, NoiseKind::N2, NoiseKind::N3, NoiseKind::N4];

    pub fn code(self) -> u64 {
        match self {
            NoiseKind::N1 => 1,
            NoiseKind::N2 => 2,
            NoiseKind::N3 => 3,
            NoiseKind::N4 => 4,
        }
    }

    pub fn is_dependent(self) -> bool {
        matches!(self, NoiseKind::N3 | NoiseKind::N4)
    }
}

impl std::fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = CpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "N1" => Ok(NoiseKind::N1),
            "N2" => Ok(NoiseKind::N2),
            "N3" => Ok(NoiseKind::N3),
            "N4" => Ok(NoiseKind::N4),
            _ => Err(CpError::param("noise", format!("unknown noise kind `{s}`"))),
        }
    }
}

/// Innovation variance of the Gaussian AR(1) process.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ar1Variance {
    /// `sigma^2 / (1 - phi^2)`.
    #[default]
    Inflated,
    /// `sigma^2 (1 - phi^2)`, so the process has marginal variance `sigma^2`.
    Stationary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub sigma: f64,
    pub phi: f64,
    #[serde(default)]
    pub ar1_variance: Ar1Variance,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, sigma: f64, seed: u64) -> Self {
        Self {
            kind,
            sigma,
            phi: 0.5,
            ar1_variance: Ar1Variance::Inflated,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(CpError::param("sigma", format!("must be positive, got {}", self.sigma)));
        }
        if !(self.phi.abs() < 1.0) {
            return Err(CpError::param("phi", format!("must lie in (-1, 1), got {}", self.phi)));
        }
        Ok(())
    }

    /// Standard deviation of one innovation (or of one draw for iid kinds).
    pub fn innovation_sd(&self) -> f64 {
        let s = self.sigma;
        let one_minus = 1.0 - self.phi * self.phi;
        match (self.kind, self.ar1_variance) {
            (NoiseKind::N1, _) => s,
            (NoiseKind::N2, _) => s * 0.6f64.sqrt(),
            (NoiseKind::N3, Ar1Variance::Inflated) => s / one_minus.sqrt(),
            (NoiseKind::N3, Ar1Variance::Stationary) => s * one_minus.sqrt(),
            (NoiseKind::N4, _) => s * (0.6 / one_minus).sqrt(),
        }
    }

    /// Long-run standard deviation `tau` of the process.
    pub fn long_run_sd(&self) -> f64 {
        match self.kind {
            NoiseKind::N1 | NoiseKind::N2 => self.innovation_sd(),
            NoiseKind::N3 | NoiseKind::N4 => self.innovation_sd() / (1.0 - self.phi),
        }
    }
}

/// Draws `n` noise values with a generator seeded from `spec.seed`.
pub fn gen_noise(spec: &NoiseSpec, n: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(gen_noise_with(spec, n, &mut rng))
}

/// Draws `n` noise values from `rng`; `spec.seed` is ignored.
pub fn gen_noise_with<R: Rng + ?Sized>(spec: &NoiseSpec, n: usize, rng: &mut R) -> Vec<f64> {
    let sd = spec.innovation_sd();
    let t5 = StudentT::new(5.0).expect("valid degrees of freedom");
    let innovation = |rng: &mut R| -> f64 {
        match spec.kind {
            NoiseKind::N1 | NoiseKind::N3 => {
                let z: f64 = StandardNormal.sample(rng);
                sd * z
            }
            NoiseKind::N2 | NoiseKind::N4 => sd * t5.sample(rng),
        }
    };
    if !spec.kind.is_dependent() {
        return (0..n).map(|_| innovation(rng)).collect();
    }
    let mut x = 0.0;
    for _ in 0..BURN_IN {
        x = spec.phi * x + innovation(rng);
    }
    (0..n)
        .map(|_| {
            x = spec.phi * x + innovation(rng);
            x
        })
        .collect()
}

//! Randomized cross-checks of the closed forms against the lattice oracle.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::oracle::{compare_all, solve_all};
use crate::result::ScatteringResult;
use crate::threeport::{smatrix_three_port, smatrix_three_port_closed_form, ThreePortSystem};
use crate::twoport::{smatrix_two_port, TwoPortSystem};
use crate::waveguide::{CrwParams, NodeParams};

/// Chain length used by the oracle during verification.
pub const ORACLE_SITES: usize = 10;

/// Deterministic generator of random junctions with an in-band energy for chain a.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    fn crw(&mut self) -> CrwParams {
        CrwParams {
            omega: self.uniform(-0.5, 0.5),
            xi: self.uniform(0.5, 2.0),
        }
    }

    /// Energy with `k_a` drawn from `[0.05π, 0.95π]`.
    fn energy(&mut self, crw: &CrwParams) -> f64 {
        crw.energy_unchecked(self.uniform(0.05 * PI, 0.95 * PI))
    }

    pub fn two_port(&mut self) -> (TwoPortSystem, f64) {
        let (a, b) = (self.crw(), self.crw());
        let node = NodeParams {
            j_ab: self.uniform(0.0, 2.0),
            j_bc: self.uniform(0.1, 2.0),
            j_ca: self.uniform(0.1, 2.0),
            phi: self.uniform(0.0, TAU),
            omega_c: self.uniform(-1.0, 1.0),
            gamma: self.uniform(0.0, 3.0),
        };
        let sys = TwoPortSystem::new(a, b, node).expect("sampled parameters are valid");
        let energy = self.energy(&a);
        (sys, energy)
    }

    pub fn three_port(&mut self) -> (ThreePortSystem, f64) {
        let (a, b, c) = (self.crw(), self.crw(), self.crw());
        let node = NodeParams {
            j_ab: self.uniform(0.0, 2.0),
            j_bc: self.uniform(0.1, 2.0),
            j_ca: self.uniform(0.1, 2.0),
            phi: self.uniform(0.0, TAU),
            omega_c: 0.0,
            gamma: 0.0,
        };
        let sys = ThreePortSystem::new(a, b, c, node).expect("sampled parameters are valid");
        let energy = self.energy(&a);
        (sys, energy)
    }

    /// Three-port junction in the family covered by the closed form.
    pub fn symmetric_three_port(&mut self) -> (ThreePortSystem, f64) {
        let omega = self.uniform(-0.5, 0.5);
        let xi = self.uniform(0.5, 2.0);
        let crw = CrwParams { omega, xi };
        let crw_c = CrwParams {
            omega,
            xi: self.uniform(0.25, 3.0),
        };
        let node = NodeParams::symmetric(xi, self.uniform(0.1, 2.0), self.uniform(0.0, TAU), 0.0, 0.0)
            .expect("sampled parameters are valid");
        let sys = ThreePortSystem::new(crw, crw, crw_c, node).expect("sampled parameters are valid");
        let energy = self.energy(&crw);
        (sys, energy)
    }
}

/// Max elementwise `|s_1 - s_2|` between two results on the same channels.
pub fn max_deviation(x: &ScatteringResult, y: &ScatteringResult) -> f64 {
    x.amplitude_matrix()
        .iter()
        .flatten()
        .zip(y.amplitude_matrix().iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub count: usize,
    pub tol: f64,
    /// Closed form vs oracle, two-port.
    pub two_port_max: f64,
    /// `M⁻¹N` vs oracle, three-port.
    pub three_port_max: f64,
    /// Symmetric closed form vs `M⁻¹N`.
    pub closed_form_max: f64,
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn oracle_deviation(analytic: Result<ScatteringResult>, system: crate::oracle::Junction, energy: f64) -> Result<f64> {
    let analytic = analytic?;
    compare_all(&analytic, &solve_all(system, energy, ORACLE_SITES)?)
}

fn note(max: &mut f64, failures: &mut Vec<String>, tol: f64, label: &str, i: usize, energy: f64, outcome: Result<f64>) {
    let what = match outcome {
        Ok(d) => {
            *max = max.max(d);
            if d <= tol {
                return;
            }
            format!("deviation {d:e}")
        }
        Err(e) => e.to_string(),
    };
    failures.push(format!("{label} #{i} at E = {energy}: {what}"));
}

/// Checks `count` random systems of each kind. A system fails when any
/// deviation exceeds `tol` (or is `NaN`) or a solve errors out.
pub fn run_verification(seed: u64, count: usize, tol: f64) -> VerificationReport {
    let mut sampler = Sampler::new(seed);
    let (mut two, mut three, mut closed) = (0.0, 0.0, 0.0);
    let mut failures = Vec::new();
    for i in 0..count {
        let (sys, energy) = sampler.two_port();
        let d = oracle_deviation(smatrix_two_port(&sys, energy), sys.into(), energy);
        note(&mut two, &mut failures, tol, "two-port", i, energy, d);

        let (sys, energy) = sampler.three_port();
        let d = oracle_deviation(smatrix_three_port(&sys, energy), sys.into(), energy);
        note(&mut three, &mut failures, tol, "three-port", i, energy, d);

        let (sys, energy) = sampler.symmetric_three_port();
        let d = smatrix_three_port_closed_form(&sys, energy)
            .and_then(|cf| Ok(max_deviation(&cf, &smatrix_three_port(&sys, energy)?)));
        note(&mut closed, &mut failures, tol, "closed form", i, energy, d);
    }
    VerificationReport {
        seed,
        count,
        tol,
        two_port_max: two,
        three_port_max: three,
        closed_form_max: closed,
        failures,
    }
}

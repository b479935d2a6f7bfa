//! Brute-force lattice solver used to validate the closed-form amplitudes.
//!
//! Every chain is represented site by site up to `n_sites`, and the raw
//! stationary equations of the junction cavities and of the chain interiors
//! are assembled into one dense linear system. Each chain is closed at its
//! last site by the exact outgoing relation `v(N) = e^{ik} v(N-1)` on the
//! scattered part `v = u - δ e^{-ikj}`, so the truncation introduces no
//! error beyond round-off and the result does not depend on `n_sites`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, ScatterError};
use crate::result::ScatteringResult;
use crate::threeport::ThreePortSystem;
use crate::twoport::TwoPortSystem;
use crate::waveguide::{flow, wave_number, Channel, ChannelWave, CrwParams};

/// Largest acceptable residual of the assembled system.
pub const RESIDUAL_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Junction {
    TwoPort(TwoPortSystem),
    ThreePort(ThreePortSystem),
}

impl From<TwoPortSystem> for Junction {
    fn from(sys: TwoPortSystem) -> Self {
        Junction::TwoPort(sys)
    }
}

impl From<ThreePortSystem> for Junction {
    fn from(sys: ThreePortSystem) -> Self {
        Junction::ThreePort(sys)
    }
}

impl Junction {
    pub fn channels(&self) -> &'static [Channel] {
        match self {
            Junction::TwoPort(_) => &[Channel::A, Channel::B],
            Junction::ThreePort(_) => &Channel::ALL,
        }
    }

    pub fn crw(&self, channel: Channel) -> Result<&CrwParams> {
        match self {
            Junction::TwoPort(sys) => sys.crw(channel),
            Junction::ThreePort(sys) => Ok(sys.crw(channel)),
        }
    }
}

/// Site amplitudes of one stationary scattering state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeSolution {
    pub energy: f64,
    pub incident: Channel,
    pub n_sites: usize,
    pub channels: Vec<Channel>,
    pub waves: Vec<ChannelWave>,
    /// `u_l(j)` for `j = 0..=n_sites`, one vector per channel.
    pub sites: Vec<Vec<Complex64>>,
    /// `u_c(0)` of the dissipative cavity (two-port only).
    pub cavity: Option<Complex64>,
    /// Damping of the dissipative cavity (zero for the three-port junction).
    pub gamma: f64,
    /// Extracted `s_{l', incident}` per channel.
    pub amplitudes: Vec<Complex64>,
    /// Max absolute residual of the assembled linear system.
    pub residual: f64,
    /// Max absolute residual of the chain-interior equations.
    pub interior_residual: f64,
}

impl LatticeSolution {
    fn position(&self, channel: Channel) -> Result<usize> {
        self.channels
            .iter()
            .position(|&c| c == channel)
            .ok_or_else(|| ScatterError::Mismatch(format!("channel {channel} not in lattice solution")))
    }

    /// `s_{out, incident}`.
    pub fn amplitude(&self, outgoing: Channel) -> Result<Complex64> {
        Ok(self.amplitudes[self.position(outgoing)?])
    }

    pub fn flow(&self, outgoing: Channel) -> Result<f64> {
        let p = self.position(outgoing)?;
        let q = self.position(self.incident)?;
        flow(self.amplitudes[p], &self.waves[p], &self.waves[q])
    }

    /// `1 - Σ I` for this incident channel.
    pub fn absorption(&self) -> Result<f64> {
        let mut total = 0.0;
        for &ch in &self.channels {
            total += self.flow(ch)?;
        }
        Ok(1.0 - total)
    }

    /// Loss rate of the dissipative cavity, `2γ|u_c(0)|²`, per unit incident flux.
    pub fn cavity_loss_fraction(&self) -> Result<f64> {
        let q = self.position(self.incident)?;
        let flux = self.waves[q].unit_flux();
        Ok(match self.cavity {
            Some(u) => 2.0 * self.gamma * u.norm_sqr() / flux,
            None => 0.0,
        })
    }
}

struct Layout {
    stride: usize,
    chains: usize,
    has_cavity: bool,
}

impl Layout {
    fn site(&self, chain: usize, j: usize) -> usize {
        chain * self.stride + j
    }

    fn cavity(&self) -> usize {
        self.chains * self.stride
    }

    fn unknowns(&self) -> usize {
        self.chains * self.stride + usize::from(self.has_cavity)
    }
}

/// Solves the lattice equations for a photon entering through `incident`.
pub fn solve_scattering(
    system: impl Into<Junction>,
    energy: f64,
    incident: Channel,
    n_sites: usize,
) -> Result<LatticeSolution> {
    let system = system.into();
    if n_sites < 3 {
        return Err(ScatterError::Precondition(format!("n_sites = {n_sites} must be >= 3")));
    }
    let channels = system.channels().to_vec();
    let inc = channels
        .iter()
        .position(|&c| c == incident)
        .ok_or_else(|| ScatterError::Mismatch(format!("junction has no channel {incident}")))?;
    let crws: Vec<CrwParams> = channels
        .iter()
        .map(|&c| system.crw(c).copied())
        .collect::<Result<_>>()?;
    let waves: Vec<ChannelWave> = crws.iter().map(|crw| wave_number(crw, energy)).collect();
    if !waves[inc].propagating {
        return Err(ScatterError::Precondition(format!(
            "incident channel {incident} does not propagate at E = {energy}"
        )));
    }

    let layout = Layout {
        stride: n_sites + 1,
        chains: channels.len(),
        has_cavity: matches!(system, Junction::TwoPort(_)),
    };
    let n = layout.unknowns();
    let mut a = DMatrix::<Complex64>::zeros(n, n);
    let mut b = DVector::<Complex64>::zeros(n);
    let c = |re: f64| Complex64::new(re, 0.0);
    let mut row = 0;

    let node = match &system {
        Junction::TwoPort(s) => s.node,
        Junction::ThreePort(s) => s.node,
    };
    let hop_ab = node.j_ab * Complex64::from_polar(1.0, node.phi);
    let (ia, ib) = (0, 1);

    // junction cavity of chain a
    a[(row, layout.site(ia, 0))] = c(crws[ia].omega - energy);
    a[(row, layout.site(ia, 1))] = c(-crws[ia].xi);
    a[(row, layout.site(ib, 0))] = hop_ab;
    // junction cavity of chain b
    a[(row + 1, layout.site(ib, 0))] = c(crws[ib].omega - energy);
    a[(row + 1, layout.site(ib, 1))] = c(-crws[ib].xi);
    a[(row + 1, layout.site(ia, 0))] = hop_ab.conj();
    match &system {
        Junction::TwoPort(sys) => {
            let uc = layout.cavity();
            a[(row, uc)] = c(node.j_ca);
            a[(row + 1, uc)] = c(node.j_bc);
            a[(row + 2, uc)] = Complex64::new(sys.node.omega_c - energy, -sys.node.gamma);
            a[(row + 2, layout.site(ia, 0))] = c(node.j_ca);
            a[(row + 2, layout.site(ib, 0))] = c(node.j_bc);
        }
        Junction::ThreePort(_) => {
            let ic = 2;
            a[(row, layout.site(ic, 0))] = c(node.j_ca);
            a[(row + 1, layout.site(ic, 0))] = c(node.j_bc);
            a[(row + 2, layout.site(ic, 0))] = c(crws[ic].omega - energy);
            a[(row + 2, layout.site(ic, 1))] = c(-crws[ic].xi);
            a[(row + 2, layout.site(ia, 0))] = c(node.j_ca);
            a[(row + 2, layout.site(ib, 0))] = c(node.j_bc);
        }
    }
    row += 3;

    for (ch, (crw, wave)) in crws.iter().zip(&waves).enumerate() {
        for j in 1..n_sites {
            a[(row, layout.site(ch, j))] = c(crw.omega - energy);
            a[(row, layout.site(ch, j + 1))] = c(-crw.xi);
            a[(row, layout.site(ch, j - 1))] = c(-crw.xi);
            row += 1;
        }
        // outgoing closure on the scattered part
        let step = wave.phase_factor();
        a[(row, layout.site(ch, n_sites))] = c(1.0);
        a[(row, layout.site(ch, n_sites - 1))] = -step;
        if ch == inc {
            let back = |j: usize| (-Complex64::i() * wave.k * j as f64).exp();
            b[row] = back(n_sites) - step * back(n_sites - 1);
        }
        row += 1;
    }
    debug_assert_eq!(row, n);

    let x = a.clone().lu().solve(&b).ok_or(ScatterError::Singular {
        magnitude: 0.0,
        scale: 1.0,
    })?;
    let residual = (&a * &x - &b).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !residual.is_finite() || residual > RESIDUAL_LIMIT {
        return Err(ScatterError::Convergence {
            residual,
            limit: RESIDUAL_LIMIT,
        });
    }

    let sites: Vec<Vec<Complex64>> = (0..channels.len())
        .map(|ch| (0..=n_sites).map(|j| x[layout.site(ch, j)]).collect())
        .collect();
    let interior_residual = crws
        .iter()
        .zip(&sites)
        .flat_map(|(crw, u)| {
            (1..n_sites).map(move |j| ((crw.omega - energy) * u[j] - crw.xi * u[j + 1] - crw.xi * u[j - 1]).norm())
        })
        .fold(0.0, f64::max);
    let amplitudes = sites
        .iter()
        .enumerate()
        .map(|(ch, u)| if ch == inc { u[0] - 1.0 } else { u[0] })
        .collect();
    let (cavity, gamma) = match &system {
        Junction::TwoPort(sys) => (Some(x[layout.cavity()]), sys.node.gamma),
        Junction::ThreePort(_) => (None, 0.0),
    };

    Ok(LatticeSolution {
        energy,
        incident,
        n_sites,
        channels,
        waves,
        sites,
        cavity,
        gamma,
        amplitudes,
        residual,
        interior_residual,
    })
}

/// Lattice solutions for every propagating incident channel.
pub fn solve_all(system: impl Into<Junction>, energy: f64, n_sites: usize) -> Result<Vec<LatticeSolution>> {
    let system = system.into();
    let mut out = Vec::new();
    for &ch in system.channels() {
        if wave_number(system.crw(ch)?, energy).propagating {
            out.push(solve_scattering(system, energy, ch, n_sites)?);
        }
    }
    Ok(out)
}

/// Max `|s_analytic - s_oracle|` over the column of the oracle's incident channel.
pub fn compare(analytic: &ScatteringResult, oracle: &LatticeSolution) -> Result<f64> {
    let scale = analytic.energy.abs().max(1.0);
    if (analytic.energy - oracle.energy).abs() > 1e-12 * scale {
        return Err(ScatterError::Mismatch(format!(
            "energies differ: {} vs {}",
            analytic.energy, oracle.energy
        )));
    }
    if analytic.channels != oracle.channels {
        return Err(ScatterError::Mismatch("junctions have different channel sets".into()));
    }
    for (x, y) in analytic.waves.iter().zip(&oracle.waves) {
        if (x.k - y.k).norm() > 1e-12 || (x.xi - y.xi).abs() > 1e-12 {
            return Err(ScatterError::Mismatch("chain parameters differ".into()));
        }
    }
    let mut worst = 0.0f64;
    for &out in &analytic.channels {
        let d = (analytic.amplitude(out, oracle.incident) - oracle.amplitude(out)?).norm();
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Max deviation over several incident channels.
pub fn compare_all(analytic: &ScatteringResult, oracle: &[LatticeSolution]) -> Result<f64> {
    oracle
        .iter()
        .try_fold(0.0f64, |acc, sol| Ok(acc.max(compare(analytic, sol)?)))
}

//! Semi-infinite coupled-resonator waveguides: parameters, dispersion,
//! wave-number branches and the flux-normalised scattering flow.
//!
//! Energies, frequencies and couplings are all expressed in units of the
//! reference hopping of CRW-a, so `xi = 1` is the natural default.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};

/// Default absolute tolerance for equality checks on conditions and invariants.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Port label of a semi-infinite chain attached to the junction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    A,
    B,
    C,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::A, Channel::B, Channel::C];

    pub fn index(self) -> usize {
        match self {
            Channel::A => 0,
            Channel::B => 1,
            Channel::C => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Channel::A => "a",
            Channel::B => "b",
            Channel::C => "c",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One semi-infinite chain: on-site frequency `omega` and hopping `xi > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrwParams {
    #[serde(default)]
    pub omega: f64,
    #[serde(default = "unit")]
    pub xi: f64,
}

fn unit() -> f64 {
    1.0
}

impl Default for CrwParams {
    fn default() -> Self {
        Self { omega: 0.0, xi: 1.0 }
    }
}

impl CrwParams {
    pub fn new(omega: f64, xi: f64) -> Result<Self> {
        let crw = Self { omega, xi };
        crw.validate()?;
        Ok(crw)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.omega.is_finite() {
            return Err(ScatterError::Domain(format!("omega = {} is not finite", self.omega)));
        }
        if !(self.xi.is_finite() && self.xi > 0.0) {
            return Err(ScatterError::Domain(format!("hopping xi = {} must be > 0", self.xi)));
        }
        Ok(())
    }

    /// Propagating band `[omega - 2 xi, omega + 2 xi]`.
    pub fn band(&self) -> (f64, f64) {
        (self.omega - 2.0 * self.xi, self.omega + 2.0 * self.xi)
    }

    /// Energy of a photon with real wave number `k`, without the domain check.
    pub(crate) fn energy_unchecked(&self, k: f64) -> f64 {
        self.omega - 2.0 * self.xi * k.cos()
    }
}

/// The three-cavity junction. Only the total loop phase `phi` is stored,
/// always wrapped into `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeParams {
    pub j_ab: f64,
    pub j_bc: f64,
    pub j_ca: f64,
    pub phi: f64,
    /// On-site frequency of the dissipative cavity (two-port only).
    #[serde(default)]
    pub omega_c: f64,
    /// Damping of the dissipative cavity (two-port only).
    #[serde(default)]
    pub gamma: f64,
}

impl NodeParams {
    pub fn new(j_ab: f64, j_bc: f64, j_ca: f64, phi: f64, omega_c: f64, gamma: f64) -> Result<Self> {
        let node = Self {
            j_ab,
            j_bc,
            j_ca,
            phi: wrap_phase(phi),
            omega_c,
            gamma,
        };
        node.validate()?;
        Ok(node)
    }

    /// Junction with `J_bc = J_ca = j_c`.
    pub fn symmetric(j_ab: f64, j_c: f64, phi: f64, omega_c: f64, gamma: f64) -> Result<Self> {
        Self::new(j_ab, j_c, j_c, phi, omega_c, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("j_ab", self.j_ab),
            ("j_bc", self.j_bc),
            ("j_ca", self.j_ca),
            ("gamma", self.gamma),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ScatterError::Domain(format!("{name} = {v} must be finite and >= 0")));
            }
        }
        if !self.phi.is_finite() || !self.omega_c.is_finite() {
            return Err(ScatterError::Domain("phi and omega_c must be finite".into()));
        }
        Ok(())
    }

    pub(crate) fn normalized(mut self) -> Self {
        self.phi = wrap_phase(self.phi);
        self
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Shortest distance between two angles on the circle.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = wrap_phase(a - b);
    d.min(TAU - d)
}

/// A photon mode in one chain at a fixed energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelWave {
    pub energy: f64,
    /// Hopping of the chain this wave lives in.
    pub xi: f64,
    /// Wave number; real in band, `Im k > 0` outside.
    pub k: Complex64,
    pub propagating: bool,
}

impl ChannelWave {
    /// `e^{ik}`, the per-site factor of the outgoing wave.
    pub fn phase_factor(&self) -> Complex64 {
        (Complex64::i() * self.k).exp()
    }

    /// True for an evanescent wave (energy strictly outside the band).
    pub fn is_evanescent(&self) -> bool {
        self.k.im > 0.0
    }

    /// True at an exact band edge, where the group velocity vanishes.
    pub fn is_band_edge(&self) -> bool {
        !self.propagating && !self.is_evanescent()
    }

    /// `xi sin k`, proportional to the group velocity; zero unless propagating.
    pub fn velocity_weight(&self) -> f64 {
        if self.propagating {
            self.xi * self.k.re.sin()
        } else {
            0.0
        }
    }

    /// Probability flux `2 xi sin k` carried by a unit-amplitude plane wave.
    pub fn unit_flux(&self) -> f64 {
        2.0 * self.velocity_weight()
    }
}

/// Energy of a propagating photon with wave number `k ∈ (0, π)`.
pub fn dispersion_energy(crw: &CrwParams, k: f64) -> Result<f64> {
    if !(k > 0.0 && k < PI) {
        return Err(ScatterError::Domain(format!("wave number k = {k} outside (0, π)")));
    }
    Ok(crw.energy_unchecked(k))
}

/// Inverts the dispersion relation, choosing the decaying branch outside the band.
pub fn wave_number(crw: &CrwParams, energy: f64) -> ChannelWave {
    let c = (crw.omega - energy) / (2.0 * crw.xi);
    let (k, propagating) = if c.abs() < 1.0 {
        (Complex64::new(c.acos(), 0.0), true)
    } else if c == 1.0 {
        (Complex64::new(0.0, 0.0), false)
    } else if c == -1.0 {
        (Complex64::new(PI, 0.0), false)
    } else if c > 1.0 {
        // below the band: k = iκ
        (Complex64::new(0.0, c.acosh()), false)
    } else {
        // above the band: k = π + iκ
        (Complex64::new(PI, (-c).acosh()), false)
    };
    ChannelWave {
        energy,
        xi: crw.xi,
        k,
        propagating,
    }
}

/// Outgoing flux in `outgoing` per unit incident flux in `incident`.
pub fn flow(amplitude: Complex64, outgoing: &ChannelWave, incident: &ChannelWave) -> Result<f64> {
    if !incident.propagating {
        return Err(ScatterError::Precondition(
            "incident channel carries no flux (evanescent or band edge)".into(),
        ));
    }
    if !outgoing.propagating {
        return Ok(0.0);
    }
    Ok(amplitude.norm_sqr() * outgoing.velocity_weight() / incident.velocity_weight())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_crw() -> CrwParams {
        CrwParams::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn dispersion_examples() {
        assert!(dispersion_energy(&unit_crw(), PI / 2.0).unwrap().abs() < 1e-15);
        let near_edge = dispersion_energy(&unit_crw(), 1e-9).unwrap();
        assert!((near_edge + 2.0).abs() < 1e-15);
        let crw = CrwParams::new(0.5, 2.0).unwrap();
        assert!((dispersion_energy(&crw, PI / 3.0).unwrap() + 1.5).abs() < 1e-14);
    }

    #[test]
    fn dispersion_rejects_out_of_range_k() {
        for k in [0.0, PI, -0.1, 4.0, f64::NAN] {
            assert!(matches!(
                dispersion_energy(&unit_crw(), k),
                Err(ScatterError::Domain(_))
            ));
        }
    }

    #[test]
    fn wave_number_examples() {
        let w = wave_number(&unit_crw(), 0.0);
        assert!(w.propagating);
        assert!((w.k.re - PI / 2.0).abs() < 1e-15 && w.k.im == 0.0);

        let w = wave_number(&unit_crw(), -2.5);
        assert!(!w.propagating);
        assert_eq!(w.k.re, 0.0);
        assert!((w.k.im - 1.25f64.acosh()).abs() < 1e-15);

        let w = wave_number(&unit_crw(), 1.0);
        assert!((w.k.re - 2.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn above_band_branch_decays() {
        let w = wave_number(&unit_crw(), 3.0);
        assert!(!w.propagating);
        assert_eq!(w.k.re, PI);
        assert!(w.k.im > 0.0);
        assert!(w.phase_factor().norm() < 1.0);
        // e^{ik} is real and negative above the band
        assert!(w.phase_factor().re < 0.0);
    }

    #[test]
    fn band_edges_are_not_propagating() {
        let lo = wave_number(&unit_crw(), -2.0);
        let hi = wave_number(&unit_crw(), 2.0);
        assert!(!lo.propagating && lo.is_band_edge() && lo.k.re == 0.0);
        assert!(!hi.propagating && hi.is_band_edge() && hi.k.re == PI);
    }

    #[test]
    fn flow_examples() {
        let w = wave_number(&unit_crw(), 0.3);
        let f = flow(Complex64::new(-1.0, 0.0), &w, &w).unwrap();
        assert!((f - 1.0).abs() < 1e-15);
        assert!((flow(Complex64::new(0.5, 0.0), &w, &w).unwrap() - 0.25).abs() < 1e-15);

        let evanescent = wave_number(&unit_crw(), 5.0);
        assert_eq!(flow(Complex64::new(3.0, 1.0), &evanescent, &w).unwrap(), 0.0);
        assert!(matches!(
            flow(Complex64::new(1.0, 0.0), &w, &evanescent),
            Err(ScatterError::Precondition(_))
        ));
    }

    #[test]
    fn flow_includes_velocity_ratio() {
        let a = wave_number(&unit_crw(), 0.0);
        let b = wave_number(&CrwParams::new(0.0, 2.0).unwrap(), 0.0);
        // xi_b sin k_b / (xi_a sin k_a) = 2
        assert!((flow(Complex64::new(1.0, 0.0), &b, &a).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn phase_wrapping() {
        assert_eq!(wrap_phase(TAU), 0.0);
        assert!((wrap_phase(-PI / 2.0) - 1.5 * PI).abs() < 1e-15);
        assert!(wrap_phase(-1e-300) < TAU);
        assert!((angular_distance(0.1, TAU - 0.1) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(CrwParams::new(0.0, 0.0).is_err());
        assert!(CrwParams::new(0.0, -1.0).is_err());
        assert!(NodeParams::new(-1.0, 0.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(NodeParams::new(1.0, 1.0, 1.0, 0.0, 0.0, -0.1).is_err());
        let node = NodeParams::new(1.0, 1.0, 1.0, 5.0 * PI, 0.0, 0.0).unwrap();
        assert!((node.phi - PI).abs() < 1e-14);
    }
}

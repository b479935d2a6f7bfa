//! Two semi-infinite CRWs whose end cavities couple to each other and to a
//! common dissipative cavity.
//!
//! Eliminating the dissipative cavity leaves a 2×2 problem whose couplings
//! are dressed by energy-dependent effective terms. The amplitudes here are
//! the closed-form solution of that problem; [`crate::oracle`] solves the
//! undressed lattice equations as an independent check.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, ScatterError};
use crate::result::ScatteringResult;
use crate::waveguide::{angular_distance, wave_number, Channel, CrwParams, NodeParams};

/// Relative size below which the determinant is treated as zero.
pub const SINGULAR_RATIO: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPortSystem {
    pub crw_a: CrwParams,
    pub crw_b: CrwParams,
    pub node: NodeParams,
}

impl TwoPortSystem {
    pub fn new(crw_a: CrwParams, crw_b: CrwParams, node: NodeParams) -> Result<Self> {
        crw_a.validate()?;
        crw_b.validate()?;
        node.validate()?;
        Ok(Self {
            crw_a,
            crw_b,
            node: node.normalized(),
        })
    }

    /// Identical chains `(omega = 0, xi)` with `J_bc = J_ca = j_c` and the
    /// dissipative cavity detuned by `delta`.
    pub fn symmetric(xi: f64, j_ab: f64, j_c: f64, gamma: f64, delta: f64, phi: f64) -> Result<Self> {
        let crw = CrwParams::new(0.0, xi)?;
        Self::new(crw, crw, NodeParams::symmetric(j_ab, j_c, phi, delta, gamma)?)
    }

    /// Detuning of the dissipative cavity from CRW-a, `omega_c - omega_a`.
    pub fn delta(&self) -> f64 {
        self.node.omega_c - self.crw_a.omega
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.node.omega_c = self.crw_a.omega + delta;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.node.phi = crate::waveguide::wrap_phase(phi);
        self
    }

    pub fn crw(&self, channel: Channel) -> Result<&CrwParams> {
        match channel {
            Channel::A => Ok(&self.crw_a),
            Channel::B => Ok(&self.crw_b),
            Channel::C => Err(ScatterError::Mismatch("the two-port junction has no chain c".into())),
        }
    }
}

/// Couplings induced by virtual excitation of the dissipative cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveCouplings {
    pub j_ba_eff: Complex64,
    pub j_aa_eff: Complex64,
    pub j_bb_eff: Complex64,
}

pub fn effective_couplings(sys: &TwoPortSystem, energy: f64) -> Result<EffectiveCouplings> {
    let node = &sys.node;
    if node.j_bc == 0.0 && node.j_ca == 0.0 {
        return Ok(EffectiveCouplings {
            j_ba_eff: Complex64::new(0.0, 0.0),
            j_aa_eff: Complex64::new(0.0, 0.0),
            j_bb_eff: Complex64::new(0.0, 0.0),
        });
    }
    let denom = Complex64::new(energy - node.omega_c, node.gamma);
    let scale = energy.abs().max(node.omega_c.abs()).max(node.gamma).max(1.0);
    if denom.norm() <= 4.0 * f64::EPSILON * scale {
        return Err(ScatterError::Pole { energy });
    }
    Ok(EffectiveCouplings {
        j_ba_eff: node.j_bc * node.j_ca / denom,
        j_aa_eff: node.j_ca * node.j_ca / denom,
        j_bb_eff: node.j_bc * node.j_bc / denom,
    })
}

/// Closed-form 2×2 scattering matrix with flows.
pub fn smatrix_two_port(sys: &TwoPortSystem, energy: f64) -> Result<ScatteringResult> {
    let eff = effective_couplings(sys, energy)?;
    let wa = wave_number(&sys.crw_a, energy);
    let wb = wave_number(&sys.crw_b, energy);
    let i = Complex64::i();
    let (xa, xb) = (sys.crw_a.xi, sys.crw_b.xi);
    let out_a = xa * (-i * wa.k).exp();
    let in_a = xa * (i * wa.k).exp();
    let out_b = xb * (-i * wb.k).exp();
    let in_b = xb * (i * wb.k).exp();
    let phase = Complex64::from_polar(1.0, sys.node.phi);

    // hopping a <- b and b <- a, each dressed by the cavity
    let fwd = sys.node.j_ab * phase + eff.j_ba_eff;
    let bwd = sys.node.j_ab * phase.conj() + eff.j_ba_eff;
    let loop_term = bwd * fwd;

    let diag = (out_a + eff.j_aa_eff) * (out_b + eff.j_bb_eff);
    let d = diag - loop_term;
    let scale = diag.norm() + loop_term.norm();
    if d.norm() < SINGULAR_RATIO * scale || d.norm() == 0.0 {
        return Err(ScatterError::Singular {
            magnitude: d.norm(),
            scale,
        });
    }

    let s_aa = (loop_term - (in_a + eff.j_aa_eff) * (out_b + eff.j_bb_eff)) / d;
    let s_ab = (in_b - out_b) * fwd / d;
    let s_ba = (in_a - out_a) * bwd / d;
    let s_bb = (loop_term - (out_a + eff.j_aa_eff) * (in_b + eff.j_bb_eff)) / d;

    Ok(ScatteringResult::new(
        energy,
        vec![Channel::A, Channel::B],
        vec![wa, wb],
        vec![s_aa, s_ab, s_ba, s_bb],
        d.norm() / scale,
    ))
}

/// Which way a perfectly nonreciprocal junction passes photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferDirection {
    /// `I_ba = 1`, `I_ab = 0`.
    AToB,
    /// `I_ab = 1`, `I_ba = 0`.
    BToA,
}

impl TransferDirection {
    fn for_phase(phi: f64) -> Self {
        if phi < PI {
            TransferDirection::AToB
        } else {
            TransferDirection::BToA
        }
    }
}

/// A `(phi, k)` pair at which one transfer direction is complete and the
/// other vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerfectPoint {
    pub phi: f64,
    pub k: f64,
    pub direction: TransferDirection,
}

impl PerfectPoint {
    /// Perfect point for loop phase `phi`: `k = phi` below π, `2π - phi` above.
    pub fn for_phase(phi: f64) -> Self {
        let phi = crate::waveguide::wrap_phase(phi);
        let k = if phi < PI { phi } else { TAU - phi };
        Self {
            phi,
            k,
            direction: TransferDirection::for_phase(phi),
        }
    }
}

/// Optimal operating points for identical chains of hopping `xi` with
/// symmetric cavity coupling `j_c` and damping `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonreciprocityConditions {
    pub xi: f64,
    pub j_c: f64,
    pub gamma: f64,
    /// Required direct coupling, equal to `xi`.
    pub j_ab: f64,
    /// Both phase solutions: `asin(γξ/J_c²)` and its mirror `2π - asin(γξ/J_c²)`.
    pub points: [PerfectPoint; 2],
    /// Detuning needed at either phase.
    pub required_delta: f64,
    pub delta: f64,
    pub delta_matches: bool,
}

pub fn nonreciprocity_conditions(xi: f64, j_c: f64, gamma: f64, delta: f64) -> Result<NonreciprocityConditions> {
    nonreciprocity_conditions_with_tol(xi, j_c, gamma, delta, crate::waveguide::DEFAULT_TOL)
}

pub fn nonreciprocity_conditions_with_tol(
    xi: f64,
    j_c: f64,
    gamma: f64,
    delta: f64,
    tol: f64,
) -> Result<NonreciprocityConditions> {
    if !(xi.is_finite() && xi > 0.0) {
        return Err(ScatterError::Domain(format!("xi = {xi} must be > 0")));
    }
    if !(j_c.is_finite() && j_c > 0.0) {
        return Err(ScatterError::Domain(format!("J_c = {j_c} must be > 0")));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(ScatterError::Domain(format!(
            "gamma = {gamma} must be > 0; without loss the optimal phase is 0 and the junction is reciprocal"
        )));
    }
    let jc_sq = j_c * j_c;
    let ratio = gamma * xi / jc_sq;
    if ratio > 1.0 + 1e-12 {
        return Err(ScatterError::NoRealPhase {
            gamma_xi: gamma * xi,
            jc_sq,
        });
    }
    let phi = ratio.min(1.0).asin();
    let required_delta = (jc_sq - 2.0 * xi * xi) * phi.cos() / xi;
    Ok(NonreciprocityConditions {
        xi,
        j_c,
        gamma,
        j_ab: xi,
        points: [PerfectPoint::for_phase(phi), PerfectPoint::for_phase(TAU - phi)],
        required_delta,
        delta,
        delta_matches: (delta - required_delta).abs() <= tol,
    })
}

/// `(J_c, gamma)` that give perfect nonreciprocity at loop phase `phi` for
/// a dissipative cavity detuned by `delta`.
///
/// The damping is `J_c² |sin φ| / ξ`; the magnitude keeps it non-negative for
/// phases in `(π, 2π)`, where the mirrored perfect point sits at `k = 2π - φ`.
pub fn params_for_detuning(xi: f64, delta: f64, phi: f64) -> Result<(f64, f64)> {
    if !(xi.is_finite() && xi > 0.0) {
        return Err(ScatterError::Domain(format!("xi = {xi} must be > 0")));
    }
    let phi = crate::waveguide::wrap_phase(phi);
    let (sin, cos) = phi.sin_cos();
    if angular_distance(phi, 0.0) < 1e-12 || angular_distance(phi, PI) < 1e-12 {
        return Err(ScatterError::Domain(format!(
            "phi = {phi} is a multiple of π; the junction is reciprocal"
        )));
    }
    if angular_distance(phi, FRAC_PI_2) < 1e-12 || angular_distance(phi, 3.0 * FRAC_PI_2) < 1e-12 {
        return Err(ScatterError::Domain(
            "cos(phi) = 0: the detuning must vanish and J_c² = γξ applies instead".into(),
        ));
    }
    let radicand = delta * xi / cos + 2.0 * xi * xi;
    if radicand < 0.0 {
        return Err(ScatterError::Domain(format!(
            "detuning {delta} out of range for phi = {phi}: J_c² = {radicand} < 0"
        )));
    }
    let j_c = radicand.sqrt();
    Ok((j_c, j_c * j_c * sin.abs() / xi))
}

/// Which closed-form condition makes a two-port system perfectly nonreciprocal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoPortCondition {
    /// `phi = π/2` or `3π/2`, resonant cavity, `J_c² = γξ`.
    CriticalCoupling,
    /// General phase: `J_c² = Δξ/cos φ + 2ξ²` and `γξ = J_c² |sin φ|`.
    DetunedBalance,
}

/// Outcome of checking a concrete two-port system against the optimal conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TwoPortAnalysis {
    /// Chains or cavity couplings are not symmetric; no optimality claim is made.
    NotApplicable { reason: String },
    /// `phi` is a multiple of π.
    Reciprocal,
    Perfect {
        point: PerfectPoint,
        condition: TwoPortCondition,
    },
    /// Symmetric but at least one condition fails; each entry names it.
    Unmet {
        condition: TwoPortCondition,
        violations: Vec<String>,
    },
}

/// Checks a system against the optimal conditions with absolute tolerance `tol`.
pub fn analyze(sys: &TwoPortSystem, tol: f64) -> TwoPortAnalysis {
    let (a, b, node) = (&sys.crw_a, &sys.crw_b, &sys.node);
    if (a.xi - b.xi).abs() > tol || (a.omega - b.omega).abs() > tol {
        return TwoPortAnalysis::NotApplicable {
            reason: "chains a and b differ".into(),
        };
    }
    if (node.j_bc - node.j_ca).abs() > tol {
        return TwoPortAnalysis::NotApplicable {
            reason: "cavity couples asymmetrically (J_bc != J_ca)".into(),
        };
    }
    let phi = node.phi;
    if angular_distance(phi, 0.0) <= tol || angular_distance(phi, PI) <= tol {
        return TwoPortAnalysis::Reciprocal;
    }
    let xi = a.xi;
    let jc_sq = node.j_ca * node.j_ca;
    let delta = sys.delta();
    let (sin, cos) = phi.sin_cos();
    let mut violations = Vec::new();
    if (node.j_ab - xi).abs() > tol {
        violations.push(format!("J_ab = {} but must equal xi = {}", node.j_ab, xi));
    }
    let condition = if cos.abs() <= tol {
        if delta.abs() > tol {
            violations.push(format!("detuning {delta} must vanish"));
        }
        if (jc_sq - node.gamma * xi).abs() > tol {
            violations.push(format!("J_c² = {jc_sq} differs from γξ = {}", node.gamma * xi));
        }
        TwoPortCondition::CriticalCoupling
    } else {
        let needed_delta = (jc_sq - 2.0 * xi * xi) * cos / xi;
        if (delta - needed_delta).abs() > tol {
            violations.push(format!("detuning {delta} differs from required {needed_delta}"));
        }
        let needed_gamma = jc_sq * sin.abs() / xi;
        if (node.gamma - needed_gamma).abs() > tol {
            violations.push(format!(
                "gamma = {} differs from J_c²|sin φ|/ξ = {needed_gamma}",
                node.gamma
            ));
        }
        TwoPortCondition::DetunedBalance
    };
    if violations.is_empty() {
        TwoPortAnalysis::Perfect {
            point: PerfectPoint::for_phase(phi),
            condition,
        }
    } else {
        TwoPortAnalysis::Unmet { condition, violations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveguide::dispersion_energy;

    fn fig2a() -> TwoPortSystem {
        TwoPortSystem::symmetric(1.0, 1.0, 1.0, 1.0, 0.0, FRAC_PI_2).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn effective_coupling_examples() {
        let sys = TwoPortSystem::symmetric(1.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        let eff = effective_couplings(&sys, 0.0).unwrap();
        assert!(close(eff.j_ba_eff, Complex64::new(0.0, -1.0), 1e-15));

        let decoupled = TwoPortSystem::symmetric(1.0, 1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let eff = effective_couplings(&decoupled, 0.0).unwrap();
        assert_eq!(eff.j_ba_eff, Complex64::new(0.0, 0.0));
        assert_eq!(eff.j_aa_eff, Complex64::new(0.0, 0.0));
        assert_eq!(eff.j_bb_eff, Complex64::new(0.0, 0.0));

        let crw = CrwParams::default();
        let node = NodeParams::new(1.0, 1.0, 2.0, 0.0, 1.0, 0.5).unwrap();
        let sys = TwoPortSystem::new(crw, crw, node).unwrap();
        let eff = effective_couplings(&sys, 0.0).unwrap();
        // 2 / (-1 + 0.5i) = 2 (-1 - 0.5i) / 1.25 = -1.6 - 0.8i
        assert!(close(eff.j_ba_eff, Complex64::new(-1.6, -0.8), 1e-15));
        assert!(close(eff.j_aa_eff, Complex64::new(-3.2, -1.6), 1e-15));
        assert!(close(eff.j_bb_eff, Complex64::new(-0.8, -0.4), 1e-15));
    }

    #[test]
    fn lossless_resonance_is_a_pole() {
        let sys = TwoPortSystem::symmetric(1.0, 1.0, 1.0, 0.0, 0.3, 1.0).unwrap();
        assert!(matches!(effective_couplings(&sys, 0.3), Err(ScatterError::Pole { .. })));
        assert!(matches!(smatrix_two_port(&sys, 0.3), Err(ScatterError::Pole { .. })));
    }

    #[test]
    fn fig2a_perfect_point() {
        let r = smatrix_two_port(&fig2a(), 0.0).unwrap();
        assert!(close(
            r.amplitude(Channel::B, Channel::A),
            Complex64::new(-1.0, 0.0),
            1e-12
        ));
        assert!(r.amplitude(Channel::A, Channel::B).norm() < 1e-12);
        assert!((r.flow(Channel::B, Channel::A) - 1.0).abs() < 1e-12);
        assert!(r.flow(Channel::A, Channel::B) < 1e-12);
    }

    #[test]
    fn fig2d_perfect_point_at_k_equal_phi() {
        let sys = TwoPortSystem::symmetric(1.0, 1.0, 2f64.sqrt(), 3f64.sqrt(), 0.0, PI / 3.0).unwrap();
        let e = dispersion_energy(&sys.crw_a, PI / 3.0).unwrap();
        let r = smatrix_two_port(&sys, e).unwrap();
        assert!((r.flow(Channel::B, Channel::A) - 1.0).abs() < 1e-12);
        assert!(r.flow(Channel::A, Channel::B) < 1e-12);
    }

    #[test]
    fn zero_phase_is_reciprocal() {
        let sys = TwoPortSystem::symmetric(1.0, 0.7, 1.3, 0.4, 0.2, 0.0).unwrap();
        for e in [-1.5, -0.2, 0.9, 1.7] {
            let r = smatrix_two_port(&sys, e).unwrap();
            assert_eq!(r.amplitude(Channel::A, Channel::B), r.amplitude(Channel::B, Channel::A));
        }
    }

    #[test]
    fn decoupled_chains_reflect_totally() {
        let crw = CrwParams::default();
        let node = NodeParams::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let sys = TwoPortSystem::new(crw, crw, node).unwrap();
        let r = smatrix_two_port(&sys, 0.4).unwrap();
        assert!((r.flow(Channel::A, Channel::A) - 1.0).abs() < 1e-14);
        assert_eq!(r.amplitude(Channel::B, Channel::A).norm(), 0.0);
    }

    #[test]
    fn evanescent_incident_gives_nan_flows() {
        let crw_b = CrwParams::new(3.0, 0.5).unwrap();
        let node = NodeParams::new(1.0, 1.0, 1.0, 1.0, 0.0, 0.5).unwrap();
        let sys = TwoPortSystem::new(CrwParams::default(), crw_b, node).unwrap();
        let r = smatrix_two_port(&sys, 0.0).unwrap();
        assert!(r.flow(Channel::A, Channel::B).is_nan());
        assert_eq!(r.flow(Channel::B, Channel::A), 0.0);
        assert!(r.flow(Channel::A, Channel::A) <= 1.0 + 1e-12);
    }

    #[test]
    fn condition_examples() {
        let c = nonreciprocity_conditions(1.0, 1.0, 1.0, 0.0).unwrap();
        assert!((c.points[0].phi - FRAC_PI_2).abs() < 1e-12);
        assert!((c.points[1].phi - 1.5 * PI).abs() < 1e-12);
        assert!((c.points[0].k - FRAC_PI_2).abs() < 1e-12);
        assert!((c.points[1].k - FRAC_PI_2).abs() < 1e-12);
        assert!(c.required_delta.abs() < 1e-12 && c.delta_matches);
        assert_eq!(c.j_ab, 1.0);
        assert_eq!(c.points[0].direction, TransferDirection::AToB);
        assert_eq!(c.points[1].direction, TransferDirection::BToA);

        let c = nonreciprocity_conditions(1.0, 2f64.sqrt(), 3f64.sqrt(), 0.0).unwrap();
        assert!((c.points[0].phi - PI / 3.0).abs() < 1e-12);
        assert!((c.points[1].phi - 5.0 * PI / 3.0).abs() < 1e-12);
        assert!(c.required_delta.abs() < 1e-12);

        assert!(matches!(
            nonreciprocity_conditions(1.0, 1.0, 2.0, 0.0),
            Err(ScatterError::NoRealPhase { .. })
        ));
    }

    #[test]
    fn detuning_parameter_examples() {
        let (jc, g) = params_for_detuning(1.0, 0.0, PI / 3.0).unwrap();
        assert!((jc - 2f64.sqrt()).abs() < 1e-12);
        assert!((g - 3f64.sqrt()).abs() < 1e-12);

        let (jc, g) = params_for_detuning(1.0, 2.0, PI / 3.0).unwrap();
        assert!((jc - 6f64.sqrt()).abs() < 1e-12);
        assert!((g - 6.0 * (PI / 3.0).sin()).abs() < 1e-12);

        let (jc, _) = params_for_detuning(1.0, -0.9, PI / 3.0).unwrap();
        assert!((jc - 0.2f64.sqrt()).abs() < 1e-12);

        assert!(params_for_detuning(1.0, -1.1, PI / 3.0).is_err());
        assert!(params_for_detuning(1.0, 0.0, FRAC_PI_2).is_err());
        assert!(params_for_detuning(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn detuned_parameters_in_lower_half_are_perfect() {
        let phi = 5.0 * PI / 3.0;
        let (jc, g) = params_for_detuning(1.0, 0.5, phi).unwrap();
        assert!(g > 0.0);
        let sys = TwoPortSystem::symmetric(1.0, 1.0, jc, g, 0.5, phi).unwrap();
        let k = TAU - phi;
        let r = smatrix_two_port(&sys, dispersion_energy(&sys.crw_a, k).unwrap()).unwrap();
        assert!((r.flow(Channel::A, Channel::B) - 1.0).abs() < 1e-10);
        assert!(r.flow(Channel::B, Channel::A) < 1e-10);
        assert!(matches!(analyze(&sys, 1e-10), TwoPortAnalysis::Perfect { .. }));
    }

    #[test]
    fn analyze_classifies() {
        match analyze(&fig2a(), 1e-10) {
            TwoPortAnalysis::Perfect { point, condition } => {
                assert_eq!(condition, TwoPortCondition::CriticalCoupling);
                assert!((point.k - FRAC_PI_2).abs() < 1e-12);
                assert_eq!(point.direction, TransferDirection::AToB);
            }
            other => panic!("unexpected {other:?}"),
        }
        let reciprocal = fig2a().with_phi(PI);
        assert_eq!(analyze(&reciprocal, 1e-10), TwoPortAnalysis::Reciprocal);
        let lossy = TwoPortSystem::symmetric(1.0, 1.0, 1.0, 2.0, 0.0, FRAC_PI_2).unwrap();
        assert!(matches!(analyze(&lossy, 1e-10), TwoPortAnalysis::Unmet { .. }));
        let crw_b = CrwParams::new(0.0, 2.0).unwrap();
        let asym = TwoPortSystem::new(CrwParams::default(), crw_b, fig2a().node).unwrap();
        assert!(matches!(analyze(&asym, 1e-10), TwoPortAnalysis::NotApplicable { .. }));
    }
}

//! T-shaped junction of three pairwise-coupled semi-infinite CRWs.
//!
//! The general path builds the 3×3 node equations `M s = N` and solves them
//! directly. For the symmetric configuration a closed form exists; it is kept
//! as an independent second route and is cross-checked against the solve.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, ScatterError};
use crate::linalg::{solve3, Mat3};
use crate::result::ScatteringResult;
use crate::twoport::SINGULAR_RATIO;
use crate::waveguide::{angular_distance, wave_number, wrap_phase, Channel, CrwParams, NodeParams, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreePortSystem {
    pub crw_a: CrwParams,
    pub crw_b: CrwParams,
    pub crw_c: CrwParams,
    /// Junction couplings; `gamma` is always zero and `omega_c` mirrors `crw_c.omega`.
    pub node: NodeParams,
}

impl ThreePortSystem {
    pub fn new(crw_a: CrwParams, crw_b: CrwParams, crw_c: CrwParams, node: NodeParams) -> Result<Self> {
        crw_a.validate()?;
        crw_b.validate()?;
        crw_c.validate()?;
        node.validate()?;
        if node.gamma != 0.0 {
            return Err(ScatterError::Precondition(format!(
                "three-port junction is lossless, got gamma = {}",
                node.gamma
            )));
        }
        let mut node = node.normalized();
        node.omega_c = crw_c.omega;
        Ok(Self {
            crw_a,
            crw_b,
            crw_c,
            node,
        })
    }

    /// All chains at `omega = 0`; a and b share `xi`, chain c has `xi_c`,
    /// and `J_bc = J_ca = j_c`.
    pub fn symmetric(xi: f64, xi_c: f64, j_ab: f64, j_c: f64, phi: f64) -> Result<Self> {
        let crw = CrwParams::new(0.0, xi)?;
        Self::new(
            crw,
            crw,
            CrwParams::new(0.0, xi_c)?,
            NodeParams::symmetric(j_ab, j_c, phi, 0.0, 0.0)?,
        )
    }

    pub fn crw(&self, channel: Channel) -> &CrwParams {
        match channel {
            Channel::A => &self.crw_a,
            Channel::B => &self.crw_b,
            Channel::C => &self.crw_c,
        }
    }

    /// Detuning of chain c from chain a.
    pub fn delta(&self) -> f64 {
        self.crw_c.omega - self.crw_a.omega
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.crw_c.omega = self.crw_a.omega + delta;
        self.node.omega_c = self.crw_c.omega;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.node.phi = wrap_phase(phi);
        self
    }

    /// Whether the symmetric closed form applies (within `tol`).
    pub fn symmetric_violation(&self, tol: f64) -> Option<String> {
        let (a, b, c, n) = (&self.crw_a, &self.crw_b, &self.crw_c, &self.node);
        if (a.omega - b.omega).abs() > tol || (a.omega - c.omega).abs() > tol {
            return Some("on-site frequencies of a, b and c differ".into());
        }
        if (a.xi - b.xi).abs() > tol {
            return Some("chains a and b have different hopping".into());
        }
        if (n.j_ab - a.xi).abs() > tol {
            return Some(format!("J_ab = {} differs from xi = {}", n.j_ab, a.xi));
        }
        if (n.j_bc - n.j_ca).abs() > tol {
            return Some("chain c couples asymmetrically (J_bc != J_ca)".into());
        }
        None
    }
}

/// Scattering matrix from the node equations, `S = M⁻¹ N`.
///
/// Wave numbers of non-propagating chains are complex; the corresponding
/// outgoing flows are zero and flows for such incident channels are `NaN`.
pub fn smatrix_three_port(sys: &ThreePortSystem, energy: f64) -> Result<ScatteringResult> {
    let waves = [
        wave_number(&sys.crw_a, energy),
        wave_number(&sys.crw_b, energy),
        wave_number(&sys.crw_c, energy),
    ];
    let i = Complex64::i();
    let node = &sys.node;
    let hop_ab = node.j_ab * Complex64::from_polar(1.0, node.phi);
    let hop_ba = hop_ab.conj();
    let j_ca = Complex64::new(node.j_ca, 0.0);
    let j_bc = Complex64::new(node.j_bc, 0.0);
    let out = |w: &crate::waveguide::ChannelWave| w.xi * (-i * w.k).exp();
    let inc = |w: &crate::waveguide::ChannelWave| w.xi * (i * w.k).exp();

    let m: Mat3 = [
        [out(&waves[0]), hop_ab, j_ca],
        [hop_ba, out(&waves[1]), j_bc],
        [j_ca, j_bc, out(&waves[2])],
    ];
    let n: Mat3 = [
        [-inc(&waves[0]), -hop_ab, -j_ca],
        [-hop_ba, -inc(&waves[1]), -j_bc],
        [-j_ca, -j_bc, -inc(&waves[2])],
    ];
    let (s, ratio) = solve3(&m, &n, SINGULAR_RATIO)?;
    Ok(ScatteringResult::new(
        energy,
        Channel::ALL.to_vec(),
        waves.to_vec(),
        s.iter().flatten().copied().collect(),
        ratio,
    ))
}

/// Closed-form amplitudes for the symmetric junction: equal on-site
/// frequencies, `xi_a = xi_b = J_ab`, `J_bc = J_ca`, energy inside the band
/// of chains a and b.
pub fn smatrix_three_port_closed_form(sys: &ThreePortSystem, energy: f64) -> Result<ScatteringResult> {
    if let Some(reason) = sys.symmetric_violation(DEFAULT_TOL) {
        return Err(ScatterError::Precondition(reason));
    }
    let wa = wave_number(&sys.crw_a, energy);
    let wb = wave_number(&sys.crw_b, energy);
    let wc = wave_number(&sys.crw_c, energy);
    if !wa.propagating {
        return Err(ScatterError::Precondition(format!(
            "energy {energy} lies outside the open band of chains a and b"
        )));
    }

    let xi = sys.crw_a.xi;
    let xi_c = sys.crw_c.xi;
    let jc = sys.node.j_ca;
    let jc2 = jc * jc;
    let e = |x: Complex64| (Complex64::i() * x).exp();
    let k = wa.k;
    let kc = wc.k;
    let ep = e(Complex64::new(sys.node.phi, 0.0));
    let em = ep.conj();
    let (ek, emk) = (e(k), e(-k));
    let (ekc, emkc) = (e(kc), e(-kc));
    let cos_phi2 = ep + em;

    let d_loop = xi * jc2 * (cos_phi2 - 2.0 * emk);
    let d_chain = xi * xi * xi_c * emkc * (emk * emk - 1.0);
    let d = d_loop + d_chain;
    let scale = d_loop.norm() + d_chain.norm();
    if d.norm() < SINGULAR_RATIO * scale || d.norm() == 0.0 {
        return Err(ScatterError::Singular {
            magnitude: d.norm(),
            scale,
        });
    }

    let s_aa = -xi * jc2 * (cos_phi2 - emk - ek) / d;
    let s_ba = xi * emkc * (xi * xi_c * em - jc2 * ekc) * (ek - emk) / d;
    let s_ca = xi * xi * jc * (emk - ek) * (em - emk) / d;
    let s_ab = xi * emkc * (xi * xi_c * ep - jc2 * ekc) * (ek - emk) / d;
    let s_bb = -xi * jc2 * (cos_phi2 - ek - emk) / d;
    let s_cb = xi * xi * jc * (emk - ek) * (ep - emk) / d;
    let s_ac = xi * jc * xi_c * (emkc - ekc) * (ep - emk) / d;
    let s_bc = xi * jc * xi_c * (emkc - ekc) * (em - emk) / d;
    let s_cc = (xi * jc2 * (2.0 * emk - ep - em) + xi * xi * xi_c * ekc * (1.0 - emk * emk)) / d;

    Ok(ScatteringResult::new(
        energy,
        Channel::ALL.to_vec(),
        vec![wa, wb, wc],
        vec![s_aa, s_ab, s_ac, s_ba, s_bb, s_bc, s_ca, s_cb, s_cc],
        d.norm() / scale,
    ))
}

/// Routing order of a perfect circulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Circulation {
    /// a → b → c → a: `I_ba = I_cb = I_ac = 1`.
    Clockwise,
    /// a → c → b → a: `I_ab = I_bc = I_ca = 1`.
    Counterclockwise,
}

impl Circulation {
    pub fn for_phase(phi: f64) -> Self {
        if wrap_phase(phi) < PI {
            Circulation::Clockwise
        } else {
            Circulation::Counterclockwise
        }
    }

    /// `(outgoing, incident)` pairs carrying unit flow.
    pub fn routes(self) -> [(Channel, Channel); 3] {
        use Channel::*;
        match self {
            Circulation::Clockwise => [(B, A), (C, B), (A, C)],
            Circulation::Counterclockwise => [(C, A), (A, B), (B, C)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CirculatorCondition {
    /// `J_c = xi_c = xi`; perfect at `k = k_c = phi` (or `2π - phi`).
    EqualCoupling,
    /// `J_c² = xi xi_c` with `phi ∈ {π/2, 3π/2}`; perfect at band centre.
    GeometricMean,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CirculatorAnalysis {
    NotApplicable {
        reason: String,
    },
    Perfect {
        phi: f64,
        k: f64,
        k_c: f64,
        direction: Circulation,
        condition: CirculatorCondition,
    },
    NoPerfectPoint {
        reason: String,
    },
}

pub fn circulator_conditions(sys: &ThreePortSystem) -> CirculatorAnalysis {
    circulator_conditions_with_tol(sys, DEFAULT_TOL)
}

pub fn circulator_conditions_with_tol(sys: &ThreePortSystem, tol: f64) -> CirculatorAnalysis {
    if let Some(reason) = sys.symmetric_violation(tol) {
        return CirculatorAnalysis::NotApplicable { reason };
    }
    let phi = sys.node.phi;
    if angular_distance(phi, 0.0) <= tol || angular_distance(phi, PI) <= tol {
        return CirculatorAnalysis::NoPerfectPoint {
            reason: "phi is a multiple of π; time-reversal symmetry is intact".into(),
        };
    }
    let xi = sys.crw_a.xi;
    let xi_c = sys.crw_c.xi;
    let jc = sys.node.j_ca;
    let direction = Circulation::for_phase(phi);

    if (jc - xi).abs() <= tol && (xi_c - xi).abs() <= tol {
        let k = if phi < PI { phi } else { TAU - phi };
        return CirculatorAnalysis::Perfect {
            phi,
            k,
            k_c: k,
            direction,
            condition: CirculatorCondition::EqualCoupling,
        };
    }
    if (jc * jc - xi * xi_c).abs() > tol {
        return CirculatorAnalysis::NoPerfectPoint {
            reason: format!("J_c² = {} differs from xi·xi_c = {}", jc * jc, xi * xi_c),
        };
    }
    if angular_distance(phi, FRAC_PI_2) > tol && angular_distance(phi, 3.0 * FRAC_PI_2) > tol {
        return CirculatorAnalysis::NoPerfectPoint {
            reason: format!("unequal couplings need phi = π/2 or 3π/2, got {phi}"),
        };
    }
    CirculatorAnalysis::Perfect {
        phi,
        k: FRAC_PI_2,
        k_c: FRAC_PI_2,
        direction,
        condition: CirculatorCondition::GeometricMean,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandInterval {
    pub channel: Channel,
    pub lower: f64,
    pub upper: f64,
}

/// Propagating bands of the three chains and their common part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandOverlap {
    pub bands: [BandInterval; 3],
    /// `None` when no energy propagates in all three chains.
    pub overlap: Option<(f64, f64)>,
}

impl BandOverlap {
    pub fn contains(&self, energy: f64) -> bool {
        self.overlap.is_some_and(|(lo, hi)| energy > lo && energy < hi)
    }

    /// Channels in whose band `energy` lies strictly inside.
    pub fn propagating(&self, energy: f64) -> Vec<Channel> {
        self.bands
            .iter()
            .filter(|b| energy > b.lower && energy < b.upper)
            .map(|b| b.channel)
            .collect()
    }
}

pub fn band_overlap(sys: &ThreePortSystem) -> BandOverlap {
    let bands = Channel::ALL.map(|ch| {
        let (lower, upper) = sys.crw(ch).band();
        BandInterval {
            channel: ch,
            lower,
            upper,
        }
    });
    let lo = bands.iter().map(|b| b.lower).fold(f64::NEG_INFINITY, f64::max);
    let hi = bands.iter().map(|b| b.upper).fold(f64::INFINITY, f64::min);
    BandOverlap {
        bands,
        overlap: (lo < hi).then_some((lo, hi)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveguide::dispersion_energy;

    fn equal(phi: f64) -> ThreePortSystem {
        ThreePortSystem::symmetric(1.0, 1.0, 1.0, 1.0, phi).unwrap()
    }

    fn assert_circulates(r: &ScatteringResult, dir: Circulation, tol: f64) {
        let routes = dir.routes();
        for out in Channel::ALL {
            for inc in Channel::ALL {
                let f = r.flow(out, inc);
                if routes.contains(&(out, inc)) {
                    assert!((f - 1.0).abs() < tol, "I_{out}{inc} = {f}");
                } else {
                    assert!(f.abs() < tol, "I_{out}{inc} = {f}");
                }
            }
        }
    }

    #[test]
    fn fig5_clockwise_and_counterclockwise() {
        let r = smatrix_three_port(&equal(FRAC_PI_2), 0.0).unwrap();
        assert_circulates(&r, Circulation::Clockwise, 1e-12);
        let r = smatrix_three_port(&equal(1.5 * PI), 0.0).unwrap();
        assert_circulates(&r, Circulation::Counterclockwise, 1e-12);
        let sys = equal(2.0 * PI / 3.0);
        let e = dispersion_energy(&sys.crw_a, 2.0 * PI / 3.0).unwrap();
        assert_circulates(
            &smatrix_three_port_closed_form(&sys, e).unwrap(),
            Circulation::Clockwise,
            1e-12,
        );
    }

    #[test]
    fn fig6_geometric_mean_circulator() {
        let sys = ThreePortSystem::symmetric(1.0, 0.5, 1.0, 0.5f64.sqrt(), FRAC_PI_2).unwrap();
        let r = smatrix_three_port(&sys, 0.0).unwrap();
        assert_circulates(&r, Circulation::Clockwise, 1e-12);
        let r = smatrix_three_port(&sys.with_phi(1.5 * PI), 0.0).unwrap();
        assert_circulates(&r, Circulation::Counterclockwise, 1e-12);
    }

    #[test]
    fn fig6_total_reflection_outside_overlap() {
        let sys = ThreePortSystem::symmetric(1.0, 2.0, 1.0, 2f64.sqrt(), FRAC_PI_2).unwrap();
        let e = dispersion_energy(&sys.crw_c, PI / 6.0).unwrap();
        let r = smatrix_three_port(&sys, e).unwrap();
        assert!((r.flow(Channel::C, Channel::C) - 1.0).abs() < 1e-12);
        assert!(r.flow(Channel::A, Channel::A).is_nan());
    }

    #[test]
    fn closed_form_matches_matrix_solve() {
        let cases = [
            (1.0, 1.0, 1.0, FRAC_PI_2, 0.0),
            (1.3, 0.7, 0.9, 1.1, 0.4),
            (1.0, 2.0, 1.4, 2.5, -1.2),
            // chain c evanescent
            (1.0, 0.3, 0.8, 4.0, 1.5),
        ];
        for (xi, xi_c, jc, phi, e) in cases {
            let sys = ThreePortSystem::symmetric(xi, xi_c, xi, jc, phi).unwrap();
            let a = smatrix_three_port(&sys, e).unwrap();
            let b = smatrix_three_port_closed_form(&sys, e).unwrap();
            for out in Channel::ALL {
                for inc in Channel::ALL {
                    let d = (a.amplitude(out, inc) - b.amplitude(out, inc)).norm();
                    assert!(d < 1e-12, "s_{out}{inc} differs by {d}");
                }
            }
        }
    }

    #[test]
    fn closed_form_rejects_asymmetric_systems() {
        let sys = ThreePortSystem::symmetric(1.0, 1.0, 0.8, 1.0, 1.0).unwrap();
        assert!(matches!(
            smatrix_three_port_closed_form(&sys, 0.0),
            Err(ScatterError::Precondition(_))
        ));
        let sys = equal(1.0);
        assert!(matches!(
            smatrix_three_port_closed_form(&sys, 2.5),
            Err(ScatterError::Precondition(_))
        ));
    }

    #[test]
    fn zero_phase_closed_form_is_symmetric() {
        let sys = ThreePortSystem::symmetric(1.0, 1.0, 1.0, 0.6, 0.0).unwrap();
        let r = smatrix_three_port_closed_form(&sys, -0.7).unwrap();
        assert!((r.amplitude(Channel::B, Channel::A) - r.amplitude(Channel::A, Channel::B)).norm() < 1e-14);
    }

    #[test]
    fn lossy_node_rejected() {
        let crw = CrwParams::default();
        let node = NodeParams::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.1).unwrap();
        assert!(ThreePortSystem::new(crw, crw, crw, node).is_err());
    }

    #[test]
    fn circulator_condition_examples() {
        match circulator_conditions(&equal(2.0 * PI / 3.0)) {
            CirculatorAnalysis::Perfect {
                k,
                direction,
                condition,
                ..
            } => {
                assert!((k - 2.0 * PI / 3.0).abs() < 1e-12);
                assert_eq!(direction, Circulation::Clockwise);
                assert_eq!(condition, CirculatorCondition::EqualCoupling);
            }
            other => panic!("{other:?}"),
        }
        match circulator_conditions(&equal(1.5 * PI)) {
            CirculatorAnalysis::Perfect { k, direction, .. } => {
                assert!((k - FRAC_PI_2).abs() < 1e-12);
                assert_eq!(direction, Circulation::Counterclockwise);
            }
            other => panic!("{other:?}"),
        }
        let half = ThreePortSystem::symmetric(1.0, 0.5, 1.0, 0.5f64.sqrt(), FRAC_PI_2).unwrap();
        match circulator_conditions(&half) {
            CirculatorAnalysis::Perfect { k, k_c, condition, .. } => {
                assert_eq!((k, k_c), (FRAC_PI_2, FRAC_PI_2));
                assert_eq!(condition, CirculatorCondition::GeometricMean);
            }
            other => panic!("{other:?}"),
        }
        let off = ThreePortSystem::symmetric(1.0, 2.0, 1.0, 1.0, FRAC_PI_2).unwrap();
        assert!(matches!(
            circulator_conditions(&off),
            CirculatorAnalysis::NoPerfectPoint { .. }
        ));
        assert!(matches!(
            circulator_conditions(&half.with_phi(1.0)),
            CirculatorAnalysis::NoPerfectPoint { .. }
        ));
        assert!(matches!(
            circulator_conditions(&equal(PI)),
            CirculatorAnalysis::NoPerfectPoint { .. }
        ));
    }

    #[test]
    fn band_overlap_examples() {
        let wide_c = ThreePortSystem::symmetric(1.0, 2.0, 1.0, 2f64.sqrt(), FRAC_PI_2).unwrap();
        let o = band_overlap(&wide_c);
        assert_eq!(o.overlap, Some((-2.0, 2.0)));
        // k_c in (π/3, 2π/3) lands in the overlap
        for kc in [0.34 * PI, 0.5 * PI, 0.66 * PI] {
            assert!(o.contains(dispersion_energy(&wide_c.crw_c, kc).unwrap()));
        }
        assert!(!o.contains(dispersion_energy(&wide_c.crw_c, 0.3 * PI).unwrap()));

        assert_eq!(band_overlap(&equal(1.0)).overlap, Some((-2.0, 2.0)));

        let disjoint = equal(1.0).with_delta(4.5);
        let o = band_overlap(&disjoint);
        assert_eq!(o.overlap, None);
        assert_eq!(o.propagating(0.0), vec![Channel::A, Channel::B]);
    }
}

//! Human- and machine-readable summaries of the optimal-condition checks.

use std::f64::consts::PI;

use serde::Serialize;

use crate::oracle::Junction;
use crate::threeport::{
    band_overlap, circulator_conditions_with_tol, BandOverlap, Circulation, CirculatorAnalysis, CirculatorCondition,
};
use crate::twoport::{
    analyze, nonreciprocity_conditions_with_tol, NonreciprocityConditions, TransferDirection, TwoPortAnalysis,
    TwoPortCondition,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ConditionReport {
    TwoPort {
        perfect: bool,
        analysis: TwoPortAnalysis,
        /// Optimal operating points for the system's couplings, when they exist.
        optimal: Option<NonreciprocityConditions>,
        summary: String,
    },
    ThreePort {
        perfect: bool,
        analysis: CirculatorAnalysis,
        bands: BandOverlap,
        summary: String,
    },
}

impl ConditionReport {
    pub fn summary(&self) -> &str {
        match self {
            ConditionReport::TwoPort { summary, .. } | ConditionReport::ThreePort { summary, .. } => summary,
        }
    }

    pub fn perfect(&self) -> bool {
        match self {
            ConditionReport::TwoPort { perfect, .. } | ConditionReport::ThreePort { perfect, .. } => *perfect,
        }
    }
}

/// Angle as a multiple of π, e.g. `0.5π`.
fn in_pi(x: f64) -> String {
    let s = format!("{:.4}", x / PI);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    format!("{s}π")
}

/// Short decimal rendering; round-off below `1e-12` shows as 0.
fn short(x: f64) -> String {
    let x = if x.abs() < 1e-12 { 0.0 } else { x };
    let s = format!("{x:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

fn transfer(direction: TransferDirection) -> &'static str {
    match direction {
        TransferDirection::AToB => "a → b (I_ba = 1, I_ab = 0)",
        TransferDirection::BToA => "b → a (I_ab = 1, I_ba = 0)",
    }
}

fn circulation(direction: Circulation) -> &'static str {
    match direction {
        Circulation::Clockwise => "clockwise (a → b → c → a)",
        Circulation::Counterclockwise => "counterclockwise (a → c → b → a)",
    }
}

fn two_port_condition(c: TwoPortCondition) -> &'static str {
    match c {
        TwoPortCondition::CriticalCoupling => "J_c² = γξ with Δ = 0",
        TwoPortCondition::DetunedBalance => "J_c² = Δξ/cos φ + 2ξ² and γξ = J_c²|sin φ|",
    }
}

pub fn report_conditions(system: &Junction, tol: f64) -> ConditionReport {
    match system {
        Junction::TwoPort(sys) => {
            let analysis = analyze(sys, tol);
            let mut lines = Vec::new();
            match &analysis {
                TwoPortAnalysis::Perfect { point, condition } => lines.push(format!(
                    "perfect nonreciprocity at k = {}, φ = {}: {}; {} satisfied",
                    in_pi(point.k),
                    in_pi(point.phi),
                    transfer(point.direction),
                    two_port_condition(*condition)
                )),
                TwoPortAnalysis::Unmet { condition, violations } => lines.push(format!(
                    "no perfect nonreciprocity ({} fails): {}",
                    two_port_condition(*condition),
                    violations.join("; ")
                )),
                TwoPortAnalysis::Reciprocal => {
                    lines.push("reciprocal: φ is a multiple of π, so I_ab = I_ba".into());
                }
                TwoPortAnalysis::NotApplicable { reason } => {
                    lines.push(format!("optimal conditions do not apply: {reason}"));
                }
            }
            let optimal = if matches!(analysis, TwoPortAnalysis::NotApplicable { .. }) {
                None
            } else {
                nonreciprocity_conditions_with_tol(sys.crw_a.xi, sys.node.j_ca, sys.node.gamma, sys.delta(), tol).ok()
            };
            match &optimal {
                Some(opt) => lines.push(format!(
                    "optimal phases for these couplings: φ = {} (k = {}, a → b) or φ = {} (k = {}, b → a); need J_ab = {} and Δ = {}",
                    in_pi(opt.points[0].phi),
                    in_pi(opt.points[0].k),
                    in_pi(opt.points[1].phi),
                    in_pi(opt.points[1].k),
                    short(opt.j_ab),
                    short(opt.required_delta)
                )),
                None if !matches!(analysis, TwoPortAnalysis::NotApplicable { .. }) => {
                    lines.push("no real optimal phase for these couplings (need 0 < γξ ≤ J_c²)".into());
                }
                None => {}
            }
            ConditionReport::TwoPort {
                perfect: matches!(analysis, TwoPortAnalysis::Perfect { .. }),
                analysis,
                optimal,
                summary: lines.join("\n"),
            }
        }
        Junction::ThreePort(sys) => {
            let analysis = circulator_conditions_with_tol(sys, tol);
            let bands = band_overlap(sys);
            let mut lines = vec![match &analysis {
                CirculatorAnalysis::Perfect {
                    k,
                    k_c,
                    direction,
                    condition,
                    ..
                } => format!(
                    "perfect circulation {} at k = {}, k_c = {}; {} satisfied",
                    circulation(*direction),
                    in_pi(*k),
                    in_pi(*k_c),
                    match condition {
                        CirculatorCondition::EqualCoupling => "J_c = ξ_c = ξ",
                        CirculatorCondition::GeometricMean => "J_c² = ξ·ξ_c with φ = π/2 or 3π/2",
                    }
                ),
                CirculatorAnalysis::NoPerfectPoint { reason } => format!("no perfect circulation: {reason}"),
                CirculatorAnalysis::NotApplicable { reason } => format!("circulator conditions do not apply: {reason}"),
            }];
            let band_list: Vec<String> = bands
                .bands
                .iter()
                .map(|b| format!("{} [{}, {}]", b.channel, short(b.lower), short(b.upper)))
                .collect();
            lines.push(match bands.overlap {
                Some((lo, hi)) => format!(
                    "bands: {}; common band [{}, {}]",
                    band_list.join(", "),
                    short(lo),
                    short(hi)
                ),
                None => format!("bands: {}; no common band", band_list.join(", ")),
            });
            ConditionReport::ThreePort {
                perfect: matches!(analysis, CirculatorAnalysis::Perfect { .. }),
                analysis,
                bands,
                summary: lines.join("\n"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::threeport::ThreePortSystem;
    use crate::twoport::TwoPortSystem;
    use crate::waveguide::DEFAULT_TOL;

    #[test]
    fn two_port_critical_coupling() {
        let sys = TwoPortSystem::symmetric(1.0, 1.0, 1.0, 1.0, 0.0, FRAC_PI_2).unwrap();
        let r = report_conditions(&sys.into(), DEFAULT_TOL);
        assert!(r.perfect());
        assert!(r.summary().contains("k = 0.5π, φ = 0.5π"), "{}", r.summary());
        assert!(r.summary().contains("J_c² = γξ"));
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["mode"], "two_port");
        assert_eq!(v["analysis"]["status"], "perfect");
        assert_eq!(v["analysis"]["condition"], "critical_coupling");
    }

    #[test]
    fn three_port_counterclockwise() {
        let sys = ThreePortSystem::symmetric(1.0, 1.0, 1.0, 1.0, 1.5 * PI).unwrap();
        let r = report_conditions(&sys.into(), DEFAULT_TOL);
        assert!(r.perfect());
        assert!(r.summary().contains("counterclockwise"));
        assert!(r.summary().contains("k = 0.5π"));
    }

    #[test]
    fn three_port_without_perfect_point() {
        let sys = ThreePortSystem::symmetric(1.0, 2.0, 1.0, 1.0, FRAC_PI_2).unwrap();
        let r = report_conditions(&sys.into(), DEFAULT_TOL);
        assert!(!r.perfect());
        assert!(r.summary().starts_with("no perfect circulation"));
        assert!(r.summary().contains("common band [-2, 2]"));
    }

    #[test]
    fn angle_formatting() {
        assert_eq!(in_pi(FRAC_PI_2), "0.5π");
        assert_eq!(in_pi(PI / 3.0), "0.3333π");
        assert_eq!(in_pi(2.0 * PI), "2π");
        assert_eq!(short(-6e-17), "0");
        assert_eq!(short(2f64.sqrt()), "1.414214");
    }
}

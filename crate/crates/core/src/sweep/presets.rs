//! Named sweeps for the standard figure panels (`fig2a` ... `fig6f`).
//!
//! All energies and couplings are in units of the chain hopping `xi = 1`.
//! Panels that plot the flow ratio `I_ab / I_ba` produce a [`RatioTable`];
//! every other panel produces an ordinary [`SweepTable`].

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::{self, Write};

use super::table::{write_csv, RatioTable};
use super::{run_sweep, EnergyBinding, SweepRange, SweepSpec, SweepTable, Variable};
use crate::error::{Result, ScatterError};
use crate::threeport::ThreePortSystem;
use crate::twoport::{params_for_detuning, smatrix_two_port, TwoPortSystem};
use crate::waveguide::{wave_number, Channel};

/// Samples per preset curve; odd so that `π/2` and `π` land on the grid.
pub const PRESET_SAMPLES: usize = 401;

pub const FIGURE_NAMES: [&str; 29] = [
    "fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f",
    "fig3g", "fig3h", "fig5a", "fig5b", "fig5c", "fig5d", "fig5e", "fig5f", "fig5g", "fig5h", "fig5i", "fig6a",
    "fig6b", "fig6c", "fig6d", "fig6e", "fig6f",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Figure {
    Sweep(SweepTable),
    Ratio(RatioTable),
}

impl Figure {
    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        match self {
            Figure::Sweep(t) => write_csv(t, w),
            Figure::Ratio(t) => t.write_csv(w),
        }
    }
}

fn k_range() -> SweepRange {
    SweepRange {
        variable: Variable::K,
        start: 0.0,
        stop: PI,
        samples: PRESET_SAMPLES,
    }
}

fn phi_range() -> SweepRange {
    SweepRange {
        variable: Variable::Phi,
        start: 0.0,
        stop: TAU,
        samples: PRESET_SAMPLES,
    }
}

fn kc_range() -> SweepRange {
    SweepRange {
        variable: Variable::KC,
        ..k_range()
    }
}

/// Two-port panels of the first figure: `(J_c, gamma, phi)`.
fn fig2_system(panel: char) -> Result<TwoPortSystem> {
    let (jc, gamma, phi) = match panel {
        'a' | 'c' => (1.0, 1.0, FRAC_PI_2),
        'b' => (1.0, 1.0, 1.5 * PI),
        'd' | 'f' => (2f64.sqrt(), 3f64.sqrt(), PI / 3.0),
        'e' => (2f64.sqrt(), 3f64.sqrt(), 5.0 * PI / 3.0),
        _ => unreachable!(),
    };
    TwoPortSystem::symmetric(1.0, 1.0, jc, gamma, 0.0, phi)
}

/// Bandwidth panels: resonant cavity at `phi = π/2` with `J_c² = γ ξ`.
fn fig3_resonant(panel: char) -> Result<TwoPortSystem> {
    let (gamma, jc) = match panel {
        'a' => (0.25, 0.5),
        'b' => (1.0, 1.0),
        'c' => (4.0, 2.0),
        _ => unreachable!(),
    };
    TwoPortSystem::symmetric(1.0, 1.0, jc, gamma, 0.0, FRAC_PI_2)
}

/// Detuned panels at `phi = π/3` with `(J_c, gamma)` balanced against the detuning.
fn fig3_detuned(panel: char) -> Result<TwoPortSystem> {
    let delta = match panel {
        'e' => -0.9,
        'f' => 0.1,
        'g' => 2.0,
        _ => unreachable!(),
    };
    let phi = PI / 3.0;
    let (jc, gamma) = params_for_detuning(1.0, delta, phi)?;
    TwoPortSystem::symmetric(1.0, 1.0, jc, gamma, delta, phi)
}

fn fig5_system(panel: char) -> Result<ThreePortSystem> {
    let phi = match panel {
        'a'..='c' => FRAC_PI_2,
        'd'..='f' => 2.0 * PI / 3.0,
        _ => 1.5 * PI,
    };
    ThreePortSystem::symmetric(1.0, 1.0, 1.0, 1.0, phi)
}

fn fig6_system(panel: char) -> Result<ThreePortSystem> {
    match panel {
        'a'..='c' => ThreePortSystem::symmetric(1.0, 0.5, 1.0, 0.5f64.sqrt(), FRAC_PI_2),
        _ => ThreePortSystem::symmetric(1.0, 2.0, 1.0, 2f64.sqrt(), FRAC_PI_2),
    }
}

/// Sweep specification behind a non-ratio panel.
pub fn figure_spec(name: &str) -> Result<SweepSpec> {
    let (fig, panel) = split(name)?;
    let fixed_k = |k: f64| {
        Some(EnergyBinding {
            k: Some(k),
            ..Default::default()
        })
    };
    match (fig, panel) {
        ('2', 'a' | 'b' | 'd' | 'e') => SweepSpec::new(fig2_system(panel)?.into(), k_range(), None, None),
        ('2', 'c') => SweepSpec::new(fig2_system(panel)?.into(), phi_range(), fixed_k(FRAC_PI_2), None),
        ('2', 'f') => SweepSpec::new(fig2_system(panel)?.into(), phi_range(), fixed_k(PI / 3.0), None),
        ('3', 'a'..='c') => SweepSpec::new(fig3_resonant(panel)?.into(), k_range(), None, None),
        ('3', 'e'..='g') => SweepSpec::new(fig3_detuned(panel)?.into(), k_range(), None, None),
        ('5', _) => SweepSpec::new(fig5_system(panel)?.into(), k_range(), None, None),
        // panels (c) and (f) follow a photon entering through chain c
        ('6', 'c' | 'f') => SweepSpec::new(fig6_system(panel)?.into(), kc_range(), None, None),
        ('6', _) => SweepSpec::new(fig6_system(panel)?.into(), k_range(), None, None),
        _ => Err(ScatterError::config(
            "figure",
            format!("{name} combines several sweeps into a flow ratio"),
        )),
    }
}

fn split(name: &str) -> Result<(char, char)> {
    if !FIGURE_NAMES.contains(&name) {
        return Err(unknown(name));
    }
    let mut chars = name.chars().skip(3);
    match (chars.next(), chars.next()) {
        (Some(f), Some(p)) => Ok((f, p)),
        _ => Err(unknown(name)),
    }
}

fn unknown(name: &str) -> ScatterError {
    ScatterError::config(
        "figure",
        format!("unknown figure `{name}`; valid names: {}", FIGURE_NAMES.join(", ")),
    )
}

/// `I_ab / I_ba` along `k` for each system.
pub fn flow_ratio(systems: &[(String, TwoPortSystem)], samples: usize) -> RatioTable {
    let step = PI / (samples - 1) as f64;
    let k: Vec<f64> = (0..samples)
        .map(|i| if i + 1 == samples { PI } else { step * i as f64 })
        .collect();
    let ratios = k
        .iter()
        .map(|&k| {
            systems
                .iter()
                .map(|(_, sys)| {
                    let energy = sys.crw_a.energy_unchecked(k);
                    if !wave_number(&sys.crw_a, energy).propagating {
                        return f64::NAN;
                    }
                    match smatrix_two_port(sys, energy) {
                        Ok(r) => r.flow(Channel::A, Channel::B) / r.flow(Channel::B, Channel::A),
                        Err(_) => f64::NAN,
                    }
                })
                .collect()
        })
        .collect();
    RatioTable {
        labels: systems.iter().map(|(l, _)| l.clone()).collect(),
        k,
        ratios,
    }
}

/// Data behind the named panel.
pub fn figure_preset(name: &str) -> Result<Figure> {
    let (fig, panel) = split(name)?;
    let ratio = |build: fn(char) -> Result<TwoPortSystem>, panels: [char; 3]| -> Result<Figure> {
        let systems = panels
            .iter()
            .map(|&p| Ok((format!("fig3{p}"), build(p)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Figure::Ratio(flow_ratio(&systems, PRESET_SAMPLES)))
    };
    match (fig, panel) {
        ('3', 'd') => ratio(fig3_resonant, ['a', 'b', 'c']),
        ('3', 'h') => ratio(fig3_detuned, ['e', 'f', 'g']),
        _ => Ok(Figure::Sweep(run_sweep(&figure_spec(name)?))),
    }
}

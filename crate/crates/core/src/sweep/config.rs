//! JSON run configuration.
//!
//! ```json
//! {
//!   "mode": "two_port",
//!   "params": {
//!     "crw_a": {"omega": 0, "xi": 1},
//!     "crw_b": {"omega": 0, "xi": 1},
//!     "node": {"j_ab": 1, "j_bc": 1, "j_ca": 1, "phi": 1.5707963267948966,
//!              "omega_c": 0, "gamma": 1}
//!   },
//!   "sweep": {"variable": "k", "start": 0, "stop": 3.141592653589793, "samples": 201},
//!   "output": {"path": "fig.csv", "format": "csv"}
//! }
//! ```

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Result, ScatterError};
use crate::oracle::Junction;
use crate::threeport::ThreePortSystem;
use crate::twoport::TwoPortSystem;
use crate::waveguide::{wave_number, CrwParams, NodeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    TwoPort,
    ThreePort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    /// Wave number in chain a; sets the energy.
    K,
    /// Wave number in chain c (three-port only); sets the energy.
    KC,
    Phi,
    /// Detuning of the cavity (two-port) or chain c (three-port) from chain a.
    Delta,
    Energy,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::K => "k",
            Variable::KC => "k_c",
            Variable::Phi => "phi",
            Variable::Delta => "delta",
            Variable::Energy => "energy",
        }
    }

    fn sets_energy(self) -> bool {
        matches!(self, Variable::K | Variable::KC | Variable::Energy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub variable: Variable,
    pub start: f64,
    pub stop: f64,
    pub samples: usize,
}

/// Fixes the photon energy directly or through a wave number.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyBinding {
    pub k: Option<f64>,
    pub k_c: Option<f64>,
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoPortParams {
    #[serde(default)]
    crw_a: CrwParams,
    #[serde(default)]
    crw_b: CrwParams,
    node: NodeParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThreePortNode {
    j_ab: f64,
    j_bc: f64,
    j_ca: f64,
    phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThreePortParams {
    #[serde(default)]
    crw_a: CrwParams,
    #[serde(default)]
    crw_b: CrwParams,
    #[serde(default)]
    crw_c: CrwParams,
    node: ThreePortNode,
}

/// Raw document as read from disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub mode: Mode,
    pub params: Value,
    #[serde(default)]
    pub sweep: Option<SweepRange>,
    /// Energy for sweeps over `phi` or `delta`.
    #[serde(default)]
    pub fixed: Option<EnergyBinding>,
    /// Single evaluation point for the `smatrix` verb.
    #[serde(default)]
    pub point: Option<EnergyBinding>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ScatterError::config("<document>", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScatterError::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn junction(&self) -> Result<Junction> {
        let bad = |e: ScatterError| ScatterError::config("params", e.to_string());
        match self.mode {
            Mode::TwoPort => {
                let p: TwoPortParams = serde_json::from_value(self.params.clone())
                    .map_err(|e| ScatterError::config("params", e.to_string()))?;
                Ok(TwoPortSystem::new(p.crw_a, p.crw_b, p.node).map_err(bad)?.into())
            }
            Mode::ThreePort => {
                let p: ThreePortParams = serde_json::from_value(self.params.clone())
                    .map_err(|e| ScatterError::config("params", e.to_string()))?;
                let n = p.node;
                let node = NodeParams::new(n.j_ab, n.j_bc, n.j_ca, n.phi, p.crw_c.omega, 0.0).map_err(bad)?;
                Ok(ThreePortSystem::new(p.crw_a, p.crw_b, p.crw_c, node)
                    .map_err(bad)?
                    .into())
            }
        }
    }

    /// Validated sweep description; requires a `sweep` block.
    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let range = self
            .sweep
            .ok_or_else(|| ScatterError::config("sweep", "missing; the sweep verb needs a sweep block"))?;
        SweepSpec::new(self.junction()?, range, self.fixed, self.output.clone())
    }

    /// Energy of the single evaluation point for the `smatrix` verb.
    pub fn point_energy(&self) -> Result<f64> {
        let binding = self
            .point
            .ok_or_else(|| ScatterError::config("point", "missing; give one of k, k_c or energy"))?;
        resolve_energy(&self.junction()?, &binding, "point")
    }
}

pub(crate) fn resolve_energy(system: &Junction, binding: &EnergyBinding, field: &str) -> Result<f64> {
    let set = [binding.k.is_some(), binding.k_c.is_some(), binding.energy.is_some()];
    if set.iter().filter(|&&s| s).count() != 1 {
        return Err(ScatterError::config(
            field,
            "exactly one of k, k_c or energy must be given",
        ));
    }
    let from_k = |crw: &CrwParams, k: f64, name: &str| -> Result<f64> {
        if !(0.0..=PI).contains(&k) {
            return Err(ScatterError::config(
                format!("{field}.{name}"),
                format!("{k} outside [0, π]"),
            ));
        }
        Ok(crw.energy_unchecked(k))
    };
    if let Some(k) = binding.k {
        return from_k(system.crw(crate::Channel::A)?, k, "k");
    }
    if let Some(kc) = binding.k_c {
        let crw = system
            .crw(crate::Channel::C)
            .map_err(|_| ScatterError::config(format!("{field}.k_c"), "only valid for three_port"))?;
        return from_k(crw, kc, "k_c");
    }
    let e = binding.energy.unwrap_or(f64::NAN);
    if !e.is_finite() {
        return Err(ScatterError::config(format!("{field}.energy"), "must be finite"));
    }
    Ok(e)
}

/// A checked sweep: exactly one variable, range inside its domain, at least two samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub system: Junction,
    pub range: SweepRange,
    /// Energy held fixed while sweeping `phi` or `delta`.
    pub fixed_energy: Option<f64>,
    pub output: Option<OutputSpec>,
}

impl SweepSpec {
    pub fn new(
        system: Junction,
        range: SweepRange,
        fixed: Option<EnergyBinding>,
        output: Option<OutputSpec>,
    ) -> Result<Self> {
        if range.samples < 2 {
            return Err(ScatterError::config("sweep.samples", format!("{} < 2", range.samples)));
        }
        if !range.start.is_finite() {
            return Err(ScatterError::config("sweep.start", "must be finite"));
        }
        if !range.stop.is_finite() {
            return Err(ScatterError::config("sweep.stop", "must be finite"));
        }
        if range.start >= range.stop {
            return Err(ScatterError::config(
                "sweep.stop",
                format!("stop {} must exceed start {}", range.stop, range.start),
            ));
        }
        let domain = match range.variable {
            Variable::K | Variable::KC => Some((0.0, PI, "[0, π]")),
            Variable::Phi => Some((0.0, TAU, "[0, 2π]")),
            Variable::Delta | Variable::Energy => None,
        };
        if let Some((lo, hi, label)) = domain {
            // allow the endpoint written as a decimal literal of π or 2π
            let slack = 1e-12;
            if range.start < lo - slack || range.stop > hi + slack {
                return Err(ScatterError::config(
                    "sweep",
                    format!(
                        "{} range [{}, {}] outside {label}",
                        range.variable.name(),
                        range.start,
                        range.stop
                    ),
                ));
            }
        }
        if range.variable == Variable::KC && matches!(system, Junction::TwoPort(_)) {
            return Err(ScatterError::config("sweep.variable", "k_c only exists for three_port"));
        }
        let fixed_energy = if range.variable.sets_energy() {
            if fixed.is_some() {
                return Err(ScatterError::config(
                    "fixed",
                    format!("sweeping {} already sets the energy", range.variable.name()),
                ));
            }
            None
        } else {
            let binding = fixed.ok_or_else(|| {
                ScatterError::config(
                    "fixed",
                    format!("sweeping {} needs a fixed k, k_c or energy", range.variable.name()),
                )
            })?;
            Some(resolve_energy(&system, &binding, "fixed")?)
        };
        Ok(Self {
            system,
            range,
            fixed_energy,
            output,
        })
    }

    /// Evenly spaced sample values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let SweepRange {
            start, stop, samples, ..
        } = self.range;
        let step = (stop - start) / (samples - 1) as f64;
        (0..samples)
            .map(|i| {
                if i + 1 == samples {
                    stop
                } else {
                    start + step * i as f64
                }
            })
            .collect()
    }

    /// System and photon energy for one swept value.
    pub fn at(&self, value: f64) -> (Junction, f64) {
        let mut system = self.system;
        let crw_energy = |crw: &CrwParams, k: f64| crw.energy_unchecked(k.clamp(0.0, PI));
        match self.range.variable {
            Variable::Phi => match &mut system {
                Junction::TwoPort(s) => *s = s.with_phi(value),
                Junction::ThreePort(s) => *s = s.with_phi(value),
            },
            Variable::Delta => match &mut system {
                Junction::TwoPort(s) => *s = s.with_delta(value),
                Junction::ThreePort(s) => *s = s.with_delta(value),
            },
            _ => {}
        }
        let energy = match self.range.variable {
            Variable::K => crw_energy(system.crw(crate::Channel::A).expect("chain a"), value),
            Variable::KC => crw_energy(system.crw(crate::Channel::C).expect("validated three-port"), value),
            Variable::Energy => value,
            Variable::Phi | Variable::Delta => self.fixed_energy.expect("validated binding"),
        };
        (system, energy)
    }
}

/// Wave number reported in tables: real part when not evanescent, else `NaN`.
pub(crate) fn table_k(crw: &CrwParams, energy: f64) -> f64 {
    let w = wave_number(crw, energy);
    if w.is_evanescent() {
        f64::NAN
    } else {
        w.k.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_PORT: &str = r#"{
        "mode": "two_port",
        "params": {"node": {"j_ab": 1, "j_bc": 1, "j_ca": 1, "phi": 1.5707963267948966, "gamma": 1}},
        "sweep": {"variable": "k", "start": 0, "stop": 3.141592653589793, "samples": 5}
    }"#;

    fn field_of(err: ScatterError) -> String {
        match err {
            ScatterError::Config { field, .. } => field,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn parses_minimal_two_port() {
        let cfg = Config::from_json(TWO_PORT).unwrap();
        let spec = cfg.sweep_spec().unwrap();
        let values = spec.values();
        assert_eq!(values.len(), 5);
        assert_eq!(values[0], 0.0);
        assert_eq!(values[4], PI);
        match spec.system {
            Junction::TwoPort(s) => assert_eq!(s.crw_a, CrwParams::default()),
            _ => panic!(),
        }
    }

    #[test]
    fn reports_offending_fields() {
        let mut cfg = Config::from_json(TWO_PORT).unwrap();
        cfg.sweep.as_mut().unwrap().samples = 1;
        assert_eq!(field_of(cfg.sweep_spec().unwrap_err()), "sweep.samples");

        let mut cfg = Config::from_json(TWO_PORT).unwrap();
        cfg.sweep.as_mut().unwrap().stop = 4.0;
        assert_eq!(field_of(cfg.sweep_spec().unwrap_err()), "sweep");

        let mut cfg = Config::from_json(TWO_PORT).unwrap();
        cfg.sweep.as_mut().unwrap().variable = Variable::Phi;
        assert_eq!(field_of(cfg.sweep_spec().unwrap_err()), "fixed");

        let mut cfg = Config::from_json(TWO_PORT).unwrap();
        cfg.sweep.as_mut().unwrap().variable = Variable::KC;
        assert_eq!(field_of(cfg.sweep_spec().unwrap_err()), "sweep.variable");

        let mut cfg = Config::from_json(TWO_PORT).unwrap();
        cfg.params["node"]["gamma"] = serde_json::json!(-1.0);
        assert_eq!(field_of(cfg.sweep_spec().unwrap_err()), "params");

        let err = Config::from_json(r#"{"mode": "four_port", "params": {}}"#).unwrap_err();
        assert!(err.to_string().contains("four_port"));
    }

    #[test]
    fn three_port_rejects_damping() {
        let cfg = Config::from_json(
            r#"{"mode": "three_port",
                "params": {"node": {"j_ab": 1, "j_bc": 1, "j_ca": 1, "phi": 1, "gamma": 0.1}}}"#,
        )
        .unwrap();
        let err = cfg.junction().unwrap_err();
        assert_eq!(field_of(err.clone()), "params");
        assert!(err.to_string().contains("gamma"));
    }

    #[test]
    fn energy_bindings() {
        let cfg = Config::from_json(
            r#"{"mode": "three_port",
                "params": {"crw_c": {"xi": 2}, "node": {"j_ab": 1, "j_bc": 1, "j_ca": 1, "phi": 1}},
                "point": {"k_c": 1.5707963267948966}}"#,
        )
        .unwrap();
        assert!(cfg.point_energy().unwrap().abs() < 1e-15);

        let junction = cfg.junction().unwrap();
        let both = EnergyBinding {
            k: Some(1.0),
            energy: Some(0.0),
            k_c: None,
        };
        assert_eq!(
            field_of(resolve_energy(&junction, &both, "point").unwrap_err()),
            "point"
        );
    }
}

//! Parameter sweeps over a junction and their tabular output.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::ScatterError;
use crate::oracle::Junction;
use crate::result::ScatteringResult;
use crate::threeport::smatrix_three_port;
use crate::twoport::smatrix_two_port;
use crate::waveguide::Channel;

pub mod config;
pub mod presets;
pub mod report;
pub mod table;

pub use config::{Config, EnergyBinding, Format, Mode, OutputSpec, SweepRange, SweepSpec, Variable};

/// Why a row's numbers are partly or wholly `NaN`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowFlag {
    Ok,
    /// Some chains do not propagate; their incident columns are `NaN`.
    Evanescent(Vec<Channel>),
    /// The energy sits exactly on a band edge of some chain.
    BandEdge,
    Singular,
    /// Lossless dissipative cavity driven on resonance.
    Pole,
}

impl RowFlag {
    pub fn is_failure(&self) -> bool {
        matches!(self, RowFlag::BandEdge | RowFlag::Singular | RowFlag::Pole)
    }
}

impl fmt::Display for RowFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowFlag::Ok => f.write_str("ok"),
            RowFlag::Evanescent(chs) => {
                f.write_str("evanescent_")?;
                chs.iter().try_for_each(|c| f.write_str(c.label()))
            }
            RowFlag::BandEdge => f.write_str("band_edge"),
            RowFlag::Singular => f.write_str("singular"),
            RowFlag::Pole => f.write_str("pole"),
        }
    }
}

impl Serialize for RowFlag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One sample of a sweep. Matrices are row-major, `[outgoing][incident]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub swept: f64,
    pub energy: f64,
    pub k: f64,
    /// Wave number in chain c (`NaN` for the two-port junction).
    pub k_c: f64,
    pub phi: f64,
    pub delta: f64,
    pub flows: Vec<Vec<f64>>,
    /// `|s_{l'l}|²`.
    pub amplitude_sq: Vec<Vec<f64>>,
    /// `1 - Σ_l' I_{l'l}` per incident channel.
    pub absorption: Vec<f64>,
    pub propagating: Vec<bool>,
    pub flag: RowFlag,
}

impl Row {
    pub fn flow(&self, outgoing: Channel, incident: Channel) -> f64 {
        self.flows[outgoing.index()][incident.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub mode: Mode,
    pub variable: Variable,
    pub rows: Vec<Row>,
}

impl SweepTable {
    /// True when no sample produced any numbers.
    pub fn all_failed(&self) -> bool {
        self.rows.iter().all(|r| r.flag.is_failure())
    }
}

fn evaluate(system: &Junction, energy: f64) -> crate::Result<ScatteringResult> {
    match system {
        Junction::TwoPort(s) => smatrix_two_port(s, energy),
        Junction::ThreePort(s) => smatrix_three_port(s, energy),
    }
}

fn sample(spec: &SweepSpec, value: f64) -> Row {
    let (system, energy) = spec.at(value);
    let channels = system.channels();
    let n = channels.len();
    let crw = |ch| *system.crw(ch).expect("channel of this junction");
    let (mut phi, delta, k_c) = match &system {
        Junction::TwoPort(s) => (s.node.phi, s.delta(), f64::NAN),
        Junction::ThreePort(s) => (s.node.phi, s.delta(), config::table_k(&s.crw_c, energy)),
    };
    if spec.range.variable == Variable::Phi {
        // keep 2π as 2π on the axis rather than wrapping it to 0
        phi = value;
    }
    let waves: Vec<_> = channels
        .iter()
        .map(|&ch| crate::waveguide::wave_number(&crw(ch), energy))
        .collect();
    let mut row = Row {
        swept: value,
        energy,
        k: config::table_k(&crw(Channel::A), energy),
        k_c,
        phi,
        delta,
        flows: vec![vec![f64::NAN; n]; n],
        amplitude_sq: vec![vec![f64::NAN; n]; n],
        absorption: vec![f64::NAN; n],
        propagating: waves.iter().map(|w| w.propagating).collect(),
        flag: RowFlag::Ok,
    };
    if waves.iter().any(|w| w.is_band_edge()) {
        row.flag = RowFlag::BandEdge;
        return row;
    }
    let result = match evaluate(&system, energy) {
        Ok(r) => r,
        Err(ScatterError::Pole { .. }) => {
            row.flag = RowFlag::Pole;
            return row;
        }
        Err(_) => {
            row.flag = RowFlag::Singular;
            return row;
        }
    };
    for (i, &out) in channels.iter().enumerate() {
        for (j, &inc) in channels.iter().enumerate() {
            row.flows[i][j] = result.flow(out, inc);
            row.amplitude_sq[i][j] = result.amplitude(out, inc).norm_sqr();
        }
    }
    for (j, &inc) in channels.iter().enumerate() {
        row.absorption[j] = result.absorption(inc);
    }
    let evanescent: Vec<Channel> = channels
        .iter()
        .zip(&waves)
        .filter(|(_, w)| !w.propagating)
        .map(|(&c, _)| c)
        .collect();
    if !evanescent.is_empty() {
        row.flag = RowFlag::Evanescent(evanescent);
    }
    row
}

/// Evaluates every sample; rows come back in swept-variable order.
pub fn run_sweep(spec: &SweepSpec) -> SweepTable {
    let rows = spec.values().into_par_iter().map(|v| sample(spec, v)).collect();
    SweepTable {
        mode: match spec.system {
            Junction::TwoPort(_) => Mode::TwoPort,
            Junction::ThreePort(_) => Mode::ThreePort,
        },
        variable: spec.range.variable,
        rows,
    }
}

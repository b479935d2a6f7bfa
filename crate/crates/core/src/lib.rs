//! Single-photon scattering in networks of semi-infinite coupled-resonator
//! waveguides (CRWs) joined at a three-cavity junction.
//!
//! Two configurations are supported:
//!
//! * [`twoport`]: two chains coupled to each other and to a lossy cavity,
//!   which makes photon transfer between the chains nonreciprocal when the
//!   loop phase breaks time-reversal symmetry.
//! * [`threeport`]: the lossy cavity replaced by a third chain, giving a
//!   T-shaped junction that can act as a circulator.
//!
//! [`oracle`] re-derives every amplitude from the raw lattice equations, and
//! [`sweep`] drives parameter sweeps, figure presets and condition reports.

pub mod error;
pub mod linalg;
pub mod oracle;
pub mod result;
pub mod sweep;

pub mod threeport;
pub mod twoport;
pub mod verify;

pub mod waveguide;

pub use error::{Result, ScatterError};
pub use oracle::{compare, solve_scattering, Junction, LatticeSolution};
pub use result::ScatteringResult;
pub use threeport::{smatrix_three_port, smatrix_three_port_closed_form, ThreePortSystem};
pub use twoport::{smatrix_two_port, TwoPortSystem};
pub use waveguide::{dispersion_energy, flow, wave_number, Channel, ChannelWave, CrwParams, NodeParams};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, ScatterError};
use crate::waveguide::{flow, Channel, ChannelWave};

/// Amplitudes `s_{l'l}` and flows `I_{l'l}` of an n-port junction at one energy.
///
/// Rows index the outgoing channel, columns the incident one. Flow columns
/// whose incident channel does not propagate are `NaN`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringResult {
    pub energy: f64,
    pub channels: Vec<Channel>,
    pub waves: Vec<ChannelWave>,
    amplitudes: Vec<Complex64>,
    flows: Vec<f64>,
    /// `|det| / scale` of the defining linear system, in `(0, 1]`; small
    /// values flag points near a singularity.
    pub conditioning: f64,
}

impl ScatteringResult {
    pub(crate) fn new(
        energy: f64,
        channels: Vec<Channel>,
        waves: Vec<ChannelWave>,
        amplitudes: Vec<Complex64>,
        conditioning: f64,
    ) -> Self {
        let n = channels.len();
        debug_assert_eq!(waves.len(), n);
        debug_assert_eq!(amplitudes.len(), n * n);
        let mut flows = vec![f64::NAN; n * n];
        for col in 0..n {
            for row in 0..n {
                if let Ok(f) = flow(amplitudes[row * n + col], &waves[row], &waves[col]) {
                    flows[row * n + col] = f;
                }
            }
        }
        Self {
            energy,
            channels,
            waves,
            amplitudes,
            flows,
            conditioning,
        }
    }

    pub fn ports(&self) -> usize {
        self.channels.len()
    }

    pub fn position(&self, channel: Channel) -> Result<usize> {
        self.channels
            .iter()
            .position(|&c| c == channel)
            .ok_or_else(|| ScatterError::Mismatch(format!("channel {channel} is not part of this junction")))
    }

    fn slot(&self, outgoing: Channel, incident: Channel) -> usize {
        let pos = |c| self.position(c).unwrap_or_else(|e| panic!("{e}"));
        pos(outgoing) * self.ports() + pos(incident)
    }

    /// `s_{out,in}`. Panics if either channel is absent.
    pub fn amplitude(&self, outgoing: Channel, incident: Channel) -> Complex64 {
        self.amplitudes[self.slot(outgoing, incident)]
    }

    /// `I_{out,in}`; `NaN` when the incident channel does not propagate.
    pub fn flow(&self, outgoing: Channel, incident: Channel) -> f64 {
        self.flows[self.slot(outgoing, incident)]
    }

    pub fn wave(&self, channel: Channel) -> &ChannelWave {
        &self.waves[self.position(channel).unwrap_or_else(|e| panic!("{e}"))]
    }

    pub fn incident_propagating(&self, incident: Channel) -> bool {
        self.wave(incident).propagating
    }

    /// Total outgoing flow for a photon entering through `incident`.
    pub fn column_flow_sum(&self, incident: Channel) -> f64 {
        self.channels.iter().map(|&out| self.flow(out, incident)).sum()
    }

    /// Fraction of the incident flux that does not leave through any port.
    pub fn absorption(&self, incident: Channel) -> f64 {
        1.0 - self.column_flow_sum(incident)
    }

    /// Row-major amplitude matrix.
    pub fn amplitude_matrix(&self) -> Vec<Vec<Complex64>> {
        self.amplitudes.chunks(self.ports()).map(<[_]>::to_vec).collect()
    }

    /// Row-major flow matrix.
    pub fn flow_matrix(&self) -> Vec<Vec<f64>> {
        self.flows.chunks(self.ports()).map(<[_]>::to_vec).collect()
    }

    /// Largest `|s_{l'l} - s_{ll'}|`; zero for a reciprocal junction.
    pub fn reciprocity_defect(&self) -> f64 {
        let n = self.ports();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.amplitudes[i * n + j] - self.amplitudes[j * n + i]).norm());
            }
        }
        worst
    }
}

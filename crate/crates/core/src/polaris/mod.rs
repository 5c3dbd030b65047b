//! Pilot-tone engine: frequency-offset estimation, pilot extraction, DPT and
//! SPT Jones-matrix estimation, inverse application, and the analytic model
//! of how receiver XY skew corrupts the estimate.

mod estimate;
mod extract;
mod foe;

pub use estimate::{
    apply_inverse_jones, estimate_jones_dpt, estimate_jones_spt, fit_mixing_matrix, interpolate_trajectory,
    leakage_db, predict_skewed_jones, DemuxDiagnostics, JonesEstimate, DPT_DEGENERATE_DET, SPT_PILOT_LOST_RATIO,
};
pub use extract::{extract_pilot, lowpass_fir, ExtractorConfig, LpfKind, PilotTrace, Pol};
pub use foe::{estimate_frequency_offset, estimate_frequency_offset_tones, DEFAULT_SEARCH_SPAN};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::DualPolWaveform;
use crate::tx::{PilotDescriptor, PilotScheme};

/// Extract the pilots of `p` and estimate the channel.
pub fn estimate_jones<T: Real>(w: &DualPolWaveform<T>, p: &PilotDescriptor, cfg: &ExtractorConfig) -> Result<JonesEstimate> {
    match p.scheme {
        PilotScheme::Spt => {
            let (px, py) = extract_pilot(w, p.f1, cfg)?;
            estimate_jones_spt(&px, &py)
        }
        PilotScheme::Dpt => {
            let (px1, py1) = extract_pilot(w, p.f1, cfg)?;
            let (px2, py2) = extract_pilot(w, p.f2, cfg)?;
            estimate_jones_dpt(&px1, &py1, &px2, &py2)
        }
        other => Err(Error::InvalidParameter(format!("{other:?} pilots cannot demultiplex polarization"))),
    }
}

/// Pilot-based polarization demultiplexing: estimate, then invert.
pub fn demultiplex<T: Real>(
    w: &DualPolWaveform<T>,
    p: &PilotDescriptor,
    cfg: &ExtractorConfig,
) -> Result<(DualPolWaveform<T>, JonesEstimate, DemuxDiagnostics)> {
    let est = estimate_jones(w, p, cfg)?;
    let (out, diag) = apply_inverse_jones(w, &est)?;
    Ok((out, est, diag))
}

//! Transmit-side DSP: PRBS payload, 16QAM mapping, DSCM multiplexing and
//! pilot-tone insertion.

mod dscm;
mod pilots;
mod prbs;
mod qam;

pub use dscm::{build_dscm, DscmConfig, FramePayload};
pub use pilots::{
    check_pilot_placement, generate_mgpd_training, insert_pilots, pilot_amplitude, pilot_waveform,
    PilotDescriptor, PilotScheme, PlacementWarning,
};
pub use prbs::{generate_prbs, prbs_period, Prbs};
pub use qam::{
    demap_16qam, gray_table, gray_table_json, map_16qam, qam16_point, qam16_points, qam16_radii,
    GrayEntry, QAM16_SCALE,
};

//! Receive chain after polarization demultiplexing: subcarrier demux and
//! matched filtering, per-subcarrier CDC, retiming, synchronization,
//! adaptive equalization, carrier recovery and BER counting.

mod ber;
mod bps;
mod demux;
mod equalizer;
mod sync;

pub use ber::{measure_ber, q_factor_db, BerCell, BerReport, HD_FEC_THRESHOLD, MIN_CONFIDENT_BITS};
pub use bps::{bps_carrier_recovery, resolve_quadrant, slice_16qam, BpsConfig};
pub use demux::{cdc_subcarrier, demux_subcarriers, retime, SubcarrierStreams};
pub use equalizer::{equalize_mimo_cmma, equalize_siso_cmma, EqualizerConfig, MimoOutput, SINGULARITY_CORRELATION};
pub use sync::{synchronize, SyncResult, SYNC_PEAK_RATIO};

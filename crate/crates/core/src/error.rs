use thiserror::Error;

/// Errors raised by the DSP library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    RateMismatch(f64, f64),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("frequency shift of {0} Hz is beyond Nyquist")]
    BeyondNyquist(f64),
    #[error("downsampling to {new_rate} Hz would alias {in_band} Hz of in-band content")]
    AliasingDownsample { new_rate: f64, in_band: f64 },
    #[error("unsupported PRBS order {0}")]
    UnsupportedPrbsOrder(u32),
    #[error("pilot frequency {0} Hz is not on the DFT grid")]
    OffGrid(f64),
    #[error("subcarrier spectra overlap: guard band {0} Hz")]
    SpectralOverlap(f64),
    #[error("pilot not found")]
    PilotNotFound,
    #[error("insufficient polarization crosstalk")]
    InsufficientCrosstalk,
    #[error("sync failed")]
    SyncFailed,
    #[error("equalizer diverged")]
    EqualizerDiverged,
}

pub type Result<T> = std::result::Result<T, Error>;

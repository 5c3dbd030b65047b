//! End-to-end trial: transmitter, channel and receiver for one scheme.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_cd, apply_laser, apply_rsop_pdl, apply_rx_frontend, apply_tx_iq_delay, recombine, set_osnr, ImpairmentConfig};
use crate::error::{Error, Result};
use crate::mgpd::compensate_skew_by;
use crate::polaris::{demultiplex, estimate_frequency_offset_tones, ExtractorConfig, JonesEstimate, DEFAULT_SEARCH_SPAN};
use crate::rx::{
    bps_carrier_recovery, cdc_subcarrier, demux_subcarriers, equalize_mimo_cmma, equalize_siso_cmma, measure_ber,
    resolve_quadrant, retime, synchronize, BerReport, BpsConfig, EqualizerConfig, SubcarrierStreams,
};
use crate::scalar::Real;
use crate::signal::{frequency_shift, DualPolWaveform, QuadTributaryCapture};
use crate::tx::{build_dscm, check_pilot_placement, demap_16qam, insert_pilots, DscmConfig, FramePayload, PilotDescriptor, PilotScheme};

/// Polarization demultiplexing strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scheme {
    /// Single pilot tone, then per-polarization SISO equalizers.
    Spt,
    /// Dual pilot tones, then SISO equalizers.
    Dpt,
    /// 2x2 butterfly equalizer per subcarrier; any pilot is used for FOE only.
    MimoCmma,
    /// No polarization demultiplexing, SISO equalizers only.
    None,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Spt => "SPT",
            Scheme::Dpt => "DPT",
            Scheme::MimoCmma => "MIMO_CMMA",
            Scheme::None => "NONE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReceiverConfig {
    pub extractor: ExtractorConfig,
    pub equalizer: EqualizerConfig,
    pub bps: BpsConfig,
    pub foe_search_span_hz: f64,
    /// Symbols per subcarrier excluded from BER counting at the start
    /// (equalizer convergence) and end (block wrap).
    pub skip_head_symbols: usize,
    pub skip_tail_symbols: usize,
    pub cd_compensation: bool,
}

impl Default for ReceiverConfig {
    fn default() -> Self {
        Self {
            extractor: ExtractorConfig::default(),
            equalizer: EqualizerConfig::default(),
            bps: BpsConfig::default(),
            foe_search_span_hz: DEFAULT_SEARCH_SPAN,
            skip_head_symbols: 22_016,
            skip_tail_symbols: 256,
            cd_compensation: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrialConfig {
    pub scheme: Scheme,
    pub dscm: DscmConfig,
    pub pilots: PilotDescriptor,
    pub impairments: ImpairmentConfig,
    pub receiver: ReceiverConfig,
    pub symbols_per_subcarrier: usize,
    pub seed: u64,
    /// Receiver XY skew (s) removed from the capture before recombination.
    pub skew_compensation: Option<f64>,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Spt,
            dscm: DscmConfig::default(),
            pilots: PilotDescriptor::default(),
            impairments: ImpairmentConfig::default(),
            receiver: ReceiverConfig::default(),
            symbols_per_subcarrier: 32_768,
            seed: 1,
            skew_compensation: None,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        self.dscm.validate()?;
        self.impairments.validate()?;
        self.receiver.equalizer.validate()?;
        let need = match self.scheme {
            Scheme::Spt => Some(PilotScheme::Spt),
            Scheme::Dpt => Some(PilotScheme::Dpt),
            _ => None,
        };
        if let Some(s) = need {
            if self.pilots.scheme != s {
                return Err(Error::InvalidParameter(format!("{} needs {:?} pilots, got {:?}", self.scheme.name(), s, self.pilots.scheme)));
            }
        }
        if matches!(self.scheme, Scheme::Spt | Scheme::Dpt) {
            self.receiver.extractor.validate(self.dscm.sample_rate(), self.impairments.rsop.omega)?;
        }
        let rx = &self.receiver;
        if rx.skip_head_symbols + rx.skip_tail_symbols >= self.symbols_per_subcarrier {
            return Err(Error::InvalidParameter(format!(
                "no symbols left to count: {} per subcarrier, skipping {} + {}",
                self.symbols_per_subcarrier, rx.skip_head_symbols, rx.skip_tail_symbols
            )));
        }
        Ok(())
    }
}

/// Transmitted frame and waveform.
#[derive(Debug, Clone)]
pub struct Transmitted<T: Real> {
    pub payload: FramePayload<T>,
    pub waveform: DualPolWaveform<T>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub ber: BerReport,
    pub freq_offset_hz: f64,
    pub flagged_samples: usize,
    pub held_samples: usize,
    pub mimo_singular: bool,
    pub warnings: Vec<String>,
}

impl TrialResult {
    pub fn diagnostics(&self) -> String {
        let mut d = Vec::new();
        if self.ber.low_confidence {
            d.push(format!("low-confidence ({} bits)", self.ber.bits));
        }
        if self.held_samples > 0 {
            d.push(format!("held {} estimates", self.held_samples));
        }
        if self.mimo_singular {
            d.push("CMA singularity".to_string());
        }
        d.extend(self.warnings.iter().cloned());
        d.join("; ")
    }
}

pub fn transmit<T: Real>(cfg: &TrialConfig) -> Result<Transmitted<T>> {
    cfg.validate()?;
    let payload = FramePayload::<T>::generate(cfg.dscm.num_subcarriers, cfg.symbols_per_subcarrier, cfg.seed)?;
    let mut waveform = build_dscm(&payload, &cfg.dscm)?;
    let mut warnings = Vec::new();
    if cfg.pilots.scheme != PilotScheme::None {
        for w in check_pilot_placement(&cfg.pilots, &cfg.dscm)? {
            warnings.push(format!("pilot {:.3e} Hz inside subcarrier {} band", w.pilot_freq, w.subcarrier));
        }
        waveform = insert_pilots(&waveform, &cfg.pilots)?;
    }
    Ok(Transmitted { payload, waveform, warnings })
}

/// Transmitter IQ delay, polarization channel, dispersion, lasers, ASE and
/// the receiver front end.
pub fn propagate<T: Real>(w: &DualPolWaveform<T>, imp: &ImpairmentConfig, seed: u64) -> Result<QuadTributaryCapture<T>> {
    let w = apply_tx_iq_delay(w, imp.frontend.tau_txi)?;
    let w = apply_rsop_pdl(&w, &imp.rsop)?;
    let w = apply_cd(&w, &imp.link, 1.0)?;
    let w = apply_laser(&w, &imp.link, seed)?;
    let w = set_osnr(&w, imp.link.osnr_db, seed)?;
    apply_rx_frontend(&w, &imp.frontend)
}

/// Receiver front half: optional skew removal, recombination, FOE and
/// pilot-based polarization demultiplexing.
pub fn front_half<T: Real>(capture: &QuadTributaryCapture<T>, cfg: &TrialConfig) -> Result<(DualPolWaveform<T>, f64, Option<JonesEstimate>, usize)> {
    let capture = match cfg.skew_compensation {
        Some(tau) => compensate_skew_by(capture, tau)?,
        None => capture.clone(),
    };
    let w = recombine(&capture)?;
    let tones = if cfg.pilots.scheme == PilotScheme::None { Vec::new() } else { cfg.pilots.frequencies() };
    let df = if tones.is_empty() { 0.0 } else { estimate_frequency_offset_tones(&w, &tones, cfg.receiver.foe_search_span_hz)? };
    let w = if df != 0.0 { w.try_map(|b| frequency_shift(b, -df))? } else { w };
    match cfg.scheme {
        Scheme::Spt | Scheme::Dpt => {
            let (out, est, diag) = demultiplex(&w, &cfg.pilots, &cfg.receiver.extractor)?;
            Ok((out, df, Some(est), diag.held_samples))
        }
        Scheme::MimoCmma | Scheme::None => Ok((w, df, None, 0)),
    }
}

struct Decided {
    bits: Vec<u8>,
    errors: usize,
}

/// BPS, synchronization, quadrant resolution and hard decision on the
/// counted window of one equalized stream.
fn decide<T: Real>(
    eq: &[Complex<T>],
    ref_syms: &[Complex<T>],
    ref_bits: &[u8],
    rx: &ReceiverConfig,
    warnings: &mut Vec<String>,
    label: &str,
) -> Decided {
    let phased = bps_carrier_recovery(eq, &rx.bps);
    let aligned = match synchronize(&phased, ref_syms) {
        Ok(s) => s.aligned,
        Err(_) => {
            warnings.push(format!("sync failed on {label}, lag 0 assumed"));
            phased
        }
    };
    let n = ref_syms.len();
    let win = rx.skip_head_symbols..n - rx.skip_tail_symbols;
    let (resolved, _) = resolve_quadrant(&aligned[win.clone()], &ref_syms[win.clone()]);
    let bits = demap_16qam(&resolved);
    let refb = &ref_bits[4 * win.start..4 * win.end];
    let errors = bits.iter().zip(refb).filter(|(a, b)| a != b).count();
    Decided { bits, errors }
}

/// Subcarrier demux, CDC, retiming, equalization, carrier recovery and BER.
pub fn back_half<T: Real>(w: &DualPolWaveform<T>, payload: &FramePayload<T>, cfg: &TrialConfig) -> Result<(BerReport, bool, Vec<String>)> {
    let rx = &cfg.receiver;
    let streams = demux_subcarriers(w, &cfg.dscm)?;
    let streams: SubcarrierStreams<T> = if rx.cd_compensation {
        streams.try_map(|_, sc, b| Ok(cdc_subcarrier(b, &cfg.impairments.link, streams.centers[sc])))?
    } else {
        streams
    };
    let streams = streams.try_map(|_, _, b| Ok(retime(b).0))?;
    let n_sc = streams.num_subcarriers();
    let mut warnings = Vec::new();
    let mut singular = false;
    let mut decided: [Vec<Vec<u8>>; 2] = [Vec::new(), Vec::new()];
    let mut reference: [Vec<Vec<u8>>; 2] = [Vec::new(), Vec::new()];
    let win = rx.skip_head_symbols..cfg.symbols_per_subcarrier - rx.skip_tail_symbols;
    for sc in 0..n_sc {
        let ref_bits = |pol: usize| payload.bits[pol][sc][4 * win.start..4 * win.end].to_vec();
        match cfg.scheme {
            Scheme::MimoCmma => {
                let o = equalize_mimo_cmma(&streams.streams[0][sc], &streams.streams[1][sc], &rx.equalizer)?;
                singular |= o.singular;
                let outs = [o.x.samples(), o.y.samples()];
                let trial = |a: usize, b: usize, warn: &mut Vec<String>| -> [Decided; 2] {
                    [
                        decide(outs[a], &payload.symbols[0][sc], &payload.bits[0][sc], rx, warn, &format!("X sc{sc}")),
                        decide(outs[b], &payload.symbols[1][sc], &payload.bits[1][sc], rx, warn, &format!("Y sc{sc}")),
                    ]
                };
                let (mut w1, mut w2) = (Vec::new(), Vec::new());
                let straight = trial(0, 1, &mut w1);
                let swapped = trial(1, 0, &mut w2);
                let [dx, dy] = if straight[0].errors + straight[1].errors <= swapped[0].errors + swapped[1].errors {
                    warnings.extend(w1);
                    straight
                } else {
                    warnings.extend(w2);
                    swapped
                };
                decided[0].push(dx.bits);
                decided[1].push(dy.bits);
            }
            _ => {
                for pol in 0..2 {
                    let eq = equalize_siso_cmma(&streams.streams[pol][sc], &rx.equalizer)?;
                    let label = format!("{} sc{sc}", ["X", "Y"][pol]);
                    let d = decide(eq.samples(), &payload.symbols[pol][sc], &payload.bits[pol][sc], rx, &mut warnings, &label);
                    decided[pol].push(d.bits);
                }
            }
        }
        reference[0].push(ref_bits(0));
        reference[1].push(ref_bits(1));
    }
    Ok((measure_ber(&decided, &reference)?, singular, warnings))
}

/// One complete Monte-Carlo trial.
pub fn run_trial<T: Real>(cfg: &TrialConfig) -> Result<TrialResult> {
    let tx = transmit::<T>(cfg)?;
    let capture = propagate(&tx.waveform, &cfg.impairments, cfg.seed)?;
    let (w, df, est, held) = front_half(&capture, cfg)?;
    let (ber, mimo_singular, mut warnings) = back_half(&w, &tx.payload, cfg)?;
    let mut all = tx.warnings;
    all.append(&mut warnings);
    Ok(TrialResult {
        ber,
        freq_offset_hz: df,
        flagged_samples: est.as_ref().map_or(0, |e| e.flagged_count()),
        held_samples: held,
        mimo_singular,
        warnings: all,
    })
}

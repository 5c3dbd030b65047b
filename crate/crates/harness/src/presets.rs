//! Named scenario presets. Parameters a preset leaves open take the module
//! defaults or the fixed choices below, and are echoed in the returned
//! config.

use std::f64::consts::FRAC_PI_4;

use dscm_core::pipeline::Scheme;
use dscm_core::tx::PilotDescriptor;
use serde_json::{json, Value};

use crate::config::{Mode, ScenarioConfig, Sweep, Variant};
use crate::error::{HarnessError, Result};

pub const PRESET_NAMES: &[&str] = &["fig5", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13", "fig14", "fig15", "exp18c"];

pub const DPT_F1: f64 = -0.5e9;
pub const DPT_F2: f64 = 0.5e9;
/// Center gap used wherever DPT tones have to fit between subcarriers.
pub const DPT_GUARD_HZ: f64 = 2e9;

pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig5" => "SPT BER vs OSNR at RSOP 0, 0.1, 1, 10 Mrad/s plus the no-crosstalk baseline",
        "fig8" => "SPT BER vs guard band between the inner subcarriers at OSNR 22 dB",
        "fig9" => "SPT, DPT and 2x2 CMMA BER vs RSOP speed at OSNR 23 dB",
        "fig10" => "SPT BER vs PDL at RSOP 0.1, 1, 10 Mrad/s, OSNR 22 dB",
        "fig11" => "SPT and DPT BER vs OSNR for Rx XY skew 0 to 3 ps, no compensation",
        "fig12" => "MGPD skew estimate for Rx XY skew -30 to 30 ps at OSNR 26 dB",
        "fig13" => "MGPD estimate at 5 ps skew under Rx IQ skew, phase and amplitude imbalance",
        "fig14" => "MGPD estimate at 5 ps skew vs OSNR 12 to 26 dB, with and without IQ imbalance",
        "fig15" => "SPT BER vs Rx XY skew at 10 Mrad/s, with and without MGPD compensation",
        "exp18c" => "35 GBd simulation analogue of the experiment: BER vs RSOP at OSNR 28 dB",
        _ => return None,
    })
}

fn pilots(p: PilotDescriptor) -> Value {
    serde_json::to_value(p).expect("pilot descriptor serializes")
}

fn scheme(s: Scheme) -> Value {
    serde_json::to_value(s).expect("scheme serializes")
}

/// 50 GBd 4SC-16QAM over 80 km with an SPT pilot at DC and a static 45
/// degree rotation, so every point carries polarization crosstalk.
fn data_base(name: &str) -> ScenarioConfig {
    let mut c = ScenarioConfig { name: name.into(), ..ScenarioConfig::default() };
    c.scheme = Scheme::Spt;
    c.pilots = PilotDescriptor::spt(0.0);
    c.impairments.rsop.alpha0 = FRAC_PI_4;
    c
}

fn calibration_base(name: &str) -> ScenarioConfig {
    let mut c = ScenarioConfig { name: name.into(), mode: Mode::Calibration, ..ScenarioConfig::default() };
    c.scheme = Scheme::None;
    c.pilots = PilotDescriptor::mgpd(c.calibration.f1);
    c.impairments.link.osnr_db = 26.0;
    c
}

fn with_scheme_variants(labels: &[(&str, Scheme)], extra: &[(&str, Value)]) -> Vec<Variant> {
    labels
        .iter()
        .map(|&(label, s)| {
            let p = match s {
                Scheme::Dpt => PilotDescriptor::dpt(DPT_F1, DPT_F2),
                _ => PilotDescriptor::spt(0.0),
            };
            let mut set = vec![("scheme", scheme(s)), ("pilots", pilots(p))];
            set.extend(extra.iter().cloned());
            Variant::new(label, &set)
        })
        .collect()
}

pub fn build_preset(name: &str) -> Result<ScenarioConfig> {
    let mut c = match name {
        "fig5" => {
            let mut c = data_base(name);
            c.sweep = Sweep { axis: "osnr_db".into(), values: vec![20.0, 21.0, 22.0, 23.0, 24.0, 25.0] };
            c.variants = vec![
                Variant::new("no_crosstalk", &[("alpha0", json!(0.0)), ("rsop_rad_s", json!(0.0))]),
                Variant::new("omega_0", &[("rsop_rad_s", json!(0.0))]),
                Variant::new("omega_100k", &[("rsop_rad_s", json!(1e5))]),
                Variant::new("omega_1M", &[("rsop_rad_s", json!(1e6))]),
                Variant::new("omega_10M", &[("rsop_rad_s", json!(1e7))]),
            ];
            c
        }
        "fig8" => {
            let mut c = data_base(name);
            c.impairments.link.osnr_db = 22.0;
            c.impairments.rsop.omega = 1e6;
            c.sweep = Sweep { axis: "guard_mhz".into(), values: vec![0.0, 100.0, 200.0, 400.0] };
            c
        }
        "fig9" => {
            let mut c = data_base(name);
            c.impairments.link.osnr_db = 23.0;
            c.dscm.guard_band = DPT_GUARD_HZ;
            c.sweep = Sweep { axis: "rsop_rad_s".into(), values: vec![0.0, 1e4, 1e5, 3e5, 1e6, 3e6, 1e7] };
            c.variants =
                with_scheme_variants(&[("SPT", Scheme::Spt), ("DPT", Scheme::Dpt), ("MIMO_CMMA", Scheme::MimoCmma)], &[]);
            c
        }
        "fig10" => {
            let mut c = data_base(name);
            c.impairments.link.osnr_db = 22.0;
            c.sweep = Sweep { axis: "pdl_db".into(), values: vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0] };
            c.variants = vec![
                Variant::new("omega_100k", &[("rsop_rad_s", json!(1e5))]),
                Variant::new("omega_1M", &[("rsop_rad_s", json!(1e6))]),
                Variant::new("omega_10M", &[("rsop_rad_s", json!(1e7))]),
            ];
            c
        }
        "fig11" => {
            let mut c = data_base(name);
            c.dscm.guard_band = DPT_GUARD_HZ;
            c.sweep = Sweep { axis: "osnr_db".into(), values: vec![21.0, 22.0, 23.0, 24.0, 25.0, 26.0, 28.0, 30.0] };
            let mut vars = Vec::new();
            for (label, s) in [("SPT", Scheme::Spt), ("DPT", Scheme::Dpt)] {
                for tau in [0.0, 1.0, 1.5, 2.0, 3.0] {
                    let mut v = with_scheme_variants(&[(label, s)], &[("rx_xy_skew_ps", json!(tau))]).remove(0);
                    v.label = format!("{label}_tau_{tau}ps");
                    vars.push(v);
                }
            }
            c.variants = vars;
            c
        }
        "fig12" => {
            let mut c = calibration_base(name);
            c.sweep = Sweep { axis: "rx_xy_skew_ps".into(), values: (-3..=3).map(|k| 10.0 * k as f64).collect() };
            c
        }
        "fig13" => {
            let mut c = calibration_base(name);
            c.impairments.frontend.tau_ryi = 5e-12;
            c.impairments.frontend.tau_ryq = 5e-12;
            c.sweep = Sweep { axis: "rx_iq_skew_ps".into(), values: vec![-10.0, -5.0, 0.0, 5.0, 10.0] };
            let mut vars = Vec::new();
            for p in [-15.0, 0.0, 15.0] {
                for a in [-10.0, 0.0, 10.0] {
                    vars.push(Variant::new(
                        &format!("phase_{p}deg_amp_{a}dB"),
                        &[("phase_imb_deg", json!(p)), ("amp_imb_db", json!(a))],
                    ));
                }
            }
            c.variants = vars;
            c
        }
        "fig14" => {
            let mut c = calibration_base(name);
            c.impairments.frontend.tau_ryi = 5e-12;
            c.impairments.frontend.tau_ryq = 5e-12;
            c.sweep = Sweep { axis: "osnr_db".into(), values: (0..8).map(|k| 12.0 + 2.0 * k as f64).collect() };
            c.variants = vec![
                Variant::new("ideal", &[]),
                Variant::new(
                    "imbalanced",
                    &[("rx_iq_skew_ps", json!(5.0)), ("phase_imb_deg", json!(10.0)), ("amp_imb_db", json!(3.0))],
                ),
            ];
            c
        }
        "fig15" => {
            let mut c = data_base(name);
            c.impairments.link.osnr_db = 23.0;
            c.impairments.rsop.omega = 1e7;
            c.sweep = Sweep { axis: "rx_xy_skew_ps".into(), values: (-3..=3).map(f64::from).collect() };
            c.variants = vec![
                Variant::new("compensated", &[("skew_compensation", json!("mgpd"))]),
                Variant::new("uncompensated", &[("skew_compensation", json!("none"))]),
            ];
            c
        }
        "exp18c" => {
            let mut c = data_base(name);
            c.dscm.total_baud = 35e9;
            c.dscm.guard_band = DPT_GUARD_HZ;
            // 245 000 samples at 70 GSa/s keep 2 GHz on an integer bin.
            c.calibration.capture_samples = 245_000;
            c.impairments.link.osnr_db = 28.0;
            // At 8.75 GBd per subcarrier the SPT Y output carries twice the
            // laser phase; 64-symbol BPS blocks leave an error floor there.
            c.receiver.bps.block = 32;
            c.sweep = Sweep { axis: "rsop_rad_s".into(), values: vec![0.0, 1e5, 1e6, 1e7] };
            let mut vars =
                with_scheme_variants(&[("SPT", Scheme::Spt), ("DPT", Scheme::Dpt), ("MIMO_CMMA", Scheme::MimoCmma)], &[]);
            vars.push(Variant::new("SPT_skew_3ps", &[("rx_xy_skew_ps", json!(3.0))]));
            vars.push(Variant::new(
                "SPT_skew_3ps_mgpd",
                &[("rx_xy_skew_ps", json!(3.0)), ("skew_compensation", json!("mgpd"))],
            ));
            c.variants = vars;
            c
        }
        _ => {
            return Err(HarnessError::UnknownPreset { name: name.to_string(), valid: PRESET_NAMES.join(", ") });
        }
    };
    c.description = describe(name).unwrap_or_default().to_string();
    c.validate()?;
    Ok(c)
}

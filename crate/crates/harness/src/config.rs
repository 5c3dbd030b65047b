//! Scenario description: the base link, a one-axis sweep, optional variants
//! and the seed list.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use dscm_core::channel::{inf_f64, ImpairmentConfig, RsopPdlParams};
use dscm_core::mgpd::{DEFAULT_CAPTURE_SAMPLES, DEFAULT_F1};
use dscm_core::pipeline::{ReceiverConfig, Scheme, TrialConfig};
use dscm_core::tx::{DscmConfig, PilotDescriptor};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{HarnessError, Result};

/// Default aggregate symbols per polarization per point (all subcarriers).
pub const DEFAULT_SYMBOLS_PER_POINT: usize = 1 << 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Full transmit/receive trial, one BER per row.
    Data,
    /// MGPD back-to-back calibration, one skew estimate per row.
    Calibration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkewCompensation {
    None,
    /// Run the MGPD calibration on the same front end before each trial and
    /// remove the estimated skew from the capture.
    Mgpd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSpec {
    pub f1: f64,
    pub capture_samples: usize,
    /// Static rotation of the back-to-back link (its rate and DGD are ignored).
    pub rotation: RsopPdlParams,
}

impl Default for CalibrationSpec {
    fn default() -> Self {
        Self {
            f1: DEFAULT_F1,
            capture_samples: DEFAULT_CAPTURE_SAMPLES,
            rotation: RsopPdlParams { alpha0: FRAC_PI_4, ..RsopPdlParams::default() },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub axis: String,
    #[serde(with = "inf_vec")]
    pub values: Vec<f64>,
}

/// A named set of overrides applied before the sweep value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Variant {
    pub label: String,
    pub set: BTreeMap<String, Value>,
}

impl Variant {
    pub fn new(label: &str, set: &[(&str, Value)]) -> Self {
        Self { label: label.to_string(), set: set.iter().map(|(k, v)| (k.to_string(), v.clone())).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub description: String,
    pub mode: Mode,
    pub scheme: Scheme,
    pub dscm: DscmConfig,
    pub pilots: PilotDescriptor,
    pub impairments: ImpairmentConfig,
    pub receiver: ReceiverConfig,
    pub skew_compensation: SkewCompensation,
    pub calibration: CalibrationSpec,
    pub sweep: Sweep,
    /// Empty means a single unnamed variant.
    pub variants: Vec<Variant>,
    pub symbols_per_point: usize,
    pub seeds: Vec<u64>,
    pub outputs: Option<String>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "scenario".into(),
            description: String::new(),
            mode: Mode::Data,
            scheme: Scheme::Spt,
            dscm: DscmConfig::default(),
            pilots: PilotDescriptor::default(),
            impairments: ImpairmentConfig::default(),
            receiver: ReceiverConfig::default(),
            skew_compensation: SkewCompensation::None,
            calibration: CalibrationSpec::default(),
            sweep: Sweep { axis: "osnr_db".into(), values: Vec::new() },
            variants: Vec::new(),
            symbols_per_point: DEFAULT_SYMBOLS_PER_POINT,
            seeds: vec![1, 2],
            outputs: None,
        }
    }
}

/// Short axis names and the config fields they drive.
pub const AXIS_ALIASES: &[(&str, &str)] = &[
    ("osnr_db", "impairments.link.osnr_db"),
    ("impairments.osnr_db", "impairments.link.osnr_db"),
    ("rsop_rad_s", "impairments.rsop.omega"),
    ("pdl_db", "impairments.rsop.pdl_db"),
    ("alpha0", "impairments.rsop.alpha0"),
    ("fiber_km", "impairments.link.fiber_km"),
    ("guard_mhz", "dscm.guard_band"),
    ("rx_xy_skew_ps", "impairments.frontend.tau_ryi"),
    ("rx_iq_skew_ps", "impairments.frontend.tau_rxq"),
    ("phase_imb_deg", "impairments.frontend.phase_imb_x_deg"),
    ("amp_imb_db", "impairments.frontend.amp_imb_x_db"),
];

fn alias_target(key: &str) -> Option<&'static str> {
    AXIS_ALIASES.iter().find(|(a, _)| *a == key).map(|(_, t)| *t)
}

fn lookup<'a>(root: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').try_fold(root, |v, seg| v.get(seg))
}

fn lookup_mut<'a>(root: &'a mut Value, path: &str) -> Option<&'a mut Value> {
    path.split('.').try_fold(root, |v, seg| v.get_mut(seg))
}

fn number(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            _ => s.parse().ok(),
        },
        _ => None,
    }
}

fn num_value(x: f64) -> Value {
    if x.is_infinite() {
        Value::String(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
    }
}

fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let slot = lookup_mut(root, path).ok_or_else(|| HarnessError::UnknownField(path.to_string()))?;
    *slot = value;
    Ok(())
}

fn get_num(root: &Value, path: &str) -> Result<f64> {
    lookup(root, path).and_then(number).ok_or_else(|| HarnessError::UnknownField(path.to_string()))
}

/// Set `key` (a dotted config path or an axis alias) on a serialized
/// scenario. Unit-carrying aliases convert to SI: ps to s, MHz to Hz.
pub fn apply_set(root: &mut Value, key: &str, value: Value) -> Result<()> {
    let as_num = || number(&value).ok_or_else(|| HarnessError::BadValue(key.to_string(), value.to_string()));
    match key {
        "rx_xy_skew_ps" => {
            // Move both Y rails, keeping any Y IQ skew.
            let tau = as_num()? * 1e-12;
            let rxi = get_num(root, "impairments.frontend.tau_rxi")?;
            let ryi = get_num(root, "impairments.frontend.tau_ryi")?;
            let ryq = get_num(root, "impairments.frontend.tau_ryq")?;
            set_path(root, "impairments.frontend.tau_ryi", num_value(rxi + tau))?;
            set_path(root, "impairments.frontend.tau_ryq", num_value(rxi + tau + (ryq - ryi)))
        }
        "rx_iq_skew_ps" => {
            // Q rails of both polarizations lag their I rails.
            let s = as_num()? * 1e-12;
            let rxi = get_num(root, "impairments.frontend.tau_rxi")?;
            let ryi = get_num(root, "impairments.frontend.tau_ryi")?;
            set_path(root, "impairments.frontend.tau_rxq", num_value(rxi + s))?;
            set_path(root, "impairments.frontend.tau_ryq", num_value(ryi + s))
        }
        "phase_imb_deg" => {
            let p = as_num()?;
            set_path(root, "impairments.frontend.phase_imb_x_deg", num_value(p))?;
            set_path(root, "impairments.frontend.phase_imb_y_deg", num_value(-p))
        }
        "amp_imb_db" => {
            let a = as_num()?;
            set_path(root, "impairments.frontend.amp_imb_x_db", num_value(a))?;
            set_path(root, "impairments.frontend.amp_imb_y_db", num_value(-a))
        }
        "guard_mhz" => set_path(root, "dscm.guard_band", num_value(as_num()? * 1e6)),
        _ => {
            let path = alias_target(key).unwrap_or(key);
            set_path(root, path, value)
        }
    }
}

/// Parse a `key=value` override. The value is read as JSON when possible,
/// otherwise as a bare string.
pub fn parse_assignment(s: &str) -> Result<(String, Value)> {
    let (k, v) = s.split_once('=').ok_or_else(|| HarnessError::BadAssignment(s.to_string()))?;
    let v = v.trim();
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.trim().to_string(), value))
}

/// One fully resolved point of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub variant: Option<String>,
    pub sweep_value: f64,
    pub seed: u64,
    pub config: ScenarioConfig,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("scenario serializes")
    }

    pub fn from_value(v: Value) -> Result<Self> {
        Ok(serde_json::from_value(v)?)
    }

    /// Apply `key=value` overrides in order.
    pub fn with_overrides(&self, sets: &[(String, Value)]) -> Result<Self> {
        let mut v = self.to_value();
        for (k, val) in sets {
            apply_set(&mut v, k, val.clone())?;
        }
        Self::from_value(v)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(HarnessError::Invalid("seed list is empty".into()));
        }
        let probe = self.to_value();
        let axis = &self.sweep.axis;
        if !AXIS_ALIASES.iter().any(|(a, _)| a == axis) && lookup(&probe, axis).and_then(number).is_none() {
            return Err(HarnessError::UnknownField(format!("sweep axis {axis}")));
        }
        for v in &self.variants {
            let mut probe = probe.clone();
            for (k, val) in &v.set {
                apply_set(&mut probe, k, val.clone())?;
            }
            Self::from_value(probe)?;
        }
        if self.mode == Mode::Data && self.symbols_per_point < self.dscm.num_subcarriers {
            return Err(HarnessError::Invalid(format!("symbols_per_point {} below subcarrier count", self.symbols_per_point)));
        }
        Ok(())
    }

    pub fn symbols_per_subcarrier(&self) -> usize {
        self.symbols_per_point / self.dscm.num_subcarriers.max(1)
    }

    /// Points in output order: variant, then sweep value, then seed.
    pub fn points(&self) -> Result<Vec<Point>> {
        let base = self.to_value();
        let variants: Vec<Option<&Variant>> =
            if self.variants.is_empty() { vec![None] } else { self.variants.iter().map(Some).collect() };
        let mut out = Vec::new();
        for var in variants {
            let mut v = base.clone();
            if let Some(var) = var {
                for (k, val) in &var.set {
                    apply_set(&mut v, k, val.clone())?;
                }
            }
            for &x in &self.sweep.values {
                let mut p = v.clone();
                apply_set(&mut p, &self.sweep.axis, num_value(x))?;
                let mut config = Self::from_value(p)?;
                config.variants.clear();
                for &seed in &self.seeds {
                    out.push(Point { variant: var.map(|v| v.label.clone()), sweep_value: x, seed, config: config.clone() });
                }
            }
        }
        Ok(out)
    }

    /// Row label: the scenario name, suffixed with the variant label.
    pub fn label(&self, variant: Option<&str>) -> String {
        match variant {
            Some(v) if !v.is_empty() => format!("{}/{}", self.name, v),
            _ => self.name.clone(),
        }
    }

    pub fn trial_config(&self, seed: u64) -> TrialConfig {
        TrialConfig {
            scheme: self.scheme,
            dscm: self.dscm.clone(),
            pilots: self.pilots.clone(),
            impairments: self.impairments.clone(),
            receiver: self.receiver.clone(),
            symbols_per_subcarrier: self.symbols_per_subcarrier(),
            seed,
            skew_compensation: None,
        }
    }

    pub fn calibration_duration(&self) -> f64 {
        self.calibration.capture_samples as f64 / self.dscm.sample_rate()
    }
}

/// Serde helper for optional numbers where infinities become strings.
pub(crate) mod opt_inf_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::inf_f64")] f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

mod inf_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::inf_f64")] f64);

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|&x| Wrap(x)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<Wrap>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

//! Result rows and their CSV/JSON forms.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use dscm_core::channel::inf_f64;
use serde::{Deserialize, Serialize};

use crate::config::opt_inf_f64;
use crate::error::{HarnessError, Result};

pub const CSV_HEADER: &str =
    "scenario,seed,sweep_axis,sweep_value,osnr_db,rsop_rad_s,pdl_db,rx_xy_skew_ps,scheme,ber,q_db,skew_est_ps,diagnostics";

pub const NA: &str = "NA";

/// One (sweep value, seed) result. Numbers are stored at their printed
/// precision so a parse of the emitted file reproduces the rows exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    pub seed: u64,
    pub sweep_axis: String,
    #[serde(with = "inf_f64")]
    pub sweep_value: f64,
    #[serde(with = "inf_f64")]
    pub osnr_db: f64,
    pub rsop_rad_s: f64,
    pub pdl_db: f64,
    pub rx_xy_skew_ps: f64,
    pub scheme: String,
    #[serde(with = "opt_inf_f64")]
    pub ber: Option<f64>,
    #[serde(with = "opt_inf_f64")]
    pub q_db: Option<f64>,
    #[serde(with = "opt_inf_f64")]
    pub skew_est_ps: Option<f64>,
    /// `key=value` items separated by `"; "`, then free-text warnings.
    pub diagnostics: String,
}

fn requantize(s: String) -> f64 {
    s.parse().expect("formatted float parses")
}

pub fn quantize_ber(x: f64) -> f64 {
    if x.is_finite() {
        requantize(format!("{x:.6e}"))
    } else {
        x
    }
}

pub fn quantize_fixed3(x: f64) -> f64 {
    if x.is_finite() {
        requantize(format!("{x:.3}"))
    } else {
        x
    }
}

impl ResultRow {
    /// Round every formatted column to its printed precision.
    pub fn quantized(mut self) -> Self {
        self.ber = self.ber.map(quantize_ber);
        self.q_db = self.q_db.map(quantize_fixed3);
        self.skew_est_ps = self.skew_est_ps.map(quantize_fixed3);
        self.rx_xy_skew_ps = quantize_fixed3(self.rx_xy_skew_ps);
        self
    }

    /// Value of a `key=value` diagnostics item.
    pub fn diag(&self, key: &str) -> Option<&str> {
        self.diagnostics.split("; ").find_map(|item| item.strip_prefix(key)?.strip_prefix('='))
    }

    pub fn diag_num(&self, key: &str) -> Option<f64> {
        self.diag(key)?.parse().ok()
    }

    fn csv_fields(&self) -> [String; 13] {
        [
            self.scenario.clone(),
            self.seed.to_string(),
            self.sweep_axis.clone(),
            fmt_plain(self.sweep_value),
            fmt_plain(self.osnr_db),
            fmt_plain(self.rsop_rad_s),
            fmt_plain(self.pdl_db),
            format!("{:.3}", self.rx_xy_skew_ps),
            self.scheme.clone(),
            self.ber.map_or(NA.into(), |b| if b.is_finite() { format!("{b:.6e}") } else { fmt_plain(b) }),
            self.q_db.map_or(NA.into(), fmt_fixed3),
            self.skew_est_ps.map_or(NA.into(), fmt_fixed3),
            self.diagnostics.clone(),
        ]
    }

    fn from_csv_fields(r: &csv::StringRecord) -> Result<Self> {
        if r.len() != 13 {
            return Err(HarnessError::Parse(format!("expected 13 fields, got {}", r.len())));
        }
        let num = |i: usize| -> Result<f64> {
            r[i].parse::<f64>().map_err(|_| HarnessError::Parse(format!("field {i}: `{}`", &r[i])))
        };
        let opt = |i: usize| -> Result<Option<f64>> { if &r[i] == NA { Ok(None) } else { num(i).map(Some) } };
        Ok(Self {
            scenario: r[0].to_string(),
            seed: r[1].parse().map_err(|_| HarnessError::Parse(format!("seed `{}`", &r[1])))?,
            sweep_axis: r[2].to_string(),
            sweep_value: num(3)?,
            osnr_db: num(4)?,
            rsop_rad_s: num(5)?,
            pdl_db: num(6)?,
            rx_xy_skew_ps: num(7)?,
            scheme: r[8].to_string(),
            ber: opt(9)?,
            q_db: opt(10)?,
            skew_est_ps: opt(11)?,
            diagnostics: r[12].to_string(),
        })
    }
}

fn fmt_plain(x: f64) -> String {
    if x.is_nan() {
        NA.into()
    } else {
        x.to_string()
    }
}

fn fmt_fixed3(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.3}")
    } else {
        fmt_plain(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(HarnessError::BadValue("format".into(), other.into())),
        }
    }
}

impl Format {
    /// `.json` selects JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Streaming CSV writer; the header goes out on construction and every row
/// is flushed as it arrives.
pub struct CsvSink<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(w: W) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        inner.write_record(CSV_HEADER.split(','))?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn push(&mut self, row: &ResultRow) -> Result<()> {
        self.inner.write_record(row.csv_fields())?;
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W> {
        self.inner.into_inner().map_err(|e| HarnessError::Io(e.into_error()))
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], w: W) -> Result<W> {
    let mut sink = CsvSink::new(w)?;
    for r in rows {
        sink.push(r)?;
    }
    sink.into_inner()
}

pub fn to_csv_string(rows: &[ResultRow]) -> Result<String> {
    let buf = write_csv(rows, Vec::new())?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn parse_csv<R: Read>(r: R) -> Result<Vec<ResultRow>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(HarnessError::Parse(format!("unexpected header `{}`", header.join(","))));
    }
    rd.records().map(|rec| ResultRow::from_csv_fields(&rec?)).collect()
}

pub fn to_json_string(rows: &[ResultRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)?)
}

pub fn parse_json(text: &str) -> Result<Vec<ResultRow>> {
    Ok(serde_json::from_str(text)?)
}

pub fn emit_results(rows: &[ResultRow], format: Format, path: &Path) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => {
            write_csv(rows, &mut f)?;
        }
        Format::Json => {
            f.write_all(to_json_string(rows)?.as_bytes())?;
            f.write_all(b"\n")?;
        }
    }
    f.flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    match Format::from_path(path) {
        Format::Csv => parse_csv(File::open(path)?),
        Format::Json => parse_json(&std::fs::read_to_string(path)?),
    }
}

//! Sweep execution.

use dscm_core::mgpd::{run_obtb_calibration, SkewEstimate};
use dscm_core::pipeline::run_trial;
use rayon::prelude::*;

use crate::config::{Mode, Point, ScenarioConfig, SkewCompensation};
use crate::error::Result;
use crate::output::ResultRow;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
}

impl RunOptions {
    pub fn sequential() -> Self {
        Self { jobs: 1 }
    }
}

fn calibrate(cfg: &ScenarioConfig, seed: u64) -> dscm_core::Result<SkewEstimate> {
    run_obtb_calibration::<f64>(
        &cfg.impairments.frontend,
        &cfg.calibration.rotation,
        cfg.calibration.f1,
        cfg.calibration_duration(),
        cfg.impairments.link.osnr_db,
        cfg.dscm.sample_rate(),
        seed,
    )
}

fn skew_items(est: &SkewEstimate, truth_ps: f64) -> Vec<String> {
    let r = est.report();
    vec![
        format!("error_ps={:.4}", r.tau_xy_ps - truth_ps),
        format!("tone_snr_x_db={:.1}", r.tone_snr_x_db),
        format!("tone_snr_y_db={:.1}", r.tone_snr_y_db),
    ]
}

/// Run one point; stage errors end up in the diagnostics column.
pub fn run_point(p: &Point, axis: &str) -> ResultRow {
    let cfg = &p.config;
    let imp = &cfg.impairments;
    let truth_ps = imp.frontend.rx_xy_skew() * 1e12;
    let mut row = ResultRow {
        scenario: cfg.label(p.variant.as_deref()),
        seed: p.seed,
        sweep_axis: axis.to_string(),
        sweep_value: p.sweep_value,
        osnr_db: imp.link.osnr_db,
        rsop_rad_s: imp.rsop.omega,
        pdl_db: imp.rsop.pdl_db,
        rx_xy_skew_ps: truth_ps,
        scheme: cfg.scheme.name().to_string(),
        ber: None,
        q_db: None,
        skew_est_ps: None,
        diagnostics: String::new(),
    };
    let mut diag = Vec::new();
    match cfg.mode {
        Mode::Calibration => match calibrate(cfg, p.seed) {
            Ok(est) => {
                row.skew_est_ps = Some(est.tau_xy * 1e12);
                diag.extend(skew_items(&est, truth_ps));
            }
            Err(e) => diag.push(format!("error: {e}")),
        },
        Mode::Data => {
            let mut trial = cfg.trial_config(p.seed);
            let mut ok = true;
            if cfg.skew_compensation == SkewCompensation::Mgpd {
                match calibrate(cfg, p.seed) {
                    Ok(est) => {
                        row.skew_est_ps = Some(est.tau_xy * 1e12);
                        trial.skew_compensation = Some(est.tau_xy);
                        diag.extend(skew_items(&est, truth_ps));
                    }
                    Err(e) => {
                        diag.push(format!("error: calibration: {e}"));
                        ok = false;
                    }
                }
            }
            if ok {
                match run_trial::<f64>(&trial) {
                    Ok(res) => {
                        row.ber = Some(res.ber.ber);
                        row.q_db = Some(res.ber.q_db);
                        diag.insert(0, format!("bits={}", res.ber.bits));
                        diag.insert(1, format!("errors={}", res.ber.errors));
                        diag.push(format!("freq_offset_hz={:.4e}", res.freq_offset_hz));
                        let extra = res.diagnostics();
                        if !extra.is_empty() {
                            diag.push(extra);
                        }
                    }
                    Err(e) => diag.push(format!("error: {e}")),
                }
            }
        }
    }
    row.diagnostics = diag.join("; ");
    row.quantized()
}

/// Run every point of the scenario; rows come back in point order.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<ResultRow>> {
    run_scenario_with(cfg, RunOptions::default(), |_| Ok(()))
}

/// Like [`run_scenario`], handing each row to `sink` in point order as soon
/// as it and all earlier rows are done.
pub fn run_scenario_with<F>(cfg: &ScenarioConfig, opts: RunOptions, mut sink: F) -> Result<Vec<ResultRow>>
where
    F: FnMut(&ResultRow) -> Result<()>,
{
    cfg.validate()?;
    let points = cfg.points()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build().expect("thread pool");
    let chunk = 2 * pool.current_num_threads().max(1);
    let mut rows = Vec::with_capacity(points.len());
    for batch in points.chunks(chunk) {
        let done: Vec<ResultRow> = pool.install(|| batch.par_iter().map(|p| run_point(p, &cfg.sweep.axis)).collect());
        for r in done {
            sink(&r)?;
            rows.push(r);
        }
    }
    Ok(rows)
}

//! Sweep runner, result formats and determinism on small frames.

use dscm_harness::analysis::{pool, within_sigma};
use dscm_harness::output::{parse_csv, parse_json, to_csv_string, to_json_string};
use dscm_harness::{emit_results, run_scenario, run_scenario_with, Format, ResultRow, RunOptions, ScenarioConfig, Sweep, CSV_HEADER};
use serde_json::json;

/// 4096 symbols per subcarrier, short equalizer warm-up.
fn small(values: &[f64], seeds: &[u64]) -> ScenarioConfig {
    let cfg = ScenarioConfig {
        name: "small".into(),
        sweep: Sweep { axis: "osnr_db".into(), values: values.to_vec() },
        symbols_per_point: 4 * 4096,
        seeds: seeds.to_vec(),
        ..ScenarioConfig::default()
    };
    cfg.with_overrides(&[
        ("receiver.skip_head_symbols".into(), json!(1024)),
        ("receiver.equalizer.cma_pretrain_symbols".into(), json!(1000)),
    ])
    .unwrap()
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = small(&[17.0, 19.0], &[1, 2]);
    let a = to_csv_string(&run_scenario(&cfg).unwrap()).unwrap();
    let b = to_csv_string(&run_scenario(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 5);
}

#[test]
fn thread_count_does_not_change_results() {
    let cfg = small(&[17.0, 19.0], &[1, 2, 3]);
    let one = run_scenario_with(&cfg, RunOptions::sequential(), |_| Ok(())).unwrap();
    let mut streamed = Vec::new();
    let two = run_scenario_with(&cfg, RunOptions { jobs: 2 }, |r| {
        streamed.push(r.clone());
        Ok(())
    })
    .unwrap();
    assert_eq!(one, two);
    assert_eq!(streamed, two, "sink sees rows in point order");
}

#[test]
fn empty_sweep_gives_header_only() {
    let rows = run_scenario(&small(&[], &[1])).unwrap();
    assert!(rows.is_empty());
    assert_eq!(to_csv_string(&rows).unwrap().trim_end(), CSV_HEADER);
}

#[test]
fn rows_carry_sweep_and_counts() {
    let rows = run_scenario(&small(&[17.0], &[1])).unwrap();
    let r = &rows[0];
    assert_eq!((r.scenario.as_str(), r.sweep_axis.as_str(), r.scheme.as_str()), ("small", "osnr_db", "SPT"));
    assert_eq!(r.osnr_db, 17.0);
    let bits = r.diag_num("bits").unwrap();
    let errors = r.diag_num("errors").unwrap();
    assert_eq!(bits, (8 * 4 * (4096 - 1024 - 256)) as f64);
    let ber = r.ber.unwrap();
    assert!((ber - errors / bits).abs() <= 1e-6 * ber, "{ber} vs {errors}/{bits}");
    assert!(r.q_db.unwrap().is_finite() && r.skew_est_ps.is_none());
}

fn error_row() -> ResultRow {
    ResultRow {
        scenario: "x/err".into(),
        seed: 7,
        sweep_axis: "osnr_db".into(),
        sweep_value: f64::INFINITY,
        osnr_db: f64::INFINITY,
        rsop_rad_s: 1e7,
        pdl_db: -1.5,
        rx_xy_skew_ps: 3.0,
        scheme: "DPT".into(),
        ber: None,
        q_db: None,
        skew_est_ps: Some(2.998),
        diagnostics: "error: pilot lost, \"quoted\"; held 3 estimates".into(),
    }
}

#[test]
fn csv_and_json_round_trip() {
    let mut rows = run_scenario(&small(&[17.0], &[1, 2])).unwrap();
    rows.push(error_row());
    let csv = to_csv_string(&rows).unwrap();
    assert_eq!(parse_csv(csv.as_bytes()).unwrap(), rows);
    assert_eq!(parse_json(&to_json_string(&rows).unwrap()).unwrap(), rows);
    let na = csv.lines().last().unwrap();
    assert!(na.contains(",inf,inf,") && na.contains(",DPT,NA,NA,2.998,"), "{na}");
}

#[test]
fn emitted_files_follow_the_format() {
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![error_row()];
    let csv = dir.path().join("r.csv");
    let js = dir.path().join("r.json");
    emit_results(&rows, Format::Csv, &csv).unwrap();
    emit_results(&rows, Format::Json, &js).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 13 + 1, "quoted diagnostics keep their comma");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&js).unwrap()).unwrap();
    assert_eq!(v[0]["ber"], json!(null));
    assert_eq!(v[0]["osnr_db"], json!("inf"));
    assert_eq!(dscm_harness::output::read_results(&js).unwrap(), rows);
    assert!(parse_csv("scenario,seed\nx,1\n".as_bytes()).is_err());
}

#[test]
fn seeds_are_independent_draws_of_one_ber() {
    let rows = run_scenario(&small(&[18.0], &[1, 2, 3, 4])).unwrap();
    let bers: Vec<f64> = rows.iter().map(|r| r.ber.unwrap()).collect();
    assert!(bers.windows(2).any(|w| w[0] != w[1]), "{bers:?}");
    let halves = [pool(&rows[..2]), pool(&rows[2..])];
    assert!(within_sigma(&halves[0][0], &halves[1][0], 3.0), "{bers:?}");
}

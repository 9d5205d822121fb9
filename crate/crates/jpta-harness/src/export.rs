//! Plot-ready exports: metrics and gain maps as CSV with JSON mirrors.
//!
//! All gains are exported in dB; linear values never leave the library.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use jpta_core::{FrequencyGrid, GainMap, JptaConfig, MapReduction};

use crate::error::{HarnessError, Result};
use crate::run::RunRecord;

pub const METRICS_CSV: &str = "metrics.csv";
pub const METRICS_JSON: &str = "metrics.json";
pub const RECORDS_JSON: &str = "records.json";

fn db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|source| HarnessError::OutputWrite {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    fs::write(path, contents).map_err(|source| HarnessError::OutputWrite {
        path: path.to_path_buf(),
        source,
    })
}

fn join_semicolon(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// One row of the metrics CSV, also used as the JSON mirror entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub scenario_id: String,
    pub solver: String,
    pub n_users: usize,
    pub alphas: Vec<f64>,
    pub per_user_gain_db: Vec<f64>,
    pub gl_db: f64,
    pub wall_time_s: f64,
    pub converged: bool,
}

impl MetricsRow {
    fn from_record(r: &RunRecord) -> Self {
        Self {
            scenario_id: r.scenario_id.clone(),
            solver: r.solver.clone(),
            n_users: r.n_users,
            alphas: r.alphas.clone(),
            per_user_gain_db: r.per_user_gain_db.clone(),
            gl_db: r.gl_db,
            wall_time_s: r.wall_time_s,
            converged: r.converged,
        }
    }
}

/// Write the metrics CSV. Schema, in order: scenario_id, solver, n_users,
/// alphas (semicolon-joined), per_user_gain_db (semicolon-joined), gl_db,
/// wall_time_s, converged. Failed runs are skipped here; they remain in the
/// full records JSON.
pub fn export_metrics_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(HarnessError::NoRecords);
    }
    let mut out = String::new();
    out.push_str("scenario_id,solver,n_users,alphas,per_user_gain_db,gl_db,wall_time_s,converged\n");
    for r in records.iter().filter(|r| r.succeeded()) {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.scenario_id,
            r.solver,
            r.n_users,
            join_semicolon(&r.alphas),
            join_semicolon(&r.per_user_gain_db),
            r.gl_db,
            r.wall_time_s,
            r.converged
        )
        .expect("string write");
    }
    write_file(path, &out)
}

/// JSON mirror of the metrics CSV (same rows and fields).
pub fn export_metrics_json(records: &[RunRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(HarnessError::NoRecords);
    }
    let rows: Vec<MetricsRow> = records
        .iter()
        .filter(|r| r.succeeded())
        .map(MetricsRow::from_record)
        .collect();
    let text = serde_json::to_string_pretty(&rows).expect("rows serialize");
    write_file(path, &text)
}

/// Full-fidelity record dump, including failures, digests, and timestamps.
pub fn export_records_json(records: &[RunRecord], path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(records).expect("records serialize");
    write_file(path, &text)
}

/// Write metrics.csv, metrics.json, and records.json into `dir`.
pub fn persist_records(records: &[RunRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    let csv = dir.join(METRICS_CSV);
    let json = dir.join(METRICS_JSON);
    let full = dir.join(RECORDS_JSON);
    export_metrics_csv(records, &csv)?;
    export_metrics_json(records, &json)?;
    export_records_json(records, &full)?;
    Ok(vec![csv, json, full])
}

/// Read a metrics CSV back into rows.
pub fn import_metrics_csv(path: &Path) -> Result<Vec<MetricsRow>> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::ConfigRead {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: &str| HarnessError::ImportParse {
            path: path.to_path_buf(),
            line: idx + 1,
            message: message.to_string(),
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(parse_err(&format!("expected 8 columns, got {}", fields.len())));
        }
        let list = |s: &str| -> std::result::Result<Vec<f64>, std::num::ParseFloatError> {
            if s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(';').map(|v| v.parse::<f64>()).collect()
        };
        rows.push(MetricsRow {
            scenario_id: fields[0].to_string(),
            solver: fields[1].to_string(),
            n_users: fields[2].parse().map_err(|_| parse_err("bad n_users"))?,
            alphas: list(fields[3]).map_err(|_| parse_err("bad alphas"))?,
            per_user_gain_db: list(fields[4]).map_err(|_| parse_err("bad gains"))?,
            gl_db: fields[5].parse().map_err(|_| parse_err("bad gl_db"))?,
            wall_time_s: fields[6].parse().map_err(|_| parse_err("bad wall_time"))?,
            converged: fields[7].parse().map_err(|_| parse_err("bad converged"))?,
        });
    }
    Ok(rows)
}

/// Long-form gain map CSV: theta_az_deg, theta_el_deg, max_gain_db.
pub fn export_gain_map_csv(map: &GainMap, path: &Path) -> Result<()> {
    assert_eq!(map.reduction(), MapReduction::MaxOverSubcarriers);
    let mut out = String::from("theta_az_deg,theta_el_deg,max_gain_db\n");
    for (ia, az) in map.az_angles().iter().enumerate() {
        for (ie, el) in map.el_angles().iter().enumerate() {
            writeln!(out, "{az},{el},{}", db(map.max_at(ia, ie))).expect("string write");
        }
    }
    write_file(path, &out)
}

/// JSON mirror of the gain-map CSV.
pub fn export_gain_map_json(map: &GainMap, path: &Path) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        theta_az_deg: f64,
        theta_el_deg: f64,
        max_gain_db: f64,
    }
    let mut rows = Vec::with_capacity(map.az_angles().len() * map.el_angles().len());
    for (ia, &az) in map.az_angles().iter().enumerate() {
        for (ie, &el) in map.el_angles().iter().enumerate() {
            rows.push(Row {
                theta_az_deg: az,
                theta_el_deg: el,
                max_gain_db: db(map.max_at(ia, ie)),
            });
        }
    }
    write_file(path, &serde_json::to_string_pretty(&rows).expect("rows serialize"))
}

/// Azimuth-versus-frequency slice at a fixed elevation: the map must be
/// per-subcarrier with a single elevation point.
pub fn export_az_frequency_csv(map: &GainMap, grid: &FrequencyGrid, path: &Path) -> Result<()> {
    assert_eq!(map.reduction(), MapReduction::PerSubcarrier);
    assert_eq!(map.el_angles().len(), 1);
    let mut out = String::from("theta_az_deg,subcarrier,freq_hz,gain_db\n");
    for (ia, az) in map.az_angles().iter().enumerate() {
        for m in 0..map.m_count() {
            writeln!(
                out,
                "{az},{m},{},{}",
                grid.freq(m),
                db(map.per_subcarrier_at(ia, 0, m))
            )
            .expect("string write");
        }
    }
    write_file(path, &out)
}

/// Quantized per-element settings as hardware registers: phase in radians,
/// delay in nanoseconds and in quantization steps, side by side.
pub fn export_beam_table_csv(config: &JptaConfig, tau_step: f64, path: &Path) -> Result<()> {
    let mut out = String::from("y,z,phase_rad,delay_ns,delay_steps\n");
    for y in 0..config.n_az() {
        for z in 0..config.n_el() {
            let delay = config.delay(y, z);
            writeln!(
                out,
                "{y},{z},{},{},{}",
                config.phase(y, z),
                delay * 1e9,
                (delay / tau_step).round() as i64
            )
            .expect("string write");
        }
    }
    write_file(path, &out)
}

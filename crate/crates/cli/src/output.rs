//! CSV and metadata emission.
//!
//! CSV bodies are deterministic for a given config and seed: fixed header,
//! 12 significant digits, LF line endings, empty cells for absent values.
//! The metadata sidecar carries run provenance (config hash, seed, trials,
//! tool version, wall time) and is excluded from the byte-identity
//! guarantee.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, HarnessError};
use crate::run::{Curve, Row};

pub const CSV_HEADER: &str = "x,analytic,asymptotic,mc_estimate,mc_stderr,flag";

/// Renders a value with 12 significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.11e}")
}

fn format_cell(v: Option<f64>) -> String {
    v.map(format_value).unwrap_or_default()
}

fn format_row(r: &Row) -> String {
    format!(
        "{},{},{},{},{},{}",
        format_value(r.x),
        format_cell(r.analytic),
        format_cell(r.asymptotic),
        format_cell(r.mc_estimate),
        format_cell(r.mc_stderr),
        r.flag
    )
}

/// Full CSV body for one curve.
pub fn curve_csv(curve: &Curve) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &curve.rows {
        out.push_str(&format_row(r));
        out.push('\n');
    }
    out
}

/// File name for a curve of the given config.
pub fn curve_file_name(cfg: &ExperimentConfig, curve: &Curve) -> String {
    if curve.name.is_empty() {
        format!("{}.csv", cfg.stem())
    } else {
        format!("{}_{}.csv", cfg.stem(), curve.name)
    }
}

/// SHA-256 of the canonical (re-serialized) config document.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let canonical = toml::to_string(cfg).expect("config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes one CSV per curve plus a `<stem>.meta.json` sidecar; returns the
/// paths written.
pub fn write_outputs(
    out_dir: &Path,
    cfg: &ExperimentConfig,
    curves: &[Curve],
    wall_time: Duration,
) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let mut files = Vec::new();
    for curve in curves {
        let name = curve_file_name(cfg, curve);
        let path = out_dir.join(&name);
        fs::write(&path, curve_csv(curve))?;
        files.push(name);
        written.push(path);
    }
    let meta = serde_json::json!({
        "config_hash": config_hash(cfg),
        "experiment": cfg.experiment.name(),
        "seed": cfg.seed,
        "trials": cfg.trials,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_ms": wall_time.as_millis() as u64,
        "files": files,
    });
    let meta_path = out_dir.join(format!("{}.meta.json", cfg.stem()));
    fs::write(&meta_path, format!("{}\n", serde_json::to_string_pretty(&meta).unwrap()))?;
    written.push(meta_path);
    Ok(written)
}

//! Experiment configuration: TOML schema, strict parsing, validation.

use serde::{Deserialize, Serialize};

/// Which metric an experiment produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Fading-amplitude density curve (analytic vs simulated).
    Pdf,
    /// Outage probability vs per-hop average SNR.
    Outage,
    /// Amount of fading vs cascade order.
    Af,
    /// Outage vs total power under optimized and equal allocation.
    Pa,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Pdf => "pdf",
            ExperimentKind::Outage => "outage",
            ExperimentKind::Af => "af",
            ExperimentKind::Pa => "pa",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeConfig {
    Regenerative,
    Nonregenerative,
}

impl From<SchemeConfig> for nrelay_core::Scheme {
    fn from(s: SchemeConfig) -> Self {
        match s {
            SchemeConfig::Regenerative => nrelay_core::Scheme::Regenerative,
            SchemeConfig::Nonregenerative => nrelay_core::Scheme::NonRegenerative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Per-hop average SNR in dB (outage experiments).
    SnrDb,
    /// Total transmit power in dB (power-allocation experiments).
    TotalPowerDb,
    /// Cascade order n (amount-of-fading experiments).
    CascadeOrder,
    /// Fading-amplitude histogram range (pdf experiments).
    Amplitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HopConfig {
    pub cascade_order: u32,
    #[serde(default = "default_gain")]
    pub channel_gain: f64,
}

fn default_gain() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepConfig {
    /// The sweep grid, inclusive of both endpoints.
    pub fn grid(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        (0..self.points)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (self.points - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Output file stem; defaults to the experiment name.
    #[serde(default)]
    pub label: Option<String>,
    pub hops: Vec<HopConfig>,
    #[serde(default = "default_diversity")]
    pub diversity: u32,
    #[serde(default = "default_scheme")]
    pub scheme: SchemeConfig,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Outage threshold γ_th in dB (0 dB = linear 1).
    #[serde(default)]
    pub threshold_db: f64,
    /// Per-hop average-SNR operating point in dB, for experiments that do
    /// not sweep SNR.
    #[serde(default)]
    pub avg_snr_db: f64,
    /// Run Monte-Carlo validation alongside the analytic curve.
    #[serde(default = "default_with_mc")]
    pub with_mc: bool,
    pub sweep: SweepConfig,
}

fn default_diversity() -> u32 {
    1
}
fn default_scheme() -> SchemeConfig {
    SchemeConfig::Regenerative
}
fn default_trials() -> u64 {
    1_000_000
}
fn default_seed() -> u64 {
    42
}
fn default_with_mc() -> bool {
    true
}

/// Harness-level failure, carrying the process exit code.
#[derive(Debug)]
pub enum HarnessError {
    /// Malformed config document (exit 2).
    Parse(String),
    /// Well-formed but invalid config (exit 2).
    Validation(String),
    /// Numerical failure in the core library (exit 3).
    Numeric(nrelay_core::Error),
    /// Filesystem failure (exit 4).
    Io(std::io::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse(_) | HarnessError::Validation(_) => 2,
            HarnessError::Numeric(_) => 3,
            HarnessError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for HarnessError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HarnessError::Parse(m) => write!(f, "config parse error: {m}"),
            HarnessError::Validation(m) => write!(f, "config validation error: {m}"),
            HarnessError::Numeric(e) => write!(f, "numerical error: {e}"),
            HarnessError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<nrelay_core::Error> for HarnessError {
    fn from(e: nrelay_core::Error) -> Self {
        HarnessError::Numeric(e)
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e)
    }
}

/// Parses and validates one experiment config from TOML text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let cfg: ExperimentConfig =
        toml::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: String| Err(HarnessError::Validation(msg));
        if self.hops.is_empty() {
            return fail("hops: at least one hop is required".into());
        }
        for (i, h) in self.hops.iter().enumerate() {
            if h.cascade_order < 1 {
                return fail(format!("hops[{i}].cascade_order: must be >= 1"));
            }
            if !(h.channel_gain > 0.0 && h.channel_gain.is_finite()) {
                return fail(format!(
                    "hops[{i}].channel_gain: must be positive and finite, got {}",
                    h.channel_gain
                ));
            }
        }
        if self.diversity < 1 {
            return fail("diversity: must be >= 1".into());
        }
        if self.trials < 10_000 {
            return fail("trials: reported estimates need at least 10000 trials".into());
        }
        if self.sweep.points == 0 {
            return fail("sweep.points: must be >= 1".into());
        }
        if !(self.sweep.start.is_finite() && self.sweep.stop.is_finite()) {
            return fail("sweep: start/stop must be finite".into());
        }
        if self.sweep.points > 1 && !(self.sweep.start < self.sweep.stop) {
            return fail("sweep: start must be below stop".into());
        }
        let expected_var = match self.experiment {
            ExperimentKind::Pdf => SweepVariable::Amplitude,
            ExperimentKind::Outage => SweepVariable::SnrDb,
            ExperimentKind::Af => SweepVariable::CascadeOrder,
            ExperimentKind::Pa => SweepVariable::TotalPowerDb,
        };
        if self.sweep.variable != expected_var {
            return fail(format!(
                "sweep.variable: {:?} experiment sweeps {:?}",
                self.experiment, expected_var
            ));
        }
        match self.experiment {
            ExperimentKind::Pdf => {
                if self.hops.len() != 1 {
                    return fail("hops: pdf experiments characterize a single hop".into());
                }
                if self.sweep.points < 10 {
                    return fail("sweep.points: pdf histograms need at least 10 bins".into());
                }
                if !(self.sweep.start >= 0.0) {
                    return fail("sweep.start: amplitude range must start at >= 0".into());
                }
            }
            ExperimentKind::Af => {
                if self.sweep.start < 1.0 {
                    return fail("sweep.start: cascade order sweeps start at >= 1".into());
                }
            }
            ExperimentKind::Pa => {
                if self.scheme != SchemeConfig::Regenerative {
                    return fail("scheme: power allocation applies to regenerative chains".into());
                }
            }
            ExperimentKind::Outage => {}
        }
        Ok(())
    }

    /// Output file stem.
    pub fn stem(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| self.experiment.name().to_string())
    }

    /// Linear outage threshold.
    pub fn gamma_th(&self) -> f64 {
        10f64.powf(self.threshold_db / 10.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
experiment = "outage"
[[hops]]
cascade_order = 2
[sweep]
variable = "snr_db"
start = 0.0
stop = 10.0
points = 3
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.trials, 1_000_000);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.diversity, 1);
        assert_eq!(cfg.scheme, SchemeConfig::Regenerative);
        assert_eq!(cfg.hops[0].channel_gain, 1.0);
        assert!(cfg.with_mc);
        assert_eq!(cfg.gamma_th(), 1.0);
        assert_eq!(cfg.stem(), "outage");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = MINIMAL.replace("experiment = \"outage\"", "experiment = \"outage\"\nbogus = 1");
        assert!(matches!(parse_config(&text), Err(HarnessError::Parse(_))));
    }

    #[test]
    fn validation_failures_name_the_field() {
        let top = |kv: &str| MINIMAL.replace("experiment = \"outage\"", &format!("experiment = \"outage\"\n{kv}"));
        let cases = [
            ("trials", top("trials = 100")),
            ("diversity", top("diversity = 0")),
            (
                "sweep.variable",
                MINIMAL.replace("variable = \"snr_db\"", "variable = \"amplitude\""),
            ),
            ("sweep", MINIMAL.replace("stop = 10.0", "stop = -1.0")),
            (
                "channel_gain",
                MINIMAL.replace("cascade_order = 2", "cascade_order = 2\nchannel_gain = -1.0"),
            ),
        ];
        for (field, text) in cases {
            match parse_config(&text) {
                Err(HarnessError::Validation(msg)) => {
                    assert!(msg.contains(field), "{field}: message was {msg:?}")
                }
                other => panic!("{field}: expected validation error, got {other:?}"),
            }
        }
    }

    #[test]
    fn pdf_requires_single_hop_and_enough_bins() {
        let text = MINIMAL
            .replace("experiment = \"outage\"", "experiment = \"pdf\"")
            .replace("variable = \"snr_db\"", "variable = \"amplitude\"");
        assert!(matches!(parse_config(&text), Err(HarnessError::Validation(_))));
        let ok = text.replace("points = 3", "points = 20");
        assert!(parse_config(&ok).is_ok());
    }

    #[test]
    fn pa_requires_regenerative() {
        let text = MINIMAL
            .replace("experiment = \"outage\"", "experiment = \"pa\"\nscheme = \"nonregenerative\"")
            .replace("variable = \"snr_db\"", "variable = \"total_power_db\"");
        assert!(matches!(parse_config(&text), Err(HarnessError::Validation(_))));
    }

    #[test]
    fn sweep_grid_hits_both_endpoints() {
        let s = SweepConfig {
            variable: SweepVariable::SnrDb,
            start: 0.0,
            stop: 30.0,
            points: 16,
        };
        let g = s.grid();
        assert_eq!(g.len(), 16);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[15], 30.0);
        assert!((g[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exit_codes_by_error_class() {
        assert_eq!(HarnessError::Parse("x".into()).exit_code(), 2);
        assert_eq!(HarnessError::Validation("x".into()).exit_code(), 2);
        assert_eq!(
            HarnessError::Numeric(nrelay_core::Error::Empty).exit_code(),
            3
        );
        assert_eq!(
            HarnessError::Io(std::io::Error::new(std::io::ErrorKind::Other, "x")).exit_code(),
            4
        );
    }
}

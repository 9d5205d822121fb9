//! Experiment configuration files: TOML or JSON, hand-editable, with every
//! field defaulted to the reference mmWave deployment (28 GHz carrier,
//! 120 kHz spacing, 793 subcarriers, 16x24 array, 2.5 ns / 200 ns / 6-bit
//! quantization).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use jpta_core::{ArrayGeometry, Direction, FrequencyGrid, OptimizerSettings, QuantizationSpec};

use crate::error::{HarnessError, Result};
use crate::place::place_users;

/// Environment variable that overrides `output_dir` when set.
pub const OUTPUT_DIR_ENV: &str = "JPTA_OUTPUT_DIR";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ArraySection {
    pub n_az: usize,
    pub n_el: usize,
}

impl Default for ArraySection {
    fn default() -> Self {
        Self { n_az: 16, n_el: 24 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FrequencySection {
    pub f_c_hz: f64,
    pub delta_f_hz: f64,
    /// Number of subcarriers; must be odd.
    pub m_count: usize,
}

impl Default for FrequencySection {
    fn default() -> Self {
        Self {
            f_c_hz: 28e9,
            delta_f_hz: 120e3,
            m_count: 793,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DirectionSpec {
    pub az_deg: f64,
    pub el_deg: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct UsersSection {
    /// User count placed by the coverage rule; mutually exclusive with
    /// `directions`.
    pub count: Option<usize>,
    /// Explicit directions, one per user.
    pub directions: Option<Vec<DirectionSpec>>,
    /// Bandwidth ratios; equal split when omitted.
    pub alphas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct QuantizationSection {
    pub tau_step_s: f64,
    pub tau_max_s: f64,
    pub phase_bits: u32,
}

impl Default for QuantizationSection {
    fn default() -> Self {
        Self {
            tau_step_s: 2.5e-9,
            tau_max_s: 200e-9,
            phase_bits: 6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSection {
    pub zeta: f64,
    pub max_sweeps: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let s = OptimizerSettings::default();
        Self {
            zeta: s.zeta,
            max_sweeps: s.max_sweeps,
            learning_rate: s.learning_rate,
            seed: s.seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// One scenario point per ratio vector.
    pub alphas: Option<Vec<Vec<f64>>>,
    /// One scenario point per user count (equal bandwidth each).
    pub n_users: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct MapSection {
    pub az_min_deg: f64,
    pub az_max_deg: f64,
    pub el_min_deg: f64,
    pub el_max_deg: f64,
}

impl Default for MapSection {
    fn default() -> Self {
        Self {
            az_min_deg: -90.0,
            az_max_deg: 90.0,
            el_min_deg: 60.0,
            el_max_deg: 150.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub array: ArraySection,
    pub frequency: FrequencySection,
    pub users: UsersSection,
    pub quantization: QuantizationSection,
    pub optimizer: OptimizerSection,
    pub solvers: Vec<String>,
    pub output_dir: PathBuf,
    /// Worker cap for concurrent scenario/solver runs; library default when
    /// omitted.
    pub workers: Option<usize>,
    pub sweep: Option<SweepSection>,
    pub map: MapSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            array: ArraySection::default(),
            frequency: FrequencySection::default(),
            users: UsersSection::default(),
            quantization: QuantizationSection::default(),
            optimizer: OptimizerSection::default(),
            solvers: vec!["joint-ls".into()],
            output_dir: PathBuf::from("runs"),
            workers: None,
            sweep: None,
            map: MapSection::default(),
        }
    }
}

impl ExperimentConfig {
    /// Load from a TOML or JSON file and apply `key=value` overrides with
    /// dotted paths, e.g. `users.count=4` or `optimizer.zeta=1e-4`.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        let is_json = path
            .extension()
            .map(|e| e.eq_ignore_ascii_case("json"))
            .unwrap_or(false)
            || text.trim_start().starts_with('{');
        let mut value: serde_json::Value = if is_json {
            serde_json::from_str(&text).map_err(|e| HarnessError::ConfigParse {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?
        } else {
            let toml_value: toml::Value =
                toml::from_str(&text).map_err(|e| HarnessError::ConfigParse {
                    path: path.to_path_buf(),
                    message: e.to_string(),
                })?;
            serde_json::to_value(toml_value).expect("toml value converts to json")
        };

        apply_overrides(&mut value, overrides)?;

        let mut config: ExperimentConfig =
            serde_json::from_value(value).map_err(|e| HarnessError::ConfigParse {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            if !dir.is_empty() {
                config.output_dir = PathBuf::from(dir);
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.users.count.is_some() && self.users.directions.is_some() {
            return Err(HarnessError::InvalidConfig(
                "set either users.count or users.directions, not both".into(),
            ));
        }
        self.geometry()?;
        self.grid()?;
        self.quantization_spec()?;
        self.optimizer_settings().validate()?;
        Ok(())
    }

    pub fn geometry(&self) -> Result<ArrayGeometry> {
        Ok(ArrayGeometry::new(self.array.n_az, self.array.n_el)?)
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        Ok(FrequencyGrid::new(
            self.frequency.f_c_hz,
            self.frequency.delta_f_hz,
            self.frequency.m_count,
        )?)
    }

    pub fn quantization_spec(&self) -> Result<QuantizationSpec> {
        Ok(QuantizationSpec::new(
            self.quantization.tau_step_s,
            self.quantization.tau_max_s,
            self.quantization.phase_bits,
        )?)
    }

    pub fn optimizer_settings(&self) -> OptimizerSettings {
        OptimizerSettings {
            zeta: self.optimizer.zeta,
            max_sweeps: self.optimizer.max_sweeps,
            learning_rate: self.optimizer.learning_rate,
            seed: self.optimizer.seed,
        }
    }

    /// Base user directions before any sweep expansion.
    pub fn base_directions(&self) -> Result<Vec<Direction>> {
        match (&self.users.directions, self.users.count) {
            (Some(list), _) => list
                .iter()
                .map(|d| Direction::new(d.az_deg, d.el_deg).map_err(HarnessError::from))
                .collect(),
            (None, Some(count)) => place_users(count),
            (None, None) => place_users(2),
        }
    }
}

fn parse_override_value(raw: &str) -> serde_json::Value {
    serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()))
}

fn apply_overrides(value: &mut serde_json::Value, overrides: &[String]) -> Result<()> {
    for entry in overrides {
        let (key, raw) = entry.split_once('=').ok_or_else(|| HarnessError::BadOverride {
            entry: entry.clone(),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(HarnessError::BadOverride {
                entry: entry.clone(),
            });
        }
        let mut cursor = &mut *value;
        let parts: Vec<&str> = key.split('.').collect();
        for part in &parts[..parts.len() - 1] {
            if !cursor.is_object() {
                *cursor = serde_json::Value::Object(serde_json::Map::new());
            }
            cursor = cursor
                .as_object_mut()
                .expect("object ensured above")
                .entry(part.to_string())
                .or_insert(serde_json::Value::Object(serde_json::Map::new()));
        }
        if !cursor.is_object() {
            *cursor = serde_json::Value::Object(serde_json::Map::new());
        }
        cursor
            .as_object_mut()
            .expect("object ensured above")
            .insert(parts[parts.len() - 1].to_string(), parse_override_value(raw));
    }
    Ok(())
}

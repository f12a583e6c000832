//! Simulation configuration: a flat `key = value` file format, command-line
//! overrides, validation and round-trippable serialization.
//!
//! Unspecified keys fall back to the reference setup: 100 nodes in a
//! 100 × 100 m field, base station 75 m beyond the top edge, the default
//! radio coefficients and election constants, 5000 rounds, seed 1.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::election::{ElectionParams, Protocol};
use crate::radio::RadioParams;

/// The full effective configuration of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub num_nodes: usize,
    pub region_side: f64,
    pub bs_offset: f64,
    pub max_rounds: u64,
    pub seed: u64,
    pub radio: RadioParams,
    pub election: ElectionParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            num_nodes: 100,
            region_side: 100.0,
            bs_offset: 75.0,
            max_rounds: 5000,
            seed: 1,
            radio: RadioParams::default(),
            election: ElectionParams::default(),
        }
    }
}

impl SimConfig {
    /// The protocol this run uses (stored on the election parameters).
    pub fn protocol(&self) -> Protocol {
        self.election.variant
    }

    /// Serialize every key in the canonical order; reloading the result
    /// yields an identical config.
    pub fn to_key_values(&self) -> String {
        format!(
            "num_nodes = {}\n\
             region_side = {}\n\
             bs_offset = {}\n\
             protocol = {}\n\
             max_rounds = {}\n\
             seed = {}\n\
             e_elec = {:e}\n\
             eps_fs = {:e}\n\
             eps_mp = {:e}\n\
             e_da = {:e}\n\
             d0 = {}\n\
             message_bits = {}\n\
             initial_energy = {}\n\
             p = {}\n\
             p_opt1 = {}\n\
             p_opt2 = {}\n\
             c = {}\n",
            self.num_nodes,
            self.region_side,
            self.bs_offset,
            self.election.variant,
            self.max_rounds,
            self.seed,
            self.radio.e_elec,
            self.radio.eps_fs,
            self.radio.eps_mp,
            self.radio.e_da,
            self.radio.d0,
            self.radio.message_bits,
            self.radio.initial_energy,
            self.election.p,
            self.election.p_opt1,
            self.election.p_opt2,
            self.election.c,
        )
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for key `{key}`: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("constraint violated for key `{key}`: {reason}")]
    Constraint { key: String, reason: String },
    #[error("malformed config line `{0}` (expected `key = value`)")]
    MalformedLine(String),
}

fn apply_entry(config: &mut SimConfig, key: &str, value: &str) -> Result<(), ConfigError> {
    fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
        value.parse().map_err(|_| ConfigError::InvalidValue {
            key: key.to_string(),
            value: value.to_string(),
            reason: format!("not a valid {}", std::any::type_name::<T>()),
        })
    }

    match key {
        "num_nodes" => config.num_nodes = parse(key, value)?,
        "region_side" => config.region_side = parse(key, value)?,
        "bs_offset" => config.bs_offset = parse(key, value)?,
        "protocol" => {
            config.election.variant =
                value.parse().map_err(|reason: String| ConfigError::InvalidValue {
                    key: key.to_string(),
                    value: value.to_string(),
                    reason,
                })?
        }
        "max_rounds" => config.max_rounds = parse(key, value)?,
        "seed" => config.seed = parse(key, value)?,
        "e_elec" => config.radio.e_elec = parse(key, value)?,
        "eps_fs" => config.radio.eps_fs = parse(key, value)?,
        "eps_mp" => config.radio.eps_mp = parse(key, value)?,
        "e_da" => config.radio.e_da = parse(key, value)?,
        "d0" => config.radio.d0 = parse(key, value)?,
        "message_bits" => config.radio.message_bits = parse(key, value)?,
        "initial_energy" => config.radio.initial_energy = parse(key, value)?,
        "p" => config.election.p = parse(key, value)?,
        "p_opt1" => config.election.p_opt1 = parse(key, value)?,
        "p_opt2" => config.election.p_opt2 = parse(key, value)?,
        "c" => config.election.c = parse(key, value)?,
        other => return Err(ConfigError::UnknownKey(other.to_string())),
    }
    Ok(())
}

fn validate(config: &SimConfig) -> Result<(), ConfigError> {
    let constraint = |key: &str, reason: &str| ConfigError::Constraint {
        key: key.to_string(),
        reason: reason.to_string(),
    };
    if config.num_nodes == 0 {
        return Err(constraint("num_nodes", "must be at least 1"));
    }
    if !(config.region_side > 0.0) {
        return Err(constraint("region_side", "must be positive"));
    }
    if !(config.bs_offset >= 0.0) {
        return Err(constraint("bs_offset", "must be non-negative"));
    }
    if config.max_rounds == 0 {
        return Err(constraint("max_rounds", "must be at least 1"));
    }
    let positive = [
        ("e_elec", config.radio.e_elec),
        ("eps_fs", config.radio.eps_fs),
        ("eps_mp", config.radio.eps_mp),
        ("e_da", config.radio.e_da),
        ("d0", config.radio.d0),
        ("initial_energy", config.radio.initial_energy),
        ("c", config.election.c),
    ];
    for (key, v) in positive {
        if !(v > 0.0) || !v.is_finite() {
            return Err(constraint(key, "must be positive and finite"));
        }
    }
    if config.radio.message_bits == 0 {
        return Err(constraint("message_bits", "must be at least 1"));
    }
    let probabilities = [
        ("p", config.election.p),
        ("p_opt1", config.election.p_opt1),
        ("p_opt2", config.election.p_opt2),
    ];
    for (key, v) in probabilities {
        if !(v > 0.0 && v < 1.0) {
            return Err(constraint(key, "must lie strictly between 0 and 1"));
        }
    }
    Ok(())
}

/// Parse a flat `key = value` config body. Blank lines and `#` comments are
/// ignored.
pub fn parse_config(body: &str, base: SimConfig) -> Result<SimConfig, ConfigError> {
    let mut config = base;
    for line in body.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::MalformedLine(line.to_string()))?;
        apply_entry(&mut config, key.trim(), value.trim())?;
    }
    Ok(config)
}

/// Build the effective config: defaults, then the optional file, then the
/// command-line overrides, then validation.
pub fn load_config(
    path: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<SimConfig, ConfigError> {
    let mut config = SimConfig::default();
    if let Some(path) = path {
        let body = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        config = parse_config(&body, config)?;
    }
    for (key, value) in overrides {
        apply_entry(&mut config, key, value)?;
    }
    validate(&config)?;
    Ok(config)
}

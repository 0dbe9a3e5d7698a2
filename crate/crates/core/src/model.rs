//! Network parameterization, unit conversions and scenario files.
//!
//! Everything downstream works in linear watts and points per m². dBm only
//! appears here, when scenarios are ingested.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{field} must be a finite number (got {value})")]
    NonFinite { field: &'static str, value: f64 },
    #[error("intensity {field} must be >= 0 (got {value})")]
    NegativeIntensity { field: &'static str, value: f64 },
    #[error("activity probability {field} must lie strictly in (0, 1) (got {value})")]
    ActivityOutOfRange { field: &'static str, value: f64 },
    #[error("path-loss exponent {field} must be > 2 (got {value})")]
    PathLossTooSmall { field: &'static str, value: f64 },
    #[error("transmit power {field} must be > 0 (got {value})")]
    NonPositivePower { field: &'static str, value: f64 },
    #[error("noise must be >= 0 (got {0})")]
    NegativeNoise(f64),
    #[error("antennas must be a positive integer (got {0})")]
    InvalidAntennas(f64),
    #[error("bandwidth_hz must be > 0 (got {0})")]
    NonPositiveBandwidth(f64),
    #[error("missing field {0}")]
    MissingField(&'static str),
    #[error("give either noise or psd_dbm_per_hz + bandwidth_hz, not both")]
    ConflictingNoise,
    #[error("give {0} either in watts or in dBm, not both")]
    ConflictingPower(&'static str),
    #[error("unknown parameter {0:?}")]
    UnknownField(String),
    #[error("malformed scenario: {0}")]
    Parse(String),
    #[error("cannot read scenario {path}: {reason}")]
    Io { path: String, reason: String },
}

/// Names of every scalar parameter, in canonical order.
pub const FIELD_NAMES: [&str; 13] = [
    "lambda_s",
    "lambda_ap",
    "lambda_sk",
    "lambda_e_s",
    "lambda_e_ap",
    "rho_s",
    "rho_ap",
    "antennas",
    "alpha",
    "beta",
    "p_s",
    "p_ap",
    "noise",
];

/// Complete, validated parameter set of the three-tier network.
///
/// Immutable once built; the `with_*` helpers return a validated copy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig<T> {
    lambda_s: T,
    lambda_ap: T,
    lambda_sk: T,
    lambda_e_s: T,
    lambda_e_ap: T,
    rho_s: T,
    rho_ap: T,
    antennas: u32,
    alpha: T,
    beta: T,
    p_s: T,
    p_ap: T,
    noise: T,
}

/// Unvalidated parameters in SI units, as they appear on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigParams {
    pub lambda_s: f64,
    pub lambda_ap: f64,
    pub lambda_sk: f64,
    pub lambda_e_s: f64,
    pub lambda_e_ap: f64,
    pub rho_s: f64,
    pub rho_ap: f64,
    pub antennas: u32,
    pub alpha: f64,
    pub beta: f64,
    pub p_s: f64,
    pub p_ap: f64,
    pub noise: f64,
}

impl ConfigParams {
    pub fn get(&self, field: &str) -> Result<f64, ConfigError> {
        Ok(match field {
            "lambda_s" => self.lambda_s,
            "lambda_ap" => self.lambda_ap,
            "lambda_sk" => self.lambda_sk,
            "lambda_e_s" => self.lambda_e_s,
            "lambda_e_ap" => self.lambda_e_ap,
            "rho_s" => self.rho_s,
            "rho_ap" => self.rho_ap,
            "antennas" => self.antennas as f64,
            "alpha" => self.alpha,
            "beta" => self.beta,
            "p_s" => self.p_s,
            "p_ap" => self.p_ap,
            "noise" => self.noise,
            other => return Err(ConfigError::UnknownField(other.to_string())),
        })
    }

    pub fn set(&mut self, field: &str, value: f64) -> Result<(), ConfigError> {
        match field {
            "lambda_s" => self.lambda_s = value,
            "lambda_ap" => self.lambda_ap = value,
            "lambda_sk" => self.lambda_sk = value,
            "lambda_e_s" => self.lambda_e_s = value,
            "lambda_e_ap" => self.lambda_e_ap = value,
            "rho_s" => self.rho_s = value,
            "rho_ap" => self.rho_ap = value,
            "antennas" => self.antennas = antennas_from_f64(value)?,
            "alpha" => self.alpha = value,
            "beta" => self.beta = value,
            "p_s" => self.p_s = value,
            "p_ap" => self.p_ap = value,
            "noise" => self.noise = value,
            other => return Err(ConfigError::UnknownField(other.to_string())),
        }
        Ok(())
    }
}

fn antennas_from_f64(value: f64) -> Result<u32, ConfigError> {
    if value.is_finite() && value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as u32)
    } else {
        Err(ConfigError::InvalidAntennas(value))
    }
}

fn finite(field: &'static str, value: f64) -> Result<f64, ConfigError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ConfigError::NonFinite { field, value })
    }
}

impl<T: Scalar> NetworkConfig<T> {
    pub fn new(p: ConfigParams) -> Result<Self, ConfigError> {
        for (field, value) in [
            ("lambda_s", p.lambda_s),
            ("lambda_ap", p.lambda_ap),
            ("lambda_sk", p.lambda_sk),
            ("lambda_e_s", p.lambda_e_s),
            ("lambda_e_ap", p.lambda_e_ap),
        ] {
            if finite(field, value)? < 0.0 {
                return Err(ConfigError::NegativeIntensity { field, value });
            }
        }
        for (field, value) in [("rho_s", p.rho_s), ("rho_ap", p.rho_ap)] {
            let v = finite(field, value)?;
            if !(v > 0.0 && v < 1.0) {
                return Err(ConfigError::ActivityOutOfRange { field, value });
            }
        }
        if p.antennas == 0 {
            return Err(ConfigError::InvalidAntennas(0.0));
        }
        for (field, value) in [("alpha", p.alpha), ("beta", p.beta)] {
            // +inf is a legitimate limit for the exponent, NaN is not.
            if value.is_nan() {
                return Err(ConfigError::NonFinite { field, value });
            }
            if value <= 2.0 {
                return Err(ConfigError::PathLossTooSmall { field, value });
            }
        }
        for (field, value) in [("p_s", p.p_s), ("p_ap", p.p_ap)] {
            if finite(field, value)? <= 0.0 {
                return Err(ConfigError::NonPositivePower { field, value });
            }
        }
        if finite("noise", p.noise)? < 0.0 {
            return Err(ConfigError::NegativeNoise(p.noise));
        }
        Ok(Self {
            lambda_s: T::lit(p.lambda_s),
            lambda_ap: T::lit(p.lambda_ap),
            lambda_sk: T::lit(p.lambda_sk),
            lambda_e_s: T::lit(p.lambda_e_s),
            lambda_e_ap: T::lit(p.lambda_e_ap),
            rho_s: T::lit(p.rho_s),
            rho_ap: T::lit(p.rho_ap),
            antennas: p.antennas,
            alpha: T::lit(p.alpha),
            beta: T::lit(p.beta),
            p_s: T::lit(p.p_s),
            p_ap: T::lit(p.p_ap),
            noise: T::lit(p.noise),
        })
    }

    pub fn params(&self) -> ConfigParams {
        ConfigParams {
            lambda_s: self.lambda_s.as_f64(),
            lambda_ap: self.lambda_ap.as_f64(),
            lambda_sk: self.lambda_sk.as_f64(),
            lambda_e_s: self.lambda_e_s.as_f64(),
            lambda_e_ap: self.lambda_e_ap.as_f64(),
            rho_s: self.rho_s.as_f64(),
            rho_ap: self.rho_ap.as_f64(),
            antennas: self.antennas,
            alpha: self.alpha.as_f64(),
            beta: self.beta.as_f64(),
            p_s: self.p_s.as_f64(),
            p_ap: self.p_ap.as_f64(),
            noise: self.noise.as_f64(),
        }
    }

    /// Same network with one named parameter replaced.
    pub fn with_param(&self, field: &str, value: f64) -> Result<Self, ConfigError> {
        let mut p = self.params();
        p.set(field, value)?;
        Self::new(p)
    }

    pub fn with_antennas(&self, antennas: u32) -> Result<Self, ConfigError> {
        self.with_param("antennas", antennas as f64)
    }

    pub fn with_noise(&self, noise: f64) -> Result<Self, ConfigError> {
        self.with_param("noise", noise)
    }

    /// Converts to another scalar type.
    pub fn cast<U: Scalar>(&self) -> NetworkConfig<U> {
        NetworkConfig::new(self.params()).expect("validated parameters stay valid")
    }

    pub fn lambda_s(&self) -> T {
        self.lambda_s
    }
    pub fn lambda_ap(&self) -> T {
        self.lambda_ap
    }
    pub fn lambda_sk(&self) -> T {
        self.lambda_sk
    }
    pub fn lambda_e_s(&self) -> T {
        self.lambda_e_s
    }
    pub fn lambda_e_ap(&self) -> T {
        self.lambda_e_ap
    }
    pub fn rho_s(&self) -> T {
        self.rho_s
    }
    pub fn rho_ap(&self) -> T {
        self.rho_ap
    }
    pub fn antennas(&self) -> u32 {
        self.antennas
    }
    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn beta(&self) -> T {
        self.beta
    }
    pub fn p_s(&self) -> T {
        self.p_s
    }
    pub fn p_ap(&self) -> T {
        self.p_ap
    }
    pub fn noise(&self) -> T {
        self.noise
    }

    /// Ratio of access-point to sensor transmit power, P_ap / P_s.
    pub fn mu(&self) -> T {
        mu(self)
    }
}

/// P_ap / P_s in linear scale.
pub fn mu<T: Scalar>(cfg: &NetworkConfig<T>) -> T {
    cfg.p_ap / cfg.p_s
}

/// dBm to watts: 10^((x - 30) / 10).
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Thermal noise power over `bandwidth_hz` for a flat PSD given in dBm/Hz.
pub fn noise_from_psd(psd_dbm_per_hz: f64, bandwidth_hz: f64) -> Result<f64, ConfigError> {
    if !(bandwidth_hz > 0.0) || !bandwidth_hz.is_finite() {
        return Err(ConfigError::NonPositiveBandwidth(bandwidth_hz));
    }
    Ok(dbm_to_watts(psd_dbm_per_hz + 10.0 * bandwidth_hz.log10()))
}

/// Scenario file contents before validation.
///
/// `noise` may be replaced by `psd_dbm_per_hz` + `bandwidth_hz`, and either
/// power may be given in dBm through `p_s_dbm` / `p_ap_dbm`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub lambda_s: Option<f64>,
    pub lambda_ap: Option<f64>,
    pub lambda_sk: Option<f64>,
    pub lambda_e_s: Option<f64>,
    pub lambda_e_ap: Option<f64>,
    pub rho_s: Option<f64>,
    pub rho_ap: Option<f64>,
    pub antennas: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_ap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_s_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_ap_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd_dbm_per_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth_hz: Option<f64>,
}

impl Scenario {
    pub fn from_config<T: Scalar>(cfg: &NetworkConfig<T>) -> Self {
        let p = cfg.params();
        Scenario {
            lambda_s: Some(p.lambda_s),
            lambda_ap: Some(p.lambda_ap),
            lambda_sk: Some(p.lambda_sk),
            lambda_e_s: Some(p.lambda_e_s),
            lambda_e_ap: Some(p.lambda_e_ap),
            rho_s: Some(p.rho_s),
            rho_ap: Some(p.rho_ap),
            antennas: Some(p.antennas as f64),
            alpha: Some(p.alpha),
            beta: Some(p.beta),
            p_s: Some(p.p_s),
            p_ap: Some(p.p_ap),
            noise: Some(p.noise),
            ..Default::default()
        }
    }

    /// Parses either JSON (leading `{`) or `key = value` lines.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
        } else {
            Self::parse_key_value(text)
        }
    }

    fn parse_key_value(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| ConfigError::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().to_string();
            let value = value.trim();
            let json = if key == "name" || key == "description" {
                serde_json::Value::String(value.trim_matches('"').to_string())
            } else {
                let v: f64 = value.parse().map_err(|_| {
                    ConfigError::Parse(format!("line {}: {key} = {value:?} is not a number", lineno + 1))
                })?;
                serde_json::json!(v)
            };
            if map.insert(key.clone(), json).is_some() {
                return Err(ConfigError::Parse(format!("duplicate key {key}")));
            }
        }
        serde_json::from_value(serde_json::Value::Object(map.into_iter().collect()))
            .map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn params(&self) -> Result<ConfigParams, ConfigError> {
        fn req(v: Option<f64>, field: &'static str) -> Result<f64, ConfigError> {
            v.ok_or(ConfigError::MissingField(field))
        }
        fn power(w: Option<f64>, dbm: Option<f64>, field: &'static str) -> Result<f64, ConfigError> {
            match (w, dbm) {
                (Some(_), Some(_)) => Err(ConfigError::ConflictingPower(field)),
                (Some(w), None) => Ok(w),
                (None, Some(d)) => Ok(dbm_to_watts(finite(field, d)?)),
                (None, None) => Err(ConfigError::MissingField(field)),
            }
        }
        let noise = match (self.noise, self.psd_dbm_per_hz, self.bandwidth_hz) {
            (Some(n), None, None) => n,
            (None, Some(psd), Some(bw)) => noise_from_psd(psd, bw)?,
            (Some(_), _, _) => return Err(ConfigError::ConflictingNoise),
            (None, None, _) => return Err(ConfigError::MissingField("noise")),
            (None, Some(_), None) => return Err(ConfigError::MissingField("bandwidth_hz")),
        };
        Ok(ConfigParams {
            lambda_s: req(self.lambda_s, "lambda_s")?,
            lambda_ap: req(self.lambda_ap, "lambda_ap")?,
            lambda_sk: req(self.lambda_sk, "lambda_sk")?,
            lambda_e_s: req(self.lambda_e_s, "lambda_e_s")?,
            lambda_e_ap: req(self.lambda_e_ap, "lambda_e_ap")?,
            rho_s: req(self.rho_s, "rho_s")?,
            rho_ap: req(self.rho_ap, "rho_ap")?,
            antennas: antennas_from_f64(req(self.antennas, "antennas")?)?,
            alpha: req(self.alpha, "alpha")?,
            beta: req(self.beta, "beta")?,
            p_s: power(self.p_s, self.p_s_dbm, "p_s")?,
            p_ap: power(self.p_ap, self.p_ap_dbm, "p_ap")?,
            noise,
        })
    }

    pub fn config<T: Scalar>(&self) -> Result<NetworkConfig<T>, ConfigError> {
        NetworkConfig::new(self.params()?)
    }
}

/// A bundled reference scenario.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub scenario: Scenario,
}

impl Preset {
    pub fn config<T: Scalar>(&self) -> NetworkConfig<T> {
        self.scenario.config().expect("bundled presets are valid")
    }

    pub fn description(&self) -> &str {
        self.scenario.description.as_deref().unwrap_or("")
    }
}

const PRESET_SOURCES: [(&str, &str); 6] = [
    ("fig2", include_str!("../presets/fig2.json")),
    ("fig3", include_str!("../presets/fig3.json")),
    ("fig4", include_str!("../presets/fig4.json")),
    ("fig5", include_str!("../presets/fig5.json")),
    ("fig6", include_str!("../presets/fig6.json")),
    ("fig7", include_str!("../presets/fig7.json")),
];

pub fn presets() -> Vec<Preset> {
    PRESET_SOURCES
        .iter()
        .map(|(name, src)| Preset {
            name,
            scenario: Scenario::parse(src).expect("bundled preset parses"),
        })
        .collect()
}

pub fn preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}

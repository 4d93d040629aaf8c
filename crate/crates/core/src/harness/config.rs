//! Experiment configuration as read from JSON, and named presets.

use serde::{Deserialize, Serialize};

use crate::channel::{ActivityMode, ChannelModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ura,
    Sra,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Ura => "ura",
            Scheme::Sra => "sra",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Codebook {
    #[default]
    Gabor,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    pub q: usize,
    pub n_prime: usize,
    pub k_prime: usize,
}

fn one() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DictionaryConfig {
    /// Block length; prime for Gabor.
    pub n: usize,
    /// Column count; when given it must equal what the scheme needs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_total: Option<usize>,
    #[serde(default = "one")]
    pub stride: usize,
    #[serde(default)]
    pub kind: Codebook,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub model: ChannelModel,
    #[serde(default = "one")]
    pub antennas: usize,
    #[serde(default = "unit")]
    pub power: f64,
    /// Grid of operating points.
    pub ebn0_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadConfig {
    /// Active users per block. Required for U-RA; for S-RA it fixes the
    /// count instead of drawing activity independently.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_users: Option<usize>,
    /// Configured users on the block (S-RA).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub users: Option<usize>,
    /// Per-user activation probability (S-RA).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoderConfig {
    pub max_iterations: usize,
    pub damping: f64,
    pub tolerance: f64,
    /// U-RA candidates per section; defaults to the active-user count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate_depth: Option<usize>,
    pub outer_loops: usize,
    pub siso: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self { max_iterations: 100, damping: 0.7, tolerance: 1e-6, candidate_depth: None, outer_loops: 5, siso: true }
    }
}

fn default_n_tot() -> usize {
    30_000
}

fn default_target() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub code: CodeConfig,
    pub dictionary: DictionaryConfig,
    pub channel: ChannelSpec,
    pub load: LoadConfig,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_n_tot")]
    pub n_tot: usize,
    #[serde(default = "default_target")]
    pub target_pe: f64,
    #[serde(default)]
    pub decoder: DecoderConfig,
}

fn cfg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Dictionary columns the scheme needs.
    pub fn required_columns(&self) -> usize {
        let per_user = self.code.q * self.code.n_prime;
        match self.scheme {
            Scheme::Ura => per_user,
            Scheme::Sra => per_user * self.load.users.unwrap_or(0),
        }
    }

    /// Expected active users on one block.
    pub fn active_per_block(&self) -> f64 {
        match (self.scheme, self.load.active_users) {
            (_, Some(k)) => k as f64,
            (Scheme::Sra, None) => self.load.users.unwrap_or(0) as f64 * self.load.activation.unwrap_or(0.0),
            (Scheme::Ura, None) => 0.0,
        }
    }

    /// Total active users over `n_tot` channel uses.
    pub fn kbar_a(&self) -> f64 {
        self.active_per_block() * self.n_tot as f64 / self.dictionary.n as f64
    }

    /// S-RA activity model and the decoder's prior activation.
    pub fn sra_activity(&self) -> Result<(ActivityMode, f64)> {
        let users = self.load.users.ok_or_else(|| Error::Config("S-RA needs load.users".into()))?;
        match (self.load.active_users, self.load.activation) {
            (Some(k), Some(p)) => Ok((ActivityMode::FixedCount(k), p)),
            (Some(k), None) => Ok((ActivityMode::FixedCount(k), k as f64 / users as f64)),
            (None, Some(p)) => Ok((ActivityMode::Bernoulli(p), p)),
            (None, None) => cfg_err("S-RA needs load.active_users or load.activation"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return cfg_err("trials must be at least 1");
        }
        if self.channel.ebn0_db.iter().any(|v| !v.is_finite()) {
            return cfg_err("Eb/N0 values must be finite");
        }
        if self.channel.antennas == 0 || !(self.channel.power > 0.0) {
            return cfg_err("need at least one antenna and positive power");
        }
        if !(self.target_pe > 0.0 && self.target_pe < 1.0) {
            return cfg_err("target_pe must lie in (0, 1)");
        }
        if self.dictionary.stride == 0 {
            return cfg_err("stride must be positive");
        }
        let d = &self.decoder;
        if d.max_iterations == 0 || !(d.damping > 0.0 && d.damping <= 1.0) || d.outer_loops == 0 {
            return cfg_err("decoder needs positive iterations, loops and damping in (0, 1]");
        }
        if d.candidate_depth == Some(0) {
            return cfg_err("candidate_depth must be positive");
        }
        match self.scheme {
            Scheme::Ura => {
                if self.load.active_users.is_none() {
                    return cfg_err("U-RA needs load.active_users");
                }
                if self.load.users.is_some() || self.load.activation.is_some() {
                    return cfg_err("U-RA takes only load.active_users");
                }
            }
            Scheme::Sra => {
                let (mode, p) = self.sra_activity()?;
                let users = self.load.users.unwrap_or(0);
                if users == 0 {
                    return cfg_err("S-RA needs at least one configured user");
                }
                if let ActivityMode::FixedCount(k) = mode {
                    if k > users {
                        return cfg_err(format!("{k} active users exceed {users} configured"));
                    }
                }
                if !(p > 0.0 && p < 1.0) {
                    return cfg_err(format!("activation {p} must lie in (0, 1)"));
                }
            }
        }
        let need = self.required_columns();
        if let Some(m) = self.dictionary.m_total {
            if m != need {
                return cfg_err(format!("dictionary.m_total is {m} but the scheme needs {need}"));
            }
        }
        if self.dictionary.kind == Codebook::Gabor && need.saturating_mul(self.dictionary.stride) > self.dictionary.n.pow(2) {
            return cfg_err(format!("{need} columns with stride {} exceed the N^2 frame", self.dictionary.stride));
        }
        Ok(())
    }
}

/// Names of the built-in configurations.
pub fn preset_names() -> &'static [&'static str] {
    &["b36-n149", "b65-n257", "b98-n389", "b98-n431", "sra-ppm512-k10"]
}

fn ura_preset(q: usize, n_prime: usize, k_prime: usize, n: usize, ebn0: Vec<f64>) -> ExperimentConfig {
    ExperimentConfig {
        scheme: Scheme::Ura,
        code: CodeConfig { q, n_prime, k_prime },
        dictionary: DictionaryConfig { n, m_total: Some(q * n_prime), stride: 1, kind: Codebook::Gabor },
        channel: ChannelSpec { model: ChannelModel::Awgn, antennas: 1, power: 1.0, ebn0_db: ebn0 },
        load: LoadConfig { active_users: Some(3), users: None, activation: None },
        trials: 200,
        seed: 1,
        n_tot: 30_000,
        target_pe: 0.05,
        decoder: DecoderConfig::default(),
    }
}

/// Built-in configuration by name.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let cfg = match name {
        "b36-n149" => ura_preset(4096, 5, 3, 149, vec![6.0, 9.0, 12.0]),
        "b65-n257" => ura_preset(8192, 7, 5, 257, vec![4.0, 7.0, 10.0]),
        "b98-n389" => ura_preset(16384, 9, 7, 389, vec![2.0, 5.0, 8.0]),
        "b98-n431" => ura_preset(16384, 11, 7, 431, vec![2.0, 5.0, 8.0]),
        "sra-ppm512-k10" => ExperimentConfig {
            scheme: Scheme::Sra,
            code: CodeConfig { q: 512, n_prime: 4, k_prime: 4 },
            dictionary: DictionaryConfig { n: 149, m_total: Some(20_480), stride: 1, kind: Codebook::Gabor },
            channel: ChannelSpec { model: ChannelModel::Rayleigh, antennas: 4, power: 1.0, ebn0_db: vec![0.0, 5.0, 10.0] },
            load: LoadConfig { active_users: Some(6), users: Some(10), activation: Some(0.6) },
            trials: 100,
            seed: 1,
            n_tot: 30_000,
            target_pe: 0.05,
            decoder: DecoderConfig::default(),
        },
        other => return cfg_err(format!("unknown preset '{other}'; known: {}", preset_names().join(", "))),
    };
    cfg.validate()?;
    Ok(cfg)
}

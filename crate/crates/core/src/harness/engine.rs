//! Monte-Carlo trials at one operating point.
//!
//! Trial `t` draws everything (activity, messages, noise, gains) from its
//! own stream `trial_rng(seed, t)`, so results are independent of the worker
//! count and realizations are shared across Eb/N0 values.

use std::sync::Arc;
use std::time::Instant;

use ndarray::ArrayView2;
use rand::Rng;
use rayon::prelude::*;

use crate::amp::AmpConfig;
use crate::channel::{draw_activity, ebn0_to_noise, simulate_block, trial_rng, ActivityMode, ChannelConfig};
use crate::cwcode::ConstantWeightCode;
use crate::error::{Error, Result};
use crate::gabor::{Dictionary, GaborDictionary, GaussianDictionary};
use crate::galois::Symbol;
use crate::sra::{sra_detect, sra_encode_symbols, SraConfig};
use crate::ura::{count_missed, ura_decode, ura_encode_symbols, UraConfig};
use crate::C64;

use super::config::{Codebook, ExperimentConfig, Scheme};

/// Outcome of one channel realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: u64,
    /// Truly active users (the error-rate denominator).
    pub active: usize,
    /// Active users not recovered.
    pub missed: usize,
    /// Spurious list entries (U-RA) or inactive users declared active (S-RA).
    pub false_alarms: usize,
    pub diverged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub ebn0_db: f64,
    pub records: Vec<TrialRecord>,
    pub wall_ms: u128,
}

impl PointResult {
    pub fn trials(&self) -> usize {
        self.records.len()
    }

    pub fn events(&self) -> usize {
        self.records.iter().map(|r| r.active).sum()
    }

    pub fn missed(&self) -> usize {
        self.records.iter().map(|r| r.missed).sum()
    }

    pub fn false_alarms(&self) -> usize {
        self.records.iter().map(|r| r.false_alarms).sum()
    }

    /// Per-user error probability; 0 when no user was ever active.
    pub fn pe(&self) -> f64 {
        match self.events() {
            0 => 0.0,
            n => self.missed() as f64 / n as f64,
        }
    }
}

#[derive(Debug, Clone)]
enum Receiver {
    Ura(UraConfig),
    Sra { cfg: SraConfig, mode: ActivityMode },
}

/// A validated configuration with its dictionary built once.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    receiver: Receiver,
    amp: AmpConfig,
}

/// Seed offset for the Gaussian codebook so it never shares a stream with trials.
const CODEBOOK_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let code = ConstantWeightCode::new(config.code.q, config.code.n_prime, config.code.k_prime)?;
        let m = config.required_columns();
        let n = config.dictionary.n;
        let dict: Arc<dyn Dictionary> = match config.dictionary.kind {
            Codebook::Gabor => Arc::new(GaborDictionary::new(n, m, config.dictionary.stride)?),
            Codebook::Gaussian => Arc::new(GaussianDictionary::new(n, m, config.seed ^ CODEBOOK_SEED_SALT)?),
        };
        let model = config.channel.model;
        let receiver = match config.scheme {
            Scheme::Ura => {
                let k_a = config.load.active_users.expect("validated");
                let mut cfg = UraConfig::new(code, dict, k_a, model)?;
                cfg.power = config.channel.power;
                if let Some(depth) = config.decoder.candidate_depth {
                    cfg.candidate_depth = depth;
                }
                Receiver::Ura(cfg)
            }
            Scheme::Sra => {
                let (mode, prior) = config.sra_activity()?;
                let mut cfg = SraConfig::new(code, dict, config.load.users.expect("validated"), prior, model)?;
                cfg.power = config.channel.power;
                cfg.outer_loops = config.decoder.outer_loops;
                cfg.siso = config.decoder.siso;
                Receiver::Sra { cfg, mode }
            }
        };
        let amp = AmpConfig {
            max_iterations: config.decoder.max_iterations,
            damping: config.decoder.damping,
            tolerance: config.decoder.tolerance,
            ..AmpConfig::default()
        };
        Ok(Self { config, receiver, amp })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    fn code(&self) -> &ConstantWeightCode {
        match &self.receiver {
            Receiver::Ura(c) => &c.code,
            Receiver::Sra { cfg, .. } => &cfg.code,
        }
    }

    fn channel(&self, ebn0_db: f64) -> Result<ChannelConfig> {
        let c = &self.config.channel;
        Ok(ChannelConfig {
            model: c.model,
            antennas: c.antennas,
            noise_variance: ebn0_to_noise(ebn0_db, c.power, self.config.dictionary.n, self.code().params().b)?,
            power: c.power,
            block_length: self.config.dictionary.n,
        })
    }

    fn draw_message<R: Rng>(&self, rng: &mut R) -> Vec<Symbol> {
        let code = self.code();
        (0..code.info_sections()).map(|_| rng.random_range(0..code.q()) as Symbol).collect()
    }

    /// Runs every trial at `ebn0_db` on `threads` workers (0 = rayon default).
    pub fn run_point(&self, ebn0_db: f64, threads: usize) -> Result<PointResult> {
        match &self.receiver {
            Receiver::Ura(cfg) => self.run_ura_with(ebn0_db, threads, &|y| ura_decode(cfg, y, &self.amp)),
            Receiver::Sra { .. } => self.run_trials(ebn0_db, threads, |t| self.sra_trial(ebn0_db, t)),
        }
    }

    /// U-RA trials with a caller-supplied list decoder.
    pub fn run_ura_with(
        &self,
        ebn0_db: f64,
        threads: usize,
        decoder: &(dyn Fn(ArrayView2<C64>) -> Result<Vec<Vec<Symbol>>> + Sync),
    ) -> Result<PointResult> {
        let Receiver::Ura(cfg) = &self.receiver else {
            return Err(Error::Unsupported("custom list decoders apply to U-RA only".into()));
        };
        let channel = self.channel(ebn0_db)?;
        self.run_trials(ebn0_db, threads, |t| {
            let mut rng = trial_rng(self.config.seed, t);
            let sent: Vec<Vec<Symbol>> = (0..cfg.active_users).map(|_| self.draw_message(&mut rng)).collect();
            let signals = sent.iter().map(|m| ura_encode_symbols(cfg, m)).collect::<Result<Vec<_>>>()?;
            let y = simulate_block(&signals, &channel, &mut rng)?;
            let (list, diverged) = match decoder(y.view()) {
                Ok(list) => (list, false),
                Err(Error::Divergence { .. }) => (Vec::new(), true),
                Err(e) => return Err(e),
            };
            Ok(TrialRecord {
                trial: t,
                active: sent.len(),
                missed: count_missed(&sent, &list),
                false_alarms: list.iter().filter(|m| !sent.contains(m)).count(),
                diverged,
            })
        })
    }

    fn sra_trial(&self, ebn0_db: f64, t: u64) -> Result<TrialRecord> {
        let Receiver::Sra { cfg, mode } = &self.receiver else { unreachable!() };
        let channel = self.channel(ebn0_db)?;
        let mut rng = trial_rng(self.config.seed, t);
        let active = draw_activity(cfg.users, *mode, &mut rng)?;
        let sent: Vec<Vec<Symbol>> = active.iter().map(|_| self.draw_message(&mut rng)).collect();
        let signals = active
            .iter()
            .zip(&sent)
            .map(|(&u, m)| sra_encode_symbols(cfg, u, m))
            .collect::<Result<Vec<_>>>()?;
        let y = simulate_block(&signals, &channel, &mut rng)?;
        let decisions = match sra_detect(cfg, y.view(), &self.amp) {
            Ok(out) => out.users,
            Err(Error::Divergence { .. }) => {
                return Ok(TrialRecord { trial: t, active: active.len(), missed: active.len(), false_alarms: 0, diverged: true });
            }
            Err(e) => return Err(e),
        };
        let mut missed = 0;
        let mut false_alarms = 0;
        for (u, d) in decisions.iter().enumerate() {
            match active.binary_search(&u) {
                Ok(i) => missed += usize::from(!d.active || d.message.as_ref() != Some(&sent[i])),
                Err(_) => false_alarms += usize::from(d.active),
            }
        }
        Ok(TrialRecord { trial: t, active: active.len(), missed, false_alarms, diverged: false })
    }

    fn run_trials(&self, ebn0_db: f64, threads: usize, trial: impl Fn(u64) -> Result<TrialRecord> + Sync) -> Result<PointResult> {
        let start = Instant::now();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
        let records = pool.install(|| {
            (0..self.config.trials as u64).into_par_iter().map(&trial).collect::<Result<Vec<_>>>()
        })?;
        Ok(PointResult { ebn0_db, records, wall_ms: start.elapsed().as_millis() })
    }
}

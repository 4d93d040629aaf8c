//! Sourced random access: each configured user owns a contiguous slice of
//! the dictionary, so the receiver detects who is active and what they sent.
//!
//! User `l`, section `i`, symbol `j` maps to column `l * n' q + i q + j`.
//! Detection alternates AMP with per-user activity and sequence belief
//! refinement, optionally passing the refined beliefs through the RS SISO
//! decoder before they become the next AMP prior.

use std::sync::Arc;

use ndarray::ArrayView2;

use crate::amp::{amp_run, extract_llrs, AmpConfig, Fading, Prior};
use crate::channel::ChannelModel;
use crate::cwcode::ConstantWeightCode;
use crate::error::{invalid, Result};
use crate::gabor::Dictionary;
use crate::galois::Symbol;
use crate::ura::superpose_columns;
use crate::C64;

/// Belief clamp keeping odds finite.
pub const BELIEF_CLAMP: f64 = 1e-12;

fn clamp(p: f64) -> f64 {
    p.clamp(BELIEF_CLAMP, 1.0 - BELIEF_CLAMP)
}

fn odds(p: f64) -> f64 {
    let p = clamp(p);
    p / (1.0 - p)
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone)]
pub struct SraConfig {
    pub code: ConstantWeightCode,
    /// Holds `users * n' q` columns, one contiguous slice per user.
    pub dict: Arc<dyn Dictionary>,
    pub users: usize,
    /// Prior activation probability of each configured user.
    pub activation: f64,
    pub outer_loops: usize,
    pub siso: bool,
    /// Weight of the decoded codeword in the SISO belief refresh.
    pub siso_gamma: f64,
    /// A user is declared active when its posterior exceeds this.
    pub threshold: f64,
    /// Loops stop early once no prior moves by more than this.
    pub tolerance: f64,
    pub power: f64,
    pub channel: ChannelModel,
}

impl SraConfig {
    pub fn new(code: ConstantWeightCode, dict: Arc<dyn Dictionary>, users: usize, activation: f64, channel: ChannelModel) -> Result<Self> {
        let cfg = Self {
            code,
            dict,
            users,
            activation,
            outer_loops: 5,
            siso: true,
            siso_gamma: 0.5,
            threshold: 0.5,
            tolerance: 1e-4,
            power: 1.0,
            channel,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn section_width(&self) -> usize {
        self.code.params().n
    }

    pub fn validate(&self) -> Result<()> {
        if self.users == 0 {
            return invalid("need at least one configured user");
        }
        let need = self.users * self.section_width();
        if self.dict.cols() != need {
            return invalid(format!("dictionary has {} columns, {} users need {need}", self.dict.cols(), self.users));
        }
        if !(self.activation > 0.0 && self.activation < 1.0) {
            return invalid(format!("activation probability {} must lie in (0, 1)", self.activation));
        }
        if self.outer_loops == 0 {
            return invalid("need at least one outer loop");
        }
        if !(0.0..=1.0).contains(&self.siso_gamma) || !(0.0..1.0).contains(&self.threshold) {
            return invalid("SISO weight and threshold must lie in [0, 1]");
        }
        if !(self.power > 0.0) {
            return invalid("power must be positive");
        }
        Ok(())
    }

    /// Nominal per-sequence amplitude `sqrt(P N / w)`.
    pub fn amplitude(&self) -> f64 {
        (self.power * self.dict.rows() as f64 / self.code.params().w as f64).sqrt()
    }

    fn fading(&self) -> Fading {
        let amplitude = self.amplitude();
        match self.channel {
            ChannelModel::Awgn => Fading::Deterministic { amplitude },
            ChannelModel::Rayleigh => Fading::Rayleigh { amplitude },
        }
    }
}

/// Signal sent by `user` for `k'` information symbols.
pub fn sra_encode_symbols(config: &SraConfig, user: usize, message: &[Symbol]) -> Result<Vec<C64>> {
    if user >= config.users {
        return invalid(format!("user {user} not configured"));
    }
    let cw = config.code.encode_symbols(message)?;
    let offset = user * config.section_width();
    superpose_columns(config.dict.as_ref(), cw.columns(config.code.q()).map(|c| c + offset), config.power)
}

/// Posterior activity of one user from its per-section sequence beliefs
/// (`sections[i][j]`), `q` symbols per section.
pub fn activity_update(sections: &[Vec<f64>], q: usize, prior: f64) -> f64 {
    let section_llr: f64 = sections
        .iter()
        .map(|sec| sec.iter().map(|&e| odds(e)).sum::<f64>().ln() - (q as f64).ln())
        .sum();
    sigmoid(section_llr + odds(prior).ln())
}

/// Sharpens one section's beliefs given the user's activity posterior:
/// `e_j <- [1 + (1 - e_j)/e_j * (sum_{r != j} e_r/(1 - e_r) + (1 - rho)/rho)]^-1`.
pub fn sequence_belief_update(section: &[f64], activity: f64) -> Vec<f64> {
    let rho = clamp(activity);
    let lambda: Vec<f64> = section.iter().map(|&e| odds(e)).collect();
    let total: f64 = lambda.iter().sum();
    let idle = (1.0 - rho) / rho;
    lambda.iter().map(|&l| l / (total + idle)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserDecision {
    pub active: bool,
    pub activity: f64,
    /// Decoded information symbols; `None` when the RS decoder gives up.
    pub message: Option<Vec<Symbol>>,
}

#[derive(Debug, Clone)]
pub struct SraOutput {
    pub users: Vec<UserDecision>,
    pub loops: usize,
}

fn argmax(v: &[f64]) -> Symbol {
    let mut best = 0;
    for (j, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = j;
        }
    }
    best as Symbol
}

/// Joint activity detection and decoding.
pub fn sra_detect(config: &SraConfig, y: ArrayView2<C64>, amp: &AmpConfig) -> Result<SraOutput> {
    config.validate()?;
    let (q, width, n_sec) = (config.code.q(), config.section_width(), config.code.sections());
    let has_parity = config.code.sections() > config.code.info_sections();
    let mut eps = vec![config.activation / q as f64; config.users * width];
    let mut activity = vec![config.activation; config.users];
    let mut sharpened: Vec<Vec<Vec<f64>>> = vec![vec![vec![0.0; q]; n_sec]; config.users];
    let mut loops = 0;

    for it in 1..=config.outer_loops {
        loops = it;
        let cfg = AmpConfig { prior: Prior::PerRow(eps.clone()), fading: config.fading(), ..amp.clone() };
        let beliefs: Vec<f64> = extract_llrs(&amp_run(config.dict.as_ref(), y, &cfg)?).into_iter().map(sigmoid).collect();

        let mut next = vec![0.0; eps.len()];
        for l in 0..config.users {
            let user = &beliefs[l * width..(l + 1) * width];
            let sections: Vec<Vec<f64>> = user.chunks(q).map(<[f64]>::to_vec).collect();
            let rho = activity_update(&sections, q, config.activation);
            activity[l] = rho;
            sharpened[l] = sections.iter().map(|s| sequence_belief_update(s, rho)).collect();

            let refreshed: Vec<Vec<f64>> = if config.siso && has_parity {
                let dist: Vec<Vec<f64>> = sharpened[l]
                    .iter()
                    .map(|s| {
                        let total: f64 = s.iter().sum();
                        if total > 0.0 {
                            s.iter().map(|v| v / total).collect()
                        } else {
                            vec![1.0 / q as f64; q]
                        }
                    })
                    .collect();
                let out = config.code.rs().siso_update(&dist, config.siso_gamma)?;
                out.beliefs.iter().map(|row| row.iter().map(|p| rho * p).collect()).collect()
            } else {
                sharpened[l].clone()
            };
            for (i, row) in refreshed.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    next[l * width + i * q + j] = clamp(*v);
                }
            }
        }
        let change = next.iter().zip(&eps).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        eps = next;
        if change < config.tolerance {
            break;
        }
    }

    let k = config.code.info_sections();
    let users = (0..config.users)
        .map(|l| {
            let hard: Vec<Symbol> = sharpened[l].iter().map(|s| argmax(s)).collect();
            let message = if has_parity {
                config.code.rs().decode(&hard, &[])?.map(|cw| cw[..k].to_vec())
            } else {
                Some(hard)
            };
            Ok(UserDecision { active: activity[l] > config.threshold, activity: activity[l], message })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SraOutput { users, loops })
}

//! Unsourced random access: every user shares one CW code and dictionary,
//! and the receiver returns an unordered list of messages.

use std::cmp::Ordering;
use std::sync::Arc;

use ndarray::{Array2, ArrayView2};

use crate::amp::{amp_run, extract_llrs, AmpConfig, Fading, Prior};
use crate::channel::ChannelModel;
use crate::cwcode::ConstantWeightCode;
use crate::error::{invalid, Result};
use crate::gabor::Dictionary;
use crate::galois::Symbol;
use crate::C64;

/// Aggregate-LLR terms are clamped to this magnitude so that hard (infinite)
/// inputs still rank by count.
const LLR_CLAMP: f64 = 1e6;

#[derive(Debug, Clone)]
pub struct UraConfig {
    pub code: ConstantWeightCode,
    pub dict: Arc<dyn Dictionary>,
    /// Active users per block, known to the receiver.
    pub active_users: usize,
    pub list_limit: usize,
    /// Candidates kept per section for the search decoder.
    pub candidate_depth: usize,
    pub power: f64,
    pub channel: ChannelModel,
}

impl UraConfig {
    /// Defaults: list limit and candidate depth equal to `active_users`, unit power.
    pub fn new(code: ConstantWeightCode, dict: Arc<dyn Dictionary>, active_users: usize, channel: ChannelModel) -> Result<Self> {
        let cfg = Self {
            code,
            dict,
            active_users,
            list_limit: active_users,
            candidate_depth: active_users.max(1),
            power: 1.0,
            channel,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.code.params().n;
        if self.dict.cols() != n {
            return invalid(format!("dictionary has {} columns, code length is {n}", self.dict.cols()));
        }
        if self.list_limit > self.active_users {
            return invalid("list limit cannot exceed the number of active users");
        }
        if self.candidate_depth == 0 {
            return invalid("candidate depth must be positive");
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

/// Sum of the selected columns rescaled to energy exactly `P N`. Columns of
/// different sections are not orthogonal, so the nominal amplitude alone
/// meets the power constraint only on average.
pub fn superpose_columns(dict: &dyn Dictionary, columns: impl Iterator<Item = usize>, power: f64) -> Result<Vec<C64>> {
    let mut s = vec![C64::new(0.0, 0.0); dict.rows()];
    for c in columns {
        for (o, v) in s.iter_mut().zip(dict.column(c).iter()) {
            *o += v;
        }
    }
    let energy: f64 = s.iter().map(|v| v.norm_sqr()).sum();
    if !(energy > 1e-12) {
        return invalid("selected columns cancel; cannot meet the power constraint");
    }
    let scale = (power * dict.rows() as f64 / energy).sqrt();
    s.iter_mut().for_each(|v| *v *= scale);
    Ok(s)
}

/// Transmitted signal for `k'` information symbols.
pub fn ura_encode_symbols(config: &UraConfig, message: &[Symbol]) -> Result<Vec<C64>> {
    let cw = config.code.encode_symbols(message)?;
    superpose_columns(config.dict.as_ref(), cw.columns(config.code.q()), config.power)
}

/// Transmitted signal for a `b`-bit message.
pub fn ura_encode(config: &UraConfig, bits: &[u8]) -> Result<Vec<C64>> {
    ura_encode_symbols(config, &config.code.bits_to_symbols(bits)?)
}

fn section_order(llrs: &[f64], q: usize, j: usize) -> Vec<Symbol> {
    let sec = &llrs[j * q..(j + 1) * q];
    let mut idx: Vec<Symbol> = (0..q as Symbol).filter(|&s| sec[s as usize] > f64::NEG_INFINITY).collect();
    // Stable sort keeps ascending symbols among ties.
    idx.sort_by(|&a, &b| sec[b as usize].total_cmp(&sec[a as usize]));
    idx
}

/// The `depth` best symbols per section, best first; ties go to the smaller
/// symbol and `-inf` entries are never candidates.
pub fn sections_from_llrs(llrs: &[f64], code: &ConstantWeightCode, depth: usize) -> Result<Vec<Vec<Symbol>>> {
    check_llrs(llrs, code)?;
    if depth == 0 {
        return invalid("depth must be positive");
    }
    Ok((0..code.sections())
        .map(|j| {
            let mut s = section_order(llrs, code.q(), j);
            s.truncate(depth);
            s
        })
        .collect())
}

/// Every symbol whose LLR exceeds `threshold`, best first.
pub fn sections_above(llrs: &[f64], code: &ConstantWeightCode, threshold: f64) -> Result<Vec<Vec<Symbol>>> {
    check_llrs(llrs, code)?;
    Ok((0..code.sections())
        .map(|j| {
            let sec = &llrs[j * code.q()..(j + 1) * code.q()];
            section_order(llrs, code.q(), j).into_iter().filter(|&s| sec[s as usize] > threshold).collect()
        })
        .collect())
}

fn check_llrs(llrs: &[f64], code: &ConstantWeightCode) -> Result<()> {
    if llrs.len() != code.params().n {
        return invalid(format!("{} LLRs for a code of length {}", llrs.len(), code.params().n));
    }
    if llrs.iter().any(|v| v.is_nan()) {
        return invalid("LLRs contain NaN");
    }
    Ok(())
}

struct Scored {
    message: Vec<Symbol>,
    exact: bool,
    score: f64,
}

/// Enumerates the product of the information-section candidates, re-encodes
/// each, and ranks: exact matches of the candidate support first, then by
/// aggregate LLR, then lexicographically.
pub fn outer_decode_search(
    candidates: &[Vec<Symbol>],
    llrs: &[f64],
    code: &ConstantWeightCode,
    list_limit: usize,
) -> Result<Vec<Vec<Symbol>>> {
    check_llrs(llrs, code)?;
    let (q, k, w) = (code.q(), code.info_sections(), code.params().w);
    if candidates.len() != code.sections() {
        return invalid(format!("{} candidate sections for {} code sections", candidates.len(), code.sections()));
    }
    let choices = &candidates[..k];
    if list_limit == 0 || choices.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }
    let mut in_support = vec![false; code.params().n];
    for (j, c) in candidates.iter().enumerate() {
        for &s in c {
            if (s as usize) >= q {
                return invalid(format!("candidate symbol {s} outside GF({q})"));
            }
            in_support[j * q + s as usize] = true;
        }
    }

    let mut scored = Vec::new();
    let mut idx = vec![0usize; k];
    'outer: loop {
        let message: Vec<Symbol> = idx.iter().zip(choices).map(|(&i, c)| c[i]).collect();
        let cw = code.rs().encode_unchecked(&message);
        let mut hits = 0;
        let mut score = 0.0;
        for (j, &s) in cw.iter().enumerate() {
            let col = j * q + s as usize;
            hits += usize::from(in_support[col]);
            score += llrs[col].clamp(-LLR_CLAMP, LLR_CLAMP);
        }
        scored.push(Scored { message, exact: hits == w, score });
        let mut pos = k;
        loop {
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
    scored.sort_by(|a, b| {
        b.exact
            .cmp(&a.exact)
            .then_with(|| b.score.partial_cmp(&a.score).unwrap_or(Ordering::Equal))
            .then_with(|| a.message.cmp(&b.message))
    });
    scored.truncate(list_limit);
    Ok(scored.into_iter().map(|s| s.message).collect())
}

/// Per-column activity LLRs from one AMP pass over `y`.
pub fn ura_llrs(config: &UraConfig, y: ArrayView2<C64>, amp: &AmpConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let eps = (config.active_users as f64 / config.code.q() as f64).min(1.0);
    let amp = AmpConfig { prior: Prior::Uniform(eps), fading: config.fading(), ..amp.clone() };
    Ok(extract_llrs(&amp_run(config.dict.as_ref(), y, &amp)?))
}

/// Full receiver: AMP, candidate selection, and list decoding.
pub fn ura_decode(config: &UraConfig, y: ArrayView2<C64>, amp: &AmpConfig) -> Result<Vec<Vec<Symbol>>> {
    let llrs = ura_llrs(config, y, amp)?;
    let sections = sections_from_llrs(&llrs, &config.code, config.candidate_depth)?;
    outer_decode_search(&sections, &llrs, &config.code, config.list_limit)
}

/// Number of transmitted messages missing from the decoded list.
pub fn count_missed(transmitted: &[Vec<Symbol>], list: &[Vec<Symbol>]) -> usize {
    transmitted.iter().filter(|m| !list.contains(m)).count()
}

/// Receive matrix with a single antenna from a plain sample vector.
pub fn as_column(y: &[C64]) -> Array2<C64> {
    Array2::from_shape_vec((y.len(), 1), y.to_vec()).expect("column shape")
}

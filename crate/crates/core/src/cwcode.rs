//! Constant-weight codes PPM(q) o RS(n', k') and OR-superposition tools.
//!
//! A binary codeword of length n = n'q is stored as its n' PPM positions: the
//! RS symbol value of each section is the index of the single 1 in it.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::galois::{GaloisField, ReedSolomonCode, Symbol};

/// Derived parameters (n, m, w, d, p, b) of PPM(q) o RS(n', k').
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CwParams {
    pub n: usize,
    /// Code size q^k', saturating.
    pub m: u128,
    pub w: usize,
    /// Maximum pairwise overlap.
    pub d: usize,
    /// Guaranteed disjunctive order; `None` when d = 0 (k' = 1, any order).
    pub p: Option<usize>,
    pub b: usize,
}

pub fn cw_params(q: usize, n_prime: usize, k_prime: usize) -> Result<CwParams> {
    if q < 2 || !q.is_power_of_two() {
        return invalid(format!("PPM order {q} is not a power of two"));
    }
    if k_prime == 0 || k_prime > n_prime || n_prime > q {
        return invalid(format!("RS({n_prime},{k_prime}) invalid over GF({q})"));
    }
    let bits = q.trailing_zeros() as usize;
    let w = n_prime;
    let d = k_prime - 1;
    Ok(CwParams {
        n: n_prime * q,
        m: (q as u128).checked_pow(k_prime as u32).unwrap_or(u128::MAX),
        w,
        d,
        p: (d > 0).then(|| w.div_ceil(d) - 1),
        b: k_prime * bits,
    })
}

/// A PPM-mapped codeword: entry j is the position of the 1 in section j.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryCodeword {
    pub positions: Vec<Symbol>,
}

impl BinaryCodeword {
    /// Dense 0/1 vector of length n'q.
    pub fn to_bits(&self, q: usize) -> Vec<bool> {
        let mut bits = vec![false; self.positions.len() * q];
        for (j, &s) in self.positions.iter().enumerate() {
            bits[j * q + s as usize] = true;
        }
        bits
    }

    /// Indices of the active dictionary columns.
    pub fn columns(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        self.positions.iter().enumerate().map(move |(j, &s)| j * q + s as usize)
    }
}

#[derive(Debug, Clone)]
pub struct ConstantWeightCode {
    rs: ReedSolomonCode,
    params: CwParams,
}

impl ConstantWeightCode {
    pub fn new(q: usize, n_prime: usize, k_prime: usize) -> Result<Self> {
        let params = cw_params(q, n_prime, k_prime)?;
        let field = Arc::new(GaloisField::new(q.trailing_zeros())?);
        Ok(Self { rs: ReedSolomonCode::new(field, n_prime, k_prime)?, params })
    }

    pub fn from_rs(rs: ReedSolomonCode) -> Result<Self> {
        let params = cw_params(rs.field().order(), rs.length(), rs.dimension())?;
        Ok(Self { rs, params })
    }

    pub fn rs(&self) -> &ReedSolomonCode {
        &self.rs
    }

    pub fn params(&self) -> CwParams {
        self.params
    }

    pub fn q(&self) -> usize {
        self.rs.field().order()
    }

    pub fn sections(&self) -> usize {
        self.rs.length()
    }

    pub fn info_sections(&self) -> usize {
        self.rs.dimension()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.q().trailing_zeros() as usize
    }

    /// Packs b message bits into k' symbols, big-endian within each chunk.
    pub fn bits_to_symbols(&self, bits: &[u8]) -> Result<Vec<Symbol>> {
        if bits.len() != self.params.b {
            return invalid(format!("message has {} bits, expected {}", bits.len(), self.params.b));
        }
        if bits.iter().any(|&b| b > 1) {
            return invalid("message bits must be 0 or 1");
        }
        Ok(bits
            .chunks(self.bits_per_symbol())
            .map(|chunk| chunk.iter().fold(0, |acc, &b| (acc << 1) | Symbol::from(b)))
            .collect())
    }

    pub fn symbols_to_bits(&self, symbols: &[Symbol]) -> Vec<u8> {
        let m = self.bits_per_symbol();
        symbols
            .iter()
            .flat_map(|&s| (0..m).rev().map(move |i| ((s >> i) & 1) as u8))
            .collect()
    }

    pub fn encode_bits(&self, bits: &[u8]) -> Result<BinaryCodeword> {
        self.encode_symbols(&self.bits_to_symbols(bits)?)
    }

    /// Encodes k' information symbols.
    pub fn encode_symbols(&self, message: &[Symbol]) -> Result<BinaryCodeword> {
        Ok(BinaryCodeword { positions: self.rs.encode(message)? })
    }

    /// Information symbols of a codeword (systematic prefix).
    pub fn message_of<'a>(&self, cw: &'a BinaryCodeword) -> &'a [Symbol] {
        &cw.positions[..self.info_sections()]
    }
}

/// Component-wise OR of equal-length binary vectors.
pub fn superpose(vectors: &[Vec<bool>]) -> Result<Vec<bool>> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    if vectors.iter().any(|v| v.len() != first.len()) {
        return invalid("superposed vectors differ in length");
    }
    Ok((0..first.len()).map(|i| vectors.iter().any(|v| v[i])).collect())
}

/// Number of positions where both vectors hold a 1.
pub fn correlation(a: &[bool], b: &[bool]) -> Result<usize> {
    if a.len() != b.len() {
        return invalid(format!("length mismatch: {} vs {}", a.len(), b.len()));
    }
    Ok(a.iter().zip(b).filter(|(x, y)| **x && **y).count())
}

/// OR superposition in section form: the set of active symbols per section.
pub fn section_sets(codewords: &[BinaryCodeword], sections: usize) -> Vec<BTreeSet<Symbol>> {
    let mut sets = vec![BTreeSet::new(); sections];
    for cw in codewords {
        for (set, &s) in sets.iter_mut().zip(&cw.positions) {
            set.insert(s);
        }
    }
    sets
}

/// All codewords whose information symbols come from the candidate sets of
/// the first k' sections and whose every symbol lies in the matching set,
/// i.e. every codeword with full correlation against the superposition.
pub fn fully_covered(code: &ConstantWeightCode, sets: &[BTreeSet<Symbol>]) -> Vec<Vec<Symbol>> {
    let k = code.info_sections();
    let mut out = Vec::new();
    let choices: Vec<Vec<Symbol>> = sets[..k].iter().map(|s| s.iter().copied().collect()).collect();
    if choices.iter().any(Vec::is_empty) {
        return out;
    }
    let mut idx = vec![0usize; k];
    loop {
        let msg: Vec<Symbol> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
        let cw = code.rs().encode_unchecked(&msg);
        if cw.iter().zip(sets).all(|(s, set)| set.contains(s)) {
            out.push(msg);
        }
        // Odometer over the Cartesian product, last section fastest.
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[derive(Debug, Clone)]
pub enum SubsetMode {
    /// Every subset of size 1..=order; refused above `budget` subsets.
    Exhaustive { budget: u128 },
    /// `trials` random subsets, sizes uniform in 1..=order.
    Sampled { trials: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A non-member codeword is fully covered by the superposition.
    FalseDrop { members: Vec<Vec<Symbol>>, intruder: Vec<Symbol> },
    /// A member has no section where all other members differ from it.
    NotProtocolSequence { members: Vec<Vec<Symbol>>, member: Vec<Symbol> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjunctiveReport {
    pub order: usize,
    pub subsets_tested: u64,
    pub counterexample: Option<Violation>,
}

impl DisjunctiveReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn check_subset(code: &ConstantWeightCode, members: &[Vec<Symbol>]) -> Option<Violation> {
    let words: Vec<BinaryCodeword> = members
        .iter()
        .map(|m| BinaryCodeword { positions: code.rs().encode_unchecked(m) })
        .collect();
    let sets = section_sets(&words, code.sections());
    let covered = fully_covered(code, &sets);
    if let Some(intruder) = covered.into_iter().find(|c| !members.contains(c)) {
        return Some(Violation::FalseDrop { members: members.to_vec(), intruder });
    }
    for (i, w) in words.iter().enumerate() {
        let isolated = (0..code.sections()).any(|j| {
            words
                .iter()
                .enumerate()
                .all(|(o, other)| o == i || other.positions[j] != w.positions[j])
        });
        if !isolated {
            return Some(Violation::NotProtocolSequence {
                members: members.to_vec(),
                member: members[i].clone(),
            });
        }
    }
    None
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Checks the zero-false-drop and protocol-sequence properties over subsets
/// of distinct codewords of size at most `order`.
pub fn verify_disjunctive(code: &ConstantWeightCode, order: usize, mode: SubsetMode) -> Result<DisjunctiveReport> {
    if order == 0 {
        return invalid("order must be at least 1");
    }
    let m = code.params().m;
    let mut tested = 0u64;
    match mode {
        SubsetMode::Exhaustive { budget } => {
            let needed = (1..=order as u128).fold(0u128, |acc, s| acc.saturating_add(binomial(m, s.min(m))));
            if needed > budget || m > u64::MAX as u128 {
                return Err(Error::BudgetExceeded { needed, budget });
            }
            let m = m as u64;
            for size in 1..=order.min(m as usize) {
                let mut idx: Vec<u64> = (0..size as u64).collect();
                loop {
                    let members: Vec<Vec<Symbol>> = idx.iter().map(|&i| code.rs().index_to_message(i)).collect();
                    tested += 1;
                    if let Some(v) = check_subset(code, &members) {
                        return Ok(DisjunctiveReport { order, subsets_tested: tested, counterexample: Some(v) });
                    }
                    // Next combination in lexicographic order.
                    let Some(pos) = (0..size).rev().find(|&p| idx[p] < m - (size - p) as u64) else {
                        break;
                    };
                    idx[pos] += 1;
                    for p in pos + 1..size {
                        idx[p] = idx[p - 1] + 1;
                    }
                }
            }
        }
        SubsetMode::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let space = m.min(u64::MAX as u128) as u64;
            for _ in 0..trials {
                let size = rng.random_range(1..=order).min(space as usize);
                let members: Vec<Vec<Symbol>> = if space <= usize::MAX as u64 && space <= 1 << 24 {
                    sample(&mut rng, space as usize, size)
                        .into_iter()
                        .map(|i| code.rs().index_to_message(i as u64))
                        .collect()
                } else {
                    let mut set = BTreeSet::new();
                    while set.len() < size {
                        set.insert(rng.random_range(0..space));
                    }
                    set.into_iter().map(|i| code.rs().index_to_message(i)).collect()
                };
                tested += 1;
                if let Some(v) = check_subset(code, &members) {
                    return Ok(DisjunctiveReport { order, subsets_tested: tested, counterexample: Some(v) });
                }
            }
        }
    }
    Ok(DisjunctiveReport { order, subsets_tested: tested, counterexample: None })
}

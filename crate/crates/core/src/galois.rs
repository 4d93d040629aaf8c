//! Finite-field arithmetic over GF(2^m) and systematic Reed-Solomon codes.
//!
//! Fields are built from the lexicographically smallest primitive polynomial
//! of the requested degree (for m = 3 that is x^3 + x + 1). Codes are
//! evaluation codes on the points 1, a, a^2, ... (plus 0 when n' = q),
//! brought into systematic form by row reduction. An explicit generator can
//! also be supplied; such codes are decoded by exhaustive search.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};

/// A GF(2^m) element, stored in its polynomial-basis bit representation.
pub type Symbol = u16;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 16;

/// Codes with more than this many codewords are not decoded by brute force.
const EXHAUSTIVE_LIMIT: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    m: u32,
    poly: u32,
    // exp is doubled so that exp[log a + log b] never needs a modulo.
    exp: Vec<Symbol>,
    log: Vec<u32>,
}

impl GaloisField {
    /// Field of order 2^m with the smallest primitive polynomial of degree m.
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > MAX_DEGREE {
            return invalid(format!("extension degree {m} outside 1..={MAX_DEGREE}"));
        }
        let lo = 1u32 << m;
        (lo..lo << 1)
            .filter(|p| p & 1 == 1)
            .find_map(|p| Self::with_polynomial(m, p).ok())
            .ok_or_else(|| Error::InvalidInput(format!("no primitive polynomial of degree {m}")))
    }

    /// Field of order 2^m from an explicit polynomial bit-mask (bit i is the
    /// coefficient of x^i). Fails unless the polynomial is primitive.
    pub fn with_polynomial(m: u32, poly: u32) -> Result<Self> {
        if m == 0 || m > MAX_DEGREE {
            return invalid(format!("extension degree {m} outside 1..={MAX_DEGREE}"));
        }
        if poly >> m != 1 {
            return invalid(format!("polynomial {poly:#b} does not have degree {m}"));
        }
        let q = 1usize << m;
        let mut exp = vec![0 as Symbol; 2 * (q - 1)];
        let mut log = vec![0u32; q];
        let mut x: u32 = 1;
        for i in 0..q - 1 {
            if i > 0 && x == 1 {
                return invalid(format!("polynomial {poly:#b} is not primitive"));
            }
            exp[i] = x as Symbol;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return invalid(format!("polynomial {poly:#b} is not primitive"));
        }
        for i in q - 1..2 * (q - 1) {
            exp[i] = exp[i - (q - 1)];
        }
        Ok(Self { m, poly, exp, log })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> usize {
        1 << self.m
    }

    pub fn primitive_polynomial(&self) -> u32 {
        self.poly
    }

    pub fn contains(&self, a: Symbol) -> bool {
        (a as usize) < self.order()
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Symbol) -> Option<Symbol> {
        if a == 0 {
            return None;
        }
        let n = self.order() as u32 - 1;
        Some(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    /// `a / b`; panics on division by zero.
    pub fn div(&self, a: Symbol, b: Symbol) -> Symbol {
        let inv = self.inv(b).expect("division by zero in GF(2^m)");
        self.mul(a, inv)
    }

    /// `alpha^i` for the primitive element alpha.
    pub fn alpha_pow(&self, i: usize) -> Symbol {
        self.exp[i % (self.order() - 1)]
    }

    pub fn pow(&self, a: Symbol, e: u64) -> Symbol {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.order() - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % n)) % n) as usize]
    }
}

/// Polynomials over GF(2^m), coefficients stored lowest degree first and
/// trimmed so that the last coefficient is nonzero (zero polynomial = empty).
mod poly {
    use super::{GaloisField, Symbol};

    pub fn trim(mut p: Vec<Symbol>) -> Vec<Symbol> {
        while p.last() == Some(&0) {
            p.pop();
        }
        p
    }

    /// Degree, with the zero polynomial mapped to `None`.
    pub fn degree(p: &[Symbol]) -> Option<usize> {
        p.len().checked_sub(1)
    }

    pub fn add(a: &[Symbol], b: &[Symbol]) -> Vec<Symbol> {
        let mut out = vec![0; a.len().max(b.len())];
        for (i, &c) in a.iter().enumerate() {
            out[i] ^= c;
        }
        for (i, &c) in b.iter().enumerate() {
            out[i] ^= c;
        }
        trim(out)
    }

    pub fn mul(f: &GaloisField, a: &[Symbol], b: &[Symbol]) -> Vec<Symbol> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] ^= f.mul(x, y);
            }
        }
        trim(out)
    }

    /// Quotient and remainder. `b` must be nonzero.
    pub fn divmod(f: &GaloisField, a: &[Symbol], b: &[Symbol]) -> (Vec<Symbol>, Vec<Symbol>) {
        let db = degree(b).expect("polynomial division by zero");
        let lead_inv = f.inv(b[db]).expect("trimmed polynomial has nonzero lead");
        let mut rem = a.to_vec();
        if rem.len() <= db {
            return (Vec::new(), trim(rem));
        }
        let mut quot = vec![0; rem.len() - db];
        for i in (0..quot.len()).rev() {
            let c = rem[i + db];
            if c == 0 {
                continue;
            }
            let factor = f.mul(c, lead_inv);
            quot[i] = factor;
            for (j, &bj) in b.iter().enumerate() {
                rem[i + j] ^= f.mul(factor, bj);
            }
        }
        rem.truncate(db);
        (trim(quot), trim(rem))
    }

    pub fn eval(f: &GaloisField, p: &[Symbol], x: Symbol) -> Symbol {
        p.iter().rev().fold(0, |acc, &c| f.mul(acc, x) ^ c)
    }

    /// Product of (x - p) over all points.
    pub fn from_roots(f: &GaloisField, roots: &[Symbol]) -> Vec<Symbol> {
        roots
            .iter()
            .fold(vec![1], |acc, &r| mul(f, &acc, &[r, 1]))
    }

    /// Lagrange interpolation through `(points[i], values[i])`.
    pub fn interpolate(f: &GaloisField, points: &[Symbol], values: &[Symbol]) -> Vec<Symbol> {
        let full = from_roots(f, points);
        let mut out = vec![0; points.len()];
        for (i, (&xi, &yi)) in points.iter().zip(values).enumerate() {
            if yi == 0 {
                continue;
            }
            let (basis, _) = divmod(f, &full, &[xi, 1]);
            let denom = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(1, |acc, (_, &xj)| f.mul(acc, xi ^ xj));
            let scale = f.div(yi, denom);
            for (k, &c) in basis.iter().enumerate() {
                out[k] ^= f.mul(scale, c);
            }
        }
        trim(out)
    }
}

/// Systematic Reed-Solomon code RS(n', k') over GF(2^m).
#[derive(Debug, Clone)]
pub struct ReedSolomonCode {
    field: Arc<GaloisField>,
    n: usize,
    k: usize,
    generator: Vec<Vec<Symbol>>,
    // Evaluation points when the code was built algebraically.
    points: Option<Vec<Symbol>>,
}

/// Result of one soft-input soft-output pass.
#[derive(Debug, Clone, PartialEq)]
pub struct SisoOutput {
    pub beliefs: Vec<Vec<f64>>,
    /// Codeword the beliefs were pulled toward, if decoding succeeded.
    pub codeword: Option<Vec<Symbol>>,
}

impl ReedSolomonCode {
    /// Evaluation code with `1 <= k <= n <= q`, row-reduced to systematic form.
    pub fn new(field: Arc<GaloisField>, n: usize, k: usize) -> Result<Self> {
        let q = field.order();
        if k == 0 || k > n || n > q {
            return invalid(format!("RS({n},{k}) invalid over GF({q})"));
        }
        let mut points: Vec<Symbol> = (0..n.min(q - 1)).map(|i| field.alpha_pow(i)).collect();
        if n == q {
            points.push(0);
        }
        // Vandermonde rows x_j^i, then Gauss-Jordan on the leading k columns.
        let mut g: Vec<Vec<Symbol>> = (0..k)
            .map(|i| points.iter().map(|&x| field.pow(x, i as u64)).collect())
            .collect();
        for col in 0..k {
            let pivot = (col..k)
                .find(|&r| g[r][col] != 0)
                .expect("Vandermonde minor on distinct points is invertible");
            g.swap(col, pivot);
            let inv = field.inv(g[col][col]).expect("nonzero pivot");
            for v in g[col].iter_mut() {
                *v = field.mul(*v, inv);
            }
            for r in 0..k {
                if r != col && g[r][col] != 0 {
                    let factor = g[r][col];
                    for c in 0..n {
                        let sub = field.mul(factor, g[col][c]);
                        g[r][c] ^= sub;
                    }
                }
            }
        }
        Ok(Self { field, n, k, generator: g, points: Some(points) })
    }

    /// Code from an explicit systematic generator matrix (k rows of n
    /// symbols). The matrix must start with the identity and be MDS; the MDS
    /// property is checked by enumerating all codewords, so q^k is bounded.
    pub fn from_generator(field: Arc<GaloisField>, generator: Vec<Vec<Symbol>>) -> Result<Self> {
        let k = generator.len();
        let n = generator.first().map_or(0, Vec::len);
        if k == 0 || k > n || generator.iter().any(|r| r.len() != n) {
            return invalid("generator must be a non-empty k x n matrix with k <= n");
        }
        if generator.iter().flatten().any(|&s| !field.contains(s)) {
            return invalid("generator entry outside the field");
        }
        for (i, row) in generator.iter().enumerate() {
            for (j, &v) in row[..k].iter().enumerate() {
                if v != u16::from(i == j) {
                    return invalid("generator is not in systematic form");
                }
            }
        }
        let code = Self { field, n, k, generator, points: None };
        let size = code.size();
        if size > EXHAUSTIVE_LIMIT {
            return Err(Error::Unsupported(format!(
                "explicit generator with {size} codewords is too large to validate"
            )));
        }
        let min_weight = (1..size as u64)
            .map(|idx| {
                let msg = code.index_to_message(idx);
                code.encode_unchecked(&msg).iter().filter(|&&s| s != 0).count()
            })
            .min()
            .unwrap_or(n);
        if min_weight != code.min_distance() {
            return invalid(format!(
                "generator has minimum distance {min_weight}, expected {}",
                code.min_distance()
            ));
        }
        Ok(code)
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    /// d' = n' - k' + 1.
    pub fn min_distance(&self) -> usize {
        self.n - self.k + 1
    }

    pub fn generator(&self) -> &[Vec<Symbol>] {
        &self.generator
    }

    /// Number of codewords q^k', saturating at `u128::MAX`.
    pub fn size(&self) -> u128 {
        (self.field.order() as u128)
            .checked_pow(self.k as u32)
            .unwrap_or(u128::MAX)
    }

    /// Message with the given lexicographic index (symbol 0 most significant).
    pub fn index_to_message(&self, mut idx: u64) -> Vec<Symbol> {
        let q = self.field.order() as u64;
        let mut msg = vec![0; self.k];
        for s in msg.iter_mut().rev() {
            *s = (idx % q) as Symbol;
            idx /= q;
        }
        msg
    }

    pub fn encode(&self, message: &[Symbol]) -> Result<Vec<Symbol>> {
        if message.len() != self.k {
            return invalid(format!("message has {} symbols, expected {}", message.len(), self.k));
        }
        if let Some(&s) = message.iter().find(|&&s| !self.field.contains(s)) {
            return invalid(format!("symbol {s} outside GF({})", self.field.order()));
        }
        Ok(self.encode_unchecked(message))
    }

    pub(crate) fn encode_unchecked(&self, message: &[Symbol]) -> Vec<Symbol> {
        let mut out = message.to_vec();
        out.extend((self.k..self.n).map(|j| {
            message
                .iter()
                .zip(&self.generator)
                .fold(0, |acc, (&m, row)| acc ^ self.field.mul(m, row[j]))
        }));
        out
    }

    /// Errors-and-erasures decoding. Returns the message when the received
    /// word lies within `2e + f < d'` of a codeword, `None` otherwise.
    pub fn decode(&self, received: &[Symbol], erasures: &[usize]) -> Result<Option<Vec<Symbol>>> {
        if received.len() != self.n {
            return invalid(format!("received word has {} symbols, expected {}", received.len(), self.n));
        }
        if let Some(&s) = received.iter().find(|&&s| !self.field.contains(s)) {
            return invalid(format!("symbol {s} outside GF({})", self.field.order()));
        }
        let mut erased = vec![false; self.n];
        for &e in erasures {
            if e >= self.n {
                return invalid(format!("erasure position {e} out of range"));
            }
            erased[e] = true;
        }
        let f = erased.iter().filter(|&&e| e).count();
        if f >= self.min_distance() {
            return Ok(None);
        }
        let candidate = match &self.points {
            Some(points) => self.decode_evaluation(points, received, &erased),
            None => self.decode_exhaustive(received, &erased)?,
        };
        Ok(candidate.filter(|msg| {
            let cw = self.encode_unchecked(msg);
            let e = (0..self.n).filter(|&j| !erased[j] && cw[j] != received[j]).count();
            2 * e + f < self.min_distance()
        }))
    }

    // Gao's algorithm on the unerased coordinates.
    fn decode_evaluation(&self, points: &[Symbol], received: &[Symbol], erased: &[bool]) -> Option<Vec<Symbol>> {
        let fld = &*self.field;
        let (xs, ys): (Vec<Symbol>, Vec<Symbol>) = (0..self.n)
            .filter(|&j| !erased[j])
            .map(|j| (points[j], received[j]))
            .unzip();
        let n_eff = xs.len();
        if n_eff < self.k {
            return None;
        }
        let mut r0 = poly::from_roots(fld, &xs);
        let mut r1 = poly::interpolate(fld, &xs, &ys);
        let mut v0: Vec<Symbol> = Vec::new();
        let mut v1: Vec<Symbol> = vec![1];
        let stop = |p: &[Symbol]| poly::degree(p).is_none_or(|d| 2 * d < n_eff + self.k);
        while !stop(&r1) {
            let (quot, rem) = poly::divmod(fld, &r0, &r1);
            let v2 = poly::add(&v0, &poly::mul(fld, &quot, &v1));
            r0 = std::mem::replace(&mut r1, rem);
            v0 = std::mem::replace(&mut v1, v2);
        }
        if v1.is_empty() {
            return None;
        }
        let (msg_poly, rem) = poly::divmod(fld, &r1, &v1);
        if !rem.is_empty() || msg_poly.len() > self.k {
            return None;
        }
        Some(points[..self.k].iter().map(|&x| poly::eval(fld, &msg_poly, x)).collect())
    }

    fn decode_exhaustive(&self, received: &[Symbol], erased: &[bool]) -> Result<Option<Vec<Symbol>>> {
        let size = self.size();
        if size > EXHAUSTIVE_LIMIT {
            return Err(Error::Unsupported(format!(
                "exhaustive decoding of {size} codewords"
            )));
        }
        let best = (0..size as u64)
            .map(|idx| {
                let msg = self.index_to_message(idx);
                let cw = self.encode_unchecked(&msg);
                let dist = (0..self.n).filter(|&j| !erased[j] && cw[j] != received[j]).count();
                (dist, msg)
            })
            .min_by_key(|(d, _)| *d);
        Ok(best.map(|(_, msg)| msg))
    }

    /// One soft-input soft-output pass over per-position symbol beliefs.
    ///
    /// Hard decisions are decoded with 0, 2, 4, ... of the least reliable
    /// positions erased until decoding succeeds or the erasure count reaches
    /// d'. On success each row is mixed toward the codeword's one-hot row
    /// with weight `gamma`; on failure the beliefs pass through unchanged.
    pub fn siso_update(&self, beliefs: &[Vec<f64>], gamma: f64) -> Result<SisoOutput> {
        let q = self.field.order();
        if beliefs.len() != self.n {
            return invalid(format!("belief matrix has {} rows, expected {}", beliefs.len(), self.n));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return invalid(format!("sharpening weight {gamma} outside (0, 1]"));
        }
        for (j, row) in beliefs.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if row.len() != q || row.iter().any(|p| !(*p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                return invalid(format!("belief row {j} is not a distribution over {q} symbols"));
            }
        }
        let (hard, reliability): (Vec<Symbol>, Vec<f64>) = beliefs
            .iter()
            .map(|row| {
                let (idx, p) = row
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (i, &p)| if p > best.1 { (i, p) } else { best });
                (idx as Symbol, p)
            })
            .unzip();
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| reliability[a].total_cmp(&reliability[b]).then(a.cmp(&b)));

        let mut erasures = 0;
        while erasures < self.min_distance() {
            if let Some(msg) = self.decode(&hard, &order[..erasures])? {
                let codeword = self.encode_unchecked(&msg);
                let out = beliefs
                    .iter()
                    .zip(&codeword)
                    .map(|(row, &c)| {
                        row.iter()
                            .enumerate()
                            .map(|(s, &p)| (1.0 - gamma) * p + if s == c as usize { gamma } else { 0.0 })
                            .collect()
                    })
                    .collect();
                return Ok(SisoOutput { beliefs: out, codeword: Some(codeword) });
            }
            erasures += 2;
        }
        Ok(SisoOutput { beliefs: beliefs.to_vec(), codeword: None })
    }
}

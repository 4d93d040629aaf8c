//! Gabor-frame dictionaries seeded by the Alltop sequence.
//!
//! The full frame is the N x N^2 matrix `[diag(g_0) F, ..., diag(g_{N-1}) F]`
//! where `g_t` is the seed circularly shifted by `t` and `F` carries the
//! unit-modulus modulations `exp(+j 2 pi n f / N)`. Column `c = t N + f` is
//! therefore `g[(n - t) mod N] exp(j 2 pi n f / N)`, unit norm for a unit-norm
//! seed, and each block `t` is an orthonormal basis. Products with the frame
//! run one length-N FFT per touched block and antenna.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};
use crate::C64;

/// A linear map from M coefficient rows to N samples, applied column-wise
/// to M x T coefficient matrices.
pub trait Dictionary: Send + Sync + fmt::Debug {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// `A x` for an M x T matrix `x`.
    fn apply(&self, x: ArrayView2<C64>) -> Result<Array2<C64>>;
    /// `A^H y` for an N x T matrix `y`.
    fn adjoint(&self, y: ArrayView2<C64>) -> Result<Array2<C64>>;
    fn column(&self, i: usize) -> Array1<C64>;

    fn to_dense(&self) -> Array2<C64> {
        let mut out = Array2::zeros((self.rows(), self.cols()));
        for i in 0..self.cols() {
            out.column_mut(i).assign(&self.column(i));
        }
        out
    }
}

fn check_shape(what: &str, got: (usize, usize), rows: usize) -> Result<()> {
    if got.0 != rows || got.1 == 0 {
        return invalid(format!("{what} has shape {got:?}, expected {rows} x T with T >= 1"));
    }
    Ok(())
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// `g_k = exp(j 2 pi k^3 / N) / sqrt(N)` for prime `N >= 5`.
pub fn alltop_seed(n: usize) -> Result<Vec<C64>> {
    if n < 5 || !is_prime(n) {
        return invalid(format!("Alltop seed needs a prime length >= 5, got {n}"));
    }
    let scale = 1.0 / (n as f64).sqrt();
    Ok((0..n as u128)
        .map(|k| {
            let phase = 2.0 * PI * ((k * k * k) % n as u128) as f64 / n as f64;
            C64::from_polar(scale, phase)
        })
        .collect())
}

/// Which columns of the full N x N^2 frame are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Columns `0..M`.
    Contiguous,
    /// Columns `0, P, 2P, ...`.
    Strided(usize),
}

impl Selection {
    fn stride(self) -> usize {
        match self {
            Selection::Contiguous => 1,
            Selection::Strided(p) => p,
        }
    }
}

#[derive(Debug, Clone)]
struct Block {
    shift: usize,
    // (frequency bin, selected column index)
    entries: Vec<(usize, usize)>,
}

#[derive(Clone)]
pub struct GaborDictionary {
    n: usize,
    seed: Vec<C64>,
    selection: Selection,
    m_total: usize,
    blocks: Vec<Block>,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for GaborDictionary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaborDictionary")
            .field("n", &self.n)
            .field("m_total", &self.m_total)
            .field("selection", &self.selection)
            .finish()
    }
}

impl GaborDictionary {
    /// Keeps columns `stride * i` for `i < m_total` of the Alltop Gabor frame.
    pub fn new(n: usize, m_total: usize, stride: usize) -> Result<Self> {
        let seed = alltop_seed(n)?;
        if stride == 0 {
            return invalid("stride must be positive");
        }
        if m_total == 0 || stride.saturating_mul(m_total) > n * n {
            return invalid(format!("cannot select {m_total} columns with stride {stride} from {} frame columns", n * n));
        }
        let selection = if stride == 1 { Selection::Contiguous } else { Selection::Strided(stride) };
        let mut by_shift: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for i in 0..m_total {
            let c = stride * i;
            by_shift.entry(c / n).or_default().push((c % n, i));
        }
        let blocks = by_shift.into_iter().map(|(shift, entries)| Block { shift, entries }).collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            fft_forward: planner.plan_fft_forward(n),
            fft_inverse: planner.plan_fft_inverse(n),
            seed,
            selection,
            m_total,
            blocks,
        })
    }

    pub fn seed(&self) -> &[C64] {
        &self.seed
    }

    pub fn selection(&self) -> Selection {
        self.selection
    }

    /// Index of selected column `i` in the full frame.
    pub fn frame_index(&self, i: usize) -> usize {
        self.selection.stride() * i
    }

    /// (time shift t, frequency bin f) of selected column `i`.
    pub fn shift_and_bin(&self, i: usize) -> (usize, usize) {
        let c = self.frame_index(i);
        (c / self.n, c % self.n)
    }

    #[inline]
    fn shifted_seed(&self, t: usize, n: usize) -> C64 {
        self.seed[(n + self.n - t) % self.n]
    }

    /// Exact coherence from the block structure: for each pair of time
    /// shifts the inner products of all frequency offsets are one FFT.
    pub fn coherence(&self) -> CoherenceReport {
        let n = self.n;
        let mut hist = Histogram::default();
        let mut buf = vec![C64::new(0.0, 0.0); n];
        let mut counts = vec![0u64; n];
        for (a, b1) in self.blocks.iter().enumerate() {
            for b2 in &self.blocks[a..] {
                for (i, v) in buf.iter_mut().enumerate() {
                    *v = self.shifted_seed(b1.shift, i).conj() * self.shifted_seed(b2.shift, i);
                }
                self.fft_inverse.process(&mut buf);
                counts.iter_mut().for_each(|c| *c = 0);
                let same = b1.shift == b2.shift;
                for &(f1, i1) in &b1.entries {
                    for &(f2, i2) in &b2.entries {
                        if !same || i2 > i1 {
                            counts[(f2 + n - f1) % n] += 1;
                        }
                    }
                }
                for (delta, &cnt) in counts.iter().enumerate() {
                    if cnt > 0 {
                        hist.add(buf[delta].norm(), cnt);
                    }
                }
            }
        }
        hist.finish()
    }
}

impl Dictionary for GaborDictionary {
    fn rows(&self) -> usize {
        self.n
    }

    fn cols(&self) -> usize {
        self.m_total
    }

    fn apply(&self, x: ArrayView2<C64>) -> Result<Array2<C64>> {
        check_shape("coefficient matrix", x.dim(), self.m_total)?;
        let (n, t_count) = (self.n, x.ncols());
        let mut y = Array2::zeros((n, t_count));
        let mut buf = vec![C64::new(0.0, 0.0); n];
        let mut scratch = vec![C64::new(0.0, 0.0); self.fft_inverse.get_inplace_scratch_len()];
        for block in &self.blocks {
            for a in 0..t_count {
                buf.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                let mut any = false;
                for &(f, i) in &block.entries {
                    let v = x[[i, a]];
                    if v.re != 0.0 || v.im != 0.0 {
                        buf[f] = v;
                        any = true;
                    }
                }
                if !any {
                    continue;
                }
                self.fft_inverse.process_with_scratch(&mut buf, &mut scratch);
                for (s, v) in buf.iter().enumerate() {
                    y[[s, a]] += self.shifted_seed(block.shift, s) * v;
                }
            }
        }
        Ok(y)
    }

    fn adjoint(&self, y: ArrayView2<C64>) -> Result<Array2<C64>> {
        check_shape("observation matrix", y.dim(), self.n)?;
        let (n, t_count) = (self.n, y.ncols());
        let mut out = Array2::zeros((self.m_total, t_count));
        let mut buf = vec![C64::new(0.0, 0.0); n];
        let mut scratch = vec![C64::new(0.0, 0.0); self.fft_forward.get_inplace_scratch_len()];
        for block in &self.blocks {
            for a in 0..t_count {
                for (s, v) in buf.iter_mut().enumerate() {
                    *v = self.shifted_seed(block.shift, s).conj() * y[[s, a]];
                }
                self.fft_forward.process_with_scratch(&mut buf, &mut scratch);
                for &(f, i) in &block.entries {
                    out[[i, a]] = buf[f];
                }
            }
        }
        Ok(out)
    }

    fn column(&self, i: usize) -> Array1<C64> {
        let (t, f) = self.shift_and_bin(i);
        let n = self.n;
        Array1::from_iter((0..n).map(|s| {
            let phase = 2.0 * PI * ((s * f) % n) as f64 / n as f64;
            self.shifted_seed(t, s) * C64::from_polar(1.0, phase)
        }))
    }
}

/// I.i.d. circularly-symmetric Gaussian codebook with unit-norm columns.
#[derive(Debug, Clone)]
pub struct GaussianDictionary {
    n: usize,
    m: usize,
    // column-major: column i occupies data[i*n .. (i+1)*n]
    data: Vec<C64>,
}

impl GaussianDictionary {
    pub fn new(n: usize, m: usize, seed: u64) -> Result<Self> {
        if n == 0 || m == 0 {
            return invalid("Gaussian codebook needs positive dimensions");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data: Vec<C64> = (0..n * m)
            .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        for col in data.chunks_mut(n) {
            let norm = col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            col.iter_mut().for_each(|v| *v /= norm);
        }
        Ok(Self { n, m, data })
    }
}

impl Dictionary for GaussianDictionary {
    fn rows(&self) -> usize {
        self.n
    }

    fn cols(&self) -> usize {
        self.m
    }

    fn apply(&self, x: ArrayView2<C64>) -> Result<Array2<C64>> {
        check_shape("coefficient matrix", x.dim(), self.m)?;
        let mut y = Array2::zeros((self.n, x.ncols()));
        for a in 0..x.ncols() {
            let mut acc = vec![C64::new(0.0, 0.0); self.n];
            for (i, col) in self.data.chunks(self.n).enumerate() {
                let v = x[[i, a]];
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                for (o, c) in acc.iter_mut().zip(col) {
                    *o += c * v;
                }
            }
            for (s, v) in acc.into_iter().enumerate() {
                y[[s, a]] = v;
            }
        }
        Ok(y)
    }

    fn adjoint(&self, y: ArrayView2<C64>) -> Result<Array2<C64>> {
        check_shape("observation matrix", y.dim(), self.n)?;
        let mut out = Array2::zeros((self.m, y.ncols()));
        for a in 0..y.ncols() {
            let ycol: Vec<C64> = y.column(a).to_vec();
            for (i, col) in self.data.chunks(self.n).enumerate() {
                out[[i, a]] = col.iter().zip(&ycol).map(|(c, v)| c.conj() * v).sum();
            }
        }
        Ok(out)
    }

    fn column(&self, i: usize) -> Array1<C64> {
        Array1::from(self.data[i * self.n..(i + 1) * self.n].to_vec())
    }
}

/// Off-diagonal Gram magnitudes: maximum and distinct values (clustered at
/// 1e-9) with the number of column pairs at each.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    pub max_offdiag: f64,
    pub values: Vec<(f64, u64)>,
}

#[derive(Default)]
struct Histogram {
    raw: Vec<(f64, u64)>,
}

impl Histogram {
    fn add(&mut self, v: f64, count: u64) {
        self.raw.push((v, count));
    }

    fn finish(mut self) -> CoherenceReport {
        self.raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values: Vec<(f64, u64)> = Vec::new();
        for (v, c) in self.raw {
            match values.last_mut() {
                Some(last) if v - last.0 <= 1e-9 => last.1 += c,
                _ => values.push((v, c)),
            }
        }
        let max_offdiag = values.last().map_or(0.0, |v| v.0);
        CoherenceReport { max_offdiag, values }
    }
}

/// Column limit for the dense Gram route.
pub const DENSE_GRAM_MAX_ROWS: usize = 1009;

/// Coherence by explicit pairwise inner products. Intended for moderate
/// sizes; refuses dictionaries with more than [`DENSE_GRAM_MAX_ROWS`] rows.
pub fn coherence_dense(dict: &dyn Dictionary) -> Result<CoherenceReport> {
    if dict.rows() > DENSE_GRAM_MAX_ROWS {
        return invalid(format!("dense Gram capped at N <= {DENSE_GRAM_MAX_ROWS}"));
    }
    let cols: Vec<Vec<C64>> = (0..dict.cols()).map(|i| dict.column(i).to_vec()).collect();
    let mut hist = Histogram::default();
    for (i, a) in cols.iter().enumerate() {
        for b in &cols[i + 1..] {
            let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            hist.add(ip.norm(), 1);
        }
    }
    Ok(hist.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Array2<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((rows, cols), |_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    fn dense_mul(a: &Array2<C64>, x: &Array2<C64>) -> Array2<C64> {
        let mut out = Array2::zeros((a.nrows(), x.ncols()));
        for r in 0..a.nrows() {
            for c in 0..x.ncols() {
                out[[r, c]] = (0..a.ncols()).map(|k| a[[r, k]] * x[[k, c]]).sum();
            }
        }
        out
    }

    fn rel_err(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn seed_n5_phases() {
        let g = alltop_seed(5).unwrap();
        let expected = [0, 1, 3, 2, 4];
        for (k, v) in g.iter().enumerate() {
            assert!((v.norm() - 1.0 / 5f64.sqrt()).abs() < 1e-15);
            let want = C64::from_polar(1.0 / 5f64.sqrt(), 2.0 * PI * expected[k] as f64 / 5.0);
            assert!((v - want).norm() < 1e-15);
        }
    }

    #[test]
    fn seed_validation_and_norm() {
        assert!(alltop_seed(4).is_err());
        assert!(alltop_seed(3).is_err());
        assert!(alltop_seed(9).is_err());
        let g = alltop_seed(149).unwrap();
        assert!((g[0] - C64::new(1.0 / 149f64.sqrt(), 0.0)).norm() < 1e-15);
        let norm: f64 = g.iter().map(|v| v.norm_sqr()).sum();
        assert!((norm.sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn build_rejects_oversized_selection() {
        assert!(GaborDictionary::new(7, 50, 1).is_err());
        assert!(GaborDictionary::new(7, 17, 3).is_err());
        assert!(GaborDictionary::new(7, 16, 3).is_ok());
        assert!(GaborDictionary::new(7, 5, 0).is_err());
    }

    #[test]
    fn full_frame_is_tight() {
        let d = GaborDictionary::new(7, 49, 1).unwrap();
        let a = d.to_dense();
        for r in 0..7 {
            for c in 0..7 {
                let v: C64 = (0..49).map(|k| a[[r, k]] * a[[c, k]].conj()).sum();
                let want = if r == c { 7.0 } else { 0.0 };
                assert!((v - C64::new(want, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn columns_unit_norm_and_blocks_orthonormal() {
        let d = GaborDictionary::new(11, 121, 1).unwrap();
        let a = d.to_dense();
        for i in 0..121 {
            let norm: f64 = a.column(i).iter().map(|v| v.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        for t in 0..11 {
            for f1 in 0..11 {
                for f2 in f1 + 1..11 {
                    let ip: C64 = (0..11).map(|s| a[[s, t * 11 + f1]].conj() * a[[s, t * 11 + f2]]).sum();
                    assert!(ip.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn stride_selection_indices() {
        let d = GaborDictionary::new(149, 7000, 3).unwrap();
        for i in [0, 1, 2, 500, 6999] {
            assert_eq!(d.frame_index(i), 3 * i);
        }
        // Same time shift implies at least 3 bins apart.
        for i in 0..6999 {
            let (t1, f1) = d.shift_and_bin(i);
            let (t2, f2) = d.shift_and_bin(i + 1);
            if t1 == t2 {
                assert!(f2 - f1 >= 3);
            }
        }
    }

    #[test]
    fn apply_one_hot_returns_column() {
        let d = GaborDictionary::new(13, 100, 1).unwrap();
        for i in [0, 13, 57, 99] {
            let mut x = Array2::zeros((100, 1));
            x[[i, 0]] = C64::new(1.0, 0.0);
            let y = d.apply(x.view()).unwrap();
            let col = d.column(i);
            for s in 0..13 {
                assert!((y[[s, 0]] - col[s]).norm() < 1e-12);
            }
            let back = d.adjoint(y.view()).unwrap();
            assert!((back[[i, 0]] - C64::new(1.0, 0.0)).norm() < 1e-12);
            for k in 0..100 {
                if k != i {
                    assert!(back[[k, 0]].norm() <= 1.0 / 13f64.sqrt() + 1e-9);
                }
            }
        }
    }

    #[test]
    fn fast_apply_matches_dense() {
        for (m, stride) in [(961, 1), (500, 1), (300, 3)] {
            let d = GaborDictionary::new(31, m, stride).unwrap();
            let a = d.to_dense();
            let x = random_matrix(m, 3, 1);
            assert!(rel_err(&d.apply(x.view()).unwrap(), &dense_mul(&a, &x)) < 1e-10);
            let y = random_matrix(31, 3, 2);
            let ah = a.t().mapv(|v| v.conj());
            assert!(rel_err(&d.adjoint(y.view()).unwrap(), &dense_mul(&ah, &y)) < 1e-10);
        }
    }

    #[test]
    fn shape_mismatch_is_error() {
        let d = GaborDictionary::new(7, 20, 1).unwrap();
        assert!(d.apply(Array2::zeros((19, 1)).view()).is_err());
        assert!(d.adjoint(Array2::zeros((8, 1)).view()).is_err());
    }

    #[test]
    fn coherence_structured_matches_dense() {
        for (n, m, stride) in [(7, 49, 1), (11, 60, 1), (13, 50, 3)] {
            let d = GaborDictionary::new(n, m, stride).unwrap();
            let fast = d.coherence();
            let dense = coherence_dense(&d).unwrap();
            assert!((fast.max_offdiag - dense.max_offdiag).abs() < 1e-12);
            assert_eq!(fast.values.len(), dense.values.len());
            for (a, b) in fast.values.iter().zip(&dense.values) {
                assert!((a.0 - b.0).abs() < 1e-9);
                assert_eq!(a.1, b.1);
            }
        }
    }

    #[test]
    fn coherence_values_are_zero_or_inverse_sqrt_n() {
        let d = GaborDictionary::new(7, 49, 1).unwrap();
        let r = d.coherence();
        assert!((r.max_offdiag - 1.0 / 7f64.sqrt()).abs() < 1e-9);
        for (v, _) in &r.values {
            assert!(v.abs() < 1e-9 || (v - 1.0 / 7f64.sqrt()).abs() < 1e-9);
        }
        let total: u64 = r.values.iter().map(|v| v.1).sum();
        assert_eq!(total, 49 * 48 / 2);
    }

    #[test]
    fn coherence_single_column() {
        let d = GaborDictionary::new(7, 1, 1).unwrap();
        let r = d.coherence();
        assert_eq!(r.max_offdiag, 0.0);
        assert!(r.values.is_empty());
    }

    #[test]
    fn gaussian_columns_unit_norm_and_apply() {
        let g = GaussianDictionary::new(17, 40, 5).unwrap();
        let a = g.to_dense();
        for i in 0..40 {
            let norm: f64 = a.column(i).iter().map(|v| v.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        let x = random_matrix(40, 2, 3);
        assert!(rel_err(&g.apply(x.view()).unwrap(), &dense_mul(&a, &x)) < 1e-12);
        let y = random_matrix(17, 2, 4);
        let ah = a.t().mapv(|v| v.conj());
        assert!(rel_err(&g.adjoint(y.view()).unwrap(), &dense_mul(&ah, &y)) < 1e-12);
    }
}

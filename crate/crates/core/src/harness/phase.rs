//! Noiseless sparse-recovery phase transitions over (delta = N/M, rho = k/N).

use std::sync::Arc;

use ndarray::Array2;
use rand::seq::index;
use rayon::prelude::*;

use super::config::Codebook;
use crate::amp::{amp_run, AmpConfig, Fading, Prior};
use crate::channel::{complex_normal, trial_rng};
use crate::error::{invalid, Error, Result};
use crate::gabor::{Dictionary, GaborDictionary, GaussianDictionary};
use crate::C64;

/// Relative reconstruction error counted as success.
pub const SUCCESS_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    pub n: usize,
    /// Cells `delta_i = i / delta_steps`, `i = 1..=delta_steps`.
    pub delta_steps: usize,
    /// Cells `rho_j = j / rho_steps`, `j = 1..=rho_steps`.
    pub rho_steps: usize,
    pub trials: usize,
    pub seed: u64,
    /// Gabor column stride; 1 keeps the contiguous truncation.
    pub stride: usize,
    pub amp: AmpConfig,
}

impl PhaseConfig {
    pub fn new(n: usize, delta_steps: usize, rho_steps: usize, trials: usize, seed: u64) -> Self {
        Self {
            n,
            delta_steps,
            rho_steps,
            trials,
            seed,
            stride: 1,
            amp: AmpConfig { max_iterations: 200, tolerance: 1e-9, ..AmpConfig::default() },
        }
    }

    /// Column count of row `i` of the grid.
    pub fn columns(&self, i: usize) -> usize {
        (self.n as f64 * self.delta_steps as f64 / i as f64).round() as usize
    }

    /// Sparsity of column `j` of the grid.
    pub fn sparsity(&self, j: usize) -> usize {
        (self.n as f64 * j as f64 / self.rho_steps as f64).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCell {
    pub delta: f64,
    pub rho: f64,
    pub m: usize,
    pub k: usize,
    pub successes: usize,
    pub trials: usize,
}

impl PhaseCell {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Runs one noiseless recovery: true if the relative error meets
/// [`SUCCESS_TOLERANCE`]. Divergence counts as failure.
pub fn recover_once(dict: &dyn Dictionary, k: usize, seed: u64, stream: u64, amp: &AmpConfig) -> Result<bool> {
    if k == 0 {
        return Ok(true);
    }
    let m = dict.cols();
    let mut rng = trial_rng(seed, stream);
    let mut x = Array2::<C64>::zeros((m, 1));
    for i in index::sample(&mut rng, m, k) {
        x[[i, 0]] = complex_normal(&mut rng, 1.0);
    }
    let y = dict.apply(x.view())?;
    let cfg = AmpConfig { prior: Prior::Uniform(k as f64 / m as f64), fading: Fading::unit_rayleigh(), ..amp.clone() };
    let out = match amp_run(dict, y.view(), &cfg) {
        Ok(out) => out,
        Err(Error::Divergence { .. }) => return Ok(false),
        Err(e) => return Err(e),
    };
    let err: f64 = out.x_hat.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let norm: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    Ok(err <= SUCCESS_TOLERANCE * norm)
}

fn build(codebook: Codebook, n: usize, m: usize, stride: usize, seed: u64) -> Result<Arc<dyn Dictionary>> {
    Ok(match codebook {
        Codebook::Gabor => Arc::new(GaborDictionary::new(n, m, stride)?),
        Codebook::Gaussian => Arc::new(GaussianDictionary::new(n, m, seed)?),
    })
}

/// Success counts for every grid cell, rows by delta then rho. Signals are
/// drawn from streams that depend only on the cell and trial, so Gabor and
/// Gaussian runs with the same seed see identical supports and values.
pub fn phase_transition(cfg: &PhaseConfig, codebook: Codebook, threads: usize) -> Result<Vec<PhaseCell>> {
    if cfg.delta_steps == 0 || cfg.rho_steps == 0 || cfg.trials == 0 {
        return invalid("phase grid needs positive steps and trials");
    }
    let dicts = (1..=cfg.delta_steps)
        .map(|i| build(codebook, cfg.n, cfg.columns(i), cfg.stride, cfg.seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize, usize)> = (0..cfg.delta_steps)
        .flat_map(|i| (0..cfg.rho_steps).flat_map(move |j| (0..cfg.trials).map(move |t| (i, j, t))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    let outcomes: Vec<bool> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, j, t)| {
                let stream = ((i * cfg.rho_steps + j) * cfg.trials + t) as u64;
                recover_once(dicts[i].as_ref(), cfg.sparsity(j + 1), cfg.seed, stream, &cfg.amp)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut cells = Vec::with_capacity(cfg.delta_steps * cfg.rho_steps);
    for i in 0..cfg.delta_steps {
        for j in 0..cfg.rho_steps {
            let base = (i * cfg.rho_steps + j) * cfg.trials;
            cells.push(PhaseCell {
                delta: (i + 1) as f64 / cfg.delta_steps as f64,
                rho: (j + 1) as f64 / cfg.rho_steps as f64,
                m: cfg.columns(i + 1),
                k: cfg.sparsity(j + 1),
                successes: outcomes[base..base + cfg.trials].iter().filter(|&&s| s).count(),
                trials: cfg.trials,
            });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sparsity_always_succeeds() {
        let d = GaborDictionary::new(13, 100, 1).unwrap();
        assert!(recover_once(&d, 0, 1, 0, &AmpConfig::default()).unwrap());
    }

    #[test]
    fn fully_dense_far_below_transition_fails() {
        let cfg = PhaseConfig::new(13, 8, 1, 5, 2);
        let cells = phase_transition(&cfg, Codebook::Gabor, 1).unwrap();
        // delta = 1/8, rho = 1: k = N with M = 8N.
        assert_eq!(cells[0].k, 13);
        assert_eq!(cells[0].m, 104);
        assert_eq!(cells[0].successes, 0);
    }

    #[test]
    fn sparse_cells_succeed() {
        let cfg = PhaseConfig::new(31, 2, 10, 10, 3);
        for codebook in [Codebook::Gabor, Codebook::Gaussian] {
            let cells = phase_transition(&cfg, codebook, 1).unwrap();
            // delta = 1/2, rho = 1/10: 3 nonzeros among 62 columns.
            assert_eq!((cells[0].m, cells[0].k), (62, 3));
            assert!(cells[0].rate() >= 0.9, "{codebook:?}: {}", cells[0].rate());
        }
    }

    #[test]
    fn stride_must_fit_the_frame() {
        let mut cfg = PhaseConfig::new(13, 2, 1, 1, 0);
        cfg.stride = 7;
        assert!(phase_transition(&cfg, Codebook::Gabor, 1).is_err());
        cfg.stride = 3;
        assert!(phase_transition(&cfg, Codebook::Gabor, 1).is_ok());
    }

    #[test]
    fn grid_geometry() {
        let cfg = PhaseConfig::new(97, 16, 16, 1, 0);
        assert_eq!(cfg.columns(16), 97);
        assert_eq!(cfg.columns(1), 1552);
        assert_eq!(cfg.sparsity(16), 97);
        assert_eq!(cfg.sparsity(8), 49);
    }
}

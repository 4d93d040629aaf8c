//! Multiple-measurement-vector AMP with a Bernoulli-Gaussian row prior.
//!
//! Rows of `X` are either zero or drawn from `CN(0, s I_T)`, where the slab
//! variance `s = a^2` comes from the transmit amplitude `a`. The effective
//! observation `r_k = x_k + CN(0, diag(tau))` is denoised row by row.

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{invalid, Error, Result};
use crate::gabor::Dictionary;
use crate::C64;

/// Channel coefficient model seen by the denoiser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fading {
    /// Transmit amplitude `a` through `h ~ CN(0, I_T)`.
    Rayleigh { amplitude: f64 },
    /// Unit channel with transmit amplitude `a` and unknown phase. There is
    /// no separate phase-aware denoiser: it shares the Gaussian slab.
    Deterministic { amplitude: f64 },
}

impl Fading {
    pub fn unit_rayleigh() -> Self {
        Fading::Rayleigh { amplitude: 1.0 }
    }

    /// Slab variance `a^2` of an active row.
    pub fn slab_variance(&self) -> f64 {
        match *self {
            Fading::Rayleigh { amplitude } | Fading::Deterministic { amplitude } => amplitude * amplitude,
        }
    }
}

/// Per-row prior activity probabilities.
#[derive(Debug, Clone, PartialEq)]
pub enum Prior {
    Uniform(f64),
    PerRow(Vec<f64>),
}

impl Prior {
    pub fn at(&self, k: usize) -> f64 {
        match self {
            Prior::Uniform(e) => *e,
            Prior::PerRow(v) => v[k],
        }
    }

    fn validate(&self, rows: usize) -> Result<()> {
        let ok = |e: f64| (0.0..=1.0).contains(&e);
        match self {
            Prior::Uniform(e) if ok(*e) => Ok(()),
            Prior::PerRow(v) if v.len() == rows && v.iter().all(|&e| ok(e)) => Ok(()),
            Prior::Uniform(e) => invalid(format!("prior activity {e} outside [0, 1]")),
            Prior::PerRow(v) => invalid(format!("per-row prior needs {rows} entries in [0, 1], got {}", v.len())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmpConfig {
    pub max_iterations: usize,
    pub damping: f64,
    /// Stop once `||Z_t - Z_{t-1}|| / ||Y||` drops below this.
    pub tolerance: f64,
    pub fading: Fading,
    pub prior: Prior,
    /// Channel noise variance, carried for diagnostics only; the iteration
    /// estimates `tau` from residuals.
    pub noise_variance: Option<f64>,
}

impl Default for AmpConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            damping: 0.7,
            tolerance: 1e-6,
            fading: Fading::unit_rayleigh(),
            prior: Prior::Uniform(0.5),
            noise_variance: None,
        }
    }
}

impl AmpConfig {
    fn validate(&self, rows: usize) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return invalid(format!("damping {} outside (0, 1]", self.damping));
        }
        if self.max_iterations == 0 {
            return invalid("max_iterations must be positive");
        }
        let s = self.fading.slab_variance();
        if !(s.is_finite() && s > 0.0) {
            return invalid(format!("slab variance {s} must be positive"));
        }
        self.prior.validate(rows)
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn logit(p: f64) -> f64 {
    p.ln() - (1.0 - p).ln()
}

/// Row denoiser constants for fixed `tau` and slab variance.
#[derive(Debug, Clone)]
pub struct RowDenoiser {
    /// Wiener gains `s / (s + tau_t)`.
    wiener: Vec<f64>,
    /// Quadratic-form weights `s / (tau_t (s + tau_t))`.
    quad: Vec<f64>,
    /// `sum_t log((s + tau_t) / tau_t)`.
    log_det_ratio: f64,
}

impl RowDenoiser {
    pub fn new(tau: &[f64], slab: f64) -> Result<Self> {
        if tau.is_empty() || tau.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return invalid("effective noise variances must be positive and finite");
        }
        if !(slab > 0.0 && slab.is_finite()) {
            return invalid("slab variance must be positive");
        }
        Ok(Self {
            wiener: tau.iter().map(|&t| slab / (slab + t)).collect(),
            quad: tau.iter().map(|&t| slab / (t * (slab + t))).collect(),
            log_det_ratio: tau.iter().map(|&t| ((slab + t) / t).ln()).sum(),
        })
    }

    fn len(&self) -> usize {
        self.wiener.len()
    }

    /// Log likelihood ratio of active vs inactive, prior excluded.
    pub fn llr(&self, r: ArrayView1<C64>) -> f64 {
        r.iter().zip(&self.quad).map(|(v, q)| v.norm_sqr() * q).sum::<f64>() - self.log_det_ratio
    }

    pub fn activity(&self, r: ArrayView1<C64>, eps: f64) -> f64 {
        match eps {
            e if e <= 0.0 => 0.0,
            e if e >= 1.0 => 1.0,
            e => sigmoid(self.llr(r) + logit(e)),
        }
    }

    /// Posterior mean and activity probability.
    pub fn denoise(&self, r: ArrayView1<C64>, eps: f64) -> (Vec<C64>, f64) {
        let phi = self.activity(r, eps);
        (r.iter().zip(&self.wiener).map(|(v, w)| v * (w * phi)).collect(), phi)
    }

    /// `J[a][b] = d eta_a / d r_b` (Wirtinger, conjugate held fixed), row-major.
    pub fn jacobian(&self, r: ArrayView1<C64>, eps: f64) -> Vec<C64> {
        let t = self.len();
        let phi = self.activity(r, eps);
        let mut j = vec![C64::new(0.0, 0.0); t * t];
        self.accumulate_jacobian(r, phi, &mut j);
        j
    }

    fn accumulate_jacobian(&self, r: ArrayView1<C64>, phi: f64, acc: &mut [C64]) {
        let t = self.len();
        for a in 0..t {
            acc[a * t + a] += self.wiener[a] * phi;
        }
        let spread = phi - phi * phi;
        if spread == 0.0 {
            return;
        }
        for a in 0..t {
            let wa = r[a] * self.wiener[a] * spread;
            for b in 0..t {
                acc[a * t + b] += wa * (r[b] * self.quad[b]).conj();
            }
        }
    }
}

/// Posterior-mean denoiser for one row.
pub fn denoise_row(r: &[C64], tau: &[f64], eps: f64, fading: Fading) -> Result<(Vec<C64>, f64)> {
    let d = row_denoiser(r, tau, eps, fading)?;
    Ok(d.denoise(ArrayView1::from(r), eps))
}

/// Jacobian of [`denoise_row`] as a T x T matrix.
pub fn denoise_jacobian(r: &[C64], tau: &[f64], eps: f64, fading: Fading) -> Result<Array2<C64>> {
    let d = row_denoiser(r, tau, eps, fading)?;
    let t = r.len();
    Ok(Array2::from_shape_vec((t, t), d.jacobian(ArrayView1::from(r), eps)).expect("square"))
}

fn row_denoiser(r: &[C64], tau: &[f64], eps: f64, fading: Fading) -> Result<RowDenoiser> {
    if r.len() != tau.len() {
        return invalid(format!("row has {} entries but tau has {}", r.len(), tau.len()));
    }
    if !(0.0..=1.0).contains(&eps) {
        return invalid(format!("prior activity {eps} outside [0, 1]"));
    }
    RowDenoiser::new(tau, fading.slab_variance())
}

#[derive(Debug, Clone)]
pub struct AmpOutput {
    pub x_hat: Array2<C64>,
    /// Effective observation of the final iteration.
    pub r: Array2<C64>,
    pub tau: Vec<f64>,
    /// Posterior activity per row under the prior used in the run.
    pub phi: Vec<f64>,
    pub iterations: usize,
    slab: f64,
}

impl AmpOutput {
    pub fn slab_variance(&self) -> f64 {
        self.slab
    }
}

fn column_energy(m: &Array2<C64>) -> Vec<f64> {
    m.columns().into_iter().map(|c| c.iter().map(|v| v.norm_sqr()).sum()).collect()
}

fn all_finite(m: &Array2<C64>) -> bool {
    m.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Runs damped MMV-AMP on `y` (N x T).
pub fn amp_run(dict: &dyn Dictionary, y: ArrayView2<C64>, config: &AmpConfig) -> Result<AmpOutput> {
    let (n, m) = (dict.rows(), dict.cols());
    if y.nrows() != n || y.ncols() == 0 {
        return invalid(format!("observation has shape {:?}, expected {n} x T", y.dim()));
    }
    config.validate(m)?;
    let t_count = y.ncols();
    let slab = config.fading.slab_variance();
    let theta = config.damping;
    let y = y.to_owned();
    let y_energy: f64 = y.iter().map(|v| v.norm_sqr()).sum();

    if y_energy == 0.0 {
        return Ok(AmpOutput {
            x_hat: Array2::zeros((m, t_count)),
            r: Array2::zeros((m, t_count)),
            tau: vec![f64::MIN_POSITIVE; t_count],
            phi: vec![0.0; m],
            iterations: 1,
            slab,
        });
    }
    let tau_floor = (1e-12 * y_energy / (n * t_count) as f64).max(f64::MIN_POSITIVE);
    let y_norm = y_energy.sqrt();
    let ratio = m as f64 / n as f64;

    let mut x = Array2::<C64>::zeros((m, t_count));
    let mut z = y.clone();
    let mut r = Array2::<C64>::zeros((m, t_count));
    let mut tau = vec![0.0; t_count];
    let mut phi = vec![0.0; m];
    let mut iterations = 0;

    for it in 1..=config.max_iterations {
        iterations = it;
        // The first iteration has no history to damp against.
        let th = if it == 1 { 1.0 } else { theta };
        for (t_a, e) in tau.iter_mut().zip(column_energy(&z)) {
            *t_a = (th * e / n as f64 + (1.0 - th) * *t_a).max(tau_floor);
        }
        let back = dict.adjoint(z.view())?;
        r.zip_mut_with(&(back + &x), |old, new| *old = *new * th + *old * (1.0 - th));
        if !all_finite(&r) || tau.iter().any(|t| !t.is_finite()) {
            return Err(Error::Divergence { iteration: it });
        }

        let den = RowDenoiser::new(&tau, slab).map_err(|_| Error::Divergence { iteration: it })?;
        let mut jac_sum = vec![C64::new(0.0, 0.0); t_count * t_count];
        for k in 0..m {
            let row = r.row(k);
            let eps = config.prior.at(k);
            let p = den.activity(row, eps);
            phi[k] = p;
            for a in 0..t_count {
                x[[k, a]] = row[a] * (den.wiener[a] * p);
            }
            if p > 0.0 {
                den.accumulate_jacobian(row, p, &mut jac_sum);
            }
        }

        // Onsager correction: rows of Z pick up z_row * <J>^T.
        let mut z_new = &y - &dict.apply(x.view())?;
        for nn in 0..n {
            for a in 0..t_count {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..t_count {
                    acc += z[[nn, b]] * jac_sum[a * t_count + b];
                }
                z_new[[nn, a]] += acc * (ratio / m as f64);
            }
        }
        if !all_finite(&z_new) || !all_finite(&x) {
            return Err(Error::Divergence { iteration: it });
        }
        let change: f64 = z_new.iter().zip(z.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        z = z_new;
        if change / y_norm < config.tolerance {
            break;
        }
    }

    Ok(AmpOutput { x_hat: x, r, tau, phi, iterations, slab })
}

/// Prior-free activity log-likelihood ratio of every row.
pub fn extract_llrs(output: &AmpOutput) -> Vec<f64> {
    let den = RowDenoiser::new(&output.tau, output.slab).expect("tau validated during the run");
    output.r.rows().into_iter().map(|row| den.llr(row)).collect()
}

/// Posterior activity of every row under `prior`.
pub fn posterior_activity(output: &AmpOutput, prior: &Prior) -> Vec<f64> {
    extract_llrs(output)
        .into_iter()
        .enumerate()
        .map(|(k, l)| match prior.at(k) {
            e if e <= 0.0 => 0.0,
            e if e >= 1.0 => 1.0,
            e => sigmoid(l + logit(e)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gabor::GaborDictionary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::PI;

    fn cn(rng: &mut ChaCha8Rng, var: f64) -> C64 {
        let s = (var / 2.0).sqrt();
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * s, im * s)
    }

    #[test]
    fn inactive_prior_gives_zero() {
        let r = [C64::new(3.0, -1.0), C64::new(0.5, 2.0)];
        let (x, phi) = denoise_row(&r, &[0.3, 0.7], 0.0, Fading::unit_rayleigh()).unwrap();
        assert_eq!(phi, 0.0);
        assert!(x.iter().all(|v| *v == C64::new(0.0, 0.0)));
        let j = denoise_jacobian(&r, &[0.3, 0.7], 0.0, Fading::unit_rayleigh()).unwrap();
        assert!(j.iter().all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn certain_prior_gives_wiener() {
        let r = [C64::new(3.0, -1.0), C64::new(0.5, 2.0), C64::new(-1.0, 0.0)];
        let (x, phi) = denoise_row(&r, &[1.0; 3], 1.0, Fading::unit_rayleigh()).unwrap();
        assert_eq!(phi, 1.0);
        for (a, b) in x.iter().zip(&r) {
            assert!((a - b / 2.0).norm() < 1e-15);
        }
        let j = denoise_jacobian(&r, &[1.0, 2.0, 3.0], 1.0, Fading::unit_rayleigh()).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let want = if a == b { 1.0 / (2.0 + a as f64) } else { 0.0 };
                assert!((j[[a, b]] - C64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> f64 {
        let h = (hi - lo) / steps as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..steps {
            acc += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    fn gauss(x: f64, mean: f64, var: f64) -> f64 {
        (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
    }

    // Active likelihood integrates the slab over real and imaginary parts
    // separately; each factor is a 1-D convolution of Gaussians.
    fn quadrature_phi(r: C64, tau: f64, eps: f64, slab: f64) -> f64 {
        let part = |obs: f64| simpson(|u| gauss(obs, u, tau / 2.0) * gauss(u, 0.0, slab / 2.0), -12.0, 12.0, 40_000);
        let active = part(r.re) * part(r.im);
        let idle = (-r.norm_sqr() / tau).exp() / (PI * tau);
        eps * active / (eps * active + (1.0 - eps) * idle)
    }

    #[test]
    fn activity_matches_quadrature() {
        for (r, tau, eps, fading) in [
            (C64::new(3.0, 0.0), 0.1, 0.5, Fading::unit_rayleigh()),
            (C64::new(0.5, 0.0), 0.1, 0.5, Fading::unit_rayleigh()),
            (C64::new(0.2, -0.4), 0.3, 0.2, Fading::unit_rayleigh()),
            (C64::new(1.0, 1.0), 0.5, 0.05, Fading::Deterministic { amplitude: 1.5 }),
        ] {
            let (_, phi) = denoise_row(&[r], &[tau], eps, fading).unwrap();
            let want = quadrature_phi(r, tau, eps, fading.slab_variance());
            assert!((phi - want).abs() < 1e-9, "{phi} vs {want}");
        }
    }

    fn wirtinger_fd(r: &[C64], tau: &[f64], eps: f64, h: f64) -> Vec<C64> {
        let t = r.len();
        let eval = |delta: C64, b: usize| {
            let mut rr = r.to_vec();
            rr[b] += delta;
            denoise_row(&rr, tau, eps, Fading::unit_rayleigh()).unwrap().0
        };
        let mut out = vec![C64::new(0.0, 0.0); t * t];
        for b in 0..t {
            let (p, m) = (eval(C64::new(h, 0.0), b), eval(C64::new(-h, 0.0), b));
            let (pi, mi) = (eval(C64::new(0.0, h), b), eval(C64::new(0.0, -h), b));
            for a in 0..t {
                let d_re = (p[a] - m[a]) / (2.0 * h);
                let d_im = (pi[a] - mi[a]) / (2.0 * h);
                out[a * t + b] = (d_re - C64::new(0.0, 1.0) * d_im) / 2.0;
            }
        }
        out
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for t in [1, 2, 4] {
            for _ in 0..20 {
                let tau: Vec<f64> = (0..t).map(|_| rng.random_range(0.05..2.0)).collect();
                let r: Vec<C64> = (0..t).map(|_| cn(&mut rng, 1.5)).collect();
                let eps = rng.random_range(0.01..0.99);
                let j = denoise_jacobian(&r, &tau, eps, Fading::unit_rayleigh()).unwrap();
                let fd = wirtinger_fd(&r, &tau, eps, 1e-6);
                let num: f64 = j.iter().zip(&fd).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                let den: f64 = j.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                assert!(num / den < 1e-5, "T={t}: {}", num / den);
            }
        }
    }

    #[test]
    fn llr_identity_and_monotonicity() {
        let tau = [0.4, 0.9];
        let den = RowDenoiser::new(&tau, 1.0).unwrap();
        let zero = ndarray::arr1(&[C64::new(0.0, 0.0); 2]);
        let expected = -((1.4f64 / 0.4).ln() + (1.9f64 / 0.9).ln());
        assert!((den.llr(zero.view()) - expected).abs() < 1e-15);
        let r = ndarray::arr1(&[C64::new(0.3, 0.1), C64::new(-0.2, 0.5)]);
        let eps = 0.03;
        let (_, phi) = denoise_row(r.as_slice().unwrap(), &tau, eps, Fading::unit_rayleigh()).unwrap();
        assert!((phi - sigmoid(den.llr(r.view()) + logit(eps))).abs() < 1e-9);
        assert!(den.llr(r.mapv(|v| v * 10.0).view()) > den.llr(r.view()));
    }

    #[test]
    fn shrinkage_never_exceeds_wiener() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let tau = [rng.random_range(0.01..3.0), rng.random_range(0.01..3.0)];
            let r = [cn(&mut rng, 2.0), cn(&mut rng, 2.0)];
            let eps = rng.random::<f64>();
            let (x, phi) = denoise_row(&r, &tau, eps, Fading::unit_rayleigh()).unwrap();
            assert!((0.0..=1.0).contains(&phi));
            for a in 0..2 {
                assert!(x[a].norm() <= (r[a] / (1.0 + tau[a])).norm() + 1e-15);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let r = [C64::new(1.0, 0.0)];
        assert!(denoise_row(&r, &[0.0], 0.5, Fading::unit_rayleigh()).is_err());
        assert!(denoise_row(&r, &[1.0], 1.5, Fading::unit_rayleigh()).is_err());
        assert!(denoise_row(&r, &[1.0, 1.0], 0.5, Fading::unit_rayleigh()).is_err());
        let d = GaborDictionary::new(7, 20, 1).unwrap();
        let y = Array2::zeros((7, 1));
        let cfg = AmpConfig { damping: 0.0, ..AmpConfig::default() };
        assert!(amp_run(&d, y.view(), &cfg).is_err());
        let cfg = AmpConfig { prior: Prior::PerRow(vec![0.1; 19]), ..AmpConfig::default() };
        assert!(amp_run(&d, y.view(), &cfg).is_err());
    }

    #[test]
    fn zero_observation() {
        let d = GaborDictionary::new(31, 200, 1).unwrap();
        let out = amp_run(&d, Array2::zeros((31, 2)).view(), &AmpConfig::default()).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.x_hat.iter().all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn single_column_exact_recovery() {
        let d = GaborDictionary::new(31, 500, 1).unwrap();
        for i in [0, 77, 499] {
            let y = d.column(i).insert_axis(ndarray::Axis(1)).to_owned();
            let cfg = AmpConfig {
                prior: Prior::Uniform(1.0 / 500.0),
                max_iterations: 50,
                ..AmpConfig::default()
            };
            let out = amp_run(&d, y.view(), &cfg).unwrap();
            assert!(out.iterations <= 50);
            assert!((out.x_hat[[i, 0]] - C64::new(1.0, 0.0)).norm() <= 1e-3);
            for k in 0..500 {
                if k != i {
                    assert!(out.x_hat[[k, 0]].norm() < 1e-3, "row {k}: {}", out.x_hat[[k, 0]]);
                }
            }
        }
    }

    #[test]
    fn mmv_support_recovery_rayleigh() {
        let d = GaborDictionary::new(31, 961, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let noise_var = 0.01; // 20 dB per active row
        let mut hits = 0;
        for _ in 0..100 {
            let support = rand::seq::index::sample(&mut rng, 961, 3).into_vec();
            let mut x = Array2::<C64>::zeros((961, 4));
            for &k in &support {
                for a in 0..4 {
                    x[[k, a]] = cn(&mut rng, 1.0);
                }
            }
            let mut y = d.apply(x.view()).unwrap();
            y.mapv_inplace(|v| v + cn(&mut rng, noise_var));
            let cfg = AmpConfig { prior: Prior::Uniform(3.0 / 961.0), ..AmpConfig::default() };
            let out = amp_run(&d, y.view(), &cfg).unwrap();
            let mut order: Vec<usize> = (0..961).collect();
            order.sort_by(|&a, &b| out.phi[b].total_cmp(&out.phi[a]));
            let mut top: Vec<usize> = order[..3].to_vec();
            let mut truth = support.clone();
            top.sort_unstable();
            truth.sort_unstable();
            hits += usize::from(top == truth);
        }
        assert!(hits >= 95, "{hits}/100");
    }

    #[test]
    fn deterministic_across_runs() {
        let d = GaborDictionary::new(31, 400, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y = Array2::from_shape_fn((31, 2), |_| cn(&mut rng, 1.0));
        let cfg = AmpConfig { prior: Prior::Uniform(0.01), ..AmpConfig::default() };
        let a = amp_run(&d, y.view(), &cfg).unwrap();
        let b = amp_run(&d, y.view(), &cfg).unwrap();
        assert_eq!(a.x_hat, b.x_hat);
        assert_eq!(a.tau, b.tau);
        assert_eq!(extract_llrs(&a), extract_llrs(&b));
    }

    #[test]
    fn posterior_activity_matches_run() {
        let d = GaborDictionary::new(31, 300, 1).unwrap();
        let y = (d.column(4).to_owned() * C64::new(0.8, 0.3) + d.column(200) * C64::new(-0.5, 0.9))
            .insert_axis(ndarray::Axis(1))
            .to_owned();
        let prior = Prior::Uniform(2.0 / 300.0);
        let out = amp_run(&d, y.view(), &AmpConfig { prior: prior.clone(), ..AmpConfig::default() }).unwrap();
        for (a, b) in posterior_activity(&out, &prior).iter().zip(&out.phi) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

//! Block-fading multiple-access channel: activity, fading, superposition, noise.

use ndarray::Array2;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelModel {
    /// `h = 1` on every antenna.
    Awgn,
    /// `h ~ CN(0, I_T)`, independent per user and block.
    Rayleigh,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub model: ChannelModel,
    pub antennas: usize,
    /// Noise variance per complex dimension. Zero gives a noiseless channel.
    pub noise_variance: f64,
    pub power: f64,
    pub block_length: usize,
}

impl ChannelConfig {
    fn validate(&self) -> Result<()> {
        if self.antennas == 0 || self.block_length == 0 {
            return invalid("antennas and block length must be positive");
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return invalid(format!("power {} must be positive", self.power));
        }
        if !(self.noise_variance >= 0.0 && self.noise_variance.is_finite()) {
            return invalid(format!("noise variance {} must be non-negative", self.noise_variance));
        }
        Ok(())
    }
}

/// `N0 = P N / (b 10^(EbN0/10))`.
pub fn ebn0_to_noise(ebn0_db: f64, power: f64, block_length: usize, bits: usize) -> Result<f64> {
    if bits == 0 {
        return invalid("message must carry at least one bit");
    }
    Ok(power * block_length as f64 / (bits as f64 * 10f64.powf(ebn0_db / 10.0)))
}

pub fn noise_to_ebn0(noise_variance: f64, power: f64, block_length: usize, bits: usize) -> Result<f64> {
    if bits == 0 || !(noise_variance > 0.0) {
        return invalid("need positive bits and noise variance");
    }
    Ok(10.0 * (power * block_length as f64 / (bits as f64 * noise_variance)).log10())
}

/// Independent stream for one trial of an experiment.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// `CN(0, var)`: variance split evenly between real and imaginary parts.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, var: f64) -> C64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re * s, im * s)
}

/// Per-user channel gains, one length-T vector each.
pub fn draw_gains<R: Rng + ?Sized>(model: ChannelModel, users: usize, antennas: usize, rng: &mut R) -> Vec<Vec<C64>> {
    (0..users)
        .map(|_| match model {
            ChannelModel::Awgn => vec![C64::new(1.0, 0.0); antennas],
            ChannelModel::Rayleigh => (0..antennas).map(|_| complex_normal(rng, 1.0)).collect(),
        })
        .collect()
}

/// `Y = sum_i s_i h_i^T + W`.
pub fn receive(signals: &[Vec<C64>], gains: &[Vec<C64>], noise: &Array2<C64>) -> Array2<C64> {
    let mut y = noise.clone();
    for (s, h) in signals.iter().zip(gains) {
        for (n, sv) in s.iter().enumerate() {
            for (a, hv) in h.iter().enumerate() {
                y[[n, a]] += sv * hv;
            }
        }
    }
    y
}

/// Draws the noise (first) and gains, then superimposes. Noise is drawn at
/// unit variance and scaled, so matched seeds share realizations across
/// noise levels.
pub fn simulate_block<R: Rng + ?Sized>(signals: &[Vec<C64>], config: &ChannelConfig, rng: &mut R) -> Result<Array2<C64>> {
    config.validate()?;
    let n = config.block_length;
    let target = config.power * n as f64;
    for (i, s) in signals.iter().enumerate() {
        if s.len() != n {
            return invalid(format!("signal {i} has length {}, expected {n}", s.len()));
        }
        let energy: f64 = s.iter().map(|v| v.norm_sqr()).sum();
        if (energy - target).abs() > 1e-9 * target.max(1.0) {
            return invalid(format!("signal {i} has energy {energy}, power constraint requires {target}"));
        }
    }
    let scale = config.noise_variance.sqrt();
    let mut noise = Array2::from_shape_simple_fn((n, config.antennas), || complex_normal(rng, 1.0));
    noise.mapv_inplace(|v| v * scale);
    let gains = draw_gains(config.model, signals.len(), config.antennas, rng);
    Ok(receive(signals, &gains, &noise))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityMode {
    /// Exactly this many distinct users, uniformly.
    FixedCount(usize),
    /// Each user independently with this probability.
    Bernoulli(f64),
}

/// Sorted indices of the active users among `users`.
pub fn draw_activity<R: Rng + ?Sized>(users: usize, mode: ActivityMode, rng: &mut R) -> Result<Vec<usize>> {
    let mut active = match mode {
        ActivityMode::FixedCount(k) if k > users => {
            return invalid(format!("cannot activate {k} of {users} users"));
        }
        ActivityMode::FixedCount(k) => index::sample(rng, users, k).into_vec(),
        ActivityMode::Bernoulli(p) if !(0.0..=1.0).contains(&p) => {
            return invalid(format!("activation probability {p} outside [0, 1]"));
        }
        ActivityMode::Bernoulli(p) => (0..users).filter(|_| rng.random::<f64>() < p).collect(),
    };
    active.sort_unstable();
    Ok(active)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(model: ChannelModel, antennas: usize, n0: f64, n: usize) -> ChannelConfig {
        ChannelConfig { model, antennas, noise_variance: n0, power: 1.0, block_length: n }
    }

    fn unit_power_signal(n: usize, phase: f64) -> Vec<C64> {
        (0..n).map(|k| C64::from_polar(1.0, phase * k as f64)).collect()
    }

    #[test]
    fn ebn0_conversions() {
        assert!((ebn0_to_noise(0.0, 1.0, 100, 50).unwrap() - 2.0).abs() < 1e-15);
        let n0 = ebn0_to_noise(6.0, 1.0, 149, 36).unwrap();
        assert!((n0 - 149.0 / (36.0 * 10f64.powf(0.6))).abs() < 1e-15);
        for db in [-3.0, 0.0, 2.5, 17.0] {
            let n0 = ebn0_to_noise(db, 2.0, 257, 65).unwrap();
            assert!((noise_to_ebn0(n0, 2.0, 257, 65).unwrap() - db).abs() < 1e-12);
        }
        assert!(ebn0_to_noise(400.0, 1.0, 100, 50).unwrap() < 1e-30);
        assert!(ebn0_to_noise(0.0, 1.0, 100, 0).is_err());
    }

    #[test]
    fn noise_only_variance() {
        let mut rng = trial_rng(3, 0);
        let y = simulate_block(&[], &config(ChannelModel::Rayleigh, 4, 0.7, 5000), &mut rng).unwrap();
        let var = y.iter().map(|v| v.norm_sqr()).sum::<f64>() / y.len() as f64;
        assert!((var / 0.7 - 1.0).abs() < 0.05);
    }

    #[test]
    fn noiseless_awgn_superposition() {
        let s1 = unit_power_signal(64, 0.3);
        let s2 = unit_power_signal(64, -1.1);
        let mut rng = trial_rng(1, 1);
        let y = simulate_block(&[s1.clone(), s2.clone()], &config(ChannelModel::Awgn, 1, 0.0, 64), &mut rng).unwrap();
        for n in 0..64 {
            assert_eq!(y[[n, 0]], s1[n] + s2[n]);
        }
    }

    #[test]
    fn awgn_gains_are_one() {
        let mut rng = trial_rng(1, 2);
        let g = draw_gains(ChannelModel::Awgn, 3, 2, &mut rng);
        assert!(g.iter().flatten().all(|v| *v == C64::new(1.0, 0.0)));
    }

    #[test]
    fn rayleigh_unit_variance() {
        let mut rng = trial_rng(5, 0);
        let g = draw_gains(ChannelModel::Rayleigh, 100_000, 1, &mut rng);
        let var = g.iter().map(|h| h[0].norm_sqr()).sum::<f64>() / 1e5;
        assert!((var - 1.0).abs() < 0.02);
    }

    #[test]
    fn power_constraint_enforced() {
        let mut rng = trial_rng(1, 0);
        let weak = vec![C64::new(0.5, 0.0); 16];
        assert!(simulate_block(&[weak], &config(ChannelModel::Awgn, 1, 1.0, 16), &mut rng).is_err());
        assert!(simulate_block(&[vec![C64::new(1.0, 0.0); 15]], &config(ChannelModel::Awgn, 1, 1.0, 16), &mut rng).is_err());
    }

    #[test]
    fn receive_is_linear() {
        let mut rng = trial_rng(8, 0);
        let s1 = unit_power_signal(32, 0.7);
        let s2 = unit_power_signal(32, 2.0);
        let gains = draw_gains(ChannelModel::Rayleigh, 2, 3, &mut rng);
        let noise = Array2::from_shape_simple_fn((32, 3), || complex_normal(&mut rng, 0.4));
        let joint = receive(&[s1.clone(), s2.clone()], &gains, &noise);
        let a = receive(&[s1], &gains[..1], &noise);
        let b = receive(&[s2], &gains[1..], &noise);
        let diff = &joint - &(&a + &b - &noise);
        assert!(diff.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn matched_seeds_share_realizations() {
        let s = unit_power_signal(40, 0.2);
        let lo = simulate_block(std::slice::from_ref(&s), &config(ChannelModel::Rayleigh, 2, 0.1, 40), &mut trial_rng(4, 7)).unwrap();
        let hi = simulate_block(std::slice::from_ref(&s), &config(ChannelModel::Rayleigh, 2, 0.4, 40), &mut trial_rng(4, 7)).unwrap();
        let clean = simulate_block(&[s], &config(ChannelModel::Rayleigh, 2, 0.0, 40), &mut trial_rng(4, 7)).unwrap();
        let w_lo = &lo - &clean;
        let w_hi = &hi - &clean;
        for (a, b) in w_lo.iter().zip(&w_hi) {
            assert!((a * 2.0 - b).norm() < 1e-12);
        }
        let again = simulate_block(&[unit_power_signal(40, 0.2)], &config(ChannelModel::Rayleigh, 2, 0.1, 40), &mut trial_rng(4, 7)).unwrap();
        assert_eq!(lo, again);
    }

    #[test]
    fn activity_modes() {
        let mut rng = trial_rng(0, 0);
        assert!(draw_activity(10, ActivityMode::FixedCount(0), &mut rng).unwrap().is_empty());
        assert_eq!(draw_activity(7, ActivityMode::Bernoulli(1.0), &mut rng).unwrap(), (0..7).collect::<Vec<_>>());
        assert!(draw_activity(7, ActivityMode::Bernoulli(0.0), &mut rng).unwrap().is_empty());
        assert!(draw_activity(3, ActivityMode::FixedCount(4), &mut rng).is_err());
        assert!(draw_activity(3, ActivityMode::Bernoulli(1.2), &mut rng).is_err());
    }

    #[test]
    fn fixed_count_is_uniform() {
        let mut rng = trial_rng(11, 0);
        let mut freq = [0usize; 10];
        for _ in 0..10_000 {
            let a = draw_activity(10, ActivityMode::FixedCount(3), &mut rng).unwrap();
            assert_eq!(a.len(), 3);
            assert!(a.windows(2).all(|w| w[0] < w[1]));
            a.iter().for_each(|&i| freq[i] += 1);
        }
        for f in freq {
            assert!((f as f64 / 1e4 - 0.3).abs() < 0.02);
        }
    }

    #[test]
    fn trial_streams_differ_and_repeat() {
        let a: u64 = trial_rng(42, 0).random();
        let b: u64 = trial_rng(42, 1).random();
        let c: u64 = trial_rng(42, 0).random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}

//! Eb/N0 grids and bisection for the required Eb/N0 at a target error rate.

use super::engine::{Experiment, PointResult};
use crate::error::{invalid, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `errors` out of `n`.
pub fn wilson_interval(errors: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = errors as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub ebn0_db: f64,
    pub trials: usize,
    pub pe: f64,
    pub ci: (f64, f64),
    pub missed: usize,
    pub false_alarms: usize,
    pub kbar_a: f64,
    pub wall_ms: u128,
}

impl SweepRow {
    fn from_point(p: &PointResult, kbar_a: f64) -> Self {
        Self {
            ebn0_db: p.ebn0_db,
            trials: p.trials(),
            pe: p.pe(),
            ci: wilson_interval(p.missed(), p.events(), Z95),
            missed: p.missed(),
            false_alarms: p.false_alarms(),
            kbar_a,
            wall_ms: p.wall_ms,
        }
    }
}

fn evaluate(exp: &Experiment, ebn0_db: f64, threads: usize) -> Result<SweepRow> {
    Ok(SweepRow::from_point(&exp.run_point(ebn0_db, threads)?, exp.config().kbar_a()))
}

/// One row per grid point, all on the same trial seeds.
pub fn sweep_grid(exp: &Experiment, grid: &[f64], threads: usize) -> Result<Vec<SweepRow>> {
    grid.iter().map(|&e| evaluate(exp, e, threads)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum BisectionOutcome {
    /// `pe(lo) > target >= pe(hi)` with `hi - lo <= tol`.
    Found { required_db: f64, lo: f64, hi: f64 },
    /// Already at or below target at the low edge.
    AtOrBelowLo { lo: f64 },
    /// Still above target at the high edge.
    Unreachable { hi: f64 },
    /// A midpoint whose confidence interval contains the target; the last
    /// separated bracket is reported and `hi` is the conservative answer.
    Undetermined { lo: f64, hi: f64, at: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisectionResult {
    pub outcome: BisectionOutcome,
    /// Every evaluated point in evaluation order.
    pub rows: Vec<SweepRow>,
}

/// Smallest Eb/N0 in `[lo, hi]` with error rate at most the configured
/// target, to within `tol` dB.
pub fn bisect(exp: &Experiment, lo: f64, hi: f64, tol: f64, threads: usize) -> Result<BisectionResult> {
    if !(lo < hi) || !(tol > 0.0) {
        return invalid(format!("need lo < hi and tol > 0, got [{lo}, {hi}] tol {tol}"));
    }
    let target = exp.config().target_pe;
    let mut rows = Vec::new();
    let lo_row = evaluate(exp, lo, threads)?;
    rows.push(lo_row.clone());
    if lo_row.pe <= target {
        return Ok(BisectionResult { outcome: BisectionOutcome::AtOrBelowLo { lo }, rows });
    }
    let hi_row = evaluate(exp, hi, threads)?;
    rows.push(hi_row.clone());
    if hi_row.pe > target {
        return Ok(BisectionResult { outcome: BisectionOutcome::Unreachable { hi }, rows });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let row = evaluate(exp, mid, threads)?;
        rows.push(row.clone());
        if row.ci.0 <= target && target <= row.ci.1 {
            return Ok(BisectionResult { outcome: BisectionOutcome::Undetermined { lo: a, hi: b, at: mid }, rows });
        }
        if row.pe <= target {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(BisectionResult { outcome: BisectionOutcome::Found { required_db: b, lo: a, hi: b }, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_values() {
        // 10 of 100 at 95%: (0.0552, 0.1744) to 4 decimals.
        let (lo, hi) = wilson_interval(10, 100, Z95);
        assert!((lo - 0.05523).abs() < 1e-4 && (hi - 0.17437).abs() < 1e-4);
        let (lo, hi) = wilson_interval(0, 50, Z95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.07135).abs() < 1e-4);
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
        let (lo, hi) = wilson_interval(50, 50, Z95);
        assert_eq!(hi, 1.0);
        assert!(lo < 1.0);
    }

    #[test]
    fn wilson_contains_estimate() {
        for n in [1, 7, 30, 200] {
            for k in 0..=n {
                let (lo, hi) = wilson_interval(k, n, Z95);
                let p = k as f64 / n as f64;
                assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
            }
        }
    }
}

//! CSV result files tagged with a configuration hash.

use std::io::Write;

use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::sweep::SweepRow;
use crate::error::Result;

pub const CSV_HEADER: &str = "config_hash,scheme,ebn0_db,trials,pe,pe_ci_lo,pe_ci_hi,missed,false_alarms,kbar_a,wall_ms";

/// First 16 hex digits of the SHA-256 of the compact JSON form.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    Sha256::digest(json.as_bytes()).iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Writes the header and one line per row. `wall_ms` is written as 0 unless
/// `timing` is set, so that repeated runs produce identical files.
pub fn write_csv<W: Write>(out: &mut W, config: &ExperimentConfig, rows: &[SweepRow], timing: bool) -> Result<()> {
    let hash = config_hash(config);
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{hash},{},{:.4},{},{:.6},{:.6},{:.6},{},{},{:.1},{}",
            config.scheme.as_str(),
            r.ebn0_db,
            r.trials,
            r.pe,
            r.ci.0,
            r.ci.1,
            r.missed,
            r.false_alarms,
            r.kbar_a,
            if timing { r.wall_ms } else { 0 },
        )?;
    }
    Ok(())
}

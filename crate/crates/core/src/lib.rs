//! Massive random access built from constant-weight codes, Gabor dictionaries
//! and approximate message passing.
//!
//! The crate is organized bottom-up:
//!
//! * [`galois`]: GF(2^m) arithmetic and systematic Reed-Solomon codes.
//! * [`cwcode`]: PPM(q) concatenated with Reed-Solomon, OR-superposition tools.
//! * [`gabor`]: Alltop-seeded Gabor frames with FFT apply/adjoint, plus a
//!   Gaussian baseline codebook.
//! * [`amp`]: the multiple-measurement-vector AMP inner decoder.
//! * [`ura`]: shared-dictionary (unsourced) encoder and list decoder.
//! * [`sra`]: user-specific-dictionary (sourced) joint activity detection.
//! * [`channel`]: block fading, noise and Eb/N0 bookkeeping.
//! * [`harness`]: Monte-Carlo engine, sweeps, phase transitions and the CLI
//!   plumbing.

pub mod amp;
pub mod channel;
pub mod cwcode;
pub mod error;
pub mod gabor;
pub mod galois;
pub mod harness;
pub mod sra;
pub mod ura;

pub use error::{Error, Result};

/// Complex sample type used throughout.
pub type C64 = num_complex::Complex64;

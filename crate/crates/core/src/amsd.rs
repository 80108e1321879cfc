//! Arithmetic mean and standard deviation test.
//!
//! For a binary stream the population standard deviation is fully
//! determined by the mean, `sqrt(p(1-p))`, so the verdict is a z-score on
//! the mean alone.

use serde::{Deserialize, Serialize};

use crate::bitstream::Bitstream;
use crate::error::{Error, Result};

pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmsdResult {
    pub mean: f64,
    pub std: f64,
    pub n_bits: u64,
    /// `(mean - 0.5) / (0.5 / sqrt(n_bits))`.
    pub z_mean: f64,
    pub pass: bool,
}

pub fn run_amsd(b: &Bitstream, z_threshold: f64) -> Result<AmsdResult> {
    if b.is_empty() {
        return Err(Error::EmptyInput("AMSD needs at least 1 bit"));
    }
    if !(z_threshold > 0.0) {
        return Err(Error::InvalidConfig(format!("z_threshold must be > 0, got {z_threshold}")));
    }
    let n = b.len() as f64;
    let mean = b.count_ones() as f64 / n;
    let std = (mean * (1.0 - mean)).sqrt();
    let z_mean = (mean - 0.5) / (0.5 / n.sqrt());
    Ok(AmsdResult {
        mean,
        std,
        n_bits: b.len() as u64,
        z_mean,
        pass: z_mean.abs() <= z_threshold,
    })
}

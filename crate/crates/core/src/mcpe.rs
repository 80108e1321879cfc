//! Monte Carlo pi estimation test.
//!
//! Bits are packed into bytes, bytes are mapped into `[0, 1]`, and
//! consecutive byte pairs become points in the unit square. The fraction
//! inside the quarter circle estimates `pi / 4`. A run of the reference
//! generator with the same number of points is attached for comparison.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitstream::{pack_bytes, Bitstream};
use crate::error::{Error, Result};
use crate::jsonfloat;
use crate::rng::reference_rng;

pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;
pub const MIN_BITS: usize = 16;

/// How a byte value `v` becomes a coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ByteMap {
    /// `(v + 0.5) / 256`: cell centres of a 256-level grid. The grid's hit
    /// fraction is within 1e-4 of `pi / 4`.
    #[default]
    Midpoint,
    /// `v / 255`: exact endpoints 0 and 1, but the 256x256 grid holds 51323
    /// inside points, biasing the estimate to ~3.13251.
    Endpoints,
}

impl ByteMap {
    #[inline]
    pub fn apply(self, v: u8) -> f64 {
        match self {
            ByteMap::Midpoint => (f64::from(v) + 0.5) / 256.0,
            ByteMap::Endpoints => f64::from(v) / 255.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub fn inside(&self) -> bool {
        self.x * self.x + self.y * self.y <= 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiEstimate {
    pub pi_hat: f64,
    pub n_inside: u64,
    pub n_total: u64,
    /// Binomial standard error of `pi_hat`.
    pub sigma: f64,
}

impl PiEstimate {
    pub fn from_counts(n_inside: u64, n_total: u64) -> Result<Self> {
        if n_total == 0 {
            return Err(Error::EmptyInput("pi estimation needs at least 1 point"));
        }
        assert!(n_inside <= n_total, "inside count exceeds total");
        let p = n_inside as f64 / n_total as f64;
        Ok(Self {
            pi_hat: 4.0 * n_inside as f64 / n_total as f64,
            n_inside,
            n_total,
            sigma: 4.0 * (p * (1.0 - p) / n_total as f64).sqrt(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McpeResult {
    pub device: PiEstimate,
    pub reference: PiEstimate,
    #[serde(with = "jsonfloat")]
    pub z_device: f64,
    #[serde(with = "jsonfloat")]
    pub z_reference: f64,
    pub byte_map: ByteMap,
    pub pass: bool,
}

pub fn bitstream_to_points(b: &Bitstream) -> Result<Vec<Point>> {
    bitstream_to_points_with(b, ByteMap::default())
}

pub fn bitstream_to_points_with(b: &Bitstream, map: ByteMap) -> Result<Vec<Point>> {
    if b.len() < MIN_BITS {
        return Err(Error::InsufficientBits {
            needed: MIN_BITS,
            got: b.len(),
        });
    }
    Ok(pack_bytes(b)
        .chunks_exact(2)
        .map(|pair| Point {
            x: map.apply(pair[0]),
            y: map.apply(pair[1]),
        })
        .collect())
}

pub fn estimate_pi(points: &[Point]) -> Result<PiEstimate> {
    let inside = points.iter().filter(|p| p.inside()).count();
    PiEstimate::from_counts(inside as u64, points.len() as u64)
}

/// `n` points with continuous uniform coordinates from the reference
/// generator.
pub fn reference_estimate(n: u64, seed: u64) -> Result<PiEstimate> {
    let mut rng = reference_rng(seed);
    let inside = (0..n)
        .filter(|_| {
            let p = Point {
                x: rng.random::<f64>(),
                y: rng.random::<f64>(),
            };
            p.inside()
        })
        .count();
    PiEstimate::from_counts(inside as u64, n)
}

pub(crate) fn zscore(diff: f64, sigma: f64) -> f64 {
    if sigma > 0.0 {
        diff / sigma
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

pub fn run_mcpe(b: &Bitstream, seed: u64, z_threshold: f64) -> Result<McpeResult> {
    run_mcpe_with(b, seed, z_threshold, ByteMap::default())
}

pub fn run_mcpe_with(b: &Bitstream, seed: u64, z_threshold: f64, map: ByteMap) -> Result<McpeResult> {
    if !(z_threshold > 0.0) {
        return Err(Error::InvalidConfig(format!("z_threshold must be > 0, got {z_threshold}")));
    }
    let device = estimate_pi(&bitstream_to_points_with(b, map)?)?;
    let reference = reference_estimate(device.n_total, seed)?;
    let z_device = zscore(device.pi_hat - std::f64::consts::PI, device.sigma);
    let z_reference = zscore(reference.pi_hat - std::f64::consts::PI, reference.sigma);
    Ok(McpeResult {
        pass: z_device.abs() <= z_threshold,
        device,
        reference,
        z_device,
        z_reference,
        byte_map: map,
    })
}

//! Amplitude sources: a parametric photodetector simulator and the
//! one-integer-per-line amplitude text format.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitstream::AmplitudeSeries;
use crate::error::{Error, Result};
use crate::fsutil;
use crate::rng::stream_rng;

/// Samples per independently seeded simulation chunk.
const CHUNK: usize = 1 << 16;

/// Systematic defects that can be injected into simulated amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Flaw {
    #[default]
    None,
    /// Linear baseline drift, in counts per sample.
    Drift { slope: f64 },
    /// Periodic baseline modulation.
    Sine { amplitude: f64, period: f64 },
    /// Repeats the previous emitted amplitude with probability `repeat_prob`.
    Sticky { repeat_prob: f64 },
}

impl fmt::Display for Flaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flaw::None => f.write_str("none"),
            Flaw::Drift { slope } => write!(f, "drift:{slope}"),
            Flaw::Sine { amplitude, period } => write!(f, "sine:{amplitude},{period}"),
            Flaw::Sticky { repeat_prob } => write!(f, "sticky:{repeat_prob}"),
        }
    }
}

impl FromStr for Flaw {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid number {t:?} in flaw {s:?}"))
        };
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "none" if args.is_empty() => Ok(Flaw::None),
            "drift" => Ok(Flaw::Drift { slope: num(args)? }),
            "sine" => {
                let (a, p) = args
                    .split_once(',')
                    .ok_or_else(|| format!("sine flaw needs <amp>,<period>, got {s:?}"))?;
                Ok(Flaw::Sine {
                    amplitude: num(a)?,
                    period: num(p)?,
                })
            }
            "sticky" => Ok(Flaw::Sticky { repeat_prob: num(args)? }),
            _ => Err(format!(
                "unknown flaw {s:?} (expected none|drift:<slope>|sine:<amp>,<period>|sticky:<prob>)"
            )),
        }
    }
}

/// Low-light photodetector chain: Poisson photoelectrons times a linear
/// gain, plus pedestal, Gaussian noise and an optional flaw, digitized by
/// an ADC of `adc_bits` bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub mean_photons: f64,
    pub gain: f64,
    pub pedestal: f64,
    pub noise_sigma: f64,
    pub adc_bits: u8,
    pub flaw: Flaw,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self {
            mean_photons: 10.0,
            gain: 20.0,
            pedestal: 100.0,
            noise_sigma: 2.0,
            adc_bits: 10,
            flaw: Flaw::None,
        }
    }
}

impl DetectorModel {
    pub fn adc_max(&self) -> u32 {
        (1u32 << self.adc_bits) - 1
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        let finite = [self.mean_photons, self.gain, self.pedestal, self.noise_sigma];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("model parameters must be finite".into());
        }
        if self.mean_photons < 0.0 {
            return bad(format!("mean_photons must be >= 0, got {}", self.mean_photons));
        }
        if self.gain <= 0.0 {
            return bad(format!("gain must be > 0, got {}", self.gain));
        }
        if self.pedestal < 0.0 {
            return bad(format!("pedestal must be >= 0, got {}", self.pedestal));
        }
        if self.noise_sigma < 0.0 {
            return bad(format!("noise_sigma must be >= 0, got {}", self.noise_sigma));
        }
        if !(8..=16).contains(&self.adc_bits) {
            return bad(format!("adc_bits must be in [8, 16], got {}", self.adc_bits));
        }
        let mean_signal = self.pedestal + self.gain * self.mean_photons;
        if mean_signal >= f64::from(1u32 << self.adc_bits) {
            return bad(format!(
                "mean signal {mean_signal} does not fit a {}-bit ADC",
                self.adc_bits
            ));
        }
        match self.flaw {
            Flaw::None => {}
            Flaw::Drift { slope } if !slope.is_finite() => return bad("drift slope must be finite".into()),
            Flaw::Sine { amplitude, period } if !amplitude.is_finite() || !(period > 0.0) || !period.is_finite() => {
                return bad(format!("sine flaw needs finite amplitude and period > 0, got {amplitude}, {period}"))
            }
            Flaw::Sticky { repeat_prob } if !(0.0..=1.0).contains(&repeat_prob) => {
                return bad(format!("sticky repeat_prob must be in [0, 1], got {repeat_prob}"))
            }
            _ => {}
        }
        Ok(())
    }

    fn flaw_offset(&self, index: usize) -> f64 {
        match self.flaw {
            Flaw::Drift { slope } => slope * index as f64,
            Flaw::Sine { amplitude, period } => {
                amplitude * (std::f64::consts::TAU * index as f64 / period).sin()
            }
            Flaw::None | Flaw::Sticky { .. } => 0.0,
        }
    }
}

/// Simulates `count` amplitudes. Output depends only on `(model, count,
/// seed)`: chunk `k` of the series is drawn from reference stream `k`.
pub fn simulate_amplitudes(model: &DetectorModel, count: usize, seed: u64) -> Result<AmplitudeSeries> {
    model.validate()?;
    if count == 0 {
        return Err(Error::InvalidConfig("simulation count must be at least 1".into()));
    }
    let photons = (model.mean_photons > 0.0)
        .then(|| Poisson::new(model.mean_photons).expect("validated mean"));
    let noise = (model.noise_sigma > 0.0)
        .then(|| Normal::new(0.0, model.noise_sigma).expect("validated sigma"));
    let sticky = match model.flaw {
        Flaw::Sticky { repeat_prob } => Some(repeat_prob),
        _ => None,
    };
    let max = f64::from(model.adc_max());

    let n_chunks = count.div_ceil(CHUNK);
    let chunks: Vec<Vec<(u32, bool)>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream_rng(seed, chunk as u64);
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(count);
            (start..end)
                .map(|i| {
                    let k = photons.map_or(0.0, |d| d.sample(&mut rng));
                    let eps = noise.map_or(0.0, |d| d.sample(&mut rng));
                    let repeat = sticky.is_some_and(|p| rng.random::<f64>() < p);
                    let raw = model.pedestal + model.gain * k + eps + model.flaw_offset(i);
                    // f64::round rounds half away from zero.
                    (raw.round().clamp(0.0, max) as u32, repeat)
                })
                .collect()
        })
        .collect();

    let mut values = Vec::with_capacity(count);
    for (amp, repeat) in chunks.into_iter().flatten() {
        match values.last() {
            Some(&prev) if repeat => values.push(prev),
            _ => values.push(amp),
        }
    }
    Ok(AmplitudeSeries::new(
        values,
        format!("simulated(seed={seed}, flaw={})", model.flaw),
        model.adc_bits,
    ))
}

pub fn parse_amplitudes(text: &str, path: &Path) -> Result<AmplitudeSeries> {
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('-') {
            return Err(Error::at_line(path, idx + 1, format!("negative amplitude {content}")));
        }
        let value = content
            .parse::<u32>()
            .map_err(|e| Error::at_line(path, idx + 1, format!("invalid amplitude {content:?}: {e}")))?;
        values.push(value);
    }
    let label = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(AmplitudeSeries::new(values, label, 0))
}

pub fn parse_amplitude_file(path: impl AsRef<Path>) -> Result<AmplitudeSeries> {
    let path = path.as_ref();
    let bytes = fsutil::read_all(path)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Error::at_byte(path, e.valid_up_to(), "file is not valid UTF-8"))?;
    parse_amplitudes(text, path)
}

pub fn format_amplitudes(a: &AmplitudeSeries) -> String {
    let mut out = String::with_capacity(a.len() * 5);
    for v in &a.values {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

pub fn write_amplitude_file(a: &AmplitudeSeries, path: impl AsRef<Path>) -> Result<()> {
    fsutil::write_atomic(path.as_ref(), format_amplitudes(a).as_bytes())
}

//! Randomness-quality toolkit for photon-counting hardware random number
//! generators.
//!
//! The pipeline is: amplitude series (simulated or read from a text dump)
//! → bit extraction (High/Low or Even/Odd) → quality tests (AMSD, MCPE,
//! fractional line symmetry) → JSON report and pixmap visualizations.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amsd;
pub mod bitstream;
pub mod cli;
pub mod error;
pub mod fls;
mod fsutil;
mod jsonfloat;
pub mod mcpe;
pub mod report;
pub mod rng;
pub mod sources;
pub mod visualize;

pub use amsd::{run_amsd, AmsdResult};
pub use bitstream::{
    extract_even_odd, extract_high_low, pack_bytes, read_bitstream_file, write_bitstream_file,
    AmplitudeSeries, BitFormat, Bitstream,
};
pub use error::{Error, Result};
pub use fls::{
    count_horizontal, count_lines, count_vertical, expected_lines, ln_series, pad_length,
    rotate_ccw, run_fls, stack, unstack, Cell, FlsConfig, FlsResult, LineCount, LnSeries,
    Orientation, PaddedSquare, Symbol,
};
pub use mcpe::{bitstream_to_points, estimate_pi, run_mcpe, ByteMap, McpeResult, PiEstimate, Point};
pub use report::{run_suite, to_json, SuiteConfig, TestKind, TestReport};
pub use sources::{parse_amplitude_file, simulate_amplitudes, write_amplitude_file, DetectorModel, Flaw};
pub use visualize::{render_line_overlay, render_square, Overlay, RenderSpec};

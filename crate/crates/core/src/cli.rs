//! The `fls` command line: simulate, extract, test, visualize, expected.
//!
//! Exit codes: 0 success, 1 the test suite ran and failed, 2 usage, I/O or
//! format error. Output files are published atomically and only on
//! success.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bitstream::{extract_even_odd, extract_high_low, read_bitstream_file, write_bitstream_file, BitFormat};
use crate::error::Error;
use crate::fls::{self, Orientation, Symbol};
use crate::fsutil;
use crate::report::{run_suite, to_json, Outcome, SuiteConfig, TestKind, TestReport};
use crate::sources::{parse_amplitude_file, simulate_amplitudes, write_amplitude_file, DetectorModel, Flaw};
use crate::visualize::{render, Overlay, RenderSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "fls", version, about = "Bit extraction and randomness-quality tests for photon-counting RNG data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate detector amplitudes and write them as text
    Simulate(SimulateArgs),
    /// Turn an amplitude file into a bitstream file
    Extract(ExtractArgs),
    /// Run AMSD, MCPE and FLS on a bitstream and write a JSON report
    Test(TestArgs),
    /// Render a bitstream (optionally with a line overlay) as a P6 pixmap
    Visualize(VisualizeArgs),
    /// Print the expected fractional line count for uniform random bits
    Expected(ExpectedArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Mean photoelectrons per pulse
    #[arg(long, default_value_t = 10.0)]
    lambda: f64,
    #[arg(long, default_value_t = 20.0)]
    gain: f64,
    #[arg(long, default_value_t = 100.0)]
    pedestal: f64,
    #[arg(long, default_value_t = 2.0)]
    noise: f64,
    #[arg(long, default_value_t = 10)]
    adc_bits: u8,
    /// none | drift:<slope> | sine:<amp>,<period> | sticky:<prob>
    #[arg(long, default_value = "none")]
    flaw: Flaw,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Evenodd,
    Highlow,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Ascii,
    Packed,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "ascii")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct TestArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated subset of amsd,mcpe,fls
    #[arg(long, value_delimiter = ',', default_value = "amsd,mcpe,fls")]
    tests: Vec<TestKind>,
    /// Detect lengths as a range `a..b` (inclusive) or a comma list
    #[arg(long, default_value = "1..8", value_parser = parse_lengths)]
    detect_lengths: DetectLengths,
    #[arg(long, default_value_t = fls::DEFAULT_REPLICAS)]
    mc_replicas: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4.0)]
    z: f64,
    /// Extraction method recorded in the report metadata
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    json: PathBuf,
}

#[derive(Args, Debug)]
struct VisualizeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, requires = "detect_length")]
    overlay: Option<Symbol>,
    #[arg(long)]
    detect_length: Option<usize>,
    #[arg(long, default_value = "horizontal")]
    orientation: Orientation,
    #[arg(long, default_value_t = 1)]
    scale: usize,
}

#[derive(Args, Debug)]
struct ExpectedArgs {
    #[arg(long)]
    detect_length: usize,
    #[arg(long)]
    bits: usize,
}

#[derive(Clone, Debug)]
struct DetectLengths(Vec<usize>);

fn parse_lengths(s: &str) -> Result<DetectLengths, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("invalid detect length {t:?}"));
    let lengths: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (lo, hi) = (parse(a)?, parse(b.trim_start_matches('='))?);
        if lo > hi {
            return Err(format!("empty detect-length range {s:?}"));
        }
        (lo..=hi).collect()
    } else {
        s.split(',').map(parse).collect::<Result<_, _>>()?
    };
    if lengths.contains(&0) {
        return Err("detect lengths must be >= 1".into());
    }
    Ok(DetectLengths(lengths))
}

/// Failure modes of a subcommand.
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a, out),
        Command::Extract(a) => extract(a, out),
        Command::Test(a) => test(a, out),
        Command::Visualize(a) => visualize(a, out),
        Command::Expected(a) => expected(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let model = DetectorModel {
        mean_photons: a.lambda,
        gain: a.gain,
        pedestal: a.pedestal,
        noise_sigma: a.noise,
        adc_bits: a.adc_bits,
        flaw: a.flaw,
    };
    let series = simulate_amplitudes(&model, a.count, a.seed)?;
    write_amplitude_file(&series, &a.out)?;
    let _ = writeln!(out, "wrote {} amplitudes to {}", series.len(), a.out.display());
    Ok(EXIT_OK)
}

fn extract(a: ExtractArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let amps = parse_amplitude_file(&a.input)?;
    let bits = match a.method {
        Method::Evenodd => extract_even_odd(&amps)?,
        Method::Highlow => extract_high_low(&amps)?,
    };
    let format = match a.format {
        FormatArg::Ascii => BitFormat::Ascii,
        FormatArg::Packed => BitFormat::Packed,
    };
    write_bitstream_file(&bits, &a.out, format)?;
    let _ = writeln!(out, "wrote {} bits to {}", bits.len(), a.out.display());
    Ok(EXIT_OK)
}

fn test(a: TestArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let bits = read_bitstream_file(&a.input)?;
    let mut cfg = SuiteConfig::default().with_seed(a.seed).with_z_threshold(a.z);
    cfg.enabled = a.tests.clone();
    cfg.enabled.sort_unstable();
    cfg.enabled.dedup();
    cfg.fls.n_set = a.detect_lengths.0.clone();
    cfg.fls.mc_replicas = a.mc_replicas;
    let label = a
        .input
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let report = run_suite(&bits, &cfg)?.with_source(label, a.method.clone().unwrap_or_default());
    fsutil::write_atomic(&a.json, to_json(&report).as_bytes())?;
    let _ = out.write_all(summary(&report).as_bytes());
    Ok(if report.overall_pass { EXIT_OK } else { EXIT_FAIL })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Human-readable summary of a report.
pub fn summary(r: &TestReport) -> String {
    let mut s = format!("bitstream: {} ({} bits)\n", r.meta.source_label, r.meta.bit_length);
    match &r.amsd {
        Some(Outcome::Ran(a)) => {
            s += &format!("AMSD  {}  mean={:.6} std={:.6} z={:.3}\n", verdict(a.pass), a.mean, a.std, a.z_mean)
        }
        Some(Outcome::Failed { error }) => s += &format!("AMSD  ERROR {error}\n"),
        None => {}
    }
    match &r.mcpe {
        Some(Outcome::Ran(m)) => {
            s += &format!(
                "MCPE  {}  pi={:.6} (z={:.3}, {} points) reference pi={:.6}\n",
                verdict(m.pass),
                m.device.pi_hat,
                m.z_device,
                m.device.n_total,
                m.reference.pi_hat
            )
        }
        Some(Outcome::Failed { error }) => s += &format!("MCPE  ERROR {error}\n"),
        None => {}
    }
    match &r.fls {
        Some(Outcome::Ran(f)) => {
            s += &format!("FLS   {}\n", verdict(f.pass));
            for e in &f.entries {
                s += &format!(
                    "  {:<4} n={:<2} H={:<12} V={:<12} E={:<12.2} z_h={:>8.2} z_v={:>8.2} z_sym={:>8.2} {}\n",
                    format!("{:?}", e.symbol).to_lowercase(),
                    e.detect_length,
                    e.horizontal.count,
                    e.vertical.count,
                    e.expected,
                    e.z_h,
                    e.z_v,
                    e.z_symmetry,
                    verdict(e.pass)
                );
            }
        }
        Some(Outcome::Failed { error }) => s += &format!("FLS   ERROR {error}\n"),
        None => {}
    }
    s += &format!("overall: {}\n", verdict(r.overall_pass));
    s
}

fn visualize(a: VisualizeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let bits = read_bitstream_file(&a.input)?;
    let overlay = match (a.overlay, a.detect_length) {
        (Some(symbol), Some(n)) => Some(Overlay {
            symbol,
            detect_length: n,
            orientation: a.orientation,
        }),
        (None, Some(_)) => return Err(Failure::Usage("--detect-length requires --overlay".into())),
        _ => None,
    };
    let image = render(&bits, &RenderSpec { scale: a.scale, overlay })?;
    fsutil::write_atomic(&a.out, &image)?;
    let _ = writeln!(out, "wrote {}", a.out.display());
    Ok(EXIT_OK)
}

fn expected(a: ExpectedArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let value = fls::expected_lines(a.detect_length, a.bits)?;
    let _ = writeln!(out, "{value}");
    Ok(EXIT_OK)
}

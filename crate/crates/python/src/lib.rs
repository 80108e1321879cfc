//! Python bindings for `fls-core`.
//!
//! Structured results (AMSD, MCPE, FLS, suite reports) cross the boundary
//! as the same JSON documents the CLI writes, decoded into Python dicts.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use fls_core::bitstream::{encode_bitstream, BitFormat};
use fls_core::{self as core, Error};

create_exception!(fls_py, FlsError, PyException);

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        Error::Format { .. } => FlsError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(PyValueError::new_err)
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "Bitstream", module = "fls_py", skip_from_py_object)]
#[derive(Clone)]
pub struct PyBitstream {
    inner: core::Bitstream,
}

#[pymethods]
impl PyBitstream {
    #[new]
    fn new(bits: Vec<u8>) -> PyResult<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(PyValueError::new_err("bits must be 0 or 1"));
        }
        Ok(Self {
            inner: core::Bitstream::from_bits(&bits),
        })
    }

    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        core::read_bitstream_file(path)
            .map(|inner| Self { inner })
            .map_err(to_py_err)
    }

    /// `format` is "ascii" or "packed".
    #[pyo3(signature = (path, format = "ascii"))]
    fn write(&self, path: &str, format: &str) -> PyResult<()> {
        core::write_bitstream_file(&self.inner, path, parse(format)?).map_err(to_py_err)
    }

    #[pyo3(signature = (format = "packed"))]
    fn encode<'py>(&self, py: Python<'py>, format: &str) -> PyResult<Bound<'py, PyBytes>> {
        let format: BitFormat = parse(format)?;
        Ok(PyBytes::new(py, &encode_bitstream(&self.inner, format)))
    }

    fn to_bits(&self) -> Vec<u8> {
        self.inner.to_bits()
    }

    fn count_ones(&self) -> usize {
        self.inner.count_ones()
    }

    fn complement(&self) -> Self {
        Self {
            inner: self.inner.complement(),
        }
    }

    /// Whole bytes, MSB-first; a trailing partial byte is dropped.
    fn pack_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &core::pack_bytes(&self.inner))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyfunction]
fn reference_bits(len: usize, seed: u64) -> PyBitstream {
    PyBitstream {
        inner: core::rng::reference_bits(len, seed),
    }
}

#[pyfunction]
#[pyo3(signature = (count, seed, mean_photons = 10.0, gain = 20.0, pedestal = 100.0, noise_sigma = 2.0, adc_bits = 10, flaw = "none"))]
#[allow(clippy::too_many_arguments)]
fn simulate_amplitudes(
    count: usize,
    seed: u64,
    mean_photons: f64,
    gain: f64,
    pedestal: f64,
    noise_sigma: f64,
    adc_bits: u8,
    flaw: &str,
) -> PyResult<Vec<u32>> {
    let model = core::DetectorModel {
        mean_photons,
        gain,
        pedestal,
        noise_sigma,
        adc_bits,
        flaw: parse(flaw)?,
    };
    core::simulate_amplitudes(&model, count, seed)
        .map(|a| a.values)
        .map_err(to_py_err)
}

#[pyfunction]
fn read_amplitudes(path: &str) -> PyResult<Vec<u32>> {
    core::parse_amplitude_file(path).map(|a| a.values).map_err(to_py_err)
}

#[pyfunction]
fn write_amplitudes(values: Vec<u32>, path: &str) -> PyResult<()> {
    core::write_amplitude_file(&values.into(), path).map_err(to_py_err)
}

#[pyfunction]
fn extract_even_odd(amplitudes: Vec<u32>) -> PyResult<PyBitstream> {
    core::extract_even_odd(&amplitudes.into())
        .map(|inner| PyBitstream { inner })
        .map_err(to_py_err)
}

#[pyfunction]
fn extract_high_low(amplitudes: Vec<u32>) -> PyResult<PyBitstream> {
    core::extract_high_low(&amplitudes.into())
        .map(|inner| PyBitstream { inner })
        .map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (bits, z_threshold = 4.0))]
fn run_amsd<'py>(py: Python<'py>, bits: &PyBitstream, z_threshold: f64) -> PyResult<Bound<'py, PyAny>> {
    let r = core::run_amsd(&bits.inner, z_threshold).map_err(to_py_err)?;
    json_to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (bits, seed = 0, z_threshold = 4.0))]
fn run_mcpe<'py>(py: Python<'py>, bits: &PyBitstream, seed: u64, z_threshold: f64) -> PyResult<Bound<'py, PyAny>> {
    let r = core::run_mcpe(&bits.inner, seed, z_threshold).map_err(to_py_err)?;
    json_to_py(py, &r)
}

#[pyfunction]
fn count_horizontal(bits: &PyBitstream, symbol: &str, n: usize) -> PyResult<f64> {
    core::count_horizontal(&bits.inner, parse(symbol)?, n)
        .map(|c| c.count)
        .map_err(to_py_err)
}

#[pyfunction]
fn count_vertical(bits: &PyBitstream, symbol: &str, n: usize) -> PyResult<f64> {
    core::count_vertical(&bits.inner, parse(symbol)?, n)
        .map(|c| c.count)
        .map_err(to_py_err)
}

#[pyfunction]
fn expected_lines(n: usize, length: usize) -> PyResult<f64> {
    core::expected_lines(n, length).map_err(to_py_err)
}

#[pyfunction]
fn pad_length(length: usize) -> PyResult<usize> {
    core::pad_length(length).map_err(to_py_err)
}

/// `[(n, L_n, L'_n or None), ...]` for n = 1..=n_max.
#[pyfunction]
#[pyo3(signature = (bits, n_max, symbol = "one"))]
fn ln_series(bits: &PyBitstream, n_max: usize, symbol: &str) -> PyResult<Vec<(usize, f64, Option<f64>)>> {
    let s = core::ln_series(&bits.inner, n_max, parse(symbol)?).map_err(to_py_err)?;
    Ok(s.entries.into_iter().map(|e| (e.n, e.l_n, e.l_prime)).collect())
}

#[pyfunction]
#[pyo3(signature = (bits, n_set = None, symbols = None, mc_replicas = 100, seed = 0, z_threshold = 4.0))]
fn run_fls<'py>(
    py: Python<'py>,
    bits: &PyBitstream,
    n_set: Option<Vec<usize>>,
    symbols: Option<Vec<String>>,
    mc_replicas: usize,
    seed: u64,
    z_threshold: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = core::FlsConfig {
        mc_replicas,
        seed,
        z_threshold,
        ..Default::default()
    };
    if let Some(n_set) = n_set {
        cfg.n_set = n_set;
    }
    if let Some(symbols) = symbols {
        cfg.symbols = symbols.iter().map(|s| parse(s)).collect::<PyResult<_>>()?;
    }
    let r = core::run_fls(&bits.inner, &cfg).map_err(to_py_err)?;
    json_to_py(py, &r)
}

/// Runs the enabled tests and returns the canonical JSON report text.
#[pyfunction]
#[pyo3(signature = (bits, seed = 0, z_threshold = 4.0, tests = None, mc_replicas = 100, source_label = "", method = ""))]
#[allow(clippy::too_many_arguments)]
fn run_suite(
    bits: &PyBitstream,
    seed: u64,
    z_threshold: f64,
    tests: Option<Vec<String>>,
    mc_replicas: usize,
    source_label: &str,
    method: &str,
) -> PyResult<String> {
    let mut cfg = core::SuiteConfig::default().with_seed(seed).with_z_threshold(z_threshold);
    cfg.fls.mc_replicas = mc_replicas;
    if let Some(tests) = tests {
        cfg.enabled = tests.iter().map(|t| parse(t)).collect::<PyResult<_>>()?;
    }
    let report = core::run_suite(&bits.inner, &cfg).map_err(to_py_err)?;
    Ok(core::to_json(&report.with_source(source_label, method)))
}

/// P6 pixmap of the stacked stream, optionally with a line overlay.
#[pyfunction]
#[pyo3(signature = (bits, scale = 1, overlay = None, detect_length = 2, orientation = "horizontal"))]
fn render<'py>(
    py: Python<'py>,
    bits: &PyBitstream,
    scale: usize,
    overlay: Option<&str>,
    detect_length: usize,
    orientation: &str,
) -> PyResult<Bound<'py, PyBytes>> {
    let overlay = match overlay {
        Some(symbol) => Some(core::Overlay {
            symbol: parse(symbol)?,
            detect_length,
            orientation: parse(orientation)?,
        }),
        None => None,
    };
    let image = core::visualize::render(&bits.inner, &core::RenderSpec { scale, overlay }).map_err(to_py_err)?;
    Ok(PyBytes::new(py, &image))
}

#[pymodule]
fn fls_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}

/// Adds every class and function to `m`; lets embedders build the module by hand.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FlsError", m.py().get_type::<FlsError>())?;
    m.add_class::<PyBitstream>()?;
    m.add_function(wrap_pyfunction!(reference_bits, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_amplitudes, m)?)?;
    m.add_function(wrap_pyfunction!(read_amplitudes, m)?)?;
    m.add_function(wrap_pyfunction!(write_amplitudes, m)?)?;
    m.add_function(wrap_pyfunction!(extract_even_odd, m)?)?;
    m.add_function(wrap_pyfunction!(extract_high_low, m)?)?;
    m.add_function(wrap_pyfunction!(run_amsd, m)?)?;
    m.add_function(wrap_pyfunction!(run_mcpe, m)?)?;
    m.add_function(wrap_pyfunction!(count_horizontal, m)?)?;
    m.add_function(wrap_pyfunction!(count_vertical, m)?)?;
    m.add_function(wrap_pyfunction!(expected_lines, m)?)?;
    m.add_function(wrap_pyfunction!(pad_length, m)?)?;
    m.add_function(wrap_pyfunction!(ln_series, m)?)?;
    m.add_function(wrap_pyfunction!(run_fls, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    Ok(())
}

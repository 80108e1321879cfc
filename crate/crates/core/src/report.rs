//! Test-suite orchestration and the canonical JSON report.
//!
//! The report is a JSON object with top-level keys `meta`, `amsd`, `mcpe`,
//! `fls` and `overall_pass`; disabled tests are omitted. A test that could
//! not run (for example a stream too short for MCPE) appears as
//! `{"error": "..."}`. Keys are sorted and floats carry at most 12
//! significant digits, so equal inputs give byte-identical documents.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::amsd::{self, run_amsd, AmsdResult};
use crate::bitstream::Bitstream;
use crate::error::{Error, Result};
use crate::fls::{run_fls, FlsConfig, FlsResult};
use crate::mcpe::{self, run_mcpe_with, ByteMap, McpeResult};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Amsd,
    Mcpe,
    Fls,
}

impl TestKind {
    pub const ALL: [TestKind; 3] = [TestKind::Amsd, TestKind::Mcpe, TestKind::Fls];
}

impl std::str::FromStr for TestKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "amsd" => Ok(TestKind::Amsd),
            "mcpe" => Ok(TestKind::Mcpe),
            "fls" => Ok(TestKind::Fls),
            other => Err(format!("unknown test {other:?} (expected amsd|mcpe|fls)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmsdConfig {
    pub z_threshold: f64,
}

impl Default for AmsdConfig {
    fn default() -> Self {
        Self {
            z_threshold: amsd::DEFAULT_Z_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McpeConfig {
    pub seed: u64,
    pub z_threshold: f64,
    pub byte_map: ByteMap,
}

impl Default for McpeConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            z_threshold: mcpe::DEFAULT_Z_THRESHOLD,
            byte_map: ByteMap::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub amsd: AmsdConfig,
    pub mcpe: McpeConfig,
    pub fls: FlsConfig,
    pub enabled: Vec<TestKind>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            amsd: AmsdConfig::default(),
            mcpe: McpeConfig::default(),
            fls: FlsConfig::default(),
            enabled: TestKind::ALL.to_vec(),
        }
    }
}

impl SuiteConfig {
    /// Uses `seed` for both the MCPE reference run and the FLS replicas.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.mcpe.seed = seed;
        self.fls.seed = seed;
        self
    }

    pub fn with_z_threshold(mut self, z: f64) -> Self {
        self.amsd.z_threshold = z;
        self.mcpe.z_threshold = z;
        self.fls.z_threshold = z;
        self
    }

    pub fn is_enabled(&self, kind: TestKind) -> bool {
        self.enabled.contains(&kind)
    }

    pub fn validate(&self) -> Result<()> {
        if self.enabled.is_empty() {
            return Err(Error::InvalidConfig("at least one test must be enabled".into()));
        }
        for (name, z) in [("amsd", self.amsd.z_threshold), ("mcpe", self.mcpe.z_threshold)] {
            if !(z > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} z_threshold must be > 0, got {z}")));
            }
        }
        self.fls.validate()
    }
}

/// Outcome of one test: its result, or the reason it could not run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome<T> {
    Ran(T),
    Failed { error: String },
}

impl<T> Outcome<T> {
    fn from_result(r: Result<T>) -> Self {
        match r {
            Ok(v) => Outcome::Ran(v),
            Err(e) => Outcome::Failed { error: e.to_string() },
        }
    }

    pub fn result(&self) -> Option<&T> {
        match self {
            Outcome::Ran(v) => Some(v),
            Outcome::Failed { .. } => None,
        }
    }
}

trait Verdict {
    fn passed(&self) -> bool;
}

impl Verdict for AmsdResult {
    fn passed(&self) -> bool {
        self.pass
    }
}

impl Verdict for McpeResult {
    fn passed(&self) -> bool {
        self.pass
    }
}

impl Verdict for FlsResult {
    fn passed(&self) -> bool {
        self.pass
    }
}

fn outcome_passed<T: Verdict>(o: &Option<Outcome<T>>) -> bool {
    match o {
        None => true,
        Some(Outcome::Ran(r)) => r.passed(),
        Some(Outcome::Failed { .. }) => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub source_label: String,
    pub extraction_method: String,
    pub bit_length: u64,
    pub tool_version: String,
    pub config: SuiteConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub meta: ReportMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amsd: Option<Outcome<AmsdResult>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcpe: Option<Outcome<McpeResult>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fls: Option<Outcome<FlsResult>>,
    pub overall_pass: bool,
}

impl TestReport {
    pub fn with_source(mut self, label: impl Into<String>, method: impl Into<String>) -> Self {
        self.meta.source_label = label.into();
        self.meta.extraction_method = method.into();
        self
    }

    pub fn amsd_result(&self) -> Option<&AmsdResult> {
        self.amsd.as_ref().and_then(Outcome::result)
    }

    pub fn mcpe_result(&self) -> Option<&McpeResult> {
        self.mcpe.as_ref().and_then(Outcome::result)
    }

    pub fn fls_result(&self) -> Option<&FlsResult> {
        self.fls.as_ref().and_then(Outcome::result)
    }

    /// Conjunction of the enabled tests' verdicts; a test that errored
    /// counts as failed.
    pub fn compute_overall(&self) -> bool {
        outcome_passed(&self.amsd) && outcome_passed(&self.mcpe) && outcome_passed(&self.fls)
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Runs every enabled test on `b`. Tests run concurrently; each one is
/// deterministic, so the report depends only on `(b, cfg)`.
pub fn run_suite(b: &Bitstream, cfg: &SuiteConfig) -> Result<TestReport> {
    cfg.validate()?;
    let ((amsd, mcpe), fls) = rayon::join(
        || {
            rayon::join(
                || cfg.is_enabled(TestKind::Amsd).then(|| run_amsd(b, cfg.amsd.z_threshold)),
                || {
                    cfg.is_enabled(TestKind::Mcpe)
                        .then(|| run_mcpe_with(b, cfg.mcpe.seed, cfg.mcpe.z_threshold, cfg.mcpe.byte_map))
                },
            )
        },
        || cfg.is_enabled(TestKind::Fls).then(|| run_fls(b, &cfg.fls)),
    );
    let mut report = TestReport {
        meta: ReportMeta {
            source_label: String::new(),
            extraction_method: String::new(),
            bit_length: b.len() as u64,
            tool_version: TOOL_VERSION.to_string(),
            config: cfg.clone(),
        },
        amsd: amsd.map(Outcome::from_result),
        mcpe: mcpe.map(Outcome::from_result),
        fls: fls.map(Outcome::from_result),
        overall_pass: false,
    };
    report.overall_pass = report.compute_overall();
    Ok(report)
}

fn round_significant(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v)
        .parse()
        .expect("formatted float parses")
}

fn canonicalize(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => map.values_mut().for_each(canonicalize),
        _ => {}
    }
}

/// Canonical pretty-printed JSON, newline-terminated.
pub fn to_json(r: &TestReport) -> String {
    let mut value = serde_json::to_value(r).expect("report serializes");
    canonicalize(&mut value);
    // serde_json's default map is a BTreeMap, so keys come out sorted.
    let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::reference_bits;
    use proptest::prelude::*;

    fn quick_config() -> SuiteConfig {
        let mut cfg = SuiteConfig::default().with_seed(3);
        cfg.fls.mc_replicas = 10;
        cfg
    }

    #[test]
    fn serialization_is_stable() {
        let b = reference_bits(4096, 1);
        let r = run_suite(&b, &quick_config()).unwrap().with_source("unit", "reference");
        let a = to_json(&r);
        assert_eq!(a, to_json(&r));
        assert_eq!(a, to_json(&run_suite(&b, &quick_config()).unwrap().with_source("unit", "reference")));
        let v: Value = serde_json::from_str(&a).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["amsd", "fls", "mcpe", "meta", "overall_pass"]);
    }

    #[test]
    fn disabled_tests_are_omitted() {
        let mut cfg = quick_config();
        cfg.enabled = vec![TestKind::Amsd, TestKind::Mcpe];
        let r = run_suite(&reference_bits(512, 2), &cfg).unwrap();
        let text = to_json(&r);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert!(v.get("fls").is_none());
        assert!(v.get("amsd").is_some());
        cfg.enabled.clear();
        assert!(matches!(run_suite(&reference_bits(512, 2), &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn per_test_errors_are_reported() {
        // 32 bits: enough for AMSD and MCPE, too short for FLS.
        let r = run_suite(&reference_bits(32, 2), &quick_config()).unwrap();
        assert!(matches!(r.fls, Some(Outcome::Failed { .. })));
        assert!(r.amsd_result().is_some());
        assert!(!r.overall_pass);
        let text = to_json(&r);
        assert!(text.contains("\"error\": \"insufficient bits"));
        assert_eq!(TestReport::from_json(&text).unwrap().fls, r.fls);
    }

    #[test]
    fn json_round_trip_keeps_numbers() {
        let r = run_suite(&Bitstream::zeros(2048), &quick_config()).unwrap();
        let back = TestReport::from_json(&to_json(&r)).unwrap();
        assert_eq!(back.overall_pass, r.overall_pass);
        let (a, b) = (r.fls_result().unwrap(), back.fls_result().unwrap());
        for (x, y) in a.entries.iter().zip(&b.entries) {
            for (u, v) in [(x.expected, y.expected), (x.mc_sigma, y.mc_sigma), (x.z_h, y.z_h), (x.z_symmetry, y.z_symmetry)] {
                assert!(u == v || ((u - v) / u).abs() < 1e-11, "{u} vs {v}");
            }
        }
        let (a, b) = (r.mcpe_result().unwrap(), back.mcpe_result().unwrap());
        assert_eq!(a.z_device, b.z_device);
        assert!(a.z_device.is_infinite());
        assert_eq!(to_json(&back), to_json(&r));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn significant_digit_rounding() {
        assert_eq!(round_significant(std::f64::consts::PI), 3.14159265359);
        assert_eq!(round_significant(0.1), 0.1);
        assert_eq!(round_significant(-1234567.891234567), -1234567.89123);
        assert_eq!(round_significant(0.0), 0.0);
    }

    fn fake_report(verdicts: [Option<Option<bool>>; 3]) -> TestReport {
        let amsd = verdicts[0].map(|v| match v {
            Some(pass) => Outcome::Ran(AmsdResult { mean: 0.5, std: 0.5, n_bits: 1, z_mean: 0.0, pass }),
            None => Outcome::Failed { error: "x".into() },
        });
        let mut r = run_suite(&reference_bits(128, 0), &SuiteConfig { enabled: vec![TestKind::Amsd], ..quick_config() }).unwrap();
        r.amsd = amsd;
        let fls_base = run_fls(&reference_bits(128, 0), &quick_config().fls).unwrap();
        r.fls = verdicts[2].map(|v| match v {
            Some(pass) => Outcome::Ran(FlsResult { pass, ..fls_base.clone() }),
            None => Outcome::Failed { error: "y".into() },
        });
        let mcpe_base = run_mcpe_with(&reference_bits(128, 0), 0, 4.0, ByteMap::Midpoint).unwrap();
        r.mcpe = verdicts[1].map(|v| match v {
            Some(pass) => Outcome::Ran(McpeResult { pass, ..mcpe_base.clone() }),
            None => Outcome::Failed { error: "z".into() },
        });
        r
    }

    fn verdict() -> impl Strategy<Value = Option<Option<bool>>> {
        prop::option::of(prop::option::of(any::<bool>()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn overall_is_conjunction(a in verdict(), m in verdict(), f in verdict()) {
            let r = fake_report([a, m, f]);
            let want = [a, m, f].iter().all(|v| match v {
                None => true,
                Some(Some(pass)) => *pass,
                Some(None) => false,
            });
            prop_assert_eq!(r.compute_overall(), want);
        }
    }
}

//! Fractional line symmetry (FLS) test.
//!
//! A *line* is a run of at least `n` identical bits (`n` is the detect
//! length). A maximal run of length `r >= n` contributes `r / n` lines: one
//! full line plus `1/n` for every extra bit. Counting is done once along
//! the stream (horizontal) and once down the columns of the stream folded
//! into a square (vertical). For uniform random bits both counts should
//! match each other and the expected density
//!
//! ```text
//! lines(n, L) = (n + 1) / (2^(n+1) * n) * L
//! ```
//!
//! Counts are tracked exactly as the number of symbol cells lying in
//! qualifying runs ("covered" cells); the fractional count is `covered / n`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitstream::Bitstream;
use crate::error::{Error, Result};
use crate::jsonfloat;
use crate::mcpe::zscore;
use crate::rng::{random_bits, stream_rng};

pub const MIN_BITS: usize = 64;
pub const DEFAULT_REPLICAS: usize = 100;
pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;
pub const DEFAULT_MAX_DETECT_LENGTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symbol {
    Zero,
    One,
}

impl Symbol {
    pub const BOTH: [Symbol; 2] = [Symbol::Zero, Symbol::One];

    #[inline]
    pub fn bit(self) -> bool {
        self == Symbol::One
    }
}

impl std::str::FromStr for Symbol {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "zero" | "0" => Ok(Symbol::Zero),
            "one" | "1" => Ok(Symbol::One),
            other => Err(format!("unknown symbol {other:?} (expected zero|one)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl std::str::FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "horizontal" => Ok(Orientation::Horizontal),
            "vertical" => Ok(Orientation::Vertical),
            other => Err(format!("unknown orientation {other:?} (expected horizontal|vertical)")),
        }
    }
}

/// One cell of a stacked square. `Nothing` is padding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Zero,
    One,
    Nothing,
}

impl Cell {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Cell::One
        } else {
            Cell::Zero
        }
    }

    pub fn symbol(self) -> Option<Symbol> {
        match self {
            Cell::Zero => Some(Symbol::Zero),
            Cell::One => Some(Symbol::One),
            Cell::Nothing => None,
        }
    }
}

/// Square grid of cells, row-major. Squares built by [`stack`] have all
/// padding at the end; rotated squares need not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedSquare {
    side: usize,
    cells: Vec<Cell>,
    real_bits: usize,
}

impl PaddedSquare {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn real_bits(&self) -> usize {
        self.real_bits
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> Cell {
        self.cells[row * self.side + col]
    }
}

fn ceil_sqrt(len: usize) -> usize {
    debug_assert!(len >= 1);
    (len - 1).isqrt() + 1
}

/// Smallest perfect square holding `len` bits.
pub fn pad_length(len: usize) -> Result<usize> {
    if len == 0 {
        return Err(Error::InvalidLength(len));
    }
    let side = ceil_sqrt(len);
    Ok(side * side)
}

/// Folds the stream row-major into a `ceil(sqrt(len))` square, padding the
/// tail with `Nothing`.
pub fn stack(b: &Bitstream) -> Result<PaddedSquare> {
    let total = pad_length(b.len()).map_err(|_| Error::EmptyInput("cannot stack an empty bitstream"))?;
    let mut cells: Vec<Cell> = b.iter().map(Cell::from_bit).collect();
    cells.resize(total, Cell::Nothing);
    Ok(PaddedSquare {
        side: ceil_sqrt(b.len()),
        cells,
        real_bits: b.len(),
    })
}

/// Rotates 90 degrees counterclockwise: `out[r][c] = in[c][m-1-r]`.
pub fn rotate_ccw(s: &PaddedSquare) -> PaddedSquare {
    let m = s.side;
    let mut cells = Vec::with_capacity(m * m);
    for r in 0..m {
        for c in 0..m {
            cells.push(s.get(c, m - 1 - r));
        }
    }
    PaddedSquare {
        side: m,
        cells,
        real_bits: s.real_bits,
    }
}

/// Row-major read of every cell, padding included.
pub fn unstack(s: &PaddedSquare) -> Vec<Cell> {
    s.cells.clone()
}

fn check_detect_length(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidDetectLength(n))
    } else {
        Ok(())
    }
}

/// Symbol cells lying in maximal runs of length `>= n`, with `Nothing`
/// cells skipped entirely.
fn covered_in_cells(cells: &[Cell], symbol: Symbol, n: usize) -> u64 {
    let mut covered = 0u64;
    let mut run = 0u64;
    for cell in cells.iter().filter_map(|c| c.symbol()) {
        if cell == symbol {
            run += 1;
        } else {
            if run >= n as u64 {
                covered += run;
            }
            run = 0;
        }
    }
    if run >= n as u64 {
        covered += run;
    }
    covered
}

/// Fractional line count over a cell sequence.
pub fn count_lines(cells: &[Cell], symbol: Symbol, n: usize) -> Result<f64> {
    check_detect_length(n)?;
    Ok(covered_in_cells(cells, symbol, n) as f64 / n as f64)
}

/// Covered-cell totals for each detect length in `lengths`, from a single
/// pass over the runs of `b`.
fn covered_for_lengths(b: &Bitstream, symbol: Symbol, lengths: &[usize]) -> Vec<u64> {
    let mut covered = vec![0u64; lengths.len()];
    let target = symbol.bit();
    for (bit, run) in b.runs() {
        if bit != target {
            continue;
        }
        for (acc, &n) in covered.iter_mut().zip(lengths) {
            if run >= n {
                *acc += run as u64;
            }
        }
    }
    covered
}

/// Result of one line search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineCount {
    pub symbol: Symbol,
    pub detect_length: usize,
    pub orientation: Orientation,
    /// Symbol cells inside counted lines; always `count * detect_length`.
    pub covered: u64,
    pub count: f64,
}

impl LineCount {
    fn new(symbol: Symbol, n: usize, orientation: Orientation, covered: u64) -> Self {
        Self {
            symbol,
            detect_length: n,
            orientation,
            covered,
            count: covered as f64 / n as f64,
        }
    }
}

/// The stream as seen by the vertical scan: columns of the stacked square
/// from right to left, each top to bottom, padding skipped. This is the
/// row-major read of the square rotated counterclockwise.
pub fn vertical_order(b: &Bitstream) -> Bitstream {
    if b.is_empty() {
        return Bitstream::new();
    }
    let m = ceil_sqrt(b.len());
    let mut out = Bitstream::with_capacity(b.len());
    for col in (0..m).rev() {
        out.extend((col..b.len()).step_by(m).map(|i| b.get(i)));
    }
    out
}

fn check_count_input(b: &Bitstream, n: usize) -> Result<()> {
    check_detect_length(n)?;
    if b.is_empty() {
        return Err(Error::EmptyInput("cannot count lines in an empty bitstream"));
    }
    Ok(())
}

pub fn count_horizontal(b: &Bitstream, symbol: Symbol, n: usize) -> Result<LineCount> {
    check_count_input(b, n)?;
    let covered = covered_for_lengths(b, symbol, &[n])[0];
    Ok(LineCount::new(symbol, n, Orientation::Horizontal, covered))
}

pub fn count_vertical(b: &Bitstream, symbol: Symbol, n: usize) -> Result<LineCount> {
    check_count_input(b, n)?;
    let covered = covered_for_lengths(&vertical_order(b), symbol, &[n])[0];
    Ok(LineCount::new(symbol, n, Orientation::Vertical, covered))
}

pub fn count_oriented(b: &Bitstream, symbol: Symbol, n: usize, orientation: Orientation) -> Result<LineCount> {
    match orientation {
        Orientation::Horizontal => count_horizontal(b, symbol, n),
        Orientation::Vertical => count_vertical(b, symbol, n),
    }
}

/// Expected single-symbol line count at detect length `n` in `len`
/// uniform random bits.
pub fn expected_lines(n: usize, len: usize) -> Result<f64> {
    check_detect_length(n)?;
    if len == 0 {
        return Err(Error::InvalidLength(len));
    }
    Ok(line_density(n) * len as f64)
}

/// `(n + 1) / (2^(n+1) * n)`.
fn line_density(n: usize) -> f64 {
    (n as f64 + 1.0) / (2f64.powi(n as i32 + 1) * n as f64)
}

/// Expected `L_n = 0.5 * (n + 1) / 2^n`.
pub fn expected_ln(n: usize) -> f64 {
    0.5 * (n as f64 + 1.0) / 2f64.powi(n as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LnEntry {
    pub n: usize,
    /// `count * n / len`.
    pub l_n: f64,
    /// `L_n / L_{n-1}`; absent for `n = 1` and when `L_{n-1} = 0`.
    pub l_prime: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LnSeries {
    pub symbol: Symbol,
    pub bit_length: u64,
    pub entries: Vec<LnEntry>,
}

impl LnSeries {
    pub fn l_n(&self, n: usize) -> Option<f64> {
        self.entries.get(n.checked_sub(1)?).map(|e| e.l_n)
    }

    pub fn l_prime(&self, n: usize) -> Option<f64> {
        self.entries.get(n.checked_sub(1)?).and_then(|e| e.l_prime)
    }
}

pub fn ln_series(b: &Bitstream, n_max: usize, symbol: Symbol) -> Result<LnSeries> {
    check_detect_length(n_max)?;
    if b.is_empty() {
        return Err(Error::EmptyInput("L_n series needs a non-empty bitstream"));
    }
    let lengths: Vec<usize> = (1..=n_max).collect();
    let covered = covered_for_lengths(b, symbol, &lengths);
    let len = b.len() as f64;
    let mut entries: Vec<LnEntry> = Vec::with_capacity(n_max);
    for (&n, &cov) in lengths.iter().zip(&covered) {
        // count * n == covered exactly
        let l_n = cov as f64 / len;
        let l_prime = entries
            .last()
            .filter(|prev| prev.l_n != 0.0)
            .map(|prev| l_n / prev.l_n);
        entries.push(LnEntry { n, l_n, l_prime });
    }
    Ok(LnSeries {
        symbol,
        bit_length: b.len() as u64,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlsConfig {
    pub n_set: Vec<usize>,
    pub symbols: Vec<Symbol>,
    pub mc_replicas: usize,
    pub seed: u64,
    pub z_threshold: f64,
}

impl Default for FlsConfig {
    fn default() -> Self {
        Self {
            n_set: (1..=DEFAULT_MAX_DETECT_LENGTH).collect(),
            symbols: Symbol::BOTH.to_vec(),
            mc_replicas: DEFAULT_REPLICAS,
            seed: 0,
            z_threshold: DEFAULT_Z_THRESHOLD,
        }
    }
}

impl FlsConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_set.is_empty() {
            return bad("FLS needs at least one detect length".into());
        }
        if self.n_set.contains(&0) {
            return bad("detect lengths must be >= 1".into());
        }
        if self.symbols.is_empty() {
            return bad("FLS needs at least one symbol".into());
        }
        if self.mc_replicas < 2 {
            return bad(format!("mc_replicas must be >= 2, got {}", self.mc_replicas));
        }
        if !(self.z_threshold > 0.0) {
            return bad(format!("z_threshold must be > 0, got {}", self.z_threshold));
        }
        Ok(())
    }

    fn normalized(&self) -> Self {
        let mut c = self.clone();
        c.n_set.sort_unstable();
        c.n_set.dedup();
        c.symbols.sort_unstable();
        c.symbols.dedup();
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlsEntry {
    pub symbol: Symbol,
    pub detect_length: usize,
    pub horizontal: LineCount,
    pub vertical: LineCount,
    pub expected: f64,
    /// Sample standard deviation of horizontal counts over the replicas.
    pub mc_sigma: f64,
    #[serde(with = "jsonfloat")]
    pub z_h: f64,
    #[serde(with = "jsonfloat")]
    pub z_v: f64,
    /// `(H - V) / (mc_sigma * sqrt 2)`; treats H and V as independent.
    #[serde(with = "jsonfloat")]
    pub z_symmetry: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlsResult {
    pub bit_length: u64,
    pub config: FlsConfig,
    pub entries: Vec<FlsEntry>,
    pub pass: bool,
}

impl FlsResult {
    pub fn entry(&self, symbol: Symbol, n: usize) -> Option<&FlsEntry> {
        self.entries
            .iter()
            .find(|e| e.symbol == symbol && e.detect_length == n)
    }
}

fn sample_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Runs the FLS test. The count spread is calibrated on `mc_replicas`
/// uniform streams of the same length; replica `i` uses reference stream
/// `i` of `config.seed`.
pub fn run_fls(b: &Bitstream, config: &FlsConfig) -> Result<FlsResult> {
    if b.len() < MIN_BITS {
        return Err(Error::InsufficientBits {
            needed: MIN_BITS,
            got: b.len(),
        });
    }
    config.validate()?;
    let config = config.normalized();
    let len = b.len();
    let lengths = &config.n_set;

    // replica -> symbol -> detect length -> covered
    let replicas: Vec<Vec<Vec<u64>>> = (0..config.mc_replicas)
        .into_par_iter()
        .map(|i| {
            let r = random_bits(&mut stream_rng(config.seed, i as u64), len);
            config
                .symbols
                .iter()
                .map(|&s| covered_for_lengths(&r, s, lengths))
                .collect()
        })
        .collect();

    let vertical = vertical_order(b);
    let threshold = config.z_threshold;
    let mut entries = Vec::with_capacity(config.symbols.len() * lengths.len());
    for (si, &symbol) in config.symbols.iter().enumerate() {
        let h_cov = covered_for_lengths(b, symbol, lengths);
        let v_cov = covered_for_lengths(&vertical, symbol, lengths);
        for (ni, &n) in lengths.iter().enumerate() {
            let samples: Vec<f64> = replicas.iter().map(|r| r[si][ni] as f64 / n as f64).collect();
            let mc_sigma = sample_std(&samples);
            let horizontal = LineCount::new(symbol, n, Orientation::Horizontal, h_cov[ni]);
            let vertical = LineCount::new(symbol, n, Orientation::Vertical, v_cov[ni]);
            let expected = line_density(n) * len as f64;
            let z_h = zscore(horizontal.count - expected, mc_sigma);
            let z_v = zscore(vertical.count - expected, mc_sigma);
            let z_symmetry = zscore(horizontal.count - vertical.count, mc_sigma * std::f64::consts::SQRT_2);
            let pass = [z_h, z_v, z_symmetry].iter().all(|z| z.abs() <= threshold);
            entries.push(FlsEntry {
                symbol,
                detect_length: n,
                horizontal,
                vertical,
                expected,
                mc_sigma,
                z_h,
                z_v,
                z_symmetry,
                pass,
            });
        }
    }
    Ok(FlsResult {
        bit_length: len as u64,
        pass: entries.iter().all(|e| e.pass),
        config,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Z: Cell = Cell::Zero;
    const O: Cell = Cell::One;
    const N: Cell = Cell::Nothing;

    fn bits(v: &[u8]) -> Bitstream {
        Bitstream::from_bits(v)
    }

    #[test]
    fn padding() {
        assert_eq!(pad_length(14).unwrap(), 16);
        assert_eq!(pad_length(16).unwrap(), 16);
        assert_eq!(pad_length(10).unwrap(), 16);
        assert_eq!(pad_length(1).unwrap(), 1);
        assert_eq!(pad_length(17).unwrap(), 25);
        assert!(matches!(pad_length(0), Err(Error::InvalidLength(0))));
    }

    #[test]
    fn stacking() {
        let s = stack(&Bitstream::ones(14)).unwrap();
        assert_eq!(s.side(), 4);
        assert_eq!(s.real_bits(), 14);
        assert_eq!(&s.cells()[12..], &[O, O, N, N]);
        let s = stack(&bits(&[0, 1, 0, 1])).unwrap();
        assert_eq!(s.cells(), &[Z, O, Z, O]);
        assert_eq!(stack(&bits(&[1])).unwrap().side(), 1);
        assert!(matches!(stack(&Bitstream::new()), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn rotation() {
        let s = PaddedSquare {
            side: 2,
            cells: vec![Z, O, N, Z],
            real_bits: 3,
        };
        // [[a,b],[c,d]] -> [[b,d],[a,c]]
        assert_eq!(rotate_ccw(&s).cells(), &[O, Z, Z, N]);
        let one = stack(&bits(&[1])).unwrap();
        assert_eq!(rotate_ccw(&one), one);
        let s = stack(&bits(&[0, 1, 0, 1])).unwrap();
        assert_eq!(unstack(&rotate_ccw(&s)), vec![O, O, Z, Z]);
        assert_eq!(unstack(&s), vec![Z, O, Z, O]);
    }

    #[test]
    fn fractional_counting() {
        assert_eq!(count_lines(&[Z; 8], Symbol::Zero, 2).unwrap(), 4.0);
        let cells = [Z, Z, O, Z, Z, Z, O, O, Z, Z];
        assert_eq!(count_lines(&cells, Symbol::Zero, 2).unwrap(), 3.5);
        assert_eq!(count_lines(&[Z, Z, N, Z, O], Symbol::Zero, 2).unwrap(), 1.5);
        assert_eq!(count_lines(&[Z; 5], Symbol::One, 1).unwrap(), 0.0);
        assert!(matches!(count_lines(&cells, Symbol::Zero, 0), Err(Error::InvalidDetectLength(0))));
    }

    #[test]
    fn horizontal_and_vertical_examples() {
        let b = bits(&[0, 0, 1, 1, 0, 0, 1, 1]);
        assert_eq!(count_horizontal(&b, Symbol::Zero, 2).unwrap().count, 2.0);
        assert_eq!(count_horizontal(&bits(&[0]), Symbol::Zero, 1).unwrap().count, 1.0);

        let b = bits(&[0, 1, 0, 1]);
        assert_eq!(count_vertical(&b, Symbol::Zero, 2).unwrap().count, 1.0);
        assert_eq!(count_vertical(&b, Symbol::One, 2).unwrap().count, 1.0);
        assert_eq!(count_horizontal(&b, Symbol::One, 2).unwrap().count, 0.0);
        assert_eq!(count_vertical(&Bitstream::zeros(9), Symbol::Zero, 3).unwrap().count, 3.0);
        assert!(count_vertical(&Bitstream::new(), Symbol::Zero, 1).is_err());
    }

    #[test]
    fn vertical_order_reads_columns_right_to_left() {
        // 3x3 square holding indices 0..7; column 2 = {2,5}, 1 = {1,4,7}, 0 = {0,3,6}
        let b = bits(&[0, 0, 1, 0, 1, 1, 1, 0, 0]);
        let mut want = Vec::new();
        for idx in [2, 5, 8, 1, 4, 7, 0, 3, 6] {
            want.push(b.get(idx));
        }
        assert_eq!(vertical_order(&b), want.into_iter().collect::<Bitstream>());
        let short = bits(&[1, 0, 1, 1, 0, 1, 0]);
        let via_rotation: Vec<Cell> = unstack(&rotate_ccw(&stack(&short).unwrap()));
        let direct: Vec<Cell> = vertical_order(&short).iter().map(Cell::from_bit).collect();
        let filtered: Vec<Cell> = via_rotation.into_iter().filter(|c| *c != N).collect();
        assert_eq!(filtered, direct);
    }

    #[test]
    fn expected_counts() {
        assert_eq!(expected_lines(1, 10_000_000).unwrap(), 5_000_000.0);
        assert_eq!(expected_lines(2, 16).unwrap(), 3.0);
        assert_eq!(expected_lines(5, 10_000_000).unwrap(), 187_500.0);
        assert!(matches!(expected_lines(0, 10), Err(Error::InvalidDetectLength(0))));
        assert!(matches!(expected_lines(1, 0), Err(Error::InvalidLength(0))));
    }

    #[test]
    fn expected_density_matches_run_sum() {
        // Per-bit expectation from maximal runs: sum_{r>=n} (r/n) 2^-(r+2).
        for n in 1..=12usize {
            let series: f64 = (n..400).map(|r| r as f64 / n as f64 * 2f64.powi(-(r as i32 + 2))).sum();
            assert!((series - line_density(n)).abs() < 1e-15, "n={n}");
        }
    }

    #[test]
    fn closed_form_identities() {
        for n in 1..=30usize {
            let l = expected_lines(n, 1_000_000).unwrap() * n as f64 / 1_000_000.0;
            assert!((l - expected_ln(n)).abs() <= 1e-15 * expected_ln(n).max(1e-300) * 4.0);
            if n >= 2 {
                let ratio = expected_ln(n) / expected_ln(n - 1);
                assert!((ratio - (n as f64 + 1.0) / (2.0 * n as f64)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ln_series_degenerate_streams() {
        let s = ln_series(&Bitstream::zeros(1000), 6, Symbol::Zero).unwrap();
        assert!(s.entries.iter().all(|e| e.l_n == 1.0));
        assert_eq!(s.l_prime(1), None);
        assert_eq!(s.l_prime(2), Some(1.0));
        let s = ln_series(&Bitstream::ones(100), 3, Symbol::Zero).unwrap();
        assert!(s.entries.iter().all(|e| e.l_n == 0.0 && e.l_prime.is_none()));
        assert!(ln_series(&Bitstream::new(), 3, Symbol::Zero).is_err());
        assert!(ln_series(&Bitstream::ones(3), 0, Symbol::Zero).is_err());
    }

    #[test]
    fn run_fls_rejects_bad_input() {
        let cfg = FlsConfig::default();
        assert!(matches!(run_fls(&Bitstream::zeros(63), &cfg), Err(Error::InsufficientBits { .. })));
        let b = crate::rng::reference_bits(256, 1);
        for bad in [
            FlsConfig { mc_replicas: 1, ..cfg.clone() },
            FlsConfig { n_set: vec![], ..cfg.clone() },
            FlsConfig { n_set: vec![0, 2], ..cfg.clone() },
            FlsConfig { symbols: vec![], ..cfg.clone() },
            FlsConfig { z_threshold: 0.0, ..cfg.clone() },
        ] {
            assert!(matches!(run_fls(&b, &bad), Err(Error::InvalidConfig(_))), "{bad:?}");
        }
    }

    #[test]
    fn run_fls_all_zeros_fails() {
        let r = run_fls(&Bitstream::zeros(4096), &FlsConfig { mc_replicas: 20, ..Default::default() }).unwrap();
        assert!(!r.pass);
        let one = r.entry(Symbol::One, 2).unwrap();
        assert_eq!(one.horizontal.count, 0.0);
        assert!(one.z_h < -4.0);
        assert!(r.entry(Symbol::Zero, 2).unwrap().z_h > 4.0);
    }

    #[test]
    fn run_fls_is_deterministic() {
        let b = crate::rng::reference_bits(5000, 77);
        let cfg = FlsConfig { mc_replicas: 16, seed: 5, ..Default::default() };
        assert_eq!(run_fls(&b, &cfg).unwrap(), run_fls(&b, &cfg).unwrap());
    }

    fn bitstreams() -> impl Strategy<Value = Bitstream> {
        prop::collection::vec(0u8..2, 1..300).prop_map(|v| Bitstream::from_bits(&v))
    }

    proptest! {
        #[test]
        fn n1_counts_symbols(b in bitstreams()) {
            let zeros = count_horizontal(&b, Symbol::Zero, 1).unwrap();
            let ones = count_horizontal(&b, Symbol::One, 1).unwrap();
            prop_assert_eq!(zeros.count as usize, b.count_zeros());
            prop_assert_eq!(zeros.count + ones.count, b.len() as f64);
            prop_assert_eq!(count_vertical(&b, Symbol::One, 1).unwrap().count, ones.count);
        }

        #[test]
        fn counts_are_multiples_of_one_over_n(b in bitstreams(), n in 1usize..10) {
            for s in Symbol::BOTH {
                for lc in [count_horizontal(&b, s, n).unwrap(), count_vertical(&b, s, n).unwrap()] {
                    let scaled = lc.count * n as f64;
                    prop_assert_eq!(scaled, scaled.round());
                    prop_assert_eq!(scaled as u64, lc.covered);
                    let available = if s == Symbol::One { b.count_ones() } else { b.count_zeros() };
                    prop_assert!(lc.covered as usize <= available);
                }
            }
        }

        #[test]
        fn monotone_in_detect_length(b in bitstreams(), n in 1usize..10) {
            for s in Symbol::BOTH {
                prop_assert!(count_horizontal(&b, s, n + 1).unwrap().count <= count_horizontal(&b, s, n).unwrap().count);
                prop_assert!(count_vertical(&b, s, n + 1).unwrap().count <= count_vertical(&b, s, n).unwrap().count);
            }
        }

        #[test]
        fn complement_symmetry(b in bitstreams(), n in 1usize..6) {
            let c = b.complement();
            prop_assert_eq!(count_horizontal(&b, Symbol::Zero, n).unwrap().count,
                            count_horizontal(&c, Symbol::One, n).unwrap().count);
            prop_assert_eq!(count_vertical(&b, Symbol::One, n).unwrap().count,
                            count_vertical(&c, Symbol::Zero, n).unwrap().count);
        }

        #[test]
        fn rotation_identities(b in bitstreams()) {
            let s = stack(&b).unwrap();
            let r4 = rotate_ccw(&rotate_ccw(&rotate_ccw(&rotate_ccw(&s))));
            prop_assert_eq!(&r4, &s);
            let flat = unstack(&s);
            prop_assert_eq!(flat.len(), s.side() * s.side());
            let real: Vec<Cell> = b.iter().map(Cell::from_bit).collect();
            prop_assert_eq!(&flat[..b.len()], &real[..]);
            prop_assert!(flat[b.len()..].iter().all(|c| *c == Cell::Nothing));
        }

        #[test]
        fn fast_paths_match_cell_paths(b in bitstreams(), n in 1usize..5) {
            let s = stack(&b).unwrap();
            for sym in Symbol::BOTH {
                prop_assert_eq!(count_horizontal(&b, sym, n).unwrap().count,
                                count_lines(&unstack(&s), sym, n).unwrap());
                prop_assert_eq!(count_vertical(&b, sym, n).unwrap().count,
                                count_lines(&unstack(&rotate_ccw(&s)), sym, n).unwrap());
            }
        }
    }
}

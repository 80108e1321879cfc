//! Independent oracles shared by the integration suites. Nothing here calls
//! into the counting code it is used to check.

#![allow(dead_code)]

/// A cell as the oracle sees it: `None` is padding.
pub type OracleCell = Option<bool>;

/// Naive line count: drop padding, split into maximal runs by hand, and add
/// `r` symbol cells for every run of `r >= n`. Returns the count as an
/// exact numerator over `n`.
pub fn naive_covered(cells: &[OracleCell], symbol: bool, n: usize) -> u64 {
    let real: Vec<bool> = cells.iter().filter_map(|c| *c).collect();
    let mut runs: Vec<(bool, usize)> = Vec::new();
    let mut i = 0;
    while i < real.len() {
        let mut j = i;
        while j < real.len() && real[j] == real[i] {
            j += 1;
        }
        runs.push((real[i], j - i));
        i = j;
    }
    runs.iter()
        .filter(|&&(v, r)| v == symbol && r >= n)
        .map(|&(_, r)| r as u64)
        .sum()
}

/// Explicit square fold of `bits` (row-major, padding as `None`).
pub fn naive_square(bits: &[bool]) -> (usize, Vec<Vec<OracleCell>>) {
    let mut m = 0;
    while m * m < bits.len() {
        m += 1;
    }
    let mut grid = vec![vec![None; m]; m];
    for (i, &b) in bits.iter().enumerate() {
        grid[i / m][i % m] = Some(b);
    }
    (m, grid)
}

/// Columns of the folded square from right to left, each top to bottom.
pub fn naive_vertical_cells(bits: &[bool]) -> Vec<OracleCell> {
    let (m, grid) = naive_square(bits);
    let mut out = Vec::with_capacity(m * m);
    for col in (0..m).rev() {
        for row in grid.iter() {
            out.push(row[col]);
        }
    }
    out
}

pub fn horizontal_cells(bits: &[bool]) -> Vec<OracleCell> {
    bits.iter().map(|&b| Some(b)).collect()
}

/// SplitMix64, used as a generator independent of the crate's ChaCha.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// High/Low bits of iid amplitudes drawn uniformly from 32-bit integers
/// (ties are negligible at this range and are skipped as usual).
pub fn naive_high_low_bits(count: usize, seed: u64) -> Vec<bool> {
    let mut rng = SplitMix64(seed);
    let amps: Vec<u32> = (0..count).map(|_| (rng.next_u64() >> 32) as u32).collect();
    let mut out = Vec::with_capacity(count);
    for i in 1..amps.len() {
        if amps[i] > amps[i - 1] {
            out.push(true);
        } else if amps[i] < amps[i - 1] {
            out.push(false);
        }
    }
    out
}

/// Sample mean and standard deviation of naive `(symbol, n)` line counts
/// over `replicas` uniform streams of `len` bits.
pub fn naive_uniform_count_stats(len: usize, symbol: bool, n: usize, replicas: usize, seed: u64) -> (f64, f64) {
    let mut rng = SplitMix64(seed);
    let counts: Vec<f64> = (0..replicas)
        .map(|_| {
            let mut bits = Vec::with_capacity(len);
            while bits.len() < len {
                let w = rng.next_u64();
                for k in 0..64 {
                    if bits.len() < len {
                        bits.push((w >> k) & 1 == 1);
                    }
                }
            }
            naive_covered(&horizontal_cells(&bits), symbol, n) as f64 / n as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / replicas as f64;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (replicas as f64 - 1.0);
    (mean, var.sqrt())
}

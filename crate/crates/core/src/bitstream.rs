//! Bit sequences, the two amplitude-to-bit extraction methods, byte packing
//! and bitstream file I/O.
//!
//! Two on-disk formats are supported:
//!
//! * ascii: characters `0`/`1`, whitespace ignored, `#` starts a comment
//!   that runs to the end of the line. Written with a line break every 64
//!   bits.
//! * packed: magic `FLSB`, version byte `1`, bit count as a little-endian
//!   `u64`, then the bits packed MSB-first with a zero-padded final byte.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil;

pub const PACKED_MAGIC: [u8; 4] = *b"FLSB";
pub const PACKED_VERSION: u8 = 1;
pub const PACKED_HEADER_LEN: usize = 13;
const ASCII_LINE_WIDTH: usize = 64;

/// Integer ADC amplitudes in acquisition order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AmplitudeSeries {
    pub values: Vec<u32>,
    pub source_label: String,
    /// Digitizer bit depth. Informational only.
    pub adc_bits: u8,
}

impl AmplitudeSeries {
    pub fn new(values: Vec<u32>, source_label: impl Into<String>, adc_bits: u8) -> Self {
        Self {
            values,
            source_label: source_label.into(),
            adc_bits,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl From<Vec<u32>> for AmplitudeSeries {
    fn from(values: Vec<u32>) -> Self {
        Self::new(values, "", 0)
    }
}

/// An exact-length sequence of bits.
///
/// Bits are stored LSB-first in 64-bit words; storage bits past `len` are
/// always zero so that derived equality compares only real bits.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Bitstream {
    words: Vec<u64>,
    len: usize,
}

impl Bitstream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    /// Builds a bitstream from `0`/`1` values. Any nonzero byte is a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        bits.iter().map(|&b| b != 0).collect()
    }

    /// Builds a stream of `len` bits from raw words (bit `i` is bit `i % 64`
    /// of word `i / 64`).
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.truncate(len.div_ceil(64));
        words.resize(len.div_ceil(64), 0);
        if !len.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        Self { words, len }
    }

    pub fn zeros(len: usize) -> Self {
        Self::from_words(vec![0; len.div_ceil(64)], len)
    }

    pub fn ones(len: usize) -> Self {
        Self::from_words(vec![u64::MAX; len.div_ceil(64)], len)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let offset = self.len & 63;
        if offset == 0 {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().expect("word pushed above") |= 1 << offset;
        }
        self.len += 1;
    }

    /// Returns the bit at `index`. Panics when out of range.
    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of range for length {}", self.len);
        (self.words[index >> 6] >> (index & 63)) & 1 == 1
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| (self.words[i >> 6] >> (i & 63)) & 1 == 1)
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    /// Every bit flipped.
    pub fn complement(&self) -> Self {
        Self::from_words(self.words.iter().map(|w| !w).collect(), self.len)
    }

    /// First index at or after `start` whose bit differs from `value`, or
    /// `len` if the run extends to the end.
    fn run_end(&self, start: usize, value: bool) -> usize {
        let mut pos = start;
        while pos < self.len {
            let word = self.words[pos >> 6];
            let mismatches = if value { !word } else { word };
            let shift = pos & 63;
            let avail = 64 - shift;
            let tz = ((mismatches >> shift).trailing_zeros() as usize).min(avail);
            if tz < avail {
                return (pos + tz).min(self.len);
            }
            pos += avail;
        }
        self.len
    }

    /// Maximal runs of equal bits as `(bit, run_length)`, in stream order.
    pub fn runs(&self) -> Runs<'_> {
        Runs { stream: self, pos: 0 }
    }
}

impl fmt::Debug for Bitstream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 128;
        write!(f, "Bitstream(len={}, ", self.len)?;
        for bit in self.iter().take(SHOWN) {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        if self.len > SHOWN {
            f.write_str("...")?;
        }
        f.write_str(")")
    }
}

impl FromIterator<bool> for Bitstream {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let iter = iter.into_iter();
        let mut out = Bitstream::with_capacity(iter.size_hint().0);
        for bit in iter {
            out.push(bit);
        }
        out
    }
}

impl Extend<bool> for Bitstream {
    fn extend<I: IntoIterator<Item = bool>>(&mut self, iter: I) {
        for bit in iter {
            self.push(bit);
        }
    }
}

pub struct Runs<'a> {
    stream: &'a Bitstream,
    pos: usize,
}

impl Iterator for Runs<'_> {
    type Item = (bool, usize);

    fn next(&mut self) -> Option<Self::Item> {
        if self.pos >= self.stream.len {
            return None;
        }
        let value = self.stream.get(self.pos);
        let end = self.stream.run_end(self.pos, value);
        let run = (value, end - self.pos);
        self.pos = end;
        Some(run)
    }
}

/// High/Low extraction: `1` when an amplitude exceeds its predecessor, `0`
/// when it is lower, nothing when equal.
pub fn extract_high_low(amps: &AmplitudeSeries) -> Result<Bitstream> {
    if amps.len() < 2 {
        return Err(Error::EmptyInput("high/low extraction needs at least 2 amplitudes"));
    }
    Ok(amps
        .values
        .windows(2)
        .filter(|w| w[1] != w[0])
        .map(|w| w[1] > w[0])
        .collect())
}

/// Even/Odd extraction: one bit per amplitude, `1` for even values.
pub fn extract_even_odd(amps: &AmplitudeSeries) -> Result<Bitstream> {
    if amps.is_empty() {
        return Err(Error::EmptyInput("even/odd extraction needs at least 1 amplitude"));
    }
    Ok(amps.values.iter().map(|v| v % 2 == 0).collect())
}

/// Packs complete 8-bit groups MSB-first; a trailing partial group is dropped.
pub fn pack_bytes(b: &Bitstream) -> Vec<u8> {
    pack_msb_first(b, b.len() / 8)
}

fn pack_msb_first(b: &Bitstream, n_bytes: usize) -> Vec<u8> {
    let mut out = vec![0u8; n_bytes];
    for (i, bit) in b.iter().take(n_bytes * 8).enumerate() {
        if bit {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

/// Expands bytes MSB-first.
pub fn unpack_bytes(bytes: &[u8]) -> Bitstream {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).map(move |k| byte & (0x80 >> k) != 0))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BitFormat {
    #[default]
    Ascii,
    Packed,
}

impl std::str::FromStr for BitFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ascii" => Ok(BitFormat::Ascii),
            "packed" => Ok(BitFormat::Packed),
            other => Err(format!("unknown bitstream format {other:?} (expected ascii|packed)")),
        }
    }
}

pub fn encode_bitstream(b: &Bitstream, format: BitFormat) -> Vec<u8> {
    match format {
        BitFormat::Ascii => {
            let mut out = Vec::with_capacity(b.len() + b.len() / ASCII_LINE_WIDTH + 1);
            for (i, bit) in b.iter().enumerate() {
                if i > 0 && i % ASCII_LINE_WIDTH == 0 {
                    out.push(b'\n');
                }
                out.push(if bit { b'1' } else { b'0' });
            }
            if b.len() > ASCII_LINE_WIDTH {
                out.push(b'\n');
            }
            out
        }
        BitFormat::Packed => {
            let mut out = Vec::with_capacity(PACKED_HEADER_LEN + b.len().div_ceil(8));
            out.extend_from_slice(&PACKED_MAGIC);
            out.push(PACKED_VERSION);
            out.extend_from_slice(&(b.len() as u64).to_le_bytes());
            out.extend(pack_msb_first(b, b.len().div_ceil(8)));
            out
        }
    }
}

/// Decodes either format; packed is recognized by its magic bytes. `path`
/// is used only for error messages.
pub fn decode_bitstream(data: &[u8], path: &Path) -> Result<Bitstream> {
    if data.starts_with(&PACKED_MAGIC) {
        decode_packed(data, path)
    } else {
        decode_ascii(data, path)
    }
}

fn decode_packed(data: &[u8], path: &Path) -> Result<Bitstream> {
    if data.len() < PACKED_HEADER_LEN {
        return Err(Error::at_byte(path, data.len(), "truncated packed header"));
    }
    if data[4] != PACKED_VERSION {
        return Err(Error::at_byte(path, 4, format!("unsupported packed version {}", data[4])));
    }
    let declared = u64::from_le_bytes(data[5..13].try_into().expect("8-byte slice"));
    let payload = &data[PACKED_HEADER_LEN..];
    let needed = declared.div_ceil(8);
    if (payload.len() as u64) < needed {
        return Err(Error::at_byte(
            path,
            data.len(),
            format!(
                "payload holds {} bytes but the header declares {declared} bits ({needed} bytes)",
                payload.len()
            ),
        ));
    }
    let len = declared as usize;
    Ok(unpack_bytes(&payload[..needed as usize]).iter().take(len).collect())
}

fn decode_ascii(data: &[u8], path: &Path) -> Result<Bitstream> {
    let mut out = Bitstream::with_capacity(data.len());
    for (line_no, line) in data.split(|&c| c == b'\n').enumerate() {
        for &c in line {
            match c {
                b'0' => out.push(false),
                b'1' => out.push(true),
                b'#' => break,
                c if c.is_ascii_whitespace() => {}
                c => {
                    return Err(Error::at_line(
                        path,
                        line_no + 1,
                        format!("unexpected character {:?} in bitstream", c as char),
                    ))
                }
            }
        }
    }
    Ok(out)
}

pub fn write_bitstream_file(b: &Bitstream, path: impl AsRef<Path>, format: BitFormat) -> Result<()> {
    fsutil::write_atomic(path.as_ref(), &encode_bitstream(b, format))
}

pub fn read_bitstream_file(path: impl AsRef<Path>) -> Result<Bitstream> {
    let path = path.as_ref();
    decode_bitstream(&fsutil::read_all(path)?, path)
}

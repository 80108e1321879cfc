//! Binary PPM (P6) rendering of stacked bitstreams and line overlays.
//!
//! Ones are white, zeros black, padding grey. Cells belonging to a counted
//! line are drawn blue for horizontal scans and red for vertical scans.

use serde::{Deserialize, Serialize};

use crate::bitstream::Bitstream;
use crate::error::{Error, Result};
use crate::fls::{self, Cell, Orientation, PaddedSquare, Symbol};

pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];
pub const GREY: Rgb = [128, 128, 128];
pub const BLUE: Rgb = [0, 0, 255];
pub const RED: Rgb = [255, 0, 0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overlay {
    pub symbol: Symbol,
    pub detect_length: usize,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderSpec {
    /// Pixels per cell edge.
    pub scale: usize,
    pub overlay: Option<Overlay>,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            scale: 1,
            overlay: None,
        }
    }
}

fn cell_color(cell: Cell) -> Rgb {
    match cell {
        Cell::One => WHITE,
        Cell::Zero => BLACK,
        Cell::Nothing => GREY,
    }
}

fn check_scale(scale: usize) -> Result<()> {
    if scale == 0 {
        Err(Error::InvalidConfig("render scale must be >= 1".into()))
    } else {
        Ok(())
    }
}

fn encode_ppm(side: usize, scale: usize, colors: &[Rgb]) -> Vec<u8> {
    let dim = side * scale;
    let header = format!("P6\n{dim} {dim}\n255\n");
    let mut out = Vec::with_capacity(header.len() + dim * dim * 3);
    out.extend_from_slice(header.as_bytes());
    for row in 0..side {
        let mut line = Vec::with_capacity(dim * 3);
        for color in &colors[row * side..(row + 1) * side] {
            for _ in 0..scale {
                line.extend_from_slice(color);
            }
        }
        for _ in 0..scale {
            out.extend_from_slice(&line);
        }
    }
    out
}

pub fn render_square(s: &PaddedSquare, scale: usize) -> Result<Vec<u8>> {
    check_scale(scale)?;
    let colors: Vec<Rgb> = s.cells().iter().map(|&c| cell_color(c)).collect();
    Ok(encode_ppm(s.side(), scale, &colors))
}

/// Marks, per bit of `b`, whether the bit lies in a line counted by the
/// given scan. The number of marked bits equals the scan's covered count.
pub fn line_mask(b: &Bitstream, symbol: Symbol, n: usize, orientation: Orientation) -> Result<Vec<bool>> {
    if n == 0 {
        return Err(Error::InvalidDetectLength(n));
    }
    if b.is_empty() {
        return Err(Error::EmptyInput("cannot render an empty bitstream"));
    }
    let order: Vec<usize> = match orientation {
        Orientation::Horizontal => (0..b.len()).collect(),
        Orientation::Vertical => {
            let m = fls::stack(b)?.side();
            (0..m).rev().flat_map(|col| (col..b.len()).step_by(m)).collect()
        }
    };
    let target = symbol.bit();
    let mut mask = vec![false; b.len()];
    let mut start = 0;
    while start < order.len() {
        let value = b.get(order[start]);
        let mut end = start + 1;
        while end < order.len() && b.get(order[end]) == value {
            end += 1;
        }
        if value == target && end - start >= n {
            for &idx in &order[start..end] {
                mask[idx] = true;
            }
        }
        start = end;
    }
    Ok(mask)
}

pub fn render_line_overlay(
    b: &Bitstream,
    symbol: Symbol,
    n: usize,
    orientation: Orientation,
    scale: usize,
) -> Result<Vec<u8>> {
    check_scale(scale)?;
    let square = fls::stack(b)?;
    let mask = line_mask(b, symbol, n, orientation)?;
    let highlight = match orientation {
        Orientation::Horizontal => BLUE,
        Orientation::Vertical => RED,
    };
    let colors: Vec<Rgb> = square
        .cells()
        .iter()
        .enumerate()
        .map(|(i, &c)| if mask.get(i).copied().unwrap_or(false) { highlight } else { cell_color(c) })
        .collect();
    Ok(encode_ppm(square.side(), scale, &colors))
}

/// Renders according to `spec`.
pub fn render(b: &Bitstream, spec: &RenderSpec) -> Result<Vec<u8>> {
    match spec.overlay {
        None => render_square(&fls::stack(b)?, spec.scale),
        Some(o) => render_line_overlay(b, o.symbol, o.detect_length, o.orientation, spec.scale),
    }
}

//! Spin grid persistence.
//!
//! Text: one line per row, `+` / `-` per cell, northmost row first.
//!
//! Binary: a 16-byte header (`PCA1`, then width, height and step index as
//! little-endian `u32`), followed by the row-major cells (row `y = 0` first)
//! packed one bit per cell, LSB first, `1` for up. Boundaries are not stored;
//! decoded grids are periodic.

use super::spin::{Spin, SpinConfig};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"PCA1";
pub const HEADER_LEN: usize = 16;

pub fn to_text(config: &SpinConfig) -> String {
    let mut s = String::with_capacity((config.width() + 1) * config.height());
    for y in (0..config.height()).rev() {
        for x in 0..config.width() {
            s.push(if config.get(x, y).is_up() { '+' } else { '-' });
        }
        s.push('\n');
    }
    s
}

pub fn from_text(text: &str) -> Result<SpinConfig> {
    let rows: Vec<&str> = text
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty())
        .collect();
    if rows.is_empty() {
        return Err(Error::Format("empty grid".into()));
    }
    let width = rows[0].chars().count();
    let height = rows.len();
    let mut cells = vec![Spin::Up; width * height];
    for (r, line) in rows.iter().enumerate() {
        let y = height - 1 - r;
        if line.chars().count() != width {
            return Err(Error::Format(format!(
                "line {} has {} cells, expected {width}",
                r + 1,
                line.chars().count()
            )));
        }
        for (x, ch) in line.chars().enumerate() {
            cells[y * width + x] = match ch {
                '+' => Spin::Up,
                '-' => Spin::Down,
                other => {
                    return Err(Error::Format(format!(
                        "unexpected character {other:?} on line {}",
                        r + 1
                    )))
                }
            };
        }
    }
    SpinConfig::from_cells(width, height, cells)
}

pub fn to_binary(config: &SpinConfig, step: u32) -> Vec<u8> {
    let n = config.len();
    let mut out = Vec::with_capacity(HEADER_LEN + n.div_ceil(8));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(config.width() as u32).to_le_bytes());
    out.extend_from_slice(&(config.height() as u32).to_le_bytes());
    out.extend_from_slice(&step.to_le_bytes());
    let mut bits = vec![0u8; n.div_ceil(8)];
    for (i, s) in config.cells().iter().enumerate() {
        if s.is_up() {
            bits[i / 8] |= 1 << (i % 8);
        }
    }
    out.extend_from_slice(&bits);
    out
}

/// Decode a binary grid, returning it with its step index.
pub fn from_binary(bytes: &[u8]) -> Result<(SpinConfig, u32)> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing PCA1 header".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
    let (width, height, step) = (word(4), word(8), word(12) as u32);
    let n = width
        .checked_mul(height)
        .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != n.div_ceil(8) {
        return Err(Error::Format(format!(
            "expected {} payload bytes, found {}",
            n.div_ceil(8),
            body.len()
        )));
    }
    let cells = (0..n)
        .map(|i| Spin::from_sign(body[i / 8] >> (i % 8) & 1 == 1))
        .collect();
    Ok((SpinConfig::from_cells(width, height, cells)?, step))
}

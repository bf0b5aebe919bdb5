use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pca::{format, Spin, SpinConfig};

/// Starting configuration of a scenario. Down cells are the "errors".
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialState {
    /// All up.
    #[default]
    Uniform,
    /// A `width x height` block of down cells, centred.
    Island { width: usize, height: usize },
    /// Down where `(x + y) mod period < width`.
    ///
    /// Perfect stripes are a fine-tuned case: even the noiseless Toom rule
    /// does not remove them, so only noise lets the ordered phase take over.
    DiagonalStripes { period: usize, width: usize },
    /// Text grid of `+`/`-`, northmost row first.
    File { path: PathBuf },
}

impl InitialState {
    /// Geometry check against the lattice size. Files are checked on load.
    pub fn check(&self, width: usize, height: usize) -> std::result::Result<(), String> {
        match *self {
            InitialState::Island { width: w, height: h } if w > width || h > height => {
                Err(format!("island {w}x{h} does not fit a {width}x{height} lattice"))
            }
            InitialState::DiagonalStripes { period, width: w } if period == 0 || w > period => {
                Err(format!("stripe width {w} must not exceed period {period} (> 0)"))
            }
            _ => Ok(()),
        }
    }
}

pub fn build_initial(state: &InitialState, width: usize, height: usize) -> Result<SpinConfig> {
    state.check(width, height).map_err(Error::Scenario)?;
    match state {
        InitialState::Uniform => SpinConfig::uniform(width, height, Spin::Up),
        InitialState::Island { width: w, height: h } => {
            let (x0, y0) = ((width - w) / 2, (height - h) / 2);
            SpinConfig::from_fn(width, height, |x, y| {
                Spin::from_sign(!((x0..x0 + w).contains(&x) && (y0..y0 + h).contains(&y)))
            })
        }
        InitialState::DiagonalStripes { period, width: w } => {
            SpinConfig::from_fn(width, height, |x, y| Spin::from_sign((x + y) % period >= *w))
        }
        InitialState::File { path } => {
            let c = format::from_text(&std::fs::read_to_string(path)?)?;
            if c.width() != width || c.height() != height {
                return Err(Error::Scenario(format!(
                    "{} holds a {}x{} grid, expected {width}x{height}",
                    path.display(),
                    c.width(),
                    c.height()
                )));
            }
            Ok(c)
        }
    }
}

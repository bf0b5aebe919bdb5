use super::potential::{decode_s, encode_q};
use crate::error::{Error, Result};
use crate::pca::SpinConfig;

/// Positions and momenta of the A and B oscillator sublattices on a periodic
/// square lattice, row-major with `y` pointing north.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorLattice {
    width: usize,
    height: usize,
    pub mass: f64,
    pub qa: Vec<f64>,
    pub pa: Vec<f64>,
    pub qb: Vec<f64>,
    pub pb: Vec<f64>,
}

pub const DUMP_MAGIC: &[u8; 4] = b"OSC1";

impl OscillatorLattice {
    pub fn zeros(width: usize, height: usize, mass: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Lattice(format!("dimensions must be positive, got {width}x{height}")));
        }
        if !(mass > 0.0) {
            return Err(Error::Params(format!("mass must be positive, got {mass}")));
        }
        let n = width * height;
        Ok(Self {
            width,
            height,
            mass,
            qa: vec![0.0; n],
            pa: vec![0.0; n],
            qb: vec![0.0; n],
            pb: vec![0.0; n],
        })
    }

    /// Both sublattices at the encoded spins, at rest.
    pub fn from_spins(config: &SpinConfig, mass: f64) -> Result<Self> {
        let mut l = Self::zeros(config.width(), config.height(), mass)?;
        for (i, s) in config.cells().iter().enumerate() {
            l.qa[i] = encode_q(*s);
            l.qb[i] = encode_q(*s);
        }
        Ok(l)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn decode_a(&self) -> Result<SpinConfig> {
        self.decode(&self.qa)
    }

    pub fn decode_b(&self) -> Result<SpinConfig> {
        self.decode(&self.qb)
    }

    fn decode(&self, q: &[f64]) -> Result<SpinConfig> {
        let cells = q.iter().map(|&x| decode_s(x)).collect::<Result<Vec<_>>>()?;
        SpinConfig::from_cells(self.width, self.height, cells)
    }

    /// `OSC1`, width and height as little-endian `u32`, then `qA, pA, qB, pB`
    /// as row-major little-endian `f64`.
    pub fn to_dump(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + 32 * self.len());
        out.extend_from_slice(DUMP_MAGIC);
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        for grid in [&self.qa, &self.pa, &self.qb, &self.pb] {
            for x in grid.iter() {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    /// Inverse of [`Self::to_dump`]; the mass is not part of the format.
    pub fn from_dump(bytes: &[u8], mass: f64) -> Result<Self> {
        if bytes.len() < 12 || &bytes[..4] != DUMP_MAGIC {
            return Err(Error::Format("missing OSC1 header".into()));
        }
        let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let mut l = Self::zeros(width, height, mass)?;
        let n = l.len();
        if bytes.len() != 12 + 32 * n {
            return Err(Error::Format(format!(
                "expected {} bytes for a {width}x{height} dump, found {}",
                12 + 32 * n,
                bytes.len()
            )));
        }
        let mut words = bytes[12..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        for grid in [&mut l.qa, &mut l.pa, &mut l.qb, &mut l.pb] {
            for x in grid.iter_mut() {
                *x = words.next().unwrap();
            }
        }
        Ok(l)
    }
}

use std::fmt;
use std::ops::Neg;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A binary cell state, encoded as -1 / +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(i8)]
pub enum Spin {
    Down = -1,
    Up = 1,
}

impl Spin {
    #[inline]
    pub fn value(self) -> i8 {
        self as i8
    }

    #[inline]
    pub fn from_sign(positive: bool) -> Self {
        if positive {
            Spin::Up
        } else {
            Spin::Down
        }
    }

    #[inline]
    pub fn is_up(self) -> bool {
        self == Spin::Up
    }

    pub fn from_value(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Spin::Up),
            -1 => Ok(Spin::Down),
            other => Err(Error::Lattice(format!("{other} is not a spin value"))),
        }
    }
}

impl Neg for Spin {
    type Output = Spin;

    #[inline]
    fn neg(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum Boundary {
    #[default]
    Periodic,
    /// Every site outside the lattice reads as this value.
    Fixed(Spin),
}

/// A `width x height` grid of spins, row-major with `y` pointing north.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    width: usize,
    height: usize,
    cells: Vec<Spin>,
    boundary: Boundary,
}

impl SpinConfig {
    pub fn uniform(width: usize, height: usize, spin: Spin) -> Result<Self> {
        Self::check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            cells: vec![spin; width * height],
            boundary: Boundary::Periodic,
        })
    }

    pub fn from_cells(width: usize, height: usize, cells: Vec<Spin>) -> Result<Self> {
        Self::check_dims(width, height)?;
        if cells.len() != width * height {
            return Err(Error::Lattice(format!(
                "{} cells for a {width}x{height} lattice",
                cells.len()
            )));
        }
        Ok(Self {
            width,
            height,
            cells,
            boundary: Boundary::Periodic,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> Spin,
    ) -> Result<Self> {
        Self::check_dims(width, height)?;
        let mut cells = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                cells.push(f(x, y));
            }
        }
        Self::from_cells(width, height, cells)
    }

    /// `(-1)^(x+y)`.
    pub fn checkerboard(width: usize, height: usize) -> Result<Self> {
        Self::from_fn(width, height, |x, y| Spin::from_sign((x + y) % 2 == 0))
    }

    fn check_dims(width: usize, height: usize) -> Result<()> {
        if width == 0 || height == 0 {
            return Err(Error::Lattice(format!("dimensions must be positive, got {width}x{height}")));
        }
        if width > u32::MAX as usize || height > u32::MAX as usize {
            return Err(Error::Lattice("dimensions exceed 32 bits".into()));
        }
        Ok(())
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn cells(&self) -> &[Spin] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [Spin] {
        &mut self.cells
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Spin {
        self.cells[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, s: Spin) {
        let i = self.index(x, y);
        self.cells[i] = s;
    }

    /// Read at a possibly out-of-range coordinate, resolved by the boundary.
    #[inline]
    pub fn get_offset(&self, x: usize, y: usize, dx: i32, dy: i32) -> Spin {
        let xx = x as i64 + dx as i64;
        let yy = y as i64 + dy as i64;
        let (w, h) = (self.width as i64, self.height as i64);
        match self.boundary {
            Boundary::Periodic => self.get(xx.rem_euclid(w) as usize, yy.rem_euclid(h) as usize),
            Boundary::Fixed(s) => {
                if (0..w).contains(&xx) && (0..h).contains(&yy) {
                    self.get(xx as usize, yy as usize)
                } else {
                    s
                }
            }
        }
    }

    pub fn negate(&self) -> Self {
        let mut out = self.clone();
        out.cells.iter_mut().for_each(|c| *c = -*c);
        out
    }

    pub fn count_down(&self) -> usize {
        self.cells.iter().filter(|c| **c == Spin::Down).count()
    }

    pub fn same_dims(&self, other: &SpinConfig) -> bool {
        self.width == other.width && self.height == other.height
    }
}

impl fmt::Debug for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SpinConfig {}x{} {:?}", self.width, self.height, self.boundary)?;
        write!(f, "{}", crate::pca::format::to_text(self))
    }
}

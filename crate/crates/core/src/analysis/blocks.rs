use rand::Rng;
use serde::{Deserialize, Serialize};

use super::field::ErrorField;
use crate::error::{Error, Result};
use crate::storage::StreamKey;

/// Extent of a space-time box, in CA steps and lattice sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxShape {
    pub lt: usize,
    pub lx: usize,
    pub ly: usize,
}

impl BoxShape {
    pub fn cube(l: usize) -> Self {
        Self { lt: l, lx: l, ly: l }
    }

    pub fn volume(&self) -> usize {
        self.lt * self.lx * self.ly
    }

    pub fn label(&self) -> String {
        format!("{}x{}x{}", self.lt, self.lx, self.ly)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeBoundary {
    /// Boxes never run past the last step.
    #[default]
    Open,
    /// Boxes wrap from the last step to the first. Only meaningful for
    /// checks that need full translation invariance.
    Periodic,
}

/// Where boxes are placed. Space always wraps (the lattice is periodic).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SamplingPlan {
    /// Uniformly random origins, `blocks` per field, no wrap in time.
    Random { blocks: usize },
    /// Every spatial origin, and time origins every `time_stride` steps.
    Exhaustive {
        time_stride: usize,
        time: TimeBoundary,
    },
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan::Random { blocks: 1000 }
    }
}

/// Summed-volume table over a field tiled twice along every wrapping axis,
/// so any box with extents no larger than the field is a single query.
pub struct BlockCounter<'a> {
    field: &'a ErrorField,
    nt: usize,
    nx: usize,
    ny: usize,
    sums: Vec<u32>,
}

impl<'a> BlockCounter<'a> {
    pub fn new(field: &'a ErrorField, time: TimeBoundary) -> Self {
        let (st, w, h) = (field.steps(), field.width(), field.height());
        let nt = match time {
            TimeBoundary::Open => st,
            TimeBoundary::Periodic => 2 * st,
        };
        let (nx, ny) = (2 * w, 2 * h);
        let (sx, sy) = (nx + 1, ny + 1);
        let mut sums = vec![0u32; (nt + 1) * sy * sx];
        let bits = field.bits();
        for t in 0..nt {
            for y in 0..ny {
                let row = &bits[field.index(t % st, 0, y % h)..][..w];
                let mut run = 0u32;
                for x in 0..nx {
                    run += row[x % w] as u32;
                    let i = ((t + 1) * sy + y + 1) * sx + x + 1;
                    let above = ((t + 1) * sy + y) * sx + x + 1;
                    let before = (t * sy + y + 1) * sx + x + 1;
                    let both = (t * sy + y) * sx + x + 1;
                    sums[i] = run + sums[above] + sums[before] - sums[both];
                }
            }
        }
        Self {
            field,
            nt,
            nx,
            ny,
            sums,
        }
    }

    fn at(&self, t: usize, x: usize, y: usize) -> i64 {
        self.sums[(t * (self.ny + 1) + y) * (self.nx + 1) + x] as i64
    }

    /// Errors in the box with origin `(t, x, y)`.
    pub fn count(&self, t: usize, x: usize, y: usize, shape: BoxShape) -> u64 {
        debug_assert!(t + shape.lt <= self.nt);
        debug_assert!(x + shape.lx <= self.nx && y + shape.ly <= self.ny);
        let (t1, x1, y1) = (t + shape.lt, x + shape.lx, y + shape.ly);
        let s = self.at(t1, x1, y1) - self.at(t, x1, y1) - self.at(t1, x, y1) - self.at(t1, x1, y)
            + self.at(t, x, y1)
            + self.at(t, x1, y)
            + self.at(t1, x, y)
            - self.at(t, x, y);
        s as u64
    }

    pub fn field(&self) -> &ErrorField {
        self.field
    }
}

fn check_fits(field: &ErrorField, shape: BoxShape) -> Result<()> {
    if shape.volume() == 0 {
        return Err(Error::Params("box extents must be positive".into()));
    }
    if shape.lt > field.steps() || shape.lx > field.width() || shape.ly > field.height() {
        return Err(Error::Params(format!(
            "box {} does not fit a {}x{}x{} field",
            shape.label(),
            field.steps(),
            field.width(),
            field.height()
        )));
    }
    Ok(())
}

/// Error counts `N_V` of boxes placed in one field according to `plan`.
pub fn box_counts(
    field: &ErrorField,
    shape: BoxShape,
    plan: SamplingPlan,
    key: StreamKey,
) -> Result<Vec<u64>> {
    check_fits(field, shape)?;
    let (st, w, h) = (field.steps(), field.width(), field.height());
    match plan {
        SamplingPlan::Random { blocks } => {
            let counter = BlockCounter::new(field, TimeBoundary::Open);
            let mut rng = key.stream();
            Ok((0..blocks)
                .map(|_| {
                    let t = rng.random_range(0..=st - shape.lt);
                    let x = rng.random_range(0..w);
                    let y = rng.random_range(0..h);
                    counter.count(t, x, y, shape)
                })
                .collect())
        }
        SamplingPlan::Exhaustive { time_stride, time } => {
            if time_stride == 0 {
                return Err(Error::Params("time_stride must be positive".into()));
            }
            let counter = BlockCounter::new(field, time);
            let last = match time {
                TimeBoundary::Open => st - shape.lt + 1,
                TimeBoundary::Periodic => st,
            };
            let mut out = Vec::with_capacity(last.div_ceil(time_stride) * w * h);
            for t in (0..last).step_by(time_stride) {
                for y in 0..h {
                    for x in 0..w {
                        out.push(counter.count(t, x, y, shape));
                    }
                }
            }
            Ok(out)
        }
    }
}

//! Value families over a uniform parameter grid, with second-order finite
//! differences standing in for `d/dt`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// A family of values sampled on a strictly increasing, uniformly spaced grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSection<T> {
    grid: Vec<f64>,
    values: Vec<T>,
    step: f64,
}

impl<T> ParamSection<T> {
    pub fn new(grid: Vec<f64>, values: Vec<T>) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::ShortGrid {
                required: 2,
                got: grid.len(),
            });
        }
        if grid.len() != values.len() {
            return Err(Error::Format(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        let step = grid[1] - grid[0];
        if step <= 0.0 {
            return Err(Error::NonUniformGrid { deviation: step });
        }
        for w in grid.windows(2) {
            let deviation = (w[1] - w[0] - step).abs();
            if deviation > 1e-9 * step.abs().max(1.0) {
                return Err(Error::NonUniformGrid { deviation });
            }
        }
        Ok(ParamSection { grid, values, step })
    }

    /// Sample the closed interval `[t0, t1]` at `points` nodes.
    pub fn sample(t0: f64, t1: f64, points: usize, f: impl Fn(f64) -> T) -> Result<Self> {
        if points < 2 {
            return Err(Error::ShortGrid {
                required: 2,
                got: points,
            });
        }
        let step = (t1 - t0) / (points - 1) as f64;
        let grid: Vec<f64> = (0..points).map(|i| t0 + step * i as f64).collect();
        let values = grid.iter().map(|&t| f(t)).collect();
        ParamSection::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Second-order finite-difference derivative of a scalar section: central
/// differences inside, one-sided three-point stencils at the ends.
pub fn fd_derivative(s: &ParamSection<C64>) -> Result<ParamSection<C64>> {
    let len = s.len();
    if len < 3 {
        return Err(Error::ShortGrid {
            required: 3,
            got: len,
        });
    }
    let h = s.step();
    let v = s.values();
    let mut out = Vec::with_capacity(len);
    out.push((-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h));
    for i in 1..len - 1 {
        out.push((v[i + 1] - v[i - 1]) / (2.0 * h));
    }
    out.push((3.0 * v[len - 1] - 4.0 * v[len - 2] + v[len - 3]) / (2.0 * h));
    ParamSection::new(s.grid().to_vec(), out)
}

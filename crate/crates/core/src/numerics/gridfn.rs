use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Complex samples of a function on a grid.
#[derive(Debug, Clone)]
pub struct GridFn {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl GridFn {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("grid function values must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: Arc<Grid>, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&y| f(y)).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&y, &v)| f(y, v))
            .collect();
        Self {
            grid: Arc::clone(&self.grid),
            values,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(
            Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid,
            "grid functions live on different grids"
        );
        Self {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Add for &GridFn {
    type Output = GridFn;
    fn add(self, rhs: &GridFn) -> GridFn {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &GridFn {
    type Output = GridFn;
    fn sub(self, rhs: &GridFn) -> GridFn {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<Complex64> for &GridFn {
    type Output = GridFn;
    fn mul(self, rhs: Complex64) -> GridFn {
        self.scale(rhs)
    }
}

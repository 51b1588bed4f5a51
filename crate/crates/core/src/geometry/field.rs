use std::sync::Arc;

use super::Grid3;
use crate::{Error, Result, Vec3};

/// One finite real per node of a shared grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid3>,
    values: Vec<f64>,
}

impl ScalarField {
    /// Wraps `values`, rejecting wrong lengths and non-finite entries.
    pub fn new(grid: Arc<Grid3>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { what: "field values", expected: grid.len(), actual: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "field values", index });
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: Arc<Grid3>) -> Self {
        let n = grid.len();
        ScalarField { grid, values: vec![0.0; n] }
    }

    /// Samples `f` at every node. Panics if `f` returns a non-finite value.
    pub fn from_fn(grid: Arc<Grid3>, f: impl Fn(&Vec3) -> f64) -> Self {
        let values: Vec<f64> = (0..grid.len())
            .map(|idx| {
                let v = f(&grid.position(idx));
                assert!(v.is_finite(), "non-finite sample at node {idx}");
                v
            })
            .collect();
        ScalarField { grid, values }
    }

    pub(crate) fn from_parts_unchecked(grid: Arc<Grid3>, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<Grid3> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_layout(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &ScalarField, b: f64) -> Result<ScalarField> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(u, v)| a * u + b * v).collect();
        ScalarField::new(self.grid.clone(), values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trilinear interpolation; `None` outside the grid box.
    pub fn interpolate(&self, x: &Vec3) -> Option<f64> {
        let g = &*self.grid;
        let dims = g.dims();
        let rel = (x - g.origin()) / g.spacing();
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..3 {
            let t = rel[a];
            let top = (dims[a] - 1) as f64;
            if !(t >= -1e-9 && t <= top + 1e-9) {
                return None;
            }
            let t = t.clamp(0.0, top);
            let c = (t.floor() as usize).min(dims[a].saturating_sub(2));
            base[a] = c;
            frac[a] = if dims[a] > 1 { t - c as f64 } else { 0.0 };
        }
        let mut acc = 0.0;
        for corner in 0..8usize {
            let mut w = 1.0;
            let mut ijk = base;
            for a in 0..3 {
                let up = (corner >> a) & 1 == 1;
                if up {
                    if dims[a] == 1 {
                        w = 0.0;
                        break;
                    }
                    ijk[a] += 1;
                    w *= frac[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            if w != 0.0 {
                acc += w * self.values[g.index(ijk[0], ijk[1], ijk[2])];
            }
        }
        Some(acc)
    }
}

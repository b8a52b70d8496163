use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::fields::GridSpec;

/// Real samples of a function at every grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    /// Checked constructor: length must match the grid and every value must be finite.
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(ScalarField { grid, values })
    }

    /// Unchecked constructor for values produced by the crate's own kernels.
    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: GridSpec, value: f64) -> Self {
        ScalarField {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|idx| f(grid.coords(grid.unravel(idx))))
            .collect();
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, ijk: [usize; 3]) -> f64 {
        self.values[self.grid.index(ijk[0], ijk[1], ijk[2])]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_grid(other)?;
        Ok(ScalarField::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Index of the (first) largest value.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        best
    }

    pub(crate) fn check_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        ScalarField::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&rhs.values)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        ScalarField::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&rhs.values)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        self.map(|v| v * rhs)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.map(|v| -v)
    }
}

/// Three scalar components on one shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    comps: [ScalarField; 3],
}

impl VectorField {
    pub fn new(x: ScalarField, y: ScalarField, z: ScalarField) -> Result<Self> {
        x.check_grid(&y)?;
        x.check_grid(&z)?;
        Ok(VectorField { comps: [x, y, z] })
    }

    pub(crate) fn from_components(comps: [ScalarField; 3]) -> Self {
        debug_assert!(comps[0].grid == comps[1].grid && comps[0].grid == comps[2].grid);
        VectorField { comps }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        VectorField::from_components(std::array::from_fn(|_| ScalarField::zeros(grid)))
    }

    pub fn constant(grid: GridSpec, value: [f64; 3]) -> Self {
        VectorField::from_components(std::array::from_fn(|a| {
            ScalarField::constant(grid, value[a])
        }))
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let samples: Vec<[f64; 3]> = (0..grid.len())
            .map(|idx| f(grid.coords(grid.unravel(idx))))
            .collect();
        VectorField::from_components(std::array::from_fn(|a| {
            ScalarField::from_raw(grid, samples.iter().map(|s| s[a]).collect())
        }))
    }

    pub fn grid(&self) -> &GridSpec {
        self.comps[0].grid()
    }

    pub fn component(&self, axis: usize) -> &ScalarField {
        &self.comps[axis]
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [ScalarField; 3] {
        self.comps
    }

    pub fn at(&self, ijk: [usize; 3]) -> [f64; 3] {
        std::array::from_fn(|a| self.comps[a].at(ijk))
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(ScalarField::is_finite)
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        VectorField::from_components(std::array::from_fn(|a| f(&self.comps[a])))
    }

    /// Largest absolute component value, the C-norm of the field.
    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .map(ScalarField::max_abs)
            .fold(0.0, f64::max)
    }

    /// Largest Euclidean magnitude over nodes.
    pub fn max_magnitude(&self) -> f64 {
        (0..self.grid().len())
            .map(|i| {
                self.comps
                    .iter()
                    .map(|c| c.values()[i].powi(2))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
            .sqrt()
    }

    /// Copy with every boundary node of a box grid set to zero.
    pub fn with_zero_boundary(&self) -> Self {
        let grid = *self.grid();
        self.map_components(|c| {
            let mut v = c.values().to_vec();
            for (idx, val) in v.iter_mut().enumerate() {
                if grid.is_boundary_node(grid.unravel(idx)) {
                    *val = 0.0;
                }
            }
            ScalarField::from_raw(grid, v)
        })
    }

    pub(crate) fn check_grid(&self, other: &VectorField) -> Result<()> {
        self.comps[0].check_grid(&other.comps[0])
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        VectorField::from_components(std::array::from_fn(|a| &self.comps[a] + &rhs.comps[a]))
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        VectorField::from_components(std::array::from_fn(|a| &self.comps[a] - &rhs.comps[a]))
    }
}

impl Mul<f64> for &VectorField {
    type Output = VectorField;
    fn mul(self, rhs: f64) -> VectorField {
        self.map_components(|c| c * rhs)
    }
}

/// `a + s * b`, the update used by every explicit stage.
pub fn axpy(a: &VectorField, s: f64, b: &VectorField) -> VectorField {
    VectorField::from_components(std::array::from_fn(|c| {
        let (x, y) = (a.component(c), b.component(c));
        ScalarField::from_raw(
            *x.grid(),
            x.values()
                .iter()
                .zip(y.values())
                .map(|(p, q)| p + s * q)
                .collect(),
        )
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_wrong_length() {
        let g = GridSpec::periodic([4, 4, 1], [1.0; 3]).unwrap();
        let mut v = vec![0.0; 16];
        v[5] = f64::NAN;
        assert!(matches!(
            ScalarField::new(g, v),
            Err(Error::NonFinite { index: 5 })
        ));
        assert!(matches!(
            ScalarField::new(g, vec![0.0; 3]),
            Err(Error::LengthMismatch {
                expected: 16,
                got: 3
            })
        ));
    }

    #[test]
    fn vector_components_must_share_grid() {
        let a = GridSpec::periodic([4, 4, 1], [1.0; 3]).unwrap();
        let b = GridSpec::periodic([4, 4, 1], [2.0, 1.0, 1.0]).unwrap();
        let err = VectorField::new(
            ScalarField::zeros(a),
            ScalarField::zeros(b),
            ScalarField::zeros(a),
        );
        assert!(matches!(err, Err(Error::GridMismatch)));
    }

    #[test]
    fn zero_boundary_clears_walls_only() {
        use crate::fields::{Boundary, Scheme};
        let g = GridSpec::new(
            [4, 4, 4],
            [1.0; 3],
            Boundary::NoSlipBox,
            Scheme::FiniteDifference,
        )
        .unwrap();
        let v = VectorField::constant(g, [1.0, 2.0, 3.0]).with_zero_boundary();
        assert_eq!(v.at([1, 1, 1]), [1.0, 2.0, 3.0]);
        assert_eq!(v.at([0, 1, 2]), [0.0; 3]);
        assert_eq!(v.at([1, 3, 2]), [0.0; 3]);
    }
}

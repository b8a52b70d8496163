use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Periodic in every direction; nodes at `i * l / n`.
    Periodic,
    /// Closed box with solid walls; nodes include both walls at `i * l / (n - 1)`.
    NoSlipBox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Spectral,
    FiniteDifference,
}

/// Collocated structured grid over the box `[0, lx] x [0, ly] x [0, lz]`.
///
/// A direction with a single node is an invariant direction: every
/// derivative along it is zero. Only periodic grids may have one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub lx: f64,
    pub ly: f64,
    pub lz: f64,
    pub bc: Boundary,
    pub scheme: Scheme,
}

pub const MIN_ACTIVE_NODES: usize = 4;

impl GridSpec {
    pub fn new(dims: [usize; 3], lengths: [f64; 3], bc: Boundary, scheme: Scheme) -> Result<Self> {
        let grid = GridSpec {
            nx: dims[0],
            ny: dims[1],
            nz: dims[2],
            lx: lengths[0],
            ly: lengths[1],
            lz: lengths[2],
            bc,
            scheme,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Periodic spectral grid, the configuration most checks run on.
    pub fn periodic(dims: [usize; 3], lengths: [f64; 3]) -> Result<Self> {
        Self::new(dims, lengths, Boundary::Periodic, Scheme::Spectral)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scheme == Scheme::Spectral && self.bc != Boundary::Periodic {
            return Err(Error::InvalidGrid(
                "spectral scheme requires periodic boundaries".into(),
            ));
        }
        for (axis, (&n, &l)) in self.dims().iter().zip(self.lengths().iter()).enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "length along axis {axis} must be positive"
                )));
            }
            match n {
                0 => return Err(Error::InvalidGrid(format!("axis {axis} has no nodes"))),
                1 if self.bc == Boundary::Periodic => {}
                n if n < MIN_ACTIVE_NODES => {
                    return Err(Error::InvalidGrid(format!(
                        "axis {axis} needs at least {MIN_ACTIVE_NODES} nodes, got {n}"
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn lengths(&self) -> [f64; 3] {
        [self.lx, self.ly, self.lz]
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_active(&self, axis: usize) -> bool {
        self.dims()[axis] > 1
    }

    pub fn active_axes(&self) -> Vec<usize> {
        (0..3).filter(|&a| self.is_active(a)).collect()
    }

    pub fn spacing(&self) -> [f64; 3] {
        let d = self.dims();
        let l = self.lengths();
        std::array::from_fn(|a| match self.bc {
            Boundary::Periodic => l[a] / d[a] as f64,
            Boundary::NoSlipBox => l[a] / (d[a] - 1) as f64,
        })
    }

    /// Largest spacing over the active directions.
    pub fn max_spacing(&self) -> f64 {
        let h = self.spacing();
        self.active_axes().iter().map(|&a| h[a]).fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        let h = self.spacing();
        self.active_axes()
            .iter()
            .map(|&a| h[a])
            .fold(f64::INFINITY, f64::min)
    }

    /// Shortest box side over the active directions.
    pub fn min_active_length(&self) -> f64 {
        let l = self.lengths();
        self.active_axes()
            .iter()
            .map(|&a| l[a])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn volume(&self) -> f64 {
        self.lx * self.ly * self.lz
    }

    /// Flat index, x fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nx * (j + self.ny * k)
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.nx;
        let j = (idx / self.nx) % self.ny;
        let k = idx / (self.nx * self.ny);
        [i, j, k]
    }

    pub fn coords(&self, ijk: [usize; 3]) -> [f64; 3] {
        let h = self.spacing();
        std::array::from_fn(|a| ijk[a] as f64 * h[a])
    }

    pub fn is_boundary_node(&self, ijk: [usize; 3]) -> bool {
        match self.bc {
            Boundary::Periodic => false,
            Boundary::NoSlipBox => {
                let d = self.dims();
                (0..3).any(|a| ijk[a] == 0 || ijk[a] == d[a] - 1)
            }
        }
    }

    /// One-dimensional quadrature weights along an axis: uniform for
    /// periodic grids, trapezoid for the box.
    pub fn axis_weights(&self, axis: usize) -> Vec<f64> {
        let n = self.dims()[axis];
        let h = self.spacing()[axis];
        match self.bc {
            Boundary::Periodic => vec![h; n],
            Boundary::NoSlipBox => (0..n)
                .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
                .collect(),
        }
    }

    /// Full tensor-product quadrature weights; they sum to the box volume.
    pub fn weights(&self) -> Vec<f64> {
        let wx = self.axis_weights(0);
        let wy = self.axis_weights(1);
        let wz = self.axis_weights(2);
        let mut w = Vec::with_capacity(self.len());
        for z in &wz {
            for y in &wy {
                for x in &wx {
                    w.push(x * y * z);
                }
            }
        }
        w
    }

    /// Same grid at a different resolution along the active directions.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let d = self.dims();
        let dims = std::array::from_fn(|a| {
            if d[a] == 1 {
                1
            } else {
                match self.bc {
                    Boundary::Periodic => d[a] * factor,
                    Boundary::NoSlipBox => (d[a] - 1) * factor + 1,
                }
            }
        });
        Self::new(dims, self.lengths(), self.bc, self.scheme)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_box_is_rejected() {
        let err = GridSpec::new([8, 8, 8], [1.0; 3], Boundary::NoSlipBox, Scheme::Spectral);
        assert!(matches!(err, Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn degenerate_direction_only_when_periodic() {
        assert!(GridSpec::periodic([16, 16, 1], [1.0; 3]).is_ok());
        let err = GridSpec::new(
            [16, 16, 1],
            [1.0; 3],
            Boundary::NoSlipBox,
            Scheme::FiniteDifference,
        );
        assert!(err.is_err());
        assert!(GridSpec::periodic([16, 3, 1], [1.0; 3]).is_err());
    }

    #[test]
    fn spacing_follows_boundary_kind() {
        let p = GridSpec::periodic([8, 4, 1], [2.0, 1.0, 3.0]).unwrap();
        assert_eq!(p.spacing(), [0.25, 0.25, 3.0]);
        let b = GridSpec::new(
            [5, 5, 5],
            [2.0, 1.0, 4.0],
            Boundary::NoSlipBox,
            Scheme::FiniteDifference,
        )
        .unwrap();
        assert_eq!(b.spacing(), [0.5, 0.25, 1.0]);
    }

    #[test]
    fn weights_sum_to_volume() {
        let b = GridSpec::new(
            [5, 6, 7],
            [2.0, 1.0, 4.0],
            Boundary::NoSlipBox,
            Scheme::FiniteDifference,
        )
        .unwrap();
        let v: f64 = b.weights().iter().sum();
        assert!((v - 8.0).abs() < 1e-12);
        let p = GridSpec::periodic([8, 4, 1], [2.0, 1.0, 3.0]).unwrap();
        let v: f64 = p.weights().iter().sum();
        assert!((v - 6.0).abs() < 1e-12);
    }

    #[test]
    fn index_roundtrip() {
        let g = GridSpec::periodic([5, 4, 6], [1.0; 3]).unwrap();
        for idx in 0..g.len() {
            let [i, j, k] = g.unravel(idx);
            assert_eq!(g.index(i, j, k), idx);
        }
    }
}

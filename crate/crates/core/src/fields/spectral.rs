//! Fourier collocation on periodic grids.
//!
//! Derivatives multiply by exact wavenumbers. The Nyquist wavenumber of an
//! even-length axis is treated as zero for every derivative, so the discrete
//! Laplacian equals `divergence(gradient)` exactly and the Leray projector is
//! an exact orthogonal projector on the discrete space.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::fields::{GridSpec, ScalarField};

type PlanKey = (usize, bool);
type PlanCache = Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>;

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<PlanCache> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().expect("fft plan cache poisoned");
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

/// Complex transform of a field on a periodic grid (unnormalized forward).
#[derive(Debug, Clone)]
pub(crate) struct Spectrum {
    pub grid: GridSpec,
    pub data: Vec<Complex64>,
}

/// Applies a 1-D FFT along `axis` to every line of a 3-D x-fastest array.
pub(crate) fn transform_axis(data: &mut [Complex64], dims: [usize; 3], axis: usize, inverse: bool) {
    let n = dims[axis];
    if n <= 1 {
        return;
    }
    let fft = plan(n, inverse);
    if axis == 0 {
        fft.process(data);
        return;
    }
    let [nx, ny, nz] = dims;
    let stride = if axis == 1 { nx } else { nx * ny };
    let lines = data.len() / n;
    let mut buf = vec![Complex64::default(); data.len()];
    let line_start = |line: usize| -> usize {
        if axis == 1 {
            let (i, k) = (line % nx, line / nx);
            i + nx * ny * k
        } else {
            line
        }
    };
    debug_assert_eq!(lines, if axis == 1 { nx * nz } else { nx * ny });
    for line in 0..lines {
        let start = line_start(line);
        for m in 0..n {
            buf[line * n + m] = data[start + m * stride];
        }
    }
    fft.process(&mut buf);
    for line in 0..lines {
        let start = line_start(line);
        for m in 0..n {
            data[start + m * stride] = buf[line * n + m];
        }
    }
}

pub(crate) fn forward(s: &ScalarField) -> Spectrum {
    let grid = *s.grid();
    let mut data: Vec<Complex64> = s.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for axis in 0..3 {
        transform_axis(&mut data, grid.dims(), axis, false);
    }
    Spectrum { grid, data }
}

pub(crate) fn inverse(mut sp: Spectrum) -> ScalarField {
    for axis in 0..3 {
        transform_axis(&mut sp.data, sp.grid.dims(), axis, true);
    }
    let scale = 1.0 / sp.grid.len() as f64;
    ScalarField::from_raw(sp.grid, sp.data.iter().map(|c| c.re * scale).collect())
}

/// Signed integer mode numbers along an axis in FFT order.
pub(crate) fn mode_numbers(n: usize) -> Vec<i64> {
    (0..n)
        .map(|m| {
            let m = m as i64;
            let n = n as i64;
            if 2 * m < n {
                m
            } else {
                m - n
            }
        })
        .collect()
}

/// Wavenumbers used for differentiation (Nyquist mode mapped to zero).
pub(crate) fn wavenumbers(grid: &GridSpec, axis: usize) -> Vec<f64> {
    let n = grid.dims()[axis];
    let scale = 2.0 * PI / grid.lengths()[axis];
    mode_numbers(n)
        .into_iter()
        .map(|m| {
            if n.is_multiple_of(2) && m == -(n as i64) / 2 {
                0.0
            } else {
                m as f64 * scale
            }
        })
        .collect()
}

impl Spectrum {
    /// Multiplies every coefficient by `symbol(kx, ky, kz)`.
    pub fn apply(&self, symbol: impl Fn([f64; 3]) -> Complex64) -> Spectrum {
        let k: [Vec<f64>; 3] = std::array::from_fn(|a| wavenumbers(&self.grid, a));
        let [nx, ny, _] = self.grid.dims();
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                let (i, j, l) = (idx % nx, (idx / nx) % ny, idx / (nx * ny));
                c * symbol([k[0][i], k[1][j], k[2][l]])
            })
            .collect();
        Spectrum {
            grid: self.grid,
            data,
        }
    }

    pub fn derivative(&self, axis: usize) -> Spectrum {
        self.apply(|k| Complex64::new(0.0, k[axis]))
    }

    pub fn second_derivative(&self, a: usize, b: usize) -> Spectrum {
        self.apply(|k| Complex64::new(-k[a] * k[b], 0.0))
    }

    pub fn laplacian(&self) -> Spectrum {
        self.apply(|k| Complex64::new(-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]), 0.0))
    }

    /// 2/3-rule truncation: keeps modes with `|m| <= n/3` along each active axis.
    pub fn dealiased(&self) -> Spectrum {
        self.truncated(3)
    }

    /// Keeps modes with `|m| <= n/divisor` along each active axis.
    pub fn truncated(&self, divisor: usize) -> Spectrum {
        let modes: [Vec<i64>; 3] = std::array::from_fn(|a| mode_numbers(self.grid.dims()[a]));
        let dims = self.grid.dims();
        let cut: [i64; 3] = std::array::from_fn(|a| (dims[a] / divisor) as i64);
        let [nx, ny, _] = dims;
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                let ijk = [idx % nx, (idx / nx) % ny, idx / (nx * ny)];
                let keep = (0..3).all(|a| dims[a] == 1 || modes[a][ijk[a]].abs() <= cut[a]);
                if keep {
                    c
                } else {
                    Complex64::default()
                }
            })
            .collect();
        Spectrum {
            grid: self.grid,
            data,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_identity() {
        let g = GridSpec::periodic([8, 6, 4], [1.0, 2.0, 3.0]).unwrap();
        let s = ScalarField::from_fn(g, |[x, y, z]| x * x + (y * 3.0).sin() - z);
        let back = inverse(forward(&s));
        for (a, b) in s.values().iter().zip(back.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn mode_numbers_are_signed() {
        assert_eq!(mode_numbers(6), vec![0, 1, 2, -3, -2, -1]);
        assert_eq!(mode_numbers(5), vec![0, 1, 2, -2, -1]);
        assert_eq!(mode_numbers(1), vec![0]);
    }

    #[test]
    fn nyquist_wavenumber_is_zeroed() {
        let g = GridSpec::periodic([4, 1, 1], [2.0 * PI, 1.0, 1.0]).unwrap();
        assert_eq!(wavenumbers(&g, 0), vec![0.0, 1.0, 0.0, -1.0]);
    }
}

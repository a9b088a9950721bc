//! Dimension-wise type-II/III cosine transforms used to diagonalize the
//! Neumann Laplacian. Plans are cached globally per line length.
//!
//! Conventions (unnormalized, matching the plain basis
//! `cos(pi k (2n+1) / (2N))`):
//!   forward:  `X_k = sum_n x_n cos(...)`
//!   inverse:  `x_n = (2/N) * [X_0/2 + sum_{k>=1} X_k cos(...)]`
//! so `inverse(forward(x)) == x` up to rounding. The `2/N` factor is folded
//! into the caller's spectral loop for efficiency.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rustdct::{DctPlanner, TransformType2And3};

use crate::grid::Grid;

static PLANS: Lazy<Mutex<HashMap<usize, Arc<dyn TransformType2And3<f64>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plan(n: usize) -> Arc<dyn TransformType2And3<f64>> {
    let mut cache = PLANS.lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| DctPlanner::new().plan_dct2(n))
        .clone()
}

enum Direction {
    Forward,
    Inverse,
}

fn transform_axis(grid: Grid, axis: usize, data: &mut [f64], dir: Direction) {
    let [nx, ny, nz] = grid.shape();
    let counts = [nx, ny, nz];
    let n = counts[axis];
    if n == 1 {
        return;
    }
    let p = plan(n);
    match axis {
        0 => {
            for line in data.chunks_exact_mut(nx) {
                match dir {
                    Direction::Forward => p.process_dct2(line),
                    Direction::Inverse => p.process_dct3(line),
                }
            }
        }
        _ => {
            let stride = if axis == 1 { nx } else { nx * ny };
            let (outer, inner) = if axis == 1 { (nz, nx) } else { (ny, nx) };
            let mut line = vec![0.0; n];
            for o in 0..outer {
                for i in 0..inner {
                    let base = if axis == 1 { o * nx * ny + i } else { o * nx + i };
                    for j in 0..n {
                        line[j] = data[base + j * stride];
                    }
                    match dir {
                        Direction::Forward => p.process_dct2(&mut line),
                        Direction::Inverse => p.process_dct3(&mut line),
                    }
                    for j in 0..n {
                        data[base + j * stride] = line[j];
                    }
                }
            }
        }
    }
}

/// In-place forward DCT-II along every active axis.
pub(crate) fn forward(grid: Grid, data: &mut [f64]) {
    for axis in 0..grid.dim() {
        transform_axis(grid, axis, data, Direction::Forward);
    }
}

/// In-place inverse (DCT-III) along every active axis, *without* the
/// `prod(2/N)` normalization; see [`normalization`].
pub(crate) fn inverse(grid: Grid, data: &mut [f64]) {
    for axis in 0..grid.dim() {
        transform_axis(grid, axis, data, Direction::Inverse);
    }
}

/// Factor the caller must multiply in (once per point) so that
/// `inverse(forward(x)) * normalization == x`.
pub(crate) fn normalization(grid: Grid) -> f64 {
    (0..grid.dim()).map(|a| 2.0 / grid.shape()[a] as f64).product()
}

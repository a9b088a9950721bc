//! Uniform cell-centered tensor grids on the unit interval/square/cube with
//! homogeneous Neumann boundaries, plus the discrete operators and norms used
//! throughout the solver.
//!
//! Points sit at cell centers `x_i = (i + 1/2) h` with `h = 1/N` per axis.
//! The discrete Laplacian uses the second-order 3/5/7-point stencil with
//! mirror ghosts (`u_{-1} = u_0`, `u_N = u_{N-1}`), which realizes the
//! zero-flux condition at second order and is diagonalized exactly by the
//! type-II cosine transform.

use crate::error::{Error, Result};

/// Uniform cell-centered grid on `[0,1]^dim`.
///
/// Storage order of fields on this grid is axis-major with x fastest:
/// `idx = ix + nx * (iy + ny * iz)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    shape: [usize; 3],
    dim: usize,
}

impl Grid {
    /// Grid with `cells[a]` cells along each of the first `cells.len()` axes.
    pub fn new(cells: &[usize]) -> Result<Grid> {
        if cells.is_empty() || cells.len() > 3 {
            return Err(Error::config("grid", "dimension must be 1, 2 or 3"));
        }
        let mut shape = [1usize; 3];
        for (a, &n) in cells.iter().enumerate() {
            if n < 2 {
                return Err(Error::config("grid", format!("axis {a} needs at least 2 cells")));
            }
            shape[a] = n;
        }
        Ok(Grid { shape, dim: cells.len() })
    }

    pub fn line(nx: usize) -> Result<Grid> {
        Grid::new(&[nx])
    }

    pub fn cube(n: usize) -> Result<Grid> {
        Grid::new(&[n, n, n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cell counts per axis; unused axes read 1.
    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1] * self.shape[2]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Mesh spacing along `axis`; `spacing * cells == 1` exactly.
    pub fn spacing(&self, axis: usize) -> f64 {
        1.0 / self.shape[axis] as f64
    }

    /// Cell volume `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    /// Physical coordinates of the cell center with flat index `idx`.
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let [nx, ny, _] = self.shape;
        let ix = idx % nx;
        let iy = (idx / nx) % ny;
        let iz = idx / (nx * ny);
        [
            (ix as f64 + 0.5) * self.spacing(0),
            (iy as f64 + 0.5) * self.spacing(1),
            (iz as f64 + 0.5) * self.spacing(2),
        ]
    }

    /// Eigenvalues of the Neumann Laplacian along `axis`, ordered by cosine
    /// mode index: `lambda_k = -(4/h^2) sin^2(k pi / (2N))`.
    pub fn neumann_eigenvalues(&self, axis: usize) -> Vec<f64> {
        let n = self.shape[axis];
        let h = self.spacing(axis);
        (0..n)
            .map(|k| {
                let s = (k as f64 * std::f64::consts::PI / (2.0 * n as f64)).sin();
                -(4.0 / (h * h)) * s * s
            })
            .collect()
    }
}

/// Real-valued samples on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> ScalarField {
        ScalarField { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: Grid, value: f64) -> ScalarField {
        ScalarField { grid, values: vec![value; grid.len()] }
    }

    /// Builds from raw values, rejecting shape mismatch and non-finite data.
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<ScalarField> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch("value count differs from grid point count"));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("scalar field values"));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> ScalarField {
        let values = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        ScalarField { grid, values }
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> ScalarField {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Three-component vector field; the magnetization state object.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    comps: [ScalarField; 3],
}

impl VectorField {
    pub fn zeros(grid: Grid) -> VectorField {
        VectorField {
            comps: [
                ScalarField::zeros(grid),
                ScalarField::zeros(grid),
                ScalarField::zeros(grid),
            ],
        }
    }

    pub fn uniform(grid: Grid, v: [f64; 3]) -> VectorField {
        VectorField {
            comps: [
                ScalarField::constant(grid, v[0]),
                ScalarField::constant(grid, v[1]),
                ScalarField::constant(grid, v[2]),
            ],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> VectorField {
        let mut out = VectorField::zeros(grid);
        for i in 0..grid.len() {
            let v = f(grid.coords(i));
            out.comps[0].values[i] = v[0];
            out.comps[1].values[i] = v[1];
            out.comps[2].values[i] = v[2];
        }
        out
    }

    pub fn from_components(c: [ScalarField; 3]) -> Result<VectorField> {
        if c[0].grid != c[1].grid || c[0].grid != c[2].grid {
            return Err(Error::GridMismatch("vector field components on different grids"));
        }
        Ok(VectorField { comps: c })
    }

    /// Builds a magnetization field, enforcing `| |m| - 1 | <= tol` pointwise.
    pub fn unit_from_fn(grid: Grid, tol: f64, f: impl Fn([f64; 3]) -> [f64; 3]) -> Result<VectorField> {
        let out = VectorField::from_fn(grid, f);
        let dev = norm_drift(&out);
        if !dev.is_finite() {
            return Err(Error::NonFinite("magnetization field"));
        }
        if dev > tol {
            return Err(Error::NotUnit { max_dev: dev, tol });
        }
        Ok(out)
    }

    pub fn grid(&self) -> Grid {
        self.comps[0].grid
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.comps[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut ScalarField {
        &mut self.comps[i]
    }

    pub fn at(&self, idx: usize) -> [f64; 3] {
        [
            self.comps[0].values[idx],
            self.comps[1].values[idx],
            self.comps[2].values[idx],
        ]
    }

    pub fn set_at(&mut self, idx: usize, v: [f64; 3]) {
        self.comps[0].values[idx] = v[0];
        self.comps[1].values[idx] = v[1];
        self.comps[2].values[idx] = v[2];
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.is_finite())
    }

    /// Largest absolute component value over the whole field.
    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.values.iter())
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

/// Error norms of `u - v` in the three measures reported by the verification
/// harness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    pub linf: f64,
    pub l2: f64,
    pub h1: f64,
}

/// Second-order Neumann Laplacian `sum_axis (u_{i-1} - 2 u_i + u_{i+1}) / h^2`
/// with mirror ghosts at both walls.
pub fn laplacian(u: &ScalarField) -> Result<ScalarField> {
    if !u.is_finite() {
        return Err(Error::NonFinite("laplacian input"));
    }
    let mut out = ScalarField::zeros(u.grid());
    laplacian_into(u.grid(), u.values(), out.values_mut());
    Ok(out)
}

/// Unchecked stencil kernel shared by the solvers and time steppers.
pub(crate) fn laplacian_into(grid: Grid, src: &[f64], dst: &mut [f64]) {
    let [nx, ny, nz] = grid.shape();
    dst.fill(0.0);
    let strides = [1usize, nx, nx * ny];
    let counts = [nx, ny, nz];
    for axis in 0..grid.dim() {
        let n = counts[axis];
        if n == 1 {
            continue;
        }
        let stride = strides[axis];
        let inv_h2 = {
            let h = grid.spacing(axis);
            1.0 / (h * h)
        };
        // iterate over all lines along `axis`
        let (outer, inner) = match axis {
            0 => (ny * nz, 1),
            1 => (nz, nx),
            _ => (ny, nx),
        };
        for o in 0..outer {
            for i in 0..inner {
                let base = match axis {
                    0 => o * nx,
                    1 => o * nx * ny + i,
                    _ => o * nx + i,
                };
                for j in 0..n {
                    let c = base + j * stride;
                    let left = if j == 0 { src[c] } else { src[c - stride] };
                    let right = if j == n - 1 { src[c] } else { src[c + stride] };
                    dst[c] += (left - 2.0 * src[c] + right) * inv_h2;
                }
            }
        }
    }
}

pub(crate) fn laplacian_vector_into(m: &VectorField, out: &mut VectorField) {
    let grid = m.grid();
    for i in 0..3 {
        laplacian_into(grid, m.component(i).values(), out.component_mut(i).values_mut());
    }
}

/// Squared discrete H1 seminorm: `h^d * sum (forward difference / h)^2`
/// over all axes and components, one-sided at the high wall.
pub fn gradient_sq_sum(u: &VectorField) -> f64 {
    let grid = u.grid();
    let [nx, ny, nz] = grid.shape();
    let strides = [1usize, nx, nx * ny];
    let counts = [nx, ny, nz];
    let mut total = 0.0;
    for axis in 0..grid.dim() {
        let n = counts[axis];
        if n == 1 {
            continue;
        }
        let stride = strides[axis];
        let inv_h = 1.0 / grid.spacing(axis);
        let (outer, inner) = match axis {
            0 => (ny * nz, 1),
            1 => (nz, nx),
            _ => (ny, nx),
        };
        for comp in 0..3 {
            let vals = u.component(comp).values();
            for o in 0..outer {
                for i in 0..inner {
                    let base = match axis {
                        0 => o * nx,
                        1 => o * nx * ny + i,
                        _ => o * nx + i,
                    };
                    for j in 0..n - 1 {
                        let c = base + j * stride;
                        let d = (vals[c + stride] - vals[c]) * inv_h;
                        total += d * d;
                    }
                }
            }
        }
    }
    grid.cell_volume() * total
}

/// Pointwise error norms between two fields on the same grid.
///
/// `linf` maximizes over points and components, `l2` is the cell-weighted
/// vector L2 norm, and `h1 = sqrt(l2^2 + |grad e|^2)` with forward
/// differences.
pub fn error_norms(u: &VectorField, v: &VectorField) -> Result<ErrorNorms> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch("error_norms operands"));
    }
    let grid = u.grid();
    let mut diff = VectorField::zeros(grid);
    let mut linf = 0.0f64;
    let mut sumsq = 0.0f64;
    for c in 0..3 {
        let a = u.component(c).values();
        let b = v.component(c).values();
        let d = diff.component_mut(c).values_mut();
        for i in 0..a.len() {
            let e = a[i] - b[i];
            d[i] = e;
            linf = linf.max(e.abs());
            sumsq += e * e;
        }
    }
    let l2 = (grid.cell_volume() * sumsq).sqrt();
    let h1 = (l2 * l2 + gradient_sq_sum(&diff)).sqrt();
    Ok(ErrorNorms { linf, l2, h1 })
}

/// Maximum pointwise deviation of `|m|` from one; the structure-preservation
/// metric.
pub fn norm_drift(m: &VectorField) -> f64 {
    let x = m.component(0).values();
    let y = m.component(1).values();
    let z = m.component(2).values();
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let n = (x[i] * x[i] + y[i] * y[i] + z[i] * z[i]).sqrt();
        worst = worst.max((n - 1.0).abs());
    }
    worst
}

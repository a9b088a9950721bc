//! Closed-form reference solutions, their analytic forcing terms, and the
//! catalog of initial conditions used by the verification studies.
//!
//! Both reference solutions share the ansatz
//! `m = (cos(phi) sin t, sin(phi) sin t, cos t)` with a time-independent
//! angle `phi(x)`; this is exactly unit length and satisfies the Neumann
//! condition because `phi` has vanishing normal derivative on the walls.
//! The forcing is the residual of the unforced equation, so `m` solves
//!
//! ```text
//! m_t = -m x (eps lap m) - alpha m x (m x (eps lap m)) + f
//! ```
//!
//! identically. Derivatives are hand-derived; a finite-difference oracle in
//! the tests guards the derivation.

use std::f64::consts::PI;

use crate::cayley::cross;
use crate::error::{Error, Result};
use crate::grid::{Grid, VectorField};

/// Which closed-form reference solution to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManufacturedCase {
    /// `phi(x) = cos(pi x)` on the unit interval.
    OneD,
    /// `phi(x,y,z) = X Y Z` with `X = x^2 (1-x)^2` etc. on the unit cube.
    ThreeD,
}

impl ManufacturedCase {
    pub fn dim(&self) -> usize {
        match self {
            ManufacturedCase::OneD => 1,
            ManufacturedCase::ThreeD => 3,
        }
    }

    pub fn for_dim(dim: usize) -> Result<ManufacturedCase> {
        match dim {
            1 => Ok(ManufacturedCase::OneD),
            3 => Ok(ManufacturedCase::ThreeD),
            _ => Err(Error::config("dim", "reference solutions exist for 1D and 3D only")),
        }
    }

    /// Angle `phi`, its squared gradient and its Laplacian at a point.
    fn angle(&self, p: [f64; 3]) -> (f64, f64, f64) {
        match self {
            ManufacturedCase::OneD => {
                let phi = (PI * p[0]).cos();
                let dphi = -PI * (PI * p[0]).sin();
                let d2phi = -PI * PI * (PI * p[0]).cos();
                (phi, dphi * dphi, d2phi)
            }
            ManufacturedCase::ThreeD => {
                let (x, dx, d2x) = bump(p[0]);
                let (y, dy, d2y) = bump(p[1]);
                let (z, dz, d2z) = bump(p[2]);
                let phi = x * y * z;
                let grad2 = (dx * y * z).powi(2) + (x * dy * z).powi(2) + (x * y * dz).powi(2);
                let lap = d2x * y * z + x * d2y * z + x * y * d2z;
                (phi, grad2, lap)
            }
        }
    }

    /// Exact solution at a point.
    pub fn exact_point(&self, p: [f64; 3], t: f64) -> [f64; 3] {
        let (phi, _, _) = self.angle(p);
        let (s, c) = t.sin_cos();
        [phi.cos() * s, phi.sin() * s, c]
    }

    /// Analytic time derivative.
    pub fn dt_point(&self, p: [f64; 3], t: f64) -> [f64; 3] {
        let (phi, _, _) = self.angle(p);
        let (s, c) = t.sin_cos();
        [phi.cos() * c, phi.sin() * c, -s]
    }

    /// Analytic Laplacian.
    pub fn laplacian_point(&self, p: [f64; 3], t: f64) -> [f64; 3] {
        let (phi, grad2, lap) = self.angle(p);
        let s = t.sin();
        [
            (-phi.cos() * grad2 - phi.sin() * lap) * s,
            (-phi.sin() * grad2 + phi.cos() * lap) * s,
            0.0,
        ]
    }

    /// Residual forcing that makes the exact solution solve the damped
    /// equation with exchange strength `epsilon`.
    pub fn forcing_point(&self, p: [f64; 3], t: f64, alpha: f64, epsilon: f64) -> [f64; 3] {
        let m = self.exact_point(p, t);
        let lap = self.laplacian_point(p, t);
        let field = [epsilon * lap[0], epsilon * lap[1], epsilon * lap[2]];
        let mxh = cross(m, field);
        let mxmxh = cross(m, mxh);
        let dm = self.dt_point(p, t);
        [
            dm[0] + mxh[0] + alpha * mxmxh[0],
            dm[1] + mxh[1] + alpha * mxmxh[1],
            dm[2] + mxh[2] + alpha * mxmxh[2],
        ]
    }

    /// Exact solution sampled at the cell centers of `grid`.
    pub fn exact_field(&self, grid: Grid, t: f64) -> Result<VectorField> {
        if grid.dim() != self.dim() {
            return Err(Error::GridMismatch("grid dimension does not match reference case"));
        }
        Ok(VectorField::from_fn(grid, |p| self.exact_point(p, t)))
    }

    pub fn forcing_field(&self, grid: Grid, t: f64, alpha: f64, epsilon: f64) -> Result<VectorField> {
        if grid.dim() != self.dim() {
            return Err(Error::GridMismatch("grid dimension does not match reference case"));
        }
        Ok(VectorField::from_fn(grid, |p| self.forcing_point(p, t, alpha, epsilon)))
    }
}

/// `X(w) = w^2 (1-w)^2` with first and second derivatives.
fn bump(w: f64) -> (f64, f64, f64) {
    let x = w * w * (1.0 - w) * (1.0 - w);
    let dx = 2.0 * w - 6.0 * w * w + 4.0 * w * w * w;
    let d2x = 2.0 - 12.0 * w + 12.0 * w * w;
    (x, dx, d2x)
}

/// One entry of the initial-condition catalog: `m0` is always of the form
/// `(cos(psi) sin(theta), sin(psi) sin(theta), cos(theta))`, unit length by
/// construction.
struct IcEntry {
    name: &'static str,
    dim: usize,
    psi: fn([f64; 3]) -> f64,
    theta: fn([f64; 3]) -> f64,
    /// odd cell counts put a cell center on the tan(pi x) pole at x = 1/2
    even_only: bool,
}

const SIN_ARG: f64 = 0.01;

fn big_x(p: [f64; 3]) -> f64 {
    bump(p[0]).0
}

fn xyz(p: [f64; 3]) -> f64 {
    bump(p[0]).0 * bump(p[1]).0 * bump(p[2]).0
}

static CATALOG: &[IcEntry] = &[
    IcEntry { name: "1d_sin0", dim: 1, psi: |p| (PI * p[0]).cos(), theta: |_| 0.0, even_only: false },
    IcEntry { name: "1d_sin001", dim: 1, psi: |p| (PI * p[0]).cos(), theta: |_| SIN_ARG, even_only: false },
    IcEntry { name: "3d_cospx", dim: 3, psi: |p| (PI * p[0]).cos(), theta: |_| SIN_ARG, even_only: false },
    IcEntry { name: "3d_xt", dim: 3, psi: |p| (PI * p[0]).cos(), theta: |p| p[0], even_only: false },
    IcEntry { name: "3d_coscospx", dim: 3, psi: |p| (PI * p[0]).cos().cos(), theta: |p| PI * p[0], even_only: false },
    IcEntry { name: "3d_x2", dim: 3, psi: big_x, theta: |_| SIN_ARG, even_only: false },
    IcEntry { name: "3d_tan", dim: 3, psi: |p| (PI * p[0]).tan(), theta: |_| SIN_ARG, even_only: true },
    IcEntry { name: "3d_sum", dim: 3, psi: |p| 2.0 * (p[0] + p[1] + p[2]), theta: |_| SIN_ARG, even_only: false },
    IcEntry { name: "3d_cosxy", dim: 3, psi: |p| (PI * p[0]).cos() * (PI * p[1]).cos(), theta: |_| SIN_ARG, even_only: false },
    IcEntry { name: "3d_xyz", dim: 3, psi: xyz, theta: |_| SIN_ARG, even_only: false },
    IcEntry { name: "3d_cosxyz", dim: 3, psi: |p| (PI * p[0]).cos() * (PI * p[1]).cos() * (PI * p[2]).cos(), theta: |_| SIN_ARG, even_only: false },
];

/// Names of all catalog initial conditions, in catalog order.
pub fn ic_names() -> Vec<&'static str> {
    CATALOG.iter().map(|e| e.name).collect()
}

/// Samples a catalog initial condition on `grid`.
pub fn initial_condition(name: &str, grid: Grid) -> Result<VectorField> {
    let entry = CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownIc(name.to_string()))?;
    if grid.dim() != entry.dim {
        return Err(Error::IcUnsupported {
            name: name.to_string(),
            reason: format!("defined for {}D grids", entry.dim),
        });
    }
    if entry.even_only && grid.shape()[0] % 2 == 1 {
        return Err(Error::IcUnsupported {
            name: name.to_string(),
            reason: "odd cell count along x places a cell center on the pole at x = 1/2".into(),
        });
    }
    let psi = entry.psi;
    let theta = entry.theta;
    Ok(VectorField::from_fn(grid, move |p| {
        let (st, ct) = theta(p).sin_cos();
        [psi(p).cos() * st, psi(p).sin() * st, ct]
    }))
}

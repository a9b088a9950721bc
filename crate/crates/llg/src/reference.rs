//! Naive dense reference implementations used to validate the production
//! solvers and steppers on small grids.
//!
//! Everything here is deliberately independent of the fast paths: the
//! Laplacian is assembled as an explicit matrix, shifted systems are solved
//! by LU with partial pivoting, and the pointwise rotation system is solved
//! by generic 3x3 Gaussian elimination instead of the closed-form inverse.
//! Slow on purpose; keep grids at or below 64 points per axis in 1D and 8
//! per axis in 3D.

use crate::error::{Error, Result};
use crate::grid::{Grid, VectorField};
use crate::schemes::{Scheme, SchemeConfig};
use crate::source::SourceTerm;

/// Dense row-major matrix of the mirror-ghost Neumann Laplacian.
pub fn dense_laplacian(grid: Grid) -> Vec<f64> {
    let [nx, ny, nz] = grid.shape();
    let n = grid.len();
    let mut a = vec![0.0; n * n];
    let strides = [1usize, nx, nx * ny];
    let counts = [nx, ny, nz];
    for idx in 0..n {
        let ix = idx % nx;
        let iy = (idx / nx) % ny;
        let iz = idx / (nx * ny);
        let pos = [ix, iy, iz];
        for axis in 0..grid.dim() {
            let h = grid.spacing(axis);
            let w = 1.0 / (h * h);
            let lo = if pos[axis] == 0 { idx } else { idx - strides[axis] };
            let hi = if pos[axis] == counts[axis] - 1 { idx } else { idx + strides[axis] };
            a[idx * n + lo] += w;
            a[idx * n + hi] += w;
            a[idx * n + idx] -= 2.0 * w;
        }
    }
    a
}

/// LU factors with partial pivoting of a dense square matrix.
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
}

impl LuFactors {
    pub fn factor(mut a: Vec<f64>, n: usize) -> Result<LuFactors> {
        assert_eq!(a.len(), n * n);
        let mut piv = vec![0usize; n];
        for col in 0..n {
            let mut best = col;
            let mut best_val = a[col * n + col].abs();
            for row in col + 1..n {
                let v = a[row * n + col].abs();
                if v > best_val {
                    best = row;
                    best_val = v;
                }
            }
            if best_val == 0.0 {
                return Err(Error::SolverStalled { iterations: col, residual: f64::INFINITY });
            }
            piv[col] = best;
            if best != col {
                for k in 0..n {
                    a.swap(col * n + k, best * n + k);
                }
            }
            let d = a[col * n + col];
            for row in col + 1..n {
                let f = a[row * n + col] / d;
                a[row * n + col] = f;
                for k in col + 1..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
            }
        }
        Ok(LuFactors { n, lu: a, piv })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for col in 0..n {
            x.swap(col, self.piv[col]);
            let xc = x[col];
            for row in col + 1..n {
                x[row] -= self.lu[row * n + col] * xc;
            }
        }
        for col in (0..n).rev() {
            x[col] /= self.lu[col * n + col];
            let xc = x[col];
            for row in 0..col {
                x[row] -= self.lu[row * n + col] * xc;
            }
        }
        x
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Solves `(I - [w]x) out = (I + [w]x) m` by Gaussian elimination.
fn rotate_generic(m: [f64; 3], h: [f64; 3], alpha: f64, beta: f64) -> [f64; 3] {
    let mxh = cross(m, h);
    let w = [
        beta * (h[0] + alpha * mxh[0]),
        beta * (h[1] + alpha * mxh[1]),
        beta * (h[2] + alpha * mxh[2]),
    ];
    // left matrix I - [w]x
    let mut a = [
        [1.0, w[2], -w[1]],
        [-w[2], 1.0, w[0]],
        [w[1], -w[0], 1.0],
    ];
    let wxm = cross(w, m);
    let mut b = [m[0] + wxm[0], m[1] + wxm[1], m[2] + wxm[2]];
    // 3x3 partial-pivot elimination
    for col in 0..3 {
        let mut best = col;
        for row in col + 1..3 {
            if a[row][col].abs() > a[best][col].abs() {
                best = row;
            }
        }
        a.swap(col, best);
        b.swap(col, best);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for col in (0..3).rev() {
        let mut acc = b[col];
        for k in col + 1..3 {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    x
}

/// Dense mirror of the production steppers.
pub struct DenseStepper {
    grid: Grid,
    cfg: SchemeConfig,
    lap: Vec<f64>,
    predictor_lu: LuFactors,
    damping_lu: Option<LuFactors>,
}

impl DenseStepper {
    pub fn new(grid: Grid, cfg: SchemeConfig) -> Result<DenseStepper> {
        cfg.validate()?;
        let n = grid.len();
        let lap = dense_laplacian(grid);
        let shifted = |c: f64| {
            let mut m = lap.clone();
            for i in 0..n * n {
                m[i] = -c * m[i];
            }
            for i in 0..n {
                m[i * n + i] += 1.0;
            }
            m
        };
        let predictor_lu = LuFactors::factor(shifted(cfg.epsilon * cfg.dt), n)?;
        let alpha = cfg.scheme.effective_alpha(cfg.alpha);
        let damping_lu = if alpha > 0.0 {
            Some(LuFactors::factor(shifted(alpha * cfg.epsilon * cfg.dt), n)?)
        } else {
            None
        };
        Ok(DenseStepper { grid, cfg, lap, predictor_lu, damping_lu })
    }

    fn apply_laplacian(&self, v: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        let mut out = vec![0.0; n];
        for r in 0..n {
            let mut acc = 0.0;
            for c in 0..n {
                acc += self.lap[r * n + c] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    pub fn step(&self, m: &VectorField, t: f64, src: &SourceTerm) -> Result<VectorField> {
        let grid = self.grid;
        let n = grid.len();
        let dt = self.cfg.dt;
        let eps = self.cfg.epsilon;
        let scheme = self.cfg.scheme;
        let alpha = scheme.effective_alpha(self.cfg.alpha);
        let mut f_now = VectorField::zeros(grid);
        let forced = !src.is_zero();
        if forced {
            src.eval_into(m, t, &mut f_now)?;
        }
        let comp = |v: &VectorField, c: usize| v.component(c).values().to_vec();

        if scheme == Scheme::Gspm {
            let g2 = self.predictor_lu.solve(&comp(m, 1));
            let g3 = self.predictor_lu.solve(&comp(m, 2));
            let (m1, m2, m3) = (comp(m, 0), comp(m, 1), comp(m, 2));
            let mut o1 = vec![0.0; n];
            for i in 0..n {
                o1[i] = m1[i] + g2[i] * m3[i] - g3[i] * m2[i];
            }
            let gt1 = self.predictor_lu.solve(&o1);
            let mut o2 = vec![0.0; n];
            for i in 0..n {
                o2[i] = m2[i] + g3[i] * o1[i] - gt1[i] * m3[i];
            }
            let gt2 = self.predictor_lu.solve(&o2);
            let mut o3 = vec![0.0; n];
            for i in 0..n {
                o3[i] = m3[i] + gt1[i] * o2[i] - gt2[i] * o1[i];
            }
            let mut out = VectorField::zeros(grid);
            for i in 0..n {
                let mut v = [o1[i], o2[i], o3[i]];
                if forced {
                    for c in 0..3 {
                        v[c] += dt * f_now.at(i)[c];
                    }
                }
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if norm < 1e-12 {
                    return Err(Error::DegenerateState { point: i });
                }
                out.set_at(i, [v[0] / norm, v[1] / norm, v[2] / norm]);
            }
            return Ok(out);
        }

        if scheme == Scheme::SchemeI {
            let mut out = VectorField::zeros(grid);
            let laps: Vec<Vec<f64>> = (0..3).map(|c| self.apply_laplacian(&comp(m, c))).collect();
            for i in 0..n {
                let h = [eps * laps[0][i], eps * laps[1][i], eps * laps[2][i]];
                let mut v = rotate_generic(m.at(i), h, alpha, 0.5 * dt);
                if forced {
                    for c in 0..3 {
                        v[c] += dt * f_now.at(i)[c];
                    }
                }
                out.set_at(i, v);
            }
            return Ok(out);
        }

        // predictor
        let g2 = self.predictor_lu.solve(&comp(m, 1));
        let g3 = self.predictor_lu.solve(&comp(m, 2));
        let (m1, m2, m3) = (comp(m, 0), comp(m, 1), comp(m, 2));
        let mut p1 = vec![0.0; n];
        for i in 0..n {
            p1[i] = m1[i] + g2[i] * m3[i] - g3[i] * m2[i];
        }
        let gt1 = self.predictor_lu.solve(&p1);
        let mut p2 = vec![0.0; n];
        for i in 0..n {
            p2[i] = m2[i] + g3[i] * p1[i] - gt1[i] * m3[i];
        }
        let gt2 = self.predictor_lu.solve(&p2);
        let mut p3 = vec![0.0; n];
        for i in 0..n {
            p3[i] = m3[i] + gt1[i] * p2[i] - gt2[i] * p1[i];
        }
        let mut stage = [p1, p2, p3];

        // damping iteration
        if let Some(dlu) = &self.damping_lu {
            if matches!(scheme, Scheme::ADamp | Scheme::BDamp | Scheme::FullLlg) {
                for c in 0..3 {
                    let mut rhs = stage[c].clone();
                    if forced {
                        for i in 0..n {
                            rhs[i] += alpha * dt * f_now.at(i)[c];
                        }
                    }
                    stage[c] = dlu.solve(&rhs);
                }
            }
        }

        // double diffusion
        if matches!(scheme, Scheme::BNoDamp | Scheme::BDamp | Scheme::FullLlg) {
            for c in 0..3 {
                let mut rhs = stage[c].clone();
                if forced {
                    for i in 0..n {
                        rhs[i] += dt * f_now.at(i)[c];
                    }
                }
                stage[c] = self.predictor_lu.solve(&rhs);
            }
        }

        // rotation about eps * lap(stage)
        let laps: Vec<Vec<f64>> = (0..3).map(|c| self.apply_laplacian(&stage[c])).collect();
        let mut out = VectorField::zeros(grid);
        let mut f_tail = VectorField::zeros(grid);
        let tail_at_end = matches!(scheme, Scheme::ANoDamp | Scheme::ADamp);
        if forced && tail_at_end {
            let mut stage_field = VectorField::zeros(grid);
            for i in 0..n {
                stage_field.set_at(i, [stage[0][i], stage[1][i], stage[2][i]]);
            }
            src.eval_into(&stage_field, t + dt, &mut f_tail)?;
        }
        for i in 0..n {
            let h = [eps * laps[0][i], eps * laps[1][i], eps * laps[2][i]];
            let mut v = rotate_generic(m.at(i), h, alpha, 0.5 * dt);
            if forced {
                let f = if tail_at_end { f_tail.at(i) } else { f_now.at(i) };
                for c in 0..3 {
                    v[c] += dt * f[c];
                }
            }
            out.set_at(i, v);
        }
        Ok(out)
    }
}

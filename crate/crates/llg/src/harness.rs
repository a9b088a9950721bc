//! Verification studies: temporal and spatial convergence ladders with
//! least-squares order fits, norm-preservation sweeps, stability scans,
//! baseline-versus-proposed comparisons, and the exchange-energy diagnostic.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{error_norms, ErrorNorms, Grid, VectorField};
use crate::manufactured::{initial_condition, ManufacturedCase};
use crate::schemes::{evolve, RunReport, Scheme, SchemeConfig};
use crate::source::SourceTerm;

/// What a study varies and reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StudyKind {
    /// Shrink `k` at fixed `h`; expect first order.
    ConvergeTime,
    /// Shrink `h` at fixed tiny `k`; expect second order.
    ConvergeSpace,
    /// Shrink both with `k = h^2`; report both fits.
    Coupled3d,
    /// Pure-exchange runs from a catalog state; report norm drift.
    NormTest,
    /// Baseline GSPM against the proposed method from one state.
    Compare,
    /// One evolution, no ladder.
    SingleRun,
}

impl StudyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StudyKind::ConvergeTime => "converge-time",
            StudyKind::ConvergeSpace => "converge-space",
            StudyKind::Coupled3d => "converge-3d",
            StudyKind::NormTest => "norm-test",
            StudyKind::Compare => "compare",
            StudyKind::SingleRun => "single-run",
        }
    }
}

/// Full description of one study.
///
/// `ladder` holds time steps for [`StudyKind::ConvergeTime`] and the 1D norm
/// test, and mesh sizes `h` for the spatial, coupled-3D and 3D norm studies.
/// It must be strictly decreasing with at least two entries.
#[derive(Clone, Debug)]
pub struct StudySpec {
    pub kind: StudyKind,
    pub scheme: Scheme,
    pub dim: usize,
    pub ladder: Vec<f64>,
    /// Fixed mesh size for temporal studies.
    pub h: f64,
    /// Fixed time step for spatial studies (and single runs).
    pub dt: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub q: f64,
    pub t_final: f64,
    pub solver_tol: f64,
    /// Catalog state for norm tests, comparisons and single runs.
    pub ic: String,
}

impl StudySpec {
    fn needs_ladder(&self) -> bool {
        !matches!(self.kind, StudyKind::Compare | StudyKind::SingleRun)
    }

    pub fn validate(&self) -> Result<()> {
        if self.needs_ladder() {
            if self.ladder.len() < 2 {
                return Err(Error::config("ladder", "needs at least two entries"));
            }
            if !self.ladder.windows(2).all(|w| w[1] < w[0]) {
                return Err(Error::config("ladder", "must be strictly decreasing"));
            }
            if !self.ladder.iter().all(|&v| v > 0.0) {
                return Err(Error::config("ladder", "entries must be positive"));
            }
        }
        if self.dim != 1 && self.dim != 3 {
            return Err(Error::config("dim", "studies run in 1D or 3D"));
        }
        Ok(())
    }

    fn base_config(&self, dt: f64) -> SchemeConfig {
        SchemeConfig {
            scheme: self.scheme,
            dt,
            alpha: self.alpha,
            epsilon: self.epsilon,
            q: self.q,
            t_final: self.t_final,
            solver_tol: self.solver_tol,
        }
    }

    /// The forcing matching this study's scheme (undamped schemes force
    /// `alpha = 0` in the residual, so the source must as well).
    fn manufactured_source(&self) -> Result<SourceTerm> {
        let case = ManufacturedCase::for_dim(self.dim)?;
        Ok(SourceTerm::Manufactured {
            case,
            alpha: self.scheme.effective_alpha(self.alpha),
            epsilon: self.epsilon,
        })
    }
}

/// One ladder entry's outcome. `norms` is `None` for divergent runs, which
/// render as `-` in the emitted tables.
#[derive(Clone, Debug)]
pub struct StudyRow {
    pub dt: f64,
    pub h: f64,
    pub norms: Option<ErrorNorms>,
    pub max_drift: f64,
    pub energy: EnergyReport,
    pub steps: usize,
    pub wall_seconds: f64,
    pub diverged_at: Option<usize>,
}

/// Least-squares order fits per norm.
#[derive(Clone, Copy, Debug)]
pub struct OrderFit {
    pub linf: f64,
    pub l2: f64,
    pub h1: f64,
}

/// Study outcome: rows in ladder order plus order fits when every run
/// converged.
#[derive(Clone, Debug)]
pub struct StudyReport {
    pub kind: StudyKind,
    pub scheme: Scheme,
    pub rows: Vec<StudyRow>,
    /// Fit against the ladder variable (k for temporal, h for spatial).
    pub orders: Option<OrderFit>,
    /// Additional fit against `h` for the coupled study.
    pub spatial_orders: Option<OrderFit>,
}

/// Max consecutive increase of the exchange-energy trace plus endpoints;
/// purely diagnostic, nothing is asserted here.
#[derive(Clone, Copy, Debug)]
pub struct EnergyReport {
    pub initial: f64,
    pub final_value: f64,
    pub max_step_increase: f64,
}

/// Summarizes an energy trace from [`RunReport::energy_trace`].
pub fn energy_diagnostic(trace: &[f64]) -> EnergyReport {
    let initial = trace.first().copied().unwrap_or(0.0);
    let final_value = trace.last().copied().unwrap_or(0.0);
    let max_step_increase = trace
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    EnergyReport { initial, final_value, max_step_increase }
}

/// Least-squares slope of `log(error)` against `log(step)` over the whole
/// ladder.
pub fn fit_order(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::LadderTooShort);
    }
    for &(_, e) in points {
        if !(e > 0.0) {
            return Err(Error::NonPositiveError(e));
        }
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..points.len() {
        num += (xs[i] - xbar) * (ys[i] - ybar);
        den += (xs[i] - xbar) * (xs[i] - xbar);
    }
    Ok(num / den)
}

fn cells_for(h: f64) -> usize {
    (1.0 / h).round() as usize
}

/// Steps for the coupled refinement `k = h^2` rule: `floor(T / h^2)` whole
/// steps, matching the reported ladders.
pub fn coupled_steps(t_final: f64, h: f64) -> usize {
    ((t_final / (h * h)) + 1e-9).floor().max(1.0) as usize
}

fn run_error_case(
    spec: &StudySpec,
    grid: Grid,
    dt: f64,
    src: &SourceTerm,
    case: ManufacturedCase,
) -> Result<(RunReport, Option<ErrorNorms>)> {
    let m0 = case.exact_field(grid, 0.0)?;
    let cfg = spec.base_config(dt);
    let report = evolve(&m0, &cfg, src, &mut [])?;
    let norms = if report.divergence.is_none() {
        let exact = case.exact_field(grid, spec.t_final)?;
        Some(error_norms(&report.final_state, &exact)?)
    } else {
        None
    };
    Ok((report, norms))
}

fn row_from(report: &RunReport, dt: f64, h: f64, norms: Option<ErrorNorms>) -> StudyRow {
    StudyRow {
        dt,
        h,
        norms,
        max_drift: report.max_norm_drift,
        energy: energy_diagnostic(&report.energy_trace),
        steps: report.steps,
        wall_seconds: report.wall_seconds,
        diverged_at: report.divergence.as_ref().map(|d| d.step),
    }
}

fn fits(rows: &[StudyRow], x: impl Fn(&StudyRow) -> f64) -> Option<OrderFit> {
    let pts: Option<Vec<(f64, ErrorNorms)>> =
        rows.iter().map(|r| r.norms.map(|n| (x(r), n))).collect();
    let pts = pts?;
    let fit = |sel: fn(&ErrorNorms) -> f64| {
        fit_order(&pts.iter().map(|(x, n)| (*x, sel(n))).collect::<Vec<_>>()).ok()
    };
    Some(OrderFit {
        linf: fit(|n| n.linf)?,
        l2: fit(|n| n.l2)?,
        h1: fit(|n| n.h1)?,
    })
}

/// Temporal convergence at fixed `h`: evolve the forced problem from the
/// exact initial state for every `k` in the ladder and fit orders.
pub fn run_converge_time(spec: &StudySpec) -> Result<StudyReport> {
    spec.validate()?;
    let case = ManufacturedCase::for_dim(spec.dim)?;
    let grid = if spec.dim == 1 {
        Grid::line(cells_for(spec.h))?
    } else {
        Grid::cube(cells_for(spec.h))?
    };
    let src = spec.manufactured_source()?;
    let rows: Result<Vec<StudyRow>> = spec
        .ladder
        .par_iter()
        .map(|&k| {
            let (report, norms) = run_error_case(spec, grid, k, &src, case)?;
            Ok(row_from(&report, k, spec.h, norms))
        })
        .collect();
    let rows = rows?;
    let orders = fits(&rows, |r| r.dt);
    Ok(StudyReport { kind: spec.kind, scheme: spec.scheme, rows, orders, spatial_orders: None })
}

/// Spatial convergence at fixed tiny `k`: ladder entries are mesh sizes.
pub fn run_converge_space(spec: &StudySpec) -> Result<StudyReport> {
    spec.validate()?;
    let case = ManufacturedCase::for_dim(spec.dim)?;
    let src = spec.manufactured_source()?;
    let rows: Result<Vec<StudyRow>> = spec
        .ladder
        .par_iter()
        .map(|&h| {
            let grid = if spec.dim == 1 {
                Grid::line(cells_for(h))?
            } else {
                Grid::cube(cells_for(h))?
            };
            let (report, norms) = run_error_case(spec, grid, spec.dt, &src, case)?;
            Ok(row_from(&report, spec.dt, h, norms))
        })
        .collect();
    let rows = rows?;
    let orders = fits(&rows, |r| r.h);
    Ok(StudyReport { kind: spec.kind, scheme: spec.scheme, rows, orders, spatial_orders: None })
}

/// Coupled 3D refinement `k = h^2`: one ladder of mesh sizes, two order
/// fits (against `k` and against `h`).
pub fn run_coupled_3d(spec: &StudySpec) -> Result<StudyReport> {
    spec.validate()?;
    let case = ManufacturedCase::ThreeD;
    let src = spec.manufactured_source()?;
    let rows: Result<Vec<StudyRow>> = spec
        .ladder
        .par_iter()
        .map(|&h| {
            let n = cells_for(h);
            let grid = Grid::cube(n)?;
            let steps = coupled_steps(spec.t_final, h);
            let k = spec.t_final / steps as f64;
            let (report, norms) = run_error_case(spec, grid, k, &src, case)?;
            Ok(row_from(&report, k, h, norms))
        })
        .collect();
    let rows = rows?;
    let orders = fits(&rows, |r| r.dt);
    let spatial_orders = fits(&rows, |r| r.h);
    Ok(StudyReport { kind: spec.kind, scheme: spec.scheme, rows, orders, spatial_orders })
}

/// Pure-exchange (`f == 0`) evolutions from a catalog state; rows report
/// the worst norm drift seen over each run. In 1D the ladder varies `k` at
/// fixed `h`; in 3D it varies `h` with the coupled `k = h^2` rule.
pub fn run_norm_test(spec: &StudySpec) -> Result<StudyReport> {
    spec.validate()?;
    let rows: Result<Vec<StudyRow>> = spec
        .ladder
        .par_iter()
        .map(|&entry| {
            let (grid, k, h) = if spec.dim == 1 {
                (Grid::line(cells_for(spec.h))?, entry, spec.h)
            } else {
                let steps = coupled_steps(spec.t_final, entry);
                (Grid::cube(cells_for(entry))?, spec.t_final / steps as f64, entry)
            };
            let m0 = initial_condition(&spec.ic, grid)?;
            let cfg = spec.base_config(k);
            let report = evolve(&m0, &cfg, &SourceTerm::Zero, &mut [])?;
            Ok(row_from(&report, k, h, None))
        })
        .collect();
    Ok(StudyReport {
        kind: spec.kind,
        scheme: spec.scheme,
        rows: rows?,
        orders: None,
        spatial_orders: None,
    })
}

/// Snapshot triple plus the final-state gap between the baseline and the
/// proposed method.
#[derive(Clone, Debug)]
pub struct CompareReport {
    pub initial: VectorField,
    pub gspm: RunReport,
    pub proposed: RunReport,
    /// `L_inf` distance between the two final states; `None` if either run
    /// diverged.
    pub discrepancy: Option<f64>,
}

/// Evolves GSPM and the proposed scheme side by side from the same catalog
/// state with `f == 0`.
pub fn run_compare(spec: &StudySpec) -> Result<CompareReport> {
    let grid = if spec.dim == 1 {
        Grid::line(cells_for(spec.h))?
    } else {
        Grid::cube(cells_for(spec.h))?
    };
    let m0 = initial_condition(&spec.ic, grid)?;
    let mut gspm_cfg = spec.base_config(spec.dt);
    gspm_cfg.scheme = Scheme::Gspm;
    let mut prop_cfg = spec.base_config(spec.dt);
    prop_cfg.scheme = if spec.scheme == Scheme::Gspm { Scheme::BDamp } else { spec.scheme };
    let gspm = evolve(&m0, &gspm_cfg, &SourceTerm::Zero, &mut [])?;
    let proposed = evolve(&m0, &prop_cfg, &SourceTerm::Zero, &mut [])?;
    let discrepancy = if gspm.divergence.is_none() && proposed.divergence.is_none() {
        Some(error_norms(&gspm.final_state, &proposed.final_state)?.linf)
    } else {
        None
    };
    Ok(CompareReport { initial: m0, gspm, proposed, discrepancy })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_order_exact_slopes() {
        let first: Vec<(f64, f64)> = (0..5).map(|i| {
            let k = 0.1 / 2f64.powi(i);
            (k, 3.0 * k)
        }).collect();
        assert!((fit_order(&first).unwrap() - 1.0).abs() < 1e-12);
        let second: Vec<(f64, f64)> = (0..5).map(|i| {
            let k = 0.1 / 2f64.powi(i);
            (k, 0.4 * k * k)
        }).collect();
        assert!((fit_order(&second).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fit_order_scale_invariant() {
        let pts: Vec<(f64, f64)> = (0..4).map(|i| {
            let k = 1.0 / 3f64.powi(i);
            (k, k.powf(0.93) * 2.7)
        }).collect();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(k, e)| (k, e * 1e6)).collect();
        let a = fit_order(&pts).unwrap();
        let b = fit_order(&scaled).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn fit_order_rejects_bad_input() {
        assert!(matches!(fit_order(&[(0.1, 1.0)]), Err(Error::LadderTooShort)));
        assert!(matches!(
            fit_order(&[(0.1, 1.0), (0.05, 0.0)]),
            Err(Error::NonPositiveError(_))
        ));
    }

    #[test]
    fn coupled_steps_matches_reported_ladder() {
        // floor(T/h^2) at T = 0.1: the published step counts
        for (n, want) in [(10usize, 10usize), (20, 40), (24, 57), (28, 78), (32, 102), (36, 129)] {
            assert_eq!(coupled_steps(0.1, 1.0 / n as f64), want, "N = {n}");
        }
    }

    #[test]
    fn energy_diagnostic_reports_increase() {
        let r = energy_diagnostic(&[1.0, 0.8, 0.9, 0.5]);
        assert_eq!(r.initial, 1.0);
        assert_eq!(r.final_value, 0.5);
        assert!((r.max_step_increase - 0.1).abs() < 1e-15);
        let mono = energy_diagnostic(&[1.0, 0.7, 0.3]);
        assert_eq!(mono.max_step_increase, 0.0);
    }

    #[test]
    fn ladder_validation() {
        let mut spec = StudySpec {
            kind: StudyKind::ConvergeTime,
            scheme: Scheme::BDamp,
            dim: 1,
            ladder: vec![1e-2, 2e-2],
            h: 0.01,
            dt: 1e-3,
            alpha: 0.01,
            epsilon: 1.0,
            q: 0.0,
            t_final: 0.1,
            solver_tol: 1e-12,
            ic: "1d_sin001".into(),
        };
        assert!(spec.validate().is_err(), "increasing ladder must be rejected");
        spec.ladder = vec![2e-2, 1e-2];
        assert!(spec.validate().is_ok());
    }
}

//! Run configuration parsing and the file emitters: study tables as CSV,
//! run manifests as JSON, field snapshots as legacy-ASCII VTK structured
//! points (1D profiles fall back to CSV line data).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, VectorField};
use crate::harness::{StudyKind, StudySpec};
use crate::manufactured::ic_names;
use crate::schemes::{Scheme, SchemeConfig};
use crate::source::SourceTerm;

fn default_study() -> String { "single-run".into() }
fn default_scheme() -> String { "b-damp".into() }
fn default_dim() -> usize { 1 }
fn default_nx() -> usize { 128 }
fn default_dt() -> f64 { 1e-3 }
fn default_h() -> f64 { 5e-4 }
fn default_alpha() -> f64 { 0.01 }
fn default_epsilon() -> f64 { 1.0 }
fn default_t_final() -> f64 { 0.1 }
fn default_solver_tol() -> f64 { 1e-12 }
fn default_ic() -> String { "1d_sin001".into() }
fn default_source() -> String { "zero".into() }
fn default_out_dir() -> String { "out".into() }
fn default_threads() -> usize { 1 }

/// Flat, serializable description of one invocation: scheme parameters,
/// study selection, grid, output location. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_study")]
    pub study: String,
    #[serde(default = "default_scheme")]
    pub scheme: String,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_nx")]
    pub nx: usize,
    #[serde(default = "default_nx")]
    pub ny: usize,
    #[serde(default = "default_nx")]
    pub nz: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Fixed mesh size for temporal studies.
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub q: f64,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_solver_tol")]
    pub solver_tol: f64,
    #[serde(default = "default_ic")]
    pub ic: String,
    /// `zero`, `manufactured` or `composite`.
    #[serde(default = "default_source")]
    pub source: String,
    #[serde(default)]
    pub h_applied: [f64; 3],
    /// Ladder of time steps or mesh sizes, depending on the study.
    #[serde(default)]
    pub ladder: Vec<f64>,
    #[serde(default = "default_out_dir")]
    pub out_dir: String,
    #[serde(default = "default_threads")]
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.study_kind()?;
        self.scheme_kind()?;
        if !(1..=3).contains(&self.dim) {
            return Err(Error::config("dim", "must be 1, 2 or 3"));
        }
        for (name, n) in [("nx", self.nx), ("ny", self.ny), ("nz", self.nz)] {
            if n < 2 {
                return Err(Error::config(name, "needs at least 2 cells"));
            }
        }
        if !(self.dt > 0.0) {
            return Err(Error::config("dt", "must be positive"));
        }
        if !(self.h > 0.0 && self.h < 0.5) {
            return Err(Error::config("h", "must lie in (0, 0.5)"));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::config("alpha", "must be nonnegative"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::config("epsilon", "must be positive"));
        }
        if !(self.q >= 0.0) {
            return Err(Error::config("q", "must be nonnegative"));
        }
        if !(self.t_final > 0.0) {
            return Err(Error::config("t_final", "must be positive"));
        }
        if self.dt > self.t_final {
            return Err(Error::config("dt", "must not exceed t_final"));
        }
        if !(self.solver_tol > 0.0) {
            return Err(Error::config("solver_tol", "must be positive"));
        }
        if !ic_names().contains(&self.ic.as_str()) {
            return Err(Error::config("ic", format!("unknown initial condition '{}'", self.ic)));
        }
        if !["zero", "manufactured", "composite"].contains(&self.source.as_str()) {
            return Err(Error::config("source", format!("unknown source '{}'", self.source)));
        }
        if self.threads == 0 {
            return Err(Error::config("threads", "must be at least 1"));
        }
        Ok(())
    }

    pub fn study_kind(&self) -> Result<StudyKind> {
        match self.study.as_str() {
            "converge-time" => Ok(StudyKind::ConvergeTime),
            "converge-space" => Ok(StudyKind::ConvergeSpace),
            "converge-3d" => Ok(StudyKind::Coupled3d),
            "norm-test" => Ok(StudyKind::NormTest),
            "compare" => Ok(StudyKind::Compare),
            "single-run" => Ok(StudyKind::SingleRun),
            other => Err(Error::config("study", format!("unknown study '{other}'"))),
        }
    }

    pub fn scheme_kind(&self) -> Result<Scheme> {
        Scheme::parse(&self.scheme).map_err(|_| {
            Error::config("scheme", format!("unknown scheme '{}'", self.scheme))
        })
    }

    pub fn grid(&self) -> Result<Grid> {
        match self.dim {
            1 => Grid::new(&[self.nx]),
            2 => Grid::new(&[self.nx, self.ny]),
            _ => Grid::new(&[self.nx, self.ny, self.nz]),
        }
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig> {
        Ok(SchemeConfig {
            scheme: self.scheme_kind()?,
            dt: self.dt,
            alpha: self.alpha,
            epsilon: self.epsilon,
            q: self.q,
            t_final: self.t_final,
            solver_tol: self.solver_tol,
        })
    }

    pub fn source_term(&self) -> Result<SourceTerm> {
        match self.source.as_str() {
            "zero" => Ok(SourceTerm::Zero),
            "manufactured" => {
                let case = crate::manufactured::ManufacturedCase::for_dim(self.dim)?;
                let scheme = self.scheme_kind()?;
                Ok(SourceTerm::Manufactured {
                    case,
                    alpha: scheme.effective_alpha(self.alpha),
                    epsilon: self.epsilon,
                })
            }
            "composite" => Ok(SourceTerm::Composite { q: self.q, h_applied: self.h_applied }),
            other => Err(Error::config("source", format!("unknown source '{other}'"))),
        }
    }

    pub fn study_spec(&self) -> Result<StudySpec> {
        Ok(StudySpec {
            kind: self.study_kind()?,
            scheme: self.scheme_kind()?,
            dim: self.dim,
            ladder: self.ladder.clone(),
            h: self.h,
            dt: self.dt,
            alpha: self.alpha,
            epsilon: self.epsilon,
            q: self.q,
            t_final: self.t_final,
            solver_tol: self.solver_tol,
            ic: self.ic.clone(),
        })
    }
}

/// Parses and validates a JSON run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn serialize_config(cfg: &RunConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("config serialization cannot fail")
}

// ---------------------------------------------------------------------------
// CSV tables

use crate::harness::StudyReport;

/// Writes a study as CSV in the shape of the published tables: header,
/// one row per ladder entry (divergent entries as `-`), then order rows.
/// Numbers use shortest round-trip formatting.
pub fn emit_table_csv(report: &StudyReport, path: &Path) -> Result<()> {
    let mut out = String::new();
    let coupled = report.kind == StudyKind::Coupled3d;
    let norm_test = report.kind == StudyKind::NormTest;
    match report.kind {
        StudyKind::ConvergeTime => out.push_str("k,linf,l2,h1\n"),
        StudyKind::ConvergeSpace => out.push_str("h,linf,l2,h1\n"),
        StudyKind::Coupled3d => out.push_str("k,h,linf,l2,h1\n"),
        StudyKind::NormTest => out.push_str("k,h,norm_drift\n"),
        _ => out.push_str("k,linf,l2,h1\n"),
    }
    for row in &report.rows {
        let mut cells: Vec<String> = Vec::new();
        match report.kind {
            StudyKind::ConvergeSpace => cells.push(format!("{}", row.h)),
            StudyKind::Coupled3d | StudyKind::NormTest => {
                cells.push(format!("{}", row.dt));
                cells.push(format!("{}", row.h));
            }
            _ => cells.push(format!("{}", row.dt)),
        }
        if norm_test {
            cells.push(format!("{}", row.max_drift));
        } else {
            match row.norms {
                Some(n) => {
                    cells.push(format!("{}", n.linf));
                    cells.push(format!("{}", n.l2));
                    cells.push(format!("{}", n.h1));
                }
                None => {
                    cells.push("-".into());
                    cells.push("-".into());
                    cells.push("-".into());
                }
            }
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    if let Some(fit) = &report.orders {
        if coupled {
            out.push_str(&format!("order,,{},{},{}\n", fit.linf, fit.l2, fit.h1));
        } else if !norm_test {
            out.push_str(&format!("order,{},{},{}\n", fit.linf, fit.l2, fit.h1));
        }
    }
    if let Some(fit) = &report.spatial_orders {
        out.push_str(&format!(",order,{},{},{}\n", fit.linf, fit.l2, fit.h1));
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, &out)?;
    if report.rows.is_empty() {
        return Err(Error::config("ladder", "study produced no rows"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// snapshots

/// Writes a field snapshot and returns the path actually written: legacy
/// ASCII structured-points VTK for 2D/3D grids, a CSV line profile
/// (`x,m1,m2,m3`) for 1D grids.
pub fn emit_snapshot(field: &VectorField, dir: &Path, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    if field.grid().dim() == 1 {
        let path = dir.join(format!("{name}.csv"));
        emit_profile_csv(field, &path)?;
        Ok(path)
    } else {
        let path = dir.join(format!("{name}.vtk"));
        write_vtk(field, &path)?;
        Ok(path)
    }
}

/// 1D line data for the profile figures.
pub fn emit_profile_csv(field: &VectorField, path: &Path) -> Result<()> {
    let grid = field.grid();
    let mut out = String::from("x,m1,m2,m3\n");
    for i in 0..grid.len() {
        let p = grid.coords(i);
        let m = field.at(i);
        out.push_str(&format!("{},{},{},{}\n", p[0], m[0], m[1], m[2]));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Legacy-ASCII structured-points VTK with the magnetization as a vector
/// attribute `m` and the in-plane angle `atan2(m2, m1)` as a scalar
/// attribute `angle`. 17 significant digits so a round trip is exact.
pub fn write_vtk(field: &VectorField, path: &Path) -> Result<()> {
    let grid = field.grid();
    let [nx, ny, nz] = grid.shape();
    let mut f = fs::File::create(path)?;
    writeln!(f, "# vtk DataFile Version 3.0")?;
    writeln!(f, "magnetization snapshot")?;
    writeln!(f, "ASCII")?;
    writeln!(f, "DATASET STRUCTURED_POINTS")?;
    writeln!(f, "DIMENSIONS {nx} {ny} {nz}")?;
    writeln!(
        f,
        "ORIGIN {:.16e} {:.16e} {:.16e}",
        0.5 * grid.spacing(0),
        0.5 * grid.spacing(1),
        0.5 * grid.spacing(2)
    )?;
    writeln!(
        f,
        "SPACING {:.16e} {:.16e} {:.16e}",
        grid.spacing(0),
        grid.spacing(1),
        grid.spacing(2)
    )?;
    writeln!(f, "POINT_DATA {}", grid.len())?;
    writeln!(f, "VECTORS m double")?;
    for i in 0..grid.len() {
        let m = field.at(i);
        writeln!(f, "{:.16e} {:.16e} {:.16e}", m[0], m[1], m[2])?;
    }
    writeln!(f, "SCALARS angle double 1")?;
    writeln!(f, "LOOKUP_TABLE default")?;
    for i in 0..grid.len() {
        let m = field.at(i);
        writeln!(f, "{:.16e}", m[1].atan2(m[0]))?;
    }
    Ok(())
}

/// Reads back a snapshot written by [`write_vtk`].
pub fn read_vtk(path: &Path) -> Result<VectorField> {
    let text = fs::read_to_string(path)?;
    let mut dims: Option<[usize; 3]> = None;
    let mut lines = text.lines().peekable();
    while let Some(line) = lines.next() {
        if let Some(rest) = line.strip_prefix("DIMENSIONS") {
            let parts: Vec<usize> = rest
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Vtk("bad DIMENSIONS".into())))
                .collect::<Result<_>>()?;
            if parts.len() != 3 {
                return Err(Error::Vtk("DIMENSIONS needs three entries".into()));
            }
            dims = Some([parts[0], parts[1], parts[2]]);
        }
        if line.starts_with("VECTORS m") {
            break;
        }
    }
    let dims = dims.ok_or_else(|| Error::Vtk("missing DIMENSIONS".into()))?;
    let dim = if dims[2] > 1 { 3 } else if dims[1] > 1 { 2 } else { 1 };
    let grid = Grid::new(&dims[..dim])?;
    let mut field = VectorField::zeros(grid);
    for i in 0..grid.len() {
        let line = lines.next().ok_or_else(|| Error::Vtk("truncated vector data".into()))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Vtk(format!("bad vector value '{t}'"))))
            .collect::<Result<_>>()?;
        if vals.len() != 3 {
            return Err(Error::Vtk("vector line needs three entries".into()));
        }
        field.set_at(i, [vals[0], vals[1], vals[2]]);
    }
    Ok(field)
}

/// Serializes an arbitrary manifest value next to the study outputs.
pub fn write_manifest(path: &Path, manifest: &serde_json::Value) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(manifest)?)?;
    Ok(())
}

//! Command-line front end: single runs, the convergence/norm/comparison
//! studies, and the initial-condition catalog listing.
//!
//! Exit codes: 0 on success, 1 on configuration or I/O errors, 2 when a
//! single run diverges.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use llg::error::Error;
use llg::harness::{
    run_compare, run_converge_space, run_converge_time, run_coupled_3d, run_norm_test,
    StudyReport,
};
use llg::io::{emit_snapshot, emit_table_csv, serialize_config, write_manifest, RunConfig};
use llg::manufactured::{ic_names, ManufacturedCase};
use llg::schemes::evolve;

#[derive(Parser)]
#[command(name = "llg", about = "Structure-preserving Landau-Lifshitz solvers and their verification studies", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// JSON config file; defaults apply when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the time step
    #[arg(long)]
    dt: Option<f64>,
    /// Override the damping coefficient
    #[arg(long)]
    alpha: Option<f64>,
    /// Override the scheme (gspm, scheme-i, a-nodamp, a-damp, b-nodamp, b-damp, full-llg)
    #[arg(long)]
    scheme: Option<String>,
    /// Override the grid: N (1D) or NxNxN
    #[arg(long)]
    grid: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for ladder studies
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a single configuration and write a manifest plus snapshot
    Run(Overrides),
    /// Temporal convergence ladder at fixed h
    ConvergeTime(Overrides),
    /// Spatial convergence ladder at fixed dt
    ConvergeSpace(Overrides),
    /// Coupled k = h^2 ladder in 3D
    #[command(name = "converge-3d")]
    Converge3d(Overrides),
    /// Norm-preservation sweep with zero source
    NormTest(Overrides),
    /// GSPM versus the proposed scheme from one initial state
    Compare(Overrides),
    /// List the catalog initial conditions
    ListIcs,
}

fn load_config(ov: &Overrides, study: &str) -> Result<RunConfig, Error> {
    let mut cfg = match &ov.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            // parse_config validates; study/overrides applied afterwards,
            // so re-validate at the end
            let mut c: RunConfig = serde_json::from_str(&text)?;
            c.study = study.to_string();
            c
        }
        None => {
            let mut c = RunConfig::default();
            c.study = study.to_string();
            c
        }
    };
    if let Some(dt) = ov.dt {
        cfg.dt = dt;
    }
    if let Some(alpha) = ov.alpha {
        cfg.alpha = alpha;
    }
    if let Some(scheme) = &ov.scheme {
        cfg.scheme = scheme.clone();
    }
    if let Some(grid) = &ov.grid {
        let parts: Vec<&str> = grid.split('x').collect();
        let cells: Result<Vec<usize>, _> = parts.iter().map(|p| p.parse::<usize>()).collect();
        let cells = cells.map_err(|_| Error::config("grid", format!("cannot parse '{grid}'")))?;
        if cells.is_empty() || cells.len() > 3 {
            return Err(Error::config("grid", "expected N, NxN or NxNxN"));
        }
        cfg.dim = cells.len();
        cfg.nx = cells[0];
        cfg.ny = *cells.get(1).unwrap_or(&cells[0]);
        cfg.nz = *cells.get(2).unwrap_or(&cells[0]);
    }
    if let Some(out) = &ov.out {
        cfg.out_dir = out.display().to_string();
    }
    if let Some(threads) = ov.threads {
        cfg.threads = threads;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(f)
}

fn study_manifest(cfg: &RunConfig, report: &StudyReport) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = report
        .rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "dt": r.dt,
                "h": r.h,
                "linf": r.norms.map(|n| n.linf),
                "l2": r.norms.map(|n| n.l2),
                "h1": r.norms.map(|n| n.h1),
                "max_norm_drift": r.max_drift,
                "energy_initial": r.energy.initial,
                "energy_final": r.energy.final_value,
                "energy_max_step_increase": r.energy.max_step_increase,
                "steps": r.steps,
                "wall_seconds": r.wall_seconds,
                "diverged_at_step": r.diverged_at,
            })
        })
        .collect();
    serde_json::json!({
        "config": serde_json::from_str::<serde_json::Value>(&serialize_config(cfg)).unwrap(),
        "rows": rows,
        "orders": report.orders.map(|o| serde_json::json!({"linf": o.linf, "l2": o.l2, "h1": o.h1})),
        "spatial_orders": report.spatial_orders.map(|o| serde_json::json!({"linf": o.linf, "l2": o.l2, "h1": o.h1})),
    })
}

fn run_study(cfg: &RunConfig) -> Result<(), Error> {
    let spec = cfg.study_spec()?;
    let kind = cfg.study_kind()?;
    let report = with_pool(cfg.threads, || match kind {
        llg::harness::StudyKind::ConvergeTime => run_converge_time(&spec),
        llg::harness::StudyKind::ConvergeSpace => run_converge_space(&spec),
        llg::harness::StudyKind::Coupled3d => run_coupled_3d(&spec),
        llg::harness::StudyKind::NormTest => run_norm_test(&spec),
        _ => unreachable!("run_study only handles ladder studies"),
    })?;
    let out = Path::new(&cfg.out_dir);
    let csv = out.join(format!("{}_{}.csv", cfg.study, cfg.scheme));
    emit_table_csv(&report, &csv)?;
    write_manifest(&out.join(format!("{}_{}.json", cfg.study, cfg.scheme)), &study_manifest(cfg, &report))?;
    for row in &report.rows {
        match (&row.norms, row.diverged_at) {
            (_, Some(step)) => println!("dt={} h={}: diverged at step {step}", row.dt, row.h),
            (Some(n), _) => println!(
                "dt={} h={}: linf={:.6e} l2={:.6e} h1={:.6e} drift={:.3e}",
                row.dt, row.h, n.linf, n.l2, n.h1, row.max_drift
            ),
            (None, None) => println!("dt={} h={}: drift={:.3e}", row.dt, row.h, row.max_drift),
        }
    }
    if let Some(o) = &report.orders {
        println!("orders: linf={:.4} l2={:.4} h1={:.4}", o.linf, o.l2, o.h1);
    }
    if let Some(o) = &report.spatial_orders {
        println!("spatial orders: linf={:.4} l2={:.4} h1={:.4}", o.linf, o.l2, o.h1);
    }
    println!("wrote {}", csv.display());
    Ok(())
}

fn run_single(cfg: &RunConfig) -> Result<bool, Error> {
    let grid = cfg.grid()?;
    let src = cfg.source_term()?;
    let scheme_cfg = cfg.scheme_config()?;
    let manufactured = cfg.source == "manufactured";
    let m0 = if manufactured {
        ManufacturedCase::for_dim(cfg.dim)?.exact_field(grid, 0.0)?
    } else {
        llg::manufactured::initial_condition(&cfg.ic, grid)?
    };
    let report = evolve(&m0, &scheme_cfg, &src, &mut [])?;
    let out = Path::new(&cfg.out_dir);
    let energy = llg::harness::energy_diagnostic(&report.energy_trace);
    let error = if manufactured && report.divergence.is_none() {
        let exact = ManufacturedCase::for_dim(cfg.dim)?.exact_field(grid, cfg.t_final)?;
        Some(llg::grid::error_norms(&report.final_state, &exact)?)
    } else {
        None
    };
    let manifest = serde_json::json!({
        "config": serde_json::from_str::<serde_json::Value>(&serialize_config(cfg)).unwrap(),
        "steps": report.steps,
        "t_final": report.t_final,
        "max_norm_drift": report.max_norm_drift,
        "energy_initial": energy.initial,
        "energy_final": energy.final_value,
        "energy_max_step_increase": energy.max_step_increase,
        "wall_seconds": report.wall_seconds,
        "diverged_at_step": report.divergence.as_ref().map(|d| d.step),
        "divergence_reason": report.divergence.as_ref().map(|d| d.reason.clone()),
        "linf": error.map(|e| e.linf),
        "l2": error.map(|e| e.l2),
        "h1": error.map(|e| e.h1),
    });
    write_manifest(&out.join("run.json"), &manifest)?;
    emit_snapshot(&report.final_state, out, "final")?;
    match &report.divergence {
        Some(d) => {
            eprintln!("run diverged at step {} ({})", d.step, d.reason);
            Ok(false)
        }
        None => {
            println!(
                "completed {} steps to t={}, drift {:.3e}",
                report.steps, report.t_final, report.max_norm_drift
            );
            if let Some(e) = error {
                println!("error vs reference: linf={:.6e} l2={:.6e} h1={:.6e}", e.linf, e.l2, e.h1);
            }
            Ok(true)
        }
    }
}

fn run_compare_cmd(cfg: &RunConfig) -> Result<(), Error> {
    let spec = cfg.study_spec()?;
    let report = run_compare(&spec)?;
    let out = Path::new(&cfg.out_dir);
    emit_snapshot(&report.initial, out, "initial")?;
    emit_snapshot(&report.gspm.final_state, out, "gspm_final")?;
    emit_snapshot(&report.proposed.final_state, out, "proposed_final")?;
    let manifest = serde_json::json!({
        "config": serde_json::from_str::<serde_json::Value>(&serialize_config(cfg)).unwrap(),
        "discrepancy_linf": report.discrepancy,
        "gspm_drift": report.gspm.max_norm_drift,
        "proposed_drift": report.proposed.max_norm_drift,
        "gspm_diverged": report.gspm.divergence.as_ref().map(|d| d.step),
        "proposed_diverged": report.proposed.divergence.as_ref().map(|d| d.step),
    });
    write_manifest(&out.join("compare.json"), &manifest)?;
    match report.discrepancy {
        Some(d) => println!("final-state discrepancy (linf): {d:.6e}"),
        None => println!("one of the runs diverged; no discrepancy"),
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::ListIcs => {
            for name in ic_names() {
                println!("{name}");
            }
            Ok(true)
        }
        Command::Run(ov) => {
            let cfg = load_config(&ov, "single-run")?;
            run_single(&cfg)
        }
        Command::ConvergeTime(ov) => {
            let cfg = load_config(&ov, "converge-time")?;
            run_study(&cfg).map(|_| true)
        }
        Command::ConvergeSpace(ov) => {
            let cfg = load_config(&ov, "converge-space")?;
            run_study(&cfg).map(|_| true)
        }
        Command::Converge3d(ov) => {
            let cfg = load_config(&ov, "converge-3d")?;
            run_study(&cfg).map(|_| true)
        }
        Command::NormTest(ov) => {
            let cfg = load_config(&ov, "norm-test")?;
            run_study(&cfg).map(|_| true)
        }
        Command::Compare(ov) => {
            let cfg = load_config(&ov, "compare")?;
            run_compare_cmd(&cfg).map(|_| true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

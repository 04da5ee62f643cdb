//! Subcommand drivers.

use crate::config::{ComplexValue, PencilConfig, PencilKind, RealGrid, RunConfig, CONFIG_VERSION};
use maxwell_sie::analytic::{find_singular_pair, mie_traces, scan_singular_pairs, SingularPair};
use maxwell_sie::geom::SurfaceGrid;
use maxwell_sie::ops::{assemble_j, assemble_m, TraceField};
use maxwell_sie::pencil::{
    coercivity_margin, injective_counterexample, invariant_nullspace_scan, is_singular_pencil, pencil_inverse_norm,
    pencil_sigma_min, PencilInstance,
};
use maxwell_sie::solve::{build_system, frequency_sweep, incident_field, XiRule};
use maxwell_sie::SieError;
use num_complex::Complex64;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// How a command ended, mapped to the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    NearSingular,
    OracleMismatch,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::NearSingular => 2,
            Outcome::OracleMismatch => 3,
        }
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), SieError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), SieError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| SieError::Io(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

/// Plain decimal for moderate magnitudes, exponent form otherwise.
fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String, SieError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| SieError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| SieError::Io(e.to_string()))?).map_err(|e| SieError::Io(e.to_string()))
}

#[derive(Serialize)]
struct OracleReport {
    kind: &'static str,
    relative_error: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SolveOutput {
    version: u32,
    command: &'static str,
    status: &'static str,
    xi: Complex64,
    n_dof: usize,
    sigma_min: f64,
    sigma_max: f64,
    condition: f64,
    residual_norm: Option<f64>,
    constraint_norms: Option<(f64, f64)>,
    oracle: Option<OracleReport>,
}

fn trace_csv(grid: &SurfaceGrid, t: &TraceField) -> Result<String, SieError> {
    let mut header = vec!["node", "x", "y", "z"];
    let names = [
        "ex_re", "ex_im", "ey_re", "ey_im", "ez_re", "ez_im", "hx_re", "hx_im", "hy_re", "hy_im", "hz_re", "hz_im",
    ];
    header.extend(names);
    let rows: Vec<Vec<String>> = (0..grid.len())
        .map(|i| {
            let mut r = vec![i.to_string()];
            r.extend(grid.nodes[i].iter().map(|&v| num(v)));
            for v in t.e[i].iter().chain(&t.h[i]) {
                r.push(num(v.re));
                r.push(num(v.im));
            }
            r
        })
        .collect();
    csv_table(&header, &rows)
}

/// Degree for the Mie series: comfortably past `|k₋| R` and `k₊ R`.
fn mie_degree(grid: &SurfaceGrid, medium: &maxwell_sie::MediumParams) -> usize {
    let r = grid.sphere_radius().unwrap_or(1.0);
    let ka = medium.k_plus().norm().max(medium.k_minus().norm()) * r;
    ka.ceil() as usize + 30
}

pub fn solve(cfg: &RunConfig) -> Result<Outcome, SieError> {
    let grid = cfg.geometry()?.build()?;
    let medium = cfg.medium()?;
    let wave = cfg.wave();
    let xi = cfg.solver.xi.value();
    if cfg.solver.oracle.is_some() && !grid.is_sphere() {
        return Err(SieError::UnsupportedGeometry("the Mie oracle needs a sphere".into()));
    }
    let m = assemble_m(&grid, &medium)?;
    let j = assemble_j(&grid, &medium)?;
    let system = build_system(m, &j, xi)?;
    drop(j);
    let n_dof = system.n_dof();
    let report_path = cfg.output.report.as_deref();
    let factored = match system.factor() {
        Ok(f) => f,
        Err(SieError::NearSingular { sigma_min, ratio }) => {
            log::error!("near-singular system: sigma_min = {sigma_min:.3e}, ratio = {ratio:.3e}");
            write_json(
                report_path,
                &SolveOutput {
                    version: CONFIG_VERSION,
                    command: "solve",
                    status: "near_singular",
                    xi,
                    n_dof,
                    sigma_min,
                    sigma_max: sigma_min / ratio,
                    condition: 1.0 / ratio,
                    residual_norm: None,
                    constraint_norms: None,
                    oracle: None,
                },
            )?;
            return Ok(Outcome::NearSingular);
        }
        Err(e) => return Err(e),
    };
    let rep = factored.solve(&incident_field(&grid, &medium, &wave)?)?;
    let oracle = match cfg.solver.oracle {
        Some(_) => {
            let exact = mie_traces(&grid, &medium, &wave, mie_degree(&grid, &medium))?;
            let err = rep.trace.relative_error(&exact, &grid);
            Some(OracleReport {
                kind: "mie",
                relative_error: err,
                tolerance: cfg.solver.tolerance,
                pass: err <= cfg.solver.tolerance,
            })
        }
        None => None,
    };
    if let Some(p) = &cfg.output.trace_csv {
        std::fs::write(p, trace_csv(&grid, &rep.trace)?)?;
    }
    let mismatch = oracle.as_ref().is_some_and(|o| !o.pass);
    write_json(
        report_path,
        &SolveOutput {
            version: CONFIG_VERSION,
            command: "solve",
            status: if mismatch { "oracle_mismatch" } else { "ok" },
            xi,
            n_dof,
            sigma_min: rep.smallest_singular_value,
            sigma_max: rep.largest_singular_value,
            condition: rep.condition_estimate,
            residual_norm: Some(rep.residual_norm),
            constraint_norms: Some(rep.constraint_norms),
            oracle,
        },
    )?;
    Ok(if mismatch { Outcome::OracleMismatch } else { Outcome::Success })
}

pub fn sweep(cfg: &RunConfig) -> Result<Outcome, SieError> {
    let sw = cfg.sweep.as_ref().ok_or_else(|| SieError::Input("config has no sweep block".into()))?;
    let grid = cfg.geometry()?.build()?;
    let medium = cfg.medium()?;
    let rule = match &sw.xi_table {
        Some(t) => XiRule::Table(t.iter().map(|v| v.value()).collect()),
        None => XiRule::Constant(cfg.solver.xi.value()),
    };
    let rows = frequency_sweep(&grid, &medium, &sw.omegas, &rule, &cfg.wave())?;
    let header = [
        "omega", "xi", "sigma_min", "sigma_max", "cond", "constraint_r1", "constraint_r2", "status", "j_norm", "xi_im",
    ];
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.omega),
                num(r.xi.re),
                num(r.sigma_min),
                num(r.sigma_max),
                num(r.cond),
                num(r.constraint_r1),
                num(r.constraint_r2),
                r.status.to_string(),
                num(r.j_norm),
                num(r.xi.im),
            ]
        })
        .collect();
    write_text(cfg.output.table.as_deref(), &csv_table(&header, &table)?)?;
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct SingularOutput {
    version: u32,
    command: &'static str,
    pairs: Vec<SingularPair>,
}

/// Newton start used when the config gives none.
pub const DEFAULT_GUESS: [f64; 2] = [0.75, 1.8];

pub fn singular_find(cfg: &RunConfig) -> Result<Outcome, SieError> {
    let (ep, em, guess, scan) = match &cfg.singular_find {
        Some(s) => (s.eps_plus, s.eps_minus, s.guess.unwrap_or(DEFAULT_GUESS), s.scan.as_ref()),
        None => (1.0, 6.0, DEFAULT_GUESS, None),
    };
    let pairs = match scan {
        Some(s) => scan_singular_pairs(ep, em, s.k_max, s.cells)?,
        None => match find_singular_pair(ep, em, (guess[0], guess[1])) {
            Ok(p) => vec![p],
            Err(SieError::RootNotFound { iterates }) => {
                eprintln!("Newton iterates (k_plus, k_minus, |F|):");
                for (a, b, f) in &iterates {
                    eprintln!("  {a:.12} {b:.12} {f:.3e}");
                }
                return Err(SieError::RootNotFound { iterates });
            }
            Err(e) => return Err(e),
        },
    };
    write_json(cfg.output.report.as_deref(), &SingularOutput { version: CONFIG_VERSION, command: "singular-find", pairs })?;
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct PencilSummary {
    version: u32,
    command: &'static str,
    kind: &'static str,
    dim: Option<usize>,
    singular_pencil: Option<bool>,
    xi0: Option<f64>,
    /// First grid `ξ` at which the coercivity margin reaches 1/2.
    xi_margin_half: Option<f64>,
    xi_threshold_empirical: Option<f64>,
    singular_xis: Option<Vec<f64>>,
}

fn complex_list(v: &Option<Vec<ComplexValue>>, default: &[Complex64]) -> Vec<Complex64> {
    v.as_ref().map(|l| l.iter().map(|x| x.value()).collect()).unwrap_or_else(|| default.to_vec())
}

pub fn pencil(cfg: &RunConfig) -> Result<Outcome, SieError> {
    let pc: &PencilConfig = cfg.pencil.as_ref().ok_or_else(|| SieError::Input("config has no pencil block".into()))?;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let mut summary = PencilSummary {
        version: CONFIG_VERSION,
        command: "pencil",
        kind: "",
        dim: None,
        singular_pencil: None,
        xi0: None,
        xi_margin_half: None,
        xi_threshold_empirical: None,
        singular_xis: None,
    };
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match pc.kind {
        PencilKind::Example3x3 => {
            let p = PencilInstance::example_3x3();
            let xis = complex_list(
                &pc.xis,
                &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(10.0, 0.0), c(0.0, 10.0)],
            );
            summary.kind = "example3x3";
            summary.dim = Some(3);
            summary.singular_pencil = Some(is_singular_pencil(&p, &xis));
            let rows = xis
                .iter()
                .map(|&xi| vec![num(xi.re), num(xi.im), num(pencil_sigma_min(&p, xi))])
                .collect();
            (vec!["xi_re", "xi_im", "sigma_min"], rows)
        }
        PencilKind::Counterexample => {
            let xis = complex_list(&pc.xis, &[c(1.0, 0.0), c(0.0, 1.0), c(3.0, 0.0)]);
            let ms = pc.truncations.clone().unwrap_or_else(|| vec![4, 8, 12, 16, 20, 24]);
            summary.kind = "counterexample";
            summary.dim = ms.iter().max().copied();
            let mut rows = Vec::new();
            for &xi in &xis {
                for &m in &ms {
                    let r = injective_counterexample(xi, m)?;
                    rows.push(vec![
                        num(xi.re),
                        num(xi.im),
                        m.to_string(),
                        num(r.residual),
                        num(r.tail),
                        num(r.j_sigma_min),
                    ]);
                }
            }
            (vec!["xi_re", "xi_im", "m", "residual", "tail", "j_sigma_min"], rows)
        }
        PencilKind::Coercive => {
            let p = PencilInstance::random_coercive(pc.n, 1e-3, pc.seed)?;
            let xi0 = p.coercive_threshold().ok_or_else(|| SieError::Hypothesis("J not positive definite".into()))?;
            let grid = pc.xi_grid.clone().unwrap_or(RealGrid { start: 0.0, stop: 2.0 * xi0, count: 21 }).points();
            summary.kind = "coercive";
            summary.dim = Some(p.dim());
            summary.xi0 = Some(xi0);
            let mut rows = Vec::new();
            for &xi in &grid {
                let m = coercivity_margin(&p, xi, pc.samples, pc.seed)?;
                if m.exact >= 0.5 && summary.xi_margin_half.is_none() {
                    summary.xi_margin_half = Some(xi);
                }
                rows.push(vec![
                    num(xi),
                    num(pencil_sigma_min(&p, c(xi, 0.0))),
                    num(m.exact),
                    num(m.sampled),
                    num(pencil_inverse_norm(&p, c(xi, 0.0))),
                ]);
            }
            (vec!["xi", "sigma_min", "margin_exact", "margin_sampled", "inverse_norm"], rows)
        }
        PencilKind::Invariant | PencilKind::Overlapping => {
            let p = if pc.kind == PencilKind::Invariant {
                PencilInstance::random_invariant(pc.n, pc.null_dim, pc.seed)?
            } else {
                PencilInstance::random_overlapping(pc.n, pc.null_dim, pc.seed)?
            };
            let grid = pc.xi_grid.clone().unwrap_or(RealGrid { start: 0.0, stop: 100.0, count: 401 }).points();
            let scan = invariant_nullspace_scan(&p, &grid)?;
            summary.kind = "invariant";
            summary.dim = Some(p.dim());
            summary.xi_threshold_empirical = scan.xi_threshold_empirical;
            summary.singular_xis = Some(scan.singular_xis.clone());
            let rows = scan.sigma_min.iter().map(|(x, s)| vec![num(*x), num(*s)]).collect();
            (vec!["xi", "sigma_min"], rows)
        }
    };
    write_text(cfg.output.table.as_deref(), &csv_table(&header, &rows)?)?;
    if let Some(p) = &cfg.output.report {
        write_json(Some(p), &summary)?;
    }
    Ok(Outcome::Success)
}

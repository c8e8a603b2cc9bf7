//! Subcommand implementations: closed-form/bisection rank queries, region
//! boundary sweeps, Monte-Carlo cross-validation and parameter sweeps.

use super::config::Resolved;
use super::output::{fmt_num, write_manifest, CsvDoc, RunManifest, TOOL_VERSION};
use super::CliError;
use crate::analytic;
use crate::model::{CellGeometry, NetworkModel, RankTuple};
use crate::montecarlo::{estimate_outage, TrialConfig};
use crate::region::{self, MaxRank};
use std::path::Path;
use std::time::Instant;

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// Per-beam outage for the resolved model at ranks `(l_own, l_other)`
/// (`l_other` ignored by the single-cell models).
fn outage_at(r: &Resolved, l_own: f64, l_other: f64) -> Result<f64, CliError> {
    let eta = r.system.qos.eta;
    let noise = r.system.noise_power;
    let k = r.system.users_per_cell as u32;
    let v = match (&r.model, &r.system.geometry) {
        (NetworkModel::SingleHomogeneous, CellGeometry::Homogeneous { gain }) => {
            analytic::outage_single_cell_homogeneous(eta, l_own, *gain, noise, k)
        }
        (NetworkModel::SingleHeterogeneous, CellGeometry::Disk { radius }) => {
            analytic::outage_single_cell_heterogeneous(
                eta,
                l_own,
                *radius,
                r.system.path_loss.unwrap().alpha,
                noise,
                k,
            )
        }
        (NetworkModel::Wyner, CellGeometry::Wyner { cross_gain }) => {
            analytic::outage_wyner(eta, l_own, l_other, *cross_gain, noise, k)
        }
        (NetworkModel::TwoCellHeterogeneous, geometry @ CellGeometry::RectGrid { .. }) => {
            analytic::outage_two_cell_heterogeneous(
                eta,
                l_own,
                l_other,
                geometry,
                r.system.path_loss.unwrap().alpha,
                noise,
                k,
                0,
                r.solver.quad_tol,
            )
        }
        _ => return Err(CliError::Input("model/geometry mismatch".into())),
    };
    v.map_err(input_err)
}

/// Maximum achievable rank for the resolved model. For the two-cell models
/// the other cell's rank is `solver.l2_fixed` when given, else equal ranks.
fn solve_max_rank(r: &Resolved) -> Result<(MaxRank, &'static str), CliError> {
    let qos = &r.system.qos;
    let noise = r.system.noise_power;
    let k = r.system.users_per_cell as u32;
    match (&r.model, &r.system.geometry) {
        (NetworkModel::SingleHomogeneous, CellGeometry::Homogeneous { gain }) => {
            Ok((region::max_rank_homogeneous(qos, *gain, noise, k), "closed-form"))
        }
        (NetworkModel::SingleHeterogeneous, CellGeometry::Disk { radius }) => {
            let alpha = r.system.path_loss.unwrap().alpha;
            region::max_rank_heterogeneous_single(qos, *radius, alpha, noise, k, r.solver.l_max)
                .map(|m| (m, "bisection"))
                .map_err(input_err)
        }
        (NetworkModel::Wyner, CellGeometry::Wyner { cross_gain }) => match r.solver.l2_fixed {
            Some(l2) => region::max_rank_wyner(qos, l2, *cross_gain, noise, k)
                .map(|m| (m, "closed-form"))
                .map_err(input_err),
            None => Ok((region::equal_rank_wyner(qos, *cross_gain, noise, k), "closed-form")),
        },
        (NetworkModel::TwoCellHeterogeneous, geometry @ CellGeometry::RectGrid { .. }) => {
            let alpha = r.system.path_loss.unwrap().alpha;
            let l2_fixed = r.solver.l2_fixed;
            let solved = region::max_rank_monotone(
                |l| {
                    analytic::outage_two_cell_heterogeneous(
                        qos.eta,
                        l,
                        l2_fixed.unwrap_or(l),
                        geometry,
                        alpha,
                        noise,
                        k,
                        0,
                        r.solver.quad_tol,
                    )
                },
                qos,
                r.solver.l_max,
            );
            solved.map(|m| (m, "bisection")).map_err(input_err)
        }
        _ => Err(CliError::Input("model/geometry mismatch".into())),
    }
}

fn finish_csv(
    doc: &CsvDoc,
    out: Option<&Path>,
    command: &str,
    r: &Resolved,
    seed: Option<u64>,
    started: Instant,
) -> Result<(), CliError> {
    let written = doc.emit(out)?;
    if let Some(path) = written.first() {
        let manifest = RunManifest {
            command: command.to_string(),
            config_digest: r.digest.clone(),
            seed,
            tool_version: TOOL_VERSION.to_string(),
            outputs: written.iter().map(|p| p.display().to_string()).collect(),
            duration_ms: started.elapsed().as_millis(),
        };
        write_manifest(path, &manifest)?;
    }
    Ok(())
}

pub fn cmd_max_rank(r: &Resolved, out: Option<&Path>) -> Result<(), CliError> {
    let started = Instant::now();
    let (max_rank, method) = solve_max_rank(r)?;
    match max_rank.relaxed {
        Some(l_tilde) => {
            let l_int = max_rank.integerized(r.system.nt).unwrap();
            let l_other = r.solver.l2_fixed.unwrap_or(l_tilde);
            let outage = outage_at(r, l_tilde, l_other)?;
            let mut doc = CsvDoc::new(
                "max-rank",
                &r.digest,
                None,
                &[("model", r.model.as_str().to_string())],
            );
            doc.header(&["l_tilde", "l_int", "outage", "method"]);
            doc.row(&[
                fmt_num(l_tilde),
                l_int.to_string(),
                fmt_num(outage),
                method.to_string(),
            ]);
            finish_csv(&doc, out, "max-rank", r, None, started)?;
            if out.is_some() {
                println!(
                    "model={model} L_tilde={l_tilde:.9} L={l_int} outage={outage:.6e} method={method}",
                    model = r.model.as_str()
                );
            }
            Ok(())
        }
        None => Err(CliError::Infeasible("infeasible at L=1".into())),
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Input(format!(
            "grid spec '{spec}' must be START:STOP:STEP"
        )));
    }
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| CliError::Input(format!("grid spec: '{s}' is not a number")))
    };
    let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if !(step > 0.0) || stop < start {
        return Err(CliError::Input(format!("grid spec '{spec}' is not increasing")));
    }
    let mut grid = Vec::new();
    let mut i = 0u64;
    loop {
        let v = start + step * i as f64;
        if v > stop + 1e-12 * step {
            break;
        }
        grid.push(v);
        i += 1;
    }
    Ok(grid)
}

pub fn cmd_region(r: &Resolved, grid_spec: &str, out: Option<&Path>) -> Result<(), CliError> {
    let started = Instant::now();
    let grid = parse_grid(grid_spec)?;
    let qos = &r.system.qos;
    let noise = r.system.noise_power;
    let k = r.system.users_per_cell as u32;
    let boundary = match (&r.model, &r.system.geometry) {
        (NetworkModel::Wyner, CellGeometry::Wyner { cross_gain }) => {
            region::boundary_wyner(qos, *cross_gain, noise, k, &grid, r.solver.l_max)
                .map_err(input_err)?
        }
        (NetworkModel::TwoCellHeterogeneous, geometry @ CellGeometry::RectGrid { .. }) => {
            region::boundary_heterogeneous(
                qos,
                geometry,
                r.system.path_loss.unwrap().alpha,
                noise,
                k,
                &grid,
                r.solver.l_max,
                r.solver.quad_tol,
            )
            .map_err(input_err)?
        }
        _ => {
            return Err(CliError::Input(
                "region boundaries exist for the two-cell models only (wyner, two-hetero)".into(),
            ))
        }
    };
    let mut doc = CsvDoc::new(
        "region",
        &r.digest,
        None,
        &[
            ("model", r.model.as_str().to_string()),
            ("grid", grid_spec.to_string()),
        ],
    );
    doc.header(&["l1", "l2_max"]);
    let mut rows = 0usize;
    let mut running_min = f64::INFINITY;
    for s in &boundary.samples {
        if let Some(l2) = s.l2_max {
            // kill sub-tolerance jitter so the column is exactly nonincreasing
            running_min = running_min.min(l2);
            doc.row(&[fmt_num(s.l1), fmt_num(running_min)]);
            rows += 1;
        }
    }
    finish_csv(&doc, out, "region", r, None, started)?;
    if rows == 0 {
        return Err(CliError::Infeasible("empty region: infeasible at L=(1,1)".into()));
    }
    Ok(())
}

fn parse_ranks(spec: &str, cells: usize, nt: usize) -> Result<RankTuple, CliError> {
    let relaxed: Result<Vec<f64>, CliError> = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("ranks: '{s}' is not a number")))
        })
        .collect();
    let relaxed = relaxed?;
    if relaxed.len() != cells {
        return Err(CliError::Input(format!(
            "ranks: got {} values, system has {cells} cells",
            relaxed.len()
        )));
    }
    RankTuple::new(relaxed, nt).map_err(input_err)
}

/// Analytic per-cell outage values for the resolved model at integer ranks.
fn analytic_per_cell(r: &Resolved, ranks: &RankTuple) -> Result<Vec<f64>, CliError> {
    let li = ranks.integer();
    match r.model {
        NetworkModel::SingleHomogeneous | NetworkModel::SingleHeterogeneous => {
            Ok(vec![outage_at(r, li[0] as f64, li[0] as f64)?])
        }
        NetworkModel::Wyner => Ok(vec![
            outage_at(r, li[0] as f64, li[1] as f64)?,
            outage_at(r, li[1] as f64, li[0] as f64)?,
        ]),
        NetworkModel::TwoCellHeterogeneous => {
            // symmetric geometry: cell two is cell one with ranks swapped
            Ok(vec![
                outage_at(r, li[0] as f64, li[1] as f64)?,
                outage_at(r, li[1] as f64, li[0] as f64)?,
            ])
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_validate(
    r: &Resolved,
    ranks_spec: &str,
    trials: Option<u64>,
    seed: Option<u64>,
    corrupt_noise: Option<f64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let started = Instant::now();
    let ranks = parse_ranks(ranks_spec, r.system.cells, r.system.nt)?;
    let trials = trials.unwrap_or(r.mc.trials);
    let seed = seed.unwrap_or(r.mc.seed);
    let analytic_values = analytic_per_cell(r, &ranks)?;
    let mut mc_system = r.system.clone();
    if let Some(factor) = corrupt_noise {
        // test hook: desynchronize the two halves on purpose
        mc_system.noise_power *= factor;
    }
    let tc = TrialConfig {
        system: mc_system,
        ranks: ranks.clone(),
        trials,
        seed,
    };
    let estimate = estimate_outage(&tc, r.system.qos.eta).map_err(input_err)?;
    let mut doc = CsvDoc::new(
        "validate",
        &r.digest,
        Some(seed),
        &[
            ("model", r.model.as_str().to_string()),
            ("ranks", ranks_spec.to_string()),
            ("trials", trials.to_string()),
        ],
    );
    doc.header(&["quantity", "analytic", "mc_estimate", "std_err", "z"]);
    let mut worst_z = 0.0f64;
    for (i, (&a, cell)) in analytic_values.iter().zip(&estimate.per_cell).enumerate() {
        let z = if cell.std_err > 0.0 {
            (cell.p_hat - a) / cell.std_err
        } else if cell.p_hat == a {
            0.0
        } else {
            f64::INFINITY
        };
        worst_z = worst_z.max(z.abs());
        doc.row(&[
            format!("outage_cell_{}", i + 1),
            fmt_num(a),
            fmt_num(cell.p_hat),
            fmt_num(cell.std_err),
            fmt_num(z),
        ]);
    }
    finish_csv(&doc, out, "validate", r, Some(seed), started)?;
    if worst_z > 4.0 {
        return Err(CliError::ValidationFailure(format!(
            "Monte-Carlo disagrees with the analytic value (worst |z| = {worst_z:.2} > 4)"
        )));
    }
    Ok(())
}

/// Clone the scenario with one parameter replaced.
fn with_param(r: &Resolved, vary: &str, value: f64) -> Result<Resolved, CliError> {
    let mut r = r.clone();
    match vary {
        "K" => r.system.users_per_cell = value as usize,
        "snr" => r.system.noise_power = 10f64.powf(-value / 10.0),
        "eta" => r.system.qos.eta = value,
        "p" => r.system.qos.p = value,
        "alpha" => match &mut r.system.path_loss {
            Some(pl) => pl.alpha = value,
            None => return Err(CliError::Input("alpha sweep needs a heterogeneous model".into())),
        },
        "D" => match &mut r.system.geometry {
            CellGeometry::Disk { radius } => *radius = value,
            CellGeometry::RectGrid { .. } => r.system.geometry = CellGeometry::rect_grid(value, 2),
            _ => return Err(CliError::Input("D sweep needs a geometry with cells".into())),
        },
        "g" => match &mut r.system.geometry {
            CellGeometry::Wyner { cross_gain } => *cross_gain = value,
            CellGeometry::Homogeneous { gain } => *gain = value,
            _ => return Err(CliError::Input("g sweep needs a gain-based model".into())),
        },
        other => {
            return Err(CliError::Input(format!(
                "unknown sweep parameter '{other}' (expected K, snr, D, eta, p, g, alpha)"
            )))
        }
    }
    r.system
        .validate()
        .map_err(|v| CliError::Input(format!("swept value {value} invalid: {}", v.join("; "))))?;
    Ok(r)
}

pub fn cmd_sweep(
    r: &Resolved,
    vary: &str,
    values_spec: &str,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let started = Instant::now();
    let values: Result<Vec<f64>, CliError> = values_spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("values: '{s}' is not a number")))
        })
        .collect();
    let values = values?;
    let mut doc = CsvDoc::new(
        "sweep",
        &r.digest,
        None,
        &[
            ("model", r.model.as_str().to_string()),
            ("vary", vary.to_string()),
        ],
    );
    doc.header(&[vary, "l_tilde", "l_int"]);
    for &v in &values {
        let varied = with_param(r, vary, v)?;
        let (max_rank, _) = solve_max_rank(&varied)?;
        match max_rank.relaxed {
            Some(l) => doc.row(&[
                fmt_num(v),
                fmt_num(l),
                max_rank.integerized(varied.system.nt).unwrap().to_string(),
            ]),
            None => doc.row(&[fmt_num(v), "infeasible".into(), "infeasible".into()]),
        }
    }
    finish_csv(&doc, out, "sweep", r, None, started)
}

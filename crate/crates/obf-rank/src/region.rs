//! Achievable transmission-rank computation: closed forms for the homogeneous
//! and Wyner models, generic monotone bisection inversion, and Pareto boundary
//! sweeps of the two-cell `(L1, L2)` region.

use crate::analytic::{self, AnalyticError};
use crate::model::{CellGeometry, NetworkModel, QosSpec};
use crate::special::{self, SpecialError};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Bisection interval tolerance on `L`.
pub const BISECT_TOL: f64 = 1e-11;

#[derive(Debug, Error)]
pub enum RegionError {
    #[error("outage function is not nondecreasing on [1, {0}]; model or implementation bug")]
    NotMonotone(f64),
    #[error("rank search upper bound {0} below 1")]
    BadUpperBound(f64),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// Largest relaxed rank satisfying a QoS constraint, or infeasible when even
/// a single beam violates it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxRank {
    /// `None` marks infeasibility (outage above `p` already at `L = 1`).
    pub relaxed: Option<f64>,
}

impl MaxRank {
    pub fn feasible(l: f64) -> Self {
        MaxRank { relaxed: Some(l) }
    }

    pub fn infeasible() -> Self {
        MaxRank { relaxed: None }
    }

    pub fn is_feasible(&self) -> bool {
        self.relaxed.is_some()
    }

    /// Integerized rank `min(Nt, floor(relaxed))` under an antenna cap.
    pub fn integerized(&self, nt: usize) -> Option<u32> {
        self.relaxed.map(|l| (l.floor() as u32).min(nt as u32))
    }
}

/// `log(1 - p^(1/K))` evaluated stably for large `K`.
fn ln_one_minus_p_root(p: f64, k: u32) -> f64 {
    (-(p.ln() / k as f64).exp_m1()).ln()
}

/// Largest rank for a single cell of `K` users at common gain `g`
/// (closed form): `L <= [log(1+eta) - log(1-p^(1/K))] / [eta sigma^2/g + log(1+eta)]`.
pub fn max_rank_homogeneous(qos: &QosSpec, g: f64, noise: f64, k: u32) -> MaxRank {
    let d = qos.eta.ln_1p() - ln_one_minus_p_root(qos.p, k);
    let l = d / (qos.eta * noise / g + qos.eta.ln_1p());
    if l >= 1.0 {
        MaxRank::feasible(l)
    } else {
        MaxRank::infeasible()
    }
}

/// Largest rank for cell one of the Wyner model with the other cell's rank
/// fixed, via Lambert-W inversion of `a L1 + b log(1 + c L1) <= d` with
/// `a = eta sigma^2 + log(1+eta)`, `b = L2`, `c = g eta / L2`,
/// `d = log(1+eta) - log(1 - p^(1/K))`.
pub fn max_rank_wyner(
    qos: &QosSpec,
    l_other: f64,
    g: f64,
    noise: f64,
    k: u32,
) -> Result<MaxRank, RegionError> {
    if g == 0.0 {
        return Ok(max_rank_homogeneous(qos, 1.0, noise, k));
    }
    let a = qos.eta * noise + qos.eta.ln_1p();
    let b = l_other;
    let c = g * qos.eta / l_other;
    let d = qos.eta.ln_1p() - ln_one_minus_p_root(qos.p, k);
    if d < 0.0 {
        // constraint already violated as L1 -> 0+, no rank can satisfy it
        return Ok(MaxRank::infeasible());
    }
    // W applied to (a/(bc)) * exp(a/(bc) + d/b), evaluated in log form so
    // large a/(bc) (weak coupling) cannot overflow
    let ln_arg = (a / (b * c)).ln() + a / (b * c) + d / b;
    let w = special::lambert_w0_exp(ln_arg)?;
    let l1 = -1.0 / c + (b / a) * w;
    if l1 >= 1.0 {
        Ok(MaxRank::feasible(l1))
    } else {
        Ok(MaxRank::infeasible())
    }
}

/// Equal-rank corner of the Wyner region (closed form):
/// `L <= [log(1+eta) - log(1-p^(1/K))] / [eta sigma^2 + log(1+eta) + log(1+g eta)]`.
pub fn equal_rank_wyner(qos: &QosSpec, g: f64, noise: f64, k: u32) -> MaxRank {
    let d = qos.eta.ln_1p() - ln_one_minus_p_root(qos.p, k);
    let l = d / (qos.eta * noise + qos.eta.ln_1p() + (g * qos.eta).ln_1p());
    if l >= 1.0 {
        MaxRank::feasible(l)
    } else {
        MaxRank::infeasible()
    }
}

/// Invert a nondecreasing outage function: the largest `L` in `[1, l_hi]`
/// with `outage(L) <= p`, bisected to [`BISECT_TOL`]. Monotonicity is probed
/// on a 10-point grid first; a failed probe signals a bug, not infeasibility.
pub fn max_rank_monotone<F>(outage_fn: F, qos: &QosSpec, l_hi: f64) -> Result<MaxRank, RegionError>
where
    F: Fn(f64) -> Result<f64, AnalyticError>,
{
    if l_hi < 1.0 {
        return Err(RegionError::BadUpperBound(l_hi));
    }
    let mut prev = -1.0;
    for i in 0..10 {
        let l = 1.0 + (l_hi - 1.0) * i as f64 / 9.0;
        let o = outage_fn(l)?;
        if o < prev - 1e-12 {
            return Err(RegionError::NotMonotone(l_hi));
        }
        prev = o;
    }
    if outage_fn(1.0)? > qos.p {
        return Ok(MaxRank::infeasible());
    }
    if outage_fn(l_hi)? <= qos.p {
        return Ok(MaxRank::feasible(l_hi));
    }
    let mut lo = 1.0;
    let mut hi = l_hi;
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if outage_fn(mid)? <= qos.p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(MaxRank::feasible(0.5 * (lo + hi)))
}

/// Largest rank for a single disk cell with uniformly dropped users, by
/// bisection on the incomplete-gamma outage form.
pub fn max_rank_heterogeneous_single(
    qos: &QosSpec,
    d: f64,
    alpha: f64,
    noise: f64,
    k: u32,
    l_hi: f64,
) -> Result<MaxRank, RegionError> {
    let qos_copy = *qos;
    max_rank_monotone(
        move |l| analytic::outage_single_cell_heterogeneous(qos_copy.eta, l, d, alpha, noise, k),
        qos,
        l_hi,
    )
}

/// One sample of a Pareto boundary: the largest feasible `L2` at a given `L1`
/// (or `None` when `L1` itself is infeasible).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySample {
    pub l1: f64,
    pub l2_max: Option<f64>,
}

/// Sampled Pareto boundary of the achievable `(L1, L2)` region; both cells'
/// constraints are enforced jointly at every sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionBoundary {
    pub model: NetworkModel,
    pub samples: Vec<BoundarySample>,
}

/// Boundary of the Wyner region over the given `L1` grid. Per point, cell
/// two's own-rank limit comes from the Lambert-W closed form and cell one's
/// cross-rank limit from bisection; the joint bound is their minimum.
pub fn boundary_wyner(
    qos: &QosSpec,
    g: f64,
    noise: f64,
    k: u32,
    grid: &[f64],
    l_hi: f64,
) -> Result<RegionBoundary, RegionError> {
    let samples: Result<Vec<_>, RegionError> = grid
        .par_iter()
        .map(|&l1| {
            if l1 < 1.0 {
                return Err(RegionError::BadUpperBound(l1));
            }
            // cell one must be feasible with the weakest interferer (L2 = 1)
            if analytic::outage_wyner(qos.eta, l1, 1.0, g, noise, k)? > qos.p
                || analytic::outage_wyner(qos.eta, 1.0, l1, g, noise, k)? > qos.p
            {
                return Ok(BoundarySample { l1, l2_max: None });
            }
            // cell two's own constraint, roles swapped
            let own = max_rank_wyner(qos, l1, g, noise, k)?;
            // cell one's constraint solved for the interfering rank
            let cross = max_rank_monotone(
                |l2| analytic::outage_wyner(qos.eta, l1, l2, g, noise, k),
                qos,
                l_hi,
            )?;
            let l2_max = match (own.relaxed, cross.relaxed) {
                (Some(a), Some(b)) => Some(a.min(b)),
                _ => None,
            };
            Ok(BoundarySample { l1, l2_max })
        })
        .collect();
    Ok(RegionBoundary {
        model: NetworkModel::Wyner,
        samples: samples?,
    })
}

/// Boundary of the two-cell heterogeneous region over the given `L1` grid;
/// both cells' averaged constraints are inverted by bisection, each outage
/// evaluation driving the 2-D location integral at tolerance `quad_tol`.
#[allow(clippy::too_many_arguments)]
pub fn boundary_heterogeneous(
    qos: &QosSpec,
    geometry: &CellGeometry,
    alpha: f64,
    noise: f64,
    k: u32,
    grid: &[f64],
    l_hi: f64,
    quad_tol: f64,
) -> Result<RegionBoundary, RegionError> {
    let samples: Result<Vec<_>, RegionError> = grid
        .par_iter()
        .map(|&l1| {
            if l1 < 1.0 {
                return Err(RegionError::BadUpperBound(l1));
            }
            let cell_one = |l2: f64| {
                analytic::outage_two_cell_heterogeneous(
                    qos.eta, l1, l2, geometry, alpha, noise, k, 0, quad_tol,
                )
            };
            let cell_two = |l2: f64| {
                analytic::outage_two_cell_heterogeneous(
                    qos.eta, l2, l1, geometry, alpha, noise, k, 1, quad_tol,
                )
            };
            if cell_one(1.0)? > qos.p || cell_two(1.0)? > qos.p {
                return Ok(BoundarySample { l1, l2_max: None });
            }
            let own = max_rank_monotone(cell_two, qos, l_hi)?;
            let cross = max_rank_monotone(cell_one, qos, l_hi)?;
            let l2_max = match (own.relaxed, cross.relaxed) {
                (Some(a), Some(b)) => Some(a.min(b)),
                _ => None,
            };
            Ok(BoundarySample { l1, l2_max })
        })
        .collect();
    Ok(RegionBoundary {
        model: NetworkModel::TwoCellHeterogeneous,
        samples: samples?,
    })
}

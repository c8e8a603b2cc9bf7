//! Closed-form and semi-closed-form per-beam SINR outage evaluators: the
//! conditional SINR CDFs and every QoS-constraint left-hand side, for all four
//! network models.
//!
//! All evaluations work in log space (log of the bracket's complement) so
//! `(1 - eps)^K` keeps precision for large `K` and tiny `eps`.

use crate::model::CellGeometry;
use crate::quadrature::{self, QuadError, QuadResult};
use crate::special::{self, SpecialError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalyticError {
    #[error("transmission rank {0} below 1")]
    RankBelowOne(f64),
    #[error("gain must be positive, got {0}")]
    NonPositiveGain(f64),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("negative SINR threshold {0}")]
    NegativeThreshold(f64),
    #[error("two-cell heterogeneous evaluator needs a two-cell rectangular grid")]
    BadGeometry,
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

fn check_rank(l: f64) -> Result<(), AnalyticError> {
    if l >= 1.0 {
        Ok(())
    } else {
        Err(AnalyticError::RankBelowOne(l))
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<(), AnalyticError> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(AnalyticError::NonPositive { name, value })
    }
}

/// `(1 - exp(ln_s))^k` evaluated via `exp(k * ln(-expm1(ln_s)))`, for
/// `ln_s <= 0`.
fn bracket_pow(ln_s: f64, k: u32) -> f64 {
    if ln_s == 0.0 {
        return 0.0;
    }
    let bracket = -ln_s.exp_m1();
    if bracket <= 0.0 {
        return 0.0;
    }
    (k as f64 * bracket.ln()).exp()
}

/// Log of the conditional SINR survival probability in a single cell:
/// `ln[ exp(-x sigma^2 L / g) / (x+1)^(L-1) ]`.
fn ln_survival_single(x: f64, l: f64, g: f64, noise: f64) -> f64 {
    -x * noise * l / g - (l - 1.0) * x.ln_1p()
}

/// Conditional per-user SINR CDF in a single cell with gain `g`:
/// `F(x|g) = 1 - exp(-x sigma^2 L / g) / (x+1)^(L-1)`.
pub fn cdf_single_cell_conditional(x: f64, l: f64, g: f64, noise: f64) -> Result<f64, AnalyticError> {
    if x < 0.0 {
        return Err(AnalyticError::NegativeThreshold(x));
    }
    check_rank(l)?;
    if g <= 0.0 {
        return Err(AnalyticError::NonPositiveGain(g));
    }
    check_positive("noise power", noise)?;
    Ok(-ln_survival_single(x, l, g, noise).exp_m1())
}

/// Per-beam outage with `K` users at a common gain `g`: the single-cell CDF
/// raised to the `K`-th power.
pub fn outage_single_cell_homogeneous(
    eta: f64,
    l: f64,
    g: f64,
    noise: f64,
    k: u32,
) -> Result<f64, AnalyticError> {
    if eta < 0.0 {
        return Err(AnalyticError::NegativeThreshold(eta));
    }
    check_rank(l)?;
    if g <= 0.0 {
        return Err(AnalyticError::NonPositiveGain(g));
    }
    check_positive("noise power", noise)?;
    Ok(bracket_pow(ln_survival_single(eta, l, g, noise), k))
}

/// Per-beam outage for a disk cell of radius `d` with users dropped uniformly
/// and path loss `d^(-alpha)`; the location average collapses into a lower
/// incomplete gamma term.
pub fn outage_single_cell_heterogeneous(
    eta: f64,
    l: f64,
    d: f64,
    alpha: f64,
    noise: f64,
    k: u32,
) -> Result<f64, AnalyticError> {
    if eta < 0.0 {
        return Err(AnalyticError::NegativeThreshold(eta));
    }
    check_rank(l)?;
    check_positive("cell radius", d)?;
    check_positive("noise power", noise)?;
    if alpha <= 2.0 {
        return Err(AnalyticError::NonPositive {
            name: "alpha - 2",
            value: alpha - 2.0,
        });
    }
    if eta == 0.0 {
        return Ok(0.0);
    }
    let c = eta * noise * l;
    let gamma_term = special::lower_incomplete_gamma(2.0 / alpha, c * d.powf(alpha))?;
    // 2 gamma(2/a, c D^a) / (a D^2 (eta+1)^(L-1) c^(2/a)), all in logs;
    // c^(2/a) via exp((2/a) ln c) to dodge pow edge cases
    let ln_term = (2.0 * gamma_term).ln()
        - alpha.ln()
        - 2.0 * d.ln()
        - (l - 1.0) * (eta + 1.0).ln()
        - (2.0 / alpha) * c.ln();
    let term = ln_term.exp();
    // floating-point noise can push the bracket just outside [0,1]; clamp
    let bracket = (1.0 - term).clamp(0.0, 1.0);
    if bracket == 0.0 {
        return Ok(0.0);
    }
    Ok((k as f64 * bracket.ln()).exp())
}

/// Conditional per-user SINR CDF in cell `i` of an `M`-cell network, given
/// all ranks and the per-BS gains `g_vec` seen by the user (`g_vec[i]` is the
/// serving-cell gain). Reduces to the single-cell CDF when `M = 1`.
pub fn cdf_multicell_conditional(
    x: f64,
    i: usize,
    ranks: &[f64],
    g_vec: &[f64],
    noise: f64,
) -> Result<f64, AnalyticError> {
    if x < 0.0 {
        return Err(AnalyticError::NegativeThreshold(x));
    }
    assert_eq!(ranks.len(), g_vec.len(), "ranks and gains must align");
    for &l in ranks {
        check_rank(l)?;
    }
    for &g in g_vec {
        if g <= 0.0 {
            return Err(AnalyticError::NonPositiveGain(g));
        }
    }
    check_positive("noise power", noise)?;
    let li = ranks[i];
    let gi = g_vec[i];
    let mut ln_s = -x * noise * li / gi - (li - 1.0) * (x + 1.0).ln();
    for j in 0..ranks.len() {
        if j != i {
            ln_s -= ranks[j] * (x * (g_vec[j] / gi) * (li / ranks[j])).ln_1p();
        }
    }
    Ok(-ln_s.exp_m1())
}

/// Log survival probability for the two-cell Wyner model (own gain 1, cross
/// gain `g`).
fn ln_survival_wyner(eta: f64, l_own: f64, l_other: f64, g: f64, noise: f64) -> f64 {
    -eta * noise * l_own
        - (l_own - 1.0) * (eta + 1.0).ln()
        - l_other * ((l_own / l_other) * g * eta).ln_1p()
}

/// Per-beam outage for one cell of the two-cell Wyner model. `g = 0` reduces
/// to the homogeneous single-cell outage at unit gain.
pub fn outage_wyner(
    eta: f64,
    l_own: f64,
    l_other: f64,
    g: f64,
    noise: f64,
    k: u32,
) -> Result<f64, AnalyticError> {
    if eta < 0.0 {
        return Err(AnalyticError::NegativeThreshold(eta));
    }
    check_rank(l_own)?;
    check_rank(l_other)?;
    if g < 0.0 {
        return Err(AnalyticError::NonPositiveGain(g));
    }
    check_positive("noise power", noise)?;
    Ok(bracket_pow(ln_survival_wyner(eta, l_own, l_other, g, noise), k))
}

/// The location-average integral for one cell of the two-cell grid model:
/// integrand `exp(-eta sigma^2 L1 r1^alpha) / [ (r1^2/r2^2)^(alpha/2)
/// (L1/L2) eta + 1 ]^L2` over the serving cell's square, with `r1`, `r2` the
/// distances to the serving and interfering BS.
#[allow(clippy::too_many_arguments)]
pub fn omega_integral(
    eta: f64,
    l1: f64,
    l2: f64,
    geometry: &CellGeometry,
    alpha: f64,
    noise: f64,
    cell: usize,
    tol: f64,
) -> Result<QuadResult, AnalyticError> {
    let (half_width, bs_x) = match geometry {
        CellGeometry::RectGrid { half_width, bs_x } if bs_x.len() == 2 => (*half_width, bs_x),
        _ => return Err(AnalyticError::BadGeometry),
    };
    if cell > 1 {
        return Err(AnalyticError::BadGeometry);
    }
    if eta < 0.0 {
        return Err(AnalyticError::NegativeThreshold(eta));
    }
    check_rank(l1)?;
    check_rank(l2)?;
    check_positive("noise power", noise)?;
    let x_own = bs_x[cell];
    let x_other = bs_x[1 - cell];
    let coeff = eta * noise * l1;
    let ratio_scale = (l1 / l2) * eta;
    let f = move |x: f64, y: f64| {
        let r1sq = (x - x_own) * (x - x_own) + y * y;
        let r2sq = (x - x_other) * (x - x_other) + y * y;
        let num = (-coeff * r1sq.powf(0.5 * alpha)).exp();
        let ratio = (r1sq / r2sq).powf(0.5 * alpha);
        num * (-l2 * (ratio * ratio_scale).ln_1p()).exp()
    };
    let r = quadrature::integrate_2d(
        f,
        x_own - half_width,
        x_own + half_width,
        -half_width,
        half_width,
        tol,
    )?;
    Ok(r)
}

/// Per-beam outage for one cell of the two-cell grid model with uniformly
/// dropped users: `[1 - Omega / (A (eta+1)^(L1-1))]^K`, so `value <= p` is
/// equivalent to the averaged QoS constraint.
#[allow(clippy::too_many_arguments)]
pub fn outage_two_cell_heterogeneous(
    eta: f64,
    l1: f64,
    l2: f64,
    geometry: &CellGeometry,
    alpha: f64,
    noise: f64,
    k: u32,
    cell: usize,
    tol: f64,
) -> Result<f64, AnalyticError> {
    let omega = omega_integral(eta, l1, l2, geometry, alpha, noise, cell, tol)?;
    let half_width = match geometry {
        CellGeometry::RectGrid { half_width, .. } => *half_width,
        _ => unreachable!("checked by omega_integral"),
    };
    let area = 4.0 * half_width * half_width;
    let ln_s = omega.value.ln() - area.ln() - (l1 - 1.0) * (eta + 1.0).ln();
    Ok(bracket_pow(ln_s.min(0.0), k))
}

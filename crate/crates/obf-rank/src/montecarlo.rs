//! Ground-truth simulator of the physical model: random user drops, Rayleigh
//! fading, random orthonormal beams, per-beam max-SINR scheduling and
//! empirical outage estimation. Acts as the oracle for every analytical
//! expression and supports any number of cells.
//!
//! User locations are redrawn every trial for the heterogeneous models: the
//! averaged analytical constraints integrate over locations, which matches a
//! redraw per trial, not a frozen drop.
//!
//! Each trial derives its own RNG stream from `(seed, trial_index)`, so
//! estimates are bit-identical regardless of worker count.

use crate::model::{CellGeometry, RankTuple, SystemConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum McError {
    #[error("transmission rank {l} exceeds antenna count {nt}")]
    RankExceedsAntennas { l: usize, nt: usize },
    #[error("geometry has no user locations to draw")]
    NoLocations,
    #[error("invalid system configuration: {0:?}")]
    InvalidConfig(Vec<String>),
    #[error("rank tuple has {got} cells, system has {want}")]
    RankCellMismatch { got: usize, want: usize },
}

/// One simulation request: scenario, integer ranks, trial count and seed.
#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub system: SystemConfig,
    pub ranks: RankTuple,
    pub trials: u64,
    pub seed: u64,
}

/// Binomial outage estimate for one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellOutage {
    pub p_hat: f64,
    pub std_err: f64,
}

/// Empirical outage estimate; `p_hat` is cell one's estimate (the analytical
/// constraints are per cell), `per_cell` carries every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub trials: u64,
    pub per_cell: Vec<CellOutage>,
}

fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    // CN(0,1): real and imaginary parts N(0, 1/2)
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// A length-`nt` channel vector of i.i.d. CN(0,1) entries.
pub fn draw_channel(nt: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..nt).map(|_| complex_gaussian(rng)).collect()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `l` Haar-random orthonormal beamforming vectors of dimension `nt`:
/// an i.i.d. complex Gaussian `nt x l` matrix orthonormalized column by
/// column (modified Gram-Schmidt).
pub fn draw_beams(nt: usize, l: usize, rng: &mut impl Rng) -> Result<Vec<Vec<Complex64>>, McError> {
    if l > nt || l == 0 {
        return Err(McError::RankExceedsAntennas { l, nt });
    }
    let mut beams: Vec<Vec<Complex64>> = Vec::with_capacity(l);
    for _ in 0..l {
        let mut v = draw_channel(nt, rng);
        for prev in &beams {
            let proj = inner(prev, &v);
            for (vi, pi) in v.iter_mut().zip(prev) {
                *vi -= proj * pi;
            }
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        beams.push(v);
    }
    Ok(beams)
}

/// `K` user locations per cell, uniform over each cell's area. Disk cells
/// use the radius transform `r = D sqrt(u)`; grid cells are uniform squares,
/// so every user's closest base station is its serving one by construction.
pub fn draw_users(
    geometry: &CellGeometry,
    k: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<(f64, f64)>>, McError> {
    match geometry {
        CellGeometry::Disk { radius } => {
            let users = (0..k)
                .map(|_| {
                    let r = radius * rng.gen::<f64>().sqrt();
                    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                    (r * theta.cos(), r * theta.sin())
                })
                .collect();
            Ok(vec![users])
        }
        CellGeometry::RectGrid { half_width, bs_x } => Ok(bs_x
            .iter()
            .map(|&cx| {
                (0..k)
                    .map(|_| {
                        let x = cx + (rng.gen::<f64>() * 2.0 - 1.0) * half_width;
                        let y = (rng.gen::<f64>() * 2.0 - 1.0) * half_width;
                        (x, y)
                    })
                    .collect()
            })
            .collect()),
        CellGeometry::Wyner { .. } | CellGeometry::Homogeneous { .. } => Err(McError::NoLocations),
    }
}

/// Path gains from every BS to a user of cell `cell` for the given geometry.
fn user_gains(
    geometry: &CellGeometry,
    alpha: f64,
    cell: usize,
    location: Option<(f64, f64)>,
) -> Vec<f64> {
    match geometry {
        CellGeometry::Homogeneous { gain } => vec![*gain],
        CellGeometry::Wyner { cross_gain } => {
            let mut g = vec![*cross_gain; 2];
            g[cell] = 1.0;
            g
        }
        CellGeometry::Disk { .. } => {
            let (x, y) = location.expect("disk users carry locations");
            vec![(x * x + y * y).powf(-0.5 * alpha)]
        }
        CellGeometry::RectGrid { bs_x, .. } => {
            let (x, y) = location.expect("grid users carry locations");
            bs_x.iter()
                .map(|&cx| ((x - cx) * (x - cx) + y * y).powf(-0.5 * alpha))
                .collect()
        }
    }
}

/// SINR on beam `beam` of the serving BS for one user, given the squared
/// beam projections `|h_j^T w_{j,t}|^2` scaled by the path gains.
///
/// Computed from the scaled per-beam powers two ways: from the raw signal
/// decomposition with per-symbol power `1/L_j`, and from the normalized
/// closed form; debug builds assert both agree to 1e-12 relative.
pub fn sinr_from_powers(
    powers: &[Vec<f64>],
    ranks: &[u32],
    serving: usize,
    beam: usize,
    noise: f64,
) -> f64 {
    let ls = ranks[serving] as f64;
    // normalized form
    let mut denom = noise * ls;
    for (t, &p) in powers[serving].iter().enumerate() {
        if t != beam {
            denom += p;
        }
    }
    for j in 0..powers.len() {
        if j != serving {
            let lj = ranks[j] as f64;
            denom += (ls / lj) * powers[j].iter().sum::<f64>();
        }
    }
    let sinr = powers[serving][beam] / denom;
    #[cfg(debug_assertions)]
    {
        // raw decomposition: per-symbol power 1/L_j
        let mut d = noise;
        for (t, &p) in powers[serving].iter().enumerate() {
            if t != beam {
                d += p / ls;
            }
        }
        for j in 0..powers.len() {
            if j != serving {
                d += powers[j].iter().sum::<f64>() / ranks[j] as f64;
            }
        }
        let raw = powers[serving][beam] / ls / d;
        debug_assert!(
            (raw - sinr).abs() <= 1e-12 * sinr.abs().max(1e-300),
            "signal-decomposition and closed-form SINR disagree: {raw} vs {sinr}"
        );
    }
    sinr
}

/// SINR for one user on one beam of its serving BS, from raw channel
/// vectors, beam sets and path gains (one entry per BS).
pub fn sinr_sample(
    channels: &[Vec<Complex64>],
    beams: &[Vec<Vec<Complex64>>],
    gains: &[f64],
    ranks: &[u32],
    serving: usize,
    beam: usize,
    noise: f64,
) -> f64 {
    let powers = beam_powers(channels, beams, gains);
    sinr_from_powers(&powers, ranks, serving, beam, noise)
}

/// Scaled per-beam powers `g_j |h_j^T w_{j,t}|^2` for one user.
fn beam_powers(
    channels: &[Vec<Complex64>],
    beams: &[Vec<Vec<Complex64>>],
    gains: &[f64],
) -> Vec<Vec<f64>> {
    channels
        .iter()
        .zip(beams)
        .zip(gains)
        .map(|((h, bs), &g)| bs.iter().map(|w| g * inner(h, w).norm_sqr()).collect())
        .collect()
}

/// Outcome of one trial: for each cell, did the max-SINR user on beam one
/// fall below `eta`?
fn trial_outages(
    system: &SystemConfig,
    ranks: &[u32],
    eta: f64,
    rng: &mut ChaCha8Rng,
    observe_beam: Option<usize>,
) -> Vec<bool> {
    let m = system.cells;
    let nt = system.nt;
    let alpha = system.path_loss.map(|pl| pl.alpha).unwrap_or(0.0);
    let beams: Vec<_> = ranks
        .iter()
        .map(|&l| draw_beams(nt, l as usize, rng).expect("rank validated against nt"))
        .collect();
    let locations = match &system.geometry {
        CellGeometry::Disk { .. } | CellGeometry::RectGrid { .. } => {
            Some(draw_users(&system.geometry, system.users_per_cell, rng).expect("geometry has locations"))
        }
        _ => None,
    };
    (0..m)
        .map(|i| {
            let beam = observe_beam.unwrap_or(0) % ranks[i] as usize;
            let mut best = f64::NEG_INFINITY;
            for k in 0..system.users_per_cell {
                let loc = locations.as_ref().map(|cells| cells[i][k]);
                let gains = user_gains(&system.geometry, alpha, i, loc);
                let channels: Vec<_> = (0..m).map(|_| draw_channel(nt, rng)).collect();
                let powers = beam_powers(&channels, &beams, &gains);
                let s = sinr_from_powers(&powers, ranks, i, beam, system.noise_power);
                if s > best {
                    best = s;
                }
            }
            best <= eta
        })
        .collect()
}

/// Empirical per-beam outage at threshold `eta`. Each trial draws fresh
/// beams, channels and (for heterogeneous models) user locations; the
/// scheduler takes the max-SINR user per beam and the outage event is
/// recorded on beam one of each cell (beams are exchangeable).
pub fn estimate_outage(tc: &TrialConfig, eta: f64) -> Result<OutageEstimate, McError> {
    estimate_outage_on_beam(tc, eta, Some(0))
}

/// As [`estimate_outage`], but observing a specific beam index (`None` picks
/// a per-trial uniformly random beam; used to test exchangeability).
pub fn estimate_outage_on_beam(
    tc: &TrialConfig,
    eta: f64,
    observe_beam: Option<usize>,
) -> Result<OutageEstimate, McError> {
    tc.system.validate().map_err(McError::InvalidConfig)?;
    let ranks = tc.ranks.integer();
    if ranks.len() != tc.system.cells {
        return Err(McError::RankCellMismatch {
            got: ranks.len(),
            want: tc.system.cells,
        });
    }
    for &l in ranks {
        if l as usize > tc.system.nt {
            return Err(McError::RankExceedsAntennas {
                l: l as usize,
                nt: tc.system.nt,
            });
        }
    }
    let m = tc.system.cells;
    let counts: Vec<u64> = (0..tc.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(tc.seed);
            rng.set_stream(trial);
            // a random beam index (reduced modulo each cell's rank) when no
            // fixed beam was requested, drawn before anything else
            let beam = observe_beam.unwrap_or_else(|| rng.gen::<u64>() as usize);
            let outages = trial_outages(&tc.system, ranks, eta, &mut rng, Some(beam));
            let mut bits = vec![0u64; m];
            for (i, &o) in outages.iter().enumerate() {
                bits[i] = o as u64;
            }
            bits
        })
        .reduce(
            || vec![0u64; m],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let per_cell: Vec<CellOutage> = counts
        .iter()
        .map(|&c| {
            let p_hat = c as f64 / tc.trials as f64;
            CellOutage {
                p_hat,
                std_err: (p_hat * (1.0 - p_hat) / tc.trials as f64).sqrt(),
            }
        })
        .collect();
    Ok(OutageEstimate {
        p_hat: per_cell[0].p_hat,
        std_err: per_cell[0].std_err,
        trials: tc.trials,
        per_cell,
    })
}

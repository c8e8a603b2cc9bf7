//! Scenario vocabulary shared by every other module: QoS targets, path-loss
//! model, cell geometry, full system configuration, and rank tuples.
//!
//! All quantities are in linear units (never dB); dB conversion happens at the
//! CLI boundary only. Values are immutable after construction and freely
//! shareable across threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("relaxed rank {0} below 1; transmission ranks start at one beam")]
    RankBelowOne(f64),
    #[error("invalid system configuration: {0:?}")]
    InvalidConfig(Vec<String>),
}

/// Per-beam QoS target: outage `Pr{S* <= eta}` must stay below `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosSpec {
    /// Target SINR threshold, linear scale.
    pub eta: f64,
    /// Tolerable outage probability, in (0, 1).
    pub p: f64,
}

/// Distance-based path loss `G(d) = d^(-alpha)`, valid for `alpha > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    pub alpha: f64,
}

/// Which network model an analysis or simulation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NetworkModel {
    /// Single cell, all users at the same deterministic gain.
    SingleHomogeneous,
    /// Single disk cell, users dropped uniformly, gains from path loss.
    SingleHeterogeneous,
    /// Two cells, deterministic unit own-cell gain and cross gain `g`.
    Wyner,
    /// Two square cells on a grid, users dropped uniformly.
    TwoCellHeterogeneous,
}

impl NetworkModel {
    pub fn as_str(self) -> &'static str {
        match self {
            NetworkModel::SingleHomogeneous => "single-homo",
            NetworkModel::SingleHeterogeneous => "single-hetero",
            NetworkModel::Wyner => "wyner",
            NetworkModel::TwoCellHeterogeneous => "two-hetero",
        }
    }
}

/// Cell layout. Determines both the number of cells and how user gains arise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CellGeometry {
    /// Single cell of radius `radius`; user gains from the path-loss model.
    Disk { radius: f64 },
    /// Squares of side `2 * half_width` centered at `(bs_x[i], 0)`; adjacent
    /// squares share edges so closest-BS association matches the cell index.
    RectGrid { half_width: f64, bs_x: Vec<f64> },
    /// Two-cell Wyner abstraction: own-cell gain 1, cross gain `cross_gain`;
    /// no user locations.
    Wyner { cross_gain: f64 },
    /// Single cell with one deterministic gain for every user; no locations.
    Homogeneous { gain: f64 },
}

impl CellGeometry {
    /// Default grid for `m` cells of half-width `d`: centers at `(2i-1)d`,
    /// so adjacent squares tile the plane edge to edge.
    pub fn rect_grid(half_width: f64, m: usize) -> Self {
        let bs_x = (1..=m)
            .map(|i| (2 * i - 1) as f64 * half_width)
            .collect();
        CellGeometry::RectGrid { half_width, bs_x }
    }

    pub fn cell_count(&self) -> usize {
        match self {
            CellGeometry::Disk { .. } | CellGeometry::Homogeneous { .. } => 1,
            CellGeometry::RectGrid { bs_x, .. } => bs_x.len(),
            CellGeometry::Wyner { .. } => 2,
        }
    }
}

/// Full scenario description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Number of cells `M`; must match the geometry.
    pub cells: usize,
    /// Users per cell `K`.
    pub users_per_cell: usize,
    /// Transmit antennas `Nt` (caps every integer rank).
    pub nt: usize,
    /// Noise power `sigma_n^2`; total transmit power is fixed at 1.
    pub noise_power: f64,
    pub geometry: CellGeometry,
    /// Required for Disk / RectGrid geometries, absent otherwise.
    pub path_loss: Option<PathLossModel>,
    pub qos: QosSpec,
}

impl SystemConfig {
    /// Collect every invariant violation; `Ok(())` iff the config is valid.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut v = Vec::new();
        if self.cells < 1 {
            v.push("cell count must be at least 1".into());
        }
        if self.users_per_cell < 1 {
            v.push("users per cell must be at least 1".into());
        }
        if self.nt < 1 {
            v.push("antenna count must be at least 1".into());
        }
        if !(self.noise_power > 0.0) {
            v.push("noise power must be positive".into());
        }
        if !(self.qos.eta > 0.0) {
            v.push("eta must be positive".into());
        }
        if !(self.qos.p > 0.0 && self.qos.p < 1.0) {
            v.push("p in open interval (0,1)".into());
        }
        let geo_cells = self.geometry.cell_count();
        if self.cells != geo_cells {
            v.push(format!(
                "cell count {} does not match geometry ({} cells)",
                self.cells, geo_cells
            ));
        }
        match &self.geometry {
            CellGeometry::Disk { radius } => {
                if !(*radius > 0.0) {
                    v.push("disk radius must be positive".into());
                }
            }
            CellGeometry::RectGrid { half_width, bs_x } => {
                if !(*half_width > 0.0) {
                    v.push("grid half-width must be positive".into());
                }
                if bs_x.is_empty() {
                    v.push("grid needs at least one base station".into());
                }
                for w in bs_x.windows(2) {
                    let spacing = w[1] - w[0];
                    if (spacing - 2.0 * half_width).abs() > 1e-9 * half_width.max(1.0) {
                        v.push(format!(
                            "grid abscissae must increase with uniform spacing {} (got {})",
                            2.0 * half_width,
                            spacing
                        ));
                        break;
                    }
                }
            }
            CellGeometry::Wyner { cross_gain } => {
                if !(*cross_gain >= 0.0) {
                    v.push("wyner cross gain must be nonnegative".into());
                }
            }
            CellGeometry::Homogeneous { gain } => {
                if !(*gain > 0.0) {
                    v.push("homogeneous gain must be positive".into());
                }
            }
        }
        let needs_pl = matches!(
            self.geometry,
            CellGeometry::Disk { .. } | CellGeometry::RectGrid { .. }
        );
        match (&self.path_loss, needs_pl) {
            (Some(pl), true) => {
                if !(pl.alpha > 2.0) {
                    v.push("alpha must exceed 2".into());
                }
            }
            (None, true) => v.push("path-loss model required for this geometry".into()),
            (Some(_), false) => {
                v.push("path-loss model has no meaning for gain-based geometries".into())
            }
            (None, false) => {}
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }
}

/// Element-wise `min(Nt, floor(relaxed_i))`. Rejects ranks below 1: the
/// continuous outage formulas are only distribution-valid for `L >= 1`.
pub fn integerize(relaxed: &[f64], nt: usize) -> Result<Vec<u32>, ModelError> {
    relaxed
        .iter()
        .map(|&l| {
            if !(l >= 1.0) {
                Err(ModelError::RankBelowOne(l))
            } else {
                Ok((l.floor() as u32).min(nt as u32))
            }
        })
        .collect()
}

/// Per-cell relaxed ranks plus their integerized counterparts; the integer
/// field is always derived via [`integerize`], never set independently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTuple {
    relaxed: Vec<f64>,
    integer: Vec<u32>,
}

impl RankTuple {
    pub fn new(relaxed: Vec<f64>, nt: usize) -> Result<Self, ModelError> {
        let integer = integerize(&relaxed, nt)?;
        Ok(RankTuple { relaxed, integer })
    }

    pub fn relaxed(&self) -> &[f64] {
        &self.relaxed
    }

    pub fn integer(&self) -> &[u32] {
        &self.integer
    }
}

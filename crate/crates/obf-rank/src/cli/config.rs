//! JSON scenario configs and their resolution into core model types.
//!
//! All core math is in linear units; dB values are accepted only under
//! explicit `*_db` keys and converted at parse time.

use super::CliError;
use crate::model::{CellGeometry, NetworkModel, PathLossModel, QosSpec, SystemConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// One of `single-homo`, `single-hetero`, `wyner`, `two-hetero`.
    pub model: String,
    #[serde(default)]
    pub geometry: GeometryConfig,
    pub qos: QosConfig,
    pub channel: ChannelConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub montecarlo: McSettings,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    /// Disk radius (single-hetero).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Square half-width `D` (two-hetero).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    /// Wyner cross gain, linear.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_gain: Option<f64>,
    /// Wyner cross gain in dB (exclusive with `cross_gain`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_gain_db: Option<f64>,
    /// Common user gain (single-homo), default 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QosConfig {
    /// Target SINR threshold, linear.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Target SINR threshold in dB (exclusive with `eta`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_db: Option<f64>,
    /// Tolerable outage probability.
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    /// Noise power sigma_n^2, linear (total transmit power is 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_power: Option<f64>,
    /// SNR in dB, defined as 1/sigma_n^2 (exclusive with `noise_power`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    /// Path-loss exponent (heterogeneous models).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub users_per_cell: usize,
    /// Transmit antennas, default 8.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nt: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Absolute tolerance for the 2-D location integral.
    pub quad_tol: f64,
    /// Upper bound for rank bisection searches.
    pub l_max: f64,
    /// Other cell's rank for fixed-rank queries; equal ranks when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2_fixed: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            quad_tol: 1e-8,
            l_max: 64.0,
            l2_fixed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            trials: 100_000,
            seed: 0,
        }
    }
}

/// A parsed, validated scenario plus the raw config and its content digest.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub raw: Config,
    pub digest: String,
    pub model: NetworkModel,
    pub system: SystemConfig,
    pub solver: SolverConfig,
    pub mc: McSettings,
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn exclusive(
    name: &str,
    linear: Option<f64>,
    db: Option<f64>,
) -> Result<Option<f64>, CliError> {
    match (linear, db) {
        (Some(_), Some(_)) => Err(CliError::Input(format!(
            "config field '{name}': give either the linear or the _db form, not both"
        ))),
        (Some(v), None) => Ok(Some(v)),
        (None, Some(v)) => Ok(Some(db_to_linear(v))),
        (None, None) => Ok(None),
    }
}

impl Config {
    pub fn from_path(path: &Path) -> Result<(Config, String), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: Config = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Input(format!("config parse error: {e}")))?;
        let digest = format!("sha256:{:x}", Sha256::digest(&bytes));
        Ok((cfg, digest))
    }

    pub fn resolve(self, digest: String) -> Result<Resolved, CliError> {
        let model = match self.model.as_str() {
            "single-homo" => NetworkModel::SingleHomogeneous,
            "single-hetero" => NetworkModel::SingleHeterogeneous,
            "wyner" => NetworkModel::Wyner,
            "two-hetero" => NetworkModel::TwoCellHeterogeneous,
            other => {
                return Err(CliError::Input(format!(
                    "config field 'model': unknown model '{other}' \
                     (expected single-homo | single-hetero | wyner | two-hetero)"
                )))
            }
        };
        let eta = exclusive("qos.eta", self.qos.eta, self.qos.eta_db)?
            .ok_or_else(|| CliError::Input("config field 'qos.eta' (or 'qos.eta_db') required".into()))?;
        let noise_power = match (self.channel.noise_power, self.channel.snr_db) {
            (Some(_), Some(_)) => {
                return Err(CliError::Input(
                    "config field 'channel.noise_power': give either noise_power or snr_db, not both"
                        .into(),
                ))
            }
            (Some(v), None) => v,
            (None, Some(snr)) => 1.0 / db_to_linear(snr),
            (None, None) => {
                return Err(CliError::Input(
                    "config field 'channel.noise_power' (or 'channel.snr_db') required".into(),
                ))
            }
        };
        let alpha = self.channel.alpha;
        let require = |opt: Option<f64>, field: &str| {
            opt.ok_or_else(|| {
                CliError::Input(format!("config field '{field}' required for model '{}'", self.model))
            })
        };
        let (geometry, path_loss) = match model {
            NetworkModel::SingleHomogeneous => (
                CellGeometry::Homogeneous {
                    gain: self.geometry.gain.unwrap_or(1.0),
                },
                None,
            ),
            NetworkModel::SingleHeterogeneous => (
                CellGeometry::Disk {
                    radius: require(self.geometry.radius, "geometry.radius")?,
                },
                Some(PathLossModel {
                    alpha: require(alpha, "channel.alpha")?,
                }),
            ),
            NetworkModel::Wyner => (
                CellGeometry::Wyner {
                    cross_gain: exclusive(
                        "geometry.cross_gain",
                        self.geometry.cross_gain,
                        self.geometry.cross_gain_db,
                    )?
                    .ok_or_else(|| {
                        CliError::Input(
                            "config field 'geometry.cross_gain' (or 'geometry.cross_gain_db') \
                             required for model 'wyner'"
                                .into(),
                        )
                    })?,
                },
                None,
            ),
            NetworkModel::TwoCellHeterogeneous => (
                CellGeometry::rect_grid(require(self.geometry.half_width, "geometry.half_width")?, 2),
                Some(PathLossModel {
                    alpha: require(alpha, "channel.alpha")?,
                }),
            ),
        };
        let system = SystemConfig {
            cells: geometry.cell_count(),
            users_per_cell: self.channel.users_per_cell,
            nt: self.channel.nt.unwrap_or(8),
            noise_power,
            geometry,
            path_loss,
            qos: QosSpec { eta, p: self.qos.p },
        };
        system
            .validate()
            .map_err(|v| CliError::Input(format!("invalid configuration: {}", v.join("; "))))?;
        Ok(Resolved {
            solver: self.solver.clone(),
            mc: self.montecarlo.clone(),
            raw: self,
            digest,
            model,
            system,
        })
    }
}

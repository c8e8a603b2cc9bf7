//! Achievable transmission-rank (TR) regions for opportunistic beamforming in
//! multi-cell MISO downlinks under per-beam QoS outage constraints.
//!
//! A base station running opportunistic beamforming transmits `L` random
//! orthogonal beams and schedules, per beam, the in-cell user with the highest
//! SINR. Raising `L` co-schedules more users but adds intra- and inter-cell
//! interference. This crate computes, for several network models, the largest
//! transmission ranks for which the per-beam outage probability
//! `Pr{S* <= eta}` stays below a tolerance `p` at every base station:
//!
//! * closed forms for homogeneous single-cell and two-cell Wyner networks,
//! * semi-closed forms (incomplete-gamma / 2-D integral) for heterogeneous
//!   user layouts with distance-based path loss,
//! * a generic monotone bisection inverter and Pareto boundary sweeps over
//!   `(L1, L2)`,
//! * a Monte-Carlo simulator of the physical model that cross-validates every
//!   analytical expression.
//!
//! The `cli` module exposes the same functionality as a command-line tool with
//! JSON configs and CSV output.

// `!(x > 0.0)` is used deliberately throughout: unlike `x <= 0.0` it also
// rejects NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod region;
pub mod special;

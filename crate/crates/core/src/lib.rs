//! Simulation and verification toolkit for p-adic and adelic random walks.
//!
//! - [`padic`]: digit expansions, the group `G_p = Q_p / Z_p`, absolute values.
//! - [`sampling`]: the power-law jump law and seeded random streams.
//! - [`walk`]: scaled single-prime walks and adelic product walks.
//! - [`analytic`]: closed-form survival probabilities, limits and bounds.
//! - [`skorokhod`]: oscillation, modified modulus `w'_T` and sup norms of step paths.
//! - [`experiments`]: configuration, Monte Carlo experiments and result output.

pub mod analytic;
pub mod padic;
pub mod sampling;
pub mod walk;
pub mod skorokhod;
pub mod experiments;

//! Collective reset of an N-qubit register prepared in the Dicke sector.
//!
//! The register is driven by a level-splitting protocol omega(t) while it
//! exchanges excitations with a thermal bath through the collective
//! lowering operator. Restricted to Dicke states the Lindblad dynamics
//! becomes an (N+1)-level birth-death chain, which [`dynamics`] integrates
//! with a stiff solver. [`thermo`] turns trajectories into heat, error
//! probability, entropy production, activity and the reset factor;
//! [`bounds`] checks the associated inequalities; [`oracle`] validates the
//! reduction against the full 2^N-dimensional master equation; and
//! [`experiments`] runs the parameter sweeps.
//!
//! ```
//! use dicke_reset::{dynamics, model, thermo};
//!
//! let params = model::SystemParams::unit(1).unwrap();
//! let protocol = model::Protocol::benchmark_quench(&params);
//! let traj = dynamics::integrate(&params, &protocol, &Default::default()).unwrap();
//! let summary = thermo::summarize(&traj, &params).unwrap();
//! assert!((summary.epsilon_final - 0.353944).abs() < 1e-6);
//! ```

pub mod bounds;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod thermo;

pub use error::{Error, Result};
pub use model::{DickeDistribution, Protocol, ProtocolKind, SystemParams};

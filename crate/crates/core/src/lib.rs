//! Disordered TASEP laboratory.
//!
//! The crate is organised around the objects that appear when one studies the
//! totally asymmetric simple exclusion process with i.i.d. site rates:
//!
//! * [`env`]: disorder laws and reproducible rate environments,
//! * [`lpp`]: last-passage percolation on the wedge `{j >= 0, i + j >= 0}`,
//! * [`coupling`]: the `Y + U = Z` coupling with a homogeneous rate-`r` system,
//! * [`shape`]: closed-form limit shapes, the variational flux formula and
//!   the plateau analytics,
//! * [`sim`]: an event-driven ring simulator measuring stationary flux,
//! * [`acceptance`]: the end-to-end checks shared by the test suite and the
//!   command-line `verify` mode.

pub mod acceptance;
pub mod coupling;
pub mod env;
pub mod error;
pub mod fenwick;
pub mod lpp;
pub mod optimize;
pub mod rng;
pub mod seed;
pub mod shape;
pub mod sim;
pub mod stats;

pub use coupling::{CouplingSample, PathAudit, ZAudit};
pub use env::{DisorderLaw, Environment};
pub use error::{Error, Result};
pub use lpp::{LatticePath, PassageTable, TauEstimate, WedgePoint};
pub use shape::{FluxEstimate, FluxSource, PlateauCheck, ShapeModel};
pub use sim::{FluxMeasurement, MeasureParams, RingState};

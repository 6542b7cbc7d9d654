//! Complete characterization of safety violations for discrete-time linear
//! systems.
//!
//! The reachable set is computed as a sequence of generalized stars, the unsafe
//! half-space is propagated back to the initial valuation space, and an ordered
//! decision diagram over those propagated predicates enumerates every feasible
//! violation pattern together with a witness execution.

pub mod bdd;
pub mod error;
pub mod geometry;
pub mod lp;
pub mod milp;
pub mod oracle;
pub mod reach;
pub mod report;
pub mod spec;

pub use error::{Error, Result};

//! Exact two-electron model systems (Hooke's atom and the helium
//! isoelectronic series), exact Kohn-Sham inversion from the ground-state
//! density, and L1 metric-space distances between wavefunctions, densities
//! and external potentials.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod exec;
pub mod harness;
pub mod helium;
pub mod hooke;
pub mod ksinv;
pub mod metrics;
pub mod numerics;
pub mod state;
pub mod system;

pub use error::{Error, Result};
pub use exec::Execution;
pub use state::CorrelatedState;
pub use system::{Family, SystemRecord, SystemSpec};

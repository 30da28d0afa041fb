//! Scans, persistence and figure emission.

pub mod figures;
pub mod scan;
pub mod store;
pub mod svg;

pub use figures::{emit_fig1, emit_fig2, emit_fig3, Figure};
pub use scan::{scan_default, scan_family, FamilyScan, ScanOptions};
pub use store::{load, store, SolutionFile};

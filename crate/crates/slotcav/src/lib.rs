//! Design toolkit for slot-waveguide cavities coupled to diamond colour
//! centres.
//!
//! The crate computes guided eigenmodes of slot-waveguide cross-sections with
//! a full-vector finite-difference solver, turns them into cavity-QED figures
//! of merit (mode volume, per-photon field, single-photon Rabi frequency,
//! cooperativity, Purcell factor, quantum efficiency), runs rod- and
//! slot-dimension optimization sweeps, and models the Bragg mirrors that
//! terminate the cavity with a 1-D transfer matrix.
//!
//! Start with the runnable examples:
//!
//! ```bash
//! cargo run --release --example fundamental_mode
//! cargo run --release --example per_photon_report
//! cargo run --release --example rod_optimization
//! cargo run --release --example slot_width_study
//! cargo run --release --example bragg_mirror
//! cargo run --release --example slab_oracle_check
//! ```
//!
//! or with the thin CLI wrapper (`slotcav solve|report|sweep|dbr|oracle`).

pub mod constants;
mod error;
pub mod geometry;
pub mod slab;
pub mod solver;

pub use error::{Error, Result};

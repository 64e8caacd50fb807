//! Simulation, control and design sizing for antagonistic joints driven by
//! non-stretchable electrohydraulic (HASEL) muscles placed in series with
//! electrostatic clutches.
//!
//! The crate is organised bottom-up:
//!
//! - [`actuator`]: force laws for the HASEL pack, the clutch and its textile
//!   sleeve, plus fitting from characterization data.
//! - [`design`]: closed-form sizing of the clutch and the widened HASEL.
//! - [`joint`]: the one-degree-of-freedom limb, the series force balance of a
//!   muscle unit and the fixed-step integrator.
//! - [`control`]: the four-state pair machine, waveforms, the alternating
//!   gait and the schedule checker.
//! - [`harness`]: scenarios, frequency sweeps, model fitting front end and
//!   CSV/SVG/JSON emission used by the `hasel-joint` binary.
//!
//! Everything is deterministic; there is no randomness anywhere in the
//! library.

pub mod actuator;
pub mod control;
pub mod design;
pub mod error;
pub mod harness;
pub mod joint;
pub mod units;

pub use error::{Error, Result};

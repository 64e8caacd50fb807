//! Force laws of the three elements in one muscle unit: the HASEL pack,
//! the electrostatic clutch and the textile sleeve around it.

pub mod clutch;
pub mod data;
pub mod hasel;
pub mod sleeve;

pub use clutch::{
    Clutch, ClutchAnchor, ClutchEngagementState, ClutchForceModel, ClutchMode, ClutchSpec,
    Transmission, TransmitInput, CAPTURE_VELOCITY_MM_S,
};
pub use hasel::{HaselAnchor, HaselCalibrationPoint, HaselFitReport, HaselModel, HaselSpec};
pub use sleeve::{SleeveForce, SleeveSpec};

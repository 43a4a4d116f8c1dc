//! Co-design and monitoring toolkit for twin optical bend sensors embedded in
//! soft lattice actuators.
//!
//! The crate covers the full pipeline for a pair of surface-patterned 2D
//! waveguides whose transmitted light intensity separates compression from
//! elongation:
//!
//! * [`geometry`] — build waveguide outlines from centerlines, carve cavity
//!   patterns, place emitter and receiver.
//! * [`deformation`] — ingest tracked-point deformation data, reconstruct and
//!   resample centerlines, synthesize parametric state libraries.
//! * [`raytrace`] — deterministic geometric-optics engine with Snell
//!   refraction, total internal reflection and Fresnel power splitting.
//! * [`design`] — pattern parameter sweeps scored by the figure of merit
//!   `P = Δ / (n_sign · RMSE)`.
//! * [`calibration`] — cubic voltage↔displacement calibration, inversion and
//!   quality metrics (sensitivity, hysteresis, SNR).
//! * [`shadow`] — digital-shadow replay of sensor streams with deviation
//!   diagnostics and drift/leak alarms.
//!
//! Everything is deterministic: no randomness, and sweep results are
//! bit-identical regardless of worker count.

pub mod calibration;
pub mod deformation;
pub mod design;
pub mod error;
pub mod geometry;
pub mod raytrace;
pub mod shadow;

pub use error::{Error, Result};

//! Deterministic 2D geometric-optics engine.
//!
//! A conical fan of rays leaves the emitter and advances segment-to-segment
//! through the scene. Boundary hits split rays into reflected and refracted
//! branches weighted by the unpolarized Fresnel coefficients; total internal
//! reflection keeps the full power in the core. Rays terminate on receiver
//! crossing, on dropping below the power floor, at the bounce cap, or on
//! leaving the scene. The number of detected rays (NDR) is the sensitivity
//! proxy everything downstream consumes.

mod fresnel;
mod grid;
mod tracer;

pub use fresnel::{critical_angle, fresnel, Interface};
pub use tracer::{
    emit_fan, ndr_vs_state, scene_for_state, trace, PowerLedger, Ray, TraceConfig, TraceResult,
};

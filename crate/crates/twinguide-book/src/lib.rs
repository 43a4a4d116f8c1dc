//! Doc-test shim for the guide in `book/`.
//!
//! mdbook cannot run snippets against crate dependencies, so every chapter
//! is included here as rustdoc and `cargo test --doc` executes its code
//! blocks. One module per chapter keeps failures attributable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/geometry.md")]
pub mod geometry {}

#[doc = include_str!("../../../book/src/deformation.md")]
pub mod deformation {}

#[doc = include_str!("../../../book/src/raytracing.md")]
pub mod raytracing {}

#[doc = include_str!("../../../book/src/design-sweep.md")]
pub mod design_sweep {}

#[doc = include_str!("../../../book/src/calibration.md")]
pub mod calibration {}

#[doc = include_str!("../../../book/src/digital-shadow.md")]
pub mod digital_shadow {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

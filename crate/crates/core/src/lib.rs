//! Coupled heat and moisture transport in brick–mortar masonry.
//!
//! The crate covers three workflows built on one 2D finite-element core:
//!
//! * transient simulation of wall samples under recorded climate histories
//!   ([`experiment`]),
//! * steady first-order homogenization of a periodic unit cell, condensing the
//!   fluctuation problem into the 4-block macroscopic conductivity
//!   ([`homogenization`]),
//! * inverse identification of phase and interface parameters with Latin
//!   Hypercube pools scored by least squares ([`identify`]).
//!
//! The constitutive closures follow Künzel's hygrothermal model with the
//! temperature `θ` (°C) and relative humidity `φ` as primary unknowns; brick–mortar
//! interfaces are zero-thickness elements with finite heat transfer and
//! capillary-pressure driven liquid transfer ([`material`], [`fem`]).
//!
//! Runnable walkthroughs of every capability live in the crate's `examples/`
//! directory (`cargo run --release --example <name>`).

pub mod cli;
pub mod error;
pub mod experiment;
pub mod fem;
pub mod homogenization;
pub mod identify;
pub mod material;
pub mod mesh;

pub use error::{Error, Result};
pub use material::{InterfaceParams, MaterialParams, Model, Phase, PhysicalConstants};
pub use mesh::Mesh;

//! Monte Carlo simulator of the LEO debris environment with risk-driven
//! active debris removal (ADR).
//!
//! The crate models a population of resident space objects (payloads,
//! rocket bodies, debris) evolved with a first-order analytical propagator
//! (J2 secular rates plus exponential-atmosphere drag), detects conjunctions
//! with the CUBE volumetric-hash method, fragments colliding or exploding
//! objects with the NASA standard breakup model, and ranks objects for
//! removal with the CSI, MITRI and FMM criticality indices.
//!
//! Everything is deterministic for a fixed `(config, seed)` pair: all
//! randomness comes from per-phase counter-based streams derived from the
//! run seed, so enabling or disabling one phase never perturbs the draws
//! of another.

pub mod adr;
pub mod catalog;
pub mod conjunctions;
pub mod constants;
pub mod engine;
pub mod error;
pub mod events;
pub mod fragmentation;
pub mod kepler;
pub mod propagation;
pub mod reporting;
pub mod risk;

pub use error::{Error, Result};

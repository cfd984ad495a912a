//! Quality-of-information scoring for street-view image metadata.
//!
//! Images are binned by region, street cell and day ([`ingest`]). Each
//! region-day then gets three raw attributes:
//!
//! * spatial: distance between a uniform reference over the street cells
//!   and the observed sample distribution ([`spatial`]);
//! * temporal: revisit counts over dominant revisit intervals ([`temporal`]);
//! * content: summed mean detector confidence of bright-enough images
//!   ([`content`]).
//!
//! [`qoi`] integrates the daily values over the window, normalizes across
//! regions, combines them with 0..5 importance weights and ranks regions.
//! It also filters records by quality predicates. [`geo`] finds coverage
//! holes along the street grid.

pub mod cli;
pub mod content;
pub mod error;
pub mod geo;
pub mod ingest;
pub mod qoi;
pub mod service;
pub mod spatial;
pub mod synth;
pub mod temporal;

pub use error::{Error, Result};

//! Exact moment webs and their three-dimensional lifts for toric
//! Calabi–Yau threefolds.
//!
//! The pipeline runs [`fan::validate_fan`] → [`web::build_moment_web`] →
//! [`lift::build_lift`]; [`io::run_pipeline`] drives it from a job file.

#![allow(clippy::result_large_err)]

pub mod classes;
pub mod error;
pub mod fan;
pub mod io;
pub mod lattice;
pub mod lift;
pub mod web;

pub use error::Error;

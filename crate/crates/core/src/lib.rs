//! Meta-learned modulated sinusoidal neural fields.
//!
//! A dataset of signals is represented by one shared sinusoidal network plus
//! a short latent vector per signal. The shared network is meta-learned with
//! an unrolled, exactly differentiated inner loop; new signals are then
//! fitted by a handful of gradient steps on their latent alone.

pub mod adapt;
pub mod classify;
pub mod error;
pub mod grad;
pub mod io;
pub mod model;
pub mod rng;
pub mod train;

pub use error::{Error, Result};

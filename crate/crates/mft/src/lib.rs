//! Modified front tracking for the p-system and one-dimensional Lagrangian
//! gas dynamics.
//!
//! Every wave carries the exact states on both sides; only speeds and
//! virtual widths are approximated. The residual of the piecewise-constant
//! approximation is a finite sum of point masses, tracked event by event.

pub mod diagnostics;
pub mod engine;
pub mod eos;
pub mod error;
pub mod euler;
pub mod grp;
pub mod init_recon;
pub mod io;
pub mod model;
pub mod numerics;
pub mod psystem;
pub mod scenarios;
pub mod system;

pub use error::{MftError, Result};
pub use model::{SchemeConfig, State, Wave, WaveKind, WaveSequence};
pub use system::System;

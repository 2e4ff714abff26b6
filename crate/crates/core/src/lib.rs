//! Two-axis gimbal line-of-sight (LOS) stabilization and tracking.
//!
//! The crate is organized bottom-up:
//!
//! - [`kinematics`]: body, yaw-gimbal and pitch-gimbal frame algebra.
//! - [`plant`]: inertia model, drift terms and the six-state plant.
//! - [`control`]: the linearizing change of variables, the rate and LOS
//!   tracking laws, the `cos(x1)` guard and a PID baseline.
//! - [`sim`]: fixed-step RK4 closed-loop simulation, platform profiles,
//!   references and named presets.
//! - [`trace`], [`config`]: CSV traces and INI-style scenario files.
//! - [`metrics`], [`verify`]: settling/decay metrics and the verification
//!   suites exposed by the `gimbal verify` command.
//!
//! ```
//! use isp_gimbal::sim::{integrate, preset};
//!
//! let mut scenario = preset("fig3-stab").unwrap();
//! scenario.duration = 3.0;
//! let record = integrate(&scenario).unwrap();
//! let last = record.last().unwrap();
//! assert!(last.q_a.abs() < 1e-3 && last.r_a.abs() < 1e-3);
//! ```

pub mod config;
pub mod control;
mod error;
pub mod kinematics;
pub mod metrics;
pub mod plant;
pub mod sim;
pub mod trace;
pub mod verify;

pub use error::{Error, Result};

// Guide chapters, compiled so their snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/kinematics.md")]
    mod kinematics {}
    #[doc = include_str!("../../../book/src/plant.md")]
    mod plant {}
    #[doc = include_str!("../../../book/src/linearization.md")]
    mod linearization {}
    #[doc = include_str!("../../../book/src/control-laws.md")]
    mod control_laws {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

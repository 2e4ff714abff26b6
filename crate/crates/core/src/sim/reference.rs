//! Reference-signal generators for the rate and LOS-angle laws.

use crate::control::{DesiredTrajectory, TrajectoryPoint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    Zero,
    /// `level` on `[t_on, t_off)`, zero elsewhere. Derivatives are reported
    /// as zero everywhere, i.e. those of the flat segments.
    Step {
        level: f64,
        t_on: f64,
        t_off: f64,
    },
    /// `amplitude * sin(omega * t)` with exact derivatives.
    Sinusoid {
        amplitude: f64,
        omega: f64,
    },
}

impl Reference {
    pub fn step(level: f64, t_on: f64, t_off: f64) -> Result<Self> {
        let r = Self::Step { level, t_on, t_off };
        r.validate()?;
        Ok(r)
    }

    pub fn sinusoid(amplitude: f64, omega: f64) -> Result<Self> {
        let r = Self::Sinusoid { amplitude, omega };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Zero => true,
            Self::Step { level, t_on, t_off } => {
                level.is_finite() && t_on.is_finite() && t_off.is_finite() && t_on <= t_off
            }
            Self::Sinusoid { amplitude, omega } => amplitude.is_finite() && omega.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidScenario(format!(
                "invalid reference {self:?}"
            )))
        }
    }

    /// Switching instants of a step reference.
    pub fn discontinuities(&self) -> Vec<f64> {
        match *self {
            Self::Step { t_on, t_off, .. } => vec![t_on, t_off],
            _ => Vec::new(),
        }
    }
}

impl DesiredTrajectory for Reference {
    fn at(&self, t: f64) -> TrajectoryPoint {
        match *self {
            Self::Zero => TrajectoryPoint::default(),
            Self::Step { level, t_on, t_off } => TrajectoryPoint {
                value: if t >= t_on && t < t_off { level } else { 0.0 },
                d1: 0.0,
                d2: 0.0,
            },
            Self::Sinusoid { amplitude, omega } => {
                let (s, c) = (omega * t).sin_cos();
                TrajectoryPoint {
                    value: amplitude * s,
                    d1: amplitude * omega * c,
                    d2: -amplitude * omega * omega * s,
                }
            }
        }
    }
}

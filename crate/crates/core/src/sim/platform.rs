//! Platform (body) angular-velocity profiles.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kinematics::BodyRates;

/// Time history of the platform body rates, with derivatives that are
/// consistent with the rates at every `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum PlatformProfile {
    /// `rate_i(t) = amplitude_i * sin(omega_i * t)` on each of `p`, `q`, `r`.
    Sinusoidal {
        amplitude: [f64; 3],
        omega: [f64; 3],
    },
    Constant {
        rates: [f64; 3],
    },
    /// Piecewise-linear interpolation between samples; held constant outside.
    Table(RateTable),
}

impl PlatformProfile {
    /// `p = 0.1 sin(pi t / 15)`, `q = 0.1 sin(pi t / 20)`, `r = 0.2 sin(pi t / 15)`.
    pub fn nominal() -> Self {
        Self::Sinusoidal {
            amplitude: [0.1, 0.1, 0.2],
            omega: [PI / 15.0, PI / 20.0, PI / 15.0],
        }
    }

    pub fn still() -> Self {
        Self::Constant { rates: [0.0; 3] }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let ok = match self {
            Self::Sinusoidal { amplitude, omega } => finite(amplitude) && finite(omega),
            Self::Constant { rates } => finite(rates),
            Self::Table(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidScenario(
                "platform profile has non-finite parameters".into(),
            ))
        }
    }
}

/// Body rates at time `t`.
pub fn platform_rates(profile: &PlatformProfile, t: f64) -> BodyRates {
    match profile {
        PlatformProfile::Sinusoidal { amplitude, omega } => {
            let mut rate = [0.0; 3];
            let mut accel = [0.0; 3];
            for i in 0..3 {
                let (s, c) = (omega[i] * t).sin_cos();
                rate[i] = amplitude[i] * s;
                accel[i] = amplitude[i] * omega[i] * c;
            }
            from_parts(rate, accel)
        }
        PlatformProfile::Constant { rates } => BodyRates::steady(rates[0], rates[1], rates[2]),
        PlatformProfile::Table(table) => table.at(t),
    }
}

fn from_parts(rate: [f64; 3], accel: [f64; 3]) -> BodyRates {
    BodyRates {
        p: rate[0],
        q: rate[1],
        r: rate[2],
        p_dot: accel[0],
        q_dot: accel[1],
        r_dot: accel[2],
    }
}

/// Sampled body rates `(t, [p, q, r])` with strictly increasing `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    samples: Vec<(f64, [f64; 3])>,
}

impl RateTable {
    pub fn new(samples: Vec<(f64, [f64; 3])>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidScenario(
                "rate table needs at least two samples".into(),
            ));
        }
        if samples
            .iter()
            .any(|(t, r)| !t.is_finite() || r.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::InvalidScenario(
                "rate table has non-finite entries".into(),
            ));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidScenario(
                "rate table times must be strictly increasing".into(),
            ));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, [f64; 3])] {
        &self.samples
    }

    /// Linear interpolation; the derivative is the slope of the active
    /// segment (right-continuous at knots) and zero outside the table.
    pub fn at(&self, t: f64) -> BodyRates {
        let first = self.samples[0];
        let last = self.samples[self.samples.len() - 1];
        if t < first.0 {
            return from_parts(first.1, [0.0; 3]);
        }
        if t >= last.0 {
            return from_parts(last.1, [0.0; 3]);
        }
        // index of the segment start: last knot with time <= t
        let i = self.samples.partition_point(|(ti, _)| *ti <= t) - 1;
        let (t0, r0) = self.samples[i];
        let (t1, r1) = self.samples[i + 1];
        let frac = (t - t0) / (t1 - t0);
        let mut rate = [0.0; 3];
        let mut slope = [0.0; 3];
        for k in 0..3 {
            slope[k] = (r1[k] - r0[k]) / (t1 - t0);
            rate[k] = r0[k] + frac * (r1[k] - r0[k]);
        }
        from_parts(rate, slope)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nominal_at_start() {
        let b = platform_rates(&PlatformProfile::nominal(), 0.0);
        assert_eq!((b.p, b.q, b.r), (0.0, 0.0, 0.0));
        assert!((b.p_dot - 0.1 * PI / 15.0).abs() < 1e-16);
        assert!((b.p_dot - 0.020_943_951).abs() < 1e-9);
        assert!((b.q_dot - 0.1 * PI / 20.0).abs() < 1e-16);
        assert!((b.r_dot - 0.2 * PI / 15.0).abs() < 1e-16);
    }

    #[test]
    fn nominal_quarter_period() {
        let b = platform_rates(&PlatformProfile::nominal(), 7.5);
        assert!((b.p - 0.1).abs() < 1e-15);
        assert!(b.p_dot.abs() < 1e-15);
    }

    #[test]
    fn constant_has_no_derivative() {
        let b = platform_rates(
            &PlatformProfile::Constant {
                rates: [0.1, 0.2, 0.3],
            },
            12.0,
        );
        assert_eq!(b, BodyRates::steady(0.1, 0.2, 0.3));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let profile = PlatformProfile::nominal();
        let h = 1e-5;
        for k in 0..50 {
            let t = 0.37 + k as f64 * 1.3;
            let a = platform_rates(&profile, t + h);
            let b = platform_rates(&profile, t - h);
            let c = platform_rates(&profile, t);
            assert!(((a.p - b.p) / (2.0 * h) - c.p_dot).abs() < 1e-9);
            assert!(((a.q - b.q) / (2.0 * h) - c.q_dot).abs() < 1e-9);
            assert!(((a.r - b.r) / (2.0 * h) - c.r_dot).abs() < 1e-9);
        }
    }

    #[test]
    fn table_interpolates() {
        let table = RateTable::new(vec![
            (0.0, [0.0, 0.0, 0.0]),
            (2.0, [0.2, -0.2, 0.0]),
            (4.0, [0.2, 0.0, 1.0]),
        ])
        .unwrap();
        let b = table.at(1.0);
        assert!((b.p - 0.1).abs() < 1e-15);
        assert!((b.p_dot - 0.1).abs() < 1e-15);
        assert!((b.q_dot + 0.1).abs() < 1e-15);
        let b = table.at(3.0);
        assert!((b.r - 0.5).abs() < 1e-15);
        assert_eq!(b.p_dot, 0.0);
        assert_eq!(table.at(10.0), BodyRates::steady(0.2, 0.0, 1.0));
        assert_eq!(table.at(-1.0), BodyRates::ZERO);
    }

    #[test]
    fn table_rejects_bad_input() {
        assert!(RateTable::new(vec![(0.0, [0.0; 3])]).is_err());
        assert!(RateTable::new(vec![(1.0, [0.0; 3]), (1.0, [0.0; 3])]).is_err());
        assert!(RateTable::new(vec![(0.0, [f64::NAN, 0.0, 0.0]), (1.0, [0.0; 3])]).is_err());
    }
}

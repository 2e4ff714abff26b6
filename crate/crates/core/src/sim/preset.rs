//! Named scenarios reproducing the stabilization, step-tracking and
//! sinusoid-tracking studies.
//!
//! Initial conditions, step timing, noise level and seed are not part of the
//! original study description; the values below are local choices:
//! stabilization starts from `x2 = x4 = 0.2 rad/s`, tracking from rest, the
//! step is on over `[5 s, 25 s)`, noise runs use seed 1.

use std::f64::consts::PI;

use super::{ControlUpdate, Controller, PlatformProfile, Reference, Scenario};
use crate::control::{GuardSpec, PidParams, RateGains, TrackingGains};
use crate::error::{Error, Result};
use crate::plant::{GimbalState, InertiaModel, NoiseSpec};

pub const PRESET_NAMES: [&str; 7] = [
    "fig3-stab",
    "fig3-stab-noise",
    "fig4-step",
    "fig4-step-noise",
    "fig4-step-pid",
    "fig5-sin",
    "fig5-sin-noise",
];

pub const STEP_ON: f64 = 5.0;
pub const STEP_OFF: f64 = 25.0;
pub const NOISE_SEED: u64 = 1;

pub(crate) fn base(name: &str, controller: Controller) -> Scenario {
    Scenario {
        name: name.to_string(),
        duration: Scenario::DEFAULT_DURATION,
        step_size: Scenario::DEFAULT_STEP,
        initial: GimbalState::ZERO,
        inertia: InertiaModel::nominal(),
        platform: PlatformProfile::nominal(),
        controller,
        reference_q: Reference::Zero,
        reference_r: Reference::Zero,
        noise: NoiseSpec::disabled(),
        guard: GuardSpec::default(),
        control_update: ControlUpdate::ZeroOrderHold,
        waive_symmetry: false,
    }
}

fn with_steps(mut s: Scenario) -> Scenario {
    s.reference_q = Reference::Step {
        level: PI / 6.0,
        t_on: STEP_ON,
        t_off: STEP_OFF,
    };
    s.reference_r = Reference::Step {
        level: PI / 3.0,
        t_on: STEP_ON,
        t_off: STEP_OFF,
    };
    s
}

fn with_sinusoids(mut s: Scenario) -> Scenario {
    let r = Reference::Sinusoid {
        amplitude: 1.0,
        omega: PI / 25.0,
    };
    s.reference_q = r;
    s.reference_r = r;
    s
}

fn noisy(mut s: Scenario) -> Scenario {
    s.noise = NoiseSpec::enabled(NOISE_SEED);
    s
}

/// Builds a named preset. See [`PRESET_NAMES`].
pub fn preset(name: &str) -> Result<Scenario> {
    let rate = |c1, c2| RateGains::new(c1, c2).map(Controller::Stabilize);
    let track = |c1, c2, c3, c4| TrackingGains::new(c1, c2, c3, c4).map(Controller::LosTrack);
    let stab_start = GimbalState {
        x2: 0.2,
        x4: 0.2,
        ..GimbalState::ZERO
    };
    let s = match name {
        "fig3-stab" => {
            let mut s = base(name, rate(3.0, 4.0)?);
            s.initial = stab_start;
            s
        }
        "fig3-stab-noise" => {
            let mut s = noisy(base(name, rate(20.0, 16.0)?));
            s.initial = stab_start;
            s
        }
        "fig4-step" => with_steps(base(name, track(6.0, 8.0, 9.0, 10.0)?)),
        "fig4-step-noise" => noisy(with_steps(base(name, track(6.0, 8.0, 9.0, 10.0)?))),
        "fig4-step-pid" => with_steps(base(name, Controller::Pid(PidParams::default()))),
        "fig5-sin" => with_sinusoids(base(name, track(8.0, 10.0, 6.0, 8.0)?)),
        "fig5-sin-noise" => noisy(with_sinusoids(base(name, track(8.0, 10.0, 6.0, 8.0)?))),
        _ => {
            return Err(Error::UnknownPreset {
                name: name.to_string(),
                valid: PRESET_NAMES.to_vec(),
            })
        }
    };
    Ok(s)
}

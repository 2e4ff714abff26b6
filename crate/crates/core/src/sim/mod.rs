//! Fixed-step closed-loop simulation.
//!
//! [`integrate`] advances the six-state plant with classical RK4. The
//! control is evaluated at the start of each macro-step and, by default,
//! held over the four stages. Torque noise is drawn once per macro-step.

mod platform;
mod preset;
mod reference;

pub use platform::{platform_rates, PlatformProfile, RateTable};
pub(crate) use preset::base;
pub use preset::{preset, NOISE_SEED, PRESET_NAMES, STEP_OFF, STEP_ON};
pub use reference::Reference;

use crate::control::{
    los_tracking_control, pid_baseline, rate_tracking_control, u_from_v, u_from_v_uncompensated,
    ControlAction, DesiredTrajectory, GuardSpec, PidParams, PidState, RateGains, TrackingGains,
    VirtualControl, ZeroTrajectory,
};
use crate::error::{Error, Result};
use crate::kinematics::{los_rates, BodyRates};
use crate::plant::{
    state_derivative, GimbalState, InertiaModel, NoiseSource, NoiseSpec, TorqueCommand, TorqueNoise,
};

/// Control law driving a scenario, with its gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Controller {
    /// Zero torque.
    OpenLoop,
    /// Drive `q_a`, `r_a` to zero.
    Stabilize(RateGains),
    /// Track the scenario references as rate trajectories.
    RateTrack(RateGains),
    /// Track the scenario references as LOS-angle trajectories.
    LosTrack(TrackingGains),
    /// PID on LOS-angle error without drift cancellation.
    Pid(PidParams),
}

impl Controller {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::OpenLoop => "open-loop",
            Self::Stabilize(_) => "stabilize",
            Self::RateTrack(_) => "rate-track",
            Self::LosTrack(_) => "los-track",
            Self::Pid(_) => "pid",
        }
    }

    fn max_gain(&self) -> f64 {
        match self {
            Self::OpenLoop => 0.0,
            Self::Stabilize(g) | Self::RateTrack(g) => g.c1().max(g.c2()),
            Self::LosTrack(g) => g.c1().max(g.c2()).max(g.c3()).max(g.c4()),
            Self::Pid(p) => [p.elevation, p.azimuth]
                .iter()
                .map(|g| g.kp.max(g.ki).max(g.kd))
                .fold(0.0, f64::max),
        }
    }
}

/// When the control is recomputed inside an RK4 step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ControlUpdate {
    /// Once per macro-step, held constant over the stages.
    #[default]
    ZeroOrderHold,
    /// At every RK4 stage, so the closed loop is integrated as a smooth ODE.
    /// The PID baseline is stateful and always uses the held value.
    PerStage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub duration: f64,
    pub step_size: f64,
    pub initial: GimbalState,
    pub inertia: InertiaModel,
    pub platform: PlatformProfile,
    pub controller: Controller,
    /// Elevation-channel reference (`q_a` or `theta_q`, depending on the law).
    pub reference_q: Reference,
    /// Azimuth-channel reference (`r_a` or `theta_r`).
    pub reference_r: Reference,
    pub noise: NoiseSpec,
    pub guard: GuardSpec,
    pub control_update: ControlUpdate,
    /// Run even if the inertia model breaks the balanced-gimbal conditions.
    pub waive_symmetry: bool,
}

impl Scenario {
    pub const DEFAULT_STEP: f64 = 1e-3;
    pub const DEFAULT_DURATION: f64 = 60.0;

    /// Number of macro-steps; the record holds one more row.
    pub fn steps(&self) -> Result<usize> {
        let n = self.duration / self.step_size;
        let rounded = n.round();
        if !(rounded >= 1.0 && (n - rounded).abs() <= 1e-6 * rounded.max(1.0)) {
            return Err(Error::InvalidScenario(format!(
                "duration {} is not an integer multiple of step size {}",
                self.duration, self.step_size
            )));
        }
        Ok(rounded as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "step size must be positive, got {}",
                self.step_size
            )));
        }
        self.steps()?;
        if !self.initial.is_finite() {
            return Err(Error::InvalidScenario("initial state is not finite".into()));
        }
        let report = self.inertia.validate_symmetry();
        if !report.passed() && !self.waive_symmetry {
            return Err(Error::InvalidScenario(report.to_string()));
        }
        self.platform.validate()?;
        self.reference_q.validate()?;
        self.reference_r.validate()?;
        self.noise.validate()?;
        if let Controller::Pid(p) = &self.controller {
            p.validate()?;
        }
        Ok(())
    }

    /// Non-fatal configuration concerns.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let stiffness = self.step_size * self.controller.max_gain();
        if stiffness > 0.1 {
            out.push(format!(
                "step size {} is coarse for gain {} (h * c = {stiffness:.3} > 0.1)",
                self.step_size,
                self.controller.max_gain()
            ));
        }
        out
    }
}

/// One sample of a simulation. Control, torque and noise are the values
/// applied over the step starting at `t`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SimRow {
    pub t: f64,
    pub state: GimbalState,
    pub q_a: f64,
    pub r_a: f64,
    pub v: VirtualControl,
    pub u: TorqueCommand,
    pub guard_active: bool,
    pub noise: TorqueNoise,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimRecord {
    pub rows: Vec<SimRow>,
}

impl SimRecord {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn column(&self, f: impl Fn(&SimRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    pub fn last(&self) -> Option<&SimRow> {
        self.rows.last()
    }
}

/// Evaluates the scenario's control law at `(t, x)`.
///
/// `pid` carries the PID memory between calls and is ignored by the other
/// laws.
pub fn compute_control(
    scenario: &Scenario,
    t: f64,
    x: &GimbalState,
    body: &BodyRates,
    pid: &mut PidState,
) -> (ControlAction, TorqueCommand) {
    let model = &scenario.inertia;
    let guard = &scenario.guard;
    let (qd, rd) = (&scenario.reference_q, &scenario.reference_r);
    let action = match &scenario.controller {
        Controller::OpenLoop => return (ControlAction::default(), TorqueCommand::default()),
        Controller::Stabilize(g) => {
            rate_tracking_control(t, x, body, g, &ZeroTrajectory, &ZeroTrajectory, guard)
        }
        Controller::RateTrack(g) => rate_tracking_control(t, x, body, g, qd, rd, guard),
        Controller::LosTrack(g) => los_tracking_control(t, x, body, g, qd, rd, guard),
        Controller::Pid(params) => {
            let e_q = qd.at(t).value - x.theta_q;
            let e_r = rd.at(t).value - x.theta_r;
            let (v, next) = pid_baseline(t, e_q, e_r, params, *pid);
            *pid = next;
            let action = ControlAction {
                v,
                guard_active: false,
            };
            return (action, u_from_v_uncompensated(&v, model));
        }
    };
    (action, u_from_v(&action.v, x, body, model))
}

/// One classical RK4 step of `x' = f(t, x)`.
pub fn rk4_step<F>(t: f64, x: &GimbalState, h: f64, mut f: F) -> Result<GimbalState>
where
    F: FnMut(f64, &GimbalState) -> Result<GimbalState>,
{
    let axpy = |a: &GimbalState, s: f64, d: &GimbalState| {
        let (a, d) = (a.to_array(), d.to_array());
        GimbalState::from_array(std::array::from_fn(|i| a[i] + s * d[i]))
    };
    let k1 = f(t, x)?;
    let k2 = f(t + 0.5 * h, &axpy(x, 0.5 * h, &k1))?;
    let k3 = f(t + 0.5 * h, &axpy(x, 0.5 * h, &k2))?;
    let k4 = f(t + h, &axpy(x, h, &k3))?;
    let (x0, k1, k2, k3, k4) = (
        x.to_array(),
        k1.to_array(),
        k2.to_array(),
        k3.to_array(),
        k4.to_array(),
    );
    Ok(GimbalState::from_array(std::array::from_fn(|i| {
        x0[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    })))
}

/// Runs a scenario to completion.
pub fn integrate(scenario: &Scenario) -> Result<SimRecord> {
    scenario.validate()?;
    let n = scenario.steps()?;
    let h = scenario.step_size;
    let model = &scenario.inertia;
    let profile = &scenario.platform;
    let mut noise_src = NoiseSource::new(scenario.noise)?;
    let mut pid = PidState::default();
    let mut x = scenario.initial;
    let mut rows = Vec::with_capacity(n + 1);

    for k in 0..=n {
        let t = k as f64 * h;
        let body = platform_rates(profile, t);
        let (action, u) = compute_control(scenario, t, &x, &body, &mut pid);
        if !(action.v.v1.is_finite()
            && action.v.v2.is_finite()
            && u.u1.is_finite()
            && u.u2.is_finite())
        {
            return Err(Error::NonFinite { t, what: "control" });
        }
        let noise = if k < n {
            noise_src.draw()
        } else {
            TorqueNoise::default()
        };
        let (q_a, r_a) = los_rates(&x, &body);
        rows.push(SimRow {
            t,
            state: x,
            q_a,
            r_a,
            v: action.v,
            u,
            guard_active: action.guard_active,
            noise,
        });
        if k == n {
            break;
        }

        let per_stage = scenario.control_update == ControlUpdate::PerStage
            && !matches!(scenario.controller, Controller::Pid(_));
        x = rk4_step(t, &x, h, |ts, xs| {
            let body = platform_rates(profile, ts);
            let u = if per_stage {
                compute_control(scenario, ts, xs, &body, &mut PidState::default()).1
            } else {
                u
            };
            state_derivative(ts, xs, &u, &body, model, &noise)
        })?;
        if !x.is_finite() {
            return Err(Error::NonFinite {
                t: t + h,
                what: "state",
            });
        }
    }
    Ok(SimRecord { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open_loop(
        initial: GimbalState,
        platform: PlatformProfile,
        duration: f64,
        h: f64,
    ) -> Scenario {
        Scenario {
            name: "test".into(),
            duration,
            step_size: h,
            initial,
            inertia: InertiaModel::nominal(),
            platform,
            controller: Controller::OpenLoop,
            reference_q: Reference::Zero,
            reference_r: Reference::Zero,
            noise: NoiseSpec::disabled(),
            guard: GuardSpec::default(),
            control_update: ControlUpdate::ZeroOrderHold,
            waive_symmetry: false,
        }
    }

    #[test]
    fn zero_dynamics_stay_zero() {
        let s = open_loop(GimbalState::ZERO, PlatformProfile::still(), 1.0, 0.01);
        let rec = integrate(&s).unwrap();
        assert_eq!(rec.rows.len(), 101);
        for row in &rec.rows {
            assert_eq!(row.state, GimbalState::ZERO);
            assert_eq!(row.u, TorqueCommand::default());
        }
    }

    #[test]
    fn double_integrator_is_exact() {
        let x0 = GimbalState {
            x2: 1.0,
            ..GimbalState::ZERO
        };
        let s = open_loop(x0, PlatformProfile::still(), 2.5, 0.01);
        let rec = integrate(&s).unwrap();
        let last = rec.last().unwrap();
        assert!((last.state.x1 - 2.5).abs() < 1e-12);
        assert!((last.state.theta_q - 2.5).abs() < 1e-12);
        assert_eq!(last.state.x2, 1.0);
    }

    #[test]
    fn drift_free_rates_stay_constant() {
        let x0 = GimbalState {
            x1: 0.3,
            x2: -0.2,
            x3: 1.0,
            x4: 0.7,
            ..GimbalState::ZERO
        };
        let rec = integrate(&open_loop(x0, PlatformProfile::still(), 3.0, 0.001)).unwrap();
        for row in &rec.rows {
            assert_eq!(row.state.x2, -0.2);
            assert_eq!(row.state.x4, 0.7);
        }
    }

    #[test]
    fn rejects_bad_timing() {
        let mut s = open_loop(GimbalState::ZERO, PlatformProfile::still(), 1.0, 0.3);
        assert!(integrate(&s).is_err());
        s.step_size = -0.1;
        assert!(matches!(integrate(&s), Err(Error::InvalidScenario(_))));
        s.step_size = 0.1;
        s.duration = 0.0;
        assert!(integrate(&s).is_err());
    }

    #[test]
    fn rejects_asymmetric_model_unless_waived() {
        let mut s = open_loop(GimbalState::ZERO, PlatformProfile::still(), 0.1, 0.01);
        s.inertia = InertiaModel::new(
            crate::kinematics::Mat3::diag(0.003, 0.008, 0.003),
            crate::kinematics::Mat3::diag(0.003, 0.005, 0.0003),
        )
        .unwrap();
        assert!(integrate(&s).is_err());
        s.waive_symmetry = true;
        assert!(integrate(&s).is_ok());
    }

    #[test]
    fn aborts_on_blow_up() {
        let x0 = GimbalState {
            x1: 1.7e308,
            x2: 1e308,
            ..GimbalState::ZERO
        };
        let s = open_loop(x0, PlatformProfile::still(), 1.0, 0.5);
        let err = integrate(&s).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }), "{err}");
    }

    #[test]
    fn warns_on_coarse_step() {
        let mut s = open_loop(GimbalState::ZERO, PlatformProfile::still(), 1.0, 0.001);
        s.controller = Controller::Stabilize(RateGains::new(20.0, 16.0).unwrap());
        assert!(s.warnings().is_empty());
        s.step_size = 0.1;
        assert_eq!(s.warnings().len(), 1);
    }
}

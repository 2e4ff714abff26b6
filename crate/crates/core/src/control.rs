//! Feedback-linearizing LOS control.
//!
//! The change of variables `u1 = J_ay (v1 - f1)`, `u2 = J_k (v2 - f2)` turns
//! the plant into two double integrators `x2' = v1`, `x4' = v2`. Along that
//! linear system the LOS rates evolve as
//!
//! ```text
//! dq_a/dt = g1(t, x) + v1
//! dr_a/dt = g2(t, x) + v2 cos(x1)
//! ```
//!
//! so choosing `v` to cancel `g1`, `g2` and inject first- or second-order
//! error dynamics gives exponential rate stabilization, rate tracking and
//! LOS-angle tracking. The `cos(x1)` divisor in the yaw channel is bounded
//! away from zero by [`GuardSpec`].

use crate::error::{Error, Result};
use crate::kinematics::{los_rates, BodyRates};
use crate::plant::{f1, f2, GimbalState, InertiaModel, TorqueCommand};

/// Accelerations commanded in the linearized system, rad/s².
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VirtualControl {
    pub v1: f64,
    pub v2: f64,
}

/// Output of a control law together with whether the cosine guard clipped
/// the yaw divisor.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ControlAction {
    pub v: VirtualControl,
    pub guard_active: bool,
}

fn check_gain(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidGain { name, value })
    }
}

/// Decay rates for the first-order rate laws, 1/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateGains {
    c1: f64,
    c2: f64,
}

impl RateGains {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        Ok(Self {
            c1: check_gain("c1", c1)?,
            c2: check_gain("c2", c2)?,
        })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }
}

/// Coefficients of the second-order LOS error dynamics
/// `e_q'' + c1 e_q' + c2 e_q = 0` and `e_r'' + c3 e_r' + c4 e_r = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingGains {
    c1: f64,
    c2: f64,
    c3: f64,
    c4: f64,
}

impl TrackingGains {
    pub fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Result<Self> {
        Ok(Self {
            c1: check_gain("c1", c1)?,
            c2: check_gain("c2", c2)?,
            c3: check_gain("c3", c3)?,
            c4: check_gain("c4", c4)?,
        })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn c3(&self) -> f64 {
        self.c3
    }

    pub fn c4(&self) -> f64 {
        self.c4
    }
}

/// Value and first two time derivatives of a reference signal.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrajectoryPoint {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// A reference signal that reports its own derivatives.
pub trait DesiredTrajectory {
    fn at(&self, t: f64) -> TrajectoryPoint;
}

impl<F> DesiredTrajectory for F
where
    F: Fn(f64) -> TrajectoryPoint,
{
    fn at(&self, t: f64) -> TrajectoryPoint {
        self(t)
    }
}

/// The identically-zero reference.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroTrajectory;

impl DesiredTrajectory for ZeroTrajectory {
    fn at(&self, _t: f64) -> TrajectoryPoint {
        TrajectoryPoint::default()
    }
}

/// Saturation of the `cos(x1)` divisor to a band around zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardSpec {
    threshold: f64,
}

impl GuardSpec {
    pub const DEFAULT_THRESHOLD: f64 = 0.3;

    pub fn new(threshold: f64) -> Result<Self> {
        if threshold > 0.0 && threshold < 1.0 {
            Ok(Self { threshold })
        } else {
            Err(Error::InvalidScenario(format!(
                "guard threshold must lie in (0, 1), got {threshold}"
            )))
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Whether [`guard_cos`] would alter `c`.
    pub fn is_active(&self, c: f64) -> bool {
        -self.threshold < c && c < self.threshold
    }
}

impl Default for GuardSpec {
    fn default() -> Self {
        Self {
            threshold: Self::DEFAULT_THRESHOLD,
        }
    }
}

/// Pushes `c` out of `(-thr, thr)`: values in `(-thr, 0]` map to `-thr`,
/// values in `(0, thr)` map to `thr`, everything else passes through.
pub fn guard_cos(c: f64, spec: &GuardSpec) -> f64 {
    let thr = spec.threshold;
    if -thr < c && c <= 0.0 {
        -thr
    } else if 0.0 < c && c < thr {
        thr
    } else {
        c
    }
}

/// Pitch-rate drift of the linearized system: `dq_a/dt - v1`.
pub fn g1(x: &GimbalState, body: &BodyRates) -> f64 {
    let (s3, c3) = x.x3.sin_cos();
    -body.p_dot * s3 - x.x4 * body.p * c3 + body.q_dot * c3 - x.x4 * body.q * s3
}

/// Yaw-rate drift of the linearized system: `dr_a/dt - v2 cos(x1)`.
pub fn g2(x: &GimbalState, body: &BodyRates) -> f64 {
    let (s1, c1) = x.x1.sin_cos();
    let (s3, c3) = x.x3.sin_cos();
    (body.p_dot * c3 - x.x4 * body.p * s3 + body.q_dot * s3 + x.x4 * body.q * c3) * s1
        + (body.p * c3 + body.q * s3) * x.x2 * c1
        - x.x2 * body.r * s1
        - x.x2 * x.x4 * s1
        + body.r_dot * c1
}

/// Maps linearized-system accelerations to motor torques.
pub fn u_from_v(
    v: &VirtualControl,
    x: &GimbalState,
    body: &BodyRates,
    model: &InertiaModel,
) -> TorqueCommand {
    TorqueCommand {
        u1: model.j_ay() * (v.v1 - f1(x, body)),
        u2: model.j_yaw() * (v.v2 - f2(x, body, model)),
    }
}

/// Inverse of [`u_from_v`].
pub fn v_from_u(
    u: &TorqueCommand,
    x: &GimbalState,
    body: &BodyRates,
    model: &InertiaModel,
) -> VirtualControl {
    VirtualControl {
        v1: u.u1 / model.j_ay() + f1(x, body),
        v2: u.u2 / model.j_yaw() + f2(x, body, model),
    }
}

/// Torques for a law that does not cancel the plant drift (the PID baseline).
pub fn u_from_v_uncompensated(v: &VirtualControl, model: &InertiaModel) -> TorqueCommand {
    TorqueCommand {
        u1: model.j_ay() * v.v1,
        u2: model.j_yaw() * v.v2,
    }
}

/// Drives `q_a`, `r_a` onto desired rate trajectories with first-order error
/// decay at rates `c1`, `c2`.
pub fn rate_tracking_control<Q, R>(
    t: f64,
    x: &GimbalState,
    body: &BodyRates,
    gains: &RateGains,
    qa_des: &Q,
    ra_des: &R,
    guard: &GuardSpec,
) -> ControlAction
where
    Q: DesiredTrajectory + ?Sized,
    R: DesiredTrajectory + ?Sized,
{
    let (q_a, r_a) = los_rates(x, body);
    let qd = qa_des.at(t);
    let rd = ra_des.at(t);
    let cos_x1 = x.x1.cos();
    let v1 = -g1(x, body) + qd.d1 + gains.c1 * (qd.value - q_a);
    let v2 = (-g2(x, body) + rd.d1 + gains.c2 * (rd.value - r_a)) / guard_cos(cos_x1, guard);
    ControlAction {
        v: VirtualControl { v1, v2 },
        guard_active: guard.is_active(cos_x1),
    }
}

/// LOS stabilization: rate tracking of the zero trajectory.
pub fn stabilization_control(
    t: f64,
    x: &GimbalState,
    body: &BodyRates,
    gains: &RateGains,
    guard: &GuardSpec,
) -> ControlAction {
    rate_tracking_control(t, x, body, gains, &ZeroTrajectory, &ZeroTrajectory, guard)
}

/// Steers the LOS angles `theta_q`, `theta_r` (carried in `x`) onto twice
/// differentiable references. The LOS rates stand in for the angle
/// derivatives.
pub fn los_tracking_control<Q, R>(
    t: f64,
    x: &GimbalState,
    body: &BodyRates,
    gains: &TrackingGains,
    thq_des: &Q,
    thr_des: &R,
    guard: &GuardSpec,
) -> ControlAction
where
    Q: DesiredTrajectory + ?Sized,
    R: DesiredTrajectory + ?Sized,
{
    let (q_a, r_a) = los_rates(x, body);
    let qd = thq_des.at(t);
    let rd = thr_des.at(t);
    let cos_x1 = x.x1.cos();
    let v1 = -g1(x, body) + qd.d2 + gains.c1 * (qd.d1 - q_a) + gains.c2 * (qd.value - x.theta_q);
    let v2 = (-g2(x, body) + rd.d2 + gains.c3 * (rd.d1 - r_a) + gains.c4 * (rd.value - x.theta_r))
        / guard_cos(cos_x1, guard);
    ControlAction {
        v: VirtualControl { v1, v2 },
        guard_active: guard.is_active(cos_x1),
    }
}

/// Proportional, integral and derivative gains for one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

/// Per-channel gains of the PID baseline.
///
/// The defaults (`kp = 2`, `ki = 0.2`, `kd = 3` on both channels) give the
/// characteristic polynomial `s^3 + 3 s^2 + 2 s + 0.2` on a pure double
/// integrator, with roots near -2.09, -0.79 and -0.12. All are real, so the
/// loop is overdamped. They are hand-picked, not derived from a reference
/// design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidParams {
    pub elevation: PidGains,
    pub azimuth: PidGains,
}

impl PidParams {
    pub fn validate(&self) -> Result<()> {
        for g in [self.elevation, self.azimuth] {
            for (name, v) in [("kp", g.kp), ("ki", g.ki), ("kd", g.kd)] {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidGain { name, value: v });
                }
            }
        }
        Ok(())
    }
}

impl Default for PidParams {
    fn default() -> Self {
        let g = PidGains {
            kp: 2.0,
            ki: 0.2,
            kd: 3.0,
        };
        Self {
            elevation: g,
            azimuth: g,
        }
    }
}

/// Integral and derivative memory of the PID baseline. Owned by one loop.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PidState {
    integral: [f64; 2],
    last: Option<(f64, [f64; 2])>,
}

/// One update of a single-loop position PID on the LOS-angle errors.
///
/// The integral uses a rectangle rule and the derivative a backward
/// difference against the previous call; the first call has neither.
pub fn pid_baseline(
    t: f64,
    error_q: f64,
    error_r: f64,
    params: &PidParams,
    state: PidState,
) -> (VirtualControl, PidState) {
    let e = [error_q, error_r];
    let mut next = state;
    let mut de = [0.0; 2];
    if let Some((t_prev, e_prev)) = state.last {
        let dt = t - t_prev;
        if dt > 0.0 {
            for i in 0..2 {
                next.integral[i] += e[i] * dt;
                de[i] = (e[i] - e_prev[i]) / dt;
            }
        }
    }
    next.last = Some((t, e));
    let out = |g: &PidGains, i: usize| g.kp * e[i] + g.ki * next.integral[i] + g.kd * de[i];
    (
        VirtualControl {
            v1: out(&params.elevation, 0),
            v2: out(&params.azimuth, 1),
        },
        next,
    )
}

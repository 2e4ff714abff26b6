//! Runtime verification suites.
//!
//! - `lemma1`: randomized round trips of the linearizing change of variables.
//! - `decay`: closed-loop decay rates fitted from noise-free runs and the
//!   pointwise error-dynamics residuals.
//! - `oracle`: finite-difference checks of the drift terms along simulated
//!   trajectories.
//!
//! Every check reports its measured value next to its limit.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::control::{
    g1, g2, u_from_v, v_from_u, DesiredTrajectory, RateGains, TrackingGains, VirtualControl,
};
use crate::error::Result;
use crate::kinematics::{los_rates, pitch_rates, yaw_rates, BodyRates, GimbalAngles, Mat3};
use crate::metrics::{log_linear_fit, Channel};
use crate::plant::{f1, f2, state_derivative, GimbalState, InertiaModel, TorqueCommand};
use crate::sim::{
    integrate, platform_rates, preset, rk4_step, Controller, PlatformProfile, Reference, Scenario,
    SimRecord,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value <= limit`.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {:.3e} (limit {:.3e}, margin {:.3e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.limit,
            self.limit - self.value
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}:", self.suite)?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        write!(
            f,
            "suite {}: {}",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// A random balanced gimbal with moments in `[1e-4, 1e-2]` kg·m².
pub fn random_symmetric_model(rng: &mut impl Rng) -> InertiaModel {
    let a = rng.random_range(1e-4..1e-2);
    let ay = rng.random_range(1e-4..1e-2);
    let kx = rng.random_range(1e-4..1e-2);
    let kz = rng.random_range(1e-4..1e-2);
    InertiaModel::new(Mat3::diag(a, ay, a), Mat3::diag(kx, kx + a, kz))
        .expect("diagonal positive matrices are valid")
}

pub fn random_body(rng: &mut impl Rng, scale: f64) -> BodyRates {
    let mut v = || rng.random_range(-scale..scale);
    BodyRates {
        p: v(),
        q: v(),
        r: v(),
        p_dot: v(),
        q_dot: v(),
        r_dot: v(),
    }
}

fn random_state(rng: &mut impl Rng, angle: f64, rate: f64) -> GimbalState {
    GimbalState {
        x1: rng.random_range(-angle..angle),
        x2: rng.random_range(-rate..rate),
        x3: rng.random_range(-angle..angle),
        x4: rng.random_range(-rate..rate),
        theta_q: rng.random_range(-angle..angle),
        theta_r: rng.random_range(-angle..angle),
    }
}

pub const LEMMA1_TOL: f64 = 1e-12;

/// Both round trips `v -> u -> v` and `u -> v -> u` over random samples.
pub fn lemma1(samples: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut err_v, mut err_u) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let model = random_symmetric_model(&mut rng);
        let x = random_state(&mut rng, std::f64::consts::PI, 2.0);
        let body = random_body(&mut rng, 1.0);
        let v = VirtualControl {
            v1: rng.random_range(-50.0..50.0),
            v2: rng.random_range(-50.0..50.0),
        };
        let u = TorqueCommand {
            u1: rng.random_range(-0.5..0.5),
            u2: rng.random_range(-0.5..0.5),
        };
        let v_back = v_from_u(&u_from_v(&v, &x, &body, &model), &x, &body, &model);
        err_v = err_v
            .max((v_back.v1 - v.v1).abs())
            .max((v_back.v2 - v.v2).abs());
        let u_back = u_from_v(&v_from_u(&u, &x, &body, &model), &x, &body, &model);
        err_u = err_u
            .max((u_back.u1 - u.u1).abs())
            .max((u_back.u2 - u.u2).abs());
    }
    SuiteReport {
        suite: "lemma1",
        checks: vec![
            Check::at_most(
                format!("v -> u -> v max error ({samples} samples)"),
                err_v,
                LEMMA1_TOL,
            ),
            Check::at_most(
                format!("u -> v -> u max error ({samples} samples)"),
                err_u,
                LEMMA1_TOL,
            ),
        ],
    }
}

/// Derivative of the LOS rates along the closed-loop vector field at a
/// record row, by a central difference along `(1, x')`. Independent of the
/// `g1`/`g2` closed forms.
fn los_rate_derivative(
    scenario: &Scenario,
    t: f64,
    x: &GimbalState,
    u: &TorqueCommand,
) -> Result<(f64, f64)> {
    const EPS: f64 = 1e-6;
    let body = platform_rates(&scenario.platform, t);
    let noise = Default::default();
    let dx = state_derivative(t, x, u, &body, &scenario.inertia, &noise)?.to_array();
    let x0 = x.to_array();
    let shifted = |s: f64| {
        let xs = GimbalState::from_array(std::array::from_fn(|i| x0[i] + s * dx[i]));
        los_rates(&xs, &platform_rates(&scenario.platform, t + s))
    };
    let (qp, rp) = shifted(EPS);
    let (qm, rm) = shifted(-EPS);
    Ok(((qp - qm) / (2.0 * EPS), (rp - rm) / (2.0 * EPS)))
}

/// Residual of the designed error dynamics at one row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub t: f64,
    pub elevation: f64,
    pub azimuth: f64,
}

/// Residuals of `e' + c e` (rate laws) or `e'' + c_a e' + c_b e` (LOS law)
/// at every noise-free row where the guard is inactive and no step reference
/// switches within two steps. Empty for other controllers.
pub fn error_dynamics_residuals(scenario: &Scenario, record: &SimRecord) -> Result<Vec<Residual>> {
    let (qd, rd) = (&scenario.reference_q, &scenario.reference_r);
    let mut switches = qd.discontinuities();
    switches.extend(rd.discontinuities());
    let margin = 2.0 * scenario.step_size;
    let mut out = Vec::new();
    for row in &record.rows {
        if row.guard_active || switches.iter().any(|s| (row.t - s).abs() <= margin) {
            continue;
        }
        let (dq, dr) = los_rate_derivative(scenario, row.t, &row.state, &row.u)?;
        let (pq, pr) = (qd.at(row.t), rd.at(row.t));
        let (elevation, azimuth) = match &scenario.controller {
            Controller::Stabilize(g) => (dq + g.c1() * row.q_a, dr + g.c2() * row.r_a),
            Controller::RateTrack(g) => (
                (pq.d1 - dq) + g.c1() * (pq.value - row.q_a),
                (pr.d1 - dr) + g.c2() * (pr.value - row.r_a),
            ),
            Controller::LosTrack(g) => (
                (pq.d2 - dq) + g.c1() * (pq.d1 - row.q_a) + g.c2() * (pq.value - row.state.theta_q),
                (pr.d2 - dr) + g.c3() * (pr.d1 - row.r_a) + g.c4() * (pr.value - row.state.theta_r),
            ),
            _ => return Ok(Vec::new()),
        };
        out.push(Residual {
            t: row.t,
            elevation,
            azimuth,
        });
    }
    Ok(out)
}

pub const DECAY_REL_TOL: f64 = 0.02;
pub const DECAY_FLOOR: f64 = 1e-6;
pub const RESIDUAL_TOL: f64 = 1e-6;

/// Fitted exponential decay of `|q_a|` and `|r_a|` for a stabilization run,
/// over the leading stretch where the error exceeds [`DECAY_FLOOR`] and the
/// guard is inactive.
pub fn fitted_decay_rates(record: &SimRecord) -> [Option<f64>; 2] {
    let t = record.times();
    Channel::BOTH.map(|ch| {
        let e = record.column(|r| match ch {
            Channel::Elevation => r.q_a,
            Channel::Azimuth => r.r_a,
        });
        let end = e
            .iter()
            .zip(&record.rows)
            .position(|(v, row)| v.abs() <= DECAY_FLOOR || row.guard_active)
            .unwrap_or(e.len());
        log_linear_fit(&t[..end], &e[..end], |_| true).map(|f| f.slope)
    })
}

fn decay_check(name: &str, fitted: Option<f64>, expected: f64) -> Check {
    let rel = fitted.map_or(f64::INFINITY, |s| (s / expected - 1.0).abs());
    Check::at_most(
        format!(
            "{name}: fitted slope {} vs {expected}",
            fitted.map_or("n/a".to_string(), |s| format!("{s:.5}"))
        ),
        rel,
        DECAY_REL_TOL,
    )
}

/// Noise-free decay and residual checks on the stabilization and tracking
/// presets.
pub fn decay() -> Result<SuiteReport> {
    let mut checks = Vec::new();

    let stab = preset("fig3-stab")?;
    let Controller::Stabilize(g) = stab.controller else {
        unreachable!("fig3-stab is a stabilization preset")
    };
    let rec = integrate(&stab)?;
    let [sq, sr] = fitted_decay_rates(&rec);
    checks.push(decay_check("fig3-stab |q_a| decay", sq, -g.c1()));
    checks.push(decay_check("fig3-stab |r_a| decay", sr, -g.c2()));
    checks.extend(residual_checks(&stab, &rec)?);

    for name in ["fig4-step", "fig5-sin"] {
        let s = preset(name)?;
        let rec = integrate(&s)?;
        checks.extend(residual_checks(&s, &rec)?);
    }
    Ok(SuiteReport {
        suite: "decay",
        checks,
    })
}

fn residual_checks(s: &Scenario, rec: &SimRecord) -> Result<Vec<Check>> {
    let res = error_dynamics_residuals(s, rec)?;
    let max_q = res.iter().fold(0.0f64, |m, r| m.max(r.elevation.abs()));
    let max_r = res.iter().fold(0.0f64, |m, r| m.max(r.azimuth.abs()));
    let order = if matches!(s.controller, Controller::LosTrack(_)) {
        "second-order"
    } else {
        "first-order"
    };
    Ok(vec![
        Check::at_most(
            format!("{} elevation {order} residual ({} rows)", s.name, res.len()),
            max_q,
            RESIDUAL_TOL,
        ),
        Check::at_most(
            format!("{} azimuth {order} residual ({} rows)", s.name, res.len()),
            max_r,
            RESIDUAL_TOL,
        ),
    ])
}

pub const ORACLE_STEP: f64 = 1e-5;
pub const ORACLE_TOL: f64 = 1e-5;

/// Largest finite-difference disagreement for each drift term.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OracleErrors {
    pub f1: f64,
    pub f2: f64,
    pub g1: f64,
    pub g2: f64,
    /// `max |f1 + g1|`, an exact identity.
    pub identity: f64,
    pub points: usize,
}

/// A random closed-loop scenario: sinusoidal platform, random start and
/// either the stabilizing or the LOS tracking law with random gains.
pub fn random_scenario(rng: &mut impl Rng, index: usize) -> Scenario {
    let mut s = preset("fig3-stab").expect("built-in preset");
    s.name = format!("random-{index}");
    s.duration = 2.0;
    s.step_size = 1e-3;
    s.inertia = random_symmetric_model(rng);
    let mut amp = || rng.random_range(-0.3..0.3);
    let amplitude = [amp(), amp(), amp()];
    let mut freq = || rng.random_range(0.1..2.0);
    let omega = [freq(), freq(), freq()];
    s.platform = PlatformProfile::Sinusoidal { amplitude, omega };
    s.initial = random_state(rng, 0.8, 0.5);
    let mut gain = || rng.random_range(0.5..10.0);
    s.controller = if index.is_multiple_of(2) {
        Controller::Stabilize(RateGains::new(gain(), gain()).expect("positive"))
    } else {
        let (a, b, c, d) = (gain(), gain(), gain(), gain());
        Controller::LosTrack(TrackingGains::new(a, b, c, d).expect("positive"))
    };
    let a = rng.random_range(-1.0..1.0);
    let w = rng.random_range(0.1..1.0);
    s.reference_q = Reference::Sinusoid {
        amplitude: a,
        omega: w,
    };
    s.reference_r = Reference::Sinusoid {
        amplitude: -a,
        omega: w,
    };
    s
}

/// Finite-difference oracle for `f1`, `f2`, `g1`, `g2` at sampled rows of
/// `trajectories` random closed-loop runs.
///
/// Around each sampled row the plant is integrated by `+-h` under the held
/// torque, and each drift term is compared against a central difference of
/// the kinematic quantity it is the derivative of:
///
/// - `f1 = d/dt (p sin x3 - q cos x3)`
/// - `f2 = -dr/dt - (J_ay / J_k) p_k q_a`, with `dr/dt` differenced from the
///   platform profile and `p_k`, `q_a` from the frame chain
/// - `g1 = d/dt (q_a - x2)`
/// - `g2 = d/dt r_a - cos(x1) d/dt x4`
pub fn oracle_errors(
    trajectories: usize,
    samples_per_run: usize,
    h: f64,
    seed: u64,
) -> Result<OracleErrors> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = OracleErrors::default();
    for i in 0..trajectories {
        let s = random_scenario(&mut rng, i);
        let rec = integrate(&s)?;
        let stride = (rec.rows.len() - 1) / samples_per_run.max(1);
        for k in 1..=samples_per_run {
            let row = &rec.rows[(k * stride).min(rec.rows.len() - 2)];
            let (t, x, u) = (row.t, row.state, row.u);
            let profile = &s.platform;
            let model = &s.inertia;
            let rhs = |ts: f64, xs: &GimbalState| {
                state_derivative(
                    ts,
                    xs,
                    &u,
                    &platform_rates(profile, ts),
                    model,
                    &Default::default(),
                )
            };
            let xp = rk4_step(t, &x, h, rhs)?;
            let xm = rk4_step(t, &x, -h, rhs)?;
            let (bp, bm, b) = (
                platform_rates(profile, t + h),
                platform_rates(profile, t - h),
                platform_rates(profile, t),
            );
            let d = |plus: f64, minus: f64| (plus - minus) / (2.0 * h);

            let neg_qk = |x: &GimbalState, b: &BodyRates| b.p * x.x3.sin() - b.q * x.x3.cos();
            let f1_fd = d(neg_qk(&xp, &bp), neg_qk(&xm, &bm));

            let ang = GimbalAngles::from(&x);
            let yaw = yaw_rates(&b, &ang);
            let pitch = pitch_rates(&yaw, &ang);
            let f2_fd = -d(bp.r, bm.r) - model.j_ay() / model.j_yaw() * yaw.about_x * pitch.about_y;

            let qk = |x: &GimbalState, b: &BodyRates| los_rates(x, b).0 - x.x2;
            let g1_fd = d(qk(&xp, &bp), qk(&xm, &bm));
            let g2_fd =
                d(los_rates(&xp, &bp).1, los_rates(&xm, &bm).1) - x.x1.cos() * d(xp.x4, xm.x4);

            out.f1 = out.f1.max((f1(&x, &b) - f1_fd).abs());
            out.f2 = out.f2.max((f2(&x, &b, model) - f2_fd).abs());
            out.g1 = out.g1.max((g1(&x, &b) - g1_fd).abs());
            out.g2 = out.g2.max((g2(&x, &b) - g2_fd).abs());
            out.identity = out.identity.max((f1(&x, &b) + g1(&x, &b)).abs());
            out.points += 1;
        }
    }
    // The identity is algebraic, so also probe it well away from trajectories.
    for _ in 0..10_000 {
        let x = random_state(&mut rng, 10.0, 10.0);
        let b = random_body(&mut rng, 5.0);
        out.identity = out.identity.max((f1(&x, &b) + g1(&x, &b)).abs());
    }
    Ok(out)
}

pub fn oracle() -> Result<SuiteReport> {
    let e = oracle_errors(10, 20, ORACLE_STEP, 2024)?;
    let n = e.points;
    Ok(SuiteReport {
        suite: "oracle",
        checks: vec![
            Check::at_most("max |f1 + g1| (exact identity)", e.identity, 0.0),
            Check::at_most(
                format!("f1 vs finite difference ({n} points)"),
                e.f1,
                ORACLE_TOL,
            ),
            Check::at_most(
                format!("f2 vs finite difference ({n} points)"),
                e.f2,
                ORACLE_TOL,
            ),
            Check::at_most(
                format!("g1 vs finite difference ({n} points)"),
                e.g1,
                ORACLE_TOL,
            ),
            Check::at_most(
                format!("g2 vs finite difference ({n} points)"),
                e.g2,
                ORACLE_TOL,
            ),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma1_small_batch_passes() {
        let r = lemma1(500, 3);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn check_display_reports_margin() {
        let c = Check::at_most("x", 1e-13, 1e-12);
        let s = c.to_string();
        assert!(s.starts_with("[PASS] x:"), "{s}");
        assert!(!Check::at_most("y", 2.0, 1.0).passed);
    }

    #[test]
    fn residuals_vanish_for_short_stabilization_run() {
        let mut s = preset("fig3-stab").unwrap();
        s.duration = 1.0;
        let rec = integrate(&s).unwrap();
        let res = error_dynamics_residuals(&s, &rec).unwrap();
        assert_eq!(res.len(), rec.rows.len());
        for r in res {
            assert!(r.elevation.abs() < RESIDUAL_TOL && r.azimuth.abs() < RESIDUAL_TOL);
        }
    }

    #[test]
    fn oracle_small_run_passes() {
        let e = oracle_errors(2, 4, ORACLE_STEP, 5).unwrap();
        assert_eq!(e.points, 8);
        assert_eq!(e.identity, 0.0);
        for v in [e.f1, e.f2, e.g1, e.g2] {
            assert!(v < ORACLE_TOL, "{e:?}");
        }
    }
}

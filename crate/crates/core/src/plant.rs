//! Open-loop plant of a symmetric two-axis gimbal.
//!
//! With the gimbals balanced and free of products of inertia, the pitch and
//! yaw axes obey
//!
//! ```text
//! J_ay * dq_a/dt = T_y
//! J_k  * dr_k/dt = T_z - J_ay * p_k * q_a
//! ```
//!
//! which in the state `x = (nu2, nu2_dot, nu1, nu1_dot)` reads
//! `x2' = u1 / J_ay + f1(t, x)` and `x4' = u2 / J_k + f2(t, x)`. The LOS
//! angles `theta_q`, `theta_r` are carried along as two extra integrated
//! states.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::kinematics::{los_rates, BodyRates, Mat3};

/// Default absolute tolerance for the symmetric-design checks, kg·m².
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Inertia matrices of the inner (pitch, `A`) and outer (yaw, `K`) gimbals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaModel {
    j_a: Mat3,
    j_k: Mat3,
}

impl InertiaModel {
    /// Builds a model, rejecting asymmetric matrices and non-positive moments.
    pub fn new(j_a: Mat3, j_k: Mat3) -> Result<Self> {
        for (name, m) in [("J_A", &j_a), ("J_K", &j_k)] {
            if m.0.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInertia(format!(
                    "{name} has non-finite entries"
                )));
            }
            if !m.is_symmetric(SYMMETRY_TOL) {
                return Err(Error::InvalidInertia(format!("{name} is not symmetric")));
            }
            if (0..3).any(|i| m.0[i][i] <= 0.0) {
                return Err(Error::InvalidInertia(format!(
                    "{name} has a non-positive moment of inertia"
                )));
            }
        }
        Ok(Self { j_a, j_k })
    }

    /// The gimbal used throughout the examples:
    /// `J_A = diag(0.003, 0.008, 0.003)`, `J_K = diag(0.003, 0.006, 0.0003)`.
    pub fn nominal() -> Self {
        Self {
            j_a: Mat3::diag(0.003, 0.008, 0.003),
            j_k: Mat3::diag(0.003, 0.006, 0.0003),
        }
    }

    pub fn j_a(&self) -> &Mat3 {
        &self.j_a
    }

    pub fn j_k(&self) -> &Mat3 {
        &self.j_k
    }

    /// Pitch-axis moment `J_ay`.
    pub fn j_ay(&self) -> f64 {
        self.j_a.0[1][1]
    }

    /// Effective yaw-axis moment `J_kz + J_az`.
    pub fn j_yaw(&self) -> f64 {
        self.j_k.0[2][2] + self.j_a.0[2][2]
    }

    /// Checks the balanced-gimbal conditions at [`SYMMETRY_TOL`].
    pub fn validate_symmetry(&self) -> SymmetryReport {
        self.validate_symmetry_with(SYMMETRY_TOL)
    }

    pub fn validate_symmetry_with(&self, tol: f64) -> SymmetryReport {
        let a = &self.j_a.0;
        let k = &self.j_k.0;
        let checks = [
            (SymmetryCondition::PitchProductXy, a[0][1]),
            (SymmetryCondition::PitchProductXz, a[0][2]),
            (SymmetryCondition::PitchProductYz, a[1][2]),
            (SymmetryCondition::PitchAxialBalance, a[0][0] - a[2][2]),
            (SymmetryCondition::YawProductXy, k[0][1]),
            (SymmetryCondition::YawProductXz, k[0][2]),
            (SymmetryCondition::YawProductYz, k[1][2]),
            (
                SymmetryCondition::YawCrossBalance,
                k[0][0] + a[0][0] - k[1][1],
            ),
        ];
        SymmetryReport {
            violations: checks
                .into_iter()
                .filter(|(_, residual)| residual.abs() > tol)
                .map(|(c, _)| c)
                .collect(),
        }
    }
}

/// One of the balanced-gimbal conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryCondition {
    PitchProductXy,
    PitchProductXz,
    PitchProductYz,
    PitchAxialBalance,
    YawProductXy,
    YawProductXz,
    YawProductYz,
    YawCrossBalance,
}

impl fmt::Display for SymmetryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PitchProductXy => "D_xy ≠ 0",
            Self::PitchProductXz => "D_xz ≠ 0",
            Self::PitchProductYz => "D_yz ≠ 0",
            Self::PitchAxialBalance => "J_ax ≠ J_az",
            Self::YawProductXy => "d_xy ≠ 0",
            Self::YawProductXz => "d_xz ≠ 0",
            Self::YawProductYz => "d_yz ≠ 0",
            Self::YawCrossBalance => "J_kx + J_ax ≠ J_ky",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryReport {
    pub violations: Vec<SymmetryCondition>,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for SymmetryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return f.write_str("symmetric design: ok");
        }
        let list: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "symmetric design violated: {}", list.join(", "))
    }
}

/// Gimbal state `(nu2, nu2_dot, nu1, nu1_dot)` plus the integrated LOS
/// elevation and azimuth.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GimbalState {
    /// Pitch gimbal angle, rad.
    pub x1: f64,
    /// Pitch gimbal rate, rad/s.
    pub x2: f64,
    /// Yaw gimbal angle, rad.
    pub x3: f64,
    /// Yaw gimbal rate, rad/s.
    pub x4: f64,
    /// LOS elevation, the time integral of `q_a`, rad.
    pub theta_q: f64,
    /// LOS azimuth, the time integral of `r_a`, rad.
    pub theta_r: f64,
}

/// Time derivative of a [`GimbalState`], component for component.
pub type StateDerivative = GimbalState;

impl GimbalState {
    pub const ZERO: Self = Self {
        x1: 0.0,
        x2: 0.0,
        x3: 0.0,
        x4: 0.0,
        theta_q: 0.0,
        theta_r: 0.0,
    };

    pub fn from_array(a: [f64; 6]) -> Self {
        Self {
            x1: a[0],
            x2: a[1],
            x3: a[2],
            x4: a[3],
            theta_q: a[4],
            theta_r: a[5],
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.x1,
            self.x2,
            self.x3,
            self.x4,
            self.theta_q,
            self.theta_r,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Gimbal motor torques: `u1 = T_y` (pitch), `u2 = T_z` (yaw), N·m.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TorqueCommand {
    pub u1: f64,
    pub u2: f64,
}

/// Additive torque-channel noise configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub enabled: bool,
    pub sigma_y: f64,
    pub sigma_z: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub const DEFAULT_SIGMA: f64 = 0.002;

    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }

    pub fn enabled(seed: u64) -> Self {
        Self {
            enabled: true,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, s) in [("sigma_y", self.sigma_y), ("sigma_z", self.sigma_z)] {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::InvalidScenario(format!(
                    "noise {name} must be finite and >= 0, got {s}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            enabled: false,
            sigma_y: Self::DEFAULT_SIGMA,
            sigma_z: Self::DEFAULT_SIGMA,
            seed: 0,
        }
    }
}

/// One realization of the torque noise, N·m.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TorqueNoise {
    pub y: f64,
    pub z: f64,
}

/// Seeded zero-mean Gaussian torque noise stream. Owned by a single run.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    spec: NoiseSpec,
    rng: ChaCha8Rng,
}

impl NoiseSource {
    pub fn new(spec: NoiseSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            spec,
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
        })
    }

    /// Draws the next sample; always zero when the spec is disabled.
    pub fn draw(&mut self) -> TorqueNoise {
        if !self.spec.enabled {
            return TorqueNoise::default();
        }
        TorqueNoise {
            y: gaussian(&mut self.rng, self.spec.sigma_y),
            z: gaussian(&mut self.rng, self.spec.sigma_z),
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    // sigma is validated finite and non-negative, so construction cannot fail.
    let n: f64 = Normal::new(0.0, 1.0).unwrap().sample(rng);
    sigma * n
}

/// Pitch-channel drift: the time derivative of `-q_k` along the motion.
pub fn f1(x: &GimbalState, body: &BodyRates) -> f64 {
    let (s3, c3) = x.x3.sin_cos();
    body.p_dot * s3 + x.x4 * body.p * c3 - body.q_dot * c3 + x.x4 * body.q * s3
}

/// Yaw-channel drift: `-r_dot - (J_ay / J_k) * p_k * q_a`.
pub fn f2(x: &GimbalState, body: &BodyRates, model: &InertiaModel) -> f64 {
    let (s3, c3) = x.x3.sin_cos();
    let p_k = body.p * c3 + body.q * s3;
    let q_a = -body.p * s3 + body.q * c3 + x.x2;
    -body.r_dot - model.j_ay() / model.j_yaw() * p_k * q_a
}

/// Right-hand side of the augmented six-state plant.
///
/// `noise` is the torque realization held over the current integrator step.
pub fn state_derivative(
    t: f64,
    x: &GimbalState,
    u: &TorqueCommand,
    body: &BodyRates,
    model: &InertiaModel,
    noise: &TorqueNoise,
) -> Result<StateDerivative> {
    if !x.is_finite() {
        return Err(Error::NonFinite { t, what: "state" });
    }
    if !(u.u1.is_finite() && u.u2.is_finite()) {
        return Err(Error::NonFinite { t, what: "torque" });
    }
    if !body.is_finite() {
        return Err(Error::NonFinite {
            t,
            what: "body rates",
        });
    }
    if !(noise.y.is_finite() && noise.z.is_finite()) {
        return Err(Error::NonFinite { t, what: "noise" });
    }
    let (q_a, r_a) = los_rates(x, body);
    Ok(GimbalState {
        x1: x.x2,
        x2: (u.u1 + noise.y) / model.j_ay() + f1(x, body),
        x3: x.x4,
        x4: (u.u2 + noise.z) / model.j_yaw() + f2(x, body, model),
        theta_q: q_a,
        theta_r: r_a,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn nominal_model_is_symmetric() {
        let m = InertiaModel::nominal();
        let report = m.validate_symmetry();
        assert!(report.passed(), "{report}");
        assert_eq!(m.j_ay(), 0.008);
        assert!((m.j_yaw() - 0.0033).abs() < 1e-18);
    }

    #[test]
    fn product_of_inertia_is_reported() {
        let mut j_a = Mat3::diag(0.003, 0.008, 0.003);
        j_a.0[0][1] = 0.001;
        j_a.0[1][0] = 0.001;
        let m = InertiaModel::new(j_a, Mat3::diag(0.003, 0.006, 0.0003)).unwrap();
        let report = m.validate_symmetry();
        assert_eq!(report.violations, vec![SymmetryCondition::PitchProductXy]);
        assert_eq!(report.violations[0].to_string(), "D_xy ≠ 0");
    }

    #[test]
    fn cross_balance_is_reported() {
        let m = InertiaModel::new(
            Mat3::diag(0.003, 0.008, 0.003),
            Mat3::diag(0.003, 0.005, 0.0003),
        )
        .unwrap();
        assert_eq!(
            m.validate_symmetry().violations,
            vec![SymmetryCondition::YawCrossBalance]
        );
    }

    #[test]
    fn rejects_bad_matrices() {
        let mut asym = Mat3::diag(1.0, 1.0, 1.0);
        asym.0[0][2] = 0.1;
        assert!(InertiaModel::new(asym, Mat3::IDENTITY).is_err());
        assert!(InertiaModel::new(Mat3::diag(1.0, 0.0, 1.0), Mat3::IDENTITY).is_err());
    }

    #[test]
    fn f1_examples() {
        assert_eq!(f1(&GimbalState::ZERO, &BodyRates::ZERO), 0.0);
        let body = BodyRates {
            q_dot: 1.0,
            ..BodyRates::ZERO
        };
        assert_eq!(f1(&GimbalState::ZERO, &body), -1.0);
    }

    #[test]
    fn f2_examples() {
        let m = InertiaModel::nominal();
        assert_eq!(f2(&GimbalState::ZERO, &BodyRates::ZERO, &m), 0.0);
        let x = GimbalState {
            x2: 1.0,
            ..GimbalState::ZERO
        };
        assert_eq!(f2(&x, &BodyRates::ZERO, &m), 0.0);

        let x = GimbalState {
            x2: 0.3,
            ..GimbalState::ZERO
        };
        let body = BodyRates::steady(0.1, 0.0, 0.0);
        let expected = -(0.008 / 0.0033) * 0.1 * 0.3;
        assert!((f2(&x, &body, &m) - expected).abs() < 1e-15);
        assert!((expected + 0.072_727_272_727).abs() < 1e-12);
    }

    #[test]
    fn drift_free_double_integrators() {
        let m = InertiaModel::nominal();
        let x = GimbalState {
            x2: 0.1,
            x4: 0.2,
            ..GimbalState::ZERO
        };
        let d = state_derivative(
            0.0,
            &x,
            &TorqueCommand::default(),
            &BodyRates::ZERO,
            &m,
            &TorqueNoise::default(),
        )
        .unwrap();
        assert_eq!(d.to_array(), [0.1, 0.0, 0.2, 0.0, 0.1, 0.2]);
    }

    #[test]
    fn unit_acceleration_from_torque() {
        let m = InertiaModel::nominal();
        let u = TorqueCommand { u1: 0.008, u2: 0.0 };
        let d = state_derivative(
            0.0,
            &GimbalState::ZERO,
            &u,
            &BodyRates::ZERO,
            &m,
            &TorqueNoise::default(),
        )
        .unwrap();
        assert_eq!(d.x2, 1.0);
    }

    #[test]
    fn rejects_non_finite_inputs() {
        let m = InertiaModel::nominal();
        let x = GimbalState {
            x4: f64::NAN,
            ..GimbalState::ZERO
        };
        let err = state_derivative(
            1.5,
            &x,
            &TorqueCommand::default(),
            &BodyRates::ZERO,
            &m,
            &TorqueNoise::default(),
        );
        assert!(matches!(err, Err(Error::NonFinite { what: "state", .. })));
        let u = TorqueCommand {
            u1: f64::INFINITY,
            u2: 0.0,
        };
        assert!(state_derivative(
            0.0,
            &GimbalState::ZERO,
            &u,
            &BodyRates::ZERO,
            &m,
            &TorqueNoise::default()
        )
        .is_err());
    }

    #[test]
    fn noise_is_reproducible_and_silent_when_disabled() {
        let mut off = NoiseSource::new(NoiseSpec::disabled()).unwrap();
        assert_eq!(off.draw(), TorqueNoise::default());

        let mut a = NoiseSource::new(NoiseSpec::enabled(7)).unwrap();
        let mut b = NoiseSource::new(NoiseSpec::enabled(7)).unwrap();
        for _ in 0..100 {
            assert_eq!(a.draw(), b.draw());
        }
        let spec = NoiseSpec {
            sigma_y: -1.0,
            ..NoiseSpec::enabled(1)
        };
        assert!(NoiseSource::new(spec).is_err());
    }

    #[test]
    fn noise_sample_statistics() {
        let mut src = NoiseSource::new(NoiseSpec::enabled(42)).unwrap();
        let n = 20_000;
        let draws: Vec<_> = (0..n).map(|_| src.draw()).collect();
        let mean = draws.iter().map(|d| d.y).sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d.y - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 5e-5);
        assert!((var.sqrt() - NoiseSpec::DEFAULT_SIGMA).abs() < 1e-4);
    }

    fn arb_body() -> impl Strategy<Value = BodyRates> {
        prop::array::uniform6(-1.0..1.0f64).prop_map(|v| BodyRates {
            p: v[0],
            q: v[1],
            r: v[2],
            p_dot: v[3],
            q_dot: v[4],
            r_dot: v[5],
        })
    }

    proptest! {
        #[test]
        fn torque_enters_affinely(
            x in prop::array::uniform6(-3.0..3.0f64).prop_map(GimbalState::from_array),
            body in arb_body(),
            ua in -1.0..1.0f64,
            ub in -1.0..1.0f64,
        ) {
            prop_assume!((ua - ub).abs() > 1e-3);
            let m = InertiaModel::nominal();
            let n = TorqueNoise::default();
            let da = state_derivative(0.0, &x, &TorqueCommand { u1: ua, u2: ua }, &body, &m, &n).unwrap();
            let db = state_derivative(0.0, &x, &TorqueCommand { u1: ub, u2: ub }, &body, &m, &n).unwrap();
            let slope_y = (da.x2 - db.x2) / (ua - ub);
            let slope_z = (da.x4 - db.x4) / (ua - ub);
            prop_assert!((slope_y * m.j_ay() - 1.0).abs() < 1e-9);
            prop_assert!((slope_z * m.j_yaw() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn derivative_recomposes_from_drift_terms(
            x in prop::array::uniform6(-3.0..3.0f64).prop_map(GimbalState::from_array),
            body in arb_body(),
            u1 in -0.1..0.1f64,
            u2 in -0.1..0.1f64,
        ) {
            let m = InertiaModel::nominal();
            let u = TorqueCommand { u1, u2 };
            let d = state_derivative(0.0, &x, &u, &body, &m, &TorqueNoise::default()).unwrap();
            let (q_a, r_a) = los_rates(&x, &body);
            prop_assert_eq!(d.x1, x.x2);
            prop_assert_eq!(d.x3, x.x4);
            prop_assert!((d.x2 - (u1 / m.j_ay() + f1(&x, &body))).abs() < 1e-12);
            prop_assert!((d.x4 - (u2 / m.j_yaw() + f2(&x, &body, &m))).abs() < 1e-12);
            prop_assert_eq!(d.theta_q, q_a);
            prop_assert_eq!(d.theta_r, r_a);
        }
    }
}

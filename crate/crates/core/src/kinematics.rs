//! Frame algebra for a two-axis (yaw over pitch) gimbal.
//!
//! Three frames share a common origin: the platform body `B`, the outer yaw
//! gimbal `K` (rotated by `nu1` about the body z-axis) and the inner pitch
//! gimbal `A` (rotated by `nu2` about the yaw y-axis). The sensor line of
//! sight lies along the x-axis of `A`.

use std::ops::Mul;

use crate::plant::GimbalState;

/// Inertial angular velocity of the platform body and its time derivative.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BodyRates {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub p_dot: f64,
    pub q_dot: f64,
    pub r_dot: f64,
}

impl BodyRates {
    pub const ZERO: Self = Self {
        p: 0.0,
        q: 0.0,
        r: 0.0,
        p_dot: 0.0,
        q_dot: 0.0,
        r_dot: 0.0,
    };

    /// Rates with zero derivatives, e.g. a platform turning at constant rate.
    pub fn steady(p: f64, q: f64, r: f64) -> Self {
        Self {
            p,
            q,
            r,
            ..Self::ZERO
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.p, self.q, self.r, self.p_dot, self.q_dot, self.r_dot]
            .iter()
            .all(|v| v.is_finite())
    }

    /// The body angular velocity vector `(p, q, r)`.
    pub fn omega(&self) -> [f64; 3] {
        [self.p, self.q, self.r]
    }
}

/// Gimbal joint angles and rates. Angles are unwrapped reals.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GimbalAngles {
    /// Yaw gimbal angle about the body z-axis, rad.
    pub nu1: f64,
    /// Pitch gimbal angle about the yaw y-axis, rad.
    pub nu2: f64,
    pub nu1_dot: f64,
    pub nu2_dot: f64,
}

impl GimbalAngles {
    /// Wraps an unwrapped angle into `(-pi, pi]` for display.
    pub fn wrap(angle: f64) -> f64 {
        let two_pi = std::f64::consts::TAU;
        let w = angle.rem_euclid(two_pi);
        if w > std::f64::consts::PI {
            w - two_pi
        } else {
            w
        }
    }
}

impl From<&GimbalState> for GimbalAngles {
    fn from(x: &GimbalState) -> Self {
        Self {
            nu1: x.x3,
            nu2: x.x1,
            nu1_dot: x.x4,
            nu2_dot: x.x2,
        }
    }
}

/// Inertial angular velocity expressed in one of the gimbal frames.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FrameRates {
    pub about_x: f64,
    pub about_y: f64,
    pub about_z: f64,
}

impl FrameRates {
    pub fn as_array(&self) -> [f64; 3] {
        [self.about_x, self.about_y, self.about_z]
    }
}

impl From<[f64; 3]> for FrameRates {
    fn from(v: [f64; 3]) -> Self {
        Self {
            about_x: v[0],
            about_y: v[1],
            about_z: v[2],
        }
    }
}

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Self = Self([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Self([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = m[j][i];
            }
        }
        Self(t)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.transpose()) <= tol
    }
}

impl Mul for Mat3 {
    type Output = Mat3;

    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        Mat3(out)
    }
}

/// Coordinate transform from the body frame into the yaw gimbal frame
/// (rotation by `nu1` about z).
pub fn rot_body_to_yaw(nu1: f64) -> Mat3 {
    let (s, c) = nu1.sin_cos();
    Mat3([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
}

/// Coordinate transform from the yaw gimbal frame into the pitch gimbal frame
/// (rotation by `nu2` about y).
pub fn rot_yaw_to_pitch(nu2: f64) -> Mat3 {
    let (s, c) = nu2.sin_cos();
    Mat3([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])
}

/// Inertial angular velocity of the yaw gimbal, in yaw-frame components.
pub fn yaw_rates(body: &BodyRates, ang: &GimbalAngles) -> FrameRates {
    let (s, c) = ang.nu1.sin_cos();
    FrameRates {
        about_x: body.p * c + body.q * s,
        about_y: -body.p * s + body.q * c,
        about_z: body.r + ang.nu1_dot,
    }
}

/// Inertial angular velocity of the pitch gimbal, in pitch-frame components.
pub fn pitch_rates(yaw: &FrameRates, ang: &GimbalAngles) -> FrameRates {
    let (s, c) = ang.nu2.sin_cos();
    FrameRates {
        about_x: yaw.about_x * c - yaw.about_z * s,
        about_y: yaw.about_y + ang.nu2_dot,
        about_z: yaw.about_x * s + yaw.about_z * c,
    }
}

/// Inertial line-of-sight rates `(q_a, r_a)` written directly in terms of
/// the gimbal state.
pub fn los_rates(state: &GimbalState, body: &BodyRates) -> (f64, f64) {
    let (s1, c1) = state.x1.sin_cos();
    let (s3, c3) = state.x3.sin_cos();
    let q_a = -body.p * s3 + body.q * c3 + state.x2;
    let r_a = body.p * c3 * s1 + body.q * s3 * s1 + body.r * c1 + state.x4 * c1;
    (q_a, r_a)
}

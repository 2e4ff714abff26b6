//! Response metrics: settling time, peak and integrated error, RMS and
//! log-linear decay fits.

use crate::control::DesiredTrajectory;
use crate::sim::{Controller, Reference, Scenario, SimRecord};

/// Least-squares line `y = slope * t + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

pub fn linear_fit(t: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = t.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mean_t = t[..n].iter().sum::<f64>() / n as f64;
    let mean_y = y[..n].iter().sum::<f64>() / n as f64;
    let (mut stt, mut sty) = (0.0, 0.0);
    for i in 0..n {
        let dt = t[i] - mean_t;
        stt += dt * dt;
        sty += dt * (y[i] - mean_y);
    }
    if stt == 0.0 {
        return None;
    }
    let slope = sty / stt;
    Some(LinearFit {
        slope,
        intercept: mean_y - slope * mean_t,
        points: n,
    })
}

/// Fits `ln|e|` against `t` over the samples accepted by `keep`.
pub fn log_linear_fit(
    t: &[f64],
    e: &[f64],
    mut keep: impl FnMut(usize) -> bool,
) -> Option<LinearFit> {
    let (ts, ys): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(e)
        .enumerate()
        .filter(|(i, (_, v))| v.abs() > 0.0 && keep(*i))
        .map(|(_, (t, v))| (*t, v.abs().ln()))
        .unzip();
    linear_fit(&ts, &ys)
}

pub fn rms(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}

pub fn peak_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Trapezoidal integral of `|e|`.
pub fn integrated_abs_error(t: &[f64], e: &[f64]) -> f64 {
    t.windows(2)
        .zip(e.windows(2))
        .map(|(tw, ew)| 0.5 * (tw[1] - tw[0]) * (ew[0].abs() + ew[1].abs()))
        .sum()
}

/// Time from `t[start]` until `|e|` enters and stays within `band` up to
/// (excluding) index `end`. `None` if the last sample is outside the band.
pub fn settling_time(t: &[f64], e: &[f64], band: f64, start: usize, end: usize) -> Option<f64> {
    let end = end.min(e.len());
    if start >= end {
        return None;
    }
    let last_outside = (start..end).rev().find(|&i| e[i].abs() > band);
    match last_outside {
        None => Some(0.0),
        Some(i) if i + 1 < end => Some(t[i + 1] - t[start]),
        Some(_) => None,
    }
}

/// Elevation or azimuth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Elevation,
    Azimuth,
}

impl Channel {
    pub const BOTH: [Channel; 2] = [Channel::Elevation, Channel::Azimuth];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Elevation => "elevation",
            Self::Azimuth => "azimuth",
        }
    }
}

/// Tracking error `reference - output` for one channel. The output is the
/// LOS angle for angle-tracking laws and the LOS rate otherwise.
pub fn tracking_error(scenario: &Scenario, record: &SimRecord, channel: Channel) -> Vec<f64> {
    let angle_output = matches!(
        scenario.controller,
        Controller::LosTrack(_) | Controller::Pid(_)
    );
    let reference = match channel {
        Channel::Elevation => &scenario.reference_q,
        Channel::Azimuth => &scenario.reference_r,
    };
    let zero_ref = matches!(
        scenario.controller,
        Controller::Stabilize(_) | Controller::OpenLoop
    );
    record
        .rows
        .iter()
        .map(|row| {
            let target = if zero_ref {
                0.0
            } else {
                reference.at(row.t).value
            };
            let output = match (channel, angle_output) {
                (Channel::Elevation, true) => row.state.theta_q,
                (Channel::Azimuth, true) => row.state.theta_r,
                (Channel::Elevation, false) => row.q_a,
                (Channel::Azimuth, false) => row.r_a,
            };
            target - output
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelMetrics {
    /// 2% settling time, s. For a step reference it is measured from the
    /// step onset within the on-window, with the band 2% of the step level;
    /// otherwise from `t = 0` with the band 2% of the peak error.
    pub settling_time: Option<f64>,
    pub peak_error: f64,
    pub integrated_abs_error: f64,
}

pub const SETTLING_BAND: f64 = 0.02;

pub fn channel_metrics(
    scenario: &Scenario,
    record: &SimRecord,
    channel: Channel,
) -> ChannelMetrics {
    let t = record.times();
    let e = tracking_error(scenario, record, channel);
    let reference = match channel {
        Channel::Elevation => &scenario.reference_q,
        Channel::Azimuth => &scenario.reference_r,
    };
    let settling = match *reference {
        Reference::Step { level, t_on, t_off }
            if !matches!(scenario.controller, Controller::Stabilize(_)) =>
        {
            let start = t.partition_point(|&ti| ti < t_on);
            let end = t.partition_point(|&ti| ti < t_off);
            settling_time(&t, &e, SETTLING_BAND * level.abs(), start, end)
        }
        _ => settling_time(&t, &e, SETTLING_BAND * peak_abs(&e), 0, e.len()),
    };
    ChannelMetrics {
        settling_time: settling,
        peak_error: peak_abs(&e),
        integrated_abs_error: integrated_abs_error(&t, &e),
    }
}

//! Minimal SVG line charts for simulation records.

use std::fmt::Write as _;

use isp_gimbal::control::DesiredTrajectory;
use isp_gimbal::kinematics::BodyRates;
use isp_gimbal::sim::{platform_rates, Scenario, SimRecord};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 44.0;
const MAX_POINTS: usize = 2000;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#7f7f7f"];

pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: &str, values: Vec<f64>) -> Self {
        Self {
            label: label.to_string(),
            values,
            dashed: false,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

pub struct Chart {
    pub title: String,
    pub y_label: String,
    pub t: Vec<f64>,
    pub series: Vec<Series>,
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = lo.abs().max(1.0) * 0.1;
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Round tick spacing giving roughly `target` intervals.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac < 1.5 {
        1.0
    } else if frac < 3.5 {
        2.0
    } else if frac < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = tick_step(hi - lo, 5.0);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Chart {
    pub fn to_svg(&self) -> String {
        let (t0, t1) = match (self.t.first(), self.t.last()) {
            (Some(&a), Some(&b)) if b > a => (a, b),
            _ => (0.0, 1.0),
        };
        let (y0, y1) = bounds(self.series.iter().flat_map(|s| s.values.iter().copied()));
        let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |t: f64| MARGIN_LEFT + (t - t0) / (t1 - t0) * pw;
        let sy = |y: f64| MARGIN_TOP + (y1 - y) / (y1 - y0) * ph;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        for tick in ticks(t0, t1) {
            let x = sx(tick);
            let _ = writeln!(
                svg,
                r##"<line x1="{x:.1}" y1="{MARGIN_TOP}" x2="{x:.1}" y2="{:.1}" stroke="#e0e0e0"/>"##,
                MARGIN_TOP + ph
            );
            let _ = writeln!(
                svg,
                r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                MARGIN_TOP + ph + 16.0,
                format_tick(tick)
            );
        }
        for tick in ticks(y0, y1) {
            let y = sy(tick);
            let _ = writeln!(
                svg,
                r##"<line x1="{MARGIN_LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#e0e0e0"/>"##,
                MARGIN_LEFT + pw
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 6.0,
                y + 4.0,
                format_tick(tick)
            );
        }
        let _ = writeln!(
            svg,
            r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">time [s]</text>"#,
            MARGIN_LEFT + pw / 2.0,
            HEIGHT - 8.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            MARGIN_TOP + ph / 2.0,
            MARGIN_TOP + ph / 2.0,
            escape(&self.y_label)
        );

        let stride = self.t.len().div_ceil(MAX_POINTS).max(1);
        for (k, s) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let mut points = String::new();
            for i in (0..self.t.len().min(s.values.len())).step_by(stride) {
                if s.values[i].is_finite() {
                    let _ = write!(points, "{:.2},{:.2} ", sx(self.t[i]), sy(s.values[i]));
                }
            }
            let dash = if s.dashed {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
                points.trim_end()
            );
            let ly = MARGIN_TOP + 14.0 + 16.0 * k as f64;
            let lx = MARGIN_LEFT + pw - 130.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="2"{dash}/>"#,
                ly - 4.0,
                lx + 24.0,
                ly - 4.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{ly:.1}">{}</text>"#,
                lx + 30.0,
                escape(&s.label)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e-3 && v.abs() < 1e4 {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

/// Platform rates, LOS rates, both LOS angles against their references, and
/// torques. File stem paired with each chart.
pub fn figures(scenario: &Scenario, record: &SimRecord) -> Vec<(&'static str, Chart)> {
    let t = record.times();
    let body: Vec<BodyRates> = t
        .iter()
        .map(|&t| platform_rates(&scenario.platform, t))
        .collect();
    let reference =
        |r: &dyn DesiredTrajectory| t.iter().map(|&t| r.at(t).value).collect::<Vec<_>>();
    let chart = |title: &str, y_label: &str, series: Vec<Series>| Chart {
        title: format!("{}: {title}", scenario.name),
        y_label: y_label.to_string(),
        t: t.clone(),
        series,
    };
    vec![
        (
            "platform",
            chart(
                "platform angular rates",
                "rate [rad/s]",
                vec![
                    Series::new("p", body.iter().map(|b| b.p).collect()),
                    Series::new("q", body.iter().map(|b| b.q).collect()),
                    Series::new("r", body.iter().map(|b| b.r).collect()),
                ],
            ),
        ),
        (
            "los_rates",
            chart(
                "LOS angular rates",
                "rate [rad/s]",
                vec![
                    Series::new("q_a", record.column(|r| r.q_a)),
                    Series::new("r_a", record.column(|r| r.r_a)),
                ],
            ),
        ),
        (
            "elevation",
            chart(
                "elevation LOS angle",
                "angle [rad]",
                vec![
                    Series::new("theta_q", record.column(|r| r.state.theta_q)),
                    Series::new("desired", reference(&scenario.reference_q)).dashed(),
                ],
            ),
        ),
        (
            "azimuth",
            chart(
                "azimuth LOS angle",
                "angle [rad]",
                vec![
                    Series::new("theta_r", record.column(|r| r.state.theta_r)),
                    Series::new("desired", reference(&scenario.reference_r)).dashed(),
                ],
            ),
        ),
        (
            "torques",
            chart(
                "control torques",
                "torque [N m]",
                vec![
                    Series::new("u1", record.column(|r| r.u.u1)),
                    Series::new("u2", record.column(|r| r.u.u2)),
                ],
            ),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round() {
        assert_eq!(tick_step(60.0, 5.0), 10.0);
        assert_eq!(tick_step(1.0, 5.0), 0.2);
        assert_eq!(
            ticks(0.0, 60.0),
            vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0]
        );
    }

    #[test]
    fn flat_series_gets_padding() {
        let (lo, hi) = bounds([2.0, 2.0].into_iter());
        assert!(lo < 2.0 && hi > 2.0);
        assert_eq!(bounds(std::iter::empty()), (-1.0, 1.0));
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let chart = Chart {
            title: "a < b".into(),
            y_label: "y".into(),
            t: (0..5000).map(|i| i as f64 * 1e-3).collect(),
            series: vec![
                Series::new("one", vec![1.0; 5000]),
                Series::new("two", (0..5000).map(|i| i as f64).collect()).dashed(),
            ],
        };
        let svg = chart.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a &lt; b"));
        let longest = svg
            .lines()
            .filter(|l| l.starts_with("<polyline"))
            .map(|l| l.matches(',').count())
            .max()
            .unwrap();
        assert!(longest <= MAX_POINTS);
    }
}

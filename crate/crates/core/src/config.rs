//! INI-style scenario files.
//!
//! ```text
//! # comments start with '#'
//! [scenario]
//! preset = fig4-step        # optional starting point
//! duration = 30
//! step_size = 0.0005
//! controller = los-track    # open-loop | stabilize | rate-track | los-track | pid
//! control_update = zoh      # zoh | per-stage
//!
//! [gains]
//! c1 = 6
//! c2 = 8
//! c3 = 9
//! c4 = 10
//!
//! [reference_q]
//! kind = step               # zero | step | sinusoid
//! level = 0.5236
//! t_on = 5
//! t_off = 25
//! ```
//!
//! Sections: `scenario`, `initial` (`x1`..`x4`, `theta_q`, `theta_r`),
//! `inertia` (`ja_xx`, `ja_yy`, `ja_zz`, `ja_xy`, `ja_xz`, `ja_yz` and the
//! same with `jk_`), `platform` (`kind = sinusoidal` with `amplitude`,
//! `omega`; `kind = constant` with `rates`; `kind = table` with
//! `samples = t p q r; t p q r; ...`), `gains`, `pid` (`kp_q`, `ki_q`,
//! `kd_q`, `kp_r`, `ki_r`, `kd_r`), `reference_q`, `reference_r`, `noise`
//! (`enabled`, `sigma_y`, `sigma_z`, `seed`) and `guard` (`threshold`).
//! Anything not given keeps the value of the preset, or of the nominal
//! open-loop scenario when no preset is named.
//!
//! [`render_scenario`] writes every field, and its output parses back to the
//! same scenario.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::control::{GuardSpec, PidGains, PidParams, RateGains, TrackingGains};
use crate::error::{Error, Result};
use crate::plant::InertiaModel;
use crate::sim::{
    base, preset, ControlUpdate, Controller, PlatformProfile, RateTable, Reference, Scenario,
};

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

type Section = BTreeMap<String, Entry>;

fn parse_sections(text: &str) -> Result<BTreeMap<String, (usize, Section)>> {
    let mut sections: BTreeMap<String, (usize, Section)> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or_default().trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| Error::Config {
                line,
                msg: "unterminated section header".into(),
            })?;
            let name = name.trim().to_string();
            if sections.contains_key(&name) {
                return Err(Error::Config {
                    line,
                    msg: format!("duplicate section [{name}]"),
                });
            }
            sections.insert(name.clone(), (line, Section::new()));
            current = Some(name);
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            msg: format!("expected `key = value`, found `{content}`"),
        })?;
        let section = current.as_ref().ok_or_else(|| Error::Config {
            line,
            msg: "key outside of any section".into(),
        })?;
        let entries = &mut sections.get_mut(section).expect("section exists").1;
        let key = key.trim().to_string();
        if entries.contains_key(&key) {
            return Err(Error::Config {
                line,
                msg: format!("duplicate key `{key}`"),
            });
        }
        entries.insert(
            key,
            Entry {
                value: value.trim().to_string(),
                line,
            },
        );
    }
    Ok(sections)
}

/// Typed access to one section; every key read is marked as used so that
/// leftovers can be reported.
struct Reader<'a> {
    name: &'a str,
    header_line: usize,
    entries: Section,
}

impl<'a> Reader<'a> {
    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Config {
            line,
            msg: msg.into(),
        }
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn str(&mut self, key: &str) -> Option<(String, usize)> {
        self.take(key).map(|e| (e.value, e.line))
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<f64>().map(Some).map_err(|_| {
                self.err(
                    e.line,
                    format!("[{}] {key}: `{}` is not a number", self.name, e.value),
                )
            }),
        }
    }

    fn u64(&mut self, key: &str) -> Result<Option<u64>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<u64>().map(Some).map_err(|_| {
                self.err(
                    e.line,
                    format!("[{}] {key}: `{}` is not an integer", self.name, e.value),
                )
            }),
        }
    }

    fn bool(&mut self, key: &str) -> Result<Option<bool>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => match e.value.as_str() {
                "true" | "yes" | "1" => Ok(Some(true)),
                "false" | "no" | "0" => Ok(Some(false)),
                other => Err(self.err(
                    e.line,
                    format!("[{}] {key}: `{other}` is not a boolean", self.name),
                )),
            },
        }
    }

    fn triple(&mut self, key: &str) -> Result<Option<[f64; 3]>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => {
                let nums = parse_numbers(&e.value)
                    .filter(|v| v.len() == 3)
                    .ok_or_else(|| {
                        self.err(
                            e.line,
                            format!("[{}] {key}: expected three numbers", self.name),
                        )
                    })?;
                Ok(Some([nums[0], nums[1], nums[2]]))
            }
        }
    }

    fn finish(self) -> Result<()> {
        if let Some((key, e)) = self.entries.into_iter().next() {
            return Err(Error::Config {
                line: e.line,
                msg: format!("unknown key `{key}` in [{}]", self.name),
            });
        }
        Ok(())
    }
}

fn parse_numbers(s: &str) -> Option<Vec<f64>> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().ok())
        .collect()
}

fn parse_controller_kind(s: &str) -> Option<&'static str> {
    ["open-loop", "stabilize", "rate-track", "los-track", "pid"]
        .into_iter()
        .find(|k| *k == s)
}

/// Parses a scenario file.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut sections = parse_sections(text)?;
    let known = [
        "scenario",
        "initial",
        "inertia",
        "platform",
        "gains",
        "pid",
        "reference_q",
        "reference_r",
        "noise",
        "guard",
    ];
    if let Some((name, (line, _))) = sections.iter().find(|(n, _)| !known.contains(&n.as_str())) {
        return Err(Error::Config {
            line: *line,
            msg: format!("unknown section [{name}]"),
        });
    }
    let mut reader = |name: &'static str| {
        let (header_line, entries) = sections.remove(name).unwrap_or_default();
        Reader {
            name,
            header_line,
            entries,
        }
    };

    let mut sec = reader("scenario");
    let mut s = match sec.str("preset") {
        Some((name, line)) => preset(&name).map_err(|e| sec.err(line, e.to_string()))?,
        None => base("custom", Controller::OpenLoop),
    };
    if let Some((name, _)) = sec.str("name") {
        s.name = name;
    }
    if let Some(v) = sec.f64("duration")? {
        s.duration = v;
    }
    if let Some(v) = sec.f64("step_size")? {
        s.step_size = v;
    }
    if let Some(v) = sec.bool("waive_symmetry")? {
        s.waive_symmetry = v;
    }
    if let Some((v, line)) = sec.str("control_update") {
        s.control_update = match v.as_str() {
            "zoh" => ControlUpdate::ZeroOrderHold,
            "per-stage" => ControlUpdate::PerStage,
            other => return Err(sec.err(line, format!("unknown control_update `{other}`"))),
        };
    }
    let kind = match sec.str("controller") {
        Some((v, line)) => parse_controller_kind(&v)
            .ok_or_else(|| sec.err(line, format!("unknown controller `{v}`")))?,
        None => s.controller.kind(),
    };
    let kind_line = sec.header_line;
    sec.finish()?;

    let mut sec = reader("initial");
    let mut x = s.initial.to_array();
    for (i, key) in ["x1", "x2", "x3", "x4", "theta_q", "theta_r"]
        .iter()
        .enumerate()
    {
        if let Some(v) = sec.f64(key)? {
            x[i] = v;
        }
    }
    s.initial = crate::plant::GimbalState::from_array(x);
    sec.finish()?;

    let mut sec = reader("inertia");
    let mut ja = *s.inertia.j_a();
    let mut jk = *s.inertia.j_k();
    let idx = [
        ("xx", 0, 0),
        ("yy", 1, 1),
        ("zz", 2, 2),
        ("xy", 0, 1),
        ("xz", 0, 2),
        ("yz", 1, 2),
    ];
    let mut touched = false;
    for (prefix, m) in [("ja_", &mut ja), ("jk_", &mut jk)] {
        for (suffix, i, j) in idx {
            if let Some(v) = sec.f64(&format!("{prefix}{suffix}"))? {
                m.0[i][j] = v;
                m.0[j][i] = v;
                touched = true;
            }
        }
    }
    if touched {
        let line = sec.header_line;
        s.inertia = InertiaModel::new(ja, jk).map_err(|e| sec.err(line, e.to_string()))?;
    }
    sec.finish()?;

    let mut sec = reader("platform");
    if let Some((kind, line)) = sec.str("kind") {
        s.platform = match kind.as_str() {
            "sinusoidal" => PlatformProfile::Sinusoidal {
                amplitude: sec
                    .triple("amplitude")?
                    .ok_or_else(|| sec.err(line, "sinusoidal platform needs `amplitude`"))?,
                omega: sec
                    .triple("omega")?
                    .ok_or_else(|| sec.err(line, "sinusoidal platform needs `omega`"))?,
            },
            "constant" => PlatformProfile::Constant {
                rates: sec
                    .triple("rates")?
                    .ok_or_else(|| sec.err(line, "constant platform needs `rates`"))?,
            },
            "table" => {
                let (value, vline) = sec
                    .str("samples")
                    .ok_or_else(|| sec.err(line, "table platform needs `samples`"))?;
                let mut samples = Vec::new();
                for row in value.split(';').map(str::trim).filter(|r| !r.is_empty()) {
                    let nums = parse_numbers(row).filter(|v| v.len() == 4).ok_or_else(|| {
                        sec.err(vline, format!("table row `{row}` must be `t p q r`"))
                    })?;
                    samples.push((nums[0], [nums[1], nums[2], nums[3]]));
                }
                PlatformProfile::Table(
                    RateTable::new(samples).map_err(|e| sec.err(vline, e.to_string()))?,
                )
            }
            other => return Err(sec.err(line, format!("unknown platform kind `{other}`"))),
        };
    }
    sec.finish()?;

    let mut sec = reader("gains");
    let mut gains: [Option<f64>; 4] = match s.controller {
        Controller::Stabilize(g) | Controller::RateTrack(g) => {
            [Some(g.c1()), Some(g.c2()), None, None]
        }
        Controller::LosTrack(g) => [Some(g.c1()), Some(g.c2()), Some(g.c3()), Some(g.c4())],
        _ => [None; 4],
    };
    for (i, key) in ["c1", "c2", "c3", "c4"].iter().enumerate() {
        if let Some(v) = sec.f64(key)? {
            gains[i] = Some(v);
        }
    }
    let gains_line = sec.header_line.max(kind_line);
    sec.finish()?;

    let mut sec = reader("pid");
    let mut pid = match s.controller {
        Controller::Pid(p) => p,
        _ => PidParams::default(),
    };
    for (suffix, g) in [("q", &mut pid.elevation), ("r", &mut pid.azimuth)] {
        if let Some(v) = sec.f64(&format!("kp_{suffix}"))? {
            g.kp = v;
        }
        if let Some(v) = sec.f64(&format!("ki_{suffix}"))? {
            g.ki = v;
        }
        if let Some(v) = sec.f64(&format!("kd_{suffix}"))? {
            g.kd = v;
        }
    }
    sec.finish()?;

    let need = |i: usize| -> Result<f64> {
        gains[i].ok_or_else(|| Error::Config {
            line: gains_line,
            msg: format!("controller `{kind}` needs gain c{}", i + 1),
        })
    };
    let wrap = |r: Result<Controller>| {
        r.map_err(|e| Error::Config {
            line: gains_line,
            msg: e.to_string(),
        })
    };
    s.controller = match kind {
        "open-loop" => Controller::OpenLoop,
        "stabilize" => wrap(RateGains::new(need(0)?, need(1)?).map(Controller::Stabilize))?,
        "rate-track" => wrap(RateGains::new(need(0)?, need(1)?).map(Controller::RateTrack))?,
        "los-track" => wrap(
            TrackingGains::new(need(0)?, need(1)?, need(2)?, need(3)?).map(Controller::LosTrack),
        )?,
        _ => Controller::Pid(pid),
    };

    for (name, slot) in [
        ("reference_q", &mut s.reference_q),
        ("reference_r", &mut s.reference_r),
    ] {
        let mut sec = reader(name);
        if let Some((kind, line)) = sec.str("kind") {
            let num = |sec: &mut Reader, key: &str| -> Result<f64> {
                sec.f64(key)?.ok_or_else(|| {
                    sec.err(line, format!("[{name}] {kind} reference needs `{key}`"))
                })
            };
            *slot = match kind.as_str() {
                "zero" => Reference::Zero,
                "step" => {
                    let level = num(&mut sec, "level")?;
                    let t_on = num(&mut sec, "t_on")?;
                    let t_off = num(&mut sec, "t_off")?;
                    Reference::step(level, t_on, t_off).map_err(|e| sec.err(line, e.to_string()))?
                }
                "sinusoid" => {
                    let amplitude = num(&mut sec, "amplitude")?;
                    let omega = num(&mut sec, "omega")?;
                    Reference::sinusoid(amplitude, omega)
                        .map_err(|e| sec.err(line, e.to_string()))?
                }
                other => return Err(sec.err(line, format!("unknown reference kind `{other}`"))),
            };
        }
        sec.finish()?;
    }

    let mut sec = reader("noise");
    if let Some(v) = sec.bool("enabled")? {
        s.noise.enabled = v;
    }
    if let Some(v) = sec.f64("sigma_y")? {
        s.noise.sigma_y = v;
    }
    if let Some(v) = sec.f64("sigma_z")? {
        s.noise.sigma_z = v;
    }
    if let Some(v) = sec.u64("seed")? {
        s.noise.seed = v;
    }
    sec.finish()?;

    let mut sec = reader("guard");
    if let Some(v) = sec.f64("threshold")? {
        let line = sec.header_line;
        s.guard = GuardSpec::new(v).map_err(|e| sec.err(line, e.to_string()))?;
    }
    sec.finish()?;

    s.validate()?;
    Ok(s)
}

/// Writes every field of a scenario in the format read by [`parse_scenario`].
pub fn render_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    let w = &mut out;
    let triple = |v: &[f64; 3]| format!("{} {} {}", v[0], v[1], v[2]);

    let _ = writeln!(w, "[scenario]");
    let _ = writeln!(w, "name = {}", s.name);
    let _ = writeln!(w, "duration = {}", s.duration);
    let _ = writeln!(w, "step_size = {}", s.step_size);
    let _ = writeln!(w, "controller = {}", s.controller.kind());
    let update = match s.control_update {
        ControlUpdate::ZeroOrderHold => "zoh",
        ControlUpdate::PerStage => "per-stage",
    };
    let _ = writeln!(w, "control_update = {update}");
    let _ = writeln!(w, "waive_symmetry = {}", s.waive_symmetry);

    let _ = writeln!(w, "\n[initial]");
    for (k, v) in ["x1", "x2", "x3", "x4", "theta_q", "theta_r"]
        .iter()
        .zip(s.initial.to_array())
    {
        let _ = writeln!(w, "{k} = {v}");
    }

    let _ = writeln!(w, "\n[inertia]");
    let idx = [
        ("xx", 0, 0),
        ("yy", 1, 1),
        ("zz", 2, 2),
        ("xy", 0, 1),
        ("xz", 0, 2),
        ("yz", 1, 2),
    ];
    for (prefix, m) in [("ja_", s.inertia.j_a()), ("jk_", s.inertia.j_k())] {
        for (suffix, i, j) in idx {
            let _ = writeln!(w, "{prefix}{suffix} = {}", m.0[i][j]);
        }
    }

    let _ = writeln!(w, "\n[platform]");
    match &s.platform {
        PlatformProfile::Sinusoidal { amplitude, omega } => {
            let _ = writeln!(w, "kind = sinusoidal");
            let _ = writeln!(w, "amplitude = {}", triple(amplitude));
            let _ = writeln!(w, "omega = {}", triple(omega));
        }
        PlatformProfile::Constant { rates } => {
            let _ = writeln!(w, "kind = constant");
            let _ = writeln!(w, "rates = {}", triple(rates));
        }
        PlatformProfile::Table(table) => {
            let rows: Vec<String> = table
                .samples()
                .iter()
                .map(|(t, r)| format!("{t} {}", triple(r)))
                .collect();
            let _ = writeln!(w, "kind = table");
            let _ = writeln!(w, "samples = {}", rows.join("; "));
        }
    }

    match &s.controller {
        Controller::Stabilize(g) | Controller::RateTrack(g) => {
            let _ = writeln!(w, "\n[gains]\nc1 = {}\nc2 = {}", g.c1(), g.c2());
        }
        Controller::LosTrack(g) => {
            let _ = writeln!(
                w,
                "\n[gains]\nc1 = {}\nc2 = {}\nc3 = {}\nc4 = {}",
                g.c1(),
                g.c2(),
                g.c3(),
                g.c4()
            );
        }
        Controller::Pid(p) => {
            let _ = writeln!(w, "\n[pid]");
            for (suffix, g) in [("q", p.elevation), ("r", p.azimuth)] {
                let PidGains { kp, ki, kd } = g;
                let _ = writeln!(
                    w,
                    "kp_{suffix} = {kp}\nki_{suffix} = {ki}\nkd_{suffix} = {kd}"
                );
            }
        }
        Controller::OpenLoop => {}
    }

    for (name, r) in [
        ("reference_q", &s.reference_q),
        ("reference_r", &s.reference_r),
    ] {
        let _ = writeln!(w, "\n[{name}]");
        match *r {
            Reference::Zero => {
                let _ = writeln!(w, "kind = zero");
            }
            Reference::Step { level, t_on, t_off } => {
                let _ = writeln!(
                    w,
                    "kind = step\nlevel = {level}\nt_on = {t_on}\nt_off = {t_off}"
                );
            }
            Reference::Sinusoid { amplitude, omega } => {
                let _ = writeln!(
                    w,
                    "kind = sinusoid\namplitude = {amplitude}\nomega = {omega}"
                );
            }
        }
    }

    let n = &s.noise;
    let _ = writeln!(
        w,
        "\n[noise]\nenabled = {}\nsigma_y = {}\nsigma_z = {}\nseed = {}",
        n.enabled, n.sigma_y, n.sigma_z, n.seed
    );
    let _ = writeln!(w, "\n[guard]\nthreshold = {}", s.guard.threshold());
    out
}

//! `trace.csv` reader and writer.
//!
//! One header row followed by one row per simulation step, columns in the
//! fixed order of [`COLUMNS`]. Floats are written in scientific notation with
//! 17 significant digits, so parsing a trace reproduces the record exactly.
//! `guard_active` is written as `0` or `1`.

use std::io::{BufRead, Write};

use crate::control::VirtualControl;
use crate::error::{Error, Result};
use crate::plant::{GimbalState, TorqueCommand, TorqueNoise};
use crate::sim::{SimRecord, SimRow};

pub const COLUMNS: [&str; 16] = [
    "t",
    "x1",
    "x2",
    "x3",
    "x4",
    "theta_q",
    "theta_r",
    "q_a",
    "r_a",
    "v1",
    "v2",
    "u1",
    "u2",
    "guard_active",
    "noise_y",
    "noise_z",
];

/// Canonical 17-significant-digit rendering.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace<W: Write>(record: &SimRecord, mut out: W) -> Result<()> {
    writeln!(out, "{}", COLUMNS.join(","))?;
    for row in &record.rows {
        let s = &row.state;
        let floats = [
            row.t, s.x1, s.x2, s.x3, s.x4, s.theta_q, s.theta_r, row.q_a, row.r_a, row.v.v1,
            row.v.v2, row.u.u1, row.u.u2,
        ];
        let mut fields: Vec<String> = floats.iter().map(|v| format_value(*v)).collect();
        fields.push(if row.guard_active { "1" } else { "0" }.to_string());
        fields.push(format_value(row.noise.y));
        fields.push(format_value(row.noise.z));
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trace<R: BufRead>(input: R) -> Result<SimRecord> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.ok_or_else(|| Error::Trace {
        line: 1,
        msg: "empty trace".into(),
    })?;
    if header.trim_end() != COLUMNS.join(",") {
        return Err(Error::Trace {
            line: 1,
            msg: format!("unexpected header `{header}`"),
        });
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        let err = |msg: String| Error::Trace { line: lineno, msg };
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != COLUMNS.len() {
            return Err(err(format!(
                "expected {} fields, found {}",
                COLUMNS.len(),
                fields.len()
            )));
        }
        let mut v = [0.0; 16];
        for (k, f) in fields.iter().enumerate() {
            if k == 13 {
                continue;
            }
            v[k] = f
                .parse()
                .map_err(|_| err(format!("column {}: cannot parse `{f}`", COLUMNS[k])))?;
        }
        let guard_active = match fields[13] {
            "0" => false,
            "1" => true,
            other => return Err(err(format!("guard_active must be 0 or 1, got `{other}`"))),
        };
        rows.push(SimRow {
            t: v[0],
            state: GimbalState::from_array([v[1], v[2], v[3], v[4], v[5], v[6]]),
            q_a: v[7],
            r_a: v[8],
            v: VirtualControl {
                v1: v[9],
                v2: v[10],
            },
            u: TorqueCommand {
                u1: v[11],
                u2: v[12],
            },
            guard_active,
            noise: TorqueNoise { y: v[14], z: v[15] },
        });
    }
    Ok(SimRecord { rows })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn arb_row() -> impl Strategy<Value = SimRow> {
        (
            prop::array::uniform16(
                prop::num::f64::NORMAL | prop::num::f64::ZERO | prop::num::f64::SUBNORMAL,
            ),
            any::<bool>(),
        )
            .prop_map(|(v, g)| SimRow {
                t: v[0],
                state: GimbalState::from_array([v[1], v[2], v[3], v[4], v[5], v[6]]),
                q_a: v[7],
                r_a: v[8],
                v: VirtualControl {
                    v1: v[9],
                    v2: v[10],
                },
                u: TorqueCommand {
                    u1: v[11],
                    u2: v[12],
                },
                guard_active: g,
                noise: TorqueNoise { y: v[14], z: v[15] },
            })
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(rows in prop::collection::vec(arb_row(), 0..20)) {
            let record = SimRecord { rows };
            let mut buf = Vec::new();
            write_trace(&record, &mut buf).unwrap();
            let back = read_trace(buf.as_slice()).unwrap();
            prop_assert_eq!(back, record);
        }
    }

    #[test]
    fn header_and_format() {
        let record = SimRecord {
            rows: vec![SimRow {
                t: 0.5,
                ..Default::default()
            }],
        };
        let mut buf = Vec::new();
        write_trace(&record, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,x1,x2,x3,x4,theta_q,theta_r,q_a,r_a,v1,v2,u1,u2,guard_active,noise_y,noise_z"
        );
        assert!(lines
            .next()
            .unwrap()
            .starts_with("5.0000000000000000e-1,0.0000000000000000e0,"));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_trace("".as_bytes()).is_err());
        assert!(read_trace("a,b\n".as_bytes()).is_err());
        let bad = format!("{}\n1,2,3\n", COLUMNS.join(","));
        assert!(matches!(
            read_trace(bad.as_bytes()),
            Err(Error::Trace { line: 2, .. })
        ));
    }
}

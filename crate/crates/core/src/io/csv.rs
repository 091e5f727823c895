//! Fixed-schema CSV for time series and snapshots.
//!
//! Numbers are written with `{:.16e}` (17 significant digits, `.` decimal
//! point, no grouping), so files are byte-reproducible and round-trip exactly.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fbm::{Record, Snapshot};

pub const TIMESERIES_HEADER: &str = "t,g,h,gdot,hdot,umax,vmax,u_at_0,v_at_0,mass_u,mass_v";
pub const SNAPSHOT_HEADER: &str = "x,u,v";

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v:.16e}");
    }
    out.push('\n');
}

pub fn timeseries_csv(records: &[Record]) -> String {
    let mut out = String::with_capacity(64 + records.len() * 260);
    out.push_str(TIMESERIES_HEADER);
    out.push('\n');
    for r in records {
        push_row(
            &mut out,
            &[
                r.t, r.g, r.h, r.gdot, r.hdot, r.umax, r.vmax, r.u_at_0, r.v_at_0, r.mass_u, r.mass_v,
            ],
        );
    }
    out
}

pub fn snapshot_csv(s: &Snapshot) -> String {
    let mut out = String::with_capacity(16 + s.x.len() * 72);
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    for ((&x, &u), &v) in s.x.iter().zip(&s.u).zip(&s.v) {
        push_row(&mut out, &[x, u, v]);
    }
    out
}

fn parse_rows(text: &str, header: &str, what: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == header => {}
        Some(h) => {
            return Err(Error::Data(format!(
                "{what}: unexpected header `{h}`, expected `{header}`"
            )))
        }
        None => return Err(Error::Data(format!("{what}: empty file"))),
    }
    let width = header.split(',').count();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| Error::Data(format!("{what}: line {}: {e}", i + 2)))?;
        if row.len() != width {
            return Err(Error::Data(format!(
                "{what}: line {}: {} columns, expected {width}",
                i + 2,
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn parse_timeseries(text: &str) -> Result<Vec<Record>> {
    Ok(parse_rows(text, TIMESERIES_HEADER, "time series")?
        .into_iter()
        .map(|r| Record {
            t: r[0],
            g: r[1],
            h: r[2],
            gdot: r[3],
            hdot: r[4],
            umax: r[5],
            vmax: r[6],
            u_at_0: r[7],
            v_at_0: r[8],
            mass_u: r[9],
            mass_v: r[10],
        })
        .collect())
}

/// Parses a snapshot; the time is not stored in the file and is set to `t`.
pub fn parse_snapshot(text: &str, t: f64) -> Result<Snapshot> {
    let rows = parse_rows(text, SNAPSHOT_HEADER, "snapshot")?;
    Ok(Snapshot {
        t,
        x: rows.iter().map(|r| r[0]).collect(),
        u: rows.iter().map(|r| r[1]).collect(),
        v: rows.iter().map(|r| r[2]).collect(),
    })
}

/// Quotes a free-text CSV field when needed.
pub fn text_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\"").replace(['\n', '\r'], " "))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(t: f64) -> Record {
        Record {
            t,
            g: 1.0 + t,
            h: 0.5 + 0.1 * t,
            gdot: 1.0,
            hdot: 0.1,
            umax: 1.0 / 3.0,
            vmax: 2.0,
            u_at_0: 1e-300,
            v_at_0: 0.0,
            mass_u: 12345.678,
            mass_v: -0.0,
        }
    }

    #[test]
    fn header_and_width() {
        let text = timeseries_csv(&[record(0.0), record(0.5)]);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), TIMESERIES_HEADER);
        for line in lines {
            assert_eq!(line.split(',').count(), 11);
            assert!(!line.contains(' '));
        }
    }

    #[test]
    fn rejects_wrong_header_and_width() {
        assert!(parse_timeseries("t,g\n1,2\n").is_err());
        let bad = format!("{TIMESERIES_HEADER}\n1,2,3\n");
        assert!(matches!(parse_timeseries(&bad), Err(Error::Data(_))));
    }

    #[test]
    fn text_field_quoting() {
        assert_eq!(text_field("plain"), "plain");
        assert_eq!(text_field("a, \"b\""), "\"a, \"\"b\"\"\"");
    }

    proptest! {
        #[test]
        fn timeseries_round_trips_exactly(vals in proptest::collection::vec(-1e12f64..1e12, 11)) {
            let r = Record {
                t: vals[0], g: vals[1], h: vals[2], gdot: vals[3], hdot: vals[4], umax: vals[5],
                vmax: vals[6], u_at_0: vals[7], v_at_0: vals[8], mass_u: vals[9], mass_v: vals[10],
            };
            let back = parse_timeseries(&timeseries_csv(&[r])).unwrap();
            prop_assert_eq!(back, vec![r]);
        }
    }
}

//! Minimal deterministic SVG charts: front positions, profiles, phase maps.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fbm::{Record, Snapshot};
use crate::semiwave::SpeedTable;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

struct Series<'a> {
    name: &'a str,
    color: &'a str,
    dashed: bool,
    points: Vec<(f64, f64)>,
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        num(LEFT + (WIDTH - LEFT - RIGHT) / 2.0),
        escape(title)
    );
}

fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> Result<String> {
    let all = || series.iter().flat_map(|s| s.points.iter());
    if series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::Data("nothing to plot".into()));
    }
    if all().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Data("non-finite values in plot input".into()));
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all() {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut out = String::new();
    header(&mut out, title);
    let _ = writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        num(LEFT),
        num(TOP),
        num(pw),
        num(ph)
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            num(sx(xv)),
            num(TOP + ph + 16.0),
            tick_label(xv)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            num(LEFT - 6.0),
            num(sy(yv) + 4.0),
            tick_label(yv)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        num(LEFT + pw / 2.0),
        num(HEIGHT - 12.0),
        escape(x_label)
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
        num(TOP + ph / 2.0),
        num(TOP + ph / 2.0),
        escape(y_label)
    );
    for (k, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let mut path = String::new();
        for (i, &(x, y)) in s.points.iter().enumerate() {
            let _ = write!(path, "{}{},{}", if i == 0 { "M" } else { " L" }, num(sx(x)), num(sy(y)));
        }
        let dash = if s.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
        let _ = writeln!(
            out,
            "<path d=\"{path}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{dash}/>",
            s.color
        );
        let ly = TOP + 14.0 + 18.0 * k as f64;
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1.5\"{dash}/>",
            num(WIDTH - RIGHT + 10.0),
            num(ly),
            num(WIDTH - RIGHT + 34.0),
            num(ly),
            s.color
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            num(WIDTH - RIGHT + 40.0),
            num(ly + 4.0),
            escape(s.name)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// `g(t)` and `h(t)`, with optional reference lines `g0 + kbar_beta t` and
/// `h0 + kund_mu t`.
pub fn fronts_svg(records: &[Record], reference: Option<&SpeedTable>) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Data("empty time series".into()));
    }
    let mut series = vec![
        Series {
            name: "g (prey)",
            color: "#1f77b4",
            dashed: false,
            points: records.iter().map(|r| (r.t, r.g)).collect(),
        },
        Series {
            name: "h (predator)",
            color: "#d62728",
            dashed: false,
            points: records.iter().map(|r| (r.t, r.h)).collect(),
        },
    ];
    if let Some(table) = reference {
        let first = &records[0];
        let last = records[records.len() - 1].t;
        series.push(Series {
            name: "kbar_beta slope",
            color: "#1f77b4",
            dashed: true,
            points: vec![(first.t, first.g), (last, first.g + table.kbar_beta * (last - first.t))],
        });
        series.push(Series {
            name: "kund_mu slope",
            color: "#d62728",
            dashed: true,
            points: vec![(first.t, first.h), (last, first.h + table.kund_mu * (last - first.t))],
        });
    }
    line_chart("Front positions", "t", "front", &series)
}

pub fn profile_svg(snapshot: &Snapshot) -> Result<String> {
    if snapshot.x.is_empty() {
        return Err(Error::Data("empty snapshot".into()));
    }
    let series = [
        Series {
            name: "u (prey)",
            color: "#1f77b4",
            dashed: false,
            points: snapshot.x.iter().copied().zip(snapshot.u.iter().copied()).collect(),
        },
        Series {
            name: "v (predator)",
            color: "#d62728",
            dashed: false,
            points: snapshot.x.iter().copied().zip(snapshot.v.iter().copied()).collect(),
        },
    ];
    line_chart(
        &format!("Profiles at t = {}", tick_label(snapshot.t)),
        "x",
        "density",
        &series,
    )
}

/// Color for a `prey/predator` outcome label.
fn phase_color(label: &str) -> &'static str {
    match label {
        "spreading/spreading" => "#2ca02c",
        "spreading/vanishing" => "#1f77b4",
        "vanishing/spreading" => "#d62728",
        "vanishing/vanishing" => "#7f7f7f",
        "failed" => "#000000",
        _ => "#ffbf00",
    }
}

/// Heat map of outcome labels; `labels[iy][ix]` is the cell at
/// `(x_values[ix], y_values[iy])`.
pub fn phase_svg(
    x_name: &str,
    x_values: &[f64],
    y_name: &str,
    y_values: &[f64],
    labels: &[Vec<String>],
) -> Result<String> {
    if x_values.is_empty() || y_values.is_empty() {
        return Err(Error::Data("phase map needs two non-empty axes".into()));
    }
    if labels.len() != y_values.len() || labels.iter().any(|row| row.len() != x_values.len()) {
        return Err(Error::Data("label grid does not match the axes".into()));
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let cw = pw / x_values.len() as f64;
    let ch = ph / y_values.len() as f64;
    let mut out = String::new();
    header(&mut out, &format!("Outcomes over {x_name} x {y_name}"));
    for (iy, row) in labels.iter().enumerate() {
        for (ix, label) in row.iter().enumerate() {
            let x = LEFT + ix as f64 * cw;
            let y = TOP + ph - (iy + 1) as f64 * ch;
            let _ = writeln!(
                out,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"white\"><title>{}={}, {}={}: {}</title></rect>",
                num(x),
                num(y),
                num(cw),
                num(ch),
                phase_color(label),
                escape(x_name),
                tick_label(x_values[ix]),
                escape(y_name),
                tick_label(y_values[iy]),
                escape(label)
            );
        }
    }
    for (ix, v) in x_values.iter().enumerate() {
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            num(LEFT + (ix as f64 + 0.5) * cw),
            num(TOP + ph + 16.0),
            tick_label(*v)
        );
    }
    for (iy, v) in y_values.iter().enumerate() {
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            num(LEFT - 6.0),
            num(TOP + ph - (iy as f64 + 0.5) * ch + 4.0),
            tick_label(*v)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        num(LEFT + pw / 2.0),
        num(HEIGHT - 12.0),
        escape(x_name)
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
        num(TOP + ph / 2.0),
        num(TOP + ph / 2.0),
        escape(y_name)
    );
    let legend = [
        "spreading/spreading",
        "spreading/vanishing",
        "vanishing/spreading",
        "vanishing/vanishing",
        "undecided",
        "failed",
    ];
    for (k, label) in legend.iter().enumerate() {
        let ly = TOP + 8.0 + 18.0 * k as f64;
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>",
            num(WIDTH - RIGHT + 10.0),
            num(ly),
            phase_color(label)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>",
            num(WIDTH - RIGHT + 26.0),
            num(ly + 10.0),
            label
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

//! CSV and SVG writers. Output depends only on the results passed in.

use std::fmt::Write as _;
use std::io;

use iab::simulator::Summary;
use iab::{EpisodeResult, RegretKind};

pub const CSV_HEADER: [&str; 8] = ["policy", "seed", "t", "itt", "st", "lct", "c", "complier_rounds"];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row per checkpoint of every episode, header first.
pub fn write_csv<W: io::Write>(policy: &str, results: &[EpisodeResult], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in results {
        for c in &r.checkpoints {
            w.write_record([
                policy.to_string(),
                r.seed.to_string(),
                c.t.to_string(),
                fmt_float(c.itt),
                fmt_float(c.st),
                fmt_float(c.lct),
                fmt_float(c.c),
                c.complier_rounds.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One summary row per policy: regret statistics at the horizon.
pub struct SummaryRow {
    pub policy: String,
    pub family: String,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub n_seeds: usize,
    pub horizon: u64,
    pub finals: [(RegretKind, Summary); 4],
}

pub fn summary_header() -> Vec<String> {
    let mut h: Vec<String> = ["policy", "family", "alpha", "gamma", "n_seeds", "T"].map(String::from).to_vec();
    for kind in RegretKind::ALL {
        for stat in ["mean", "median", "se"] {
            h.push(format!("{}_{stat}", kind.name()));
        }
    }
    h
}

pub fn write_summary<W: io::Write>(rows: &[SummaryRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(summary_header())?;
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    for row in rows {
        let mut rec = vec![
            row.policy.clone(),
            row.family.clone(),
            opt(row.alpha),
            opt(row.gamma),
            row.n_seeds.to_string(),
            row.horizon.to_string(),
        ];
        for (_, s) in &row.finals {
            rec.extend([fmt_float(s.mean), fmt_float(s.median), fmt_float(s.se)]);
        }
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

/// A labelled curve of medians against `t`.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Line chart with linear axes and a legend, self-contained.
pub fn render_svg(title: &str, series: &[Series]) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x_max, mut y_min, mut y_max) = (1.0f64, 0.0f64, 0.0f64);
    for &(x, y) in all {
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if y_max - y_min < 1e-12 {
        y_max = y_min + 1.0;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + x / x_max * plot_w;
    let sy = |y: f64| TOP + (y_max - y) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, LEFT + plot_w / 2.0, escape(title));
    let (x0, x1, y0, y1) = (LEFT, LEFT + plot_w, TOP, TOP + plot_h);
    let _ = writeln!(svg, r#"<path d="M{x0} {y0} V{y1} H{x1}" fill="none" stroke="black"/>"#);
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (tx, ty) = (f * x_max, y_min + f * (y_max - y_min));
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, sx(tx), y1 + 18.0, tick(tx));
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, sy(ty) + 4.0, tick(ty));
    }
    if y_min < 0.0 {
        let _ = writeln!(svg, r##"<line x1="{x0}" y1="{0:.2}" x2="{x1}" y2="{0:.2}" stroke="#999" stroke-dasharray="4 3"/>"##, sy(0.0));
    }
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#, LEFT + plot_w / 2.0, HEIGHT - 10.0);
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = x1 + 15.0;
        let _ = writeln!(svg, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&s.label));
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{}", (v * 100.0).round() / 100.0)
    }
}

//! Output formats: sweep and mobility CSV, an SVG throughput plot and the
//! run manifest.

use std::fmt::Write as _;

use crate::config::ScenarioConfig;
use crate::engine::{MobilityRow, SweepResult};
use crate::schemes::SchemeKind;

pub const SWEEP_HEADER: &str = "scheme,position_m,mean_mbps,ci95_mbps,n_drops,per_ue_mean_mbps";
pub const MOBILITY_HEADER: &str = "mode,cell_length_m,speed_kmh,handover_period_s,total_per_ue_handovers,blocked_ues";

/// Shortest representation that parses back to the same `f64`.
fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x}")
    }
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SWEEP_HEADER}");
    for p in &result.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p.scheme,
            num(p.position_m),
            num(p.mean_mbps),
            num(p.ci95_mbps),
            p.n_drops,
            num(p.per_ue_mean_mbps)
        );
    }
    out
}

pub fn mobility_csv(rows: &[MobilityRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MOBILITY_HEADER}");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.mode,
            num(r.cell_length_m),
            num(r.speed_kmh),
            num(r.handover_period_s),
            r.total_per_ue_handovers,
            r.blocked_ues
        );
    }
    out
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Mean train throughput versus position, one line per scheme with 95 %
/// confidence bars.
pub fn svg_plot(result: &SweepResult) -> String {
    let (w, h) = (800.0, 500.0);
    let (left, right, top, bottom) = (70.0, 160.0, 30.0, 60.0);
    let pts = &result.points;
    let x_min = pts.iter().map(|p| p.position_m).fold(f64::INFINITY, f64::min);
    let x_max = pts.iter().map(|p| p.position_m).fold(f64::NEG_INFINITY, f64::max);
    let y_max = pts.iter().map(|p| p.mean_mbps + p.ci95_mbps).fold(0.0, f64::max);
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let y_top = if y_max > 0.0 { y_max * 1.1 } else { 1.0 };
    let sx = |x: f64| left + (x - x_min) / x_span * (w - left - right);
    let sy = |y: f64| h - bottom - y / y_top * (h - top - bottom);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (sx(x_min), sx(x_max.max(x_min)), sy(0.0), sy(y_top));
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/>"#,
        w - right
    );
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    for k in 0..=5 {
        let v = y_top * k as f64 / 5.0;
        let y = sy(v);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{v:.0}</text>"#,
            x0 - 6.0,
            y + 4.0
        );
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{y}" x2="{}" y2="{y}" stroke="#ddd"/>"##,
            w - right
        );
    }
    let mut xs: Vec<f64> = pts.iter().map(|p| p.position_m).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    for x in xs {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            sx(x),
            y0 + 18.0,
            num(x)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">train position (m)</text>"#,
        (x0 + x1) / 2.0,
        h - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">throughput (Mbit/s)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    let schemes = SchemeKind::ALL.iter().filter(|k| pts.iter().any(|p| p.scheme == **k));
    for (i, &kind) in schemes.enumerate() {
        let color = COLORS[kind.index() as usize % COLORS.len()];
        let mut series: Vec<_> = pts.iter().filter(|p| p.scheme == kind).collect();
        series.sort_by(|a, b| a.position_m.total_cmp(&b.position_m));
        let line: Vec<String> = series
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.position_m), sy(p.mean_mbps)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            line.join(" ")
        );
        for p in &series {
            let x = sx(p.position_m);
            let (lo, hi) = (sy((p.mean_mbps - p.ci95_mbps).max(0.0)), sy(p.mean_mbps + p.ci95_mbps));
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{lo:.2}" x2="{x:.2}" y2="{hi:.2}" stroke="{color}"/>"#
            );
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sy(p.mean_mbps)
            );
        }
        let ly = top + 20.0 * i as f64;
        let lx = w - right + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{kind}</text>"#, lx + 26.0, ly + 4.0);
    }
    s.push_str("</svg>\n");
    s
}

/// Metadata of one run, written as `#` comments followed by the full
/// configuration so that the file parses back as a config.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub tool_version: String,
    pub created_unix_s: u64,
    pub master_seed: u64,
    pub outputs: Vec<String>,
    pub config: ScenarioConfig,
}

impl RunManifest {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# hstsim run manifest");
        let _ = writeln!(out, "# tool_version: {}", self.tool_version);
        let _ = writeln!(out, "# created_unix_s: {}", self.created_unix_s);
        let _ = writeln!(out, "# master_seed: {}", self.master_seed);
        for o in &self.outputs {
            let _ = writeln!(out, "# output: {o}");
        }
        out.push_str(&self.config.to_text());
        out
    }
}

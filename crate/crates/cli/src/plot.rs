use std::fmt::Write as _;

use serde::Serialize;
use unitchart::charts::{Chart, MonitorResult};

#[derive(Debug, Clone, Serialize)]
pub struct PlotPoint {
    pub index: usize,
    pub value: f64,
    pub signal: bool,
}

/// Everything needed to draw one monitored chart.
#[derive(Debug, Clone, Serialize)]
pub struct ChartPlotData {
    pub title: String,
    pub points: Vec<PlotPoint>,
    pub lcl: f64,
    pub ucl: f64,
    pub cl: f64,
    /// 1-based index of the first signal.
    pub signal_index: Option<usize>,
}

impl ChartPlotData {
    /// Indices are numbered from `first_index`.
    pub fn new(title: impl Into<String>, chart: &Chart, result: &MonitorResult, first_index: usize) -> Self {
        let (lcl, ucl) = chart.limits();
        ChartPlotData {
            title: title.into(),
            points: result
                .statistic_path
                .iter()
                .enumerate()
                .map(|(i, &value)| PlotPoint { index: first_index + i, value, signal: chart.is_signal(value) })
                .collect(),
            lcl,
            ucl,
            cl: chart.center(),
            signal_index: result.signal_index,
        }
    }

    pub fn to_svg(&self) -> String {
        const W: f64 = 720.0;
        const H: f64 = 360.0;
        const LEFT: f64 = 64.0;
        const RIGHT: f64 = 24.0;
        const TOP: f64 = 36.0;
        const BOTTOM: f64 = 40.0;

        let values = self.points.iter().map(|p| p.value).chain([self.lcl, self.ucl]);
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let pad = 0.08 * (hi - lo).max(1e-9);
        let (lo, hi) = (lo - pad, hi + pad);
        let first = self.points.first().map_or(1, |p| p.index) as f64;
        let last = self.points.last().map_or(1, |p| p.index) as f64;
        let span = (last - first).max(1.0);
        let sx = |i: f64| LEFT + (i - first) / span * (W - LEFT - RIGHT);
        let sy = |v: f64| TOP + (hi - v) / (hi - lo) * (H - TOP - BOTTOM);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(&self.title));
        for (name, v, dash) in [("UCL", self.ucl, "6 4"), ("CL", self.cl, "2 3"), ("LCL", self.lcl, "6 4")] {
            let y = sy(v);
            let _ = writeln!(
                s,
                r#"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="gray" stroke-dasharray="{dash}"/>"#,
                W - RIGHT
            );
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{name} {v:.4}</text>"#, LEFT - 4.0, y + 4.0);
        }
        let path: Vec<String> = self.points.iter().map(|p| format!("{:.2},{:.2}", sx(p.index as f64), sy(p.value))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        for p in &self.points {
            let (fill, r) = if p.signal { ("crimson", 4.5) } else { ("steelblue", 3.0) };
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}"><title>{}: {:.4}</title></circle>"#,
                sx(p.index as f64),
                sy(p.value),
                p.index,
                p.value
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">observation {} to {}</text>"#,
            (LEFT + W - RIGHT) / 2.0,
            H - 12.0,
            first,
            last
        );
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

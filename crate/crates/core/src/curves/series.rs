use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Ordered curve points with axis labels.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSeries {
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
    /// Decision threshold the curve was computed at, if any.
    pub tau: Option<f64>,
    /// Number of samples (scores or mated comparisons) behind the curve.
    pub samples: usize,
}

impl CurveSeries {
    /// CSV with a two-line `# axis:` / `# tau:` preamble and an `x,y` header.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# axis: x={},y={}", self.x_label, self.y_label).unwrap();
        match self.tau {
            Some(t) => writeln!(s, "# tau: {t:?}").unwrap(),
            None => writeln!(s, "# tau: none").unwrap(),
        }
        s.push_str("x,y\n");
        for (x, y) in &self.points {
            writeln!(s, "{x:?},{y:?}").unwrap();
        }
        s
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    /// Polyline plot on the unit square with labeled axes.
    pub fn to_svg(&self) -> String {
        let (w, h, m) = (480.0, 360.0, 48.0);
        let px = |x: f64| m + x.clamp(0.0, 1.0) * (w - 2.0 * m);
        let py = |y: f64| h - m - y.clamp(0.0, 1.0) * (h - 2.0 * m);
        let mut s = String::new();
        writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
        writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
        writeln!(
            s,
            r#"<path d="M{x0} {y0} H{x1} M{x0} {y0} V{y1}" stroke="black" fill="none"/>"#,
            x0 = px(0.0),
            y0 = py(0.0),
            x1 = px(1.0),
            y1 = py(1.0)
        )
        .unwrap();
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            writeln!(s, r#"<text x="{}" y="{}" font-size="10" text-anchor="middle">{t}</text>"#, px(t), py(0.0) + 14.0).unwrap();
            writeln!(s, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{t}</text>"#, px(0.0) - 4.0, py(t) + 3.0).unwrap();
        }
        writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#, w / 2.0, h - 10.0, escape(&self.x_label)).unwrap();
        writeln!(
            s,
            r#"<text x="14" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
            h / 2.0,
            h / 2.0,
            escape(&self.y_label)
        )
        .unwrap();
        let pts: Vec<String> = self.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        writeln!(s, r#"<polyline points="{}" stroke="steelblue" stroke-width="2" fill="none"/>"#, pts.join(" ")).unwrap();
        s.push_str("</svg>\n");
        s
    }

    pub fn write_svg(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_svg()).map_err(|e| Error::io(path, e))
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

//! Minimal SVG line charts with error bars.

use std::fmt::Write as _;

pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub err: Vec<f64>,
}

pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Horizontal reference lines `(y, label)`.
    pub hlines: Vec<(f64, String)>,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f5fa8", "#c2402a", "#2b8a3e", "#7a4ba0"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + hi.abs()) {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

impl Chart {
    pub fn render(&self) -> String {
        let (x0, x1) = range(self.series.iter().flat_map(|s| s.x.iter().copied()));
        let (y0, y1) = range(
            self.series
                .iter()
                .flat_map(|s| s.y.iter().zip(&s.err).flat_map(|(y, e)| [y - e, y + e]))
                .chain(self.hlines.iter().map(|h| h.0)),
        );
        let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
        let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

        let mut s = String::new();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
        writeln!(
            s,
            r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        )
        .unwrap();
        // Axes and ticks.
        let (bx, by) = (H - BOTTOM, LEFT);
        writeln!(
            s,
            r#"<path d="M{by:.1} {TOP:.1} V{bx:.1} H{:.1}" fill="none" stroke="black"/>"#,
            W - RIGHT
        )
        .unwrap();
        for i in 0..=4 {
            let t = i as f64 / 4.0;
            let xv = x0 + t * (x1 - x0);
            let yv = y0 + t * (y1 - y0);
            writeln!(
                s,
                r#"<line x1="{0:.1}" y1="{bx:.1}" x2="{0:.1}" y2="{1:.1}" stroke="black"/><text x="{0:.1}" y="{2:.1}" text-anchor="middle">{3:.4}</text>"#,
                px(xv),
                bx + 5.0,
                bx + 20.0,
                xv
            )
            .unwrap();
            writeln!(
                s,
                r#"<line x1="{0:.1}" y1="{1:.1}" x2="{by:.1}" y2="{1:.1}" stroke="black"/><text x="{2:.1}" y="{3:.1}" text-anchor="end">{4:.4}</text>"#,
                by - 5.0,
                py(yv),
                by - 8.0,
                py(yv) + 4.0,
                yv
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            (LEFT + W - RIGHT) / 2.0,
            H - 15.0,
            escape(&self.x_label)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="18" y="{0:.1}" text-anchor="middle" transform="rotate(-90 18 {0:.1})">{1}</text>"#,
            (TOP + H - BOTTOM) / 2.0,
            escape(&self.y_label)
        )
        .unwrap();

        for (y, label) in &self.hlines {
            writeln!(
                s,
                r##"<line x1="{0:.1}" y1="{1:.1}" x2="{2:.1}" y2="{1:.1}" stroke="#555" stroke-dasharray="6 4"/><text x="{3:.1}" y="{4:.1}" text-anchor="end" fill="#555">{5}</text>"##,
                LEFT,
                py(*y),
                W - RIGHT,
                W - RIGHT - 4.0,
                py(*y) - 5.0,
                escape(label)
            )
            .unwrap();
        }

        for (i, ser) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<String> = ser
                .x
                .iter()
                .zip(&ser.y)
                .map(|(x, y)| format!("{:.1},{:.1}", px(*x), py(*y)))
                .collect();
            writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                pts.join(" ")
            )
            .unwrap();
            for ((x, y), e) in ser.x.iter().zip(&ser.y).zip(&ser.err) {
                let (cx, lo, hi) = (px(*x), py(y - e), py(y + e));
                writeln!(
                    s,
                    r#"<path d="M{cx:.1} {lo:.1} V{hi:.1} M{:.1} {lo:.1} H{:.1} M{:.1} {hi:.1} H{:.1}" stroke="{color}"/><circle cx="{cx:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                    cx - 4.0,
                    cx + 4.0,
                    cx - 4.0,
                    cx + 4.0,
                    py(*y)
                )
                .unwrap();
            }
            writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#,
                LEFT + 10.0,
                TOP + 14.0 * (i + 1) as f64,
                escape(&ser.label)
            )
            .unwrap();
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_series_and_reference_line() {
        let c = Chart {
            title: "a < b".into(),
            x_label: "theta".into(),
            y_label: "power".into(),
            series: vec![Series {
                label: "full".into(),
                x: vec![0.9, 0.95, 0.99],
                y: vec![1.0, 1.2, 1.4],
                err: vec![0.01, 0.02, 0.03],
            }],
            hlines: vec![(1.5, "limit".into())],
        };
        let svg = c.render();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg, c.render());
    }

    #[test]
    fn degenerate_ranges_do_not_divide_by_zero() {
        let c = Chart {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            series: vec![Series {
                label: "flat".into(),
                x: vec![0.5],
                y: vec![0.0],
                err: vec![0.0],
            }],
            hlines: Vec::new(),
        };
        assert!(!c.render().contains("NaN"));
    }
}

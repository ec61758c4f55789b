//! Result tables, their CSV encoding and SVG plots.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::Serialize;

/// One CSV field.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Seventeen significant digits, `.` as decimal separator.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem of the CSV.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(
            row.len(),
            self.header.len(),
            "row width of table {}",
            self.name
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    pub fn write_csv(&self, dir: &Path) -> io::Result<String> {
        let file = format!("{}.csv", self.name);
        std::fs::write(dir.join(&file), self.to_csv())?;
        Ok(file)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Plot {
    Lines {
        name: String,
        title: String,
        x_label: String,
        y_label: String,
        log_y: bool,
        series: Vec<Series>,
    },
    Heatmap {
        name: String,
        title: String,
        /// `values[ix * ny + iy]`.
        values: Vec<f64>,
        nx: usize,
        ny: usize,
        extent: [f64; 4],
    },
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const M: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

fn esc(s: &str) -> String {
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
    if hi - lo < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

impl Plot {
    pub fn name(&self) -> &str {
        match self {
            Plot::Lines { name, .. } | Plot::Heatmap { name, .. } => name,
        }
    }

    pub fn to_svg(&self) -> String {
        match self {
            Plot::Lines {
                title,
                x_label,
                y_label,
                log_y,
                series,
                ..
            } => lines_svg(title, x_label, y_label, *log_y, series),
            Plot::Heatmap {
                title,
                values,
                nx,
                ny,
                extent,
                ..
            } => heatmap_svg(title, values, *nx, *ny, *extent),
        }
    }

    pub fn write_svg(&self, dir: &Path) -> io::Result<String> {
        let file = format!("{}.svg", self.name());
        std::fs::write(dir.join(&file), self.to_svg())?;
        Ok(file)
    }
}

fn frame(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>
"#,
        W / 2.0,
        esc(title)
    );
}

fn lines_svg(title: &str, x_label: &str, y_label: &str, log_y: bool, series: &[Series]) -> String {
    let ty = |y: f64| if log_y { y.abs().log10() } else { y };
    let (x0, x1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| ty(p.1))));
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (ty(y) - y0) / (y1 - y0) * (H - 2.0 * M);
    let mut out = String::new();
    frame(&mut out, title);
    let _ = writeln!(
        out,
        r##"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        W - 2.0 * M,
        H - 2.0 * M
    );
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let px = M + (W - 2.0 * M) * k as f64 / 4.0;
        let py = H - M - (H - 2.0 * M) * k as f64 / 4.0;
        let ylab = if log_y {
            format!("1e{fy:.1}")
        } else {
            format!("{fy:.3}")
        };
        let _ = writeln!(
            out,
            r#"<text x="{px}" y="{}" text-anchor="middle">{fx:.3}</text><text x="{}" y="{}" text-anchor="end">{ylab}</text>"#,
            H - M + 16.0,
            M - 6.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text><text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        W / 2.0,
        H - 16.0,
        esc(x_label),
        H / 2.0,
        H / 2.0,
        esc(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && ty(p.1).is_finite())
            .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        if s.points.len() <= 40 {
            for p in s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && ty(p.1).is_finite())
            {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                    sx(p.0),
                    sy(p.1)
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            W - M + 4.0 - 120.0,
            M + 16.0 + 14.0 * i as f64,
            esc(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn heatmap_svg(title: &str, values: &[f64], nx: usize, ny: usize, extent: [f64; 4]) -> String {
    const MAX_CELLS: usize = 160;
    let bx = nx.div_ceil(MAX_CELLS).max(1);
    let by = ny.div_ceil(MAX_CELLS).max(1);
    let (cx, cy) = (nx.div_ceil(bx), ny.div_ceil(by));
    let mut coarse = vec![0.0; cx * cy];
    for ix in 0..nx {
        for iy in 0..ny {
            let v = values[ix * ny + iy];
            if v.is_finite() {
                coarse[(ix / bx) * cy + iy / by] += v;
            }
        }
    }
    let (lo, hi) = range(coarse.iter().copied());
    let side = (H - 2.0 * M).min(W - 2.0 * M);
    let (pw, ph) = (side / cx as f64, side / cy as f64);
    let left = (W - side) / 2.0;
    let mut out = String::new();
    frame(&mut out, title);
    for ix in 0..cx {
        for iy in 0..cy {
            let t = ((coarse[ix * cy + iy] - lo) / (hi - lo)).clamp(0.0, 1.0);
            let r = (255.0 * t.sqrt()) as u8;
            let g = (255.0 * t * t) as u8;
            let b = (255.0 * (1.0 - t) * 0.6) as u8;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({r},{g},{b})"/>"#,
                left + ix as f64 * pw,
                H - M - (iy + 1) as f64 * ph,
                pw + 0.05,
                ph + 0.05
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{left}" y="{}">x in [{:.3}, {:.3}], y in [{:.3}, {:.3}]</text>"#,
        H - M + 18.0,
        extent[0],
        extent[1],
        extent[2],
        extent[3]
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_significant_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.5), "-2.5000000000000000e0");
        assert_eq!(format_float(f64::NAN), "NaN");
        let back: f64 = format_float(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn csv_has_header_and_lf_endings() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec![1.5.into(), "x,y".into()]);
        let s = t.to_csv();
        assert_eq!(s, "a,b\n1.5000000000000000e0,\"x,y\"\n");
    }

    #[test]
    fn svg_plots_are_well_formed() {
        let p = Plot::Lines {
            name: "p".into(),
            title: "a < b".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_y: true,
            series: vec![Series {
                label: "s".into(),
                points: vec![(1.0, 1e-3), (2.0, 1e-5)],
            }],
        };
        let s = p.to_svg();
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("a &lt; b"));
        let h = Plot::Heatmap {
            name: "h".into(),
            title: "h".into(),
            values: (0..400).map(|i| i as f64).collect(),
            nx: 20,
            ny: 20,
            extent: [0.0, 1.0, 0.0, 1.0],
        };
        assert_eq!(h.to_svg().matches("<rect").count(), 401);
    }
}

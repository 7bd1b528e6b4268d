//! Self-contained SVG heatmap of a p-value grid.

use std::fmt::Write;

use hullwalk::stats::NEGLOG_THRESHOLD;

const CELL: f64 = 56.0;
const LEFT: f64 = 96.0;
const TOP: f64 = 84.0;

pub struct Heatmap<'a> {
    pub title: &'a str,
    pub row_values: &'a [f64],
    pub col_values: &'a [f64],
    /// `cells[i][j]`: `-ln(avg p)` for row `i`, column `j`; `None` when invalid.
    pub cells: &'a [Vec<Option<f64>>],
}

fn mix(a: [u8; 3], b: [u8; 3], t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let c = |k: usize| (a[k] as f64 + (b[k] as f64 - a[k] as f64) * t).round() as u8;
    [c(0), c(1), c(2)]
}

/// Cool shades up to the threshold, warm shades strictly above it.
pub fn cell_color(v: Option<f64>) -> [u8; 3] {
    match v {
        None => [0xcc, 0xcc, 0xcc],
        Some(v) if v <= NEGLOG_THRESHOLD => mix([0xea, 0xf3, 0xfb], [0x3a, 0x6e, 0xb5], v / NEGLOG_THRESHOLD),
        Some(v) => {
            // log scale from the threshold to 100x the threshold
            let t = (v / NEGLOG_THRESHOLD).ln() / 100f64.ln();
            mix([0xfd, 0xd0, 0x9a], [0xa5, 0x0f, 0x15], t)
        }
    }
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn is_dark(c: [u8; 3]) -> bool {
    0.299 * f64::from(c[0]) + 0.587 * f64::from(c[1]) + 0.114 * f64::from(c[2]) < 128.0
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render(h: &Heatmap) -> String {
    let (rows, cols) = (h.row_values.len(), h.col_values.len());
    let width = LEFT + cols as f64 * CELL + 24.0;
    let height = TOP + rows as f64 * CELL + 96.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-size="15" text-anchor="middle">{}</text>"#,
        width / 2.0,
        escape(h.title)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="48" font-size="12" text-anchor="middle">sigma2 (walk 2)</text>"#,
        LEFT + cols as f64 * CELL / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{y}" font-size="12" text-anchor="middle" transform="rotate(-90 18 {y})">sigma1 (walk 1)</text>"#,
        y = TOP + rows as f64 * CELL / 2.0
    );
    for (j, v) in h.col_values.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{v}</text>"#,
            LEFT + (j as f64 + 0.5) * CELL,
            TOP - 8.0
        );
    }
    for (i, v) in h.row_values.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{v}</text>"#,
            LEFT - 8.0,
            TOP + (i as f64 + 0.5) * CELL + 4.0
        );
    }
    for (i, row) in h.cells.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let c = cell_color(v);
            let (x, y) = (LEFT + j as f64 * CELL, TOP + i as f64 * CELL);
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="white"/>"#,
                hex(c)
            );
            let label = v.map_or("n/a".to_string(), |v| format!("{v:.2}"));
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="11" text-anchor="middle" fill="{}">{label}</text>"#,
                x + CELL / 2.0,
                y + CELL / 2.0 + 4.0,
                if is_dark(c) { "white" } else { "black" }
            );
        }
    }
    let ly = TOP + rows as f64 * CELL + 28.0;
    let legend = [
        (cell_color(Some(1.0)), "-ln p <= 2: normality not rejected"),
        (cell_color(Some(20.0)), "-ln p > 2: normality rejected"),
        (cell_color(None), "invalid (degenerate sample)"),
    ];
    for (k, (c, text)) in legend.iter().enumerate() {
        let y = ly + k as f64 * 20.0;
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{y}" width="14" height="14" fill="{}"/><text x="{}" y="{}" font-size="11">{text}</text>"#,
            hex(*c),
            LEFT + 20.0,
            y + 11.0
        );
    }
    s.push_str("</svg>\n");
    s
}

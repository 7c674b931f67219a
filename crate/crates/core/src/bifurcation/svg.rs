//! SVG rendering of a swept diagram.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::diagram::DiagramGrid;

const PALETTE: [&str; 12] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
];

/// Cells coloured by label with the traced curves on top.
pub fn render(d: &DiagramGrid, size: f64) -> String {
    let [(x0, x1), (y0, y1)] = d.grid.ranges;
    let sx = |x: f64| (x - x0) / (x1 - x0).max(f64::MIN_POSITIVE) * size;
    let sy = |y: f64| size - (y - y0) / (y1 - y0).max(f64::MIN_POSITIVE) * size;
    let [n1, n2] = d.grid.n;
    let (cw, ch) = (size / n1.max(1) as f64, size / n2.max(1) as f64);
    let mut colours: BTreeMap<&str, &str> = BTreeMap::new();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = size + 160.0,
        h = size
    );
    for c in &d.cells {
        let label = c.report.as_ref().map(|r| r.label.as_str()).unwrap_or("error");
        let k = colours.len();
        let fill = *colours.entry(label).or_insert(PALETTE[k % PALETTE.len()]);
        let (i, j) = (c.index[0] as f64, c.index[1] as f64);
        let _ = writeln!(
            s,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{fill}"/>"#,
            i * cw,
            size - (j + 1.0) * ch,
            cw,
            ch
        );
    }
    for c in &d.curves {
        let pts: Vec<String> = c
            .samples
            .iter()
            .map(|p| format!("{:.3},{:.3}", sx(p[1]), sy(p[2])))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="black" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            pts.join(" "),
            c.name
        );
    }
    for (k, (label, fill)) in colours.iter().enumerate() {
        let y = 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{fill}"/><text x="{:.1}" y="{:.1}" font-size="11">{label}</text>"#,
            size + 8.0,
            y - 9.0,
            size + 22.0,
            y
        );
    }
    s.push_str("</svg>\n");
    s
}

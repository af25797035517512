//! Plain-text renderers: CSV tables and the minimal SVG line chart.

use isowell::family::MemberSample;

pub const FAMILY_HEADER: [&str; 9] =
    ["x", "V1", "V2", "V1gamma", "deformation", "psi", "psi2", "gamma_of_x", "mu"];

/// Formats with 12 significant digits; non-finite values become "nan".
pub fn sig12(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        "nan".to_string()
    }
}

pub fn row_values(r: &MemberSample) -> [f64; 9] {
    [r.x, r.v1, r.v2, r.v1gamma, r.deformation, r.psi, r.psi2, r.gamma_of_x, r.mu]
}

pub fn family_csv(rows: &[MemberSample]) -> String {
    let mut out = String::with_capacity(rows.len() * 160 + 96);
    out.push_str(&FAMILY_HEADER.join(","));
    out.push('\n');
    for r in rows {
        let vals = row_values(r);
        let line: Vec<String> = vals.iter().map(|&v| sig12(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Column index in [`FAMILY_HEADER`] for a user-supplied name
/// (case-insensitive).
pub fn column_index(name: &str) -> Option<usize> {
    FAMILY_HEADER.iter().position(|h| h.eq_ignore_ascii_case(name))
}

const SVG_W: f64 = 800.0;
const SVG_H: f64 = 500.0;
const M_LEFT: f64 = 70.0;
const M_RIGHT: f64 = 20.0;
const M_TOP: f64 = 40.0;
const M_BOTTOM: f64 = 50.0;
const PALETTE: [&str; 4] = ["#1a1a1a", "#2c6fbb", "#c24f4f", "#3f8f5f"];

/// A self-contained line chart of the selected columns against x: axes, one
/// polyline per column (split at masked samples), and a legend.
pub fn family_svg(rows: &[MemberSample], columns: &[usize], title: &str) -> Option<String> {
    let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
    let (x0, x1) = (xs.first().copied()?, xs.last().copied()?);
    let mut y0 = f64::INFINITY;
    let mut y1 = f64::NEG_INFINITY;
    for r in rows {
        let vals = row_values(r);
        for &ci in columns {
            let v = vals[ci];
            if v.is_finite() {
                y0 = y0.min(v);
                y1 = y1.max(v);
            }
        }
    }
    if !(y0.is_finite() && y1.is_finite()) {
        return None;
    }
    if y0 == y1 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    let px = |x: f64| M_LEFT + (x - x0) / (x1 - x0) * (SVG_W - M_LEFT - M_RIGHT);
    let py = |y: f64| SVG_H - M_BOTTOM - (y - y0) / (y1 - y0) * (SVG_H - M_TOP - M_BOTTOM);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SVG_W} {SVG_H}\" \
         font-family=\"monospace\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!("<title>{title}</title>\n"));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>\n"
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"#000\"/>\n",
        M_LEFT,
        M_TOP,
        M_LEFT,
        SVG_H - M_BOTTOM
    ));
    svg.push_str(&format!(
        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"#000\"/>\n",
        M_LEFT,
        SVG_H - M_BOTTOM,
        SVG_W - M_RIGHT,
        SVG_H - M_BOTTOM
    ));
    // axis labels
    svg.push_str(&format!(
        "<text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"middle\">{:.4e}</text>\n",
        M_LEFT,
        SVG_H - M_BOTTOM + 16.0,
        x0
    ));
    svg.push_str(&format!(
        "<text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"middle\">{:.4e}</text>\n",
        SVG_W - M_RIGHT,
        SVG_H - M_BOTTOM + 16.0,
        x1
    ));
    svg.push_str(&format!(
        "<text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"end\">{:.4e}</text>\n",
        M_LEFT - 6.0,
        SVG_H - M_BOTTOM,
        y0
    ));
    svg.push_str(&format!(
        "<text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"end\">{:.4e}</text>\n",
        M_LEFT - 6.0,
        M_TOP + 10.0,
        y1
    ));

    for (k, &ci) in columns.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        // legend entry
        svg.push_str(&format!(
            "<text x=\"{:.3}\" y=\"{:.3}\" fill=\"{}\">{}</text>\n",
            M_LEFT + 8.0 + 90.0 * k as f64,
            M_TOP - 10.0,
            color,
            FAMILY_HEADER[ci]
        ));
        // polyline segments, broken at masked samples
        let mut seg: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, svg: &mut String| {
            if seg.len() >= 2 {
                svg.push_str(&format!(
                    "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>\n",
                    color,
                    seg.join(" ")
                ));
            }
            seg.clear();
        };
        for r in rows {
            let v = row_values(r)[ci];
            if v.is_finite() {
                seg.push(format!("{:.3},{:.3}", px(r.x), py(v.clamp(y0, y1))));
            } else {
                flush(&mut seg, &mut svg);
            }
        }
        flush(&mut seg, &mut svg);
    }
    svg.push_str("</svg>\n");
    Some(svg)
}

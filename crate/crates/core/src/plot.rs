//! Static SVG: line plots and grid heat maps.

use std::fmt::Write;

use crate::pdesolve::ScalarGrid;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 50.0;

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        v.filter(|x| x.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One polyline per series, sharing axes.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[(&str, &[f64], &[f64])]) -> String {
    let (x0, x1) = bounds(series.iter().flat_map(|s| s.1.iter().copied()));
    let (y0, y1) = bounds(series.iter().flat_map(|s| s.2.iter().copied()));
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut out = header(title);
    let _ = writeln!(
        out,
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    for (k, (label, xs, ys)) in series.iter().enumerate() {
        let colour = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"][k % 4];
        let pts: Vec<String> = xs
            .iter()
            .zip(ys.iter())
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" points=\"{}\"/>",
            pts.join(" ")
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{colour}\">{}</text>",
            W - PAD - 120.0,
            PAD + 16.0 * (k + 1) as f64,
            escape(label)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{} [{x0:.4}, {x1:.4}]</text>",
        W / 2.0,
        H - 15.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        "<text x=\"15\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\">{} [{y0:.4}, {y1:.4}]</text>",
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
    out.push_str("</svg>\n");
    out
}

/// Heat map of a grid, blue (low) to red (high); rows drawn with y upward.
pub fn heat_map(title: &str, grid: &ScalarGrid) -> String {
    let s = grid.shape;
    let (lo, hi) = bounds(grid.values.iter().copied());
    let cw = (W - 2.0 * PAD) / s.nx as f64;
    let ch = (H - 2.0 * PAD) / s.ny as f64;
    let mut out = header(title);
    for j in 0..s.ny {
        for i in 0..s.nx {
            let t = ((grid.at(i, j) - lo) / (hi - lo)).clamp(0.0, 1.0);
            let (r, b) = ((255.0 * t) as u8, (255.0 * (1.0 - t)) as u8);
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({r},64,{b})\"/>",
                PAD + i as f64 * cw,
                H - PAD - (j + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">range [{lo:.3e}, {hi:.3e}]</text>",
        W / 2.0,
        H - 15.0
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdesolve::GridShape;

    #[test]
    fn svg_is_well_formed_enough() {
        let x = [0.0, 1.0, 2.0];
        let y = [1.0, -1.0, f64::NAN];
        let s = line_plot("H(s) <test>", "s", "H", &[("H", &x, &y)]);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("&lt;test&gt;"));
        let g = ScalarGrid::filled(GridShape::rect(3, 3, 0.0, 1.0, 0.0, 1.0).unwrap(), 2.0);
        assert_eq!(heat_map("flat", &g).matches("<rect").count(), 1 + 9);
    }
}

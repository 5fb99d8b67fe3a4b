//! File emission: atomic writes, CSV formatting, and plain SVG polylines.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Write `contents` to `path` through a temporary file plus rename, so a
/// partial file never appears under the final name.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = PathBuf::from(path);
    let mut name = tmp
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".tmp");
    tmp.set_file_name(name);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

/// Full-precision scientific notation: 17 significant digits.
pub fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

/// A polyline quick-look plot as a standalone SVG document.
pub fn svg_polyline(points: &[(f64, f64)], title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const MARGIN: f64 = 40.0;

    let finite: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if finite.is_empty() {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    let dx = (x1 - x0).max(1e-300);
    let dy = (y1 - y0).max(1e-300);
    let sx = |x: f64| MARGIN + (x - x0) / dx * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / dy * (H - 2.0 * MARGIN);

    let mut path = String::new();
    for (i, &(x, y)) in finite.iter().enumerate() {
        if i > 0 {
            path.push(' ');
        }
        path.push_str(&format!("{:.2},{:.2}", sx(x), sy(y)));
    }

    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\">\n",
            "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<rect x=\"{m}\" y=\"{m}\" width=\"{iw}\" height=\"{ih}\" fill=\"none\" ",
            "stroke=\"#888\" stroke-width=\"1\"/>\n",
            "<text x=\"{m}\" y=\"{ty}\" font-family=\"monospace\" font-size=\"14\">{title}</text>\n",
            "<text x=\"{m}\" y=\"{by}\" font-family=\"monospace\" font-size=\"11\">",
            "x: [{x0:.6e}, {x1:.6e}]  y: [{y0:.6e}, {y1:.6e}]</text>\n",
            "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" points=\"{path}\"/>\n",
            "</svg>\n"
        ),
        w = W,
        h = H,
        m = MARGIN,
        iw = W - 2.0 * MARGIN,
        ih = H - 2.0 * MARGIN,
        ty = MARGIN - 12.0,
        by = H - 12.0,
        title = title,
        x0 = x0,
        x1 = x1,
        y0 = y0,
        y1 = y1,
        path = path,
    )
}

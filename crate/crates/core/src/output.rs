//! Deterministic text artifacts: number formatting, CSV, SVG and atomic file writes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// 17 significant digits in scientific notation, independent of locale.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Shortest representation that round-trips.
pub fn fmt_short(v: f64) -> String {
    format!("{v}")
}

/// Writes `contents` to a temporary sibling file and renames it into place.
pub fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io { path: path.display().to_string(), source };
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
    }
    let file_name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

/// CSV header naming the coordinate columns of a grid.
pub fn coord_header(grid: &Grid) -> Vec<String> {
    let dim = grid.dim();
    let mut cols: Vec<String> = (0..dim.n_real).map(|i| format!("x{}", i + 1)).collect();
    cols.extend((0..dim.n_complex).map(|j| format!("re_z{}", j + 1)));
    cols.extend((0..dim.n_complex).map(|j| format!("im_z{}", j + 1)));
    cols
}

pub fn coord_fields(grid: &Grid, i: usize) -> Vec<String> {
    grid.point(i).coords().iter().map(|&c| fmt_f64(c)).collect()
}

/// Renders a planar grid as one square per point. `fill` returns the color of a point
/// (None leaves it blank). Returns None for grids without a planar lattice.
pub fn grid_svg(grid: &Grid, title: &str, fill: impl Fn(usize) -> Option<String>) -> Option<String> {
    let cells = grid.lattice()?;
    let max_x = cells.iter().map(|c| c.ix).max()?;
    let max_y = cells.iter().map(|c| c.iy).max()?;
    let px = 8;
    let w = (max_x + 1) * px;
    let h = (max_y + 1) * px + 20;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(s, r#"<text x="2" y="14" font-size="12" font-family="monospace">{}</text>"#, escape(title));
    for (i, c) in cells.iter().enumerate() {
        let color = fill(i).unwrap_or_else(|| "#ffffff".to_string());
        let x = c.ix * px;
        let y = 20 + (max_y - c.iy) * px;
        let stroke = if grid.is_margin(i) { r##" stroke="#888888" stroke-width="1""## } else { "" };
        let _ = writeln!(s, r#"<rect x="{x}" y="{y}" width="{px}" height="{px}" fill="{color}"{stroke}/>"#);
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Color for a nonnegative value banded at integer thresholds.
pub fn band_color(v: f64) -> String {
    const PALETTE: [&str; 8] = ["#1b9e77", "#66a61e", "#e6ab02", "#d95f02", "#e7298a", "#7570b3", "#a6761d", "#666666"];
    if !v.is_finite() {
        return "#000000".to_string();
    }
    let band = (v.max(0.0).floor() as usize).min(PALETTE.len() - 1);
    PALETTE[band].to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
        for v in [0.1, 1.0 / 3.0, -7.25e-12, 6.02e23] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.txt");
        atomic_write(&p, "one").unwrap();
        atomic_write(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}

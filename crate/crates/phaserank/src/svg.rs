//! Minimal SVG emitters for the figure-style outputs: unit-circle hull
//! plots and torus rasters (coverage grids, region membership, coamoeba
//! slices). Fixed 800x800 viewport, axes labeled in multiples of pi/2,
//! member cells dark and complement cells light.

use std::fmt::Write;

use crate::detvec::HullPoint;
use crate::scaling::{CellStatus, TorusGrid};

const VIEW: f64 = 800.0;
const MARGIN: f64 = 60.0;

const DARK: &str = "#1f3552";
const LIGHT: &str = "#f2f2ee";
const MID: &str = "#b8b0a1";
const ACCENT: &str = "#c23b22";

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{VIEW}" height="{VIEW}" viewBox="0 0 {VIEW} {VIEW}">"#
    );
    let _ = writeln!(out, r#"<rect width="{VIEW}" height="{VIEW}" fill="white"/>"#);
}

/// Unit-circle plot of deduplicated determinant monomials with the convex
/// hull outlined and the origin marked.
pub fn hull_svg(points: &[HullPoint]) -> String {
    let scale = (VIEW / 2.0 - MARGIN) / 1.2;
    let cx = VIEW / 2.0;
    let px = |x: f64| cx + scale * x;
    let py = |y: f64| cx - scale * y;

    let mut out = String::new();
    header(&mut out);
    let _ = writeln!(
        out,
        r#"<circle cx="{cx}" cy="{cx}" r="{scale}" fill="none" stroke="{MID}" stroke-width="1.5"/>"#
    );
    // hull polygon through the flagged vertices, in angular order
    let mut verts: Vec<&HullPoint> = points.iter().filter(|p| p.is_hull_vertex).collect();
    verts.sort_by(|a, b| {
        a.im.atan2(a.re)
            .partial_cmp(&b.im.atan2(b.re))
            .unwrap()
    });
    if verts.len() >= 2 {
        let path: Vec<String> = verts
            .iter()
            .map(|p| format!("{:.2},{:.2}", px(p.re), py(p.im)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polygon points="{}" fill="{DARK}" fill-opacity="0.12" stroke="{DARK}" stroke-width="1.5"/>"#,
            path.join(" ")
        );
    }
    // origin cross
    let _ = writeln!(
        out,
        r#"<path d="M {x0} {cy} H {x1} M {cx} {y0} V {y1}" stroke="{ACCENT}" stroke-width="2"/>"#,
        x0 = cx - 10.0,
        x1 = cx + 10.0,
        y0 = cx - 10.0,
        y1 = cx + 10.0,
        cy = cx
    );
    for p in points {
        let r = 4.0 + 2.0 * (p.multiplicity as f64).sqrt();
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{r:.2}" fill="{DARK}"/>"#,
            px(p.re),
            py(p.im)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="14" fill="{DARK}">x{}</text>"#,
            px(p.re) + r + 3.0,
            py(p.im) - 3.0,
            p.multiplicity
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Axis ticks at multiples of pi/2 for a `[0, 2pi)` axis of pixel span
/// `[lo, hi]`.
fn pi_axis(out: &mut String, horizontal: bool, lo: f64, hi: f64, fixed: f64) {
    let labels = ["0", "pi/2", "pi", "3pi/2", "2pi"];
    for (k, lab) in labels.iter().enumerate() {
        let f = lo + (hi - lo) * k as f64 / 4.0;
        let (x, y) = if horizontal { (f, fixed + 18.0) } else { (fixed - 40.0, hi + lo - f + 4.0) };
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{y:.1}" font-size="13" fill="{DARK}">{lab}</text>"#
        );
    }
}

/// Generic torus raster: `cells[row * resolution + col]` mapped to colors,
/// row axis drawn upward. Runs of equal color are merged per row.
fn raster_rects(out: &mut String, resolution: usize, color: impl Fn(usize) -> &'static str) {
    let span = VIEW - 2.0 * MARGIN;
    let cell = span / resolution as f64;
    for row in 0..resolution {
        let y = MARGIN + span - (row + 1) as f64 * cell;
        let mut col = 0;
        while col < resolution {
            let c = color(row * resolution + col);
            let mut end = col + 1;
            while end < resolution && color(row * resolution + end) == c {
                end += 1;
            }
            if c != LIGHT {
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{c}"/>"#,
                    MARGIN + col as f64 * cell,
                    y,
                    (end - col) as f64 * cell + 0.3,
                    cell + 0.3
                );
            }
            col = end;
        }
    }
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{span:.1}" height="{span:.1}" fill="none" stroke="{DARK}" stroke-width="1.5"/>"#
    );
    pi_axis(out, true, MARGIN, VIEW - MARGIN, VIEW - MARGIN);
    pi_axis(out, false, MARGIN, VIEW - MARGIN, MARGIN);
}

/// Coverage heat map: covered cells light, uncovered dark, unresolved mid;
/// the witness point, if any, marked with a cross.
pub fn coverage_svg(grid: &TorusGrid) -> String {
    let mut out = String::new();
    header(&mut out);
    raster_rects(&mut out, grid.resolution, |idx| match grid.cells.get(idx) {
        Some(CellStatus::CertifiedCovered) | None => LIGHT,
        Some(CellStatus::UncoveredWitness) => DARK,
        Some(CellStatus::Unresolved) => MID,
    });
    if let Some((s, t)) = grid.witness {
        let span = VIEW - 2.0 * MARGIN;
        let x = MARGIN + span * s / std::f64::consts::TAU;
        let y = MARGIN + span - span * t / std::f64::consts::TAU;
        let _ = writeln!(
            out,
            r#"<path d="M {x0:.1} {y:.1} H {x1:.1} M {x:.1} {y0:.1} V {y1:.1}" stroke="{ACCENT}" stroke-width="3"/>"#,
            x0 = x - 12.0,
            x1 = x + 12.0,
            y0 = y - 12.0,
            y1 = y + 12.0,
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Boolean membership raster (member = dark).
pub fn membership_svg(resolution: usize, membership: &[bool]) -> String {
    let mut out = String::new();
    header(&mut out);
    raster_rects(&mut out, resolution, |idx| if membership[idx] { DARK } else { LIGHT });
    out.push_str("</svg>\n");
    out
}

/// Stacked 2D slices of a 3-axis membership raster, one SVG per layer.
pub fn slice_svgs(resolution: usize, axes: usize, membership: &[bool]) -> Vec<String> {
    if axes < 3 {
        return vec![membership_svg(resolution.max(1), membership)];
    }
    (0..resolution)
        .map(|layer| {
            let start = layer * resolution * resolution;
            membership_svg(resolution, &membership[start..start + resolution * resolution])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detvec::hull_plot_data;
    use crate::matrix::PhaseMatrix;
    use crate::scaling::coverage_check_3xm;
    use std::f64::consts::PI;

    #[test]
    fn hull_svg_wellformed() {
        let m = PhaseMatrix::from_radians(&[
            vec![0.0, 0.0, 0.0],
            vec![0.0, PI / 2.0, PI / 3.0],
            vec![0.0, PI / 3.0, PI / 2.0],
        ])
        .unwrap();
        let svg = hull_svg(&hull_plot_data(&m).unwrap());
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("circle"));
    }

    #[test]
    fn coverage_svg_marks_witness() {
        let th = PhaseMatrix::from_radians(&[
            vec![0.0, 0.0, 0.0],
            vec![PI / 2.0, PI / 4.0, 2.0 * PI / 3.0],
            vec![-PI / 2.0, 7.0 * PI / 6.0, 4.0 * PI / 3.0],
        ])
        .unwrap();
        let cert = coverage_check_3xm(&th, 64).unwrap();
        let svg = coverage_svg(&cert.grid);
        assert!(svg.contains("stroke-width=\"3\"")); // witness cross
    }

    #[test]
    fn membership_svg_wellformed() {
        let svg = membership_svg(8, &[true; 64]);
        assert!(svg.contains("rect"));
        let layers = slice_svgs(4, 3, &vec![false; 64]);
        assert_eq!(layers.len(), 4);
    }
}

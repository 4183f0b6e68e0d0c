use std::fmt::Write as _;
use std::io::Write;

use super::classify::RunArtifacts;
use crate::evolver::FlowFrame;
use crate::field::AxiGrid;
use crate::profile::ProfileCurve;

/// SVG drawing of one frame in the `(r, z)` half-plane, mirrored across the
/// axis: closed loops in blue, axis arcs in red.
pub fn frame_svg(frame: &FlowFrame<f64>, grid: &AxiGrid<f64>) -> String {
    let scale = 100.0;
    let w = 2.0 * grid.r_max * scale;
    let hgt = (grid.z_max - grid.z_min) * scale;
    let map = |p: (f64, f64), sign: f64| (grid.r_max * scale + sign * p.0 * scale, (grid.z_max - p.1) * scale);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{hgt:.0}" viewBox="0 0 {w:.1} {hgt:.1}">"#);
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="white"/>"##);
    let _ = writeln!(s, r##"<line x1="{0:.1}" y1="0" x2="{0:.1}" y2="{1:.1}" stroke="#999" stroke-dasharray="4 4"/>"##, grid.r_max * scale, hgt);
    let curves = frame.contour.loops.iter().map(|c| (c, true, "#1f4e9c")).chain(frame.contour.arcs.iter().map(|c| (c, false, "#b0301c")));
    for (c, closed, color) in curves {
        for sign in [1.0, -1.0] {
            let pts: Vec<String> = c.points.iter().map(|&p| map(p, sign)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let tag = if closed { "polygon" } else { "polyline" };
            let _ = writeln!(s, r#"<{tag} points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, pts.join(" "));
        }
    }
    let _ = writeln!(s, r#"<text x="8" y="18" font-family="monospace" font-size="14">t = {:.4}</text>"#, frame.time);
    s.push_str("</svg>\n");
    s
}

/// SVG drawing of profile curves in the `(r, z)` half-plane, mirrored
/// across the axis.
pub fn profile_svg(curves: &[ProfileCurve<f64>]) -> String {
    let pts = || curves.iter().flat_map(|c| c.points.iter());
    let r_max = pts().map(|p| p.r).fold(0.5, f64::max) * 1.05;
    let z_hi = pts().map(|p| p.z.abs()).fold(0.5, f64::max) * 1.05;
    let scale = 400.0 / r_max.max(z_hi);
    let (w, hgt) = (2.0 * r_max * scale, 2.0 * z_hi * scale);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{hgt:.0}" viewBox="0 0 {w:.1} {hgt:.1}">"#);
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="white"/>"##);
    let _ = writeln!(s, r##"<line x1="{0:.1}" y1="0" x2="{0:.1}" y2="{1:.1}" stroke="#999" stroke-dasharray="4 4"/>"##, r_max * scale, hgt);
    for c in curves {
        let tag = if c.closed { "polygon" } else { "polyline" };
        for sign in [1.0, -1.0] {
            let p: Vec<String> = c.points.iter().map(|p| format!("{:.2},{:.2}", (r_max + sign * p.r) * scale, (z_hi - p.z) * scale)).collect();
            let _ = writeln!(s, r##"<{tag} points="{}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>"##, p.join(" "));
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Per-frame time series: time, step, genus, number of inside
/// cross-sections, total cross-section area, smallest neck width and the
/// events of the frame.
pub fn write_frames_csv<W: Write>(frames: &[FlowFrame<f64>], mut out: W) -> std::io::Result<()> {
    writeln!(out, "time,step,genus,components,area,min_neck_width,events")?;
    for f in frames {
        let d = &f.decomposition;
        let area: f64 = d.in_components.iter().map(|c| c.area).sum();
        let neck = d.in_components.iter().map(|c| c.neck_width).fold(f64::INFINITY, f64::min);
        let neck = if neck.is_finite() { neck.to_string() } else { String::new() };
        let events: Vec<String> = f.events.iter().map(|e| format!("{:?}", e.kind)).collect();
        writeln!(out, "{},{},{},{},{},{},{}", f.time, f.step_index, RunArtifacts::genus(f), d.in_components.len(), area, neck, events.join(";"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_svg_mirrors_each_curve() {
        let pts: Vec<(f64, f64)> = (0..32).map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 32.0;
            (2.0 + 0.5 * a.cos(), 0.5 * a.sin())
        }).collect();
        let svg = profile_svg(&[ProfileCurve::from_positions(&pts, true)]);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_frame_table_has_a_header() {
        let mut buf = Vec::new();
        write_frames_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "time,step,genus,components,area,min_neck_width,events\n");
    }
}

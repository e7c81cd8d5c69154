use std::fmt::Write;

use super::{Portrait, Projection};
use crate::equilibria::Stability;
use crate::symmetric_invariants;

const PANEL: f64 = 440.0;
const RADIUS: f64 = 200.0;

struct Frame {
    projection: Projection,
    /// Semi-axes of the spheroid `(X, Y)` and `Z`, or the plot half-width.
    a: f64,
    c: f64,
}

impl Frame {
    fn new(p: &Portrait) -> Frame {
        match p.projection {
            Projection::SphereFrontBack => {
                let g = symmetric_invariants(&p.circulations);
                let a = p.theta.abs() * (g.gamma1 / (4.0 * g.gamma3)).abs().sqrt();
                Frame { projection: p.projection, a, c: p.theta.abs() }
            }
            Projection::PlaneXY => {
                let auto = || {
                    let mut r = p.scale.max(1e-12);
                    for e in &p.equilibria {
                        r = r.max(e.state.x.abs()).max(e.state.y.abs());
                    }
                    for s in p.singularities.iter().filter_map(|s| s.location) {
                        r = r.max(s[0].abs()).max(s[1].abs());
                    }
                    1.3 * r
                };
                let half = p.zoom.unwrap_or_else(auto);
                Frame { projection: p.projection, a: half, c: half }
            }
        }
    }

    fn width(&self) -> f64 {
        match self.projection {
            Projection::SphereFrontBack => 2.0 * PANEL,
            Projection::PlaneXY => PANEL,
        }
    }

    /// Screen position, or `None` when outside the window.
    fn map(&self, p: [f64; 3]) -> Option<(f64, f64)> {
        let mid = PANEL / 2.0;
        match self.projection {
            Projection::SphereFrontBack => {
                let (x, y, z) = (p[0] / self.a, p[1] / self.a, p[2] / self.c);
                if z >= 0.0 {
                    Some((mid + RADIUS * x, mid - RADIUS * y))
                } else {
                    Some((PANEL + mid - RADIUS * x, mid - RADIUS * y))
                }
            }
            Projection::PlaneXY => {
                let (x, y) = (p[0] / self.a, p[1] / self.a);
                (x.abs() <= 1.0 && y.abs() <= 1.0).then(|| (mid + RADIUS * x, mid - RADIUS * y))
            }
        }
    }

    fn same_panel(&self, a: (f64, f64), b: (f64, f64)) -> bool {
        self.projection == Projection::PlaneXY || (a.0 < PANEL) == (b.0 < PANEL)
    }
}

fn path_data(frame: &Frame, samples: &[[f64; 3]]) -> String {
    let mut d = String::new();
    let mut last: Option<(f64, f64)> = None;
    for &p in samples {
        let Some(q) = frame.map(p) else {
            last = None;
            continue;
        };
        match last {
            Some(l) if frame.same_panel(l, q) => {
                if (q.0 - l.0).hypot(q.1 - l.1) < 0.5 {
                    continue;
                }
                let _ = write!(d, "L{:.2},{:.2}", q.0, q.1);
            }
            _ => {
                let _ = write!(d, "M{:.2},{:.2}", q.0, q.1);
            }
        }
        last = Some(q);
    }
    d
}

/// Deterministic SVG of the portrait: one `path` per curve and one `circle`
/// per equilibrium or singular point.
pub fn render_svg(p: &Portrait) -> String {
    let frame = Frame::new(p);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = frame.width(),
        h = PANEL
    );
    s.push_str(
        "<style>.periodic{fill:none;stroke:#555;stroke-width:0.8}.separatrix{fill:none;stroke:#000;stroke-width:2}\
         .singularity{fill:#000;stroke:#000}.equilibrium{stroke:#000}.center{fill:#2a6fdb}.saddle{fill:#d33}\
         .degenerate{fill:#999}.frame{fill:none;stroke:#bbb}</style>\n",
    );
    match frame.projection {
        Projection::SphereFrontBack => {
            for cx in [PANEL / 2.0, 1.5 * PANEL] {
                let _ = writeln!(s, r#"<circle class="frame" cx="{cx}" cy="{}" r="{RADIUS}"/>"#, PANEL / 2.0);
            }
        }
        Projection::PlaneXY => {
            let o = PANEL / 2.0 - RADIUS;
            let _ = writeln!(s, r#"<rect class="frame" x="{o}" y="{o}" width="{0}" height="{0}"/>"#, 2.0 * RADIUS);
        }
    }
    for curve in &p.curves {
        let d = path_data(&frame, &curve.samples);
        if d.is_empty() {
            continue;
        }
        let class = if curve.separatrix { "separatrix" } else { "periodic" };
        let _ = writeln!(s, r#"<path class="{class}" data-kind="{}" d="{d}"/>"#, curve.kind.name());
    }
    for ray in &p.singular_rays {
        let far = 4.0 * frame.a;
        let n = ray.direction[0].hypot(ray.direction[1]);
        let samples: Vec<[f64; 3]> = (0..=64)
            .map(|k| {
                let t = far * k as f64 / 64.0 / n;
                ray.direction.map(|v| v * t)
            })
            .collect();
        let d = path_data(&frame, &samples);
        if !d.is_empty() {
            let _ = writeln!(s, r#"<path class="singularity" data-pair="{}" fill="none" d="{d}"/>"#, ray.pair);
        }
    }
    for sp in &p.singularities {
        if let Some((x, y)) = sp.location.and_then(|l| frame.map(l)) {
            let _ = writeln!(s, r#"<circle class="singularity" data-pair="{}" cx="{x:.2}" cy="{y:.2}" r="4"/>"#, sp.pair);
        }
    }
    for e in &p.equilibria {
        if let Some((x, y)) = frame.map(e.state.xyz()) {
            let kind = match e.classification {
                Stability::Center => "center",
                Stability::Saddle => "saddle",
                Stability::Degenerate => "degenerate",
            };
            let _ = writeln!(s, r#"<circle class="equilibrium {kind}" cx="{x:.2}" cy="{y:.2}" r="5"/>"#);
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portrait::{sample_portrait, PortraitSpec};
    use crate::Circulations;

    #[test]
    fn svg_is_deterministic_and_classed() {
        let mut spec = PortraitSpec::new(Circulations::parse("1/3,1/3,1/3").unwrap(), 1.0);
        spec.orbit_count = 6;
        let a = render_svg(&sample_portrait(&spec).unwrap());
        let b = render_svg(&sample_portrait(&spec).unwrap());
        assert_eq!(a, b);
        assert!(a.contains(r#"class="separatrix""#) && a.contains(r#"class="periodic""#));
        assert_eq!(a.matches(r#"class="singularity""#).count(), 3);
        assert_eq!(a.matches(r#"class="equilibrium"#).count(), 5);
    }
}

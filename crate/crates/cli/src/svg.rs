//! Standalone SVG drawings of a configuration.

use hmeasure::geometry::{CircularArc, Configuration, Piece};
use std::f64::consts::{PI, TAU};
use std::fmt::Write;

const SIZE_PX: u32 = 480;
const MARGIN: f64 = 1.15;

/// Fixed six-decimal coordinate; values that round to zero print unsigned.
struct F(f64);

impl std::fmt::Display for F {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = format!("{:.6}", self.0);
        match s.strip_prefix('-') {
            Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => f.write_str(rest),
            _ => f.write_str(&s),
        }
    }
}

fn arc_path(out: &mut String, arc: &CircularArc) {
    let (c, r) = (arc.center().z(), arc.radius());
    // A full circle cannot be one elliptical-arc command; draw it in halves.
    let pieces = if arc.sweep() > TAU - 1e-12 { 2 } else { 1 };
    let step = arc.sweep() / pieces as f64;
    let start = arc.start();
    let _ = write!(out, "M {} {}", F(start.re), F(start.im));
    for i in 1..=pieces {
        let t = arc.angle0() + step * i as f64;
        let large = u8::from(step > PI);
        let _ = write!(
            out,
            " A {r} {r} 0 {large} 1 {} {}",
            F(c.re + r * t.cos()),
            F(c.im + r * t.sin()),
            r = F(r)
        );
    }
}

/// Unit circle, continuum and marked points. Coordinates are written in the
/// disk frame; a y-flip puts the imaginary axis up.
pub fn render(cfg: &Configuration) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE_PX}" height="{SIZE_PX}" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        -MARGIN,
        -MARGIN,
        2.0 * MARGIN,
        2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        r#"<rect x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" fill="white"/>"#,
        -MARGIN,
        -MARGIN,
        2.0 * MARGIN,
        2.0 * MARGIN
    );
    s.push_str("<g transform=\"scale(1,-1)\">\n");
    s.push_str(r#"<circle cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="0.008"/>"#);
    s.push('\n');
    s.push_str(r#"<g fill="none" stroke="firebrick" stroke-width="0.016" stroke-linecap="round">"#);
    s.push('\n');
    for piece in cfg.continuum().pieces() {
        let mut d = String::new();
        match piece {
            Piece::Segment(seg) => {
                let (a, b) = (seg.p0(), seg.p1());
                let _ = write!(
                    d,
                    "M {} {} L {} {}",
                    F(a.re()),
                    F(a.im()),
                    F(b.re()),
                    F(b.im())
                );
            }
            Piece::Arc(arc) => arc_path(&mut d, &arc),
        }
        let _ = writeln!(s, r#"<path d="{d}"/>"#);
    }
    s.push_str("</g>\n<g fill=\"navy\">\n");
    for p in cfg.points() {
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{}" r="0.022"/>"#,
            F(p.re()),
            F(p.im())
        );
    }
    s.push_str("</g>\n</g>\n");
    // Labels sit outside the flipped group so the text reads upright.
    s.push_str("<g font-family=\"serif\" font-size=\"0.08\" fill=\"navy\">\n");
    for (k, p) in cfg.points().iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">a{}</text>"#,
            F(p.re() + 0.035),
            F(-p.im() - 0.035),
            k + 1
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use hmeasure::geometry::{Continuum, Point};

    #[test]
    fn diameter_is_vertical() {
        let svg = render(&Configuration::extremal(2, 0.5, 0.0).unwrap());
        assert!(
            svg.contains(r#"d="M 0.000000 0.000000 L 0.000000 1.000000""#),
            "{svg}"
        );
        assert!(
            svg.contains(r#"d="M 0.000000 0.000000 L 0.000000 -1.000000""#),
            "{svg}"
        );
        assert!(!svg.contains("-0.000000"));
        assert_eq!(svg.matches("<circle").count(), 3);
    }

    #[test]
    fn three_spokes() {
        let svg = render(&Configuration::extremal(3, 0.5, 0.0).unwrap());
        assert_eq!(svg.matches(" L ").count(), 3);
        assert!(svg.contains(">a3</text>"));
        assert_eq!(svg, render(&Configuration::extremal(3, 0.5, 0.0).unwrap()));
    }

    #[test]
    fn arcs_use_ccw_sweep_and_split_circles() {
        let arc = CircularArc::new(Point::new(0.0, 0.0).unwrap(), 0.5, 0.0, TAU).unwrap();
        let mut d = String::new();
        arc_path(&mut d, &arc);
        assert_eq!(d.matches(" A ").count(), 2);
        assert!(d.contains(" 0 0 1 "));
        let big = CircularArc::new(Point::new(0.0, 0.0).unwrap(), 0.5, 0.0, 4.0).unwrap();
        let mut d = String::new();
        arc_path(&mut d, &big);
        assert!(d.contains(" 0 1 1 "), "{d}");
        let cfg = Configuration::new(
            0.8,
            vec![
                Point::new(0.0, 0.8).unwrap(),
                Point::new(0.0, -0.8).unwrap(),
            ],
            Continuum::new(
                vec![],
                vec![CircularArc::new(Point::new(0.0, 0.0).unwrap(), 1.0, -0.3, 0.3).unwrap()],
            )
            .unwrap(),
        )
        .unwrap();
        assert!(render(&cfg).contains(" A 1.000000 1.000000 0 0 1 "));
    }
}

//! Plain SVG 1.1 rendering of 2-D clusterings.

use std::fmt::Write as _;
use std::path::Path;

use super::DataError;
use crate::engine::{ClusterLabels, Label};
use crate::geometry::{Kind, SegmentLike};
use crate::profile::Profile;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#393b79",
];
const NOISE: &str = "#9e9e9e";
const SIZE: f64 = 800.0;

struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
    w: f64,
    h: f64,
}

impl Frame {
    fn fit(pts: impl Iterator<Item = [f64; 2]>) -> Frame {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in pts {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if !lo[0].is_finite() {
            lo = [0.0, 0.0];
            hi = [1.0, 1.0];
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        let pad = 0.05 * span;
        let scale = SIZE / (span + 2.0 * pad);
        Frame {
            min_x: lo[0] - pad,
            max_y: hi[1] + pad,
            scale,
            w: ((hi[0] - lo[0] + 2.0 * pad) * scale).ceil(),
            h: ((hi[1] - lo[1] + 2.0 * pad) * scale).ceil(),
        }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        ((p[0] - self.min_x) * self.scale, (self.max_y - p[1]) * self.scale)
    }
}

fn xy(c: &[f64]) -> [f64; 2] {
    [c[0], c[1]]
}

fn header(f: &Frame) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        w = f.w,
        h = f.h
    )
}

/// One colour per cluster (by final assignment), noise in grey.
pub fn render_svg(lines: &[SegmentLike], labels: &ClusterLabels) -> Result<String, DataError> {
    if let Some(l) = lines.iter().find(|l| l.dim() != 2) {
        return Err(DataError::NotPlanar(l.dim()));
    }
    let frame = Frame::fit(
        lines
            .iter()
            .filter(|l| l.kind() == Kind::Segment)
            .flat_map(|l| [xy(l.x().coords()), xy(l.y().coords())]),
    );
    let reach = (frame.w + frame.h) / frame.scale;
    let mut s = header(&frame);
    for (i, l) in lines.iter().enumerate() {
        let colour = match labels.assignment.get(i) {
            Some(Label::Cluster(c)) => PALETTE[(c.0 as usize - 1) % PALETTE.len()],
            _ => NOISE,
        };
        let (a, b) = match l.kind() {
            Kind::Segment => (xy(l.x().coords()), xy(l.y().coords())),
            Kind::Line => {
                let (x, d) = (l.x().coords(), l.direction());
                let k = reach / l.direction_norm();
                ([x[0] - k * d[0], x[1] - k * d[1]], [x[0] + k * d[0], x[1] + k * d[1]])
            }
        };
        let (p, q) = (frame.map(a), frame.map(b));
        if l.is_degenerate() {
            let _ = writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{colour}\"/>", p.0, p.1);
        } else {
            let _ = writeln!(
                s,
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{colour}\" stroke-width=\"1.5\"/>",
                p.0, p.1, q.0, q.1
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg(lines: &[SegmentLike], labels: &ClusterLabels, path: impl AsRef<Path>) -> Result<(), DataError> {
    std::fs::write(path, render_svg(lines, labels)?)?;
    Ok(())
}

/// Outline of the scaled neighbourhood `α·f` around the unit segment
/// `(0,0)–(1,0)`: profile bands along the segment and round caps at both ends.
pub fn render_profile_svg(profile: &Profile, alpha: f64) -> String {
    const STEPS: usize = 200;
    let r = |t: f64| alpha * profile.eval(t);
    let mut outline: Vec<[f64; 2]> = (0..=STEPS)
        .map(|i| {
            let t = i as f64 / STEPS as f64;
            [t, r(t)]
        })
        .collect();
    let (r1, r0) = (r(1.0), r(0.0));
    outline.extend((1..STEPS).map(|i| {
        let a = std::f64::consts::FRAC_PI_2 - std::f64::consts::PI * i as f64 / STEPS as f64;
        [1.0 + r1 * a.cos(), r1 * a.sin()]
    }));
    outline.extend((0..=STEPS).rev().map(|i| {
        let t = i as f64 / STEPS as f64;
        [t, -r(t)]
    }));
    outline.extend((1..STEPS).map(|i| {
        let a = -std::f64::consts::FRAC_PI_2 - std::f64::consts::PI * i as f64 / STEPS as f64;
        [r0 * a.cos(), r0 * a.sin()]
    }));
    let frame = Frame::fit(outline.iter().copied().chain([[0.0, 0.0], [1.0, 0.0]]));
    let mut s = header(&frame);
    s.push_str("<polygon fill=\"#1f77b4\" fill-opacity=\"0.25\" stroke=\"#1f77b4\" points=\"");
    for p in &outline {
        let (x, y) = frame.map(*p);
        let _ = write!(s, "{x:.2},{y:.2} ");
    }
    s.push_str("\"/>\n");
    let (a, b) = (frame.map([0.0, 0.0]), frame.map([1.0, 0.0]));
    let _ = writeln!(
        s,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"2\"/>",
        a.0, a.1, b.0, b.1
    );
    s.push_str("</svg>\n");
    s
}

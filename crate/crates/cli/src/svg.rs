//! Static SVG figures: agent paths in the plane and barrier histories.

use std::fmt::Write;

use pcca_core::sim::Trace;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const PAD: f64 = 40.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let span = |v: &mut dyn Iterator<Item = f64>| {
            v.filter(|x| x.is_finite())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
        };
        let (mut x0, mut x1) = span(&mut xs.clone());
        let (mut y0, mut y1) = span(&mut ys.clone());
        if !x0.is_finite() || x1 <= x0 {
            (x0, x1) = (x0.min(0.0) - 1.0, x1.max(0.0) + 1.0);
        }
        if !y0.is_finite() || y1 <= y0 {
            (y0, y1) = (y0.min(0.0) - 1.0, y1.max(0.0) + 1.0);
        }
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - PAD - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * PAD)
    }

    fn polyline(&self, pts: impl Iterator<Item = (f64, f64)>, color: &str, dash: bool) -> String {
        let mut s = String::from("<polyline fill=\"none\" stroke-width=\"1.5\" points=\"");
        for (x, y) in pts {
            let _ = write!(s, "{:.2},{:.2} ", self.px(x), self.py(y));
        }
        let _ = write!(s, "\" stroke=\"{color}\"");
        if dash {
            s.push_str(" stroke-dasharray=\"5,3\"");
        }
        s.push_str("/>\n");
        s
    }

    fn axes(&self, xlabel: &str, ylabel: &str) -> String {
        format!(
            "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"#444\"/>\n\
             <text x=\"{PAD}\" y=\"{yb}\" font-size=\"11\">{x0:.2}</text>\n\
             <text x=\"{xr}\" y=\"{yb}\" font-size=\"11\" text-anchor=\"end\">{x1:.2}</text>\n\
             <text x=\"{xm}\" y=\"{yb}\" font-size=\"12\" text-anchor=\"middle\">{xlabel}</text>\n\
             <text x=\"4\" y=\"{yt}\" font-size=\"11\">{y1:.2}</text>\n\
             <text x=\"4\" y=\"{ybot}\" font-size=\"11\">{y0:.2}</text>\n\
             <text x=\"4\" y=\"{ym}\" font-size=\"12\">{ylabel}</text>\n",
            w = WIDTH - 2.0 * PAD,
            h = HEIGHT - 2.0 * PAD,
            yb = HEIGHT - PAD + 16.0,
            xr = WIDTH - PAD,
            xm = WIDTH / 2.0,
            yt = PAD + 4.0,
            ybot = HEIGHT - PAD,
            ym = HEIGHT / 2.0,
            x0 = self.x0,
            x1 = self.x1,
            y0 = self.y0,
            y1 = self.y1,
        )
    }
}

fn document(body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

/// Agent paths with start markers, final footprints and destinations.
pub fn trajectory_svg(t: &Trace) -> String {
    let n = t.n_agents();
    let xs = t.states.iter().flatten().map(|s| s.position.x).chain(t.destinations.iter().map(|d| d.x));
    let ys = t.states.iter().flatten().map(|s| s.position.y).chain(t.destinations.iter().map(|d| d.y));
    let mut f = Frame::fit(xs, ys);
    // equal axis scaling so footprints stay round
    let aspect = (WIDTH - 2.0 * PAD) / (HEIGHT - 2.0 * PAD);
    let (w, h) = (f.x1 - f.x0, f.y1 - f.y0);
    if w / h < aspect {
        let grow = (h * aspect - w) / 2.0;
        f.x0 -= grow;
        f.x1 += grow;
    } else {
        let grow = (w / aspect - h) / 2.0;
        f.y0 -= grow;
        f.y1 += grow;
    }
    let scale = (WIDTH - 2.0 * PAD) / (f.x1 - f.x0);

    let mut body = f.axes("x [m]", "y [m]");
    for i in 0..n {
        let c = COLORS[i % COLORS.len()];
        body += &f.polyline(t.states.iter().map(|s| (s[i].position.x, s[i].position.y)), c, false);
        if let (Some(first), Some(last)) = (t.states.first(), t.states.last()) {
            let _ = writeln!(
                body,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{c}\"/>",
                f.px(first[i].position.x),
                f.py(first[i].position.y)
            );
            let _ = writeln!(
                body,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"none\" stroke=\"{c}\"/>",
                f.px(last[i].position.x),
                f.py(last[i].position.y),
                t.radii[i] * scale
            );
        }
        let d = t.destinations[i];
        let _ = writeln!(
            body,
            "<path d=\"M{x0:.2},{y0:.2} L{x1:.2},{y1:.2} M{x0:.2},{y1:.2} L{x1:.2},{y0:.2}\" stroke=\"{c}\"/>",
            x0 = f.px(d.x) - 4.0,
            x1 = f.px(d.x) + 4.0,
            y0 = f.py(d.y) - 4.0,
            y1 = f.py(d.y) + 4.0
        );
        let _ = writeln!(
            body,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"{c}\">agent {i}</text>",
            WIDTH - PAD - 60.0,
            PAD + 14.0 * (i as f64 + 1.0)
        );
    }
    document(&body)
}

/// `h` (solid) and `h_r0` (dashed) per pair against time, with the zero line.
pub fn barrier_svg(t: &Trace) -> String {
    let ys = t.h.iter().chain(&t.h_r0).flatten().copied().chain([0.0]);
    let f = Frame::fit(t.times.iter().copied(), ys);
    let mut body = f.axes("t [s]", "h [m²]");
    body += &f.polyline([(f.x0, 0.0), (f.x1, 0.0)].into_iter(), "#999", true);
    for (q, (i, j)) in t.pairs.iter().enumerate() {
        let c = COLORS[q % COLORS.len()];
        body += &f.polyline(t.times.iter().zip(&t.h).map(|(&x, h)| (x, h[q])), c, false);
        body += &f.polyline(t.times.iter().zip(&t.h_r0).map(|(&x, h)| (x, h[q])), c, true);
        let _ = writeln!(
            body,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"{c}\">pair {i}-{j}</text>",
            WIDTH - PAD - 60.0,
            PAD + 14.0 * (q as f64 + 1.0)
        );
    }
    document(&body)
}

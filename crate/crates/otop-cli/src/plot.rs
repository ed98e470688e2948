//! Minimal SVG emission: objective-vs-fleet line plots and route maps.

use otop_core::model::{Instance, Solution};

const COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

pub struct Series {
    pub label: String,
    /// (x, y) points; gaps are skipped.
    pub points: Vec<(f64, f64)>,
}

struct Frame {
    width: f64,
    height: f64,
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(1e-12);
        self.left + (v - self.x_min) / span * (self.width - self.left - self.right)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-12);
        self.height - self.bottom - (v - self.y_min) / span * (self.height - self.top - self.bottom)
    }
}

fn svg_header(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    )
}

/// Line plot with one polyline per series, axis ticks, and a legend.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let points: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    let (x_min, x_max) = bounds(points.iter().map(|p| p.0), 0.0, 1.0);
    let (mut y_min, mut y_max) = bounds(points.iter().map(|p| p.1), 0.0, 1.0);
    let pad = (y_max - y_min).max(1.0) * 0.08;
    y_min -= pad;
    y_max += pad;

    let f = Frame {
        width: 640.0,
        height: 420.0,
        left: 64.0,
        right: 20.0,
        top: 40.0,
        bottom: 48.0,
        x_min,
        x_max,
        y_min,
        y_max,
    };
    let mut out = svg_header(f.width, f.height);
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        f.width / 2.0,
        escape(title)
    ));

    // Axes.
    out.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = f.left,
        r = f.width - f.right,
        t = f.top,
        b = f.height - f.bottom,
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
        (f.left + f.width - f.right) / 2.0,
        f.height - 10.0,
        escape(x_label)
    ));
    out.push_str(&format!(
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" \
         transform=\"rotate(-90 14 {})\">{}</text>\n",
        (f.top + f.height - f.bottom) / 2.0,
        (f.top + f.height - f.bottom) / 2.0,
        escape(y_label)
    ));

    // Ticks: x at each distinct point, y at five even stops.
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    for &x in &xs {
        let px = f.x(x);
        out.push_str(&format!(
            "<line x1=\"{px}\" y1=\"{b}\" x2=\"{px}\" y2=\"{b2}\" stroke=\"black\"/>\n\
             <text x=\"{px}\" y=\"{ty}\" text-anchor=\"middle\" font-size=\"11\">{x}</text>\n",
            b = f.height - f.bottom,
            b2 = f.height - f.bottom + 5.0,
            ty = f.height - f.bottom + 18.0,
        ));
    }
    for i in 0..=4 {
        let v = y_min + (y_max - y_min) * i as f64 / 4.0;
        let py = f.y(v);
        out.push_str(&format!(
            "<line x1=\"{l1}\" y1=\"{py}\" x2=\"{l}\" y2=\"{py}\" stroke=\"black\"/>\n\
             <line x1=\"{l}\" y1=\"{py}\" x2=\"{r}\" y2=\"{py}\" stroke=\"#dddddd\"/>\n\
             <text x=\"{tx}\" y=\"{ty}\" text-anchor=\"end\" font-size=\"11\">{v:.1}</text>\n",
            l1 = f.left - 5.0,
            l = f.left,
            r = f.width - f.right,
            tx = f.left - 8.0,
            ty = py + 4.0,
        ));
    }

    // Series and legend.
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> =
            s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", f.x(x), f.y(y))).collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            path.join(" ")
        ));
        for &(x, y) in &s.points {
            out.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                f.x(x),
                f.y(y)
            ));
        }
        let ly = f.top + 16.0 * i as f64;
        out.push_str(&format!(
            "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{lx2}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{tx}\" y=\"{ty}\" font-size=\"12\">{}</text>\n",
            escape(&s.label),
            lx = f.left + 10.0,
            lx2 = f.left + 34.0,
            tx = f.left + 40.0,
            ty = ly + 4.0,
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Map of the instance with one polyline per route; POI discs scale with
/// weight and POIs visited more than once are labeled with their count.
/// Returns `None` when the instance carries no coordinates.
pub fn route_map(instance: &Instance, solution: &Solution, title: &str) -> Option<String> {
    let positions: Option<Vec<[f64; 2]>> =
        (0..instance.n()).map(|i| instance.position(i)).collect();
    let positions = positions?;

    let (x_min, x_max) = bounds(positions.iter().map(|p| p[0]), 0.0, 1.0);
    let (y_min, y_max) = bounds(positions.iter().map(|p| p[1]), 0.0, 1.0);
    let f = Frame {
        width: 560.0,
        height: 560.0,
        left: 30.0,
        right: 30.0,
        top: 46.0,
        bottom: 30.0,
        x_min,
        x_max,
        y_min,
        y_max,
    };
    let mut out = svg_header(f.width, f.height);
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        f.width / 2.0,
        escape(title)
    ));

    for (k, route) in solution.routes().iter().enumerate() {
        if route.len() < 2 {
            continue;
        }
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = route
            .visits()
            .iter()
            .map(|&p| format!("{:.2},{:.2}", f.x(positions[p][0]), f.y(positions[p][1])))
            .collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\" stroke-opacity=\"0.75\"/>\n",
            path.join(" ")
        ));
    }

    let max_weight = instance.pois().iter().map(|p| p.weight).fold(0.0, f64::max).max(1.0);
    for poi in instance.pois() {
        let p = positions[poi.id];
        let radius = 2.0 + 4.0 * poi.weight / max_weight;
        let fill = if poi.weight > 0.0 { "#444444" } else { "#bbbbbb" };
        out.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{radius:.2}\" fill=\"{fill}\" fill-opacity=\"0.8\"/>\n",
            f.x(p[0]),
            f.y(p[1])
        ));
        let q = solution.visit_counts()[poi.id];
        if q > 1 {
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"#b30000\">{q}</text>\n",
                f.x(p[0]) + radius + 1.0,
                f.y(p[1]) - radius - 1.0
            ));
        }
    }
    out.push_str("</svg>\n");
    Some(out)
}

fn bounds(values: impl Iterator<Item = f64>, fallback_min: f64, fallback_max: f64) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if min > max {
        (fallback_min, fallback_max)
    } else if min == max {
        (min - 0.5, max + 0.5)
    } else {
        (min, max)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

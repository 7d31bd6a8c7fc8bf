//! Number formatting, CSV and SVG rendering.

use graphflow_core::morse::{Manifold, Point, Trajectory};

use crate::Error;

/// Significant digits of every printed real.
pub const DIGITS: usize = 12;

/// `x` with 12 significant digits, trailing zeros removed, switching to
/// exponent notation outside `[1e-5, 1e12)`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" { "0".into() } else { t.into() }
    } else {
        s.into()
    }
}

/// Stored coordinates of `p`: two on the torus, three on the sphere lift.
pub fn coords(m: Manifold, p: Point) -> Vec<f64> {
    p[..m.ambient_dim()].to_vec()
}

pub fn coord_header(m: Manifold) -> Vec<String> {
    (1..=m.ambient_dim()).map(|i| format!("x{i}")).collect()
}

/// CSV text with a header row.
pub fn csv_table<S: AsRef<str>>(header: &[S], rows: &[Vec<String>]) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.iter().map(AsRef::as_ref))?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Output(e.to_string()))
}

/// `t,x1,x2[,x3]` rows of a trajectory.
pub fn trajectory_csv(m: Manifold, t: &Trajectory) -> Result<String, Error> {
    let mut header = vec!["t".to_string()];
    header.extend(coord_header(m));
    let rows: Vec<Vec<String>> = t
        .samples
        .iter()
        .map(|(time, p)| {
            let mut r = vec![num(*time)];
            r.extend(coords(m, *p).into_iter().map(num));
            r
        })
        .collect();
    csv_table(&header, &rows)
}

/// Chart coordinates in `[0,1]²`: the torus square itself, longitude and
/// latitude on the sphere and its quotient.
pub fn chart(m: Manifold, p: Point) -> (f64, f64) {
    match m {
        Manifold::Torus => (p[0], p[1]),
        _ => {
            let lon = p[1].atan2(p[0]);
            let lat = p[2].clamp(-1.0, 1.0).asin();
            (
                (lon + std::f64::consts::PI) / (2.0 * std::f64::consts::PI),
                0.5 - lat / std::f64::consts::PI,
            )
        }
    }
}

const SIZE: f64 = 480.0;
const PAD: f64 = 20.0;

/// Static SVG of chart-projected paths, split where the chart wraps, with
/// optional marked points.
pub fn svg_plot(m: Manifold, paths: &[&Trajectory], marks: &[(Point, String)]) -> String {
    let px = |c: (f64, f64)| (PAD + c.0 * SIZE, PAD + c.1 * SIZE);
    let mut s = String::new();
    let full = SIZE + 2.0 * PAD;
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{full}\" height=\"{full}\" viewBox=\"0 0 {full} {full}\">\n"
    ));
    s.push_str(&format!(
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"none\" stroke=\"#888\"/>\n"
    ));
    for t in paths {
        let mut run: Vec<(f64, f64)> = Vec::new();
        let mut runs = Vec::new();
        for (_, p) in &t.samples {
            let c = chart(m, *p);
            if let Some(last) = run.last() {
                if (c.0 - last.0).abs() > 0.5 || (c.1 - last.1).abs() > 0.5 {
                    runs.push(std::mem::take(&mut run));
                }
            }
            run.push(c);
        }
        runs.push(run);
        for r in runs.iter().filter(|r| r.len() > 1) {
            let pts: Vec<String> = r
                .iter()
                .map(|&c| {
                    let (x, y) = px(c);
                    format!("{:.3},{:.3}", x, y)
                })
                .collect();
            s.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                pts.join(" ")
            ));
        }
    }
    for (p, label) in marks {
        let (x, y) = px(chart(m, *p));
        s.push_str(&format!("<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"#c0392b\"/>\n"));
        s.push_str(&format!(
            "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"11\">{label}</text>\n",
            x + 4.0,
            y - 4.0
        ));
    }
    s.push_str("</svg>\n");
    s
}

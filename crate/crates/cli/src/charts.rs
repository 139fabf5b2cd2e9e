//! Static SVG charts.

use anyhow::{anyhow, Result};
use plotters::prelude::*;

const PALETTE: [RGBColor; 8] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
    RGBColor(227, 119, 194),
    RGBColor(127, 127, 127),
];

fn color(i: usize) -> RGBColor {
    PALETTE[i % PALETTE.len()]
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    let span = (hi - lo).abs().max(1e-9);
    (lo - 0.08 * span, hi + 0.08 * span)
}

fn err<E: std::fmt::Debug>(e: E) -> anyhow::Error {
    anyhow!("chart rendering failed: {e:?}")
}

/// One polyline per case: served demand (MW) against elapsed minutes.
pub fn recovery_curves(series: &[(String, Vec<(f64, f64)>)]) -> Result<String> {
    let mut buf = String::new();
    {
        let root = SVGBackend::with_string(&mut buf, (900, 560)).into_drawing_area();
        root.fill(&WHITE).map_err(err)?;
        let xs = series.iter().flat_map(|s| s.1.iter().map(|p| p.0));
        let ys = series.iter().flat_map(|s| s.1.iter().map(|p| p.1));
        let x_hi = xs.fold(1.0f64, f64::max);
        let (y_lo, y_hi) = padded(ys.clone().fold(f64::INFINITY, f64::min), ys.fold(f64::NEG_INFINITY, f64::max));
        let mut chart = ChartBuilder::on(&root)
            .caption("Recovery curves", ("sans-serif", 22))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(70)
            .build_cartesian_2d(0.0..x_hi, y_lo..y_hi)
            .map_err(err)?;
        chart
            .configure_mesh()
            .x_desc("minutes")
            .y_desc("served demand (MW)")
            .draw()
            .map_err(err)?;
        for (i, (label, pts)) in series.iter().enumerate() {
            // Served demand holds until the next step completes.
            let mut stepped = Vec::with_capacity(pts.len() * 2);
            for w in pts.windows(2) {
                stepped.push(w[0]);
                stepped.push((w[1].0, w[0].1));
            }
            if let Some(last) = pts.last() {
                stepped.push(*last);
            }
            let c = color(i);
            chart
                .draw_series(LineSeries::new(stepped, c.stroke_width(2)))
                .map_err(err)?
                .label(label.clone())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], c.stroke_width(2)));
        }
        chart
            .configure_series_labels()
            .position(SeriesLabelPosition::LowerRight)
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(err)?;
        root.present().map_err(err)?;
    }
    Ok(buf)
}

/// Final SD of every scenario per case, with the mean as a bar.
pub fn sd_dispersion(cases: &[(String, Vec<f64>, f64)]) -> Result<String> {
    let mut buf = String::new();
    {
        let root = SVGBackend::with_string(&mut buf, (900, 560)).into_drawing_area();
        root.fill(&WHITE).map_err(err)?;
        let n = cases.len().max(1) as f64;
        let mut chart = ChartBuilder::on(&root)
            .caption("Final satisfied demand per scenario", ("sans-serif", 22))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(60)
            .build_cartesian_2d(0.0..n, 0.0..1.05)
            .map_err(err)?;
        let labels: Vec<String> = cases.iter().map(|c| c.0.clone()).collect();
        chart
            .configure_mesh()
            .x_labels(cases.len() * 2 + 1)
            .x_label_formatter(&|x| {
                let i = x.floor() as usize;
                if (x - x.floor() - 0.5).abs() < 0.01 && i < labels.len() {
                    labels[i].clone()
                } else {
                    String::new()
                }
            })
            .y_desc("SD (p.u.)")
            .disable_x_mesh()
            .draw()
            .map_err(err)?;
        for (i, (_, sds, mean)) in cases.iter().enumerate() {
            let x0 = i as f64 + 0.5;
            let count = sds.len().max(1) as f64;
            chart
                .draw_series(sds.iter().enumerate().map(|(k, sd)| {
                    let jitter = (k as f64 / count - 0.5) * 0.5;
                    Circle::new((x0 + jitter, *sd), 3, RED.mix(0.6).filled())
                }))
                .map_err(err)?;
            chart
                .draw_series(LineSeries::new(vec![(x0 - 0.35, *mean), (x0 + 0.35, *mean)], BLACK.stroke_width(3)))
                .map_err(err)?;
        }
        root.present().map_err(err)?;
    }
    Ok(buf)
}

/// The three percentage deltas shown as pairwise projections.
pub fn r3_scatter(points: &[(String, f64, f64, f64)]) -> Result<String> {
    let mut buf = String::new();
    {
        let root = SVGBackend::with_string(&mut buf, (1200, 440)).into_drawing_area();
        root.fill(&WHITE).map_err(err)?;
        let root = root
            .titled("R3 deltas against the base case (%)", ("sans-serif", 22))
            .map_err(err)?;
        let panels = root.split_evenly((1, 3));
        let axes: [(&str, &str, fn(&(String, f64, f64, f64)) -> (f64, f64)); 3] = [
            ("dEENS %", "dSD %", |p| (p.1, p.2)),
            ("dEENS %", "dENS %", |p| (p.1, p.3)),
            ("dSD %", "dENS %", |p| (p.2, p.3)),
        ];
        for (panel, (xd, yd, pick)) in panels.iter().zip(axes) {
            let pts: Vec<(f64, f64)> = points.iter().map(pick).collect();
            let (x_lo, x_hi) = padded(
                pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
                pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
            );
            let (y_lo, y_hi) = padded(
                pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
                pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
            );
            let mut chart = ChartBuilder::on(panel)
                .margin(14)
                .x_label_area_size(36)
                .y_label_area_size(50)
                .build_cartesian_2d(x_lo..x_hi, y_lo..y_hi)
                .map_err(err)?;
            chart.configure_mesh().x_desc(xd).y_desc(yd).draw().map_err(err)?;
            for (i, (p, (label, ..))) in pts.iter().zip(points).enumerate() {
                let c = color(i);
                chart
                    .draw_series(std::iter::once(Circle::new(*p, 5, c.filled())))
                    .map_err(err)?;
                chart
                    .draw_series(std::iter::once(Text::new(
                        label.clone(),
                        (p.0, p.1),
                        ("sans-serif", 12).into_font().color(&BLACK),
                    )))
                    .map_err(err)?;
            }
        }
        root.present().map_err(err)?;
    }
    Ok(buf)
}

//! Static SVG renderings of the CSV outputs.

use std::ops::Range;
use std::path::Path;

use plotters::coord::Shift;
use plotters::prelude::*;

use crate::error::{Error, Result};

/// Series longer than this are thinned to per-bucket extremes before drawing.
const MAX_POINTS: usize = 4000;
const SIZE: (u32, u32) = (900, 560);

const PALETTE: [RGBColor; 8] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(255, 127, 14),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
    RGBColor(227, 119, 194),
    RGBColor(127, 127, 127),
];

pub fn color(k: usize) -> RGBColor {
    PALETTE[k % PALETTE.len()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Solid,
    Dashed,
    Dotted,
    Points,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: Option<String>,
    pub points: Vec<(f64, f64)>,
    pub color: usize,
    pub style: Style,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, color: usize, style: Style) -> Self {
        Self { label: Some(label.into()), points, color, style }
    }

    pub fn unlabelled(points: Vec<(f64, f64)>, color: usize, style: Style) -> Self {
        Self { label: None, points, color, style }
    }

    pub fn from_xy(label: impl Into<String>, xs: &[f64], ys: &[f64], color: usize, style: Style) -> Self {
        Self::new(label, xs.iter().copied().zip(ys.iter().copied()).collect(), color, style)
    }
}

#[derive(Debug, Clone, Default)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    /// Dashed guide lines.
    pub vlines: Vec<f64>,
    pub hlines: Vec<f64>,
}

fn plot_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Plot { path: path.to_path_buf(), detail: e.to_string() }
}

/// Keeps the first, last, minimum and maximum point of each bucket so that
/// envelopes survive thinning.
fn thin(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.len() <= MAX_POINTS {
        return points.to_vec();
    }
    let bucket = points.len().div_ceil(MAX_POINTS / 4);
    let mut out = Vec::with_capacity(MAX_POINTS + 4);
    for chunk in points.chunks(bucket) {
        let lo = chunk.iter().enumerate().min_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).map(|(k, _)| k).unwrap_or(0);
        let hi = chunk.iter().enumerate().max_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).map(|(k, _)| k).unwrap_or(0);
        let mut keep = [0, lo, hi, chunk.len() - 1];
        keep.sort_unstable();
        let mut last = usize::MAX;
        for k in keep {
            if k != last {
                out.push(chunk[k]);
                last = k;
            }
        }
    }
    out
}

fn padded(lo: f64, hi: f64, log: bool) -> Range<f64> {
    if log {
        let (lo, hi) = if hi / lo < 1.0 + 1e-9 { (lo / 2.0, hi * 2.0) } else { (lo, hi) };
        lo..hi
    } else {
        let span = if hi - lo > 1e-300 { hi - lo } else { lo.abs().max(1.0) };
        (lo - 0.04 * span)..(hi + 0.04 * span)
    }
}

fn extent(values: impl Iterator<Item = f64>, log: bool) -> Option<Range<f64>> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo <= hi).then(|| padded(lo, hi, log))
}

impl LineChart {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), ..Default::default() }
    }

    pub fn render(&self, path: &Path) -> Result<()> {
        let usable = |p: &&(f64, f64)| {
            p.0.is_finite() && p.1.is_finite() && (!self.log_x || p.0 > 0.0) && (!self.log_y || p.1 > 0.0)
        };
        let series: Vec<(&Series, Vec<(f64, f64)>)> = self
            .series
            .iter()
            .map(|s| (s, thin(&s.points.iter().filter(usable).copied().collect::<Vec<_>>())))
            .collect();
        let xs = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0));
        let ys = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1)).chain(self.hlines.iter().copied());
        let x_range = extent(xs, self.log_x).unwrap_or(if self.log_x { 0.1..1.0 } else { 0.0..1.0 });
        let y_range = extent(ys, self.log_y).unwrap_or(if self.log_y { 0.1..1.0 } else { 0.0..1.0 });

        let root = SVGBackend::new(path, SIZE).into_drawing_area();
        root.fill(&WHITE).map_err(|e| plot_err(path, e))?;
        match (self.log_x, self.log_y) {
            (false, false) => self.draw(&root, path, x_range, y_range, &series),
            (true, false) => self.draw(&root, path, x_range.log_scale(), y_range, &series),
            (false, true) => self.draw(&root, path, x_range, y_range.log_scale(), &series),
            (true, true) => self.draw(&root, path, x_range.log_scale(), y_range.log_scale(), &series),
        }?;
        root.present().map_err(|e| plot_err(path, e))
    }

    fn draw<X, Y>(
        &self,
        root: &DrawingArea<SVGBackend, Shift>,
        path: &Path,
        x: X,
        y: Y,
        series: &[(&Series, Vec<(f64, f64)>)],
    ) -> Result<()>
    where
        X: plotters::coord::ranged1d::AsRangedCoord<Value = f64>,
        Y: plotters::coord::ranged1d::AsRangedCoord<Value = f64>,
        X::CoordDescType: plotters::coord::ranged1d::ValueFormatter<f64>,
        Y::CoordDescType: plotters::coord::ranged1d::ValueFormatter<f64>,
    {
        let e = |err| plot_err(path, err);
        let mut chart = ChartBuilder::on(root)
            .caption(&self.title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(42)
            .y_label_area_size(72)
            .build_cartesian_2d(x, y)
            .map_err(e)?;
        chart.configure_mesh().x_desc(&self.x_label).y_desc(&self.y_label).draw().map_err(e)?;
        let (xr, yr) = (chart.x_range(), chart.y_range());
        for &v in &self.vlines {
            chart
                .draw_series(DashedLineSeries::new(vec![(v, yr.start), (v, yr.end)], 6, 4, BLACK.mix(0.5).into()))
                .map_err(e)?;
        }
        for &h in &self.hlines {
            chart
                .draw_series(DashedLineSeries::new(vec![(xr.start, h), (xr.end, h)], 6, 4, BLACK.mix(0.5).into()))
                .map_err(e)?;
        }
        let mut labelled = false;
        for (s, pts) in series {
            let c = color(s.color);
            let style: ShapeStyle = c.stroke_width(if s.style == Style::Solid { 2 } else { 1 });
            let drawn = match s.style {
                Style::Solid => chart.draw_series(LineSeries::new(pts.iter().copied(), style)).map_err(e)?,
                Style::Dashed => {
                    chart.draw_series(DashedLineSeries::new(pts.iter().copied(), 6, 4, style)).map_err(e)?
                }
                Style::Dotted => {
                    chart.draw_series(DashedLineSeries::new(pts.iter().copied(), 2, 3, style)).map_err(e)?
                }
                Style::Points => chart.draw_series(pts.iter().map(|&p| Circle::new(p, 3, c.filled()))).map_err(e)?,
            };
            if let Some(label) = &s.label {
                labelled = true;
                drawn.label(label.as_str()).legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], c));
            }
        }
        if labelled {
            chart
                .configure_series_labels()
                .position(SeriesLabelPosition::UpperRight)
                .background_style(WHITE.mix(0.85))
                .border_style(BLACK)
                .draw()
                .map_err(e)?;
        }
        Ok(())
    }
}

/// Colour map of `value` on cells of a log-x, linear-y grid, with overlaid
/// curves. Values are coloured on a log scale; missing cells are grey.
#[derive(Debug, Clone)]
pub struct Heatmap {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major in `x`: `values[i * ys.len() + j]` belongs to `(xs[i], ys[j])`.
    pub values: Vec<Option<f64>>,
    pub overlays: Vec<Series>,
}

fn edges(c: &[f64], log: bool) -> Vec<f64> {
    let f = |v: f64| if log { v.ln() } else { v };
    let g = |v: f64| if log { v.exp() } else { v };
    let n = c.len();
    if n == 1 {
        let w = if log { 0.5 } else { 0.5 * c[0].abs().max(1.0) };
        return vec![g(f(c[0]) - w), g(f(c[0]) + w)];
    }
    let mut e = Vec::with_capacity(n + 1);
    e.push(g(f(c[0]) - 0.5 * (f(c[1]) - f(c[0]))));
    for k in 0..n - 1 {
        e.push(g(0.5 * (f(c[k]) + f(c[k + 1]))));
    }
    e.push(g(f(c[n - 1]) + 0.5 * (f(c[n - 1]) - f(c[n - 2]))));
    e
}

/// Dark blue through green to yellow.
fn ramp(t: f64) -> RGBColor {
    let stops =
        [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];
    let t = t.clamp(0.0, 1.0) * (stops.len() - 1) as f64;
    let k = (t.floor() as usize).min(stops.len() - 2);
    let u = t - k as f64;
    let (a, b) = (stops[k], stops[k + 1]);
    let mix = |p: f64, q: f64| (p + (q - p) * u).round() as u8;
    RGBColor(mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

impl Heatmap {
    pub fn render(&self, path: &Path) -> Result<()> {
        if self.xs.is_empty() || self.ys.is_empty() || self.values.len() != self.xs.len() * self.ys.len() {
            return Err(plot_err(path, "heatmap grid does not match its values"));
        }
        let e = |err| plot_err(path, err);
        let ex = edges(&self.xs, true);
        let ey = edges(&self.ys, false);
        let logs: Vec<f64> = self.values.iter().flatten().filter(|v| **v > 0.0).map(|v| v.log10()).collect();
        let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };

        let root = SVGBackend::new(path, SIZE).into_drawing_area();
        root.fill(&WHITE).map_err(e)?;
        let (main, bar) = root.split_horizontally(SIZE.0 - 110);
        let mut chart = ChartBuilder::on(&main)
            .caption(&self.title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(42)
            .y_label_area_size(60)
            .build_cartesian_2d((ex[0]..ex[ex.len() - 1]).log_scale(), ey[0]..ey[ey.len() - 1])
            .map_err(e)?;
        chart.configure_mesh().disable_mesh().x_desc(&self.x_label).y_desc(&self.y_label).draw().map_err(e)?;
        let ny = self.ys.len();
        chart
            .draw_series(self.values.iter().enumerate().map(|(k, v)| {
                let (i, j) = (k / ny, k % ny);
                let fill = match v {
                    Some(v) if *v > 0.0 => ramp((v.log10() - lo) / span),
                    _ => RGBColor(200, 200, 200),
                };
                Rectangle::new([(ex[i], ey[j]), (ex[i + 1], ey[j + 1])], fill.filled())
            }))
            .map_err(e)?;
        let (xr, yr) = (chart.x_range(), chart.y_range());
        for s in &self.overlays {
            let pts: Vec<(f64, f64)> =
                s.points.iter().copied().filter(|p| xr.contains(&p.0) && yr.contains(&p.1)).collect();
            chart.draw_series(LineSeries::new(pts, WHITE.stroke_width(2))).map_err(e)?;
        }

        if logs.is_empty() {
            return root.present().map_err(e);
        }
        let mut scale = ChartBuilder::on(&bar)
            .margin_top(44)
            .margin_bottom(54)
            .margin_right(12)
            .y_label_area_size(56)
            .build_cartesian_2d(0.0..1.0, lo..lo + span)
            .map_err(e)?;
        scale
            .configure_mesh()
            .disable_mesh()
            .disable_x_axis()
            .y_desc("log10")
            .y_label_formatter(&|v| format!("{v:.1}"))
            .draw()
            .map_err(e)?;
        let steps = 64;
        scale
            .draw_series((0..steps).map(|k| {
                let a = lo + span * k as f64 / steps as f64;
                let b = lo + span * (k + 1) as f64 / steps as f64;
                Rectangle::new([(0.0, a), (1.0, b)], ramp((k as f64 + 0.5) / steps as f64).filled())
            }))
            .map_err(e)?;
        root.present().map_err(e)
    }
}

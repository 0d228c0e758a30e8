//! Static SVG figures: series with trend overlays, and daily visit bars.
//!
//! Output depends only on the input rows, and numbers are printed with a
//! fixed precision, so identical inputs give identical bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use chrono::{DateTime, NaiveDate, Utc};
use phenotrap_core::series::{days_between, eval_poly, SeriesRow, TrendRow};
use phenotrap_core::visits::DailyCount;

pub const TREND_SAMPLES: usize = 200;

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 260.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 32.0;
const BOTTOM: f64 = 44.0;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[derive(Debug, Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl IntoIterator<Item = f64>, fallback: (f64, f64)) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.into_iter().filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo > hi {
            return Range { lo: fallback.0, hi: fallback.1 };
        }
        if lo == hi {
            return Range { lo: lo - 0.5, hi: hi + 0.5 };
        }
        Range { lo, hi }
    }

    fn padded(self, fraction: f64) -> Self {
        let pad = (self.hi - self.lo) * fraction;
        Range { lo: self.lo - pad, hi: self.hi + pad }
    }

    fn ticks(self) -> impl Iterator<Item = f64> {
        (0..TICKS).map(move |i| self.lo + (self.hi - self.lo) * i as f64 / (TICKS - 1) as f64)
    }
}

/// Data-to-pixel mapping for one panel.
struct Panel {
    top: f64,
    x: Range,
    y: Range,
}

impl Panel {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.lo) / (self.x.hi - self.x.lo) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let h = PANEL_HEIGHT - TOP - BOTTOM;
        self.top + TOP + h - (y - self.y.lo) / (self.y.hi - self.y.lo) * h
    }

    fn axes(&self, svg: &mut String, title: &str, x_label: &str, y_label: &str) {
        let (x0, x1) = (LEFT, WIDTH - RIGHT);
        let (y0, y1) = (self.top + PANEL_HEIGHT - BOTTOM, self.top + TOP);
        let _ = writeln!(svg, r#"<g class="axes">"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            self.top + 20.0,
            escape(title)
        );
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="black" points="{x0:.2},{y1:.2} {x0:.2},{y0:.2} {x1:.2},{y0:.2}"/>"#
        );
        for t in self.x.ticks() {
            let x = self.px(t);
            let _ = writeln!(
                svg,
                r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" font-size="10" text-anchor="middle">{t:.1}</text>"#,
                y0 + 4.0,
                y0 + 16.0
            );
        }
        for t in self.y.ticks() {
            let y = self.py(t);
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{t:.2}</text>"#,
                x0 - 4.0,
                x0 - 6.0,
                y + 3.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            y0 + 34.0,
            escape(x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="14" y="{:.2}" font-size="11" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(y_label)
        );
        let _ = writeln!(svg, "</g>");
    }
}

fn document(panels: usize, body: &str) -> String {
    let height = PANEL_HEIGHT * panels.max(1) as f64;
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {WIDTH:.0} {height:.0}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

fn polyline(points: &[(f64, f64)], class: &str, stroke: &str) -> String {
    let coords: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    format!(
        "<polyline class=\"{class}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        coords.join(" ")
    )
}

/// `n` evenly spaced samples of the trend over its fitted span, in days
/// since the trend's own `t0`.
pub fn sample_trend(trend: &TrendRow, n: usize) -> Vec<(f64, f64)> {
    let (a, b) = (trend.t_start_days, trend.t_end_days);
    (0..n)
        .map(|i| {
            let t = if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
            (t, eval_poly(&trend.coefficients, t))
        })
        .collect()
}

/// One panel per `(camera_id, metric)` present in either input. Series
/// points are joined in time order; outliers are circled; the trend is
/// drawn from [`TREND_SAMPLES`] samples.
pub fn series_svg(series: &[SeriesRow], trends: &[TrendRow]) -> String {
    let mut keys: BTreeSet<(&str, &str)> = BTreeSet::new();
    keys.extend(series.iter().map(|r| (r.camera_id.as_str(), r.metric.as_str())));
    keys.extend(trends.iter().map(|r| (r.camera_id.as_str(), r.metric.as_str())));

    let mut body = String::new();
    if keys.is_empty() {
        let panel = Panel { top: 0.0, x: Range { lo: 0.0, hi: 1.0 }, y: Range { lo: 0.0, hi: 1.0 } };
        panel.axes(&mut body, "no data", "days", "value");
        return document(1, &body);
    }

    for (k, (camera, metric)) in keys.iter().enumerate() {
        let mut rows: Vec<&SeriesRow> =
            series.iter().filter(|r| r.camera_id == *camera && r.metric == *metric).collect();
        rows.sort_by_key(|r| r.timestamp);
        let trend = trends.iter().find(|t| t.camera_id == *camera && t.metric == *metric);

        let t0: DateTime<Utc> = trend.map(|t| t.t0).or(rows.first().map(|r| r.timestamp)).unwrap_or_default();
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (days_between(t0, r.timestamp), r.value)).collect();
        let curve: Vec<(f64, f64)> = trend.map(|t| sample_trend(t, TREND_SAMPLES)).unwrap_or_default();

        let x = Range::of(pts.iter().chain(&curve).map(|p| p.0), (0.0, 1.0));
        let y = Range::of(pts.iter().chain(&curve).map(|p| p.1), (0.0, 1.0)).padded(0.05);
        let panel = Panel { top: k as f64 * PANEL_HEIGHT, x, y };
        let title = match trend {
            Some(t) => format!("{camera} / {metric} (degree {}, R² = {:.3})", t.degree, t.r_squared),
            None => format!("{camera} / {metric}"),
        };
        panel.axes(&mut body, &title, &format!("days since {}", t0.format("%Y-%m-%d")), metric);

        let mapped: Vec<(f64, f64)> = pts.iter().map(|&(a, b)| (panel.px(a), panel.py(b))).collect();
        if !mapped.is_empty() {
            body.push_str(&polyline(&mapped, "series", "#4d4d4d"));
        }
        for (row, (px, py)) in rows.iter().zip(&mapped) {
            if row.inlier == Some(false) {
                let _ = writeln!(
                    body,
                    r##"<circle class="outlier" cx="{px:.2}" cy="{py:.2}" r="3" fill="none" stroke="#d62728"/>"##
                );
            }
        }
        if !curve.is_empty() {
            let mapped: Vec<(f64, f64)> = curve.iter().map(|&(a, b)| (panel.px(a), panel.py(b))).collect();
            body.push_str(&polyline(&mapped, "trend", "#1f77b4"));
        }
    }
    document(keys.len(), &body)
}

/// One panel per camera with a bar per day, stacked by species.
pub fn visits_svg(daily: &[DailyCount]) -> String {
    let cameras: BTreeSet<&str> = daily.iter().map(|d| d.camera_id.as_str()).collect();
    let species: Vec<&str> = daily
        .iter()
        .map(|d| d.species.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut body = String::new();
    if cameras.is_empty() {
        let panel = Panel { top: 0.0, x: Range { lo: 0.0, hi: 1.0 }, y: Range { lo: 0.0, hi: 1.0 } };
        panel.axes(&mut body, "no visits", "days", "visits");
        return document(1, &body);
    }

    for (k, camera) in cameras.iter().enumerate() {
        let mut per_day: BTreeMap<NaiveDate, BTreeMap<&str, usize>> = BTreeMap::new();
        for d in daily.iter().filter(|d| d.camera_id == *camera) {
            *per_day.entry(d.date).or_default().entry(d.species.as_str()).or_default() += d.visits;
        }
        let first = *per_day.keys().next().expect("camera has rows");
        let day = |d: NaiveDate| (d - first).num_days() as f64;
        let last = day(*per_day.keys().next_back().expect("camera has rows"));
        let max_total = per_day.values().map(|m| m.values().sum::<usize>()).max().unwrap_or(0);

        let panel = Panel {
            top: k as f64 * PANEL_HEIGHT,
            x: Range { lo: -0.5, hi: last + 0.5 },
            y: Range { lo: 0.0, hi: (max_total as f64).max(1.0) * 1.05 },
        };
        panel.axes(&mut body, &format!("{camera} / daily visits"), &format!("days since {first}"), "visits");

        let bar = ((panel.px(1.0) - panel.px(0.0)) * 0.8).max(1.0);
        for (date, counts) in &per_day {
            let x = panel.px(day(*date)) - bar / 2.0;
            let mut base = 0usize;
            for (s, n) in counts {
                let colour = PALETTE[species.iter().position(|x| x == s).unwrap_or(0) % PALETTE.len()];
                let (y_top, y_bottom) = (panel.py((base + n) as f64), panel.py(base as f64));
                let _ = writeln!(
                    body,
                    r#"<rect class="bar" x="{x:.2}" y="{y_top:.2}" width="{bar:.2}" height="{:.2}" fill="{colour}"><title>{date} {}: {n}</title></rect>"#,
                    y_bottom - y_top,
                    escape(s)
                );
                base += n;
            }
        }
        for (i, s) in species.iter().enumerate() {
            let y = panel.top + TOP + 12.0 * i as f64;
            let _ = writeln!(
                body,
                r#"<rect x="{:.2}" y="{:.2}" width="8" height="8" fill="{}"/><text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
                WIDTH - RIGHT - 8.0,
                y,
                PALETTE[i % PALETTE.len()],
                WIDTH - RIGHT - 12.0,
                y + 8.0,
                escape(s)
            );
        }
    }
    document(cameras.len(), &body)
}

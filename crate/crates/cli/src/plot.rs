//! SVG charts for the CSV outputs: bar panels for bench runs, line charts
//! for sweeps and rank statistics. Output is plain standalone SVG with no
//! rendering dependencies, byte-identical for identical input.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

const BENCH_HEADER: &str =
    "trial,solver,te_total,skill_perceived,skill_true,uncertainty,cost,social,evaluations,wall_time_us,rank";
const SWEEP_HEADER: &str = "k,solver,metric,mean,std,ci95,n";
const RANKS_HEADER: &str = "n,k,p_rank1,p_rank2_or_better,p_full_scan,mean_evaluations,n_shuffles";

const SERIES_COLORS: [&str; 4] = ["#4878d0", "#ee854a", "#6acc64", "#d65f5f"];

pub fn cmd_plot(input: &Path, output: &Path, metric: &str) -> Result<()> {
    let text =
        fs::read_to_string(input).with_context(|| format!("cannot read {}", input.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().unwrap_or("").trim().to_string();
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(|f| f.trim().to_string()).collect())
        .collect();
    if rows.is_empty() {
        bail!("no data rows in {}", input.display());
    }

    let svg = match header.as_str() {
        BENCH_HEADER => render_bench(&rows),
        SWEEP_HEADER => render_sweep(&rows, metric)?,
        RANKS_HEADER => render_ranks(&rows),
        other => bail!(
            "unrecognized CSV schema {other:?}; expected one of:\n  {BENCH_HEADER}\n  {SWEEP_HEADER}\n  {RANKS_HEADER}"
        ),
    };
    fs::write(output, svg).with_context(|| format!("cannot write {}", output.display()))?;
    println!("wrote {}", output.display());
    Ok(())
}

fn parse_f64(field: &str) -> f64 {
    field.parse().unwrap_or(f64::NAN)
}

struct Canvas {
    out: String,
}

impl Canvas {
    fn new(width: f64, height: f64) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
        );
        let _ = writeln!(
            out,
            r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#
        );
        Canvas { out }
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(
            self.out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.out,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width:.2}"/>"#
        );
    }

    fn polyline(&mut self, points: &[(f64, f64)], stroke: &str) {
        let coords: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        let _ = writeln!(
            self.out,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.8"/>"#,
            coords.join(" ")
        );
    }

    fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let _ = writeln!(
            self.out,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{fill}"/>"#
        );
    }

    fn text(&mut self, x: f64, y: f64, content: &str, size: f64, anchor: &str) {
        let escaped = content
            .replace('&', "&amp;")
            .replace('<', "&lt;")
            .replace('>', "&gt;");
        let _ = writeln!(
            self.out,
            r##"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="{size:.0}" text-anchor="{anchor}" fill="#222222">{escaped}</text>"##
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1000.0 {
        format!("{v:.0}")
    } else if v.abs() >= 10.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

/// Maps a value range onto a pixel range (y axes invert).
struct Scale {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        if self.hi == self.lo {
            return (self.px_lo + self.px_hi) / 2.0;
        }
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

fn value_bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let lo = lo.min(0.0);
    let hi = hi.max(0.0);
    let pad = 0.08 * (hi - lo).max(1e-9);
    (lo - if lo < 0.0 { pad } else { 0.0 }, hi + pad)
}

/// Mean per (solver, column) over the bench rows, as six bar panels:
/// overall efficiency, perceived skill, uncertainty, cost, social
/// relationship, and running time; one bar per solver in each panel.
fn render_bench(rows: &[Vec<String>]) -> String {
    let panels = [
        ("te_total", 2),
        ("skill_perceived", 3),
        ("uncertainty", 5),
        ("cost", 6),
        ("social", 7),
        ("wall_time_us", 9),
    ];
    // Solvers in order of first appearance.
    let mut solvers: Vec<String> = Vec::new();
    for row in rows {
        if !solvers.contains(&row[1]) {
            solvers.push(row[1].clone());
        }
    }
    let mean_of = |solver: &str, column: usize| {
        let values: Vec<f64> = rows
            .iter()
            .filter(|r| r[1] == solver)
            .map(|r| parse_f64(&r[column]))
            .collect();
        values.iter().sum::<f64>() / values.len().max(1) as f64
    };

    let (panel_w, panel_h, margin, gap) = (240.0, 220.0, 48.0, 28.0);
    let width = margin * 2.0 + panel_w * 3.0 + gap * 2.0;
    let height = margin * 2.0 + panel_h * 2.0 + gap + 30.0;
    let mut canvas = Canvas::new(width, height);

    for (s, solver) in solvers.iter().enumerate() {
        let x = margin + s as f64 * 150.0;
        canvas.rect(x, 16.0, 12.0, 12.0, SERIES_COLORS[s % SERIES_COLORS.len()]);
        canvas.text(x + 18.0, 26.0, solver, 13.0, "start");
    }

    for (index, (title, column)) in panels.iter().enumerate() {
        let px = margin + (index % 3) as f64 * (panel_w + gap);
        let py = margin + 10.0 + (index / 3) as f64 * (panel_h + gap);
        let means: Vec<f64> = solvers.iter().map(|s| mean_of(s, *column)).collect();
        let (lo, hi) = value_bounds(means.iter().copied());
        let scale = Scale {
            lo,
            hi,
            px_lo: py + panel_h - 24.0,
            px_hi: py + 18.0,
        };

        canvas.text(px + panel_w / 2.0, py + 8.0, title, 13.0, "middle");
        // Axes and horizontal grid with value labels.
        for t in 0..=4 {
            let v = lo + (hi - lo) * t as f64 / 4.0;
            let y = scale.map(v);
            canvas.line(px + 40.0, y, px + panel_w - 6.0, y, "#dddddd", 0.8);
            canvas.text(px + 36.0, y + 4.0, &fmt_tick(v), 10.0, "end");
        }
        canvas.line(
            px + 40.0,
            py + 18.0,
            px + 40.0,
            py + panel_h - 24.0,
            "#444444",
            1.0,
        );
        let baseline = scale.map(0.0);
        canvas.line(
            px + 40.0,
            baseline,
            px + panel_w - 6.0,
            baseline,
            "#444444",
            1.0,
        );

        let slot = (panel_w - 56.0) / means.len() as f64;
        for (s, (solver, mean)) in solvers.iter().zip(&means).enumerate() {
            let bar_w = slot * 0.56;
            let bx = px + 48.0 + s as f64 * slot + (slot - bar_w) / 2.0;
            let by = scale.map(*mean);
            let (top, h) = if by <= baseline {
                (by, baseline - by)
            } else {
                (baseline, by - baseline)
            };
            canvas.rect(bx, top, bar_w, h, SERIES_COLORS[s % SERIES_COLORS.len()]);
            canvas.text(
                bx + bar_w / 2.0,
                top - 4.0,
                &fmt_tick(*mean),
                10.0,
                "middle",
            );
            canvas.text(
                bx + bar_w / 2.0,
                py + panel_h - 10.0,
                solver,
                10.0,
                "middle",
            );
        }
    }
    canvas.finish()
}

struct LineSeries {
    label: String,
    points: Vec<(f64, f64)>,
    whiskers: Vec<(f64, f64, f64)>,
}

/// Shared line-chart renderer: x axis, y axis, one polyline per series.
fn render_lines(series: &[LineSeries], x_label: &str, y_label: &str) -> String {
    let (width, height, margin) = (640.0, 420.0, 64.0);
    let mut canvas = Canvas::new(width, height);

    let (x_lo, x_hi) = value_bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let all_y = series.iter().flat_map(|s| {
        s.points
            .iter()
            .map(|p| p.1)
            .chain(s.whiskers.iter().flat_map(|w| [w.1, w.2]))
    });
    let (y_lo, y_hi) = value_bounds(all_y);
    let x_scale = Scale {
        lo: x_lo,
        hi: x_hi,
        px_lo: margin,
        px_hi: width - 24.0,
    };
    let y_scale = Scale {
        lo: y_lo,
        hi: y_hi,
        px_lo: height - margin,
        px_hi: 30.0,
    };

    for t in 0..=5 {
        let v = y_lo + (y_hi - y_lo) * t as f64 / 5.0;
        let y = y_scale.map(v);
        canvas.line(margin, y, width - 24.0, y, "#dddddd", 0.8);
        canvas.text(margin - 6.0, y + 4.0, &fmt_tick(v), 11.0, "end");
    }
    for t in 0..=5 {
        let v = x_lo + (x_hi - x_lo) * t as f64 / 5.0;
        let x = x_scale.map(v);
        canvas.line(x, height - margin, x, height - margin + 5.0, "#444444", 1.0);
        canvas.text(x, height - margin + 18.0, &fmt_tick(v), 11.0, "middle");
    }
    canvas.line(margin, 30.0, margin, height - margin, "#444444", 1.2);
    canvas.line(
        margin,
        height - margin,
        width - 24.0,
        height - margin,
        "#444444",
        1.2,
    );
    canvas.text(width / 2.0, height - 18.0, x_label, 13.0, "middle");
    canvas.text(14.0, 20.0, y_label, 13.0, "start");

    for (index, s) in series.iter().enumerate() {
        let color = SERIES_COLORS[index % SERIES_COLORS.len()];
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .map(|(x, y)| (x_scale.map(*x), y_scale.map(*y)))
            .collect();
        for &(x, lo, hi) in &s.whiskers {
            let px = x_scale.map(x);
            canvas.line(px, y_scale.map(lo), px, y_scale.map(hi), color, 1.0);
        }
        canvas.polyline(&pts, color);
        for &(x, y) in &pts {
            canvas.circle(x, y, 2.6, color);
        }
        let lx = margin + 16.0 + index as f64 * 170.0;
        canvas.rect(lx, 36.0, 12.0, 12.0, color);
        canvas.text(lx + 18.0, 46.0, &s.label, 12.0, "start");
    }
    canvas.finish()
}

/// One line per solver: the chosen metric's mean (with 95% CI whiskers)
/// against the exploration length.
fn render_sweep(rows: &[Vec<String>], metric: &str) -> Result<String> {
    let filtered: Vec<&Vec<String>> = rows.iter().filter(|r| r[2] == metric).collect();
    if filtered.is_empty() {
        let mut available: Vec<String> = rows.iter().map(|r| r[2].clone()).collect();
        available.sort();
        available.dedup();
        bail!("metric {metric:?} not present in sweep CSV; available: {available:?}");
    }
    let mut solvers: Vec<String> = Vec::new();
    for row in &filtered {
        if !solvers.contains(&row[1]) {
            solvers.push(row[1].clone());
        }
    }
    let series: Vec<LineSeries> = solvers
        .iter()
        .map(|solver| {
            let mut points = Vec::new();
            let mut whiskers = Vec::new();
            for row in filtered.iter().filter(|r| &r[1] == solver) {
                let k = parse_f64(&row[0]);
                let mean = parse_f64(&row[3]);
                let ci = parse_f64(&row[5]);
                points.push((k, mean));
                whiskers.push((k, mean - ci, mean + ci));
            }
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            whiskers.sort_by(|a, b| a.0.total_cmp(&b.0));
            LineSeries {
                label: solver.clone(),
                points,
                whiskers,
            }
        })
        .collect();
    Ok(render_lines(&series, "k", metric))
}

/// The three secretary probabilities against the exploration length.
fn render_ranks(rows: &[Vec<String>]) -> String {
    let columns = [
        ("p_rank1", 2usize),
        ("p_rank2_or_better", 3),
        ("p_full_scan", 4),
    ];
    let series: Vec<LineSeries> = columns
        .iter()
        .map(|(label, column)| {
            let mut points: Vec<(f64, f64)> = rows
                .iter()
                .map(|r| (parse_f64(&r[1]), parse_f64(&r[*column])))
                .collect();
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            LineSeries {
                label: label.to_string(),
                points,
                whiskers: Vec::new(),
            }
        })
        .collect();
    render_lines(&series, "k", "probability")
}

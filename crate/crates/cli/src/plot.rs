//! SVG diagnostics comparing observed and imputed values.
//!
//! Observed points and curves are drawn in blue, imputed ones in magenta.
//! Output is a pure function of the inputs and the seed.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use mixreduce_core::{rng, Error, Result};
use rand::seq::index;
use rand::Rng;

use crate::kde::{kde, DensityCurve};

pub const OBSERVED_COLOR: &str = "blue";
pub const IMPUTED_COLOR: &str = "magenta";
/// Points per band beyond which a seeded subsample is drawn.
pub const MAX_POINTS_PER_BAND: usize = 100_000;

const WIDTH: f64 = 800.0;
const LEFT: f64 = 150.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 50.0;
const BAND: f64 = 60.0;

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Observed and imputed values of one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct StripSeries {
    pub name: String,
    pub observed: Vec<f64>,
    pub imputed: Vec<f64>,
}

fn subsample<R: Rng>(values: &[f64], keep: usize, rng: &mut R) -> Vec<f64> {
    if keep >= values.len() {
        return values.to_vec();
    }
    let mut idx = index::sample(rng, values.len(), keep).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| values[i]).collect()
}

fn legend(svg: &mut String, x: f64, y: f64, with_imputed: bool, note: Option<&str>) {
    let _ = writeln!(
        svg,
        r#"<rect x="{x:.2}" y="{:.2}" width="10" height="10" fill="{OBSERVED_COLOR}"/><text x="{:.2}" y="{y:.2}" font-size="12">observed</text>"#,
        y - 9.0,
        x + 14.0
    );
    if with_imputed {
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{IMPUTED_COLOR}"/><text x="{:.2}" y="{y:.2}" font-size="12">imputed</text>"#,
            x + 90.0,
            y - 9.0,
            x + 104.0
        );
    }
    if let Some(note) = note {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{y:.2}" font-size="12">{}</text>"#,
            x + 180.0,
            escape(note)
        );
    }
}

/// One horizontal band per variable, each scaled to its own value range,
/// with vertically jittered points.
pub fn render_stripplot(series: &[StripSeries], seed: u64) -> Result<String> {
    if series.is_empty() {
        return Err(Error::InvalidArgument("a strip plot needs at least one variable".into()));
    }
    let height = TOP + BAND * series.len() as f64 + BOTTOM;
    let plot_w = WIDTH - LEFT - RIGHT;
    let any_imputed = series.iter().any(|s| !s.imputed.is_empty());
    let mut sampled = false;

    let mut body = String::new();
    for (b, s) in series.iter().enumerate() {
        let mut rng = rng::child_rng(seed, &[b as u64]);
        let total = s.observed.len() + s.imputed.len();
        let (observed, imputed) = if total > MAX_POINTS_PER_BAND {
            sampled = true;
            let keep_obs = s.observed.len() * MAX_POINTS_PER_BAND / total;
            let keep_imp = MAX_POINTS_PER_BAND - keep_obs;
            (
                subsample(&s.observed, keep_obs, &mut rng),
                subsample(&s.imputed, keep_imp, &mut rng),
            )
        } else {
            (s.observed.clone(), s.imputed.clone())
        };
        let (min, max) = observed
            .iter()
            .chain(&imputed)
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, c), &v| (a.min(v), c.max(v)));
        let (min, max) = if min.is_finite() { (min, max) } else { (0.0, 1.0) };
        let span = if max > min { max - min } else { 1.0 };
        let y0 = TOP + BAND * b as f64;
        let mid = y0 + BAND / 2.0;
        let _ = writeln!(
            body,
            r##"<g class="band"><line x1="{LEFT:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999999"/><text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{}</text><text x="{LEFT:.2}" y="{:.2}" font-size="9">{}</text><text x="{:.2}" y="{:.2}" font-size="9" text-anchor="end">{}</text></g>"##,
            y0 + BAND,
            LEFT + plot_w,
            y0 + BAND,
            LEFT - 8.0,
            mid + 4.0,
            escape(&s.name),
            y0 + BAND - 2.0,
            tick(min),
            LEFT + plot_w,
            y0 + BAND - 2.0,
            tick(max),
        );
        for (values, color, class) in [
            (&observed, OBSERVED_COLOR, "observed"),
            (&imputed, IMPUTED_COLOR, "imputed"),
        ] {
            for &v in values.iter() {
                let x = LEFT + (v - min) / span * plot_w;
                let y = mid + rng.random_range(-0.3..0.3) * BAND;
                let _ = writeln!(
                    body,
                    r#"<circle class="{class}" cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}" fill-opacity="0.6"/>"#
                );
            }
        }
    }

    let mut svg = header(WIDTH, height);
    legend(
        &mut svg,
        LEFT,
        TOP - 25.0,
        any_imputed,
        sampled.then_some("bands subsampled to 100000 points"),
    );
    svg.push_str(&body);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">value (scaled to each variable's range)</text>"#,
        LEFT + plot_w / 2.0,
        height - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.2}" font-size="12" transform="rotate(-90 15 {:.2})" text-anchor="middle">variable</text>"#,
        height / 2.0,
        height / 2.0
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn header(width: f64, height: f64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.3e}")
    } else {
        format!("{v:.3}")
    }
}

/// KDE of both series; shared by the renderer and its tests.
pub fn density_curves(observed: &[f64], imputed: &[f64]) -> Result<(DensityCurve, DensityCurve)> {
    Ok((kde(observed, None)?, kde(imputed, None)?))
}

/// Two density curves on shared axes.
pub fn render_density(name: &str, observed: &[f64], imputed: &[f64]) -> Result<String> {
    let (obs, imp) = density_curves(observed, imputed)?;
    let height = 420.0;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = height - TOP - BOTTOM;
    let x_min = obs.grid[0].min(imp.grid[0]);
    let x_max = obs.grid[obs.grid.len() - 1].max(imp.grid[imp.grid.len() - 1]);
    let y_max = obs
        .density
        .iter()
        .chain(&imp.density)
        .fold(0.0f64, |a, &d| a.max(d));
    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| TOP + plot_h - y / y_max * plot_h;

    let mut svg = header(WIDTH, height);
    legend(&mut svg, LEFT, TOP - 25.0, true, None);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="20" font-size="14" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(name)
    );
    let _ = writeln!(
        svg,
        r##"<g class="axes" stroke="#333333"><line x1="{LEFT:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/><line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}"/></g>"##,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h,
        TOP + plot_h
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = x_min + f * (x_max - x_min);
        let yv = f * y_max;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text><text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
            sx(xv),
            TOP + plot_h + 15.0,
            tick(xv),
            LEFT - 5.0,
            sy(yv) + 3.0,
            tick(yv)
        );
    }
    for (curve, color, class) in [(&obs, OBSERVED_COLOR, "observed"), (&imp, IMPUTED_COLOR, "imputed")] {
        let points: Vec<String> = curve
            .grid
            .iter()
            .zip(&curve.density)
            .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="{class}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">value</text>"#,
        LEFT + plot_w / 2.0,
        height - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.2}" font-size="12" transform="rotate(-90 15 {:.2})" text-anchor="middle">density</text>"#,
        height / 2.0,
        height / 2.0
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_svg(svg: &str, path: &Path) -> Result<()> {
    fs::write(path, svg).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(obs: &[f64], imp: &[f64]) -> StripSeries {
        StripSeries {
            name: "x <1>".into(),
            observed: obs.to_vec(),
            imputed: imp.to_vec(),
        }
    }

    #[test]
    fn stripplot_glyph_count() {
        let svg = render_stripplot(&[series(&[1.0, 2.0, 3.0], &[2.5])], 1).unwrap();
        assert_eq!(svg.matches("<circle").count(), 4);
        assert_eq!(svg.matches(r#"class="imputed""#).count(), 1);
        assert!(svg.contains(">imputed</text>"));
        assert!(svg.contains("x &lt;1&gt;"));
    }

    #[test]
    fn stripplot_without_imputed_omits_legend_entry() {
        let svg = render_stripplot(&[series(&[1.0, 2.0], &[])], 1).unwrap();
        assert!(!svg.contains(">imputed</text>"));
        assert!(svg.contains(">observed</text>"));
    }

    #[test]
    fn stripplot_deterministic() {
        let s = [series(&[1.0, 2.0, 3.0], &[2.5]), series(&[5.0, 9.0], &[7.0, 8.0])];
        assert_eq!(render_stripplot(&s, 9).unwrap(), render_stripplot(&s, 9).unwrap());
        assert_ne!(render_stripplot(&s, 9).unwrap(), render_stripplot(&s, 10).unwrap());
    }

    #[test]
    fn stripplot_subsamples_large_bands() {
        let obs: Vec<f64> = (0..MAX_POINTS_PER_BAND + 10).map(|i| i as f64).collect();
        let svg = render_stripplot(&[series(&obs, &[1.0; 10])], 1).unwrap();
        assert_eq!(svg.matches("<circle").count(), MAX_POINTS_PER_BAND);
        assert!(svg.contains("subsampled"));
    }

    #[test]
    fn identical_series_give_identical_curves() {
        let v = [1.0, 2.0, 2.5, 4.0, 7.0];
        let (a, b) = density_curves(&v, &v).unwrap();
        for (x, y) in a.density.iter().zip(&b.density) {
            assert!((x - y).abs() < 1e-12);
        }
        let svg = render_density("v", &v, &v).unwrap();
        let polylines: Vec<&str> = svg
            .lines()
            .filter(|l| l.starts_with("<polyline"))
            .map(|l| l.split("points=").nth(1).unwrap())
            .collect();
        assert_eq!(polylines[0], polylines[1]);
    }

    #[test]
    fn disjoint_supports_separate_modes() {
        let (a, b) = density_curves(&[0.0, 0.5, 1.0, 0.7], &[10.0, 10.5, 11.0, 10.2]).unwrap();
        assert!(a.mode() < b.mode());
        assert!(a.mode() < 2.0 && b.mode() > 9.0);
    }

    #[test]
    fn density_deterministic_and_rejects_degenerate() {
        let v = [1.0, 2.0, 4.0];
        assert_eq!(render_density("v", &v, &v).unwrap(), render_density("v", &v, &v).unwrap());
        assert!(render_density("v", &v, &[3.0]).is_err());
    }
}

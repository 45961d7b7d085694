//! CSV and SVG output for experiment curves.

use std::fmt::Write as _;
use std::path::Path;

use sensim_core::experiments::CurvePoint;
use sensim_core::EstimatorSpec;

use crate::CliError;

/// Writes `n,estimator,error_mean,error_ci_half_width,samples,seed` plus one
/// row per point, in the order the experiment produced them (ascending n,
/// mean before median). Floats use the shortest round-trip representation.
pub fn write_curves_csv(points: &[CurvePoint], seed: u64, path: &Path) -> std::io::Result<()> {
    let mut out = String::from("n,estimator,error_mean,error_ci_half_width,samples,seed\n");
    for point in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            point.n,
            point.estimator.label(),
            point.error.mean,
            point.error.half_width_95,
            point.error.samples,
            seed
        );
    }
    std::fs::write(path, out)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;

fn series_color(estimator: EstimatorSpec) -> &'static str {
    match estimator {
        EstimatorSpec::Mean => "red",
        EstimatorSpec::Median => "blue",
        EstimatorSpec::Trimmed { .. } => "green",
    }
}

/// Renders one SVG with a polyline per estimator: error on the ordinate
/// against the report count, median in blue and mean in red. Output bytes are
/// deterministic for a given input.
pub fn render_curves_svg(points: &[CurvePoint]) -> Result<String, CliError> {
    if points.is_empty() {
        return Err(CliError::Usage("cannot render an empty curve set".into()));
    }

    let n_min = points.iter().map(|p| p.n).min().expect("nonempty") as f64;
    let n_max = points.iter().map(|p| p.n).max().expect("nonempty") as f64;
    let y_max = points
        .iter()
        .map(|p| p.error.mean)
        .fold(0.0_f64, f64::max)
        .max(1e-12);

    let x_span = (n_max - n_min).max(1.0);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_x = |n: f64| MARGIN_LEFT + (n - n_min) / x_span * plot_w;
    let to_y = |e: f64| MARGIN_TOP + plot_h - (e / y_max) * plot_h;

    // Group points into one series per estimator, preserving n order.
    let mut series: Vec<(EstimatorSpec, Vec<&CurvePoint>)> = Vec::new();
    for point in points {
        match series.iter_mut().find(|(est, _)| *est == point.estimator) {
            Some((_, list)) => list.push(point),
            None => series.push((point.estimator, vec![point])),
        }
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"  <rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    // Axes.
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    let _ = writeln!(
        svg,
        r#"  <line x1="{x0:.2}" y1="{y0:.2}" x2="{:.2}" y2="{y0:.2}" stroke="black"/>"#,
        MARGIN_LEFT + plot_w
    );
    let _ = writeln!(
        svg,
        r#"  <line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{MARGIN_TOP:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"  <text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">reports n</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"  <text x="16" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 16 {:.2})">estimation error</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    // Tick labels: one per distinct n, four on the error axis.
    let mut seen = Vec::new();
    for point in points {
        if !seen.contains(&point.n) {
            seen.push(point.n);
            let _ = writeln!(
                svg,
                r#"  <text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
                to_x(point.n as f64),
                y0 + 18.0,
                point.n
            );
        }
    }
    for i in 0..=4 {
        let value = y_max * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"  <text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{value:.4}</text>"#,
            x0 - 6.0,
            to_y(value) + 4.0
        );
    }

    for (estimator, list) in &series {
        let mut coords = String::new();
        for point in list {
            let _ = write!(
                coords,
                "{:.2},{:.2} ",
                to_x(point.n as f64),
                to_y(point.error.mean)
            );
        }
        let _ = writeln!(
            svg,
            r#"  <polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
            series_color(*estimator),
            coords.trim_end()
        );
    }

    // Legend.
    for (i, (estimator, _)) in series.iter().enumerate() {
        let y = MARGIN_TOP + 16.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"  <line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="2"/>"#,
            MARGIN_LEFT + plot_w - 120.0,
            MARGIN_LEFT + plot_w - 90.0,
            series_color(*estimator)
        );
        let _ = writeln!(
            svg,
            r#"  <text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
            MARGIN_LEFT + plot_w - 84.0,
            y + 4.0,
            estimator.label()
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sensim_core::CostEstimate;

    fn point(n: usize, estimator: EstimatorSpec, mean: f64) -> CurvePoint {
        CurvePoint {
            n,
            estimator,
            error: CostEstimate {
                mean,
                half_width_95: mean / 100.0,
                samples: 1000,
            },
        }
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let dir = std::env::temp_dir().join("sensim-output-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("curves.csv");
        let points = [
            point(11, EstimatorSpec::Mean, 0.25),
            point(11, EstimatorSpec::Median, 0.31),
        ];
        write_curves_csv(&points, 7, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            "n,estimator,error_mean,error_ci_half_width,samples,seed"
        );
        assert!(lines[1].starts_with("11,mean,0.25,"));
        assert!(lines[2].starts_with("11,median,0.31,"));
        assert!(lines[1].ends_with(",1000,7"));
    }

    #[test]
    fn csv_of_no_points_is_header_only() {
        let dir = std::env::temp_dir().join("sensim-output-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("empty.csv");
        write_curves_csv(&[], 0, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn csv_floats_round_trip() {
        let dir = std::env::temp_dir().join("sensim-output-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.csv");
        let mean = 0.1234567890123456;
        write_curves_csv(&[point(3, EstimatorSpec::Median, mean)], 1, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let row = text.lines().nth(1).unwrap();
        let parsed: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(parsed, mean);
    }

    #[test]
    fn svg_colors_follow_the_convention() {
        let points = [
            point(11, EstimatorSpec::Mean, 0.25),
            point(11, EstimatorSpec::Median, 0.31),
        ];
        let svg = render_curves_svg(&points).unwrap();
        assert!(svg.contains(r#"stroke="blue""#));
        assert!(svg.contains(r#"stroke="red""#));
        assert!(svg.matches("<polyline").count() == 2);
    }

    #[test]
    fn svg_is_deterministic_and_accepts_a_single_point() {
        let points = [point(11, EstimatorSpec::Median, 0.3)];
        let a = render_curves_svg(&points).unwrap();
        let b = render_curves_svg(&points).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("<polyline"));
    }

    #[test]
    fn svg_of_nothing_is_an_error() {
        assert!(render_curves_svg(&[]).is_err());
    }
}

//! Deterministic output: CSV curves, an SVG chart, and the JSON report.
//!
//! Identical reports must produce byte-identical files, so every number is
//! formatted through one fixed-width-precision path and nothing emitted
//! depends on time, environment, or map iteration order.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::RunReport;
use crate::measurement::SurvivalCurve;

/// Render a number in plain decimal notation with 12 significant digits.
///
/// Goes through the exponential formatter first so rounding carries across
/// digit boundaries (0.99999999999951 becomes "1.00000000000").
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0.000000000000".to_string();
    }
    let negative = x < 0.0;
    let formatted = format!("{:.11e}", x.abs());
    let (mantissa, exp) = formatted
        .split_once('e')
        .expect("exponential format always contains 'e'");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);

    // The value is 0.d1..d12 * 10^point.
    let point = exp + 1;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..(-point) {
            out.push('0');
        }
        out.push_str(&digits);
    } else if point as usize >= digits.len() {
        out.push_str(&digits);
        for _ in 0..(point as usize - digits.len()) {
            out.push('0');
        }
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    out
}

/// Serialize a curve to CSV. With `raw_time = Some(t_poincare)` an absolute
/// time column is inserted after τ.
pub fn curve_to_csv(curve: &SurvivalCurve, raw_time: Option<f64>) -> String {
    let mut out = String::new();
    match raw_time {
        Some(_) => out.push_str("tau,t,P0,P1,P2\n"),
        None => out.push_str("tau,P0,P1,P2\n"),
    }
    for i in 0..curve.len() {
        out.push_str(&format_sig12(curve.tau()[i]));
        if let Some(t_p) = raw_time {
            out.push(',');
            out.push_str(&format_sig12(curve.tau()[i] * t_p));
        }
        out.push(',');
        out.push_str(&format_sig12(curve.p0()[i]));
        out.push(',');
        out.push_str(&format_sig12(curve.p1()[i]));
        out.push(',');
        out.push_str(&format_sig12(curve.p2()[i]));
        out.push('\n');
    }
    out
}

/// Parse a curve CSV written by [`curve_to_csv`], in either header variant.
pub fn parse_curve_csv(text: &str) -> Result<SurvivalCurve> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::invalid_input("csv", "missing header"))?;
    let has_raw_time = match header {
        "tau,P0,P1,P2" => false,
        "tau,t,P0,P1,P2" => true,
        other => {
            return Err(Error::invalid_input(
                "csv",
                format!("unrecognized header '{other}'"),
            ))
        }
    };
    let expected_fields = if has_raw_time { 5 } else { 4 };

    let mut tau = Vec::new();
    let mut p = [Vec::new(), Vec::new(), Vec::new()];
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected_fields {
            return Err(Error::invalid_input(
                "csv",
                format!("row {} has {} fields, expected {expected_fields}", i + 1, fields.len()),
            ));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::invalid_input("csv", format!("'{s}' is not a number")))
        };
        tau.push(parse(fields[0])?);
        let offset = if has_raw_time { 2 } else { 1 };
        for k in 0..3 {
            p[k].push(parse(fields[offset + k])?);
        }
    }
    let [p0, p1, p2] = p;
    SurvivalCurve::new(tau, p0, p1, p2)
}

/// One line series for the SVG chart.
pub struct SvgSeries<'a> {
    pub label: String,
    pub dashed: bool,
    pub curve: &'a SurvivalCurve,
}

const PALETTE: [&str; 7] = [
    "#c23b22", "#1f6fb2", "#2e8540", "#7d3c98", "#b9770e", "#148f77", "#5d6d7e",
];

/// Render ground-state population against τ. Free curves are drawn solid
/// black; everything else dashed, cycling through a fixed palette.
pub fn render_svg(series: &[SvgSeries<'_>], tau_max: f64) -> String {
    const W: f64 = 880.0;
    const H: f64 = 560.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 640.0;
    const TOP: f64 = 30.0;
    const BOTTOM: f64 = 500.0;

    let x_of = |tau: f64| LEFT + (tau / tau_max) * (RIGHT - LEFT);
    let y_of = |p: f64| BOTTOM - p * (BOTTOM - TOP);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" \
         font-family=\"sans-serif\" font-size=\"14\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"#ffffff\"/>\n"
    ));

    // Grid and axes.
    for k in 0..=4 {
        let frac = k as f64 / 4.0;
        let x = x_of(frac * tau_max);
        let y = y_of(frac);
        svg.push_str(&format!(
            "  <line x1=\"{:.3}\" y1=\"{TOP}\" x2=\"{:.3}\" y2=\"{BOTTOM}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            x, x
        ));
        svg.push_str(&format!(
            "  <line x1=\"{LEFT}\" y1=\"{:.3}\" x2=\"{RIGHT}\" y2=\"{:.3}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            y, y
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"middle\" fill=\"#333333\">{}</text>\n",
            x,
            BOTTOM + 22.0,
            trim_axis_number(frac * tau_max)
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"end\" fill=\"#333333\">{}</text>\n",
            LEFT - 8.0,
            y + 5.0,
            trim_axis_number(frac)
        ));
    }
    svg.push_str(&format!(
        "  <rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{:.3}\" height=\"{:.3}\" \
         fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
        RIGHT - LEFT,
        BOTTOM - TOP
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"middle\" fill=\"#333333\">tau = t / T_P</text>\n",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 48.0
    ));
    svg.push_str(&format!(
        "  <text x=\"18\" y=\"{:.3}\" fill=\"#333333\" \
         transform=\"rotate(-90 18 {:.3})\" text-anchor=\"middle\">P0</text>\n",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    ));

    // Series and legend.
    let mut color_index = 0usize;
    for (row, s) in series.iter().enumerate() {
        let (color, dash, width) = if s.dashed {
            let color = PALETTE[color_index % PALETTE.len()];
            color_index += 1;
            (color, " stroke-dasharray=\"7 4\"", 1.5)
        } else {
            ("#000000", "", 2.0)
        };
        let mut points = String::new();
        for i in 0..s.curve.len() {
            if i > 0 {
                points.push(' ');
            }
            points.push_str(&format!(
                "{:.3},{:.3}",
                x_of(s.curve.tau()[i]),
                y_of(s.curve.p0()[i])
            ));
        }
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"{dash} \
             points=\"{points}\"/>\n"
        ));

        let ly = TOP + 14.0 + row as f64 * 24.0;
        svg.push_str(&format!(
            "  <line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" \
             stroke=\"{color}\" stroke-width=\"{width}\"{dash}/>\n",
            RIGHT + 20.0,
            ly,
            RIGHT + 56.0,
            ly
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.3}\" y=\"{:.3}\" fill=\"#333333\">{}</text>\n",
            RIGHT + 64.0,
            ly + 5.0,
            s.label
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

fn trim_axis_number(x: f64) -> String {
    let s = format!("{x:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// File-safe name for a curve: `free` or `n{count}`.
fn curve_file_stem(n: Option<usize>) -> String {
    match n {
        Some(n) => format!("n{n}"),
        None => "free".to_string(),
    }
}

/// Write every output the report's config asks for: one CSV per curve into
/// the CSV directory, the SVG chart, and the JSON report. Returns the paths
/// written, in a fixed order.
pub fn emit_outputs(report: &RunReport) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let raw_time = report.config.raw_time.then_some(report.t_poincare);

    if let Some(dir) = &report.config.csv_dir {
        fs::create_dir_all(dir)?;
        for record in &report.curves {
            let path = dir.join(format!("{}.csv", curve_file_stem(record.n)));
            fs::write(&path, curve_to_csv(&record.curve, raw_time))?;
            written.push(path);
        }
    }

    if let Some(path) = &report.config.svg_path {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        let series: Vec<SvgSeries<'_>> = report
            .curves
            .iter()
            .map(|record| SvgSeries {
                label: record.label.clone(),
                dashed: record.n.is_some(),
                curve: &record.curve,
            })
            .collect();
        fs::write(path, render_svg(&series, report.config.tau_max))?;
        written.push(path.clone());
    }

    if let Some(path) = &report.config.report_path {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        let mut json = serde_json::to_string_pretty(report)
            .map_err(|e| Error::invalid_input("report", e.to_string()))?;
        json.push('\n');
        fs::write(path, json)?;
        written.push(path.clone());
    }

    Ok(written)
}

/// Convenience wrapper when only a path and a single curve are at hand.
pub fn write_curve_csv(path: &Path, curve: &SurvivalCurve, raw_time: Option<f64>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, curve_to_csv(curve, raw_time))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn twelve_significant_digits_in_decimal_notation() {
        assert_eq!(format_sig12(0.0), "0.000000000000");
        assert_eq!(format_sig12(1.0), "1.00000000000");
        assert_eq!(format_sig12(0.765625), "0.765625000000");
        assert_eq!(format_sig12(0.87890625), "0.878906250000");
        assert_eq!(format_sig12(0.0625), "0.0625000000000");
        assert_eq!(format_sig12(12.5), "12.5000000000");
        assert_eq!(format_sig12(1.234e-4), "0.000123400000000");
        assert_eq!(format_sig12(-0.5), "-0.500000000000");
        // Rounding must carry across the leading digit.
        assert_eq!(format_sig12(0.999999999999951), "1.00000000000");
    }

    #[test]
    fn formatted_numbers_parse_back_accurately() {
        let values = [
            0.1234567890123,
            0.9999999999,
            std::f64::consts::PI,
            7.2e-9,
            0.5000000000004,
        ];
        for &v in &values {
            let parsed: f64 = format_sig12(v).parse().unwrap();
            assert_abs_diff_eq!(parsed, v, epsilon = v.abs() * 1e-11);
        }
    }

    #[test]
    fn csv_bytes_are_exact() {
        let curve = SurvivalCurve::new(
            vec![0.0, 0.25, 0.5],
            vec![1.0, 0.878_906_25, 0.765625],
            vec![0.0, 0.0625, 0.0],
            vec![0.0, 0.058_593_75, 0.234375],
        )
        .unwrap();
        let expected = "tau,P0,P1,P2\n\
            0.000000000000,1.00000000000,0.000000000000,0.000000000000\n\
            0.250000000000,0.878906250000,0.0625000000000,0.0585937500000\n\
            0.500000000000,0.765625000000,0.000000000000,0.234375000000\n";
        assert_eq!(curve_to_csv(&curve, None), expected);
    }

    #[test]
    fn raw_time_column_is_inserted_after_tau() {
        let curve = SurvivalCurve::new(vec![0.0, 0.5], vec![1.0, 1.0], vec![0.0, 0.0], vec![
            0.0, 0.0,
        ])
        .unwrap();
        let csv = curve_to_csv(&curve, Some(2.0));
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("tau,t,P0,P1,P2"));
        let row = lines.nth(1).unwrap();
        assert!(row.starts_with("0.500000000000,1.00000000000,"));
    }

    #[test]
    fn empty_curve_gives_a_header_only_csv() {
        let curve = SurvivalCurve::new(vec![], vec![], vec![], vec![]).unwrap();
        assert_eq!(curve_to_csv(&curve, None), "tau,P0,P1,P2\n");
    }

    #[test]
    fn csv_round_trips_within_tolerance() {
        let tau: Vec<f64> = (0..64).map(|i| i as f64 / 63.0).collect();
        let p0: Vec<f64> = tau
            .iter()
            .map(|&t| ((15.0 + (2.0 * std::f64::consts::PI * t).cos()) / 16.0).powi(2))
            .collect();
        let p1: Vec<f64> = p0.iter().map(|&p| (1.0 - p) * 0.25).collect();
        let p2: Vec<f64> = p0.iter().map(|&p| (1.0 - p) * 0.75).collect();
        let curve = SurvivalCurve::new(tau, p0, p1, p2).unwrap();

        let parsed = parse_curve_csv(&curve_to_csv(&curve, None)).unwrap();
        assert_eq!(parsed.len(), curve.len());
        for i in 0..curve.len() {
            assert_abs_diff_eq!(parsed.tau()[i], curve.tau()[i], epsilon = 1e-10);
            assert_abs_diff_eq!(parsed.p0()[i], curve.p0()[i], epsilon = 1e-10);
            assert_abs_diff_eq!(parsed.p1()[i], curve.p1()[i], epsilon = 1e-10);
            assert_abs_diff_eq!(parsed.p2()[i], curve.p2()[i], epsilon = 1e-10);
        }
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(parse_curve_csv("").is_err());
        assert!(parse_curve_csv("time,P0,P1,P2\n").is_err());
        assert!(parse_curve_csv("tau,P0,P1,P2\n0.0,1.0,0.0\n").is_err());
        assert!(parse_curve_csv("tau,P0,P1,P2\n0.0,one,0.0,0.0\n").is_err());
    }

    #[test]
    fn svg_renders_all_series_deterministically() {
        let free = SurvivalCurve::new(
            vec![0.0, 0.5, 1.0],
            vec![1.0, 0.765625, 1.0],
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.234375, 0.0],
        )
        .unwrap();
        let measured = SurvivalCurve::new(
            vec![0.0, 0.5, 1.0],
            vec![1.0, 0.5, 0.25],
            vec![0.0, 0.25, 0.375],
            vec![0.0, 0.25, 0.375],
        )
        .unwrap();
        let series = [
            SvgSeries {
                label: "free".to_string(),
                dashed: false,
                curve: &free,
            },
            SvgSeries {
                label: "n = 4".to_string(),
                dashed: true,
                curve: &measured,
            },
        ];
        let svg = render_svg(&series, 1.0);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("stroke-dasharray").count(), 2);
        assert!(svg.contains(">free<"));
        assert!(svg.contains(">n = 4<"));
        assert!(!svg.contains("NaN"));
        assert_eq!(svg, render_svg(&series, 1.0));
    }
}

//! Self-contained SVG plots of regret curves: one file per
//! (family, function) pair, one polyline per algorithm, mean final regret
//! against the swept value. No external renderer is involved; the output is
//! deterministic so plots can be golden-file tested.

use super::{AlgorithmName, BenchError, Family, CSV_HEADER};
use crate::functions::FunctionName;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

/// Fixed palette, indexed by algorithm declaration order.
const COLORS: [&str; 4] = ["#1b6ca8", "#c7441c", "#2a9d3f", "#6a4a9c"];

#[derive(Debug, Clone, PartialEq)]
struct ParsedRow {
    family: Family,
    function: FunctionName,
    algorithm: AlgorithmName,
    swept_name: String,
    swept_value: u64,
    final_regret: f64,
}

fn parse_csv(path: &Path) -> Result<Vec<ParsedRow>, BenchError> {
    let text = std::fs::read_to_string(path)?;
    let display = path.display().to_string();
    let bad = |row: usize, message: String| BenchError::MalformedCsv {
        path: display.clone(),
        row,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        Some((_, header)) => {
            return Err(bad(1, format!("unexpected header: {header}")));
        }
        None => return Err(BenchError::EmptyCsv(display)),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let row = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(bad(row, format!("expected 10 fields, got {}", fields.len())));
        }
        let family = Family::from_str(fields[0]).map_err(|e| bad(row, e.to_string()))?;
        let function = FunctionName::from_str(fields[1]).map_err(|e| bad(row, e.to_string()))?;
        let algorithm =
            AlgorithmName::from_str(fields[2]).map_err(|e| bad(row, e.to_string()))?;
        let swept_value: u64 = fields[4]
            .parse()
            .map_err(|e| bad(row, format!("swept_value: {e}")))?;
        let final_regret: f64 = fields[8]
            .parse()
            .map_err(|e| bad(row, format!("final_regret: {e}")))?;
        if !final_regret.is_finite() || final_regret < 0.0 {
            return Err(bad(row, format!("final_regret out of range: {final_regret}")));
        }
        rows.push(ParsedRow {
            family,
            function,
            algorithm,
            swept_name: fields[3].to_string(),
            swept_value,
            final_regret,
        });
    }
    if rows.is_empty() {
        return Err(BenchError::EmptyCsv(display));
    }
    Ok(rows)
}

struct Series {
    algorithm: AlgorithmName,
    /// (swept value, mean regret) sorted by swept value.
    points: Vec<(u64, f64)>,
}

fn mean_series(rows: &[ParsedRow]) -> Vec<Series> {
    let mut series: Vec<Series> = Vec::new();
    for algorithm in AlgorithmName::ALL {
        let mut sums: Vec<(u64, f64, u64)> = Vec::new();
        for r in rows.iter().filter(|r| r.algorithm == algorithm) {
            match sums.iter_mut().find(|(v, _, _)| *v == r.swept_value) {
                Some((_, sum, n)) => {
                    *sum += r.final_regret;
                    *n += 1;
                }
                None => sums.push((r.swept_value, r.final_regret, 1)),
            }
        }
        if sums.is_empty() {
            continue;
        }
        sums.sort_by_key(|&(v, _, _)| v);
        series.push(Series {
            algorithm,
            points: sums
                .into_iter()
                .map(|(v, sum, n)| (v, sum / n as f64))
                .collect(),
        });
    }
    series
}

/// A sweep spanning two or more decades gets a log-scaled x axis.
fn is_geometric(values: &[u64]) -> bool {
    let min = values.iter().copied().min().unwrap_or(0);
    let max = values.iter().copied().max().unwrap_or(0);
    min > 0 && max / min >= 100
}

fn x_position(value: u64, min: u64, max: u64, log: bool) -> f64 {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let frac = if min == max {
        0.5
    } else if log {
        ((value as f64).ln() - (min as f64).ln()) / ((max as f64).ln() - (min as f64).ln())
    } else {
        (value - min) as f64 / (max - min) as f64
    };
    MARGIN_LEFT + frac * plot_w
}

fn y_position(value: f64, max: f64) -> f64 {
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let frac = if max == 0.0 { 0.0 } else { value / max };
    HEIGHT - MARGIN_BOTTOM - frac * plot_h
}

fn render_svg(
    family: Family,
    function: FunctionName,
    swept_name: &str,
    series: &[Series],
) -> String {
    let xs: Vec<u64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|&(v, _)| v))
        .collect();
    let x_min = xs.iter().copied().min().unwrap_or(0);
    let x_max = xs.iter().copied().max().unwrap_or(1);
    let log_x = is_geometric(&xs);
    let y_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|&(_, r)| r))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{family} / {function}</text>"#,
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 2.0
    );
    // axes
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );
    let x_label = if log_x {
        format!("{swept_name} (log scale)")
    } else {
        swept_name.to_string()
    };
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{x_label}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 18 {:.1})">mean final regret</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    // x tick labels at every distinct swept value
    let mut ticks = xs.clone();
    ticks.sort_unstable();
    ticks.dedup();
    for v in &ticks {
        let x = x_position(*v, x_min, x_max, log_x);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{y0}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#,
            y0 + 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="middle">{v}</text>"#,
            y0 + 16.0
        );
    }
    // y tick labels at 0 and the maximum
    for (frac, v) in [(0.0, 0.0), (1.0, y_max)] {
        let y = y_position(frac * y_max, y_max);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{y:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{v:.3e}</text>"#,
            x0 - 6.0
        );
    }
    // series
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(v, r)| {
                format!(
                    "{:.2},{:.2}",
                    x_position(v, x_min, x_max, log_x),
                    y_position(r, y_max)
                )
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            path.join(" ")
        );
        for p in &path {
            let (px, py) = p.split_once(',').unwrap();
            let _ = writeln!(svg, r#"<circle cx="{px}" cy="{py}" r="2.5" fill="{color}"/>"#);
        }
        // legend entry: label text equals the algorithm name
        let ly = MARGIN_TOP + 16.0 * i as f64 + 10.0;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="1.5"/>"#,
            lx + 18.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11">{}</text>"#,
            lx + 24.0,
            ly + 4.0,
            s.algorithm
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Render one SVG per (family, function) pair found in the per-cell CSV at
/// `csv_path`, written into `out_dir` as `<family>_<function>.svg`.
///
/// Returns the written paths in deterministic order.
pub fn emit_plot(csv_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    let rows = parse_csv(csv_path)?;
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    // deterministic grouping: declaration order of families and functions
    for family in Family::ALL {
        for function in FunctionName::ALL {
            let group: Vec<ParsedRow> = rows
                .iter()
                .filter(|r| r.family == family && r.function == function)
                .cloned()
                .collect();
            if group.is_empty() {
                continue;
            }
            let series = mean_series(&group);
            let svg = render_svg(family, function, &group[0].swept_name, &series);
            let path = out_dir.join(format!("{family}_{function}.svg"));
            std::fs::write(&path, svg)?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;
    use tempfile::tempdir;

    const SMALL_CSV: &str = "\
family,function,algorithm,swept_name,swept_value,repetition,seed,evaluations_used,final_regret,wall_time_ms
convergence,ellipsoid,embedded_hunter,v,10,0,1,10,0.5,0
convergence,ellipsoid,embedded_hunter,v,100,0,2,100,0.25,0
convergence,ellipsoid,resoo,v,10,0,3,10,0.75,0
convergence,ellipsoid,resoo,v,100,0,4,100,0.5,0
convergence,ellipsoid,random_search,v,10,0,5,10,1.5,0
convergence,ellipsoid,random_search,v,100,0,6,100,1.0,0
";

    fn write_csv(dir: &Path, name: &str, content: &str) -> PathBuf {
        let p = dir.join(name);
        let mut f = std::fs::File::create(&p).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        p
    }

    #[test]
    fn three_algorithm_csv_yields_three_series_with_labels() {
        let dir = tempdir().unwrap();
        let csv = write_csv(dir.path(), "r.csv", SMALL_CSV);
        let files = emit_plot(&csv, dir.path()).unwrap();
        assert_eq!(files.len(), 1);
        let svg = std::fs::read_to_string(&files[0]).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        for name in ["embedded_hunter", "resoo", "random_search"] {
            assert!(svg.contains(&format!(">{name}</text>")), "missing {name}");
        }
    }

    #[test]
    fn golden_small_csv() {
        let dir = tempdir().unwrap();
        let csv = write_csv(dir.path(), "r.csv", SMALL_CSV);
        let files = emit_plot(&csv, dir.path()).unwrap();
        let svg = std::fs::read_to_string(&files[0]).unwrap();
        let golden_path = Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden/convergence_ellipsoid.svg");
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::write(&golden_path, &svg).unwrap();
        }
        let golden = std::fs::read_to_string(&golden_path)
            .unwrap_or_else(|e| panic!("read {}: {e}", golden_path.display()));
        assert_eq!(svg, golden, "plot output drifted from the golden file");
    }

    #[test]
    fn empty_csv_is_an_error_and_writes_nothing() {
        let dir = tempdir().unwrap();
        let csv = write_csv(dir.path(), "e.csv", &format!("{CSV_HEADER}\n"));
        let out = dir.path().join("plots");
        assert!(matches!(
            emit_plot(&csv, &out),
            Err(BenchError::EmptyCsv(_))
        ));
        assert!(!out.exists());
    }

    #[test]
    fn malformed_row_reports_its_number() {
        let dir = tempdir().unwrap();
        let csv = write_csv(
            dir.path(),
            "bad.csv",
            &format!("{CSV_HEADER}\nconvergence,ellipsoid,resoo,v,ten,0,1,10,0.5,0\n"),
        );
        match emit_plot(&csv, dir.path()) {
            Err(BenchError::MalformedCsv { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected malformed-csv error, got {other:?}"),
        }
    }

    #[test]
    fn single_algorithm_two_points_is_one_series() {
        let dir = tempdir().unwrap();
        let csv = write_csv(
            dir.path(),
            "one.csv",
            &format!(
                "{CSV_HEADER}\n\
                 scalability,ackley,sresoo,n,100,0,1,50,2.0,0\n\
                 scalability,ackley,sresoo,n,1000,0,2,50,3.0,0\n"
            ),
        );
        let files = emit_plot(&csv, dir.path()).unwrap();
        assert_eq!(files.len(), 1);
        let svg = std::fs::read_to_string(&files[0]).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 2);
    }
}

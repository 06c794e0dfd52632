//! Deterministic SVG rendering of the CSV outputs: grouped bars for the
//! scheduling sweep and an empirical CDF for gain-loss columns.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::CliError;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 60.0;

/// A parsed CSV: header names and string cells per row.
#[derive(Debug)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut lines = text.lines();
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| CliError::usage("empty CSV input".into()))?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
            if cells.len() != header.len() {
                return Err(CliError::usage(format!(
                    "CSV row has {} cells, header has {}",
                    cells.len(),
                    header.len()
                )));
            }
            rows.push(cells);
        }
        if rows.is_empty() {
            return Err(CliError::usage("no data rows".into()));
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize, CliError> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::usage(format!("missing required column '{name}'")))
    }

    pub fn float(&self, row: usize, col: usize) -> Result<f64, CliError> {
        self.rows[row][col]
            .parse()
            .map_err(|_| CliError::usage(format!("non-numeric cell '{}'", self.rows[row][col])))
    }
}

fn svg_open(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
}

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    let x0 = MARGIN_L;
    let y0 = HEIGHT - MARGIN_B;
    let x1 = WIDTH - MARGIN_R;
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{MARGIN_T}" x2="{x0}" y2="{y0}" stroke="black"/>"#
    );
    let xc = (x0 + x1) / 2.0;
    let yb = HEIGHT - 15.0;
    let _ = writeln!(
        out,
        r#"<text x="{xc}" y="{yb}" text-anchor="middle" font-size="14">{x_label}</text>"#
    );
    let yc = (MARGIN_T + y0) / 2.0;
    let _ = writeln!(
        out,
        r#"<text x="18" y="{yc}" text-anchor="middle" font-size="14" transform="rotate(-90 18 {yc})">{y_label}</text>"#
    );
}

/// Grouped bar chart of `gain_mean` from a scheduling-sweep CSV. One bar
/// group per (n_pool, n_max) cell; bars are the per-mode means over seeds.
pub fn gain_bars(table: &Table) -> Result<String, CliError> {
    let c_pool = table.column("n_pool")?;
    let c_nmax = table.column("n_max")?;
    let c_mode = table.column("mode")?;
    let c_gain = table.column("gain_mean")?;

    // (n_pool, n_max) -> mode -> (sum, count), keyed for a stable order.
    let mut groups: BTreeMap<(u64, u64), BTreeMap<String, (f64, usize)>> = BTreeMap::new();
    for r in 0..table.rows.len() {
        let pool = table.float(r, c_pool)? as u64;
        let nmax = table.float(r, c_nmax)? as u64;
        let mode = table.rows[r][c_mode].clone();
        let gain = table.float(r, c_gain)?;
        let cell = groups.entry((pool, nmax)).or_default().entry(mode).or_insert((0.0, 0));
        cell.0 += gain;
        cell.1 += 1;
    }

    let max_gain = groups
        .values()
        .flat_map(|m| m.values())
        .map(|&(sum, n)| sum / n as f64)
        .fold(0.0f64, f64::max)
        .max(1e-12);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let group_w = plot_w / groups.len() as f64;
    let colors = ["#888888", "#1f77b4", "#d62728"];

    let mut out = String::new();
    svg_open(&mut out);
    axes(&mut out, "n_pool / n_max", "gain_mean");
    for (gi, ((pool, nmax), modes)) in groups.iter().enumerate() {
        let gx = MARGIN_L + gi as f64 * group_w;
        let _ = writeln!(out, r#"<g class="bar-group" data-cell="{pool}-{nmax}">"#);
        let bar_w = group_w * 0.8 / modes.len() as f64;
        for (mi, (mode, &(sum, n))) in modes.iter().enumerate() {
            let mean = sum / n as f64;
            let h = (mean.max(0.0) / max_gain) * plot_h;
            let x = gx + group_w * 0.1 + mi as f64 * bar_w;
            let y = HEIGHT - MARGIN_B - h;
            let color = colors[mi % colors.len()];
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{bar_w:.2}" height="{h:.2}" fill="{color}"><title>{mode}: {mean:.4}</title></rect>"#
            );
        }
        let lx = gx + group_w / 2.0;
        let ly = HEIGHT - MARGIN_B + 18.0;
        let _ = writeln!(
            out,
            r#"<text x="{lx:.2}" y="{ly}" text-anchor="middle" font-size="12">{pool}/{nmax}</text>"#
        );
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Empirical CDF of the loss implied by a `gain_db` column.
pub fn loss_cdf(table: &Table) -> Result<String, CliError> {
    let c_gain = table.column("gain_db")?;
    let mut losses: Vec<f64> = (0..table.rows.len())
        .map(|r| table.float(r, c_gain).map(|g| -g))
        .collect::<Result<_, _>>()?;
    losses.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let max_loss = losses.last().copied().unwrap().max(1e-12);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let n = losses.len();

    let mut out = String::new();
    svg_open(&mut out);
    axes(&mut out, "loss (-gain_db)", "CDF");
    let mut points = String::new();
    for (i, &loss) in losses.iter().enumerate() {
        let x = MARGIN_L + (loss / max_loss) * plot_w;
        let p = (i + 1) as f64 / n as f64;
        let y = HEIGHT - MARGIN_B - p * plot_h;
        let _ = write!(points, "{x:.2},{y:.2} ");
    }
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##,
        points.trim_end()
    );
    out.push_str("</svg>\n");
    Ok(out)
}

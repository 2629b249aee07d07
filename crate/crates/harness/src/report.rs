//! Rendering of study results into artifacts.
//!
//! CSV schemas (headers are fixed):
//!
//! | file | columns |
//! |------|---------|
//! | `runs.csv`, `scaling.csv` | `n,r,K,replica,seed,iterations,found` |
//! | `scaling_summary.csv` | `n,r,K,replicas,median_iterations,q1,q3,success_fraction,normalized,comparator,flagged` |
//! | `drift.csv` | `n,r,K,replica,seed,iterations,found,biased_steps,random_walk_steps,large_biased_steps` |
//! | `drift_series_n{n}_r{r}.csv` | `t,position,class,delta_numerator,K,mu_numerator` |
//! | `phases_n{n}_r{r}_rep{NNN}.csv` | `position,kappa,start,end,skipped,ratio_start,ratio_end` |
//! | `phase_ratios.csv` | `n,r,replica,position,kappa,nu,ratio_start,ratio_end,retention,threshold` |
//! | `verify.csv` | `oracle,parameters,bound,empirical,samples,status` |
//!
//! Every study also writes `summary.txt` with one `key=value` per line.

use std::fmt::Write as _;

use rcga_core::instrumentation::{retention_factor, Event, PhaseRecord};
use rcga_core::oracles::BoundReport;
use rcga_core::{DecomposedSeries, RNG_ALGORITHM};

use crate::config::Cell;
use crate::error::Result;
use crate::studies::{ratio_f64, DriftRow, PhaseReplica, RunRow, ScalingRow};

/// A named file and its full contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

fn csv<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>())?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn run_fields(r: &RunRow) -> Vec<String> {
    vec![
        r.cell.n.to_string(),
        r.cell.r.to_string(),
        r.cell.k.to_string(),
        r.replica.to_string(),
        r.seed.to_string(),
        r.iterations.to_string(),
        r.found.to_string(),
    ]
}

const RUN_HEADER: [&str; 7] = ["n", "r", "K", "replica", "seed", "iterations", "found"];

pub fn runs_csv(name: &str, rows: &[RunRow]) -> Result<Artifact> {
    Ok(Artifact { name: name.into(), contents: csv(&RUN_HEADER, rows.iter().map(run_fields))? })
}

pub fn scaling_summary_csv(rows: &[ScalingRow]) -> Result<Artifact> {
    let header = [
        "n",
        "r",
        "K",
        "replicas",
        "median_iterations",
        "q1",
        "q3",
        "success_fraction",
        "normalized",
        "comparator",
        "flagged",
    ];
    let contents = csv(
        &header,
        rows.iter().map(|s| {
            vec![
                s.n.to_string(),
                s.r.to_string(),
                s.k.to_string(),
                s.replicas.to_string(),
                s.median_iterations.to_string(),
                s.q1.to_string(),
                s.q3.to_string(),
                s.success_fraction.to_string(),
                s.normalized.to_string(),
                s.comparator.to_string(),
                s.flagged.to_string(),
            ]
        }),
    )?;
    Ok(Artifact { name: "scaling_summary.csv".into(), contents })
}

pub fn drift_csv(rows: &[DriftRow]) -> Result<Artifact> {
    let mut header = RUN_HEADER.to_vec();
    header.extend(["biased_steps", "random_walk_steps", "large_biased_steps"]);
    let contents = csv(
        &header,
        rows.iter().map(|d| {
            let mut f = run_fields(&d.run);
            f.extend([d.biased_steps.to_string(), d.random_walk_steps.to_string(), d.large_biased_steps.to_string()]);
            f
        }),
    )?;
    Ok(Artifact { name: "drift.csv".into(), contents })
}

/// Events of both classes merged by time. `mu_numerator` is the filtered
/// mass of the event's own class.
pub fn series_csv(cell: &Cell, s: &DecomposedSeries) -> Result<Artifact> {
    let mut events: Vec<(&Event, &str)> =
        s.random_walk.iter().map(|e| (e, "random-walk")).chain(s.biased.iter().map(|e| (e, "biased"))).collect();
    events.sort_by_key(|(e, _)| e.time);
    let contents = csv(
        &["t", "position", "class", "delta_numerator", "K", "mu_numerator"],
        events.into_iter().map(|(e, class)| {
            vec![
                e.time.to_string(),
                s.position.to_string(),
                class.to_string(),
                e.delta.to_string(),
                s.k.to_string(),
                e.filtered.to_string(),
            ]
        }),
    )?;
    Ok(Artifact { name: format!("drift_series_n{}_r{}.csv", cell.n, cell.r), contents })
}

fn first_ratio(v: &[Option<rcga_core::Exact>]) -> Option<f64> {
    v.first().copied().flatten().map(|x| ratio_f64(&x))
}

/// Per-replica phase table; ratios refer to `nu = kappa + 1`.
pub fn phases_csv(p: &PhaseReplica) -> Result<Artifact> {
    let contents = csv(
        &["position", "kappa", "start", "end", "skipped", "ratio_start", "ratio_end"],
        p.records.iter().map(|rec: &PhaseRecord| {
            vec![
                rec.position.to_string(),
                rec.kappa.to_string(),
                rec.start.to_string(),
                rec.end.to_string(),
                rec.skipped.to_string(),
                opt(first_ratio(&rec.ratios_start)),
                opt(first_ratio(&rec.ratios_end)),
            ]
        }),
    )?;
    let c = p.run.cell;
    Ok(Artifact { name: format!("phases_n{}_r{}_rep{:03}.csv", c.n, c.r, p.run.replica), contents })
}

/// Every defined `(start, end)` ratio pair with `retention = end / start`
/// and `threshold = (1 - 1/kappa*)^3`.
pub fn phase_ratios_csv(replicas: &[PhaseReplica]) -> Result<Artifact> {
    let mut rows = Vec::new();
    for p in replicas {
        let factor = ratio_f64(&retention_factor(p.kappa_star));
        for rec in p.records.iter().filter(|r| !r.skipped) {
            for (j, (s, e)) in rec.ratios_start.iter().zip(&rec.ratios_end).enumerate() {
                if let (Some(s), Some(e)) = (s, e) {
                    rows.push(vec![
                        p.run.cell.n.to_string(),
                        p.run.cell.r.to_string(),
                        p.run.replica.to_string(),
                        rec.position.to_string(),
                        rec.kappa.to_string(),
                        (rec.first_nu() + j).to_string(),
                        ratio_f64(s).to_string(),
                        ratio_f64(e).to_string(),
                        ratio_f64(&(*e / *s)).to_string(),
                        factor.to_string(),
                    ]);
                }
            }
        }
    }
    let header = ["n", "r", "replica", "position", "kappa", "nu", "ratio_start", "ratio_end", "retention", "threshold"];
    Ok(Artifact { name: "phase_ratios.csv".into(), contents: csv(&header, rows)? })
}

pub fn verify_csv(reports: &[BoundReport]) -> Result<Artifact> {
    let contents = csv(
        &["oracle", "parameters", "bound", "empirical", "samples", "status"],
        reports.iter().map(|b| {
            vec![
                b.oracle.clone(),
                serde_json::to_string(&b.parameters).expect("finite map serializes"),
                b.bound.to_string(),
                opt(b.empirical),
                b.samples.to_string(),
                b.status.name().to_string(),
            ]
        }),
    )?;
    Ok(Artifact { name: "verify.csv".into(), contents })
}

/// Normalized median runtime against `n`, one polyline per `r`.
pub fn scaling_svg(rows: &[ScalingRow]) -> Artifact {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    let finite = |v: f64| if v.is_finite() { Some(v) } else { None };
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().filter_map(|r| finite(r.normalized)).collect();
    let (x0, x1) =
        (xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let y1 = ys.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE) * 1.1;
    let sx = |x: f64| if x1 > x0 { PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD) } else { W / 2.0 };
    let sy = |y: f64| H - PAD - y / y1 * (H - 2.0 * PAD);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<path d="M{PAD} {PAD} V{} H{}" stroke="black" fill="none"/>"#, H - PAD, W - PAD);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">n</text>"#, W / 2.0, H - 10.0);
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{}" font-size="14" transform="rotate(-90 15 {})" text-anchor="middle">median / (K sqrt(n) ln n ln r)</text>"#,
        H / 2.0,
        H / 2.0
    );
    let _ = writeln!(svg, r#"<text x="{PAD}" y="{}" font-size="11">{:.3}</text>"#, PAD - 5.0, y1);
    let mut rs: Vec<usize> = rows.iter().map(|r| r.r).collect();
    rs.sort_unstable();
    rs.dedup();
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
    for (idx, r) in rs.iter().enumerate() {
        let color = colors[idx % colors.len()];
        let mut pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|row| row.r == *r)
            .filter_map(|row| finite(row.normalized).map(|y| (row.n as f64, y)))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let line: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(svg, r#"<polyline points="{}" stroke="{color}" fill="none"/>"#, line.join(" "));
        for &(x, y) in &pts {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y));
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{}" font-size="11" text-anchor="middle">{x}</text>"#,
                sx(x),
                H - PAD + 15.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">r = {r}</text>"#,
            W - PAD - 60.0,
            PAD + 15.0 * idx as f64
        );
    }
    svg.push_str("</svg>\n");
    Artifact { name: "scaling.svg".into(), contents: svg }
}

/// Ordered `key=value` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Summary(pub Vec<(String, String)>);

impl Summary {
    pub fn new(kind: &str, base_seed: u64) -> Self {
        let mut s = Self::default();
        s.push("kind", kind);
        s.push("base_seed", base_seed);
        s.push("rng", RNG_ALGORITHM);
        s
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.0.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

//! Simulation-based goodness of fit.
//!
//! Networks are simulated at the fitted coefficients and five auxiliary
//! families are tabulated on each: in-degree and out-degree distributions,
//! the edgewise shared-partner (OTP) distribution, the geodesic distance
//! distribution over ordered pairs (with unreachable pairs in their own
//! bucket) and the model statistics. Each coordinate gets simulated
//! quantiles and a flag for whether the observed value lies in the central
//! 95% band.
//!
//! CSV layout, one file per family (`gof_<family>.csv`):
//! `coordinate,observed,q025,q25,q50,q75,q975,inside`.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimator::FitResult;
use crate::graph::DirectedGraph;
use crate::io::IoError;
use crate::sampler::{simulate, SamplerConfig, SamplerError};
use crate::scalar::{to_f64, Scalar};
use crate::terms::{edgewise_sp_distribution, Model, TermError};

/// Quantile levels of the envelope.
pub const QUANTILES: [f64; 5] = [0.025, 0.25, 0.5, 0.75, 0.975];

/// Label of the unreachable-pair bucket.
pub const UNREACHABLE: &str = "inf";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    InDegree,
    OutDegree,
    EdgewiseSharedPartners,
    Distance,
    ModelStatistics,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::InDegree,
        Family::OutDegree,
        Family::EdgewiseSharedPartners,
        Family::Distance,
        Family::ModelStatistics,
    ];

    /// Short name used in file names.
    pub fn key(&self) -> &'static str {
        match self {
            Family::InDegree => "indegree",
            Family::OutDegree => "outdegree",
            Family::EdgewiseSharedPartners => "esp",
            Family::Distance => "distance",
            Family::ModelStatistics => "model",
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            Family::InDegree => "In-degree",
            Family::OutDegree => "Out-degree",
            Family::EdgewiseSharedPartners => "Edgewise shared partners (OTP)",
            Family::Distance => "Geodesic distance",
            Family::ModelStatistics => "Model statistics",
        }
    }
}

#[derive(Debug, Error)]
pub enum GofError {
    #[error("goodness of fit needs a converged fit")]
    NotConverged,
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Terms(#[from] TermError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

/// Envelope for one auxiliary family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyEnvelope {
    pub family: Family,
    pub coordinates: Vec<String>,
    pub observed: Vec<f64>,
    /// Per coordinate, values at [`QUANTILES`].
    pub quantiles: Vec<[f64; 5]>,
    pub inside: Vec<bool>,
}

impl FamilyEnvelope {
    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.is_empty()
    }

    fn from_samples(family: Family, coordinates: Vec<String>, observed: Vec<f64>, sims: &[Vec<f64>]) -> Self {
        let mut quantiles = Vec::with_capacity(coordinates.len());
        let mut inside = Vec::with_capacity(coordinates.len());
        for (c, &obs) in observed.iter().enumerate() {
            let mut col: Vec<f64> = sims.iter().map(|s| s[c]).collect();
            col.sort_by(f64::total_cmp);
            let q = QUANTILES.map(|p| quantile_sorted(&col, p));
            inside.push(obs >= q[0] && obs <= q[4]);
            quantiles.push(q);
        }
        Self {
            family,
            coordinates,
            observed,
            quantiles,
            inside,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub families: Vec<FamilyEnvelope>,
}

impl GofReport {
    pub fn family(&self, family: Family) -> Option<&FamilyEnvelope> {
        self.families.iter().find(|f| f.family == family)
    }

    /// `(inside, total)` coordinate counts over all families.
    pub fn coverage(&self) -> (usize, usize) {
        self.families.iter().fold((0, 0), |(i, t), f| {
            (i + f.inside.iter().filter(|b| **b).count(), t + f.len())
        })
    }

    pub fn fraction_inside(&self) -> f64 {
        let (i, t) = self.coverage();
        if t == 0 {
            1.0
        } else {
            i as f64 / t as f64
        }
    }
}

/// Linear-interpolation quantile of sorted data (type 7).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        len => {
            let h = (len - 1) as f64 * p;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(len - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

/// Auxiliary statistics of one network.
#[derive(Clone, Debug, PartialEq)]
pub struct Auxiliary {
    pub in_degree: Vec<usize>,
    pub out_degree: Vec<usize>,
    pub esp: Vec<usize>,
    /// `distance[d - 1]` counts ordered pairs at distance `d`.
    pub distance: Vec<usize>,
    pub unreachable: usize,
    pub model: Vec<f64>,
}

/// Counts of ordered pairs by directed geodesic distance, plus unreachable pairs.
pub fn geodesic_distribution(g: &DirectedGraph) -> (Vec<usize>, usize) {
    let n = g.node_count();
    let mut counts: Vec<usize> = Vec::new();
    let mut reached = 0usize;
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &w in g.out_neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    if counts.len() < dist[w] {
                        counts.resize(dist[w], 0);
                    }
                    counts[dist[w] - 1] += 1;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
    }
    (counts, n * n.saturating_sub(1) - reached)
}

pub fn auxiliary<T: Scalar>(g: &DirectedGraph, model: &Model<T>) -> Result<Auxiliary, TermError> {
    let (in_degree, out_degree) = g.degree_histograms();
    let (distance, unreachable) = geodesic_distribution(g);
    Ok(Auxiliary {
        in_degree,
        out_degree,
        esp: edgewise_sp_distribution(g),
        distance,
        unreachable,
        model: model.statistics(g)?.iter().map(|v| to_f64(*v)).collect(),
    })
}

fn padded(v: &[usize], len: usize) -> Vec<f64> {
    (0..len).map(|i| v.get(i).copied().unwrap_or(0) as f64).collect()
}

/// Simulates `config.sample_size` networks at `fit.theta` and builds the report.
pub fn gof_run<T: Scalar>(
    g: &DirectedGraph,
    model: &Model<T>,
    fit: &FitResult<T>,
    config: &SamplerConfig,
) -> Result<GofReport, GofError> {
    if !fit.converged {
        return Err(GofError::NotConverged);
    }
    gof_at(g, model, &fit.theta, config)
}

/// Goodness of fit at arbitrary coefficients.
pub fn gof_at<T: Scalar>(
    g: &DirectedGraph,
    model: &Model<T>,
    theta: &[T],
    config: &SamplerConfig,
) -> Result<GofReport, GofError> {
    let observed = auxiliary(g, model)?;
    let networks = simulate(model, theta, config, g)?;
    let sims: Vec<Auxiliary> = networks
        .par_iter()
        .map(|(net, _)| auxiliary(net, model))
        .collect::<Result<_, _>>()?;
    let all = || std::iter::once(&observed).chain(sims.iter());
    let len_of = |f: fn(&Auxiliary) -> usize| all().map(f).max().unwrap_or(0);
    let in_len = len_of(|a| a.in_degree.len());
    let out_len = len_of(|a| a.out_degree.len());
    let esp_len = len_of(|a| a.esp.len());
    let dist_len = len_of(|a| a.distance.len());

    let numbered = |len: usize, start: usize| (start..start + len).map(|k| k.to_string()).collect::<Vec<_>>();
    let mut families = Vec::with_capacity(5);
    let build = |family, coords: Vec<String>, pick: &dyn Fn(&Auxiliary) -> Vec<f64>| {
        let sim_rows: Vec<Vec<f64>> = sims.iter().map(pick).collect();
        FamilyEnvelope::from_samples(family, coords, pick(&observed), &sim_rows)
    };
    families.push(build(Family::InDegree, numbered(in_len, 0), &|a| padded(&a.in_degree, in_len)));
    families.push(build(Family::OutDegree, numbered(out_len, 0), &|a| padded(&a.out_degree, out_len)));
    families.push(build(Family::EdgewiseSharedPartners, numbered(esp_len, 0), &|a| {
        padded(&a.esp, esp_len)
    }));
    let mut dist_coords = numbered(dist_len, 1);
    dist_coords.push(UNREACHABLE.to_string());
    families.push(build(Family::Distance, dist_coords, &|a| {
        let mut v = padded(&a.distance, dist_len);
        v.push(a.unreachable as f64);
        v
    }));
    families.push(build(Family::ModelStatistics, model.spec().coef_names(), &|a| a.model.clone()));
    Ok(GofReport { families })
}

const CSV_HEADER: [&str; 8] = ["coordinate", "observed", "q025", "q25", "q50", "q75", "q975", "inside"];

pub fn csv_path(dir: &Path, family: Family) -> PathBuf {
    dir.join(format!("gof_{}.csv", family.key()))
}

pub fn svg_path(dir: &Path, family: Family) -> PathBuf {
    dir.join(format!("gof_{}.svg", family.key()))
}

/// Writes one CSV and one SVG per family into `dir`; returns the paths written.
pub fn render(report: &GofReport, dir: &Path) -> Result<Vec<PathBuf>, GofError> {
    std::fs::create_dir_all(dir).map_err(|source| IoError::File {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for fam in &report.families {
        let path = csv_path(dir, fam.family);
        let file = crate::io::create(&path)?;
        let mut w = csv::Writer::from_writer(file);
        let csv_err = |e: csv::Error| IoError::from(e);
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for c in 0..fam.len() {
            let q = fam.quantiles[c];
            let mut rec = vec![fam.coordinates[c].clone(), fam.observed[c].to_string()];
            rec.extend(q.iter().map(f64::to_string));
            rec.push(fam.inside[c].to_string());
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|source| IoError::File {
            path: path.clone(),
            source,
        })?;
        written.push(path);

        let path = svg_path(dir, fam.family);
        std::fs::write(&path, render_svg(fam)).map_err(|source| IoError::File {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}

/// Reads the CSVs written by [`render`] back into a report.
pub fn read_report(dir: &Path) -> Result<GofReport, GofError> {
    let mut families = Vec::new();
    for family in Family::ALL {
        let path = csv_path(dir, family);
        let parse_err = |message: String| GofError::Parse {
            path: path.clone(),
            message,
        };
        let file = crate::io::open(&path)?;
        let mut r = csv::Reader::from_reader(file);
        let header = r.headers().map_err(|e| parse_err(e.to_string()))?.clone();
        if header.iter().collect::<Vec<_>>() != CSV_HEADER {
            return Err(parse_err(format!("unexpected header {header:?}")));
        }
        let mut env = FamilyEnvelope {
            family,
            coordinates: Vec::new(),
            observed: Vec::new(),
            quantiles: Vec::new(),
            inside: Vec::new(),
        };
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| parse_err(e.to_string()))?;
            let num = |i: usize| -> Result<f64, GofError> {
                rec[i]
                    .parse::<f64>()
                    .map_err(|e| parse_err(format!("row {}: column {}: {e}", line + 2, CSV_HEADER[i])))
            };
            env.coordinates.push(rec[0].to_string());
            env.observed.push(num(1)?);
            env.quantiles.push([num(2)?, num(3)?, num(4)?, num(5)?, num(6)?]);
            env.inside.push(
                rec[7]
                    .parse::<bool>()
                    .map_err(|e| parse_err(format!("row {}: inside: {e}", line + 2)))?,
            );
        }
        families.push(env);
    }
    Ok(GofReport { families })
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Box-and-whisker panel: boxes span the quartiles, whiskers the 95% band,
/// and the observed values are a polyline with one vertex per coordinate.
pub fn render_svg(fam: &FamilyEnvelope) -> String {
    let (w, h) = (720.0_f64, 400.0_f64);
    let (left, right, top, bottom) = (60.0, 20.0, 40.0, 70.0);
    let k = fam.len().max(1) as f64;
    let lo = fam
        .quantiles
        .iter()
        .map(|q| q[0])
        .chain(fam.observed.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let hi = fam
        .quantiles
        .iter()
        .map(|q| q[4])
        .chain(fam.observed.iter().copied())
        .fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() && hi > lo {
        (lo, hi)
    } else if lo.is_finite() {
        (lo - 1.0, lo + 1.0)
    } else {
        (0.0, 1.0)
    };
    let plot_w = w - left - right;
    let plot_h = h - top - bottom;
    let x = |c: usize| left + plot_w * (c as f64 + 0.5) / k;
    let y = |v: f64| top + plot_h * (1.0 - (v - lo) / (hi - lo));
    let half = (plot_w / k * 0.3).clamp(0.5, 12.0);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, esc(fam.family.title()));
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{}" stroke="black"/><line x1="{left}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        top + plot_h,
        top + plot_h,
        left + plot_w,
        top + plot_h
    );
    for (v, label) in [(lo, lo), (hi, hi)] {
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, left - 4.0, y(v) + 4.0, fmt_tick(label));
    }
    let _ = writeln!(s, r#"<g class="envelope" stroke="gray" fill="none">"#);
    for (c, q) in fam.quantiles.iter().enumerate() {
        let cx = x(c);
        let _ = writeln!(
            s,
            r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}"/><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="lightgray"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
            y(q[0]),
            y(q[4]),
            cx - half,
            y(q[3]),
            2.0 * half,
            (y(q[1]) - y(q[3])).max(0.0),
            cx - half,
            y(q[2]),
            cx + half,
            y(q[2])
        );
    }
    let _ = writeln!(s, "</g>");
    let points: Vec<String> = fam
        .observed
        .iter()
        .enumerate()
        .map(|(c, v)| format!("{:.2},{:.2}", x(c), y(*v)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline class="observed" fill="none" stroke="black" stroke-width="1.5" points="{}"/>"#,
        points.join(" ")
    );
    let stride = (fam.len() / 20).max(1);
    for (c, label) in fam.coordinates.iter().enumerate().step_by(stride) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="end" transform="rotate(-45 {:.2} {})">{}</text>"#,
            x(c),
            top + plot_h + 14.0,
            x(c),
            top + plot_h + 14.0,
            esc(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeTable;
    use crate::terms::{ModelSpec, TermSpec};

    #[test]
    fn type7_quantiles() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&x, 0.5), 2.5);
        assert_eq!(quantile_sorted(&x, 0.0), 1.0);
        assert_eq!(quantile_sorted(&x, 1.0), 4.0);
        assert!((quantile_sorted(&x, 0.25) - 1.75).abs() < 1e-12);
        assert_eq!(quantile_sorted(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn geodesics_of_path() {
        // 0 -> 1 -> 2, 3 isolated
        let g = DirectedGraph::from_edge_list(&[(0, 1), (1, 2)], 4).unwrap();
        let (d, inf) = geodesic_distribution(&g);
        assert_eq!(d, vec![2, 1]);
        assert_eq!(inf, 12 - 3);
    }

    #[test]
    fn empty_graph_report() {
        let g = DirectedGraph::empty(6);
        let model = Model::<f64>::new(&ModelSpec::new(vec![TermSpec::Edges]), &NodeTable::ordinary(6)).unwrap();
        let config = SamplerConfig {
            burn_in: 100,
            interval: 10,
            sample_size: 20,
            ..SamplerConfig::for_nodes(6)
        };
        let report = gof_at(&g, &model, &[-30.0], &config).unwrap();
        assert_eq!(report.families.len(), 5);
        assert!(report.families.iter().all(|f| f.inside.iter().all(|b| *b)));
        let dist = report.family(Family::Distance).unwrap();
        assert_eq!(dist.coordinates, vec!["inf".to_string()]);
        assert_eq!(dist.observed, vec![30.0]);
    }
}

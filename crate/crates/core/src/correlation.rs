//! Time-series ingestion: Pearson correlation, three-way multi-correlation
//! `ρ = sqrt(1 - det R)` and thresholded hypergraph construction.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hypergraph::{k_subsets, UniformHypergraph};

/// `T × N` samples, one column per signal.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeriesMatrix {
    labels: Vec<String>,
    columns: Vec<Vec<f64>>,
}

/// Multi-correlation of one (sorted, 1-based) column triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationTriple {
    pub indices: [usize; 3],
    pub rho: f64,
}

impl TimeSeriesMatrix {
    pub fn new(labels: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if labels.len() != columns.len() {
            return Err(Error::Dimension(format!("{} labels for {} columns", labels.len(), columns.len())));
        }
        let t = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != t) {
            return Err(Error::Dimension("columns have different lengths".into()));
        }
        if !columns.is_empty() && t < 2 {
            return Err(Error::Domain(format!("need at least 2 samples, got {t}")));
        }
        Ok(TimeSeriesMatrix { labels, columns })
    }

    /// Columns with generated labels `s1, s2, ...`.
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (1..=columns.len()).map(|i| format!("s{i}")).collect();
        Self::new(labels, columns)
    }

    /// CSV with a header row of labels followed by one row per sample.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let labels: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Parse(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut columns = vec![Vec::new(); labels.len()];
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            for (c, field) in rec.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| {
                    Error::Parse(format!("line {}: column '{}': '{field}' is not a number", row + 2, labels[c]))
                })?;
                columns[c].push(v);
            }
        }
        Self::new(labels, columns)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::from_csv(f).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn samples(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn signals(&self) -> usize {
        self.columns.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    /// Mean-centred column scaled to unit norm, so that dot products are
    /// Pearson correlations.
    fn standardized(&self, i: usize) -> Result<Vec<f64>> {
        let c = &self.columns[i];
        let t = c.len() as f64;
        let mean = c.iter().sum::<f64>() / t;
        let centred: Vec<f64> = c.iter().map(|v| v - mean).collect();
        // sample (n-1) variance; the normalization cancels in r
        let var = centred.iter().map(|v| v * v).sum::<f64>() / (t - 1.0);
        if var == 0.0 || !var.is_finite() {
            return Err(Error::Domain(format!("undefined correlation: column '{}' is constant", self.labels[i])));
        }
        let norm = (var * (t - 1.0)).sqrt();
        Ok(centred.into_iter().map(|v| v / norm).collect())
    }

    /// Pearson correlation of columns `i` and `j` (0-based).
    pub fn pearson(&self, i: usize, j: usize) -> Result<f64> {
        let (a, b) = (self.standardized(i)?, self.standardized(j)?);
        Ok(dot(&a, &b).clamp(-1.0, 1.0))
    }

    /// Full `N × N` correlation matrix.
    pub fn correlation_matrix(&self) -> Result<Vec<Vec<f64>>> {
        let z: Vec<Vec<f64>> = (0..self.signals()).map(|i| self.standardized(i)).collect::<Result<_>>()?;
        let n = z.len();
        let mut r = vec![vec![1.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = dot(&z[i], &z[j]).clamp(-1.0, 1.0);
                r[i][j] = v;
                r[j][i] = v;
            }
        }
        Ok(r)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Determinant of a symmetric 3×3 correlation matrix with unit diagonal.
fn det_unit3(r12: f64, r13: f64, r23: f64) -> f64 {
    1.0 + 2.0 * r12 * r13 * r23 - r12 * r12 - r13 * r13 - r23 * r23
}

fn rho_from_det(det: f64) -> f64 {
    (1.0 - det).clamp(0.0, 1.0).sqrt()
}

/// Multi-correlation of three distinct columns (1-based ids).
pub fn multicorrelation(data: &TimeSeriesMatrix, triple: [usize; 3]) -> Result<CorrelationTriple> {
    let mut t = triple;
    t.sort_unstable();
    if t[0] == 0 || t[2] > data.signals() {
        return Err(Error::Index(format!("triple {triple:?} outside 1..={}", data.signals())));
    }
    if t[0] == t[1] || t[1] == t[2] {
        return Err(Error::Domain(format!("triple {triple:?} repeats a column")));
    }
    let [a, b, c] = t.map(|v| v - 1);
    let det = det_unit3(data.pearson(a, b)?, data.pearson(a, c)?, data.pearson(b, c)?);
    Ok(CorrelationTriple { indices: t, rho: rho_from_det(det) })
}

/// Hypergraph construction result: the graph plus every triple's `ρ`.
#[derive(Clone, Debug)]
pub struct Ingested {
    pub hypergraph: UniformHypergraph,
    pub triples: Vec<CorrelationTriple>,
}

/// 3-uniform hypergraph with an edge on every column triple whose
/// multi-correlation exceeds `threshold` (strictly). Every column is a node.
pub fn hypergraph_from_timeseries(data: &TimeSeriesMatrix, threshold: f64) -> Result<Ingested> {
    check_threshold(data, 3, threshold)?;
    let r = data.correlation_matrix()?;
    let triples: Vec<CorrelationTriple> = k_subsets(data.signals(), 3)
        .into_iter()
        .map(|t| {
            let [a, b, c] = [t[0] - 1, t[1] - 1, t[2] - 1];
            CorrelationTriple { indices: [t[0], t[1], t[2]], rho: rho_from_det(det_unit3(r[a][b], r[a][c], r[b][c])) }
        })
        .collect();
    let edges = triples.iter().filter(|t| t.rho > threshold).map(|t| t.indices.to_vec()).collect();
    Ok(Ingested { hypergraph: UniformHypergraph::new(data.signals(), 3, edges)?, triples })
}

/// Ordinary graph (k = 2) with an edge wherever `|r_ij| > threshold`.
pub fn graph_from_timeseries(data: &TimeSeriesMatrix, threshold: f64) -> Result<UniformHypergraph> {
    check_threshold(data, 2, threshold)?;
    let r = data.correlation_matrix()?;
    let edges = k_subsets(data.signals(), 2)
        .into_iter()
        .filter(|e| r[e[0] - 1][e[1] - 1].abs() > threshold)
        .collect();
    UniformHypergraph::new(data.signals(), 2, edges)
}

fn check_threshold(data: &TimeSeriesMatrix, min_cols: usize, threshold: f64) -> Result<()> {
    if data.signals() < min_cols {
        return Err(Error::Domain(format!("need at least {min_cols} columns, got {}", data.signals())));
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::Domain(format!("threshold {threshold} outside [0, 1]")));
    }
    Ok(())
}

/// Counts of `ρ` values in `bins` equal-width bins over `[0, 1]`.
pub fn rho_histogram(triples: &[CorrelationTriple], bins: usize) -> Vec<usize> {
    let mut h = vec![0; bins];
    for t in triples {
        let b = ((t.rho * bins as f64) as usize).min(bins - 1);
        h[b] += 1;
    }
    h
}

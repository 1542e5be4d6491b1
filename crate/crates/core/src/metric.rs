//! Finite pseudo-metric instances, their validation, random generators and
//! clone injection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TRIANGLE_TOL: f64 = 1e-9;

/// How the instance was given.
#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    Points { dim: usize, points: Vec<Vec<f64>> },
    Matrix,
}

/// Labeled elements with a validated, cached distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricInstance {
    labels: Vec<String>,
    form: Form,
    dist: Vec<f64>,
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl MetricInstance {
    pub fn from_points(labels: Option<Vec<String>>, points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::Schema("instance has no elements".into()));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::Schema("points must have dimension ≥ 1".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Schema(format!("point {i} has dimension {} instead of {dim}", p.len())));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite { i, j: i });
            }
        }
        let labels = check_labels(labels, n)?;
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = euclid(&points[i], &points[j]);
            }
        }
        let inst = MetricInstance { labels, form: Form::Points { dim, points }, dist };
        inst.validate(DEFAULT_TRIANGLE_TOL)?;
        Ok(inst)
    }

    pub fn from_matrix(labels: Option<Vec<String>>, rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Schema("instance has no elements".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::Schema(format!("row {i} has {} entries, expected {n}", r.len())));
            }
        }
        let labels = check_labels(labels, n)?;
        let dist = rows.into_iter().flatten().collect();
        let inst = MetricInstance { labels, form: Form::Matrix, dist };
        inst.validate(tol)?;
        Ok(inst)
    }

    /// Checks every invariant; the first violation found is reported.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                if !self.d(i, j).is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
            }
        }
        for i in 0..n {
            if self.d(i, i) != 0.0 {
                return Err(Error::ZeroDiagonal { i, d: self.d(i, i) });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.d(i, j) < 0.0 {
                    return Err(Error::NegativeDistance { i, j, d: self.d(i, j) });
                }
                if self.d(i, j) != self.d(j, i) {
                    return Err(Error::Asymmetric { i, j, a: self.d(i, j), b: self.d(j, i) });
                }
            }
        }
        for i in 0..n {
            for k in i + 1..n {
                for j in 0..n {
                    let (dik, dij, djk) = (self.d(i, k), self.d(i, j), self.d(j, k));
                    if dik > dij + djk + tol {
                        return Err(Error::Triangle { i, j, k, dik, dij, djk });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn points(&self) -> Option<&[Vec<f64>]> {
        match &self.form {
            Form::Points { points, .. } => Some(points),
            Form::Matrix => None,
        }
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.len()).map(|r| r.to_vec()).collect()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn max_distance(&self) -> f64 {
        self.dist.iter().cloned().fold(0.0, f64::max)
    }

    /// Pairwise distances, sorted, with the per-element lists.
    pub fn distance_set(&self) -> DistanceSet {
        let n = self.len();
        let mut all = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
        let mut per_element = vec![Vec::with_capacity(n.saturating_sub(1)); n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    per_element[i].push(self.d(i, j));
                    if i < j {
                        all.push(self.d(i, j));
                    }
                }
            }
        }
        all.sort_by(f64::total_cmp);
        for v in &mut per_element {
            v.sort_by(f64::total_cmp);
        }
        DistanceSet { sorted: all, per_element }
    }

    /// Reorders elements so that new element `k` is old element `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.len();
        assert_eq!(perm.len(), n);
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let mut dist = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                dist[a * n + b] = self.d(perm[a], perm[b]);
            }
        }
        let form = match &self.form {
            Form::Points { dim, points } => Form::Points {
                dim: *dim,
                points: perm.iter().map(|&p| points[p].clone()).collect(),
            },
            Form::Matrix => Form::Matrix,
        };
        MetricInstance { labels, form, dist }
    }

    /// Point form only: append `extra` zero coordinates to every point.
    pub fn with_zero_coordinates(&self, extra: usize) -> Result<Self> {
        let pts = self
            .points()
            .ok_or_else(|| Error::InvalidParameter("embedding needs point form".into()))?;
        let pts = pts
            .iter()
            .map(|p| p.iter().cloned().chain(std::iter::repeat(0.0).take(extra)).collect())
            .collect();
        MetricInstance::from_points(Some(self.labels.clone()), pts)
    }

    /// Point form only: multiply every coordinate by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let pts = self
            .points()
            .ok_or_else(|| Error::InvalidParameter("scaling needs point form".into()))?;
        let pts = pts.iter().map(|p| p.iter().map(|c| c * factor).collect()).collect();
        MetricInstance::from_points(Some(self.labels.clone()), pts)
    }

    /// Point form only: replace the points, keeping labels.
    pub fn with_points(&self, points: Vec<Vec<f64>>) -> Result<Self> {
        MetricInstance::from_points(Some(self.labels.clone()), points)
    }

    /// The same distances, forgetting the coordinates.
    pub fn as_matrix_form(&self) -> Self {
        MetricInstance { labels: self.labels.clone(), form: Form::Matrix, dist: self.dist.clone() }
    }

    pub fn to_document(&self) -> InstanceDocument {
        match &self.form {
            Form::Points { dim, points } => InstanceDocument {
                labels: Some(self.labels.clone()),
                kind: "points".into(),
                dim: Some(*dim),
                points: Some(points.clone()),
                distances: None,
            },
            Form::Matrix => InstanceDocument {
                labels: Some(self.labels.clone()),
                kind: "matrix".into(),
                dim: None,
                points: None,
                distances: Some(self.matrix()),
            },
        }
    }
}

fn check_labels(labels: Option<Vec<String>>, n: usize) -> Result<Vec<String>> {
    let labels = labels.unwrap_or_else(|| default_labels(n));
    if labels.len() != n {
        return Err(Error::Schema(format!("{} labels for {n} elements", labels.len())));
    }
    let mut seen = std::collections::HashSet::new();
    for l in &labels {
        if !seen.insert(l) {
            return Err(Error::Schema(format!("duplicate label `{l}`")));
        }
    }
    Ok(labels)
}

/// Sorted pairwise distances and per-element distance lists.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSet {
    pub sorted: Vec<f64>,
    pub per_element: Vec<Vec<f64>>,
}

impl DistanceSet {
    pub fn distinct(&self) -> Vec<f64> {
        let mut v = self.sorted.clone();
        v.dedup();
        v
    }
}

/// JSON shape of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<f64>>>,
}

impl InstanceDocument {
    pub fn into_instance(self, tol: f64) -> Result<MetricInstance> {
        match self.kind.as_str() {
            "points" => {
                let points = self.points.ok_or_else(|| Error::Schema("`points` missing".into()))?;
                if let (Some(dim), Some(first)) = (self.dim, points.first()) {
                    if first.len() != dim {
                        return Err(Error::Schema(format!("`dim` is {dim} but points have {}", first.len())));
                    }
                }
                MetricInstance::from_points(self.labels, points)
            }
            "matrix" => {
                let rows = self.distances.ok_or_else(|| Error::Schema("`distances` missing".into()))?;
                MetricInstance::from_matrix(self.labels, rows, tol)
            }
            other => Err(Error::Schema(format!("unknown kind `{other}`"))),
        }
    }
}

/// Parses a JSON instance document and validates it.
pub fn load_instance(json: &str) -> Result<MetricInstance> {
    load_instance_with_tol(json, DEFAULT_TRIANGLE_TOL)
}

pub fn load_instance_with_tol(json: &str, tol: f64) -> Result<MetricInstance> {
    let doc: InstanceDocument = serde_json::from_str(json)?;
    doc.into_instance(tol)
}

/// Square distance matrix as CSV: a header row of labels, then one row per
/// element. A leading label column is tolerated.
pub fn load_instance_csv(text: &str, tol: f64) -> Result<MetricInstance> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut header: Vec<String> = rdr.headers()?.iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        rows.push(rec?.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    }
    let n = rows.len();
    let label_column = header.len() == n + 1;
    if label_column {
        header.remove(0);
    }
    if header.len() != n {
        return Err(Error::Schema(format!("CSV header has {} labels for {n} rows", header.len())));
    }
    let mut matrix = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let cells = if label_column { &row[1..] } else { &row[..] };
        if cells.len() != n {
            return Err(Error::Schema(format!("CSV row {i} has {} cells, expected {n}", cells.len())));
        }
        let parsed: std::result::Result<Vec<f64>, _> = cells.iter().map(|c| c.parse::<f64>()).collect();
        matrix.push(parsed.map_err(|e| Error::Schema(format!("CSV row {i}: {e}")))?);
    }
    MetricInstance::from_matrix(Some(header), matrix, tol)
}

/// Generator families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InstanceKind {
    /// `n` points uniform in the unit cube of dimension `dim`.
    Euclidean { dim: usize, n: usize },
    /// Shortest-path metric of a random connected weighted graph; `density`
    /// is the probability of each extra edge beyond a random spanning path.
    ShortestPath { n: usize, density: f64 },
}

pub fn random_instance(kind: InstanceKind, seed: u64) -> Result<MetricInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        InstanceKind::Euclidean { dim, n } => {
            if n == 0 || dim == 0 {
                return Err(Error::InvalidParameter("euclidean instance needs n ≥ 1 and dim ≥ 1".into()));
            }
            let pts = (0..n).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect();
            MetricInstance::from_points(None, pts)
        }
        InstanceKind::ShortestPath { n, density } => {
            if n == 0 || !(0.0..=1.0).contains(&density) {
                return Err(Error::InvalidParameter("shortest_path needs n ≥ 1 and density in [0,1]".into()));
            }
            // Edge lengths are multiples of 1/1024 so every path sum is exact
            // and the closed matrix satisfies the triangle inequality with tol 0.
            let len = |rng: &mut ChaCha8Rng| rng.gen_range(1..=1024) as f64 / 1024.0;
            let mut d = vec![f64::INFINITY; n * n];
            for i in 0..n {
                d[i * n + i] = 0.0;
            }
            let mut order: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                order.swap(i, j);
            }
            for w in order.windows(2) {
                let l = len(&mut rng);
                d[w[0] * n + w[1]] = l;
                d[w[1] * n + w[0]] = l;
            }
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen::<f64>() < density {
                        let l = len(&mut rng);
                        if l < d[i * n + j] {
                            d[i * n + j] = l;
                            d[j * n + i] = l;
                        }
                    }
                }
            }
            floyd_warshall(&mut d, n);
            let rows = d.chunks(n).map(|r| r.to_vec()).collect();
            MetricInstance::from_matrix(None, rows, 0.0)
        }
    }
}

fn floyd_warshall(d: &mut [f64], n: usize) {
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k] + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
}

/// Adds one approximate clone of element `x` with `d(x, y) ≤ eps`.
/// Returns the new instance; the clone is the last element.
pub fn add_clone(inst: &MetricInstance, x: usize, eps: f64, seed: u64) -> Result<MetricInstance> {
    let n = inst.len();
    if x >= n {
        return Err(Error::UnknownElement(x.to_string()));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("eps must be finite and ≥ 0, got {eps}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut label = format!("{}'", inst.labels[x]);
    while inst.labels.contains(&label) {
        label.push('\'');
    }
    let mut labels = inst.labels.clone();
    labels.push(label);
    match &inst.form {
        Form::Points { dim, points } => {
            let dir = random_unit_vector(&mut rng, *dim);
            let u: f64 = rng.gen();
            let radius = u * eps;
            let y: Vec<f64> = points[x].iter().zip(&dir).map(|(c, v)| c + radius * v).collect();
            let mut pts = points.clone();
            pts.push(y);
            MetricInstance::from_points(Some(labels), pts)
        }
        Form::Matrix => {
            let eps_xy = rng.gen::<f64>() * eps;
            // Each distance from the clone starts at or above d(x, z); the
            // Lipschitz closure below only lowers it, never under d(x, z).
            let mut row: Vec<f64> = (0..n)
                .map(|z| if z == x { eps_xy } else { inst.d(x, z) + rng.gen::<f64>() * eps_xy })
                .collect();
            loop {
                let mut changed = false;
                for z in 0..n {
                    for w in 0..n {
                        let via = row[w] + inst.d(w, z);
                        if via < row[z] {
                            row[z] = via;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            let mut rows = inst.matrix();
            for (z, r) in rows.iter_mut().enumerate() {
                r.push(row[z]);
            }
            let mut last = row;
            last.push(0.0);
            rows.push(last);
            let m = MetricInstance { labels, form: Form::Matrix, dist: rows.into_iter().flatten().collect() };
            m.validate(DEFAULT_TRIANGLE_TOL)?;
            Ok(m)
        }
    }
}

pub(crate) fn random_unit_vector(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    if dim == 1 {
        return vec![if rng.gen::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        // Rejection sampling from the cube keeps the direction uniform.
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

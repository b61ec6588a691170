//! Finite pointed metric spaces, pair sets, generators for the standard
//! example configurations, and their JSON file formats.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack allowed in the triangle inequality.
pub const TOL_METRIC: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct PointedMetricSpace {
    labels: Vec<String>,
    d: Vec<Vec<f64>>,
    base: usize,
}

impl PointedMetricSpace {
    /// Validate `d` as a metric with base point `base`; points are labelled by index.
    pub fn new(d: Vec<Vec<f64>>, base: usize) -> Result<Self> {
        let labels = (0..d.len()).map(|i| i.to_string()).collect();
        Self::with_labels(d, base, labels)
    }

    pub fn with_labels(d: Vec<Vec<f64>>, base: usize, labels: Vec<String>) -> Result<Self> {
        validate_matrix(&d, base)?;
        if labels.len() != d.len() {
            return Err(Error::SizeMismatch { expected: d.len(), found: labels.len() });
        }
        Ok(PointedMetricSpace { labels, d, base })
    }

    /// All distinct points at distance one.
    pub fn equilateral(n: usize) -> Result<Self> {
        let d = (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect();
        Self::new(d, 0)
    }

    /// Euclidean distances between planar points; the first point is the base.
    pub fn euclidean(points: &[[f64; 2]]) -> Result<Self> {
        let d = points
            .iter()
            .map(|a| points.iter().map(|b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()).collect())
            .collect();
        Self::new(d, 0)
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.d
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i][j]
    }

    /// Distance from `p` to a set, `+∞` for the empty set.
    pub fn dist_to_set(&self, p: usize, set: impl IntoIterator<Item = usize>) -> f64 {
        set.into_iter().map(|q| self.d[p][q]).fold(f64::INFINITY, f64::min)
    }

    /// Points of the open ball `{p : d(center, p) < r}`.
    pub fn open_ball(&self, center: usize, r: f64) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.d[center][p] < r).collect()
    }

    /// Non-base points in index order.
    pub fn free_points(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&p| p != self.base)
    }

    /// Subspace on `points` with base `points[0]` (the new base must be listed first).
    pub fn subspace(&self, points: &[usize]) -> Result<Self> {
        let d = points.iter().map(|&a| points.iter().map(|&b| self.d[a][b]).collect()).collect();
        let labels = points.iter().map(|&p| self.labels[p].clone()).collect();
        Self::with_labels(d, 0, labels)
    }
}

fn validate_matrix(d: &[Vec<f64>], base: usize) -> Result<()> {
    let n = d.len();
    for (row, r) in d.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare { row, found: r.len(), expected: n });
        }
    }
    for i in 0..n {
        for j in 0..n {
            let x = d[i][j];
            if !x.is_finite() || x < 0.0 || (i == j && x != 0.0) {
                return Err(Error::InvalidDistance { i, j });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if d[i][j] != d[j][i] {
                return Err(Error::SymmetryViolation { i, j });
            }
            if d[i][j] == 0.0 {
                return Err(Error::ZeroDistance { i, j });
            }
        }
    }
    if base >= n {
        return Err(Error::BadBase { base, points: n });
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                if k != i && k != j && d[i][j] > (d[i][k] + d[k][j]) * (1.0 + TOL_METRIC) {
                    return Err(Error::TriangleViolation { i, j, k });
                }
            }
        }
    }
    Ok(())
}

/// `validate_space` in functional form.
pub fn validate_space(d: Vec<Vec<f64>>, base: usize) -> Result<PointedMetricSpace> {
    PointedMetricSpace::new(d, base)
}

/// Ordered family of pairs of distinct points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSet {
    pairs: Vec<(usize, usize)>,
}

impl PairSet {
    pub fn new(space: &PointedMetricSpace, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n = space.len();
        for (index, &(x, y)) in pairs.iter().enumerate() {
            for point in [x, y] {
                if point >= n {
                    return Err(Error::PointOutOfRange { index, point, points: n });
                }
            }
            if x == y {
                return Err(Error::DegeneratePair { index, point: x });
            }
        }
        Ok(PairSet { pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn get(&self, i: usize) -> (usize, usize) {
        self.pairs[i]
    }

    /// Pairs restricted to the given indices, in that order.
    pub fn select(&self, indices: &[usize]) -> PairSet {
        PairSet { pairs: indices.iter().map(|&i| self.pairs[i]).collect() }
    }

    /// Index pairs `(i, j)`, `i < j`, naming the same edge in either orientation.
    /// Such repeats make the molecule family linearly dependent.
    pub fn duplicates(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.pairs.len() {
            for j in i + 1..self.pairs.len() {
                let (a, b) = self.pairs[i];
                let (c, d) = self.pairs[j];
                if (a, b) == (c, d) || (a, b) == (d, c) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Distinct endpoints in first-appearance order.
    pub fn endpoints(&self) -> Vec<usize> {
        let mut seen = Vec::new();
        for &(x, y) in &self.pairs {
            for p in [x, y] {
                if !seen.contains(&p) {
                    seen.push(p);
                }
            }
        }
        seen
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallConfig {
    pub radii: Vec<f64>,
}

impl BallConfig {
    pub fn new(radii: Vec<f64>, pairs: &PairSet) -> Result<Self> {
        if radii.len() != pairs.len() {
            return Err(Error::SizeMismatch { expected: pairs.len(), found: radii.len() });
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidParams("ball radii must be positive".into()));
        }
        Ok(BallConfig { radii })
    }
}

/// Outcome of the three disjoint-ball conditions, evaluated literally.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ex1Report {
    /// (1) the open balls `B(x_i, r_i)` are pairwise disjoint.
    pub disjoint: bool,
    /// (2) `(r_i + r_j) / d(B_i, B_j) < 1/2` for `i ≠ j`.
    pub separated: bool,
    /// (3) `0 < d(x_i, y_i) < d(y_i, X ∖ B(x_i, r_i))`.
    pub local: bool,
}

impl Ex1Report {
    pub fn all(&self) -> bool {
        self.disjoint && self.separated && self.local
    }

    /// Number of the first failing condition.
    pub fn first_failure(&self) -> Option<u8> {
        [self.disjoint, self.separated, self.local].iter().position(|ok| !ok).map(|i| i as u8 + 1)
    }
}

pub fn check_ex1_conditions(space: &PointedMetricSpace, pairs: &PairSet, cfg: &BallConfig) -> Ex1Report {
    let balls: Vec<Vec<usize>> =
        pairs.pairs().iter().zip(&cfg.radii).map(|(&(x, _), &r)| space.open_ball(x, r)).collect();
    let m = pairs.len();
    let mut disjoint = true;
    let mut separated = true;
    for i in 0..m {
        for j in i + 1..m {
            if balls[i].iter().any(|p| balls[j].contains(p)) {
                disjoint = false;
            }
            let gap = balls[i].iter().map(|&p| space.dist_to_set(p, balls[j].iter().copied())).fold(f64::INFINITY, f64::min);
            if cfg.radii[i] + cfg.radii[j] >= 0.5 * gap {
                separated = false;
            }
        }
    }
    let local = pairs.pairs().iter().zip(&balls).all(|(&(x, y), ball)| {
        let dxy = space.dist(x, y);
        let outside = (0..space.len()).filter(|p| !ball.contains(p));
        0.0 < dxy && dxy < space.dist_to_set(y, outside)
    });
    Ex1Report { disjoint, separated, local }
}

/// Disjoint two-point clusters `{x_i, y_i}` with `d(x_i, y_i) = scale`,
/// ball radius `2·scale`, clusters `10·scale` apart and the base `5·scale`
/// from every cluster point.
pub fn gen_ex1_clusters(clusters: usize, scale: f64) -> Result<(PointedMetricSpace, PairSet, BallConfig)> {
    if clusters == 0 || !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidParams("need at least one cluster and a positive scale".into()));
    }
    let n = 1 + 2 * clusters;
    let cluster_of = |p: usize| (p - 1) / 2;
    let mut d = vec![vec![0.0; n]; n];
    for p in 0..n {
        for q in 0..n {
            d[p][q] = if p == q {
                0.0
            } else if p == 0 || q == 0 {
                5.0 * scale
            } else if cluster_of(p) == cluster_of(q) {
                scale
            } else {
                10.0 * scale
            };
        }
    }
    let mut labels = vec!["0".to_string()];
    for i in 1..=clusters {
        labels.push(format!("x{i}"));
        labels.push(format!("y{i}"));
    }
    let space = PointedMetricSpace::with_labels(d, 0, labels)?;
    let pairs = PairSet::new(&space, (0..clusters).map(|i| (1 + 2 * i, 2 + 2 * i)).collect())?;
    let cfg = BallConfig::new(vec![2.0 * scale; clusters], &pairs)?;
    if let Some(condition) = check_ex1_conditions(&space, &pairs, &cfg).first_failure() {
        return Err(Error::ConditionsFail { condition });
    }
    Ok((space, pairs, cfg))
}

/// Blocks `{0, x_n, y_n}` forming equilateral triangles of side `1/n`,
/// glued at the base; points in different blocks are joined through the base.
pub fn gen_triple_chain(blocks: usize) -> Result<(PointedMetricSpace, PairSet)> {
    if blocks == 0 {
        return Err(Error::InvalidParams("need at least one block".into()));
    }
    let n = 1 + 2 * blocks;
    let radius = |p: usize| if p == 0 { 0.0 } else { 1.0 / p.div_ceil(2) as f64 };
    let block = |p: usize| p.div_ceil(2);
    let mut d = vec![vec![0.0; n]; n];
    for p in 0..n {
        for q in 0..n {
            d[p][q] = if p == q {
                0.0
            } else if p != 0 && q != 0 && block(p) == block(q) {
                radius(p)
            } else {
                radius(p) + radius(q)
            };
        }
    }
    let mut labels = vec!["0".to_string()];
    for b in 1..=blocks {
        labels.push(format!("x{b}"));
        labels.push(format!("y{b}"));
    }
    let space = PointedMetricSpace::with_labels(d, 0, labels)?;
    let mut pairs = Vec::with_capacity(3 * blocks);
    for b in 0..blocks {
        let (x, y) = (1 + 2 * b, 2 + 2 * b);
        pairs.extend([(x, 0), (y, x), (0, y)]);
    }
    let pairs = PairSet::new(&space, pairs)?;
    Ok((space, pairs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    PathTree,
    StarTree,
    Cycle,
}

/// Shortest-path metric of a path, star or cycle; pairs are the edges, oriented
/// away from the base for trees. The cycle lists `(1,0)`, `(n-1,0)` first and
/// then walks `1 → 2 → … → n-1`, so size 3 gives `(1,0), (2,0), (1,2)`.
pub fn gen_graph_space(kind: GraphKind, size: usize, edge_lengths: &[f64]) -> Result<(PointedMetricSpace, PairSet)> {
    if size < 2 || (kind == GraphKind::Cycle && size < 3) {
        return Err(Error::InvalidParams(format!("graph of size {size} is too small")));
    }
    let edges: Vec<(usize, usize)> = match kind {
        GraphKind::PathTree => (1..size).map(|i| (i, i - 1)).collect(),
        GraphKind::StarTree => (1..size).map(|i| (i, 0)).collect(),
        GraphKind::Cycle => {
            let mut e = vec![(1, 0), (size - 1, 0)];
            e.extend((1..size - 1).map(|i| (i, i + 1)));
            e
        }
    };
    let lengths = if edge_lengths.is_empty() {
        vec![1.0; edges.len()]
    } else if edge_lengths.len() != edges.len() {
        return Err(Error::SizeMismatch { expected: edges.len(), found: edge_lengths.len() });
    } else {
        edge_lengths.to_vec()
    };
    let space = graph_metric(size, &edges, &lengths)?;
    let pairs = PairSet::new(&space, edges)?;
    Ok((space, pairs))
}

/// Shortest-path metric of a connected weighted graph (Floyd–Warshall).
pub fn graph_metric(size: usize, edges: &[(usize, usize)], lengths: &[f64]) -> Result<PointedMetricSpace> {
    if lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::InvalidParams("edge lengths must be positive".into()));
    }
    let mut d = vec![vec![f64::INFINITY; size]; size];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (&(a, b), &l) in edges.iter().zip(lengths) {
        if a >= size || b >= size {
            return Err(Error::InvalidParams(format!("edge ({a},{b}) leaves the vertex set")));
        }
        d[a][b] = d[a][b].min(l);
        d[b][a] = d[a][b];
    }
    for k in 0..size {
        for i in 0..size {
            for j in 0..size {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    if d.iter().flatten().any(|x| x.is_infinite()) {
        return Err(Error::InvalidParams("graph is disconnected".into()));
    }
    PointedMetricSpace::new(d, 0)
}

/// Random recursive tree: vertex `i` hangs from a uniform earlier vertex with
/// an edge length in `[0.5, 2)`; pairs are `(i, parent)`.
pub fn gen_random_tree(size: usize, seed: u64) -> Result<(PointedMetricSpace, PairSet)> {
    if size < 2 {
        return Err(Error::InvalidParams("a tree needs at least two vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize)> = (1..size).map(|i| (i, rng.gen_range(0..i))).collect();
    let lengths: Vec<f64> = edges.iter().map(|_| rng.gen_range(0.5..2.0)).collect();
    let space = graph_metric(size, &edges, &lengths)?;
    let pairs = PairSet::new(&space, edges)?;
    Ok((space, pairs))
}

/// Uniform random points of the unit square with `pairs` random pairs of
/// distinct points (repeats allowed).
pub fn gen_random_instance(points: usize, pairs: usize, seed: u64) -> Result<(PointedMetricSpace, PairSet)> {
    if points < 2 {
        return Err(Error::InvalidParams("need at least two points".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<[f64; 2]> = (0..points).map(|_| [rng.gen(), rng.gen()]).collect();
    let space = PointedMetricSpace::euclidean(&coords)?;
    let list = (0..pairs)
        .map(|_| {
            let x = rng.gen_range(0..points);
            let mut y = rng.gen_range(0..points - 1);
            if y >= x {
                y += 1;
            }
            (x, y)
        })
        .collect();
    let pairs = PairSet::new(&space, list)?;
    Ok((space, pairs))
}

#[derive(Serialize, Deserialize)]
struct SpaceFile {
    labels: Vec<String>,
    base: usize,
    d: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct PairFile {
    pairs: Vec<[usize; 2]>,
}

pub fn space_to_json(space: &PointedMetricSpace) -> Result<String> {
    if space.base != 0 {
        return Err(Error::BadBase { base: space.base, points: space.len() });
    }
    let file = SpaceFile { labels: space.labels.clone(), base: 0, d: space.d.clone() };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Format(e.to_string()))
}

pub fn space_from_json(text: &str) -> Result<PointedMetricSpace> {
    let file: SpaceFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if file.base != 0 {
        return Err(Error::BadBase { base: file.base, points: file.d.len() });
    }
    PointedMetricSpace::with_labels(file.d, 0, file.labels)
}

pub fn pairs_to_json(pairs: &PairSet) -> String {
    let file = PairFile { pairs: pairs.pairs.iter().map(|&(x, y)| [x, y]).collect() };
    serde_json::to_string(&file).expect("pair lists serialize")
}

pub fn pairs_from_json(text: &str, space: &PointedMetricSpace) -> Result<PairSet> {
    let file: PairFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    PairSet::new(space, file.pairs.into_iter().map(|[x, y]| (x, y)).collect())
}

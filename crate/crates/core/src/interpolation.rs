//! The interpolation operator `T f = ((f(x_i) − f(y_i)) / d(x_i, y_i))_i`, its
//! preadjoint `S λ = Σ λ_i m_{x_i,y_i}`, and the constants
//!
//! * `M`, the smallest norm that suffices to interpolate every target in the
//!   unit ball of `ℓ∞(I)`, and
//! * `N`, the largest `c` with `‖S λ‖ ≥ c ‖λ‖₁`.
//!
//! `α ↦ M_α` is convex, so `M` is attained at a sign pattern; `λ ↦ ‖S λ‖`
//! restricted to an orthant of the `ℓ1` sphere is an LP. Both constants are
//! therefore sign-pattern sweeps (halved by the symmetry `σ ↔ −σ`), and they
//! cross-validate each other through `M · N = 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exec::Options;
use crate::free_space::{molecular_distance, FreeElement};
use crate::lip::{lip_norm_values, LipFunction};
use crate::metric::{PairSet, PointedMetricSpace};
use crate::solver::{Backend, LinearProgram, Relation, Sense, Status};

/// Ties in the sweeps are resolved towards the earliest pattern within this gap.
const TIE: f64 = 1e-9;

/// Certified enclosures reported when exhaustive enumeration is refused.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantBounds {
    #[serde(rename = "M_lower")]
    pub m_lower: f64,
    #[serde(rename = "M_upper")]
    pub m_upper: f64,
    #[serde(rename = "N_lower")]
    pub n_lower: f64,
    #[serde(rename = "N_upper")]
    pub n_upper: f64,
}

#[derive(Clone, Debug)]
pub struct Interpolant {
    pub f: LipFunction,
    /// True minimum of `‖f‖` subject to `T f = α`.
    pub norm: f64,
    /// `max(norm, 1)`, the convention under which interpolation constants are at least one.
    pub floored: f64,
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::SizeMismatch { expected, found });
    }
    Ok(())
}

/// Least-norm `f ∈ Lip₀` with `T f = α`.
pub fn min_norm_interpolant(
    space: &PointedMetricSpace,
    pairs: &PairSet,
    alpha: &[f64],
    backend: Backend,
) -> Result<Interpolant> {
    check_len(pairs.len(), alpha.len())?;
    let n = space.len();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let mut var = vec![None; n];
    for p in space.free_points() {
        var[p] = Some(lp.free_var(0.0));
    }
    let t = lp.nonneg_var(1.0);
    let diff = |p: usize, q: usize, sign: f64| {
        let mut row = Vec::with_capacity(3);
        if let Some(j) = var[p] {
            row.push((j, sign));
        }
        if let Some(j) = var[q] {
            row.push((j, -sign));
        }
        row
    };
    for p in 0..n {
        for q in p + 1..n {
            let d = space.dist(p, q);
            for sign in [1.0, -1.0] {
                let mut row = diff(p, q, sign);
                row.push((t, -d));
                lp.add_constraint(row, Relation::Le, 0.0);
            }
        }
    }
    for (&(x, y), &a) in pairs.pairs().iter().zip(alpha) {
        lp.add_constraint(diff(x, y, 1.0), Relation::Eq, a * space.dist(x, y));
    }
    let res = backend.solve(&lp)?;
    match res.status {
        Status::Optimal => {}
        Status::Infeasible => return Err(Error::Infeasible),
        Status::Unbounded => return Err(Error::NumericalFailure("interpolation program unbounded".into())),
    }
    let values: Vec<f64> = (0..n).map(|p| var[p].map_or(0.0, |j| res.primal[j])).collect();
    let norm = res.value.max(0.0);
    Ok(Interpolant { f: LipFunction::from_values(values), norm, floored: norm.max(1.0) })
}

/// Sign pattern number `k` of the half sweep: `σ_0 = +1`, and the remaining
/// signs read `k` in binary (most significant first, `0 ↦ −1`). Increasing `k`
/// is lexicographic order with `−1 < +1`.
pub fn sign_pattern(m: usize, k: usize) -> Vec<f64> {
    (0..m)
        .map(|i| if i == 0 || (k >> (m - 1 - i)) & 1 == 1 { 1.0 } else { -1.0 })
        .collect()
}

fn check_nonempty(pairs: &PairSet) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::InvalidParams("the pair set is empty".into()));
    }
    Ok(())
}

fn over_cap(pairs: &PairSet, opts: &Options) -> bool {
    pairs.len() > opts.cap as usize
}

/// Index of the best value, the earliest one within [`TIE`] of the optimum.
fn pick(values: &[f64], maximize: bool) -> usize {
    let best = values.iter().copied().fold(if maximize { f64::NEG_INFINITY } else { f64::INFINITY }, |a, b| {
        if maximize { a.max(b) } else { a.min(b) }
    });
    values
        .iter()
        .position(|&v| if maximize { v >= best - TIE } else { v <= best + TIE })
        .expect("non-empty sweep")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MConstant {
    pub value: f64,
    pub witness: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NConstant {
    pub value: f64,
    pub witness: Vec<f64>,
}

/// `M = max_σ M_σ` over the half sweep of sign patterns.
pub fn compute_m(space: &PointedMetricSpace, pairs: &PairSet, opts: &Options) -> Result<MConstant> {
    check_nonempty(pairs)?;
    let decision = decide_interpolating(space, pairs);
    if !decision.interpolating {
        return Err(Error::NotInterpolating(decision.reason));
    }
    if over_cap(pairs, opts) {
        return Err(cap_error(space, pairs, opts));
    }
    let m = pairs.len();
    let runs = opts.execution.map(1 << (m - 1), |k| {
        min_norm_interpolant(space, pairs, &sign_pattern(m, k), opts.backend).map(|r| r.norm)
    });
    let norms = runs.into_iter().collect::<Result<Vec<f64>>>().map_err(|e| match e {
        Error::Infeasible => Error::NotInterpolating("a sign pattern admits no interpolant".into()),
        e => e,
    })?;
    let k = pick(&norms, true);
    Ok(MConstant { value: norms[k].max(1.0), witness: sign_pattern(m, k) })
}

/// `min ‖S λ‖` over `λ` in the orthant of `σ` with `‖λ‖₁ = 1`; returns the
/// value and the minimizing `λ`.
pub fn orthant_lower_bound(
    space: &PointedMetricSpace,
    pairs: &PairSet,
    sigma: &[f64],
    backend: Backend,
) -> Result<(f64, Vec<f64>)> {
    check_len(pairs.len(), sigma.len())?;
    let n = space.len();
    let m = pairs.len();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let mu: Vec<usize> = (0..m).map(|_| lp.nonneg_var(0.0)).collect();
    let mut arc = vec![vec![usize::MAX; n]; n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                arc[u][v] = lp.nonneg_var(space.dist(u, v));
            }
        }
    }
    // Divergence of the flow equals Σ σ_i μ_i m_i at every point.
    let mut rows: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|p| (0..n).filter(|&q| q != p).flat_map(|q| [(arc[p][q], 1.0), (arc[q][p], -1.0)]).collect())
        .collect();
    for (i, &(x, y)) in pairs.pairs().iter().enumerate() {
        let w = sigma[i] / space.dist(x, y);
        rows[x].push((mu[i], -w));
        rows[y].push((mu[i], w));
    }
    for row in rows {
        lp.add_constraint(row, Relation::Eq, 0.0);
    }
    lp.add_constraint(mu.iter().map(|&j| (j, 1.0)).collect(), Relation::Eq, 1.0);
    let res = backend.solve(&lp)?;
    if res.status != Status::Optimal {
        return Err(Error::NumericalFailure(format!("orthant program ended {:?}", res.status)));
    }
    let lambda = (0..m).map(|i| sigma[i] * res.primal[mu[i]]).collect();
    Ok((res.value.max(0.0), lambda))
}

/// `N = min_σ` of the orthant programs. Zero exactly when the molecules are dependent.
pub fn compute_n(space: &PointedMetricSpace, pairs: &PairSet, opts: &Options) -> Result<NConstant> {
    check_nonempty(pairs)?;
    if over_cap(pairs, opts) {
        return Err(cap_error(space, pairs, opts));
    }
    let m = pairs.len();
    let runs = opts.execution.map(1 << (m - 1), |k| orthant_lower_bound(space, pairs, &sign_pattern(m, k), opts.backend));
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let k = pick(&values, false);
    Ok(NConstant { value: values[k], witness: runs[k].1.clone() })
}

/// Enclosures without exhaustive enumeration. The lower bound on `M` comes from
/// sampled sign patterns; the upper bound is the Beurling sum of the family of
/// least-norm interpolants of the unit vectors, since `Σ α_i f_i` interpolates
/// `α` with norm at most that sum times `‖α‖∞`.
pub fn constant_bounds(space: &PointedMetricSpace, pairs: &PairSet, opts: &Options) -> Result<ConstantBounds> {
    let decision = decide_interpolating(space, pairs);
    if !decision.interpolating {
        return Ok(ConstantBounds { m_lower: f64::INFINITY, m_upper: f64::INFINITY, n_lower: 0.0, n_upper: 0.0 });
    }
    let m = pairs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let patterns: Vec<Vec<f64>> = (0..opts.samples.max(1))
        .map(|_| (0..m).map(|i| if i == 0 || rng.gen::<bool>() { 1.0 } else { -1.0 }).collect())
        .collect();
    let lows = opts.execution.map(patterns.len(), |k| min_norm_interpolant(space, pairs, &patterns[k], opts.backend));
    let mut m_lower = 1.0_f64;
    for r in lows {
        m_lower = m_lower.max(r?.norm);
    }
    let family = opts.execution.map(m, |i| {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        min_norm_interpolant(space, pairs, &e, opts.backend).map(|r| r.f)
    });
    let family = family.into_iter().collect::<Result<Vec<_>>>()?;
    let m_upper = sup_sum(space, &family).max(m_lower);
    Ok(ConstantBounds { m_lower, m_upper, n_lower: 1.0 / m_upper, n_upper: 1.0 / m_lower })
}

fn cap_error(space: &PointedMetricSpace, pairs: &PairSet, opts: &Options) -> Error {
    match constant_bounds(space, pairs, opts) {
        Ok(bounds) => Error::EnumerationCapExceeded { pairs: pairs.len(), cap: opts.cap, bounds: Box::new(bounds) },
        Err(e) => e,
    }
}

/// `max_{p≠q} Σ_i |f_i(p) − f_i(q)| / d(p, q)`.
pub fn sup_sum(space: &PointedMetricSpace, family: &[LipFunction]) -> f64 {
    let n = space.len();
    let mut best = 0.0_f64;
    for p in 0..n {
        for q in p + 1..n {
            let s: f64 = family.iter().map(|f| (f.at(p) - f.at(q)).abs()).sum();
            best = best.max(s / space.dist(p, q));
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decision {
    pub interpolating: bool,
    pub reason: String,
    pub rank: usize,
    /// Pair indices closing a cycle in the pair graph.
    pub cycle_witness: Option<Vec<usize>>,
    /// Nonzero `λ` with `S λ = 0`, normalized to `‖λ‖₁ = 1`.
    pub null_vector: Option<Vec<f64>>,
    pub duplicates: Vec<(usize, usize)>,
}

/// Rank of the molecule matrix by full-pivoting elimination, with a null
/// vector when the columns are dependent.
fn molecule_rank(space: &PointedMetricSpace, pairs: &PairSet) -> (usize, Option<Vec<f64>>) {
    let n = space.len();
    let m = pairs.len();
    let mut a = vec![vec![0.0; m]; n];
    for (j, &(x, y)) in pairs.pairs().iter().enumerate() {
        let d = space.dist(x, y);
        a[x][j] = 1.0 / d;
        a[y][j] = -1.0 / d;
    }
    let col_norm = (0..m)
        .map(|j| (0..n).map(|i| a[i][j] * a[i][j]).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let threshold = 1e-9 * col_norm;
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut used = vec![false; m];
    let mut row = 0;
    while row < n {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in row..n {
            for j in 0..m {
                if !used[j] && best.is_none_or(|(_, _, b)| a[i][j].abs() > b) {
                    best = Some((i, j, a[i][j].abs()));
                }
            }
        }
        let Some((pi, pj, mag)) = best else { break };
        if mag <= threshold {
            break;
        }
        a.swap(row, pi);
        let piv = a[row][pj];
        for v in a[row].iter_mut() {
            *v /= piv;
        }
        for i in 0..n {
            if i != row && a[i][pj] != 0.0 {
                let f = a[i][pj];
                for j in 0..m {
                    a[i][j] -= f * a[row][j];
                }
            }
        }
        used[pj] = true;
        pivot_cols.push(pj);
        row += 1;
    }
    let rank = pivot_cols.len();
    let null = (0..m).find(|&j| !used[j]).map(|free| {
        let mut v = vec![0.0; m];
        v[free] = 1.0;
        for (k, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -a[k][free];
        }
        let l1: f64 = v.iter().map(|x| x.abs()).sum();
        v.iter().map(|x| if x.abs() < 1e-12 { 0.0 } else { x / l1 }).collect()
    });
    (rank, null)
}

/// First pair closing a cycle (in list order), with the tree path it closes.
pub fn find_cycle(points: usize, pairs: &PairSet) -> Option<Vec<usize>> {
    let mut parent: Vec<usize> = (0..points).collect();
    fn root(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for (i, &(x, y)) in pairs.pairs().iter().enumerate() {
        let (rx, ry) = (root(&mut parent, x), root(&mut parent, y));
        if rx != ry {
            parent[rx] = ry;
            continue;
        }
        // Path from x to y through the forest of earlier edges.
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; points];
        let mut seen = vec![false; points];
        let mut queue = std::collections::VecDeque::from([x]);
        seen[x] = true;
        while let Some(u) = queue.pop_front() {
            for (j, &(a, b)) in pairs.pairs()[..i].iter().enumerate() {
                for (from, to) in [(a, b), (b, a)] {
                    if from == u && !seen[to] {
                        seen[to] = true;
                        prev[to] = Some((u, j));
                        queue.push_back(to);
                    }
                }
            }
        }
        let mut cycle = Vec::new();
        let mut v = y;
        while let Some((u, j)) = prev[v] {
            cycle.push(j);
            v = u;
        }
        cycle.reverse();
        cycle.push(i);
        return Some(cycle);
    }
    None
}

/// Interpolation holds iff the molecules are linearly independent, which for
/// pairs read as graph edges means the pair graph is a forest.
pub fn decide_interpolating(space: &PointedMetricSpace, pairs: &PairSet) -> Decision {
    let (rank, null_vector) = molecule_rank(space, pairs);
    let cycle_witness = find_cycle(space.len(), pairs);
    let duplicates = pairs.duplicates();
    let independent = rank == pairs.len();
    let reason = match (independent, &cycle_witness) {
        (true, None) => "molecules are linearly independent; the pair graph is a forest".to_string(),
        (false, Some(c)) if c.len() == 2 => format!("pairs {} and {} repeat the same edge", c[0], c[1]),
        (false, Some(c)) => format!("the pair graph has a cycle through pairs {c:?}"),
        (false, None) => format!("molecule matrix has rank {rank} < {} but no cycle was found", pairs.len()),
        (true, Some(c)) => format!("numerically independent molecules despite the cycle {c:?}"),
    };
    Decision { interpolating: independent, reason, rank, cycle_witness, null_vector, duplicates }
}

/// `T f`.
pub fn apply_t(space: &PointedMetricSpace, pairs: &PairSet, f: &LipFunction) -> Vec<f64> {
    pairs.pairs().iter().map(|&(x, y)| (f.at(x) - f.at(y)) / space.dist(x, y)).collect()
}

/// `S λ = Σ λ_i m_{x_i,y_i}`.
pub fn apply_s(space: &PointedMetricSpace, pairs: &PairSet, lambda: &[f64]) -> Result<FreeElement> {
    check_len(pairs.len(), lambda.len())?;
    let mut c = vec![0.0; space.len()];
    for (&(x, y), &l) in pairs.pairs().iter().zip(lambda) {
        let w = l / space.dist(x, y);
        c[x] += w;
        c[y] -= w;
    }
    Ok(FreeElement { coeffs: c })
}

/// Smallest molecular distance between two listed pairs.
pub fn separation_constant(space: &PointedMetricSpace, pairs: &PairSet, opts: &Options) -> Result<f64> {
    let m = pairs.len();
    if m < 2 {
        return Err(Error::TooFewPairs { count: m });
    }
    let couples: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let dists = opts
        .execution
        .map(couples.len(), |k| molecular_distance(space, pairs.get(couples[k].0), pairs.get(couples[k].1), opts.backend));
    let mut best = f64::INFINITY;
    for d in dists {
        best = best.min(d?);
    }
    Ok(best)
}

/// Certified sufficient radius `N`: replacing every pair by one within
/// molecular distance `< N` keeps the family interpolating. Not claimed maximal.
pub fn stability_radius(space: &PointedMetricSpace, pairs: &PairSet, opts: &Options) -> Result<f64> {
    let decision = decide_interpolating(space, pairs);
    if !decision.interpolating {
        return Err(Error::NotInterpolating(decision.reason));
    }
    Ok(compute_n(space, pairs, opts)?.value)
}

/// Everything known about a pair set, with graceful degradation for
/// non-interpolating inputs (`M = ∞`, `N = 0`).
#[derive(Clone, Debug)]
pub struct InterpolationAnalysis {
    pub interpolating: bool,
    pub reason: String,
    pub m: f64,
    pub n: f64,
    pub witness_alpha: Vec<f64>,
    pub witness_lambda: Vec<f64>,
    pub separation: Option<f64>,
    pub stability_radius: f64,
    pub cycle_witness: Option<Vec<usize>>,
    pub duplicates: Vec<(usize, usize)>,
    pub bounds: Option<ConstantBounds>,
}

impl InterpolationAnalysis {
    pub fn bounds_only(&self) -> bool {
        self.bounds.is_some()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "interpolating": self.interpolating,
            "reason": self.reason,
            "M": number_or_inf(self.m),
            "N": self.n,
            "witness_alpha": self.witness_alpha,
            "witness_lambda": self.witness_lambda,
            "separation": self.separation,
            "stability_radius": self.stability_radius,
            "stability_note": "certified sufficient, possibly not maximal",
            "cycle_witness": self.cycle_witness,
            "duplicates": self.duplicates,
            "bounds_only": self.bounds_only(),
            "bounds": self.bounds,
        })
    }
}

pub(crate) fn number_or_inf(x: f64) -> Value {
    if x.is_finite() { json!(x) } else { json!("inf") }
}

pub fn analyze(space: &PointedMetricSpace, pairs: &PairSet, opts: &Options) -> Result<InterpolationAnalysis> {
    check_nonempty(pairs)?;
    let decision = decide_interpolating(space, pairs);
    let separation = match separation_constant(space, pairs, opts) {
        Ok(s) => Some(s),
        Err(Error::TooFewPairs { .. }) => None,
        Err(e) => return Err(e),
    };
    let m = pairs.len();
    let mut out = InterpolationAnalysis {
        interpolating: decision.interpolating,
        reason: decision.reason.clone(),
        m: f64::INFINITY,
        n: 0.0,
        witness_alpha: Vec::new(),
        witness_lambda: vec![0.0; m],
        separation,
        stability_radius: 0.0,
        cycle_witness: decision.cycle_witness.clone(),
        duplicates: decision.duplicates.clone(),
        bounds: None,
    };
    if !decision.interpolating {
        let null = decision.null_vector.clone().unwrap_or_else(|| vec![0.0; m]);
        out.witness_alpha = null.iter().map(|&x| if x < 0.0 { -1.0 } else { 1.0 }).collect();
        out.witness_lambda = null;
        return Ok(out);
    }
    if over_cap(pairs, opts) {
        let b = constant_bounds(space, pairs, opts)?;
        out.m = b.m_upper;
        out.n = b.n_lower;
        out.stability_radius = b.n_lower;
        out.bounds = Some(b);
        return Ok(out);
    }
    let mc = compute_m(space, pairs, opts)?;
    let nc = compute_n(space, pairs, opts)?;
    out.m = mc.value;
    out.witness_alpha = mc.witness;
    out.n = nc.value;
    out.witness_lambda = nc.witness;
    out.stability_radius = nc.value;
    Ok(out)
}

/// `‖T f‖∞ / ‖f‖`, at most one.
pub fn t_ratio(space: &PointedMetricSpace, pairs: &PairSet, f: &LipFunction) -> f64 {
    let norm = lip_norm_values(space, f.values());
    if norm == 0.0 {
        return 0.0;
    }
    apply_t(space, pairs, f).iter().fold(0.0_f64, |a, v| a.max(v.abs())) / norm
}

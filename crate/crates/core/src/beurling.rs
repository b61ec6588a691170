//! Beurling families: functions `f_i` biorthogonal to the molecules of the
//! pairs with `Σ_i |f_i(p) − f_i(q)| ≤ M d(p, q)`. Such a family makes
//! interpolation linear, `α ↦ Σ α_i f_i`. Also here: the optimal Beurling
//! norm `t*` (one joint LP), the minimum-weight matching diagnostic, and
//! interpolation constants for `ℓ1^k`- and `ℓ∞^k`-valued functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exec::Options;
use crate::interpolation::{compute_m, decide_interpolating, number_or_inf, sup_sum};
use crate::lip::{mcshane_extend, LipFunction};
use crate::metric::{check_ex1_conditions, gen_random_instance, BallConfig, PairSet, PointedMetricSpace};
use crate::solver::{Backend, LinearProgram, Relation, Sense, Status, EXACT_VARIABLE_CAP};

/// Equality tolerance between `t*` and `M`.
pub const EXISTENCE_TOL: f64 = 1e-6;
/// Gaps above this are re-solved exactly (when small enough) before being reported.
pub const GAP_RECHECK: f64 = 1e-4;
/// Largest pair count for the exhaustive matching enumeration.
pub const MATCHING_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct BeurlingFamily {
    pub functions: Vec<LipFunction>,
    pub sup_sum: f64,
}

impl BeurlingFamily {
    pub fn new(space: &PointedMetricSpace, functions: Vec<LipFunction>) -> Self {
        let sup_sum = sup_sum(space, &functions);
        BeurlingFamily { functions, sup_sum }
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn values(&self) -> Vec<Vec<f64>> {
        self.functions.iter().map(|f| f.values().to_vec()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Base { function: usize, value: f64 },
    Biorthogonality { function: usize, pair: usize, value: f64 },
    SupSum { points: [usize; 2], ratio: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BeurlingCheck {
    pub ok: bool,
    pub sup_sum: f64,
    pub violations: Vec<Violation>,
}

pub fn verify_beurling(space: &PointedMetricSpace, pairs: &PairSet, family: &BeurlingFamily, m: f64) -> Result<BeurlingCheck> {
    if family.len() != pairs.len() {
        return Err(Error::SizeMismatch { expected: pairs.len(), found: family.len() });
    }
    let mut violations = Vec::new();
    let base = space.base();
    for (i, f) in family.functions.iter().enumerate() {
        if f.values().len() != space.len() {
            return Err(Error::SizeMismatch { expected: space.len(), found: f.values().len() });
        }
        if f.at(base).abs() > 1e-12 {
            violations.push(Violation::Base { function: i, value: f.at(base) });
        }
        for (j, &(x, y)) in pairs.pairs().iter().enumerate() {
            let slope = (f.at(x) - f.at(y)) / space.dist(x, y);
            let target = if i == j { 1.0 } else { 0.0 };
            if (slope - target).abs() > 1e-6 {
                violations.push(Violation::Biorthogonality { function: i, pair: j, value: slope });
            }
        }
    }
    let n = space.len();
    let mut measured = 0.0_f64;
    for p in 0..n {
        for q in p + 1..n {
            let s: f64 = family.functions.iter().map(|f| (f.at(p) - f.at(q)).abs()).sum();
            let ratio = s / space.dist(p, q);
            measured = measured.max(ratio);
            if ratio > m + 1e-6 {
                violations.push(Violation::SupSum { points: [p, q], ratio });
            }
        }
    }
    Ok(BeurlingCheck { ok: violations.is_empty(), sup_sum: measured, violations })
}

/// `R(α) = Σ α_i f_i`.
pub fn lift_apply(family: &BeurlingFamily, alpha: &[f64]) -> Result<LipFunction> {
    if alpha.len() != family.len() {
        return Err(Error::SizeMismatch { expected: family.len(), found: alpha.len() });
    }
    let len = family.functions.first().map_or(0, |f| f.values().len());
    let mut values = vec![0.0; len];
    for (f, &a) in family.functions.iter().zip(alpha) {
        for (v, fv) in values.iter_mut().zip(f.values()) {
            *v += a * fv;
        }
    }
    Ok(LipFunction::from_values(values))
}

#[derive(Clone, Debug)]
pub struct BeurlingOptimum {
    pub t_star: f64,
    pub family: BeurlingFamily,
}

fn beurling_lp(space: &PointedMetricSpace, pairs: &PairSet) -> (LinearProgram<f64>, Vec<Vec<Option<usize>>>) {
    let n = space.len();
    let m = pairs.len();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let t = lp.nonneg_var(1.0);
    let f: Vec<Vec<Option<usize>>> = (0..m)
        .map(|_| (0..n).map(|p| (p != space.base()).then(|| lp.free_var(0.0))).collect())
        .collect();
    let diff = |i: usize, p: usize, q: usize, sign: f64| {
        let mut row = Vec::with_capacity(3);
        if let Some(j) = f[i][p] {
            row.push((j, sign));
        }
        if let Some(j) = f[i][q] {
            row.push((j, -sign));
        }
        row
    };
    let mut slack_rows = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            let mut total = vec![(t, -space.dist(p, q))];
            for i in 0..m {
                let s = lp.nonneg_var(0.0);
                total.push((s, 1.0));
                for sign in [1.0, -1.0] {
                    let mut row = diff(i, p, q, sign);
                    row.push((s, -1.0));
                    slack_rows.push(row);
                }
            }
            lp.add_constraint(total, Relation::Le, 0.0);
        }
    }
    for row in slack_rows {
        lp.add_constraint(row, Relation::Le, 0.0);
    }
    for i in 0..m {
        for (j, &(x, y)) in pairs.pairs().iter().enumerate() {
            let rhs = if i == j { space.dist(x, y) } else { 0.0 };
            lp.add_constraint(diff(i, x, y, 1.0), Relation::Eq, rhs);
        }
    }
    (lp, f)
}

/// Least `t` such that a biorthogonal family with Beurling sum `t` exists.
pub fn beurling_optimal_norm(space: &PointedMetricSpace, pairs: &PairSet, backend: Backend) -> Result<BeurlingOptimum> {
    let decision = decide_interpolating(space, pairs);
    if !decision.interpolating {
        return Err(Error::NotInterpolating(decision.reason));
    }
    let (lp, f) = beurling_lp(space, pairs);
    let res = backend.solve(&lp)?;
    if res.status != Status::Optimal {
        return Err(Error::NumericalFailure(format!("Beurling program ended {:?}", res.status)));
    }
    let functions: Vec<LipFunction> = f
        .iter()
        .map(|vars| LipFunction::from_values(vars.iter().map(|v| v.map_or(0.0, |j| res.primal[j])).collect()))
        .collect();
    Ok(BeurlingOptimum { t_star: res.value, family: BeurlingFamily::new(space, functions) })
}

/// Number of original variables of the Beurling program, for exact-mode gating.
pub fn beurling_program_size(space: &PointedMetricSpace, pairs: &PairSet) -> usize {
    let n = space.len();
    let m = pairs.len();
    1 + m * (n - 1) + m * n * (n - 1) / 2
}

/// The unique biorthogonal family of a spanning tree: `f_i = ±d_i` on the
/// side of edge `i` away from the base, zero elsewhere.
pub fn construct_beurling_tree(space: &PointedMetricSpace, pairs: &PairSet) -> Result<BeurlingFamily> {
    let n = space.len();
    if let Some(cycle) = crate::interpolation::find_cycle(n, pairs) {
        return Err(Error::NotATree { reason: "the pair graph has a cycle".into(), cycle: Some(cycle), unreached: vec![] });
    }
    // Parent edge of every point reached from the base.
    let mut parent_edge: Vec<Option<usize>> = vec![None; n];
    let mut reached = vec![false; n];
    let mut order = vec![space.base()];
    reached[space.base()] = true;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for (j, &(x, y)) in pairs.pairs().iter().enumerate() {
            for (a, b) in [(x, y), (y, x)] {
                if a == u && !reached[b] {
                    reached[b] = true;
                    parent_edge[b] = Some(j);
                    order.push(b);
                }
            }
        }
    }
    let unreached: Vec<usize> = (0..n).filter(|&p| !reached[p]).collect();
    if !unreached.is_empty() {
        return Err(Error::NotATree {
            reason: "the pair graph does not connect every point to the base".into(),
            cycle: None,
            unreached,
        });
    }
    let functions = (0..pairs.len())
        .map(|i| {
            let (x, y) = pairs.get(i);
            let d = space.dist(x, y);
            let mut values = vec![0.0; n];
            for &p in &order[1..] {
                let j = parent_edge[p].expect("reached point has a parent edge");
                let (a, b) = pairs.get(j);
                let parent = if a == p { b } else { a };
                let step = if j != i {
                    0.0
                } else if p == x {
                    d
                } else {
                    -d
                };
                values[p] = values[parent] + step;
            }
            LipFunction::from_values(values)
        })
        .collect();
    Ok(BeurlingFamily::new(space, functions))
}

/// The disjoint-ball family: `g_i = 0` off the ball around `x_i` (and at
/// `x_i`), `g_i(y_i) = −d(x_i, y_i)`, extended by McShane with constant one.
pub fn construct_beurling_clusters(space: &PointedMetricSpace, pairs: &PairSet, cfg: &BallConfig) -> Result<BeurlingFamily> {
    if cfg.radii.len() != pairs.len() {
        return Err(Error::SizeMismatch { expected: pairs.len(), found: cfg.radii.len() });
    }
    if let Some(condition) = check_ex1_conditions(space, pairs, cfg).first_failure() {
        return Err(Error::ConditionsFail { condition });
    }
    let functions = pairs
        .pairs()
        .iter()
        .zip(&cfg.radii)
        .map(|(&(x, y), &r)| {
            let ball = space.open_ball(x, r);
            let mut domain: Vec<usize> = (0..space.len()).filter(|p| !ball.contains(p)).collect();
            for p in [x, y] {
                if !domain.contains(&p) {
                    domain.push(p);
                }
            }
            let g: Vec<f64> = domain.iter().map(|&z| if z == y { -space.dist(x, z) } else { 0.0 }).collect();
            mcshane_extend(space, &domain, &g, 1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BeurlingFamily::new(space, functions))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchingReport {
    pub is_min_matching: bool,
    pub min_cost: f64,
    pub pair_cost: f64,
    /// A minimum-weight matching of the endpoints.
    pub matching: Vec<[usize; 2]>,
}

fn best_matching(space: &PointedMetricSpace, free: &[usize], cost: f64, best: &mut (f64, Vec<[usize; 2]>), current: &mut Vec<[usize; 2]>) {
    if cost >= best.0 {
        return;
    }
    let Some(&first) = free.first() else {
        *best = (cost, current.clone());
        return;
    };
    for k in 1..free.len() {
        let partner = free[k];
        let rest: Vec<usize> = free.iter().copied().enumerate().filter(|&(i, _)| i != 0 && i != k).map(|(_, p)| p).collect();
        current.push([first, partner]);
        best_matching(space, &rest, cost + space.dist(first, partner), best, current);
        current.pop();
    }
}

/// Compares `Σ d(x_i, y_i)` with the cheapest perfect matching of all endpoints.
pub fn matching_diagnostic(space: &PointedMetricSpace, pairs: &PairSet, opts: &Options) -> Result<MatchingReport> {
    let endpoints = pairs.endpoints();
    if endpoints.len() != 2 * pairs.len() {
        return Err(Error::NotApplicable("pairs share endpoints".into()));
    }
    if pairs.len() > MATCHING_CAP {
        return Err(Error::CapExceeded { what: "matching enumeration".into(), size: pairs.len(), cap: MATCHING_CAP });
    }
    let pair_cost: f64 = pairs.pairs().iter().map(|&(x, y)| space.dist(x, y)).sum();
    let first = endpoints[0];
    // Branch on the partner of the first endpoint; each branch is exhaustive.
    let branches = opts.execution.map(endpoints.len() - 1, |k| {
        let partner = endpoints[k + 1];
        let rest: Vec<usize> = endpoints[1..].iter().copied().filter(|&p| p != partner).collect();
        let mut best = (f64::INFINITY, Vec::new());
        let mut current = vec![[first, partner]];
        best_matching(space, &rest, space.dist(first, partner), &mut best, &mut current);
        best
    });
    let (min_cost, matching) = branches
        .into_iter()
        .fold((f64::INFINITY, Vec::new()), |acc, b| if b.0 < acc.0 { b } else { acc });
    let is_min_matching = pair_cost <= min_cost + 1e-9 * pair_cost.max(1.0);
    Ok(MatchingReport { is_min_matching, min_cost, pair_cost, matching })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L1,
    Linf,
}

impl NormKind {
    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            NormKind::L1 => v.iter().map(|x| x.abs()).sum(),
            NormKind::Linf => v.iter().fold(0.0, |a, x| a.max(x.abs())),
        }
    }

    /// Extreme points of the unit ball of `ℝ^k` under this norm.
    pub fn extreme_points(self, k: usize) -> Vec<Vec<f64>> {
        match self {
            NormKind::L1 => (0..k)
                .flat_map(|j| {
                    [1.0, -1.0].map(|s| {
                        let mut v = vec![0.0; k];
                        v[j] = s;
                        v
                    })
                })
                .collect(),
            NormKind::Linf => (0..1usize << k)
                .map(|b| (0..k).map(|j| if (b >> (k - 1 - j)) & 1 == 1 { 1.0 } else { -1.0 }).collect())
                .collect(),
        }
    }
}

/// `ℝ^k`-valued function vanishing at the base, row `p` holding `f(p)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VectorLipFunction {
    pub values: Vec<Vec<f64>>,
    pub norm: NormKind,
}

impl VectorLipFunction {
    pub fn lip_norm(&self, space: &PointedMetricSpace) -> f64 {
        let n = space.len();
        let mut best = 0.0_f64;
        for p in 0..n {
            for q in p + 1..n {
                let diff: Vec<f64> = self.values[p].iter().zip(&self.values[q]).map(|(a, b)| a - b).collect();
                best = best.max(self.norm.norm(&diff) / space.dist(p, q));
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VectorConstant {
    pub value: f64,
    /// Extreme-point targets attaining the value, one per pair.
    pub witness: Vec<Vec<f64>>,
    pub interpolant: VectorLipFunction,
    /// LPs solved after symmetry reduction.
    pub programs: usize,
}

/// Least-norm `E`-valued interpolant of the targets `v_i`.
pub fn min_norm_vector_interpolant(
    space: &PointedMetricSpace,
    pairs: &PairSet,
    targets: &[Vec<f64>],
    norm: NormKind,
    backend: Backend,
) -> Result<(f64, VectorLipFunction)> {
    if targets.len() != pairs.len() {
        return Err(Error::SizeMismatch { expected: pairs.len(), found: targets.len() });
    }
    let k = targets.first().map_or(1, Vec::len);
    let n = space.len();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let t = lp.nonneg_var(1.0);
    let var: Vec<Vec<Option<usize>>> =
        (0..n).map(|p| (0..k).map(|_| (p != space.base()).then(|| lp.free_var(0.0))).collect()).collect();
    // ‖Δ‖ ≤ t d as a family of linear inequalities s·Δ ≤ t d.
    let dual_signs: Vec<Vec<f64>> = match norm {
        NormKind::L1 => NormKind::Linf.extreme_points(k),
        NormKind::Linf => NormKind::L1.extreme_points(k),
    };
    for p in 0..n {
        for q in p + 1..n {
            for s in &dual_signs {
                let mut row = vec![(t, -space.dist(p, q))];
                for j in 0..k {
                    if s[j] == 0.0 {
                        continue;
                    }
                    if let Some(v) = var[p][j] {
                        row.push((v, s[j]));
                    }
                    if let Some(v) = var[q][j] {
                        row.push((v, -s[j]));
                    }
                }
                lp.add_constraint(row, Relation::Le, 0.0);
            }
        }
    }
    for (&(x, y), v) in pairs.pairs().iter().zip(targets) {
        for j in 0..k {
            let mut row = Vec::new();
            if let Some(a) = var[x][j] {
                row.push((a, 1.0));
            }
            if let Some(b) = var[y][j] {
                row.push((b, -1.0));
            }
            lp.add_constraint(row, Relation::Eq, v[j] * space.dist(x, y));
        }
    }
    let res = backend.solve(&lp)?;
    match res.status {
        Status::Optimal => {}
        Status::Infeasible => return Err(Error::Infeasible),
        Status::Unbounded => return Err(Error::NumericalFailure("vector interpolation program unbounded".into())),
    }
    let values = var.iter().map(|row| row.iter().map(|v| v.map_or(0.0, |j| res.primal[j])).collect()).collect();
    Ok((res.value.max(0.0), VectorLipFunction { values, norm }))
}

/// Signed permutations of `k` coordinates, as actions on extreme-point indices.
fn symmetry_actions(points: &[Vec<f64>], k: usize) -> Vec<Vec<usize>> {
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..k {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..k).filter(|j| !p.contains(j)).map(|j| [p.clone(), vec![j]].concat()).collect::<Vec<_>>()
            })
            .collect();
    }
    let mut actions = Vec::new();
    for perm in &perms {
        for signs in 0..1usize << k {
            let act: Vec<usize> = points
                .iter()
                .map(|v| {
                    let mut w = vec![0.0; k];
                    for j in 0..k {
                        let s = if (signs >> j) & 1 == 1 { -1.0 } else { 1.0 };
                        w[perm[j]] = s * v[j];
                    }
                    points.iter().position(|u| *u == w).expect("isometries permute extreme points")
                })
                .collect();
            actions.push(act);
        }
    }
    actions
}

fn digits(mut code: u64, base: usize, m: usize) -> Vec<usize> {
    let mut out = vec![0; m];
    for slot in out.iter_mut().rev() {
        *slot = (code % base as u64) as usize;
        code /= base as u64;
    }
    out
}

/// `M_E` for `E = ℓ1^k` or `ℓ∞^k`, `k ≤ 3`: the largest least-norm over
/// tuples of extreme points, one tuple per orbit of the isometry group of `E`.
pub fn compute_m_vector(
    space: &PointedMetricSpace,
    pairs: &PairSet,
    k: usize,
    norm: NormKind,
    opts: &Options,
) -> Result<VectorConstant> {
    if k == 0 || k > 3 {
        return Err(Error::InvalidParams(format!("dimension {k} is outside 1..=3")));
    }
    let decision = decide_interpolating(space, pairs);
    if !decision.interpolating {
        return Err(Error::NotInterpolating(decision.reason));
    }
    let m = pairs.len();
    let points = norm.extreme_points(k);
    let e = points.len();
    let total = (e as f64).powi(m as i32);
    if total > 2f64.powi(opts.cap as i32) {
        return Err(Error::CapExceeded { what: "extreme-point tuples".into(), size: total as usize, cap: 1 << opts.cap });
    }
    let total = total as u64;
    let actions = symmetry_actions(&points, k);
    let canonical: Vec<u64> = (0..total)
        .filter(|&code| {
            let tuple = digits(code, e, m);
            actions.iter().all(|act| {
                let image: Vec<usize> = tuple.iter().map(|&d| act[d]).collect();
                image >= tuple
            })
        })
        .collect();
    let runs = opts.execution.map(canonical.len(), |i| {
        let targets: Vec<Vec<f64>> = digits(canonical[i], e, m).into_iter().map(|d| points[d].clone()).collect();
        min_norm_vector_interpolant(space, pairs, &targets, norm, opts.backend).map(|r| (r, targets))
    });
    type Candidate = ((f64, VectorLipFunction), Vec<Vec<f64>>);
    let mut best: Option<Candidate> = None;
    for r in runs {
        let r = r.map_err(|e| match e {
            Error::Infeasible => Error::NotInterpolating("an extreme-point target admits no interpolant".into()),
            e => e,
        })?;
        if best.as_ref().is_none_or(|b| r.0 .0 > b.0 .0 + 1e-9) {
            best = Some(r);
        }
    }
    let ((value, interpolant), witness) = best.expect("at least one tuple");
    Ok(VectorConstant { value: value.max(1.0), witness, interpolant, programs: canonical.len() })
}

/// `t*` with the existence verdict; large gaps are confirmed exactly when
/// the program fits the exact solver.
#[derive(Clone, Debug)]
pub struct BeurlingVerdict {
    pub t_star: f64,
    pub m: f64,
    pub exists: bool,
    pub family: BeurlingFamily,
    /// `Some(true)` when an exact re-solve confirmed a gap above [`GAP_RECHECK`].
    pub exact_confirmed: Option<bool>,
}

pub fn beurling_verdict(space: &PointedMetricSpace, pairs: &PairSet, opts: &Options) -> Result<BeurlingVerdict> {
    let m = compute_m(space, pairs, opts)?.value;
    let mut opt = beurling_optimal_norm(space, pairs, opts.backend)?;
    let mut exact_confirmed = None;
    if opt.t_star > m + GAP_RECHECK
        && opts.backend == Backend::Float
        && beurling_program_size(space, pairs) <= EXACT_VARIABLE_CAP
    {
        let exact = beurling_optimal_norm(space, pairs, Backend::Exact)?;
        let m_exact = compute_m(space, pairs, &Options { backend: Backend::Exact, ..*opts })?.value;
        exact_confirmed = Some(exact.t_star > m_exact + GAP_RECHECK);
        opt = exact;
    }
    let exists = (opt.t_star - m).abs() <= EXISTENCE_TOL;
    Ok(BeurlingVerdict { t_star: opt.t_star, m, exists, family: opt.family, exact_confirmed })
}

/// Full Beurling report: verdict, matching diagnostic and vector constants.
pub fn beurling_report(space: &PointedMetricSpace, pairs: &PairSet, opts: &Options) -> Result<Value> {
    let verdict = beurling_verdict(space, pairs, opts)?;
    let matching = match matching_diagnostic(space, pairs, opts) {
        Ok(r) => serde_json::to_value(r).expect("matching report serializes"),
        Err(e @ (Error::NotApplicable(_) | Error::CapExceeded { .. })) => json!({ "applicable": false, "reason": e.to_string() }),
        Err(e) => return Err(e),
    };
    let vector = |norm| match compute_m_vector(space, pairs, 2, norm, opts) {
        Ok(v) => Ok(json!(v.value)),
        Err(Error::CapExceeded { .. }) => Ok(Value::Null),
        Err(e) => Err(e),
    };
    Ok(json!({
        "t_star": verdict.t_star,
        "M": number_or_inf(verdict.m),
        "beurling_exists": verdict.exists,
        "exact_confirmed": verdict.exact_confirmed,
        "family": verdict.family.values(),
        "sup_sum": verdict.family.sup_sum,
        "matching": matching,
        "M_vector": { "l1_2": vector(NormKind::L1)?, "linf_2": vector(NormKind::Linf)? },
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct GapFinding {
    pub seed: u64,
    pub points: usize,
    pub pairs: Vec<[usize; 2]>,
    pub t_star: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub gap: f64,
    pub exact_confirmed: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub instances: usize,
    pub max_gap: f64,
    pub findings: Vec<GapFinding>,
    pub note: &'static str,
}

/// Random search for interpolating pair sets with `t* > M`. Findings are
/// reported as data; nothing is concluded from their presence or absence.
pub fn probe_beurling_gap(count: usize, seed: u64, opts: &Options) -> Result<ProbeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut findings = Vec::new();
    let mut max_gap = f64::NEG_INFINITY;
    let mut instances = 0;
    let mut attempts = 0;
    while instances < count && attempts < count * 20 {
        attempts += 1;
        let inst_seed: u64 = rng.gen();
        let points = rng.gen_range(3..=6);
        let npairs = rng.gen_range(2..=3.min(points - 1));
        let (space, pairs) = gen_random_instance(points, npairs, inst_seed)?;
        if !decide_interpolating(&space, &pairs).interpolating {
            continue;
        }
        instances += 1;
        let v = beurling_verdict(&space, &pairs, opts)?;
        let gap = v.t_star - v.m;
        max_gap = max_gap.max(gap);
        if gap > GAP_RECHECK {
            findings.push(GapFinding {
                seed: inst_seed,
                points,
                pairs: pairs.pairs().iter().map(|&(x, y)| [x, y]).collect(),
                t_star: v.t_star,
                m: v.m,
                gap,
                exact_confirmed: v.exact_confirmed,
            });
        }
    }
    Ok(ProbeReport {
        instances,
        max_gap,
        findings,
        note: "finite random search; absence of findings does not settle existence in general",
    })
}

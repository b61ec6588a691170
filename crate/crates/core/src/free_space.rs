//! Elements of the Lipschitz-free space of a finite pointed metric space.
//!
//! A zero-mass combination of point evaluations has free-space norm equal to
//! its optimal transport cost. The primal side is solved as a min-cost flow
//! (or as an exact transport LP), the dual side as an LP over the unit ball
//! of `Lip₀`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lip::LipFunction;
use crate::metric::PointedMetricSpace;
use crate::solver::{solve_mincost_flow, Backend, LinearProgram, Relation, Sense, Status};

/// Signed coefficients of `Σ c_p δ_p` with `Σ c_p = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeElement {
    pub coeffs: Vec<f64>,
}

fn check_mass(coeffs: &[f64]) -> Result<()> {
    let sum: f64 = coeffs.iter().sum();
    let l1: f64 = coeffs.iter().map(|c| c.abs()).sum();
    if sum.abs() > 1e-12 * l1.max(1.0) {
        return Err(Error::MassImbalance { sum });
    }
    Ok(())
}

impl FreeElement {
    pub fn new(space: &PointedMetricSpace, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.len() {
            return Err(Error::SizeMismatch { expected: space.len(), found: coeffs.len() });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams("coefficients must be finite".into()));
        }
        check_mass(&coeffs)?;
        Ok(FreeElement { coeffs })
    }

    pub fn zero(space: &PointedMetricSpace) -> Self {
        FreeElement { coeffs: vec![0.0; space.len()] }
    }

    /// `m_{x,y} = (δ_x − δ_y) / d(x, y)`.
    pub fn molecule(space: &PointedMetricSpace, (x, y): (usize, usize)) -> Result<Self> {
        if x == y {
            return Err(Error::DegeneratePair { index: 0, point: x });
        }
        let mut coeffs = vec![0.0; space.len()];
        let d = space.dist(x, y);
        coeffs[x] = 1.0 / d;
        coeffs[y] = -1.0 / d;
        Ok(FreeElement { coeffs })
    }

    pub fn minus(&self, other: &FreeElement) -> FreeElement {
        FreeElement { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }

    /// The pairing `⟨f, γ⟩ = Σ c_p f(p)`.
    pub fn eval(&self, f: &LipFunction) -> f64 {
        self.coeffs.iter().zip(f.values()).map(|(c, v)| c * v).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term {
    pub lambda: f64,
    pub pair: [usize; 2],
}

/// `γ = Σ λ_k m_{u_k, v_k}` with `total = Σ |λ_k|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoleculeDecomposition {
    pub terms: Vec<Term>,
    pub total: f64,
}

impl MoleculeDecomposition {
    pub fn reconstruct(&self, space: &PointedMetricSpace) -> Vec<f64> {
        let mut c = vec![0.0; space.len()];
        for t in &self.terms {
            let [u, v] = t.pair;
            let w = t.lambda / space.dist(u, v);
            c[u] += w;
            c[v] -= w;
        }
        c
    }
}

fn transport_lp(space: &PointedMetricSpace, coeffs: &[f64]) -> (LinearProgram<f64>, Vec<Vec<usize>>) {
    let n = space.len();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let mut arc = vec![vec![usize::MAX; n]; n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                arc[u][v] = lp.nonneg_var(space.dist(u, v));
            }
        }
    }
    for p in 0..n {
        let row = (0..n).filter(|&q| q != p).flat_map(|q| [(arc[p][q], 1.0), (arc[q][p], -1.0)]).collect();
        lp.add_constraint(row, Relation::Eq, coeffs[p]);
    }
    (lp, arc)
}

/// Optimal transport plan for `γ`: `flow[u][v]` units move from `u` to `v`.
fn optimal_flow(space: &PointedMetricSpace, gamma: &FreeElement, backend: Backend) -> Result<(f64, Vec<Vec<f64>>)> {
    check_mass(&gamma.coeffs)?;
    match backend {
        Backend::Float => {
            let sol = solve_mincost_flow(&gamma.coeffs, space.matrix())?;
            Ok((sol.value, sol.flow))
        }
        Backend::Exact => {
            // Exact rationals only tolerate exactly balanced data.
            let (lp, arc) = transport_lp(space, &gamma.coeffs);
            let res = backend.solve(&lp)?;
            if res.status != Status::Optimal {
                return Err(Error::NumericalFailure("transport program not solved to optimality".into()));
            }
            let n = space.len();
            let flow = (0..n)
                .map(|u| (0..n).map(|v| if u == v { 0.0 } else { res.primal[arc[u][v]] }).collect())
                .collect();
            Ok((res.value, flow))
        }
    }
}

/// Free-space norm of `γ` as a minimum transport cost.
pub fn free_norm(space: &PointedMetricSpace, gamma: &FreeElement, backend: Backend) -> Result<f64> {
    optimal_flow(space, gamma, backend).map(|(v, _)| v)
}

/// `max ⟨f, γ⟩` over `f` in the unit ball of `Lip₀`, with an optimal `f`.
pub fn free_norm_dual(space: &PointedMetricSpace, gamma: &FreeElement, backend: Backend) -> Result<(f64, LipFunction)> {
    check_mass(&gamma.coeffs)?;
    let n = space.len();
    let base = space.base();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let mut var = vec![None; n];
    for p in space.free_points() {
        var[p] = Some(lp.free_var(gamma.coeffs[p]));
    }
    for p in 0..n {
        for q in p + 1..n {
            let d = space.dist(p, q);
            let mut diff = Vec::with_capacity(2);
            if let Some(j) = var[p] {
                diff.push((j, 1.0));
            }
            if let Some(j) = var[q] {
                diff.push((j, -1.0));
            }
            lp.add_constraint(diff.clone(), Relation::Le, d);
            lp.add_constraint(diff, Relation::Ge, -d);
        }
    }
    let res = backend.solve(&lp)?;
    if res.status != Status::Optimal {
        return Err(Error::NumericalFailure(format!("dual transport program ended {:?}", res.status)));
    }
    let mut values = vec![0.0; n];
    for p in 0..n {
        if p != base {
            values[p] = res.primal[var[p].expect("free point has a variable")];
        }
    }
    Ok((res.value, LipFunction::from_values(values)))
}

/// Arc decomposition of an optimal flow, largest flows first (ties by arc index).
pub fn optimal_decomposition(
    space: &PointedMetricSpace,
    gamma: &FreeElement,
    backend: Backend,
) -> Result<MoleculeDecomposition> {
    let (_, flow) = optimal_flow(space, gamma, backend)?;
    let n = space.len();
    let mut arcs: Vec<(usize, usize, f64)> = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if flow[u][v] > 0.0 {
                arcs.push((u, v, flow[u][v]));
            }
        }
    }
    arcs.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let terms: Vec<Term> = arcs.iter().map(|&(u, v, w)| Term { lambda: w * space.dist(u, v), pair: [u, v] }).collect();
    let total = terms.iter().map(|t| t.lambda.abs()).sum();
    Ok(MoleculeDecomposition { terms, total })
}

/// `ρ(p, q) = ‖m_p − m_q‖`.
pub fn molecular_distance(space: &PointedMetricSpace, p: (usize, usize), q: (usize, usize), backend: Backend) -> Result<f64> {
    let mp = FreeElement::molecule(space, p)?;
    let mq = FreeElement::molecule(space, q)?;
    if p == q {
        return Ok(0.0);
    }
    free_norm(space, &mp.minus(&mq), backend)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CascalesBounds {
    pub rho: f64,
    pub upper: f64,
    pub lower_applicable: bool,
    pub lower: f64,
}

/// Two-sided metric estimates of `ρ(p, q)` for `p = (x, y)`, `q = (u, v)`:
/// `ρ ≤ 2 (d(x,u) + d(y,v)) / max(d(x,y), d(u,v))`, and when `ρ < 1`,
/// `max(d(x,u), d(y,v)) / min(d(x,y), d(u,v)) ≤ ρ`.
pub fn cascales_bounds(space: &PointedMetricSpace, p: (usize, usize), q: (usize, usize), backend: Backend) -> Result<CascalesBounds> {
    let rho = molecular_distance(space, p, q, backend)?;
    let ((x, y), (u, v)) = (p, q);
    let (dxy, duv) = (space.dist(x, y), space.dist(u, v));
    let upper = 2.0 * (space.dist(x, u) + space.dist(y, v)) / dxy.max(duv);
    let lower = space.dist(x, u).max(space.dist(y, v)) / dxy.min(duv);
    Ok(CascalesBounds { rho, upper, lower_applicable: rho < 1.0, lower })
}

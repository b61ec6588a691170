//! Uncapacitated min-cost flow on a complete digraph by successive shortest
//! paths (Bellman–Ford on the residual graph, since reverse arcs carry
//! negative costs).

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct FlowSolution {
    pub value: f64,
    /// `flow[u][v]` is the mass moved along the arc `u → v`.
    pub flow: Vec<Vec<f64>>,
}

/// Mass tolerance relative to the total variation of `divergence`.
pub(crate) fn mass_tolerance(divergence: &[f64]) -> f64 {
    let l1: f64 = divergence.iter().map(|x| x.abs()).sum();
    1e-12 * l1.max(1.0)
}

/// Minimize `Σ flow[u][v]·costs[u][v]` over nonnegative flows whose
/// divergence (outflow minus inflow) at every node equals `divergence`.
pub fn solve_mincost_flow(divergence: &[f64], costs: &[Vec<f64>]) -> Result<FlowSolution> {
    let n = divergence.len();
    if costs.len() != n || costs.iter().any(|r| r.len() != n) {
        return Err(Error::SizeMismatch { expected: n, found: costs.len() });
    }
    let sum: f64 = divergence.iter().sum();
    if sum.abs() > mass_tolerance(divergence) {
        return Err(Error::MassImbalance { sum });
    }
    if costs.iter().flatten().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::InvalidParams("arc costs must be finite and nonnegative".into()));
    }

    let mut supply = divergence.to_vec();
    let mut flow = vec![vec![0.0; n]; n];
    let eps = mass_tolerance(divergence) * 1e-3;

    loop {
        let sources: Vec<usize> = (0..n).filter(|&i| supply[i] > eps).collect();
        let sinks: Vec<usize> = (0..n).filter(|&i| supply[i] < -eps).collect();
        if sources.is_empty() || sinks.is_empty() {
            break;
        }
        let (dist, pred) = shortest_paths(&sources, &flow, costs);
        let Some(&t) = sinks
            .iter()
            .filter(|&&t| dist[t].is_finite())
            .min_by(|&&a, &&b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)))
        else {
            return Err(Error::NumericalFailure("no augmenting path in complete graph".into()));
        };

        // Trace the path back and find its bottleneck.
        let mut path = Vec::new();
        let mut v = t;
        while let Some((u, forward)) = pred[v] {
            path.push((u, v, forward));
            v = u;
        }
        let s = v;
        let mut amount = supply[s].min(-supply[t]);
        for &(u, v, forward) in &path {
            if !forward {
                amount = amount.min(flow[v][u]);
            }
        }
        for &(u, v, forward) in &path {
            if forward {
                flow[u][v] += amount;
            } else {
                flow[v][u] -= amount;
                if flow[v][u] < eps {
                    flow[v][u] = 0.0;
                }
            }
        }
        supply[s] -= amount;
        supply[t] += amount;
    }

    let value = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .map(|(u, v)| flow[u][v] * costs[u][v])
        .sum();
    Ok(FlowSolution { value, flow })
}

type Pred = Option<(usize, bool)>;

/// Multi-source Bellman–Ford. `pred[v] = (u, forward)` names the residual
/// arc entering `v`; `forward == false` means cancelling flow on `v → u`.
fn shortest_paths(sources: &[usize], flow: &[Vec<f64>], costs: &[Vec<f64>]) -> (Vec<f64>, Vec<Pred>) {
    let n = flow.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Pred> = vec![None; n];
    for &s in sources {
        dist[s] = 0.0;
    }
    for _ in 0..n {
        let mut changed = false;
        for u in 0..n {
            if !dist[u].is_finite() {
                continue;
            }
            for v in 0..n {
                if u == v {
                    continue;
                }
                let fwd = dist[u] + costs[u][v];
                if fwd < dist[v] - 1e-12 {
                    dist[v] = fwd;
                    pred[v] = Some((u, true));
                    changed = true;
                }
                if flow[v][u] > 0.0 {
                    let back = dist[u] - costs[v][u];
                    if back < dist[v] - 1e-12 {
                        dist[v] = back;
                        pred[v] = Some((u, false));
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    (dist, pred)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_lp, LinearProgram, Relation, Sense};

    fn line(n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect()).collect()
    }

    #[test]
    fn unit_transfer() {
        let costs = vec![vec![0.0, 2.5], vec![2.5, 0.0]];
        let sol = solve_mincost_flow(&[1.0, -1.0], &costs).unwrap();
        assert_eq!(sol.value, 2.5);
        assert_eq!(sol.flow[0][1], 1.0);
    }

    #[test]
    fn split_mass_on_line() {
        let sol = solve_mincost_flow(&[-0.5, 1.0, -0.5], &line(3)).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-15);
        assert_eq!(sol.flow[1][0], 0.5);
        assert_eq!(sol.flow[1][2], 0.5);
    }

    #[test]
    fn zero_divergence() {
        let sol = solve_mincost_flow(&[0.0; 4], &line(4)).unwrap();
        assert_eq!(sol.value, 0.0);
        assert!(sol.flow.iter().flatten().all(|&f| f == 0.0));
    }

    #[test]
    fn imbalance_rejected() {
        assert!(matches!(solve_mincost_flow(&[1.0, 0.0], &line(2)), Err(Error::MassImbalance { .. })));
    }

    #[test]
    fn non_metric_costs_route_through_cheap_node() {
        // Direct 0 → 2 costs 10, the detour via 1 costs 2.
        let costs = vec![vec![0.0, 1.0, 10.0], vec![1.0, 0.0, 1.0], vec![10.0, 1.0, 0.0]];
        let sol = solve_mincost_flow(&[1.0, 0.0, -1.0], &costs).unwrap();
        assert!((sol.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn agrees_with_transport_lp() {
        let div = [0.3, -0.7, 0.9, -0.2, -0.3];
        let pts: [f64; 5] = [0.0, 0.4, 1.3, 2.0, 2.2];
        let costs: Vec<Vec<f64>> =
            pts.iter().map(|a| pts.iter().map(|b| (a - b).abs() * (1.0 + 0.1 * a)).collect()).collect();
        let sol = solve_mincost_flow(&div, &costs).unwrap();

        let mut lp = LinearProgram::new(Sense::Minimize);
        let mut vars = vec![vec![usize::MAX; 5]; 5];
        for u in 0..5 {
            for v in 0..5 {
                if u != v {
                    vars[u][v] = lp.nonneg_var(costs[u][v]);
                }
            }
        }
        for p in 0..5 {
            let mut row = Vec::new();
            for q in 0..5 {
                if q != p {
                    row.push((vars[p][q], 1.0));
                    row.push((vars[q][p], -1.0));
                }
            }
            lp.add_constraint(row, Relation::Eq, div[p]);
        }
        let r = solve_lp(&lp).unwrap();
        assert!((r.value - sol.value).abs() < 1e-9, "{} vs {}", r.value, sol.value);
    }
}

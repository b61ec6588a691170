//! Dense two-phase tableau simplex.
//!
//! The program is brought into standard form (nonnegative columns, one
//! identity column per row) and solved with Dantzig's rule. After a run of
//! degenerate pivots the rule switches permanently to Bland's, which cannot
//! cycle. Every tie is broken by lowest index, so identical inputs replay the
//! same pivot sequence.
//!
//! In floating point the ratio test is Harris's two-pass variant, and the
//! tableau is periodically rebuilt from the original rows for the current
//! basis so that rounding error does not accumulate across pivots.

use super::{LinearProgram, LpNum, Relation, Sense, SolveResult, Status};
use crate::error::{Error, Result};

const DEGENERATE_RUN: usize = 50;
const MAX_PIVOTS: usize = 200_000;
const REFACTOR_EVERY: usize = 200;
/// Optimality re-checks after a rebuild before the result is accepted as is.
const REFACTOR_ROUNDS: usize = 5;
/// Relative size of the right-hand-side relaxation used against degeneracy.
const PERTURBATION: f64 = 1e-7;
const REPAIR_TOL: f64 = 1e-11;

/// How an original variable is expressed through standard-form columns.
#[derive(Clone)]
enum Column<T> {
    /// `x = offset + c`
    Shifted { col: usize, offset: T },
    /// `x = offset - c`
    Mirrored { col: usize, offset: T },
    /// `x = c⁺ - c⁻`
    Split { pos: usize, neg: usize },
    /// Fixed by equal bounds.
    Fixed(T),
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    /// Standard-form rows before any pivot.
    initial_rows: Vec<Vec<T>>,
    initial_rhs: Vec<T>,
    basis: Vec<usize>,
    /// Columns that may never enter the basis (artificials in phase two).
    barred: Vec<bool>,
    cols: usize,
    pivots: usize,
    degenerate_run: usize,
    bland: bool,
}

impl<T: LpNum> Tableau<T> {
    fn pivot(&mut self, p: usize, q: usize, obj: &mut [T], obj_val: &mut T) {
        let (nz, prow, prhs) = eliminate(&mut self.rows, &mut self.rhs, p, q);
        if !obj[q].is_zero() {
            let factor = obj[q].clone();
            for &j in &nz {
                obj[j] = (obj[j].clone() - factor.clone() * prow[j].clone()).clean();
            }
            obj[q] = T::zero();
            *obj_val = obj_val.clone() - factor * prhs;
        }
        self.basis[p] = q;
        self.pivots += 1;
    }

    fn entering(&self, obj: &[T]) -> Option<usize> {
        let tol = T::tol();
        let neg_tol = -tol;
        let mut best: Option<usize> = None;
        for j in 0..self.cols {
            if self.barred[j] || obj[j] >= neg_tol {
                continue;
            }
            if self.bland {
                return Some(j);
            }
            match best {
                Some(b) if obj[j] >= obj[b] => {}
                _ => best = Some(j),
            }
        }
        best
    }

    fn leaving(&self, q: usize) -> Option<usize> {
        if !self.bland && !T::tol().is_zero() {
            return self.leaving_harris(q);
        }
        // Ratios within tolerance of the minimum count as ties, which are
        // broken by lowest basic column as Bland's rule requires.
        let ptol = T::pivot_tol();
        let ratios: Vec<Option<T>> = (0..self.rows.len())
            .map(|i| {
                let a = &self.rows[i][q];
                (*a > ptol).then(|| {
                    let b = if self.rhs[i].is_negative() { T::zero() } else { self.rhs[i].clone() };
                    b / a.clone()
                })
            })
            .collect();
        let min = ratios.iter().flatten().fold(None, |acc: Option<T>, r| match acc {
            Some(m) if m <= *r => Some(m),
            _ => Some(r.clone()),
        })?;
        let limit = min + T::tol();
        (0..self.rows.len())
            .filter(|&i| ratios[i].as_ref().is_some_and(|r| *r <= limit))
            .min_by_key(|&i| self.basis[i])
    }

    /// Harris: relax every bound by the feasibility tolerance to find the
    /// longest admissible step, then take the largest pivot within it.
    fn leaving_harris(&self, q: usize) -> Option<usize> {
        let ptol = T::pivot_tol();
        let tol = T::tol();
        let mut bound: Option<T> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][q];
            if *a <= ptol {
                continue;
            }
            let b = if self.rhs[i].is_negative() { T::zero() } else { self.rhs[i].clone() };
            let r = (b + tol.clone()) / a.clone();
            if bound.as_ref().is_none_or(|m| r < *m) {
                bound = Some(r);
            }
        }
        let bound = bound?;
        let mut best: Option<usize> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][q];
            if *a <= ptol || self.rhs[i].clone() / a.clone() > bound {
                continue;
            }
            best = match best {
                Some(b) if *a < self.rows[b][q] || (*a == self.rows[b][q] && self.basis[i] > self.basis[b]) => Some(b),
                _ => Some(i),
            };
        }
        best
    }

    /// Rebuilds rows and right-hand sides from the initial tableau for the
    /// current basis. Leaves the tableau untouched if the basis looks singular.
    fn refactor(&mut self) -> bool {
        let m = self.rows.len();
        let mut rows = self.initial_rows.clone();
        let mut rhs = self.initial_rhs.clone();
        let mut basis = vec![0; m];
        let mut used = vec![false; m];
        for &q in &self.basis {
            let mut best: Option<usize> = None;
            for i in (0..m).filter(|&i| !used[i]) {
                if best.is_none_or(|b| rows[i][q].abs() > rows[b][q].abs()) {
                    best = Some(i);
                }
            }
            let Some(p) = best else { return false };
            if rows[p][q].abs() <= T::pivot_tol() {
                return false;
            }
            eliminate(&mut rows, &mut rhs, p, q);
            used[p] = true;
            basis[p] = q;
        }
        self.rows = rows;
        self.rhs = rhs;
        self.basis = basis;
        true
    }

    /// Runs simplex iterations until optimal; `obj` holds the reduced costs of
    /// `costs`. Returns `false` when the objective is unbounded below.
    fn optimize(&mut self, costs: &[T], obj: &mut Vec<T>, obj_val: &mut T) -> Result<bool> {
        let float = !T::tol().is_zero();
        let mut rounds = 0;
        let mut since_refactor = 0;
        loop {
            if float && since_refactor >= REFACTOR_EVERY {
                since_refactor = 0;
                if self.refactor() {
                    (*obj, *obj_val) = self.reduced_costs(costs);
                }
            }
            let q = match self.entering(obj) {
                Some(q) => q,
                None if float && rounds < REFACTOR_ROUNDS && since_refactor > 0 => {
                    rounds += 1;
                    since_refactor = 0;
                    if !self.refactor() {
                        return Ok(true);
                    }
                    (*obj, *obj_val) = self.reduced_costs(costs);
                    continue;
                }
                None => return Ok(true),
            };
            let Some(p) = self.leaving(q) else { return Ok(false) };
            since_refactor += 1;
            let step = self.rhs[p].clone() / self.rows[p][q].clone();
            if step <= T::tol() {
                self.degenerate_run += 1;
                if self.degenerate_run >= DEGENERATE_RUN {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(p, q, obj, obj_val);
            if self.pivots > MAX_PIVOTS {
                return Err(Error::NumericalFailure("pivot limit reached".into()));
            }
            if obj_val.to_f64().is_some_and(|v| !v.is_finite()) {
                return Err(Error::NumericalFailure("objective became non-finite".into()));
            }
        }
    }

    /// Dual simplex pivots until every basic value is nonnegative again.
    /// Returns `false` if some row proves the program infeasible.
    fn dual_repair(&mut self, obj: &mut [T], obj_val: &mut T) -> Result<bool> {
        let repair_tol = T::from_f64(REPAIR_TOL).expect("finite");
        loop {
            let leave = (0..self.rows.len()).filter(|&i| self.rhs[i] < -repair_tol.clone()).fold(None, |best: Option<usize>, i| {
                match best {
                    Some(b) if self.rhs[b] <= self.rhs[i] => Some(b),
                    _ => Some(i),
                }
            });
            let Some(p) = leave else { return Ok(true) };
            let ptol = T::pivot_tol();
            let mut best: Option<(usize, T)> = None;
            for j in 0..self.cols {
                let a = &self.rows[p][j];
                if self.barred[j] || *a >= -ptol.clone() {
                    continue;
                }
                let d = if obj[j].is_negative() { T::zero() } else { obj[j].clone() };
                let ratio = d / -a.clone();
                let better = match &best {
                    None => true,
                    Some((b, r)) => ratio < *r || (ratio == *r && a.abs() > self.rows[p][*b].abs()),
                };
                if better {
                    best = Some((j, ratio));
                }
            }
            let Some((q, _)) = best else { return Ok(false) };
            self.pivot(p, q, obj, obj_val);
            if self.pivots > MAX_PIVOTS {
                return Err(Error::NumericalFailure("pivot limit reached".into()));
            }
        }
    }

    fn reduced_costs(&self, costs: &[T]) -> (Vec<T>, T) {
        let mut obj = costs.to_vec();
        let mut val = T::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = costs[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (o, a) in obj.iter_mut().zip(&self.rows[i]) {
                if !a.is_zero() {
                    *o = o.clone() - cb.clone() * a.clone();
                }
            }
            val = val - cb * self.rhs[i].clone();
        }
        // The running value is the negated objective, as in the textbook tableau.
        (obj, val)
    }
}

pub(super) fn solve<T: LpNum>(lp: &LinearProgram<T>) -> Result<SolveResult<T>> {
    let n = lp.vars.len();
    let zero = T::zero;

    // Standard-form columns for the original variables.
    let mut map = Vec::with_capacity(n);
    let mut cols = 0usize;
    let mut bound_rows: Vec<(usize, T)> = Vec::new();
    for v in &lp.vars {
        let entry = match (&v.lower, &v.upper) {
            (Some(lo), Some(hi)) if lo == hi => Column::Fixed(lo.clone()),
            (Some(lo), hi) => {
                if let Some(hi) = hi {
                    if hi < lo {
                        return Ok(infeasible(n));
                    }
                    bound_rows.push((cols, hi.clone() - lo.clone()));
                }
                cols += 1;
                Column::Shifted { col: cols - 1, offset: lo.clone() }
            }
            (None, Some(hi)) => {
                cols += 1;
                Column::Mirrored { col: cols - 1, offset: hi.clone() }
            }
            (None, None) => {
                cols += 2;
                Column::Split { pos: cols - 2, neg: cols - 1 }
            }
        };
        map.push(entry);
    }
    let structural = cols;
    let sign = match lp.sense {
        Sense::Minimize => T::one(),
        Sense::Maximize => -T::one(),
    };

    let mut costs = vec![zero(); structural];
    let mut const_obj = zero();
    for (v, m) in lp.vars.iter().zip(&map) {
        let c = sign.clone() * v.cost.clone();
        match m {
            Column::Shifted { col, offset } => {
                costs[*col] = c.clone();
                const_obj = const_obj + c * offset.clone();
            }
            Column::Mirrored { col, offset } => {
                costs[*col] = -c.clone();
                const_obj = const_obj + c * offset.clone();
            }
            Column::Split { pos, neg } => {
                costs[*pos] = c.clone();
                costs[*neg] = -c;
            }
            Column::Fixed(val) => const_obj = const_obj + c * val.clone(),
        }
    }

    // Rows: original constraints then upper-bound rows.
    struct Row<T> {
        coeffs: Vec<T>,
        rel: Relation,
        rhs: T,
        flipped: bool,
    }
    let mut rows: Vec<Row<T>> = Vec::with_capacity(lp.constraints.len() + bound_rows.len());
    for c in &lp.constraints {
        let mut coeffs = vec![zero(); structural];
        let mut rhs = c.rhs.clone();
        for (j, a) in &c.coeffs {
            match &map[*j] {
                Column::Shifted { col, offset } => {
                    coeffs[*col] = coeffs[*col].clone() + a.clone();
                    rhs = rhs - a.clone() * offset.clone();
                }
                Column::Mirrored { col, offset } => {
                    coeffs[*col] = coeffs[*col].clone() - a.clone();
                    rhs = rhs - a.clone() * offset.clone();
                }
                Column::Split { pos, neg } => {
                    coeffs[*pos] = coeffs[*pos].clone() + a.clone();
                    coeffs[*neg] = coeffs[*neg].clone() - a.clone();
                }
                Column::Fixed(val) => rhs = rhs - a.clone() * val.clone(),
            }
        }
        rows.push(Row { coeffs, rel: c.relation, rhs, flipped: false });
    }
    for (col, cap) in bound_rows {
        let mut coeffs = vec![zero(); structural];
        coeffs[col] = T::one();
        rows.push(Row { coeffs, rel: Relation::Le, rhs: cap, flipped: false });
    }
    for r in &mut rows {
        if r.rhs.is_negative() {
            r.flipped = true;
            r.rhs = -r.rhs.clone();
            for a in &mut r.coeffs {
                *a = -a.clone();
            }
            r.rel = match r.rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    // Column layout: structural | surplus (one per Ge row) | identity (one per row).
    let m = rows.len();
    let surplus_count = rows.iter().filter(|r| r.rel == Relation::Ge).count();
    let id_start = structural + surplus_count;
    let total = id_start + m;
    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        initial_rows: Vec::new(),
        initial_rhs: Vec::new(),
        basis: Vec::with_capacity(m),
        barred: vec![false; total],
        cols: total,
        pivots: 0,
        degenerate_run: 0,
        bland: false,
    };
    let mut artificial = vec![false; total];
    let mut next_surplus = structural;
    for (i, r) in rows.iter().enumerate() {
        let mut row = r.coeffs.clone();
        row.resize(total, zero());
        if r.rel == Relation::Ge {
            row[next_surplus] = -T::one();
            next_surplus += 1;
        }
        row[id_start + i] = T::one();
        if r.rel != Relation::Le {
            artificial[id_start + i] = true;
        }
        tab.rows.push(row);
        tab.rhs.push(r.rhs.clone());
        tab.basis.push(id_start + i);
    }
    // Floating point: relax every `≤` row by a small, row-dependent amount so
    // that ties in the ratio test (and the stalling they cause) disappear. The
    // relaxation is removed once phase two ends.
    let mut true_rhs = None;
    if !T::tol().is_zero() {
        tab.initial_rows = tab.rows.clone();
        true_rhs = Some(tab.rhs.clone());
        for (i, r) in rows.iter().enumerate() {
            if r.rel == Relation::Le {
                let jitter = T::from_f64(PERTURBATION * (1.0 + ((i * 7919) % 1009) as f64 / 1009.0)).expect("finite");
                tab.rhs[i] = tab.rhs[i].clone() + jitter * (T::one() + tab.rhs[i].abs());
            }
        }
        tab.initial_rhs = tab.rhs.clone();
    }

    // Phase one.
    if artificial.iter().any(|&a| a) {
        let phase1: Vec<T> = artificial.iter().map(|&a| if a { T::one() } else { zero() }).collect();
        let (mut obj, mut val) = tab.reduced_costs(&phase1);
        tab.optimize(&phase1, &mut obj, &mut val)?;
        let scale = tab.rhs.iter().fold(T::one(), |acc, b| if b.abs() > acc { b.abs() } else { acc });
        if -val > T::tol() * scale {
            return Ok(infeasible(n));
        }
        // Drive zero-level artificials out of the basis where possible.
        for p in 0..m {
            let b = tab.basis[p];
            if !artificial[b] {
                continue;
            }
            let q = (0..total)
                .filter(|&j| !artificial[j] && tab.rows[p][j].abs() > T::pivot_tol())
                .fold(None, |best: Option<usize>, j| match best {
                    Some(b) if tab.rows[p][b].abs() >= tab.rows[p][j].abs() => Some(b),
                    _ => Some(j),
                });
            if let Some(q) = q {
                let mut dummy = vec![zero(); total];
                let mut dv = zero();
                tab.pivot(p, q, &mut dummy, &mut dv);
            }
        }
        for (j, &a) in artificial.iter().enumerate() {
            tab.barred[j] = a;
        }
        tab.degenerate_run = 0;
    }

    // Phase two.
    let mut phase2 = costs.clone();
    phase2.resize(total, zero());
    let (mut obj, mut val) = tab.reduced_costs(&phase2);
    let unbounded = || Ok(SolveResult { status: Status::Unbounded, value: zero(), primal: vec![zero(); n], duals: None, pivots: 0 });
    if !tab.optimize(&phase2, &mut obj, &mut val)? {
        return unbounded();
    }
    if let Some(b) = true_rhs {
        tab.initial_rhs = b;
        if !tab.refactor() {
            return Err(Error::NumericalFailure("singular basis after removing the perturbation".into()));
        }
        (obj, val) = tab.reduced_costs(&phase2);
        for _ in 0..REFACTOR_ROUNDS {
            if !tab.dual_repair(&mut obj, &mut val)? {
                return Ok(infeasible(n));
            }
            if tab.entering(&obj).is_none() {
                break;
            }
            if !tab.optimize(&phase2, &mut obj, &mut val)? {
                return unbounded();
            }
        }
    }

    let mut x_std = vec![zero(); total];
    for (i, &b) in tab.basis.iter().enumerate() {
        x_std[b] = tab.rhs[i].clone();
    }
    let primal: Vec<T> = map
        .iter()
        .map(|m| match m {
            Column::Shifted { col, offset } => offset.clone() + x_std[*col].clone(),
            Column::Mirrored { col, offset } => offset.clone() - x_std[*col].clone(),
            Column::Split { pos, neg } => x_std[*pos].clone() - x_std[*neg].clone(),
            Column::Fixed(v) => v.clone(),
        })
        .collect();

    // Simplex multipliers: the identity column of row i has zero phase-two cost,
    // so its reduced cost is −y_i.
    let duals: Vec<T> = (0..lp.constraints.len())
        .map(|i| {
            let y = -obj[id_start + i].clone();
            let y = if rows[i].flipped { -y } else { y };
            (sign.clone() * y).clean()
        })
        .collect();

    let value = sign * (const_obj - val);
    Ok(SolveResult { status: Status::Optimal, value, primal, duals: Some(duals), pivots: tab.pivots })
}

/// Gauss-Jordan step on `(p, q)`. Returns the pivot row's nonzero columns,
/// the normalized row and its right-hand side.
fn eliminate<T: LpNum>(rows: &mut [Vec<T>], rhs: &mut [T], p: usize, q: usize) -> (Vec<usize>, Vec<T>, T) {
    let piv = rows[p][q].clone();
    let nz: Vec<usize> = (0..rows[p].len()).filter(|&j| !rows[p][j].is_zero()).collect();
    for &j in &nz {
        rows[p][j] = rows[p][j].clone() / piv.clone();
    }
    rows[p][q] = T::one();
    rhs[p] = (rhs[p].clone() / piv).clean();
    let prow = rows[p].clone();
    let prhs = rhs[p].clone();
    for i in 0..rows.len() {
        if i == p || rows[i][q].is_zero() {
            continue;
        }
        let factor = rows[i][q].clone();
        let row = &mut rows[i];
        for &j in &nz {
            row[j] = (row[j].clone() - factor.clone() * prow[j].clone()).clean();
        }
        row[q] = T::zero();
        rhs[i] = (rhs[i].clone() - factor * prhs.clone()).clean();
    }
    (nz, prow, prhs)
}

fn infeasible<T: LpNum>(n: usize) -> SolveResult<T> {
    SolveResult { status: Status::Infeasible, value: T::zero(), primal: vec![T::zero(); n], duals: None, pivots: 0 }
}

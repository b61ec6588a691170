//! Optimization back-ends shared by every analysis: a dense two-phase
//! simplex (generic over the scalar type, so the same program can be solved
//! in `f64` or in exact rationals) and a successive-shortest-path min-cost
//! flow solver for transportation problems.

mod flow;
mod simplex;

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use flow::{solve_mincost_flow, FlowSolution};

/// Largest program (in variables) accepted by the exact solver.
pub const EXACT_VARIABLE_CAP: usize = 64;

/// Scalar type the simplex can run on.
pub trait LpNum:
    Clone + Debug + PartialOrd + Send + Sync + Num + Signed + FromPrimitive + ToPrimitive + 'static
{
    /// Feasibility / optimality tolerance; zero for exact arithmetic.
    fn tol() -> Self;
    /// Smallest usable pivot magnitude; zero for exact arithmetic.
    fn pivot_tol() -> Self;
    /// Flush numerical noise to zero.
    fn clean(self) -> Self {
        self
    }
}

impl LpNum for f64 {
    fn tol() -> Self {
        1e-9
    }
    fn pivot_tol() -> Self {
        1e-10
    }
    fn clean(self) -> Self {
        if self.abs() < 1e-14 {
            0.0
        } else {
            self
        }
    }
}

impl LpNum for BigRational {
    fn tol() -> Self {
        BigRational::zero()
    }
    fn pivot_tol() -> Self {
        BigRational::zero()
    }
}

/// Exact rational image of a float (every finite `f64` is a dyadic rational).
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// `num / den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint<T> {
    pub coeffs: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Clone, Debug)]
pub struct Variable<T> {
    pub cost: T,
    pub lower: Option<T>,
    pub upper: Option<T>,
}

/// A linear program with sparse constraint rows and per-variable bounds.
#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    pub sense: Sense,
    pub vars: Vec<Variable<T>>,
    pub constraints: Vec<Constraint<T>>,
}

impl<T: LpNum> LinearProgram<T> {
    pub fn new(sense: Sense) -> Self {
        LinearProgram { sense, vars: Vec::new(), constraints: Vec::new() }
    }

    pub fn add_var(&mut self, cost: T, lower: Option<T>, upper: Option<T>) -> usize {
        self.vars.push(Variable { cost, lower, upper });
        self.vars.len() - 1
    }

    pub fn free_var(&mut self, cost: T) -> usize {
        self.add_var(cost, None, None)
    }

    pub fn nonneg_var(&mut self, cost: T) -> usize {
        self.add_var(cost, Some(T::zero()), None)
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, T)>, relation: Relation, rhs: T) -> usize {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn map<U: LpNum>(&self, f: impl Fn(&T) -> U) -> LinearProgram<U> {
        LinearProgram {
            sense: self.sense,
            vars: self
                .vars
                .iter()
                .map(|v| Variable {
                    cost: f(&v.cost),
                    lower: v.lower.as_ref().map(&f),
                    upper: v.upper.as_ref().map(&f),
                })
                .collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint {
                    coeffs: c.coeffs.iter().map(|(j, a)| (*j, f(a))).collect(),
                    relation: c.relation,
                    rhs: f(&c.rhs),
                })
                .collect(),
        }
    }

    /// Objective value of `x`.
    pub fn objective_at(&self, x: &[T]) -> T {
        self.vars.iter().zip(x).fold(T::zero(), |acc, (v, xi)| acc + v.cost.clone() * xi.clone())
    }

    fn row_activity(&self, c: &Constraint<T>, x: &[T]) -> T {
        c.coeffs.iter().fold(T::zero(), |acc, (j, a)| acc + a.clone() * x[*j].clone())
    }

    /// Largest violation of any constraint or bound by `x`.
    pub fn max_violation(&self, x: &[T]) -> T {
        let mut worst = T::zero();
        let mut bump = |v: T| {
            if v > worst {
                worst = v;
            }
        };
        for c in &self.constraints {
            let act = self.row_activity(c, x);
            let gap = act - c.rhs.clone();
            match c.relation {
                Relation::Le => bump(gap),
                Relation::Ge => bump(-gap),
                Relation::Eq => bump(gap.abs()),
            }
        }
        for (v, xi) in self.vars.iter().zip(x) {
            if let Some(lo) = &v.lower {
                bump(lo.clone() - xi.clone());
            }
            if let Some(hi) = &v.upper {
                bump(xi.clone() - hi.clone());
            }
        }
        worst
    }

    /// Lagrangian dual value of the row multipliers `y`: `y·b + Σ_j opt_{x_j ∈ box} r_j x_j`
    /// with reduced costs `r = c − Aᵀy` (opt is min for minimization, max for maximization).
    /// Returns `None` when the box term is unbounded.
    pub fn dual_value(&self, y: &[T]) -> Option<T> {
        let mut reduced: Vec<T> = self.vars.iter().map(|v| v.cost.clone()).collect();
        let mut value = T::zero();
        for (c, yi) in self.constraints.iter().zip(y) {
            value = value + yi.clone() * c.rhs.clone();
            for (j, a) in &c.coeffs {
                reduced[*j] = reduced[*j].clone() - yi.clone() * a.clone();
            }
        }
        let tol = T::tol() * T::from_f64(1e3).unwrap_or_else(T::one);
        for (v, r) in self.vars.iter().zip(reduced) {
            if r.abs() <= tol {
                continue;
            }
            let wants_low = match self.sense {
                Sense::Minimize => r.is_positive(),
                Sense::Maximize => r.is_negative(),
            };
            let bound = if wants_low { v.lower.clone() } else { v.upper.clone() };
            value = value + r * bound?;
        }
        Some(value)
    }

    fn validate(&self) -> Result<()> {
        let n = self.vars.len();
        for (i, c) in self.constraints.iter().enumerate() {
            if let Some((j, _)) = c.coeffs.iter().find(|(j, _)| *j >= n) {
                return Err(Error::InvalidParams(format!("constraint {i} references variable {j} of {n}")));
            }
            let finite = c.coeffs.iter().all(|(_, a)| a.to_f64().is_some_and(f64::is_finite))
                && c.rhs.to_f64().is_some_and(f64::is_finite);
            if !finite {
                return Err(Error::InvalidParams(format!("constraint {i} has a non-finite coefficient")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct SolveResult<T> {
    pub status: Status,
    /// Objective value; zero unless `status` is `Optimal`.
    pub value: T,
    pub primal: Vec<T>,
    /// One multiplier per constraint row, sign convention of [`LinearProgram::dual_value`].
    pub duals: Option<Vec<T>>,
    pub pivots: usize,
}

impl<T: LpNum> SolveResult<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

/// Which arithmetic the analyses route their programs through.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    #[default]
    Float,
    Exact,
}

impl Backend {
    /// Solve a float-built program; in exact mode its coefficients are taken
    /// at their exact binary values.
    pub fn solve(self, lp: &LinearProgram<f64>) -> Result<SolveResult<f64>> {
        match self {
            Backend::Float => solve_lp(lp),
            Backend::Exact => {
                let exact = solve_exact(&lp.map(|x| rational(*x)))?;
                Ok(to_float(exact))
            }
        }
    }
}

fn to_float(r: SolveResult<BigRational>) -> SolveResult<f64> {
    let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
    SolveResult {
        status: r.status,
        value: f(&r.value),
        primal: r.primal.iter().map(f).collect(),
        duals: r.duals.map(|d| d.iter().map(f).collect()),
        pivots: r.pivots,
    }
}

/// Float simplex; falls back to the exact solver when the float path fails
/// numerically and the program is small enough.
pub fn solve_lp(lp: &LinearProgram<f64>) -> Result<SolveResult<f64>> {
    lp.validate()?;
    match simplex::solve(lp) {
        Ok(res) => {
            if res.is_optimal() {
                let scale = lp
                    .constraints
                    .iter()
                    .flat_map(|c| c.coeffs.iter().map(|(_, a)| a.abs()).chain([c.rhs.abs()]))
                    .fold(1.0_f64, f64::max);
                if lp.max_violation(&res.primal) > 1e-9 * scale {
                    return retry_exact(lp, "primal residual above tolerance");
                }
            }
            Ok(res)
        }
        Err(Error::NumericalFailure(msg)) => retry_exact(lp, &msg),
        Err(e) => Err(e),
    }
}

fn retry_exact(lp: &LinearProgram<f64>, why: &str) -> Result<SolveResult<f64>> {
    if lp.num_vars() > EXACT_VARIABLE_CAP {
        return Err(Error::NumericalFailure(format!("{why}; program too large for exact retry")));
    }
    Ok(to_float(solve_exact(&lp.map(|x| rational(*x)))?))
}

/// Exact rational simplex, capped at [`EXACT_VARIABLE_CAP`] variables.
pub fn solve_exact(lp: &LinearProgram<BigRational>) -> Result<SolveResult<BigRational>> {
    if lp.num_vars() > EXACT_VARIABLE_CAP {
        return Err(Error::CapExceeded {
            what: "exact program".into(),
            size: lp.num_vars(),
            cap: EXACT_VARIABLE_CAP,
        });
    }
    lp.validate()?;
    simplex::solve(lp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lower_bound() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.free_var(1.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Ge, 3.0);
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!((r.value - 3.0).abs() < 1e-12);
        let y = r.duals.unwrap();
        assert!((lp.dual_value(&y).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.free_var(0.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, 0.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Ge, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, Status::Infeasible);
        let exact = solve_exact(&lp.map(|v| rational(*v))).unwrap();
        assert_eq!(exact.status, Status::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.nonneg_var(1.0);
        let y = lp.nonneg_var(0.0);
        lp.add_constraint(vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn bounded_variables_and_maximize() {
        // max 3x + 2y, x + y <= 4, x in [0, 3], y in [1, 5]
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var(3.0, Some(0.0), Some(3.0));
        let y = lp.add_var(2.0, Some(1.0), Some(5.0));
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Le, 4.0);
        let r = solve_lp(&lp).unwrap();
        assert!((r.value - 11.0).abs() < 1e-9, "{}", r.value);
        assert!((r.primal[x] - 3.0).abs() < 1e-9);
        let dv = lp.dual_value(r.duals.as_ref().unwrap()).unwrap();
        assert!((dv - 11.0).abs() < 1e-8, "{dv}");
    }

    #[test]
    fn exact_rational_value() {
        // min x + y, 3x + y >= 2, x + 3y >= 2  -> x = y = 1/2
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.nonneg_var(ratio(1, 1));
        let y = lp.nonneg_var(ratio(1, 1));
        lp.add_constraint(vec![(x, ratio(3, 1)), (y, ratio(1, 1))], Relation::Ge, ratio(2, 1));
        lp.add_constraint(vec![(x, ratio(1, 1)), (y, ratio(3, 1))], Relation::Ge, ratio(2, 1));
        let r = solve_exact(&lp).unwrap();
        assert_eq!(r.value, ratio(1, 1));
        assert_eq!(r.primal, vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(lp.dual_value(r.duals.as_ref().unwrap()), Some(ratio(1, 1)));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.free_var(1.0);
        let y = lp.free_var(1.0);
        lp.add_constraint(vec![(x, 1.0), (y, -1.0)], Relation::Eq, 0.0);
        lp.add_constraint(vec![(x, 2.0), (y, -2.0)], Relation::Eq, 0.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Ge, -2.0);
        let r = solve_lp(&lp).unwrap();
        assert!((r.value + 4.0).abs() < 1e-9);
        let dv = lp.dual_value(r.duals.as_ref().unwrap()).unwrap();
        assert!((dv + 4.0).abs() < 1e-8);
    }

    #[test]
    fn exact_cap() {
        let mut lp = LinearProgram::<BigRational>::new(Sense::Minimize);
        for _ in 0..=EXACT_VARIABLE_CAP {
            lp.nonneg_var(ratio(1, 1));
        }
        assert!(matches!(solve_exact(&lp), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn repeat_solves_are_identical() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let vars: Vec<usize> = (0..6).map(|i| lp.free_var(1.0 + i as f64 * 0.1)).collect();
        for (k, w) in vars.windows(2).enumerate() {
            lp.add_constraint(vec![(w[0], 1.0), (w[1], 1.0)], Relation::Ge, 1.0 + k as f64);
        }
        lp.add_constraint(vars.iter().map(|&j| (j, 1.0)).collect(), Relation::Le, 100.0);
        for &j in &vars {
            lp.add_constraint(vec![(j, 1.0)], Relation::Ge, 0.0);
        }
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.primal, b.primal);
    }
}

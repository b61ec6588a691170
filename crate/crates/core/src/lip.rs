//! Real Lipschitz functions vanishing at the base point.

use crate::error::{Error, Result};
use crate::metric::PointedMetricSpace;

/// Values `f(p)` indexed by point, with `f(base) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LipFunction {
    values: Vec<f64>,
}

impl LipFunction {
    pub fn new(space: &PointedMetricSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::SizeMismatch { expected: space.len(), found: values.len() });
        }
        if values[space.base()] != 0.0 {
            return Err(Error::BaseConflict(format!("value {} at the base point", values[space.base()])));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("function values must be finite".into()));
        }
        Ok(LipFunction { values })
    }

    pub fn zero(space: &PointedMetricSpace) -> Self {
        LipFunction { values: vec![0.0; space.len()] }
    }

    /// Trusted constructor for values produced inside the crate.
    pub(crate) fn from_values(values: Vec<f64>) -> Self {
        LipFunction { values }
    }

    /// `z ↦ α (d(z, y) − d(base, y))`, which has norm `|α|` and slope `α`
    /// on the pair `(x, y)`.
    pub fn distance_profile(space: &PointedMetricSpace, y: usize, alpha: f64) -> Self {
        let b = space.base();
        LipFunction { values: (0..space.len()).map(|z| alpha * (space.dist(z, y) - space.dist(b, y))).collect() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, p: usize) -> f64 {
        self.values[p]
    }

    pub fn scaled(&self, c: f64) -> Self {
        LipFunction { values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn plus(&self, other: &LipFunction) -> Self {
        LipFunction { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    /// Best Lipschitz constant over all pairs of distinct points.
    pub fn lip_norm(&self, space: &PointedMetricSpace) -> f64 {
        lip_norm_values(space, &self.values)
    }
}

pub(crate) fn lip_norm_values(space: &PointedMetricSpace, values: &[f64]) -> f64 {
    let n = space.len();
    let mut best = 0.0_f64;
    for p in 0..n {
        for q in p + 1..n {
            best = best.max((values[p] - values[q]).abs() / space.dist(p, q));
        }
    }
    best
}

/// Slope `(f(x) − f(y)) / d(x, y)`, the pairing of `f` with the molecule `m_{x,y}`.
pub fn molecule_eval(space: &PointedMetricSpace, f: &LipFunction, (x, y): (usize, usize)) -> Result<f64> {
    if x == y {
        return Err(Error::DegeneratePair { index: 0, point: x });
    }
    Ok((f.at(x) - f.at(y)) / space.dist(x, y))
}

/// Norm-preserving extension `f(p) = min_s g(s) + L·d(p, s)` of `g`, given on
/// `subset`, to the whole space. The base point is added with value zero when
/// it is not listed and that keeps `g` L-Lipschitz.
pub fn mcshane_extend(space: &PointedMetricSpace, subset: &[usize], g: &[f64], l: f64) -> Result<LipFunction> {
    if subset.len() != g.len() {
        return Err(Error::SizeMismatch { expected: subset.len(), found: g.len() });
    }
    if !(l.is_finite() && l >= 0.0) {
        return Err(Error::InvalidParams("Lipschitz constant must be finite and nonnegative".into()));
    }
    let n = space.len();
    if let Some(&p) = subset.iter().find(|&&p| p >= n) {
        return Err(Error::PointOutOfRange { index: 0, point: p, points: n });
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams("function values must be finite".into()));
    }

    let base = space.base();
    let mut points = subset.to_vec();
    let mut vals = g.to_vec();
    match subset.iter().position(|&p| p == base) {
        Some(i) if g[i] != 0.0 => {
            return Err(Error::BaseConflict(format!("prescribed value {} at the base point", g[i])));
        }
        Some(_) => {}
        None => {
            for (&s, &v) in subset.iter().zip(g) {
                if v.abs() > l * space.dist(s, base) * (1.0 + 1e-9) + 1e-12 {
                    return Err(Error::BaseConflict(format!(
                        "value {v} at point {s} cannot be reached from zero at the base with constant {l}"
                    )));
                }
            }
            points.push(base);
            vals.push(0.0);
        }
    }

    for a in 0..points.len() {
        for b in a + 1..points.len() {
            let (p, q) = (points[a], points[b]);
            let diff = (vals[a] - vals[b]).abs();
            let dist = space.dist(p, q);
            if diff > l * dist * (1.0 + 1e-9) + 1e-12 {
                let ratio = if dist == 0.0 { f64::INFINITY } else { diff / dist };
                return Err(Error::NotLipschitzOnSubset { p, q, ratio, limit: l });
            }
        }
    }

    let mut values: Vec<f64> = (0..n)
        .map(|p| points.iter().zip(&vals).map(|(&s, &v)| v + l * space.dist(p, s)).fold(f64::INFINITY, f64::min))
        .collect();
    for (&s, &v) in points.iter().zip(&vals) {
        values[s] = v;
    }
    Ok(LipFunction { values })
}

//! Execution strategy for the embarrassingly parallel sweeps, and the option
//! bundle threaded through the analyses.

use crate::solver::Backend;

/// How sweeps over sign patterns, extreme points and matchings are run.
/// Results are identical either way; only wall-clock time differs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `f(0), …, f(count - 1)` in index order.
    pub fn map<R, F>(self, count: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..count).into_par_iter().map(f).collect()
            }
            _ => (0..count).map(f).collect(),
        }
    }
}

/// Knobs shared by every analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub backend: Backend,
    pub execution: Execution,
    /// Largest pair count for which sign patterns are enumerated exhaustively.
    pub cap: u32,
    /// Random sign patterns tried when the cap is exceeded.
    pub samples: usize,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { backend: Backend::Float, execution: Execution::default(), cap: 16, samples: 64, seed: 0 }
    }
}

impl Options {
    pub fn exact() -> Self {
        Options { backend: Backend::Exact, ..Options::default() }
    }

    pub fn sequential(self) -> Self {
        Options { execution: Execution::Sequential, ..self }
    }
}

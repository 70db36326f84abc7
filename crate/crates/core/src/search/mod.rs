//! Backtracking search for avoiding colorings and the outer scan that
//! computes `S3(k; r)` and `S3,2(k; r)`.

pub mod certificate;
mod explorer;
pub mod symmetry;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{is_infinite_instance, Color, Coloring, Params};
use crate::zero_sum::find_any_zero_sum;
pub use certificate::{check_refutation, refute, Refutation, RefuteOutcome};
use explorer::{Control, Explorer, Flow};
pub use symmetry::{normalize_coloring, ColorMap, SymmetryGroup};

/// How the search detects a zero-sum solution ending at a newly colored
/// position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStrategy {
    /// Incremental residue tables with forward checking.
    #[default]
    Reachability,
    /// Plain enumeration of the solutions ending at each position.
    Enumeration,
}

#[derive(Debug, Clone)]
pub struct SearchLimits {
    /// Largest interval length `compute_number` will attempt.
    pub max_n: u32,
    /// Wall-clock cap for one `compute_number` or `exists_avoiding_coloring`.
    pub time_budget: Option<Duration>,
    pub workers: usize,
    pub symmetry_reduction: bool,
    /// Depth at which the tree is cut into independent parallel jobs.
    pub split_depth: usize,
    pub strategy: CheckStrategy,
}

impl SearchLimits {
    pub fn new(max_n: u32) -> Self {
        SearchLimits {
            max_n,
            time_budget: None,
            workers: 1,
            symmetry_reduction: true,
            split_depth: 8,
            strategy: CheckStrategy::Reachability,
        }
    }

    pub fn with_budget(mut self, budget: Duration) -> Self {
        self.time_budget = Some(budget);
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_symmetry(mut self, on: bool) -> Self {
        self.symmetry_reduction = on;
        self
    }

    pub fn with_strategy(mut self, strategy: CheckStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_split_depth(mut self, depth: usize) -> Self {
        self.split_depth = depth;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidParams(
                "worker count must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits::new(256)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed_ms: u64,
}

impl SearchStats {
    fn absorb(&mut self, other: SearchStats) {
        self.nodes += other.nodes;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Existence {
    Found(Coloring),
    Absent,
    /// The budget ran out before the question was settled.
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExistenceResult {
    pub existence: Existence,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    /// `S = value`; `witness` avoids zero-sum solutions on `[1, value - 1]`.
    Finite {
        value: u32,
        witness: Coloring,
    },
    Infinite,
    /// `S > lower_bound`; `witness` avoids zero-sum solutions on
    /// `[1, lower_bound]`.
    Unresolved {
        lower_bound: u32,
        witness: Coloring,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub params: Params,
    pub verdict: Verdict,
    pub stats: SearchStats,
}

impl SearchOutcome {
    pub fn value(&self) -> Option<u32> {
        match self.verdict {
            Verdict::Finite { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&Coloring> {
        match &self.verdict {
            Verdict::Finite { witness, .. } | Verdict::Unresolved { witness, .. } => Some(witness),
            Verdict::Infinite => None,
        }
    }
}

/// Looks for a coloring of `[1, n]` admitting no zero-sum solution.
///
/// With one worker and symmetry reduction off, a found witness is the
/// lexicographically least avoiding coloring.
pub fn exists_avoiding_coloring(
    n: u32,
    p: &Params,
    limits: &SearchLimits,
) -> Result<ExistenceResult> {
    limits.validate()?;
    if n == 0 {
        return Err(Error::InvalidParams(
            "interval length must be at least 1".into(),
        ));
    }
    let start = Instant::now();
    let deadline = limits.time_budget.map(|b| start + b);
    let pool = build_pool(limits.workers)?;
    let mut res = probe(n, p, limits, &[], deadline, pool.as_ref());
    res.stats.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(res)
}

/// Computes `S3(k; r)` (full palette) or `S3,2(k; r)` (binary palette).
///
/// Lengths `n = k - 1, k, ...` are tried in turn, each search seeded with
/// the previous witness as a value-ordering hint. The first `n` with no
/// avoiding coloring is the answer.
pub fn compute_number(p: &Params, limits: &SearchLimits) -> Result<SearchOutcome> {
    limits.validate()?;
    let start = Instant::now();
    if is_infinite_instance(p) {
        return Ok(SearchOutcome {
            params: *p,
            verdict: Verdict::Infinite,
            stats: SearchStats::default(),
        });
    }
    let first = (p.k() - 1).max(1);
    if limits.max_n < first {
        return Err(Error::InvalidParams(format!(
            "max_n = {} is below k - 1 = {}",
            limits.max_n,
            p.k() - 1
        )));
    }
    let deadline = limits.time_budget.map(|b| start + b);
    let pool = build_pool(limits.workers)?;

    // No solution has a target below k - 1, so any coloring of [1, k - 2] avoids.
    let mut witness = Coloring::constant(first as usize - 1, 0);
    let mut stats = SearchStats::default();
    let mut n = first;
    let verdict = loop {
        if n > limits.max_n {
            break Verdict::Unresolved {
                lower_bound: limits.max_n,
                witness,
            };
        }
        let res = probe(n, p, limits, witness.as_slice(), deadline, pool.as_ref());
        stats.absorb(res.stats);
        match res.existence {
            Existence::Found(w) => witness = w,
            Existence::Absent => break Verdict::Finite { value: n, witness },
            Existence::Timeout => {
                break Verdict::Unresolved {
                    lower_bound: n - 1,
                    witness,
                }
            }
        }
        n += 1;
    };
    stats.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(SearchOutcome {
        params: *p,
        verdict,
        stats,
    })
}

fn build_pool(workers: usize) -> Result<Option<rayon::ThreadPool>> {
    if workers <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map(Some)
        .map_err(|e| Error::InvalidParams(format!("cannot start {workers} workers: {e}")))
}

fn probe(
    n: u32,
    p: &Params,
    limits: &SearchLimits,
    hint: &[Color],
    deadline: Option<Instant>,
    pool: Option<&rayon::ThreadPool>,
) -> ExistenceResult {
    let group = if limits.symmetry_reduction {
        SymmetryGroup::for_search(p)
    } else {
        SymmetryGroup::default()
    };
    let ctl = Control::new(deadline);
    let found = match pool {
        Some(pool) if (n as usize) > limits.split_depth => {
            pool.install(|| search_parallel(n, p, limits, &group, hint, &ctl))
        }
        _ => {
            let mut ex = Explorer::new(n, p, limits.strategy, &group, hint, &ctl);
            let flow = ex.dfs(0);
            ex.flush_nodes();
            (flow == Flow::Found).then(|| Coloring::new(ex.coloring().to_vec()))
        }
    };
    let existence = match found {
        Some(w) => {
            assert!(
                find_any_zero_sum(&w, p).is_none(),
                "search returned a coloring with a zero-sum solution: {}",
                w.encode(p.r())
            );
            Existence::Found(w)
        }
        None if ctl.timed_out() => Existence::Timeout,
        None => Existence::Absent,
    };
    ExistenceResult {
        existence,
        stats: SearchStats {
            nodes: ctl.nodes(),
            elapsed_ms: 0,
        },
    }
}

fn search_parallel(
    n: u32,
    p: &Params,
    limits: &SearchLimits,
    group: &SymmetryGroup,
    hint: &[Color],
    ctl: &Control,
) -> Option<Coloring> {
    let mut frontier = Vec::new();
    {
        let mut ex = Explorer::new(n, p, limits.strategy, group, hint, ctl);
        let flow = ex.collect_frontier(0, limits.split_depth, &mut frontier);
        ex.flush_nodes();
        if flow == Flow::Stopped {
            return None;
        }
    }
    frontier
        .par_iter()
        .map_init(
            || Explorer::new(n, p, limits.strategy, group, hint, ctl),
            |ex, prefix| {
                let flow = ex.explore_from(prefix);
                ex.flush_nodes();
                if flow == Flow::Found {
                    ctl.halt();
                    Some(Coloring::new(ex.coloring().to_vec()))
                } else {
                    None
                }
            },
        )
        .find_map_any(|w| w)
}

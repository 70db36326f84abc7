//! Depth-first search over colorings of `[1, n]`, assigning positions in
//! increasing order.
//!
//! Every solution is checked exactly once, when its target is colored, since
//! all of its parts are smaller. With [`CheckStrategy::Reachability`] the
//! explorer keeps one [`ResidueTable`] per depth and additionally rejects a
//! partial coloring as soon as some uncolored `t <= n` has every palette color
//! closing a zero-sum solution from parts already colored.
//!
//! Symmetry is broken by lex-leader pruning: a prefix survives only if no
//! group image of it is lexicographically smaller.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use super::CheckStrategy;
use crate::model::{Color, Params};
use crate::search::symmetry::SymmetryGroup;
use crate::zero_sum::{first_zero_sum_at, full_mask, ResidueTable};

const DEADLINE_POLL: u64 = 1 << 10;

/// State shared by all workers of one existence query.
pub(crate) struct Control {
    deadline: Option<Instant>,
    stop: AtomicBool,
    timed_out: AtomicBool,
    nodes: AtomicU64,
}

impl Control {
    pub(crate) fn new(deadline: Option<Instant>) -> Self {
        Control {
            deadline,
            stop: AtomicBool::new(false),
            timed_out: AtomicBool::new(false),
            nodes: AtomicU64::new(0),
        }
    }

    pub(crate) fn timed_out(&self) -> bool {
        self.timed_out.load(Ordering::Relaxed)
    }

    pub(crate) fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub(crate) fn halt(&self) {
        self.stop.store(true, Ordering::Relaxed);
    }

    fn expired(&self) -> bool {
        match self.deadline {
            Some(d) if Instant::now() >= d => {
                self.timed_out.store(true, Ordering::Relaxed);
                self.stop.store(true, Ordering::Relaxed);
                true
            }
            _ => false,
        }
    }
}

/// Why an extension was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Prune {
    /// Group map `g` sends the extended prefix to a smaller one.
    Symmetry(u16),
    /// The new position closes a zero-sum solution.
    ZeroSum,
    /// Every color of this later position would close a zero-sum solution.
    Blocked(u32),
}

/// One event of a logged search, in depth-first order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum RawStep {
    Enter(Color),
    Leave,
    Reject(Color, Prune),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Flow {
    Found,
    Exhausted,
    Stopped,
}

pub(crate) struct Explorer<'a> {
    n: usize,
    k: u32,
    r: u32,
    num_colors: u8,
    palette_mask: u64,
    strategy: CheckStrategy,
    tables: Vec<ResidueTable>,
    colors: Vec<Color>,
    group: &'a SymmetryGroup,
    // tied[d]: indices of group maps whose image agrees with the first d colors.
    tied: Vec<Vec<u16>>,
    hint: &'a [Color],
    ctl: &'a Control,
    nodes: u64,
}

impl<'a> Explorer<'a> {
    pub(crate) fn new(
        n: u32,
        p: &Params,
        strategy: CheckStrategy,
        group: &'a SymmetryGroup,
        hint: &'a [Color],
        ctl: &'a Control,
    ) -> Self {
        let n = n as usize;
        let tables = match strategy {
            CheckStrategy::Reachability => {
                vec![ResidueTable::new(p.k(), p.r(), n as u32); n + 1]
            }
            CheckStrategy::Enumeration => Vec::new(),
        };
        let mut tied = vec![Vec::with_capacity(group.len()); n + 1];
        tied[0].extend(0..group.len() as u16);
        Explorer {
            n,
            k: p.k(),
            r: p.r(),
            num_colors: p.num_colors() as u8,
            palette_mask: full_mask(p.num_colors()),
            strategy,
            tables,
            colors: vec![0; n],
            group,
            tied,
            hint,
            ctl,
            nodes: 0,
        }
    }

    pub(crate) fn coloring(&self) -> &[Color] {
        &self.colors
    }

    /// Adds the locally counted nodes to the shared total.
    pub(crate) fn flush_nodes(&mut self) {
        self.ctl.nodes.fetch_add(self.nodes, Ordering::Relaxed);
        self.nodes = 0;
    }

    /// Colors position `d + 1` with `c`, given that `1..=d` are colored.
    /// On rejection depth `d` is left intact.
    fn try_assign(&mut self, d: usize, c: Color) -> Option<Prune> {
        if !self.group.is_empty() {
            let (done, rest) = self.tied.split_at_mut(d + 1);
            let next = &mut rest[0];
            next.clear();
            for &g in &done[d] {
                let img = self.group.maps()[g as usize][c as usize];
                if img < c {
                    return Some(Prune::Symmetry(g));
                }
                if img == c {
                    next.push(g);
                }
            }
        }
        let pos = d as u32 + 1;
        match self.strategy {
            CheckStrategy::Reachability => {
                let (done, rest) = self.tables.split_at_mut(d + 1);
                let table = &mut rest[0];
                table.copy_from(&done[d]);
                table.push(pos, c);
                if table.closes(pos, c) {
                    return Some(Prune::ZeroSum);
                }
                for t in pos + 1..=self.n as u32 {
                    if table.closing_colors(t) & self.palette_mask == self.palette_mask {
                        return Some(Prune::Blocked(t));
                    }
                }
            }
            CheckStrategy::Enumeration => {
                self.colors[d] = c;
                if first_zero_sum_at(&self.colors[..=d], pos, self.k, self.r).is_some() {
                    return Some(Prune::ZeroSum);
                }
            }
        }
        self.colors[d] = c;
        None
    }

    fn candidates(&self, d: usize) -> impl Iterator<Item = Color> + '_ {
        let first = self.hint.get(d).copied().filter(|&h| h < self.num_colors);
        first
            .into_iter()
            .chain((0..self.num_colors).filter(move |&c| Some(c) != first))
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.ctl.stop.load(Ordering::Relaxed) {
            return false;
        }
        !(self.nodes % DEADLINE_POLL == 1 && self.ctl.expired())
    }

    /// Searches for a full avoiding coloring extending depth `d`.
    pub(crate) fn dfs(&mut self, d: usize) -> Flow {
        if d == self.n {
            return Flow::Found;
        }
        if !self.tick() {
            return Flow::Stopped;
        }
        let order: SmallColors = self.candidates(d).collect();
        for c in order.iter() {
            if self.try_assign(d, c).is_none() {
                match self.dfs(d + 1) {
                    Flow::Exhausted => {}
                    other => return other,
                }
            }
        }
        Flow::Exhausted
    }

    /// Collects every surviving prefix of length `depth`. Returns `Found` if
    /// `depth == n` and some prefix survives (the explorer then holds it).
    pub(crate) fn collect_frontier(
        &mut self,
        d: usize,
        depth: usize,
        out: &mut Vec<Vec<Color>>,
    ) -> Flow {
        if d == depth {
            out.push(self.colors[..d].to_vec());
            return Flow::Exhausted;
        }
        if !self.tick() {
            return Flow::Stopped;
        }
        let order: SmallColors = self.candidates(d).collect();
        for c in order.iter() {
            if self.try_assign(d, c).is_none() {
                if let Flow::Stopped = self.collect_frontier(d + 1, depth, out) {
                    return Flow::Stopped;
                }
            }
        }
        Flow::Exhausted
    }

    /// Replays a prefix produced by [`collect_frontier`] and searches below it.
    pub(crate) fn explore_from(&mut self, prefix: &[Color]) -> Flow {
        for (d, &c) in prefix.iter().enumerate() {
            let ok = self.try_assign(d, c).is_none();
            debug_assert!(ok, "frontier prefix failed to replay");
            if !ok {
                return Flow::Exhausted;
            }
        }
        self.dfs(prefix.len())
    }
}

impl Explorer<'_> {
    /// Exhaustive search from depth `d` that records every decision.
    /// Ignores the budget; returns `Found` as soon as a full coloring is hit.
    pub(crate) fn dfs_logged(&mut self, d: usize, log: &mut Vec<RawStep>) -> Flow {
        if d == self.n {
            return Flow::Found;
        }
        self.nodes += 1;
        for c in 0..self.num_colors {
            match self.try_assign(d, c) {
                Some(why) => log.push(RawStep::Reject(c, why)),
                None => {
                    log.push(RawStep::Enter(c));
                    if self.dfs_logged(d + 1, log) == Flow::Found {
                        return Flow::Found;
                    }
                    log.push(RawStep::Leave);
                }
            }
        }
        Flow::Exhausted
    }
}

/// Candidate colors for one position, without a heap allocation.
struct SmallColors {
    buf: [Color; 64],
    len: usize,
}

impl FromIterator<Color> for SmallColors {
    fn from_iter<I: IntoIterator<Item = Color>>(iter: I) -> Self {
        let mut s = SmallColors {
            buf: [0; 64],
            len: 0,
        };
        for c in iter {
            s.buf[s.len] = c;
            s.len += 1;
        }
        s
    }
}

impl SmallColors {
    fn iter(&self) -> impl Iterator<Item = Color> + '_ {
        self.buf[..self.len].iter().copied()
    }
}

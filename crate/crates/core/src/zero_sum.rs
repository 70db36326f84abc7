//! Deciding whether a coloring admits an `r`-zero-sum solution.
//!
//! The reference path enumerates, for each target `x_k`, every solution with
//! that target and stops at the first one whose colors sum to `0 mod r`.
//! [`ResidueTable`] answers the same existence question by dynamic
//! programming over residues and backs both the optional pre-filter here and
//! the hot loop of the search.

use std::ops::ControlFlow;

use crate::enumerate::for_each_solution_fold;
use crate::error::{Error, Result};
use crate::model::{Color, Coloring, Params, Solution};

/// A zero-sum solution whose target is `n`, if any. Only positions `<= n`
/// are read.
pub fn find_zero_sum_ending_at(chi: &Coloring, n: u32, p: &Params) -> Result<Option<Solution>> {
    if n as usize > chi.len() {
        return Err(Error::OutOfRange {
            position: n,
            length: chi.len() as u32,
        });
    }
    if n == 0 || n < p.k() - 1 {
        return Ok(None);
    }
    Ok(first_zero_sum_at(chi.as_slice(), n, p.k(), p.r()))
}

pub(crate) fn first_zero_sum_at(colors: &[Color], n: u32, k: u32, r: u32) -> Option<Solution> {
    let closing = u32::from(colors[n as usize - 1]);
    let flow = for_each_solution_fold(
        n,
        k,
        closing,
        |acc, x| {
            let s = acc + u32::from(colors[x as usize - 1]);
            if s >= r {
                s - r
            } else {
                s
            }
        },
        |parts, acc| {
            if acc == 0 {
                ControlFlow::Break(parts.to_vec())
            } else {
                ControlFlow::Continue(())
            }
        },
    );
    match flow {
        ControlFlow::Break(parts) => Some(Solution::from_sorted_unchecked(parts, n)),
        ControlFlow::Continue(()) => None,
    }
}

/// First zero-sum solution in order of increasing target, else `None`.
pub fn find_any_zero_sum(chi: &Coloring, p: &Params) -> Option<Solution> {
    let start = (p.k() - 1).max(1);
    (start..=chi.len() as u32).find_map(|n| first_zero_sum_at(chi.as_slice(), n, p.k(), p.r()))
}

/// Same answer as [`find_any_zero_sum`], but targets whose residue table
/// rules out a zero-sum solution are skipped without enumeration.
pub fn find_any_zero_sum_filtered(chi: &Coloring, p: &Params) -> Option<Solution> {
    let n = chi.len() as u32;
    let mut table = ResidueTable::new(p.k(), p.r(), n);
    for (i, &c) in chi.as_slice().iter().enumerate() {
        let pos = i as u32 + 1;
        table.push(pos, c);
        if table.closes(pos, c) {
            return first_zero_sum_at(chi.as_slice(), pos, p.k(), p.r());
        }
    }
    None
}

/// Reachable closing colors for multisets of already-colored positions.
///
/// Positions are pushed in increasing order. Entry `(cnt, sum)` is the set of
/// colors `c` (as a bitmask) such that some multiset of `cnt` pushed
/// positions summing to `sum` has color sum `s` with `s + c = 0 mod r`.
/// Once every position `<= t` has been pushed, entry `(k - 1, t)` is exactly
/// the set of colors that would make some solution with target `t` zero-sum.
#[derive(Debug, Clone)]
pub struct ResidueTable {
    parts: usize,
    r: u32,
    width: usize,
    bits: Vec<u64>,
}

impl ResidueTable {
    pub fn new(k: u32, r: u32, max_sum: u32) -> Self {
        let parts = k as usize - 1;
        let width = max_sum as usize + 1;
        let mut bits = vec![0u64; (parts + 1) * width];
        bits[0] = 1;
        ResidueTable {
            parts,
            r,
            width,
            bits,
        }
    }

    pub fn max_sum(&self) -> u32 {
        self.width as u32 - 1
    }

    /// Adds position `v` with color `color`. Positions must arrive in
    /// increasing order, each exactly once.
    pub fn push(&mut self, v: u32, color: Color) {
        let v = v as usize;
        if v >= self.width {
            return;
        }
        let shift = u32::from(color) % self.r;
        let r = self.r;
        let full = full_mask(r);
        let w = self.width;
        for cnt in 1..=self.parts {
            // Rows `cnt - 1` and `cnt` are disjoint slices of `bits`.
            let (lower, upper) = self.bits.split_at_mut(cnt * w);
            let src = &lower[(cnt - 1) * w..];
            let dst = &mut upper[..w];
            // The remaining `parts - cnt` slots need at least 1 each.
            let top = w - 1 - (self.parts - cnt).min(w - 1);
            for sum in v.max(cnt)..=top {
                let m = src[sum - v];
                if m != 0 {
                    dst[sum] |= rotate_down(m, shift, r, full);
                }
            }
        }
    }

    /// Colors that would close some solution with target `t` to zero sum.
    pub fn closing_colors(&self, t: u32) -> u64 {
        self.bits[self.parts * self.width + t as usize]
    }

    /// Whether coloring `t` with `color` completes a zero-sum solution.
    pub fn closes(&self, t: u32, color: Color) -> bool {
        self.closing_colors(t) >> color & 1 == 1
    }

    pub(crate) fn copy_from(&mut self, other: &ResidueTable) {
        self.bits.copy_from_slice(&other.bits);
    }
}

#[inline]
pub(crate) fn full_mask(r: u32) -> u64 {
    if r >= 64 {
        u64::MAX
    } else {
        (1u64 << r) - 1
    }
}

/// Maps bit `b` to bit `(b - c) mod r`.
#[inline]
fn rotate_down(mask: u64, c: u32, r: u32, full: u64) -> u64 {
    if c == 0 {
        mask
    } else {
        ((mask >> c) | (mask << (r - c))) & full
    }
}

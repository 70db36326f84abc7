//! Checkable refutations: a complete log of an exhaustive search showing that
//! no coloring of `[1, n]` avoids zero-sum solutions.
//!
//! The log lists, in depth-first order, every color tried at every visited
//! node. A rejected color carries an explicit reason that [`check_refutation`]
//! re-verifies with nothing but color sums:
//!
//! * `ZeroSum`: a solution ending at the new position whose colors vanish.
//! * `Blocked`: a later target `t <= n` together with, for every palette
//!   color, a solution with target `t` whose parts are already colored and
//!   which that color would close to zero sum.
//! * `Symmetry`: a zero-sum-preserving color map sending the prefix to a
//!   lexicographically smaller one. Sound because the lexicographically
//!   least avoiding coloring, if one existed, has no such prefix.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::explorer::{Control, Explorer, Flow, Prune, RawStep};
use super::symmetry::{ColorMap, SymmetryGroup};
use super::CheckStrategy;
use crate::enumerate::for_each_solution;
use crate::error::{Error, Result};
use crate::model::{color_sum, is_infinite_instance, Color, Coloring, Palette, Params, Solution};
use crate::zero_sum::find_zero_sum_ending_at;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Reason {
    ZeroSum { solution: Solution },
    Blocked { target: u32, closers: Vec<Solution> },
    Symmetry { map: ColorMap },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "lowercase")]
pub enum Step {
    Enter { color: Color },
    Leave,
    Reject { color: Color, reason: Reason },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub params: Params,
    pub n: u32,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefuteOutcome {
    Refuted(Refutation),
    /// The search reached a full avoiding coloring instead.
    Avoidable(Coloring),
}

/// Runs a sequential exhaustive search on `[1, n]` and logs it.
pub fn refute(n: u32, p: &Params, symmetry: bool) -> Result<RefuteOutcome> {
    if n == 0 {
        return Err(Error::InvalidParams(
            "interval length must be at least 1".into(),
        ));
    }
    let group = if symmetry {
        SymmetryGroup::for_search(p)
    } else {
        SymmetryGroup::default()
    };
    let ctl = Control::new(None);
    let mut ex = Explorer::new(n, p, CheckStrategy::Reachability, &group, &[], &ctl);
    let mut raw = Vec::new();
    if ex.dfs_logged(0, &mut raw) == Flow::Found {
        return Ok(RefuteOutcome::Avoidable(Coloring::new(
            ex.coloring().to_vec(),
        )));
    }

    let mut prefix: Vec<Color> = Vec::with_capacity(n as usize);
    let mut steps = Vec::with_capacity(raw.len());
    for step in raw {
        steps.push(match step {
            RawStep::Enter(c) => {
                prefix.push(c);
                Step::Enter { color: c }
            }
            RawStep::Leave => {
                prefix.pop();
                Step::Leave
            }
            RawStep::Reject(c, why) => {
                let reason = explain(&prefix, c, why, n, p, &group)?;
                Step::Reject { color: c, reason }
            }
        });
    }
    Ok(RefuteOutcome::Refuted(Refutation {
        params: *p,
        n,
        steps,
    }))
}

fn explain(
    prefix: &[Color],
    c: Color,
    why: Prune,
    n: u32,
    p: &Params,
    group: &SymmetryGroup,
) -> Result<Reason> {
    let mut colors = prefix.to_vec();
    colors.push(c);
    let pos = colors.len() as u32;
    let chi = Coloring::new(colors);
    let missing = |what: &str| Error::Certificate {
        step: pos as usize,
        message: format!("search pruned position {pos} but no {what} was found"),
    };
    Ok(match why {
        Prune::Symmetry(g) => Reason::Symmetry {
            map: group.form(g as usize),
        },
        Prune::ZeroSum => Reason::ZeroSum {
            solution: find_zero_sum_ending_at(&chi, pos, p)?
                .ok_or_else(|| missing("zero-sum solution"))?,
        },
        Prune::Blocked(target) => {
            debug_assert!(target <= n);
            let closers =
                closers_for(&chi, target, p).ok_or_else(|| missing("closing solutions"))?;
            Reason::Blocked { target, closers }
        }
    })
}

/// For each palette color, a solution with target `t`, parts within `chi`,
/// that the color would close to zero sum.
fn closers_for(chi: &Coloring, t: u32, p: &Params) -> Option<Vec<Solution>> {
    let r = p.r();
    let q = p.num_colors() as usize;
    let colored = chi.len() as u32;
    let mut found: Vec<Option<Solution>> = vec![None; q];
    let mut left = q;
    let _ = for_each_solution(t, p.k(), |parts| {
        if parts[parts.len() - 1] > colored {
            return ControlFlow::Continue(());
        }
        let s: u32 = parts
            .iter()
            .map(|&x| u32::from(chi.as_slice()[x as usize - 1]))
            .sum();
        let closing = ((r - s % r) % r) as usize;
        if closing < q && found[closing].is_none() {
            found[closing] = Some(Solution::from_sorted_unchecked(parts.to_vec(), t));
            left -= 1;
            if left == 0 {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    found.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RefutationSummary {
    pub nodes: u64,
    pub zero_sum: u64,
    pub blocked: u64,
    pub symmetry: u64,
}

/// Re-verifies a refutation from scratch. On success no coloring of
/// `[1, n]` avoids zero-sum solutions, so the number is at most `n`.
pub fn check_refutation(cert: &Refutation) -> Result<RefutationSummary> {
    let p = Params::new(cert.params.k(), cert.params.r(), cert.params.palette())?;
    let q = p.num_colors() as Color;
    let n = cert.n as usize;
    let fail = |step: usize, message: String| Error::Certificate { step, message };

    let mut prefix: Vec<Color> = Vec::with_capacity(n);
    // next[d]: the color expected next at depth d.
    let mut next: Vec<Color> = vec![0; n + 1];
    let mut summary = RefutationSummary {
        nodes: 1,
        ..Default::default()
    };
    for (i, step) in cert.steps.iter().enumerate() {
        let d = prefix.len();
        match step {
            Step::Enter { color } => {
                if *color != next[d] || *color >= q {
                    return Err(fail(i, format!("expected color {} at depth {d}", next[d])));
                }
                if d + 1 == n {
                    return Err(fail(i, "enters a complete coloring".into()));
                }
                prefix.push(*color);
                next[d + 1] = 0;
                summary.nodes += 1;
            }
            Step::Leave => {
                if d == 0 || next[d] != q {
                    return Err(fail(
                        i,
                        format!("leaves depth {d} before trying every color"),
                    ));
                }
                prefix.pop();
                next[d - 1] += 1;
            }
            Step::Reject { color, reason } => {
                if *color != next[d] || *color >= q {
                    return Err(fail(i, format!("expected color {} at depth {d}", next[d])));
                }
                let mut colors = prefix.clone();
                colors.push(*color);
                check_reason(&p, cert.n, &Coloring::new(colors), reason).map_err(|m| fail(i, m))?;
                match reason {
                    Reason::ZeroSum { .. } => summary.zero_sum += 1,
                    Reason::Blocked { .. } => summary.blocked += 1,
                    Reason::Symmetry { .. } => summary.symmetry += 1,
                }
                next[d] += 1;
            }
        }
    }
    if !prefix.is_empty() || next[0] != q {
        return Err(fail(
            cert.steps.len(),
            "log ends before the root is exhausted".into(),
        ));
    }
    Ok(summary)
}

fn check_solution(sol: &Solution, p: &Params) -> std::result::Result<(), String> {
    let parts = sol.parts();
    if parts.len() != p.parts() {
        return Err(format!(
            "solution {sol} has {} parts, expected {}",
            parts.len(),
            p.parts()
        ));
    }
    if parts.first() == Some(&0) || parts.windows(2).any(|w| w[0] > w[1]) {
        return Err(format!("solution {sol} is not a sorted positive tuple"));
    }
    if parts.iter().map(|&x| u64::from(x)).sum::<u64>() != u64::from(sol.target()) {
        return Err(format!("solution {sol} does not add up"));
    }
    Ok(())
}

fn check_reason(
    p: &Params,
    n: u32,
    chi: &Coloring,
    reason: &Reason,
) -> std::result::Result<(), String> {
    let pos = chi.len() as u32;
    let r = p.r();
    match reason {
        Reason::ZeroSum { solution } => {
            check_solution(solution, p)?;
            if solution.target() != pos {
                return Err(format!("solution {solution} does not end at {pos}"));
            }
            let s = color_sum(solution, chi, r).map_err(|e| e.to_string())?;
            if s != 0 {
                return Err(format!("solution {solution} has color sum {s}"));
            }
        }
        Reason::Blocked { target, closers } => {
            if *target <= pos || *target > n {
                return Err(format!("blocked target {target} outside ({pos}, {n}]"));
            }
            if closers.len() != p.num_colors() as usize {
                return Err(format!(
                    "{} closers for {} colors",
                    closers.len(),
                    p.num_colors()
                ));
            }
            for (c, sol) in closers.iter().enumerate() {
                check_solution(sol, p)?;
                if sol.target() != *target {
                    return Err(format!("closer {sol} does not end at {target}"));
                }
                let mut s = c as u32;
                for &x in sol.parts() {
                    s += u32::from(chi.get(x).map_err(|e| e.to_string())?);
                }
                if !s.is_multiple_of(r) {
                    return Err(format!("color {c} does not close {sol}"));
                }
            }
        }
        Reason::Symmetry { map } => {
            let valid = match (*map, p.palette()) {
                (ColorMap::Affine { mul, add }, Palette::Full) => {
                    mul < r
                        && add < r
                        && gcd(mul, r) == 1
                        && (add == 0 || !is_infinite_instance(p))
                        && (mul, add) != (1, 0)
                }
                (ColorMap::Complement, Palette::Binary) => !is_infinite_instance(p),
                _ => false,
            };
            if !valid {
                return Err(format!("{map:?} does not preserve zero sums here"));
            }
            let image: Option<Vec<Color>> =
                chi.as_slice().iter().map(|&x| map.apply(x, r)).collect();
            let image = image.ok_or("color outside the map's domain")?;
            if image.as_slice() >= chi.as_slice() {
                return Err(format!("{map:?} does not shrink the prefix"));
            }
        }
    }
    Ok(())
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

//! Streaming enumeration of the nondecreasing solutions of
//! `x_1 + ... + x_{k-1} = t`.
//!
//! Slots are filled from the largest (`x_{k-1}`) down to the smallest. With
//! `m` slots left and remainder `t`, the next part ranges over
//! `ceil(t / m) ..= R_{m+1}` where `R_{m+1}` is the part just placed above it
//! (or `t` itself for the top slot). The lower bound keeps the remaining
//! parts from exceeding the current one; the upper bound keeps the tuple
//! sorted. When a single slot is left it takes the whole remainder, which the
//! bounds guarantee lies in `1 ..= R_2`.
//!
//! Tuples are emitted with `x_{k-1}` increasing fastest at the outermost
//! level, i.e. in increasing lexicographic order of `(x_{k-1}, ..., x_1)`.

use std::ops::ControlFlow;

use crate::model::Solution;

/// Walks every solution, folding `step` over the parts as they are placed.
///
/// `visit` receives the parts in nondecreasing order together with the folded
/// accumulator and may break to stop the walk. Memory use is `O(k)`.
pub fn for_each_solution_fold<A, B, S, V>(
    t: u32,
    k: u32,
    init: A,
    step: S,
    mut visit: V,
) -> ControlFlow<B>
where
    A: Copy,
    S: Fn(A, u32) -> A,
    V: FnMut(&[u32], A) -> ControlFlow<B>,
{
    assert!(k >= 2, "equation needs k >= 2");
    let slots = k as usize - 1;
    if t == 0 {
        return ControlFlow::Continue(());
    }
    let mut parts = vec![0u32; slots];
    let mut walker = Walker {
        parts: &mut parts,
        step: &step,
        visit: &mut visit,
    };
    walker.fill(i64::from(t), slots, t, init)
}

struct Walker<'a, S, V> {
    parts: &'a mut [u32],
    step: &'a S,
    visit: &'a mut V,
}

impl<S, V> Walker<'_, S, V> {
    /// Fills slots `1..=n` (1-based) so they sum to `t`, each at most `upper`.
    fn fill<A, B>(&mut self, t: i64, n: usize, upper: u32, acc: A) -> ControlFlow<B>
    where
        A: Copy,
        S: Fn(A, u32) -> A,
        V: FnMut(&[u32], A) -> ControlFlow<B>,
    {
        if t <= 0 {
            return ControlFlow::Continue(());
        }
        if n == 1 {
            let last = t as u32;
            debug_assert!(last <= upper);
            self.parts[0] = last;
            let acc = (self.step)(acc, last);
            return (self.visit)(self.parts, acc);
        }
        let lo = (t + n as i64 - 1) / n as i64;
        // Parts beyond `t - (n - 1)` would leave a lower slot empty; the
        // guard above would reject them one level down anyway.
        let hi = i64::from(upper).min(t - (n as i64 - 1));
        for i in lo..=hi {
            self.parts[n - 1] = i as u32;
            let next = (self.step)(acc, i as u32);
            self.fill(t - i, n - 1, i as u32, next)?;
        }
        ControlFlow::Continue(())
    }
}

/// Visits each solution's parts; break from `visit` to stop early.
pub fn for_each_solution<B, V>(t: u32, k: u32, mut visit: V) -> ControlFlow<B>
where
    V: FnMut(&[u32]) -> ControlFlow<B>,
{
    for_each_solution_fold(t, k, (), |(), _| (), |parts, ()| visit(parts))
}

/// All solutions with target `t`, in emission order.
pub fn enumerate_solutions(t: u32, k: u32) -> Vec<Solution> {
    let mut out = Vec::new();
    let _ = for_each_solution::<(), _>(t, k, |parts| {
        out.push(Solution::from_sorted_unchecked(parts.to_vec(), t));
        ControlFlow::Continue(())
    });
    out
}

/// Number of partitions of `t` into exactly `k - 1` positive parts.
pub fn count_solutions(t: u32, k: u32) -> u64 {
    let mut count = 0u64;
    let _ = for_each_solution::<(), _>(t, k, |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    count
}

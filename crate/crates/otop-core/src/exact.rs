//! Brute-force exact solver for small instances; the oracle the heuristics
//! are measured against.
//!
//! Feasibility of a visit set is decided by its cheapest path order
//! (Held–Karp over subsets). Because the objective is monotone in visit
//! counts, some optimal solution uses only set-maximal feasible routes, so
//! the route catalogue is reduced to those; agents are interchangeable and
//! the optimal completion from a given visit-count vector depends on nothing
//! else, which the memoization exploits.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{evaluate, marginal_gain, Instance, PoiId, Route, Solution, COST_TOLERANCE};

/// Largest instance the exact solver accepts without `force`.
pub const MAX_EXACT_POIS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactError {
    /// The instance exceeds the size guard; enumeration over `2^n` visit
    /// sets (and up to `Σ n!/(n-k)!` sequences) is not desk-scale beyond it.
    TooLarge { n: usize, limit: usize },
}

impl fmt::Display for ExactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactError::TooLarge { n, limit } => write!(
                f,
                "exact search over {n} POIs refused: up to 2^{n} visit sets per route; \
                 the guard allows at most {limit} POIs (force to override)"
            ),
        }
    }
}

impl core::error::Error for ExactError {}

fn guard(instance: &Instance, force: bool) -> Result<(), ExactError> {
    if instance.n() > MAX_EXACT_POIS && !force {
        return Err(ExactError::TooLarge { n: instance.n(), limit: MAX_EXACT_POIS });
    }
    Ok(())
}

/// Every feasible route: all simple POI sequences with reachable legs and
/// cost within budget, including the empty route. Ordered depth-first by
/// ascending ids.
pub fn enumerate_routes(instance: &Instance, force: bool) -> Result<Vec<Route>, ExactError> {
    guard(instance, force)?;
    let n = instance.n();
    let mut out = vec![Route::empty()];
    let mut prefix: Vec<PoiId> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    extend(instance, &mut prefix, 0.0, &mut used, &mut out);
    Ok(out)
}

fn extend(
    instance: &Instance,
    prefix: &mut Vec<PoiId>,
    cost: f64,
    used: &mut [bool],
    out: &mut Vec<Route>,
) {
    for next in 0..instance.n() {
        if used[next] {
            continue;
        }
        let leg = match prefix.last() {
            Some(&last) => instance.travel().cost(last, next),
            None => 0.0,
        };
        let total = cost + leg;
        if !leg.is_finite() || total > instance.budget() + COST_TOLERANCE {
            continue;
        }
        prefix.push(next);
        used[next] = true;
        out.push(Route::from_raw(prefix.clone(), total));
        extend(instance, prefix, total, used, out);
        used[next] = false;
        prefix.pop();
    }
}

/// Cheapest open-path cost and order for every visit set, by Held–Karp.
struct PathTable {
    /// `best[mask]` = (cost, last POI) of the cheapest path visiting `mask`.
    best: Vec<(f64, usize)>,
    /// `parent[mask * n + last]` = predecessor of `last` on that path.
    parent: Vec<usize>,
    n: usize,
}

impl PathTable {
    fn build(instance: &Instance) -> Self {
        let n = instance.n();
        let masks = 1usize << n;
        let mut cost = vec![f64::INFINITY; masks * n];
        let mut parent = vec![usize::MAX; masks * n];
        for i in 0..n {
            cost[(1 << i) * n + i] = 0.0;
        }
        for mask in 1..masks {
            for last in 0..n {
                let c = cost[mask * n + last];
                if !c.is_finite() || mask & (1 << last) == 0 {
                    continue;
                }
                for next in 0..n {
                    if mask & (1 << next) != 0 {
                        continue;
                    }
                    let leg = instance.travel().cost(last, next);
                    if !leg.is_finite() {
                        continue;
                    }
                    let slot = (mask | (1 << next)) * n + next;
                    if c + leg < cost[slot] {
                        cost[slot] = c + leg;
                        parent[slot] = last;
                    }
                }
            }
        }
        let mut best = vec![(f64::INFINITY, usize::MAX); masks];
        for mask in 1..masks {
            for last in 0..n {
                if mask & (1 << last) != 0 && cost[mask * n + last] < best[mask].0 {
                    best[mask] = (cost[mask * n + last], last);
                }
            }
        }
        PathTable { best, parent, n }
    }

    fn feasible(&self, mask: usize, budget: f64) -> bool {
        self.best[mask].0 <= budget + COST_TOLERANCE
    }

    /// Cheapest visit order realizing `mask`.
    fn order(&self, mask: usize) -> (Vec<PoiId>, f64) {
        if mask == 0 {
            return (Vec::new(), 0.0);
        }
        let (total, mut last) = self.best[mask];
        let mut remaining = mask;
        let mut visits = Vec::new();
        while last != usize::MAX {
            visits.push(last);
            let prev = self.parent[remaining * self.n + last];
            remaining &= !(1 << last);
            last = prev;
        }
        visits.reverse();
        (visits, total)
    }
}

/// Globally optimal solution: the best multiset of feasible routes, one per
/// agent, maximizing `Σ wᵢ·qᵢ^β`.
pub fn exact_solve(instance: &Instance, force: bool) -> Result<Solution, ExactError> {
    guard(instance, force)?;
    let n = instance.n();
    if n == 0 {
        let routes = vec![Route::empty(); instance.fleet_size()];
        return Ok(evaluate(instance, routes).expect("empty solution is feasible"));
    }

    let paths = PathTable::build(instance);
    let feasible: Vec<usize> =
        (1..(1usize << n)).filter(|&m| paths.feasible(m, instance.budget())).collect();
    // Adding a POI to a route never lowers the objective, so only
    // set-maximal feasible routes need to be considered.
    let maximal: Vec<usize> = feasible
        .iter()
        .copied()
        .filter(|&mask| {
            (0..n).all(|j| mask & (1 << j) != 0 || !paths.feasible(mask | (1 << j), instance.budget()))
        })
        .collect();
    debug_assert!(!maximal.is_empty(), "singleton routes are always feasible");

    let mut memo: BTreeMap<(usize, Vec<u16>), (f64, usize)> = BTreeMap::new();
    let counts = vec![0u16; n];
    best_completion(instance, &maximal, instance.fleet_size(), &counts, &mut memo);

    // Walk the memoized choices to materialize the routes.
    let mut routes = Vec::with_capacity(instance.fleet_size());
    let mut counts = counts;
    for remaining in (1..=instance.fleet_size()).rev() {
        let &(_, mask) = memo.get(&(remaining, counts.clone())).expect("memoized state");
        let (visits, cost) = paths.order(mask);
        for &poi in &visits {
            counts[poi] += 1;
        }
        routes.push(Route::from_raw(visits, cost));
    }
    Ok(evaluate(instance, routes).expect("exact solution is feasible"))
}

/// Best achievable extra reward with `remaining` routes still to assign,
/// starting from the visit counts `counts`; also records the first route of
/// an optimal completion.
fn best_completion(
    instance: &Instance,
    maximal: &[usize],
    remaining: usize,
    counts: &[u16],
    memo: &mut BTreeMap<(usize, Vec<u16>), (f64, usize)>,
) -> f64 {
    if remaining == 0 {
        return 0.0;
    }
    let key = (remaining, counts.to_vec());
    if let Some(&(value, _)) = memo.get(&key) {
        return value;
    }
    let mut best = (f64::NEG_INFINITY, 0);
    let mut next = counts.to_vec();
    for &mask in maximal {
        next.copy_from_slice(counts);
        let mut gain = 0.0;
        for poi in 0..instance.n() {
            if mask & (1 << poi) != 0 {
                gain += marginal_gain(instance.weight(poi), next[poi] as u32, instance.beta());
                next[poi] += 1;
            }
        }
        let value = gain + best_completion(instance, maximal, remaining - 1, &next, memo);
        if value > best.0 {
            best = (value, mask);
        }
    }
    memo.insert(key, best);
    best.0
}

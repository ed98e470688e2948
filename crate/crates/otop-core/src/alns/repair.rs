//! Parallel insertion repair operators: greedy insertion and k-regret
//! insertion. Both consider every POI that is not yet saturated across all
//! routes, insert at minimum-cost positions, and stop when no insertion can
//! add reward.
//!
//! Insertion value is marginal gain per unit of extra travel. Zero-cost
//! insertions (empty routes, duplicate coordinates) have unbounded value and
//! are taken first, highest gain leading; remaining ties follow the lowest
//! POI id, then the lowest route index.

use alloc::vec::Vec;

use crate::model::{Instance, PoiId, Solution};

use super::state::Work;

/// The repair family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepairOp {
    Greedy,
    Regret,
}

impl RepairOp {
    pub const ALL: [RepairOp; 2] = [RepairOp::Greedy, RepairOp::Regret];

    pub fn name(self) -> &'static str {
        match self {
            RepairOp::Greedy => "greedy",
            RepairOp::Regret => "regret",
        }
    }
}

/// Which regret formula drives the k-regret selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegretVariant {
    /// Sum of (best − j-th best) insertion values, maximized.
    Classic,
    /// Sum of (j-th best − best), maximized; selects the minimal spread.
    /// Kept for comparison experiments.
    LiteralSpread,
}

/// Best insertion slot per (route, poi), refreshed per modified route.
struct SlotCache {
    slots: Vec<Vec<Option<(usize, f64)>>>,
}

impl SlotCache {
    fn build(work: &Work<'_>) -> Self {
        let mut cache = SlotCache { slots: Vec::with_capacity(work.fleet_size()) };
        for route in 0..work.fleet_size() {
            cache.slots.push(column(work, route));
        }
        cache
    }

    fn rebuild_route(&mut self, work: &Work<'_>, route: usize) {
        self.slots[route] = column(work, route);
    }
}

fn column(work: &Work<'_>, route: usize) -> Vec<Option<(usize, f64)>> {
    (0..work.inst.n()).map(|poi| work.best_insertion(route, poi)).collect()
}

#[derive(Clone, Copy)]
struct Pick {
    free: bool,
    score: f64,
    gain: f64,
    poi: PoiId,
    route: usize,
    pos: usize,
}

impl Pick {
    fn beats(&self, other: &Pick) -> bool {
        if self.free != other.free {
            return self.free;
        }
        let (a, b) = if self.free { (self.gain, other.gain) } else { (self.score, other.score) };
        if a != b {
            return a > b;
        }
        (self.poi, self.route) < (other.poi, other.route)
    }
}

/// Ratio used for ranking an insertion; costs at or below zero make the
/// reward free.
#[inline]
fn insertion_value(gain: f64, dt: f64) -> f64 {
    if dt <= 0.0 {
        f64::INFINITY
    } else {
        gain / dt
    }
}

fn greedy_pick(work: &Work<'_>, cache: &SlotCache) -> Option<Pick> {
    let mut best: Option<Pick> = None;
    for poi in 0..work.inst.n() {
        let gain = work.gains[poi];
        if gain <= 0.0 || work.counts[poi] as usize >= work.fleet_size() {
            continue;
        }
        for route in 0..work.fleet_size() {
            let Some((pos, dt)) = cache.slots[route][poi] else {
                continue;
            };
            let value = insertion_value(gain, dt);
            let pick = Pick { free: value.is_infinite(), score: value, gain, poi, route, pos };
            if best.as_ref().map_or(true, |b| pick.beats(b)) {
                best = Some(pick);
            }
        }
    }
    best
}

/// Regret of a POI given its per-route insertion values sorted descending;
/// routes it cannot enter count as value 0.
pub(crate) fn regret_score(sorted_values: &[f64], k: usize, variant: RegretVariant) -> f64 {
    const CAP: f64 = 1e100;
    let at = |j: usize| sorted_values.get(j).copied().unwrap_or(0.0).min(CAP);
    let best = at(0);
    match variant {
        RegretVariant::Classic => (1..k).map(|j| best - at(j)).sum(),
        RegretVariant::LiteralSpread => (1..k).map(|j| at(j) - best).sum(),
    }
}

fn regret_pick(
    work: &Work<'_>,
    cache: &SlotCache,
    k: usize,
    variant: RegretVariant,
) -> Option<Pick> {
    let mut best: Option<Pick> = None;
    let mut values: Vec<f64> = Vec::with_capacity(work.fleet_size());
    for poi in 0..work.inst.n() {
        let gain = work.gains[poi];
        if gain <= 0.0 || work.counts[poi] as usize >= work.fleet_size() {
            continue;
        }
        values.clear();
        let mut slot: Option<(usize, usize, f64)> = None; // (route, pos, value)
        for route in 0..work.fleet_size() {
            let Some((pos, dt)) = cache.slots[route][poi] else {
                continue;
            };
            let value = insertion_value(gain, dt);
            values.push(value);
            if slot.map_or(true, |(_, _, v)| value > v) {
                slot = Some((route, pos, value));
            }
        }
        let Some((route, pos, top)) = slot else {
            continue;
        };
        values.sort_by(|a, b| b.total_cmp(a));
        let pick = Pick {
            free: top.is_infinite(),
            score: regret_score(&values, k, variant),
            gain,
            poi,
            route,
            pos,
        };
        if best.as_ref().map_or(true, |b| pick.beats(b)) {
            best = Some(pick);
        }
    }
    best
}

fn run(work: &mut Work<'_>, mut select: impl FnMut(&Work<'_>, &SlotCache) -> Option<Pick>) {
    let mut cache = SlotCache::build(work);
    while let Some(pick) = select(work, &cache) {
        work.insert(pick.route, pick.pos, pick.poi);
        cache.rebuild_route(work, pick.route);
    }
}

pub(crate) fn greedy_repair(work: &mut Work<'_>) {
    run(work, greedy_pick);
}

pub(crate) fn regret_repair(work: &mut Work<'_>, k: usize, variant: RegretVariant) {
    run(work, |w, c| regret_pick(w, c, k, variant));
}

pub(crate) fn run_repair(op: RepairOp, work: &mut Work<'_>, k: usize, variant: RegretVariant) {
    match op {
        RepairOp::Greedy => greedy_repair(work),
        RepairOp::Regret => regret_repair(work, k, variant),
    }
}

fn wrap(instance: &Instance, partial: &Solution, f: impl FnOnce(&mut Work<'_>)) -> Solution {
    let mut work = Work::from_solution(instance, partial);
    f(&mut work);
    debug_assert!(work.validate(1e-6).is_ok());
    work.to_solution()
}

/// Greedy insertion: repeatedly inserts the (POI, route) pair with the
/// highest insertion value until no insertion can add reward.
pub fn repair_greedy(instance: &Instance, partial: &Solution) -> Solution {
    wrap(instance, partial, greedy_repair)
}

/// k-regret insertion: repeatedly inserts the POI whose best option is most
/// superior to its next-best options, at its best slot.
pub fn repair_regret(instance: &Instance, partial: &Solution, k: usize) -> Solution {
    wrap(instance, partial, |w| regret_repair(w, k, RegretVariant::Classic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::euclidean_matrix;
    use crate::model::{evaluate, Instance, Poi, Route};
    use alloc::vec;

    fn instance(pts: &[[f64; 2]], weights: &[f64], fleet: usize, budget: f64) -> Instance {
        let pois = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Poi::at(i, w, pts[i]))
            .collect();
        Instance::new(pois, euclidean_matrix(pts), fleet, budget, 0.5).unwrap()
    }

    fn empty_solution(inst: &Instance) -> Solution {
        evaluate(inst, vec![Route::empty(); inst.fleet_size()]).unwrap()
    }

    #[test]
    fn regret_score_classic_examples() {
        // POI A with values (10, 9) regrets little; B with (8, 2) regrets 6.
        assert_eq!(regret_score(&[10.0, 9.0], 2, RegretVariant::Classic), 1.0);
        assert_eq!(regret_score(&[8.0, 2.0], 2, RegretVariant::Classic), 6.0);
        // Insertable into a single route: regret = best - 0.
        assert_eq!(regret_score(&[7.0], 2, RegretVariant::Classic), 7.0);
        // Deeper regret pads missing entries with zero.
        assert_eq!(regret_score(&[8.0, 2.0], 3, RegretVariant::Classic), 14.0);
    }

    #[test]
    fn regret_score_literal_variant_flips_the_sign() {
        assert_eq!(regret_score(&[10.0, 9.0], 2, RegretVariant::LiteralSpread), -1.0);
        assert_eq!(regret_score(&[8.0, 2.0], 2, RegretVariant::LiteralSpread), -6.0);
    }

    #[test]
    fn greedy_fills_a_single_poi_into_an_empty_route() {
        let inst = instance(&[[1.0, 1.0]], &[6.0], 1, 4.0);
        let repaired = repair_greedy(&inst, &empty_solution(&inst));
        assert_eq!(repaired.objective(), 6.0);
        assert_eq!(repaired.route(0).visits(), &[0]);
    }

    #[test]
    fn contained_pois_are_not_candidates_for_the_same_route() {
        let inst = instance(&[[0.0, 0.0]], &[5.0], 2, 10.0);
        let partial = evaluate(
            &inst,
            vec![Route::new(&inst, vec![0]).unwrap(), Route::empty()],
        )
        .unwrap();
        let repaired = repair_greedy(&inst, &partial);
        // The POI saturates both routes, once each.
        assert_eq!(repaired.visit_counts(), &[2]);
        assert_eq!(repaired.route(0).len(), 1);
        assert_eq!(repaired.route(1).len(), 1);
    }

    #[test]
    fn free_insertions_take_the_highest_gain_first() {
        let inst = instance(&[[0.0, 0.0], [40.0, 0.0]], &[1.0, 5.0], 2, 1.0);
        let repaired = repair_greedy(&inst, &empty_solution(&inst));
        // Both routes adopt the heavy POI (free singleton insertions beat
        // everything, highest gain first); the light one cannot join the
        // same routes within budget.
        assert_eq!(repaired.visit_counts()[1], 2);
        assert_eq!(repaired.visit_counts()[0], 0);
    }

    #[test]
    fn zero_weight_pois_are_never_inserted() {
        let inst = instance(&[[0.0, 0.0], [1.0, 0.0]], &[0.0, 2.0], 1, 10.0);
        let repaired = repair_greedy(&inst, &empty_solution(&inst));
        assert_eq!(repaired.visit_counts(), &[0, 1]);
    }

    #[test]
    fn regret_repair_reaches_local_insertion_saturation() {
        let pts = [[0.0, 0.0], [3.0, 0.0], [6.0, 0.0], [3.0, 3.0]];
        let inst = instance(&pts, &[2.0, 3.0, 1.0, 2.0], 2, 8.0);
        let repaired = repair_regret(&inst, &empty_solution(&inst), 2);
        let work = Work::from_solution(&inst, &repaired);
        for poi in 0..inst.n() {
            if work.gains[poi] <= 0.0 || work.counts[poi] as usize >= inst.fleet_size() {
                continue;
            }
            for route in 0..inst.fleet_size() {
                assert!(
                    work.best_insertion(route, poi).is_none(),
                    "POI {poi} still insertable into route {route}"
                );
            }
        }
    }
}

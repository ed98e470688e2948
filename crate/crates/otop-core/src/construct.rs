//! Constructive solvers: the reward-efficiency greedy, a stochastic
//! single-route orienteering solver, and the sequential initializer that
//! builds one route per agent against the running marginal gains.

use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::model::{evaluate, marginal_gain, Instance, PoiId, Route, Solution, COST_TOLERANCE};
use crate::rng;

/// Per-POI marginal gains kept in sync with the visit counts committed so
/// far: `gain(i) = w_i·((q_i+1)^β − q_i^β)` at all times.
#[derive(Clone, Debug)]
pub struct GainTable {
    counts: Vec<u32>,
    gains: Vec<f64>,
}

impl GainTable {
    /// Table for an untouched instance (all visit counts zero).
    pub fn new(instance: &Instance) -> Self {
        let counts = vec![0u32; instance.n()];
        let gains = (0..instance.n())
            .map(|i| marginal_gain(instance.weight(i), 0, instance.beta()))
            .collect();
        GainTable { counts, gains }
    }

    #[inline]
    pub fn gain(&self, poi: PoiId) -> f64 {
        self.gains[poi]
    }

    pub fn count(&self, poi: PoiId) -> u32 {
        self.counts[poi]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Registers one more visit of `poi` and refreshes its gain.
    pub fn record_visit(&mut self, instance: &Instance, poi: PoiId) {
        self.counts[poi] += 1;
        self.gains[poi] = marginal_gain(instance.weight(poi), self.counts[poi], instance.beta());
    }

    /// Registers every visit of a committed route.
    pub fn commit_route(&mut self, instance: &Instance, route: &Route) {
        for &poi in route.visits() {
            self.record_visit(instance, poi);
        }
    }
}

/// Knobs of the stochastic orienteering constructor. The next visit is drawn
/// among the `candidate_size` nearest feasible POIs with probability
/// proportional to `(gain/cost)^desirability_exponent`; the best route over
/// `effort` independent restarts is kept.
#[derive(Clone, Debug, PartialEq)]
pub struct OpConfig {
    pub desirability_exponent: f64,
    pub candidate_size: usize,
    pub effort: u32,
}

impl Default for OpConfig {
    fn default() -> Self {
        OpConfig { desirability_exponent: 4.0, candidate_size: 4, effort: 3000 }
    }
}

/// Builds one route per agent in sequence. Each route starts at the POI with
/// the highest marginal gain, then repeatedly appends the feasible POI
/// maximizing gain per unit travel from the current endpoint; gains are
/// refreshed at every insertion. Deterministic: ties go to the lowest POI id.
pub fn greedy_solve(instance: &Instance) -> Solution {
    let mut gains = GainTable::new(instance);
    let mut routes = Vec::with_capacity(instance.fleet_size());
    for _ in 0..instance.fleet_size() {
        let visits = greedy_route(instance, &mut gains);
        routes.push(Route::new(instance, visits).expect("greedy route is feasible"));
    }
    evaluate(instance, routes).expect("greedy solution is feasible")
}

fn greedy_route(instance: &Instance, gains: &mut GainTable) -> Vec<PoiId> {
    let n = instance.n();
    let mut start = None;
    let mut best_gain = 0.0;
    for poi in 0..n {
        if gains.gain(poi) > best_gain {
            best_gain = gains.gain(poi);
            start = Some(poi);
        }
    }
    let Some(start) = start else {
        return Vec::new();
    };

    let mut visits = vec![start];
    let mut in_route = vec![false; n];
    in_route[start] = true;
    gains.record_visit(instance, start);
    let mut cost = 0.0;
    let mut current = start;

    loop {
        let mut best: Option<(f64, PoiId, f64)> = None; // (efficiency, poi, leg)
        for poi in 0..n {
            if in_route[poi] || gains.gain(poi) <= 0.0 {
                continue;
            }
            let leg = instance.travel().cost(current, poi);
            if !leg.is_finite() || cost + leg > instance.budget() + COST_TOLERANCE {
                continue;
            }
            let efficiency = if leg == 0.0 { f64::INFINITY } else { gains.gain(poi) / leg };
            if best.map_or(true, |(e, _, _)| efficiency > e) {
                best = Some((efficiency, poi, leg));
            }
        }
        let Some((_, next, leg)) = best else {
            break;
        };
        visits.push(next);
        in_route[next] = true;
        gains.record_visit(instance, next);
        cost += leg;
        current = next;
    }
    visits
}

/// Builds a single open route approximately maximizing the total marginal
/// gain `Σ gain(i)` collected, within the budget and without repeats.
///
/// Stochastic restarts: the start is sampled proportionally to the gains and
/// each following visit is drawn from the nearest feasible candidates (see
/// [`OpConfig`]); the best restart wins, ties going to the lexicographically
/// smaller visit sequence. Returns an empty route when no POI has positive
/// gain.
pub fn op_solve(instance: &Instance, gains: &GainTable, seed: u64, config: &OpConfig) -> Route {
    let mut best_visits: Vec<PoiId> = Vec::new();
    let mut best_gain = 0.0;
    let mut scratch = OpScratch::new(instance.n());
    for restart in 0..config.effort {
        let mut rng = rng::stream(seed, restart as u64);
        let visits = op_restart(instance, gains, config, &mut scratch, &mut rng);
        let gain: f64 = visits.iter().map(|&p| gains.gain(p)).sum();
        if gain > best_gain || (gain == best_gain && !visits.is_empty() && visits < best_visits) {
            best_gain = gain;
            best_visits = visits;
        }
    }
    Route::new(instance, best_visits).expect("constructed route is feasible")
}

struct OpScratch {
    in_route: Vec<bool>,
    candidates: Vec<(f64, PoiId)>,
}

impl OpScratch {
    fn new(n: usize) -> Self {
        OpScratch { in_route: vec![false; n], candidates: Vec::with_capacity(n) }
    }
}

fn op_restart(
    instance: &Instance,
    gains: &GainTable,
    config: &OpConfig,
    scratch: &mut OpScratch,
    rng: &mut impl Rng,
) -> Vec<PoiId> {
    let n = instance.n();
    let positive: Vec<PoiId> = (0..n).filter(|&p| gains.gain(p) > 0.0).collect();
    if positive.is_empty() {
        return Vec::new();
    }
    let start_weights: Vec<f64> = positive.iter().map(|&p| gains.gain(p)).collect();
    let start = positive[WeightedIndex::new(&start_weights)
        .expect("positive gains")
        .sample(rng)];

    scratch.in_route.fill(false);
    let mut visits = vec![start];
    scratch.in_route[start] = true;
    let mut cost = 0.0;
    let mut current = start;

    loop {
        // Nearest `candidate_size` feasible POIs from the current endpoint.
        let candidates = &mut scratch.candidates;
        candidates.clear();
        for poi in 0..n {
            if scratch.in_route[poi] || gains.gain(poi) <= 0.0 {
                continue;
            }
            let leg = instance.travel().cost(current, poi);
            if !leg.is_finite() || cost + leg > instance.budget() + COST_TOLERANCE {
                continue;
            }
            candidates.push((leg, poi));
        }
        if candidates.is_empty() {
            break;
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        candidates.truncate(config.candidate_size);

        // Zero-cost legs have unbounded desirability; take the best of them
        // outright.
        let next = if let Some(&(_, poi)) = candidates.iter().find(|&&(leg, _)| leg == 0.0) {
            poi
        } else {
            let weights: Vec<f64> = candidates
                .iter()
                .map(|&(leg, poi)| {
                    crate::math::powf(gains.gain(poi) / leg, config.desirability_exponent)
                })
                .collect();
            match WeightedIndex::new(&weights) {
                Ok(dist) => candidates[dist.sample(rng)].1,
                // All desirabilities underflowed to zero; fall back to the
                // nearest candidate.
                Err(_) => candidates[0].1,
            }
        };
        let leg = instance.travel().cost(current, next);
        visits.push(next);
        scratch.in_route[next] = true;
        cost += leg;
        current = next;
    }
    visits
}

/// Sequential initializer: one [`op_solve`] route per agent, committing each
/// route's visits to the gain table before building the next.
pub fn sequential_op_solve(instance: &Instance, seed: u64, config: &OpConfig) -> Solution {
    let mut gains = GainTable::new(instance);
    let mut routes = Vec::with_capacity(instance.fleet_size());
    for agent in 0..instance.fleet_size() {
        let route = op_solve(instance, &gains, rng::derive(seed, agent as u64), config);
        gains.commit_route(instance, &route);
        routes.push(route);
    }
    evaluate(instance, routes).expect("sequential solution is feasible")
}

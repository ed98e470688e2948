//! Mutable search state with incrementally maintained costs, visit counts,
//! marginal gains, and objective.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::model::{
    evaluate, marginal_gain, objective_from_counts, route_cost, splice_saving, Instance, PoiId,
    Route, Solution, COST_TOLERANCE,
};

#[derive(Clone, Debug)]
pub(crate) struct Work<'a> {
    pub inst: &'a Instance,
    pub routes: Vec<Vec<PoiId>>,
    pub costs: Vec<f64>,
    pub counts: Vec<u32>,
    pub gains: Vec<f64>,
    pub objective: f64,
    pub total_visits: usize,
}

impl<'a> Work<'a> {
    pub fn from_solution(inst: &'a Instance, solution: &Solution) -> Self {
        let routes: Vec<Vec<PoiId>> = solution.routes().iter().map(|r| r.visits().to_vec()).collect();
        let costs = solution.routes().iter().map(Route::cost).collect();
        let counts = solution.visit_counts().to_vec();
        let gains = counts
            .iter()
            .enumerate()
            .map(|(i, &q)| marginal_gain(inst.weight(i), q, inst.beta()))
            .collect();
        let total_visits = solution.total_visits();
        Work { inst, routes, costs, counts, gains, objective: solution.objective(), total_visits }
    }

    /// Freezes the state into a fully re-validated [`Solution`].
    pub fn to_solution(&self) -> Solution {
        let routes = self
            .routes
            .iter()
            .map(|visits| Route::new(self.inst, visits.clone()).expect("search state is feasible"))
            .collect();
        evaluate(self.inst, routes).expect("search state is feasible")
    }

    pub fn fleet_size(&self) -> usize {
        self.routes.len()
    }

    #[inline]
    pub fn contains(&self, route: usize, poi: PoiId) -> bool {
        self.routes[route].contains(&poi)
    }

    /// Removes the visit at `pos` if the splice stays reachable and within
    /// budget; returns the POI and the (reward-loss, cost-saving) pair.
    pub fn remove_at(&mut self, route: usize, pos: usize) -> Option<(PoiId, f64, f64)> {
        let saving = splice_saving(self.inst.travel(), &self.routes[route], pos)?;
        let new_cost = self.costs[route] - saving;
        if new_cost > self.inst.budget() + COST_TOLERANCE {
            return None;
        }
        let poi = self.routes[route].remove(pos);
        self.costs[route] = new_cost.max(0.0);
        self.counts[poi] -= 1;
        let loss = marginal_gain(self.inst.weight(poi), self.counts[poi], self.inst.beta());
        self.objective -= loss;
        self.gains[poi] = loss;
        self.total_visits -= 1;
        Some((poi, loss, saving))
    }

    pub fn remove_poi(&mut self, route: usize, poi: PoiId) -> Option<(PoiId, f64, f64)> {
        let pos = self.routes[route].iter().position(|&p| p == poi)?;
        self.remove_at(route, pos)
    }

    /// Empties a route entirely (always admissible).
    pub fn clear_route(&mut self, route: usize) -> Vec<PoiId> {
        let visits = core::mem::take(&mut self.routes[route]);
        for &poi in &visits {
            self.counts[poi] -= 1;
            let gain = marginal_gain(self.inst.weight(poi), self.counts[poi], self.inst.beta());
            self.objective -= gain;
            self.gains[poi] = gain;
        }
        self.costs[route] = 0.0;
        self.total_visits -= visits.len();
        visits
    }

    /// Extra cost of inserting `poi` at position `pos`; infinite if a needed
    /// leg is absent.
    pub fn insertion_cost(&self, route: usize, pos: usize, poi: PoiId) -> f64 {
        let visits = &self.routes[route];
        let travel = self.inst.travel();
        if visits.is_empty() {
            return 0.0;
        }
        if pos == 0 {
            travel.cost(poi, visits[0])
        } else if pos == visits.len() {
            travel.cost(visits[pos - 1], poi)
        } else {
            travel.cost(visits[pos - 1], poi) + travel.cost(poi, visits[pos])
                - travel.cost(visits[pos - 1], visits[pos])
        }
    }

    /// Minimum-cost insertion position for `poi` in `route`, provided the
    /// route does not already contain it and the result stays within budget.
    /// Ties go to the lowest position.
    pub fn best_insertion(&self, route: usize, poi: PoiId) -> Option<(usize, f64)> {
        if self.contains(route, poi) {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        for pos in 0..=self.routes[route].len() {
            let dt = self.insertion_cost(route, pos, poi);
            if dt.is_finite() && best.map_or(true, |(_, b)| dt < b) {
                best = Some((pos, dt));
            }
        }
        let (pos, dt) = best?;
        (self.costs[route] + dt <= self.inst.budget() + COST_TOLERANCE).then_some((pos, dt))
    }

    pub fn insert(&mut self, route: usize, pos: usize, poi: PoiId) {
        let dt = self.insertion_cost(route, pos, poi);
        debug_assert!(dt.is_finite());
        debug_assert!(self.costs[route] + dt <= self.inst.budget() + COST_TOLERANCE);
        self.routes[route].insert(pos, poi);
        self.costs[route] += dt;
        self.objective += self.gains[poi];
        self.counts[poi] += 1;
        self.gains[poi] = marginal_gain(self.inst.weight(poi), self.counts[poi], self.inst.beta());
        self.total_visits += 1;
    }

    /// Recomputes every cached quantity exactly, clearing float drift from
    /// long runs of incremental updates.
    pub fn refresh(&mut self) {
        self.counts.fill(0);
        for visits in &self.routes {
            for &poi in visits {
                self.counts[poi] += 1;
            }
        }
        for (i, gain) in self.gains.iter_mut().enumerate() {
            *gain = marginal_gain(self.inst.weight(i), self.counts[i], self.inst.beta());
        }
        for (k, visits) in self.routes.iter().enumerate() {
            self.costs[k] = route_cost(self.inst.travel(), visits);
        }
        self.objective = objective_from_counts(self.inst, &self.counts);
        self.total_visits = self.routes.iter().map(Vec::len).sum();
    }

    /// Full consistency and feasibility check, used by debug assertions and
    /// tests.
    pub fn validate(&self, tolerance: f64) -> Result<(), String> {
        let mut counts = self.counts.clone();
        counts.fill(0);
        for (k, visits) in self.routes.iter().enumerate() {
            let cost = route_cost(self.inst.travel(), visits);
            if !cost.is_finite() {
                return Err(format!("route {k} has an unreachable leg"));
            }
            if cost > self.inst.budget() + COST_TOLERANCE {
                return Err(format!("route {k} cost {cost} exceeds budget {}", self.inst.budget()));
            }
            if (cost - self.costs[k]).abs() > tolerance {
                return Err(format!("route {k} cached cost {} but recomputed {cost}", self.costs[k]));
            }
            for (i, &poi) in visits.iter().enumerate() {
                if visits[..i].contains(&poi) {
                    return Err(format!("route {k} visits POI {poi} twice"));
                }
                counts[poi] += 1;
            }
        }
        if counts != self.counts {
            return Err(format!("cached visit counts diverged"));
        }
        for (i, &q) in counts.iter().enumerate() {
            if q as usize > self.fleet_size() {
                return Err(format!("POI {i} visited {q} times with only {} routes", self.fleet_size()));
            }
            let gain = marginal_gain(self.inst.weight(i), q, self.inst.beta());
            if (gain - self.gains[i]).abs() > tolerance {
                return Err(format!("cached gain for POI {i} diverged"));
            }
        }
        let objective = objective_from_counts(self.inst, &counts);
        if (objective - self.objective).abs() > tolerance {
            return Err(format!(
                "cached objective {} but recomputed {objective}",
                self.objective
            ));
        }
        Ok(())
    }
}

//! Domain types, reward evaluation, and feasibility checking.
//!
//! Everything else in the crate is tested against this module: a [`Solution`]
//! is only ever built through [`evaluate`], which re-derives visit counts and
//! the objective from scratch and rejects any route that breaks an invariant.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Index of a POI; ids are dense in `0..n`.
pub type PoiId = usize;

/// Planar coordinate, used by the Euclidean matrix builder and plotting.
pub type Point = [f64; 2];

/// Travel cost marking an absent arc.
pub const UNREACHABLE: f64 = f64::INFINITY;

/// Slack applied to every budget comparison; splice arithmetic accumulates
/// rounding.
pub const COST_TOLERANCE: f64 = 1e-9;

/// A point of interest with a non-negative sensing weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Poi {
    pub id: PoiId,
    pub weight: f64,
    pub position: Option<Point>,
}

impl Poi {
    pub fn new(id: PoiId, weight: f64) -> Self {
        Poi { id, weight, position: None }
    }

    pub fn at(id: PoiId, weight: f64, position: Point) -> Self {
        Poi { id, weight, position: Some(position) }
    }
}

/// Dense n×n matrix of travel costs. Entries are non-negative finite costs or
/// [`UNREACHABLE`]; the diagonal is zero. Symmetry is not required.
#[derive(Clone, Debug, PartialEq)]
pub struct TravelMatrix {
    n: usize,
    costs: Vec<f64>,
}

impl TravelMatrix {
    /// Matrix from row vectors. Rows must be square with a zero diagonal and
    /// non-negative entries (`UNREACHABLE` allowed off-diagonal).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let n = rows.len();
        let mut costs = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError::RaggedMatrix { row: i, len: row.len(), expected: n });
            }
            costs.extend_from_slice(row);
        }
        let m = TravelMatrix { n, costs };
        m.validate()?;
        Ok(m)
    }

    /// n×n matrix with zero diagonal and every off-diagonal entry set to
    /// `fill`.
    pub fn filled(n: usize, fill: f64) -> Self {
        let mut costs = vec![fill; n * n];
        for i in 0..n {
            costs[i * n + i] = 0.0;
        }
        TravelMatrix { n, costs }
    }

    fn validate(&self) -> Result<(), ModelError> {
        for i in 0..self.n {
            for j in 0..self.n {
                let c = self.cost(i, j);
                if i == j && c != 0.0 {
                    return Err(ModelError::NonZeroDiagonal { index: i });
                }
                if c.is_nan() || c < 0.0 {
                    return Err(ModelError::BadCost { from: i, to: j, cost: c });
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn cost(&self, from: PoiId, to: PoiId) -> f64 {
        self.costs[from * self.n + to]
    }

    #[inline]
    pub fn is_reachable(&self, from: PoiId, to: PoiId) -> bool {
        self.cost(from, to).is_finite()
    }

    pub(crate) fn set(&mut self, from: PoiId, to: PoiId, cost: f64) {
        self.costs[from * self.n + to] = cost;
    }
}

/// A problem instance: POIs, travel costs, fleet size, per-route budget, and
/// the reward exponent `beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pois: Vec<Poi>,
    travel: TravelMatrix,
    fleet_size: usize,
    budget: f64,
    beta: f64,
}

impl Instance {
    pub fn new(
        pois: Vec<Poi>,
        travel: TravelMatrix,
        fleet_size: usize,
        budget: f64,
        beta: f64,
    ) -> Result<Self, ModelError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(ModelError::BetaOutOfRange(beta));
        }
        if !(budget > 0.0) || !budget.is_finite() {
            return Err(ModelError::NonPositiveBudget(budget));
        }
        if fleet_size == 0 {
            return Err(ModelError::ZeroFleet);
        }
        if travel.n() != pois.len() {
            return Err(ModelError::MatrixDimension { pois: pois.len(), matrix: travel.n() });
        }
        for (index, poi) in pois.iter().enumerate() {
            if poi.id != index {
                return Err(ModelError::NonDenseIds { index, id: poi.id });
            }
            if poi.weight.is_nan() || poi.weight < 0.0 || poi.weight.is_infinite() {
                return Err(ModelError::BadWeight { poi: poi.id, weight: poi.weight });
            }
        }
        Ok(Instance { pois, travel, fleet_size, budget, beta })
    }

    pub fn n(&self) -> usize {
        self.pois.len()
    }

    pub fn pois(&self) -> &[Poi] {
        &self.pois
    }

    pub fn poi(&self, id: PoiId) -> &Poi {
        &self.pois[id]
    }

    #[inline]
    pub fn weight(&self, id: PoiId) -> f64 {
        self.pois[id].weight
    }

    pub fn position(&self, id: PoiId) -> Option<Point> {
        self.pois[id].position
    }

    pub fn travel(&self) -> &TravelMatrix {
        &self.travel
    }

    pub fn fleet_size(&self) -> usize {
        self.fleet_size
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Same instance with a different fleet size.
    pub fn with_fleet_size(&self, fleet_size: usize) -> Result<Self, ModelError> {
        Instance::new(self.pois.clone(), self.travel.clone(), fleet_size, self.budget, self.beta)
    }

    /// Same instance with a different per-route budget.
    pub fn with_budget(&self, budget: f64) -> Result<Self, ModelError> {
        Instance::new(self.pois.clone(), self.travel.clone(), self.fleet_size, budget, self.beta)
    }
}

/// An open route: an ordered sequence of distinct POI ids with its cached
/// travel cost. Virtual start/end depots contribute no cost, so a route with
/// at most one visit costs zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Route {
    visits: Vec<PoiId>,
    cost: f64,
}

impl Route {
    pub fn empty() -> Self {
        Route { visits: Vec::new(), cost: 0.0 }
    }

    /// Builds and validates a route against the instance: known ids, no
    /// repeated POI, every leg reachable, cost within budget.
    pub fn new(instance: &Instance, visits: Vec<PoiId>) -> Result<Self, RouteViolation> {
        let cost = validate_visits(instance, &visits)?;
        Ok(Route { visits, cost })
    }

    /// Internal constructor for callers that already maintain the invariants.
    pub(crate) fn from_raw(visits: Vec<PoiId>, cost: f64) -> Self {
        Route { visits, cost }
    }

    pub fn visits(&self) -> &[PoiId] {
        &self.visits
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }

    pub fn contains(&self, poi: PoiId) -> bool {
        self.visits.contains(&poi)
    }
}

/// Checks the route invariants for a visit sequence and returns its cost.
fn validate_visits(instance: &Instance, visits: &[PoiId]) -> Result<f64, RouteViolation> {
    let n = instance.n();
    for (pos, &poi) in visits.iter().enumerate() {
        if poi >= n {
            return Err(RouteViolation::UnknownPoi { poi });
        }
        if visits[..pos].contains(&poi) {
            return Err(RouteViolation::DuplicateVisit { poi });
        }
    }
    let mut cost = 0.0;
    for leg in visits.windows(2) {
        let c = instance.travel().cost(leg[0], leg[1]);
        if !c.is_finite() {
            return Err(RouteViolation::UnreachableLeg { from: leg[0], to: leg[1] });
        }
        cost += c;
    }
    if cost > instance.budget() + COST_TOLERANCE {
        return Err(RouteViolation::BudgetExceeded { cost, budget: instance.budget() });
    }
    Ok(cost)
}

/// A complete assignment of one route per agent, with cached per-POI visit
/// counts and objective value.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    routes: Vec<Route>,
    visit_counts: Vec<u32>,
    objective: f64,
}

impl Solution {
    pub fn routes(&self) -> &[Route] {
        &self.routes
    }

    pub fn route(&self, index: usize) -> &Route {
        &self.routes[index]
    }

    /// Number of distinct routes visiting each POI (`qᵢ`).
    pub fn visit_counts(&self) -> &[u32] {
        &self.visit_counts
    }

    /// Cached value of `Σ wᵢ·qᵢ^β`.
    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn total_visits(&self) -> usize {
        self.routes.iter().map(Route::len).sum()
    }

    pub fn into_routes(self) -> Vec<Route> {
        self.routes
    }
}

/// Reward `w·q^β` collected by a POI of weight `w` visited by `q` distinct
/// routes. Zero visits yield exactly zero.
#[inline]
pub fn reward(weight: f64, q: u32, beta: f64) -> f64 {
    if q == 0 {
        0.0
    } else {
        weight * math::powf(q as f64, beta)
    }
}

/// Additional reward from one more visit: `w·((q+1)^β − q^β)`. Strictly
/// decreasing in `q` and strictly positive whenever `w > 0`.
#[inline]
pub fn marginal_gain(weight: f64, q: u32, beta: f64) -> f64 {
    weight * (math::powf((q + 1) as f64, beta) - math::powf(q as f64, beta))
}

/// Travel cost of a visit sequence: the sum over consecutive pairs, with no
/// cost to or from the virtual depots. Returns [`UNREACHABLE`] if any leg is
/// absent.
///
/// Ids must be valid indices into the matrix.
pub fn route_cost(travel: &TravelMatrix, visits: &[PoiId]) -> f64 {
    let mut cost = 0.0;
    for leg in visits.windows(2) {
        let c = travel.cost(leg[0], leg[1]);
        if !c.is_finite() {
            return UNREACHABLE;
        }
        cost += c;
    }
    cost
}

/// Validates `routes` (one per agent) and computes visit counts and the
/// objective from scratch.
pub fn evaluate(instance: &Instance, routes: Vec<Route>) -> Result<Solution, ValidationError> {
    if routes.len() != instance.fleet_size() {
        return Err(ValidationError::RouteCount {
            expected: instance.fleet_size(),
            actual: routes.len(),
        });
    }
    let mut visit_counts = vec![0u32; instance.n()];
    for (index, route) in routes.iter().enumerate() {
        let cost = validate_visits(instance, route.visits())
            .map_err(|violation| ValidationError::Route { index, violation })?;
        debug_assert!((cost - route.cost()).abs() <= COST_TOLERANCE);
        for &poi in route.visits() {
            visit_counts[poi] += 1;
        }
    }
    let objective = objective_from_counts(instance, &visit_counts);
    Ok(Solution { routes, visit_counts, objective })
}

pub(crate) fn objective_from_counts(instance: &Instance, counts: &[u32]) -> f64 {
    counts
        .iter()
        .enumerate()
        .map(|(i, &q)| reward(instance.weight(i), q, instance.beta()))
        .sum()
}

/// Effect of removing one visit of `poi` from the indexed route.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemovalDelta {
    /// Objective decrease: `w·(q^β − (q−1)^β)`.
    pub reward_loss: f64,
    /// Route cost decrease when the neighbors are reconnected directly.
    pub cost_saving: f64,
}

/// Deltas for splicing `poi` out of `solution.routes()[route_index]`.
///
/// Returns `None` when the removal is inadmissible: the POI is not on that
/// route, or the reconnection leg does not exist.
pub fn delta_remove(
    instance: &Instance,
    solution: &Solution,
    route_index: usize,
    poi: PoiId,
) -> Option<RemovalDelta> {
    let route = solution.route(route_index);
    let pos = route.visits().iter().position(|&p| p == poi)?;
    let cost_saving = splice_saving(instance.travel(), route.visits(), pos)?;
    let q = solution.visit_counts()[poi];
    debug_assert!(q >= 1);
    let reward_loss = marginal_gain(instance.weight(poi), q - 1, instance.beta());
    Some(RemovalDelta { reward_loss, cost_saving })
}

/// Cost saved by removing position `pos` from `visits` and reconnecting its
/// neighbors. `None` if the reconnection leg is unreachable.
pub(crate) fn splice_saving(travel: &TravelMatrix, visits: &[PoiId], pos: usize) -> Option<f64> {
    let last = visits.len() - 1;
    let before = (pos > 0).then(|| travel.cost(visits[pos - 1], visits[pos]));
    let after = (pos < last).then(|| travel.cost(visits[pos], visits[pos + 1]));
    match (before, after) {
        (None, None) => Some(0.0),
        (Some(b), None) => Some(b),
        (None, Some(a)) => Some(a),
        (Some(b), Some(a)) => {
            let bridge = travel.cost(visits[pos - 1], visits[pos + 1]);
            if !bridge.is_finite() {
                return None;
            }
            Some(b + a - bridge)
        }
    }
}

/// Instance or matrix construction error.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelError {
    BetaOutOfRange(f64),
    NonPositiveBudget(f64),
    ZeroFleet,
    MatrixDimension { pois: usize, matrix: usize },
    RaggedMatrix { row: usize, len: usize, expected: usize },
    NonZeroDiagonal { index: usize },
    BadCost { from: usize, to: usize, cost: f64 },
    BadWeight { poi: PoiId, weight: f64 },
    NonDenseIds { index: usize, id: PoiId },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::BetaOutOfRange(b) => {
                write!(f, "beta must lie strictly inside (0, 1), got {b}")
            }
            ModelError::NonPositiveBudget(b) => {
                write!(f, "budget must be a positive finite number, got {b}")
            }
            ModelError::ZeroFleet => write!(f, "fleet size must be at least 1"),
            ModelError::MatrixDimension { pois, matrix } => {
                write!(f, "travel matrix is {matrix}x{matrix} but there are {pois} POIs")
            }
            ModelError::RaggedMatrix { row, len, expected } => {
                write!(f, "matrix row {row} has {len} entries, expected {expected}")
            }
            ModelError::NonZeroDiagonal { index } => {
                write!(f, "matrix diagonal entry ({index},{index}) must be 0")
            }
            ModelError::BadCost { from, to, cost } => {
                write!(f, "travel cost ({from},{to}) must be non-negative, got {cost}")
            }
            ModelError::BadWeight { poi, weight } => {
                write!(f, "POI {poi} weight must be non-negative and finite, got {weight}")
            }
            ModelError::NonDenseIds { index, id } => {
                write!(f, "POI at position {index} has id {id}; ids must be dense 0..n-1")
            }
        }
    }
}

impl core::error::Error for ModelError {}

/// A single rule broken by a route.
#[derive(Clone, Debug, PartialEq)]
pub enum RouteViolation {
    UnknownPoi { poi: PoiId },
    DuplicateVisit { poi: PoiId },
    UnreachableLeg { from: PoiId, to: PoiId },
    BudgetExceeded { cost: f64, budget: f64 },
}

impl fmt::Display for RouteViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RouteViolation::UnknownPoi { poi } => write!(f, "unknown POI id {poi}"),
            RouteViolation::DuplicateVisit { poi } => {
                write!(f, "POI {poi} visited more than once by the same route")
            }
            RouteViolation::UnreachableLeg { from, to } => {
                write!(f, "no arc from {from} to {to}")
            }
            RouteViolation::BudgetExceeded { cost, budget } => {
                write!(f, "route cost {cost} exceeds budget {budget}")
            }
        }
    }
}

impl core::error::Error for RouteViolation {}

/// Validation failure for a set of routes, naming the offending route.
#[derive(Clone, Debug, PartialEq)]
pub enum ValidationError {
    RouteCount { expected: usize, actual: usize },
    Route { index: usize, violation: RouteViolation },
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::RouteCount { expected, actual } => {
                write!(f, "expected {expected} routes (one per agent), got {actual}")
            }
            ValidationError::Route { index, violation } => {
                write!(f, "route {index}: {violation}")
            }
        }
    }
}

impl core::error::Error for ValidationError {}

//! Shared helpers for integration tests.

use otop_core::graph::euclidean_matrix;
use otop_core::model::{Instance, Poi, Route};
use otop_core::rng;
use rand::Rng;

/// Instance with coordinates uniform on a 50x50 square and integer weights
/// uniform on {1, 2, 3}.
pub fn uniform_instance(n: usize, fleet: usize, budget: f64, beta: f64, seed: u64) -> Instance {
    let mut r = rng::seeded(seed);
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|_| [r.gen_range(0.0..50.0), r.gen_range(0.0..50.0)])
        .collect();
    let pois = pts
        .iter()
        .enumerate()
        .map(|(i, &p)| Poi::at(i, r.gen_range(1..=3) as f64, p))
        .collect();
    Instance::new(pois, euclidean_matrix(&pts), fleet, budget, beta).unwrap()
}

/// Restriction of an instance to its first `k` POIs.
#[allow(dead_code)]
pub fn sub_instance(instance: &Instance, k: usize) -> Instance {
    let pois: Vec<Poi> = instance.pois()[..k].to_vec();
    let rows: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| instance.travel().cost(i, j)).collect())
        .collect();
    Instance::new(
        pois,
        otop_core::model::TravelMatrix::from_rows(rows).unwrap(),
        instance.fleet_size(),
        instance.budget(),
        instance.beta(),
    )
    .unwrap()
}

/// Random feasible routes built by seeded random walks.
#[allow(dead_code)]
pub fn random_feasible_routes(instance: &Instance, seed: u64) -> Vec<Route> {
    let mut r = rng::seeded(seed);
    (0..instance.fleet_size())
        .map(|_| {
            let mut visits: Vec<usize> = Vec::new();
            let mut cost = 0.0;
            loop {
                if !visits.is_empty() && r.gen_bool(0.3) {
                    break;
                }
                let candidates: Vec<(usize, f64)> = (0..instance.n())
                    .filter(|p| !visits.contains(p))
                    .filter_map(|p| {
                        let leg = visits.last().map_or(0.0, |&l| instance.travel().cost(l, p));
                        (leg.is_finite() && cost + leg <= instance.budget()).then_some((p, leg))
                    })
                    .collect();
                if candidates.is_empty() {
                    break;
                }
                let (poi, leg) = candidates[r.gen_range(0..candidates.len())];
                visits.push(poi);
                cost += leg;
            }
            Route::new(instance, visits).unwrap()
        })
        .collect()
}

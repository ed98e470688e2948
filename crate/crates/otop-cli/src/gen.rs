//! Random instance generation: coordinates uniform on a square, weights from
//! a configurable distribution, Euclidean travel costs. Deterministic per
//! seed.

use std::str::FromStr;

use rand::Rng;

use otop_core::graph::euclidean_matrix;
use otop_core::model::{Instance, Poi};
use otop_core::rng;

use crate::CliError;

/// Weight distribution spec: `int:LO..HI` (uniform integers, inclusive) or
/// `real:LO..HI` (uniform reals).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightDist {
    IntRange(i64, i64),
    Real(f64, f64),
}

impl Default for WeightDist {
    fn default() -> Self {
        WeightDist::IntRange(1, 3)
    }
}

impl FromStr for WeightDist {
    type Err = CliError;

    fn from_str(spec: &str) -> Result<Self, CliError> {
        let usage = || {
            CliError::Usage(format!(
                "invalid weight distribution '{spec}' (expected int:LO..HI or real:LO..HI)"
            ))
        };
        let (kind, range) = spec.split_once(':').ok_or_else(usage)?;
        let (lo, hi) = range.split_once("..").ok_or_else(usage)?;
        match kind {
            "int" => {
                let lo: i64 = lo.parse().map_err(|_| usage())?;
                let hi: i64 = hi.parse().map_err(|_| usage())?;
                if lo < 0 || hi < lo {
                    return Err(usage());
                }
                Ok(WeightDist::IntRange(lo, hi))
            }
            "real" => {
                let lo: f64 = lo.parse().map_err(|_| usage())?;
                let hi: f64 = hi.parse().map_err(|_| usage())?;
                if !(lo >= 0.0 && hi > lo) {
                    return Err(usage());
                }
                Ok(WeightDist::Real(lo, hi))
            }
            _ => Err(usage()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenParams {
    pub n: usize,
    pub fleet: usize,
    pub budget: f64,
    pub beta: f64,
    pub square: f64,
    pub weights: WeightDist,
    pub seed: u64,
}

/// Generates a complete Euclidean instance; identical parameters and seed
/// reproduce it byte for byte.
pub fn generate_instance(params: &GenParams) -> Result<Instance, CliError> {
    if params.n == 0 {
        return Err(CliError::Usage("instance needs at least one POI".into()));
    }
    let mut r = rng::seeded(params.seed);
    let points: Vec<[f64; 2]> = (0..params.n)
        .map(|_| [r.gen_range(0.0..params.square), r.gen_range(0.0..params.square)])
        .collect();
    let pois: Vec<Poi> = points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let weight = match params.weights {
                WeightDist::IntRange(lo, hi) => r.gen_range(lo..=hi) as f64,
                WeightDist::Real(lo, hi) => r.gen_range(lo..hi),
            };
            Poi::at(i, weight, p)
        })
        .collect();
    Instance::new(pois, euclidean_matrix(&points), params.fleet, params.budget, params.beta)
        .map_err(|e| CliError::Usage(e.to_string()))
}

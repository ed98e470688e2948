//! Benchmark harness: runs (case × instance × fleet × algorithm × seed)
//! cells, stores every solution file, and emits a mean-objective table with
//! percent improvements over greedy plus line and route plots.
//!
//! Cells run concurrently; each is a self-contained seeded run and the
//! outputs are aggregated in sorted key order, so results are independent of
//! scheduling.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use otop_core::alns::{alns_solve, SearchConfig, SearchTrace};
use otop_core::construct::{greedy_solve, sequential_op_solve};
use otop_core::exact::exact_solve;
use otop_core::model::{Instance, Poi, Solution};

use crate::formats::{
    self, write_instance, write_solution, BenchSpecFile, ConfigFile, SolutionMeta,
};
use crate::plot::{line_plot, route_map, Series};
use crate::{Algorithm, CliError};

/// Resolved benchmark plan.
#[derive(Clone, Debug)]
pub struct BenchSpec {
    pub out_dir: PathBuf,
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
    pub fleet_sizes: Vec<usize>,
    pub cases: Vec<BenchCase>,
    pub config: SearchConfig,
}

#[derive(Clone, Debug)]
pub struct BenchCase {
    pub name: String,
    pub instances: Vec<PathBuf>,
    pub budget: Option<f64>,
}

/// Aggregated numbers for one (case, fleet, algorithm) cell.
#[derive(Clone, Debug)]
pub struct CellStats {
    pub case_name: String,
    pub fleet: usize,
    pub algorithm: Algorithm,
    /// Mean over present instances and seeds; `None` marks an absent cell.
    pub mean_objective: Option<f64>,
    pub mean_wall_ms: f64,
    /// Percent improvement of the mean objective over greedy's in the same
    /// (case, fleet) row.
    pub increase_over_greedy_pct: Option<f64>,
    pub objectives: Vec<f64>,
}

pub struct BenchReport {
    pub cells: Vec<CellStats>,
    pub csv: String,
    pub csv_path: PathBuf,
    pub plot_paths: Vec<PathBuf>,
}

/// Turns a spec file into a plan; instance paths are taken relative to
/// `base_dir` (the spec file's directory).
pub fn resolve_spec(file: &BenchSpecFile, base_dir: &Path) -> Result<BenchSpec, CliError> {
    let algorithms: Result<Vec<Algorithm>, CliError> =
        file.algorithms.iter().map(|a| Algorithm::parse(a)).collect();
    let algorithms = algorithms?;
    if algorithms.is_empty() {
        return Err(CliError::Usage("bench spec lists no algorithms".into()));
    }
    if file.seeds.is_empty() {
        return Err(CliError::Usage("bench spec lists no seeds".into()));
    }
    let cases = file
        .cases
        .iter()
        .map(|c| BenchCase {
            name: c.name.clone(),
            instances: c.instances.iter().map(|p| base_dir.join(p)).collect(),
            budget: c.budget,
        })
        .collect();
    Ok(BenchSpec {
        out_dir: base_dir.join(&file.out_dir),
        algorithms,
        seeds: file.seeds.clone(),
        fleet_sizes: file.fleet_sizes.clone(),
        cases,
        config: file.config.clone().unwrap_or_default().to_search_config(),
    })
}

/// Runs one algorithm on one instance.
pub fn solve_instance(
    algorithm: Algorithm,
    instance: &Instance,
    config: &SearchConfig,
    force: bool,
) -> Result<(Solution, Option<SearchTrace>), CliError> {
    match algorithm {
        Algorithm::Greedy => Ok((greedy_solve(instance), None)),
        Algorithm::Seqop => {
            Ok((sequential_op_solve(instance, config.seed, &config.op), None))
        }
        Algorithm::Alns => alns_solve(instance, config)
            .map(|(solution, trace)| (solution, Some(trace)))
            .map_err(|e| CliError::Usage(e.to_string())),
        Algorithm::Exact => exact_solve(instance, force)
            .map(|solution| (solution, None))
            .map_err(|e| CliError::Data(e.to_string())),
    }
}

/// Rebuilds an instance with overridden fleet size / budget / beta.
pub fn override_instance(
    instance: &Instance,
    fleet: Option<usize>,
    budget: Option<f64>,
    beta: Option<f64>,
) -> Result<Instance, CliError> {
    if fleet.is_none() && budget.is_none() && beta.is_none() {
        return Ok(instance.clone());
    }
    let pois: Vec<Poi> = instance.pois().to_vec();
    Instance::new(
        pois,
        instance.travel().clone(),
        fleet.unwrap_or_else(|| instance.fleet_size()),
        budget.unwrap_or_else(|| instance.budget()),
        beta.unwrap_or_else(|| instance.beta()),
    )
    .map_err(|e| CliError::Usage(e.to_string()))
}

struct Job {
    case_index: usize,
    instance_index: usize,
    fleet: usize,
    algorithm_index: usize,
    seed: u64,
    instance: Instance,
}

struct JobResult {
    case_index: usize,
    instance_index: usize,
    fleet: usize,
    algorithm_index: usize,
    seed: u64,
    objective: f64,
    wall_ms: f64,
    solution: Solution,
}

pub fn run_bench(spec: &BenchSpec) -> Result<BenchReport, CliError> {
    // Load the instance pool; files that do not exist mark their cells
    // absent, everything else must parse.
    let mut pool: Vec<Vec<Option<Instance>>> = Vec::with_capacity(spec.cases.len());
    for case in &spec.cases {
        let mut instances = Vec::with_capacity(case.instances.len());
        for path in &case.instances {
            if !path.exists() {
                eprintln!("warning: instance {} is missing; cell marked absent", path.display());
                instances.push(None);
                continue;
            }
            let mut instance = formats::read_instance(path)?;
            if case.budget.is_some() {
                instance = override_instance(&instance, None, case.budget, None)?;
            }
            instances.push(Some(instance));
        }
        pool.push(instances);
    }

    let mut jobs = Vec::new();
    for (case_index, case_instances) in pool.iter().enumerate() {
        for (instance_index, slot) in case_instances.iter().enumerate() {
            let Some(base) = slot else { continue };
            let fleets: Vec<usize> = if spec.fleet_sizes.is_empty() {
                vec![base.fleet_size()]
            } else {
                spec.fleet_sizes.clone()
            };
            for fleet in fleets {
                let instance = override_instance(base, Some(fleet), None, None)?;
                for (algorithm_index, _) in spec.algorithms.iter().enumerate() {
                    for &seed in &spec.seeds {
                        jobs.push(Job {
                            case_index,
                            instance_index,
                            fleet,
                            algorithm_index,
                            seed,
                            instance: instance.clone(),
                        });
                    }
                }
            }
        }
    }

    let solutions_dir = spec.out_dir.join("solutions");
    let results: Result<Vec<JobResult>, CliError> = jobs
        .into_par_iter()
        .map(|job| {
            let algorithm = spec.algorithms[job.algorithm_index];
            let config = SearchConfig { seed: job.seed, ..spec.config.clone() };
            let started = Instant::now();
            let (solution, _) = solve_instance(algorithm, &job.instance, &config, false)?;
            let wall_ms = started.elapsed().as_secs_f64() * 1000.0;
            let file = solutions_dir.join(format!(
                "{}_i{}_k{}_{}_s{}.toml",
                spec.cases[job.case_index].name,
                job.instance_index,
                job.fleet,
                algorithm.name(),
                job.seed
            ));
            write_solution(
                &file,
                &solution,
                SolutionMeta {
                    instance: Some(
                        spec.cases[job.case_index].instances[job.instance_index]
                            .display()
                            .to_string(),
                    ),
                    algorithm: algorithm.name().to_string(),
                    seed: job.seed,
                    wall_time_ms: Some(wall_ms),
                    config: Some(ConfigFile::from_search_config(&config)),
                },
            )?;
            Ok(JobResult {
                case_index: job.case_index,
                instance_index: job.instance_index,
                fleet: job.fleet,
                algorithm_index: job.algorithm_index,
                seed: job.seed,
                objective: solution.objective(),
                wall_ms,
                solution,
            })
        })
        .collect();
    let mut results = results?;
    results.sort_by_key(|r| (r.case_index, r.fleet, r.algorithm_index, r.instance_index, r.seed));

    let report = aggregate(spec, &results)?;
    Ok(report)
}

fn aggregate(spec: &BenchSpec, results: &[JobResult]) -> Result<BenchReport, CliError> {
    let fleets_of_case = |case_index: usize| -> Vec<usize> {
        if spec.fleet_sizes.is_empty() {
            let mut f: Vec<usize> = results
                .iter()
                .filter(|r| r.case_index == case_index)
                .map(|r| r.fleet)
                .collect();
            f.sort_unstable();
            f.dedup();
            f
        } else {
            spec.fleet_sizes.clone()
        }
    };

    let mut cells: Vec<CellStats> = Vec::new();
    for (case_index, case) in spec.cases.iter().enumerate() {
        for fleet in fleets_of_case(case_index) {
            let mut row: Vec<CellStats> = Vec::new();
            for (algorithm_index, &algorithm) in spec.algorithms.iter().enumerate() {
                let picks: Vec<&JobResult> = results
                    .iter()
                    .filter(|r| {
                        r.case_index == case_index
                            && r.fleet == fleet
                            && r.algorithm_index == algorithm_index
                    })
                    .collect();
                let objectives: Vec<f64> = picks.iter().map(|r| r.objective).collect();
                let (mean_objective, mean_wall_ms) = if picks.is_empty() {
                    (None, 0.0)
                } else {
                    (
                        Some(objectives.iter().sum::<f64>() / objectives.len() as f64),
                        picks.iter().map(|r| r.wall_ms).sum::<f64>() / picks.len() as f64,
                    )
                };
                row.push(CellStats {
                    case_name: case.name.clone(),
                    fleet,
                    algorithm,
                    mean_objective,
                    mean_wall_ms,
                    increase_over_greedy_pct: None,
                    objectives,
                });
            }
            let greedy_mean = row
                .iter()
                .find(|c| c.algorithm == Algorithm::Greedy)
                .and_then(|c| c.mean_objective);
            if let Some(reference) = greedy_mean {
                if reference > 0.0 {
                    for cell in &mut row {
                        cell.increase_over_greedy_pct = cell
                            .mean_objective
                            .map(|m| (m - reference) / reference * 100.0);
                    }
                }
            }
            cells.extend(row);
        }
    }

    // CSV table: one row per (case, fleet).
    let mut csv = String::from("case,n_k");
    for algorithm in &spec.algorithms {
        csv.push_str(&format!(
            ",{a}_obj,{a}_increase_pct,{a}_wall_ms",
            a = algorithm.name()
        ));
    }
    csv.push('\n');
    for (case_index, case) in spec.cases.iter().enumerate() {
        for fleet in fleets_of_case(case_index) {
            csv.push_str(&format!("{},{}", case.name, fleet));
            for &algorithm in &spec.algorithms {
                let cell = cells
                    .iter()
                    .find(|c| c.case_name == case.name && c.fleet == fleet && c.algorithm == algorithm)
                    .expect("cell exists");
                match cell.mean_objective {
                    Some(mean) => {
                        let pct = cell
                            .increase_over_greedy_pct
                            .map(|p| format!("{p:.2}"))
                            .unwrap_or_default();
                        csv.push_str(&format!(",{mean:.6},{pct},{:.2}", cell.mean_wall_ms));
                    }
                    None => csv.push_str(",absent,,"),
                }
            }
            csv.push('\n');
        }
    }
    let csv_path = spec.out_dir.join("bench.csv");
    formats::write_string(&csv_path, &csv)?;

    // Objective-vs-fleet line plot per case.
    let mut plot_paths = Vec::new();
    for (case_index, case) in spec.cases.iter().enumerate() {
        let series: Vec<Series> = spec
            .algorithms
            .iter()
            .map(|&algorithm| Series {
                label: algorithm.name().to_string(),
                points: cells
                    .iter()
                    .filter(|c| c.case_name == case.name && c.algorithm == algorithm)
                    .filter_map(|c| c.mean_objective.map(|m| (c.fleet as f64, m)))
                    .collect(),
            })
            .collect();
        let svg = line_plot(
            &format!("{}: objective vs fleet size", case.name),
            "fleet size n_K",
            "mean objective",
            &series,
        );
        let path = spec.out_dir.join(format!("{}_objective_vs_fleet.svg", case.name));
        formats::write_string(&path, &svg)?;
        plot_paths.push(path);

        // Route map: preferred algorithm, first present instance, largest
        // fleet, first seed.
        let preferred = spec
            .algorithms
            .iter()
            .position(|&a| a == Algorithm::Alns)
            .unwrap_or(spec.algorithms.len() - 1);
        if let Some(result) = results
            .iter()
            .filter(|r| r.case_index == case_index && r.algorithm_index == preferred)
            .max_by_key(|r| (r.fleet, std::cmp::Reverse(r.instance_index), std::cmp::Reverse(r.seed)))
        {
            let instance_path = &case.instances[result.instance_index];
            if let Ok(base) = formats::read_instance(instance_path) {
                let shown = override_instance(&base, Some(result.fleet), case.budget, None)?;
                if let Some(svg) = route_map(
                    &shown,
                    &result.solution,
                    &format!(
                        "{}: {} routes, n_K = {}",
                        case.name,
                        spec.algorithms[preferred].name(),
                        result.fleet
                    ),
                ) {
                    let path = spec.out_dir.join(format!("{}_routes.svg", case.name));
                    formats::write_string(&path, &svg)?;
                    plot_paths.push(path);
                }
            }
        }
    }

    Ok(BenchReport { cells, csv, csv_path, plot_paths })
}

/// Writes a set of generated instances for a case and returns their paths.
/// Convenience for building benchmark inputs programmatically.
pub fn write_generated_case(
    dir: &Path,
    case: &str,
    params: &[crate::gen::GenParams],
) -> Result<Vec<PathBuf>, CliError> {
    let mut paths = Vec::new();
    for (index, p) in params.iter().enumerate() {
        let instance = crate::gen::generate_instance(p)?;
        let path = dir.join(format!("{case}_{index}.toml"));
        write_instance(&path, &instance, Some(format!("{case}-{index}")))?;
        paths.push(path);
    }
    Ok(paths)
}

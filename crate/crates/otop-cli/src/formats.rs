//! Canonical TOML file schemas.
//!
//! Instances and solutions mirror the domain types field by field; matrix
//! rows, routes, and visit counts are space-separated token strings with
//! `inf` marking unreachable arcs. Every document carries a `schema` tag.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use otop_core::alns::{RegretVariant, SearchConfig, SearchTrace};
use otop_core::construct::OpConfig;
use otop_core::model::{Instance, Poi, Solution, TravelMatrix, UNREACHABLE};

use crate::CliError;

pub const INSTANCE_SCHEMA: &str = "otop-instance/v1";
pub const SOLUTION_SCHEMA: &str = "otop-solution/v1";
pub const NETWORK_SCHEMA: &str = "otop-network/v1";
pub const ARCS_SCHEMA: &str = "otop-arcs/v1";
pub const BENCH_SCHEMA: &str = "otop-bench/v1";

pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_string(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn parse_toml<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    toml::from_str(text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    parse_toml(path, &read_to_string(path)?)
}

fn check_schema(path: &Path, expected: &str, actual: &str) -> Result<(), CliError> {
    if actual != expected {
        return Err(CliError::Data(format!(
            "{}: schema is '{actual}', expected '{expected}'",
            path.display()
        )));
    }
    Ok(())
}

fn format_cost(cost: f64) -> String {
    if cost.is_finite() {
        format!("{cost}")
    } else {
        "inf".to_string()
    }
}

fn parse_cost(token: &str) -> Result<f64, String> {
    if token == "inf" {
        return Ok(UNREACHABLE);
    }
    token.parse::<f64>().map_err(|_| format!("bad cost token '{token}'"))
}

fn parse_ids(row: &str) -> Result<Vec<usize>, String> {
    row.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| format!("bad id token '{t}'")))
        .collect()
}

// ---------------------------------------------------------------------------
// Instance files

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub beta: f64,
    pub budget: f64,
    pub fleet: usize,
    pub pois: Vec<PoiRow>,
    pub travel: TravelRows,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoiRow {
    pub id: usize,
    pub weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TravelRows {
    pub rows: Vec<String>,
}

pub fn instance_to_file(instance: &Instance, name: Option<String>) -> InstanceFile {
    let pois = instance
        .pois()
        .iter()
        .map(|p| PoiRow {
            id: p.id,
            weight: p.weight,
            x: p.position.map(|q| q[0]),
            y: p.position.map(|q| q[1]),
        })
        .collect();
    let rows = (0..instance.n())
        .map(|i| {
            (0..instance.n())
                .map(|j| format_cost(instance.travel().cost(i, j)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    InstanceFile {
        schema: INSTANCE_SCHEMA.to_string(),
        name,
        beta: instance.beta(),
        budget: instance.budget(),
        fleet: instance.fleet_size(),
        pois,
        travel: TravelRows { rows },
    }
}

pub fn instance_from_file(path: &Path, file: &InstanceFile) -> Result<Instance, CliError> {
    check_schema(path, INSTANCE_SCHEMA, &file.schema)?;
    let bad = |msg: String| CliError::Data(format!("{}: {msg}", path.display()));
    let pois: Vec<Poi> = file
        .pois
        .iter()
        .map(|row| Poi {
            id: row.id,
            weight: row.weight,
            position: match (row.x, row.y) {
                (Some(x), Some(y)) => Some([x, y]),
                _ => None,
            },
        })
        .collect();
    let mut rows = Vec::with_capacity(file.travel.rows.len());
    for (i, row) in file.travel.rows.iter().enumerate() {
        let parsed: Result<Vec<f64>, String> = row.split_whitespace().map(parse_cost).collect();
        rows.push(parsed.map_err(|m| bad(format!("matrix row {i}: {m}")))?);
    }
    let travel = TravelMatrix::from_rows(rows).map_err(|e| bad(e.to_string()))?;
    Instance::new(pois, travel, file.fleet, file.budget, file.beta).map_err(|e| bad(e.to_string()))
}

pub fn write_instance(path: &Path, instance: &Instance, name: Option<String>) -> Result<(), CliError> {
    let file = instance_to_file(instance, name);
    let text = toml::to_string_pretty(&file)
        .map_err(|e| CliError::Data(format!("serializing instance: {e}")))?;
    write_string(path, &text)
}

pub fn read_instance(path: &Path) -> Result<Instance, CliError> {
    let file: InstanceFile = load(path)?;
    instance_from_file(path, &file)
}

// ---------------------------------------------------------------------------
// Search configuration files

/// Serde mirror of [`SearchConfig`] plus the constructor knobs; any subset of
/// fields overrides the defaults.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub removal_fraction: f64,
    pub worst_removal_exponent: f64,
    pub scores: [f64; 4],
    pub reaction_factor: f64,
    pub segment_length: u32,
    pub cooling_rate: f64,
    pub t_min: f64,
    pub max_iterations: u32,
    pub max_non_improving: u32,
    pub regret_k: usize,
    pub literal_regret: bool,
    pub desirability_exponent: f64,
    pub candidate_size: usize,
    pub effort: u32,
    pub seed: u64,
}

impl Default for ConfigFile {
    fn default() -> Self {
        ConfigFile::from_search_config(&SearchConfig::default())
    }
}

impl ConfigFile {
    pub fn from_search_config(config: &SearchConfig) -> Self {
        ConfigFile {
            removal_fraction: config.removal_fraction,
            worst_removal_exponent: config.worst_removal_exponent,
            scores: config.scores,
            reaction_factor: config.reaction_factor,
            segment_length: config.segment_length,
            cooling_rate: config.cooling_rate,
            t_min: config.t_min,
            max_iterations: config.max_iterations,
            max_non_improving: config.max_non_improving,
            regret_k: config.regret_k,
            literal_regret: config.regret_variant == RegretVariant::LiteralSpread,
            desirability_exponent: config.op.desirability_exponent,
            candidate_size: config.op.candidate_size,
            effort: config.op.effort,
            seed: config.seed,
        }
    }

    pub fn to_search_config(&self) -> SearchConfig {
        SearchConfig {
            removal_fraction: self.removal_fraction,
            worst_removal_exponent: self.worst_removal_exponent,
            scores: self.scores,
            reaction_factor: self.reaction_factor,
            segment_length: self.segment_length,
            cooling_rate: self.cooling_rate,
            t_min: self.t_min,
            max_iterations: self.max_iterations,
            max_non_improving: self.max_non_improving,
            regret_k: self.regret_k,
            regret_variant: if self.literal_regret {
                RegretVariant::LiteralSpread
            } else {
                RegretVariant::Classic
            },
            op: OpConfig {
                desirability_exponent: self.desirability_exponent,
                candidate_size: self.candidate_size,
                effort: self.effort,
            },
            seed: self.seed,
        }
    }
}

// ---------------------------------------------------------------------------
// Solution files

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionFile {
    pub schema: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    pub algorithm: String,
    pub seed: u64,
    pub objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    pub routes: Vec<String>,
    pub visit_counts: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigFile>,
}

pub struct SolutionMeta {
    pub instance: Option<String>,
    pub algorithm: String,
    pub seed: u64,
    pub wall_time_ms: Option<f64>,
    pub config: Option<ConfigFile>,
}

pub fn solution_to_file(solution: &Solution, meta: SolutionMeta) -> SolutionFile {
    let routes = solution
        .routes()
        .iter()
        .map(|r| {
            r.visits().iter().map(|id| id.to_string()).collect::<Vec<_>>().join(" ")
        })
        .collect();
    let visit_counts = solution
        .visit_counts()
        .iter()
        .map(|q| q.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    SolutionFile {
        schema: SOLUTION_SCHEMA.to_string(),
        instance: meta.instance,
        algorithm: meta.algorithm,
        seed: meta.seed,
        objective: solution.objective(),
        wall_time_ms: meta.wall_time_ms,
        routes,
        visit_counts,
        config: meta.config,
    }
}

pub fn write_solution(path: &Path, solution: &Solution, meta: SolutionMeta) -> Result<(), CliError> {
    let file = solution_to_file(solution, meta);
    let text = toml::to_string_pretty(&file)
        .map_err(|e| CliError::Data(format!("serializing solution: {e}")))?;
    write_string(path, &text)
}

pub struct ParsedSolution {
    pub routes: Vec<Vec<usize>>,
    pub visit_counts: Vec<u32>,
    pub objective: f64,
    pub algorithm: String,
    pub seed: u64,
}

pub fn read_solution(path: &Path) -> Result<ParsedSolution, CliError> {
    let file: SolutionFile = load(path)?;
    check_schema(path, SOLUTION_SCHEMA, &file.schema)?;
    let bad = |msg: String| CliError::Data(format!("{}: {msg}", path.display()));
    let routes: Result<Vec<Vec<usize>>, String> = file.routes.iter().map(|r| parse_ids(r)).collect();
    let counts: Result<Vec<u32>, String> = file
        .visit_counts
        .split_whitespace()
        .map(|t| t.parse::<u32>().map_err(|_| format!("bad count token '{t}'")))
        .collect();
    Ok(ParsedSolution {
        routes: routes.map_err(bad)?,
        visit_counts: counts.map_err(bad)?,
        objective: file.objective,
        algorithm: file.algorithm,
        seed: file.seed,
    })
}

// ---------------------------------------------------------------------------
// Road networks and reward arcs

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetworkFile {
    pub schema: String,
    pub nodes: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub node: Vec<NodeRow>,
    #[serde(default)]
    pub edge: Vec<EdgeRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeRow {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeRow {
    pub from: usize,
    pub to: usize,
    pub cost: f64,
    #[serde(default)]
    pub directed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArcsFile {
    pub schema: String,
    #[serde(default)]
    pub arc: Vec<ArcRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArcRow {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

pub fn read_network(path: &Path) -> Result<NetworkFile, CliError> {
    let file: NetworkFile = load(path)?;
    check_schema(path, NETWORK_SCHEMA, &file.schema)?;
    Ok(file)
}

pub fn read_arcs(path: &Path) -> Result<ArcsFile, CliError> {
    let file: ArcsFile = load(path)?;
    check_schema(path, ARCS_SCHEMA, &file.schema)?;
    Ok(file)
}

// ---------------------------------------------------------------------------
// Benchmark specs

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchSpecFile {
    pub schema: String,
    pub out_dir: String,
    pub algorithms: Vec<String>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Fleet sizes swept per case; empty means "use each instance's fleet".
    #[serde(default)]
    pub fleet_sizes: Vec<usize>,
    pub cases: Vec<BenchCaseFile>,
    #[serde(default)]
    pub config: Option<ConfigFile>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchCaseFile {
    pub name: String,
    pub instances: Vec<String>,
    #[serde(default)]
    pub budget: Option<f64>,
}

pub fn read_bench_spec(path: &Path) -> Result<BenchSpecFile, CliError> {
    let file: BenchSpecFile = load(path)?;
    check_schema(path, BENCH_SCHEMA, &file.schema)?;
    Ok(file)
}

// ---------------------------------------------------------------------------
// Trace export

/// Row-per-iteration CSV of a search trace.
pub fn trace_to_csv(trace: &SearchTrace) -> String {
    let mut out =
        String::from("iteration,destroy_op,repair_op,candidate_objective,accepted,best_objective,temperature\n");
    for row in &trace.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.iteration,
            row.destroy.name(),
            row.repair.name(),
            row.candidate_objective,
            row.accepted,
            row.best_objective,
            row.temperature
        ));
    }
    out
}

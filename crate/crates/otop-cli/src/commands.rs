//! Implementations of the CLI subcommands.

use std::path::Path;
use std::time::Instant;

use otop_core::alns::SearchConfig;
use otop_core::graph::{self, augment_arcs, from_edge_list, metric_closure, RewardArc};
use otop_core::model::{evaluate, Instance, Poi, Route, Solution};

use crate::bench::{override_instance, resolve_spec, run_bench, solve_instance};
use crate::cli::{
    AugmentArgs, BenchArgs, ConvertDatasetArgs, GenerateArgs, SolveArgs, ValidateArgs,
};
use crate::formats::{
    self, read_arcs, read_bench_spec, read_instance, read_network, read_solution, trace_to_csv,
    write_instance, write_solution, ConfigFile, SolutionMeta,
};
use crate::gen::{generate_instance, GenParams, WeightDist};
use crate::{Algorithm, CliError};

pub fn generate(args: &GenerateArgs) -> Result<(), CliError> {
    let weights: WeightDist = args.weight_dist.parse()?;
    let params = GenParams {
        n: args.n,
        fleet: args.fleet,
        budget: args.budget,
        beta: args.beta,
        square: args.square,
        weights,
        seed: args.seed,
    };
    let instance = generate_instance(&params)?;
    let name = args
        .name
        .clone()
        .unwrap_or_else(|| format!("rand-n{}-s{}", args.n, args.seed));
    write_instance(&args.out, &instance, Some(name))?;
    println!(
        "generated n={} fleet={} budget={} beta={} seed={} out={}",
        args.n,
        args.fleet,
        args.budget,
        args.beta,
        args.seed,
        args.out.display()
    );
    Ok(())
}

pub fn solve(args: &SolveArgs) -> Result<(), CliError> {
    let instance = read_instance(&args.instance)?;
    let instance = override_instance(&instance, args.fleet, args.budget, args.beta)?;

    let mut config = match &args.config {
        Some(path) => {
            let file: ConfigFile = formats::load(path)?;
            file.to_search_config()
        }
        None => SearchConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config
        .validate()
        .map_err(|e| CliError::Usage(format!("invalid search configuration: {e}")))?;
    if args.trace.is_some() && args.algorithm != Algorithm::Alns {
        return Err(CliError::Usage(
            "--trace is only available with --algorithm alns".into(),
        ));
    }

    let started = Instant::now();
    let (solution, trace) = solve_instance(args.algorithm, &instance, &config, args.force)?;
    let wall_ms = started.elapsed().as_secs_f64() * 1000.0;

    if let (Some(path), Some(trace)) = (&args.trace, &trace) {
        formats::write_string(path, &trace_to_csv(trace))?;
    }
    write_solution(
        &args.out,
        &solution,
        SolutionMeta {
            instance: Some(args.instance.display().to_string()),
            algorithm: args.algorithm.name().to_string(),
            seed: config.seed,
            wall_time_ms: Some(wall_ms),
            config: Some(ConfigFile::from_search_config(&config)),
        },
    )?;
    println!(
        "algorithm={} objective={:.6} wall_ms={:.1} seed={} out={}",
        args.algorithm,
        solution.objective(),
        wall_ms,
        config.seed,
        args.out.display()
    );
    Ok(())
}

pub fn validate(args: &ValidateArgs) -> Result<(), CliError> {
    let instance = read_instance(&args.instance)?;
    let parsed = read_solution(&args.solution)?;
    match check_solution(&instance, &parsed) {
        Ok(solution) => {
            println!("PASS objective={:.6} routes={}", solution.objective(), solution.routes().len());
            Ok(())
        }
        Err(reason) => {
            println!("FAIL {reason}");
            Err(CliError::Data(format!("validation failed: {reason}")))
        }
    }
}

fn check_solution(
    instance: &Instance,
    parsed: &formats::ParsedSolution,
) -> Result<Solution, String> {
    if parsed.routes.len() != instance.fleet_size() {
        return Err(format!(
            "expected {} routes (one per agent), found {}",
            instance.fleet_size(),
            parsed.routes.len()
        ));
    }
    let mut routes = Vec::with_capacity(parsed.routes.len());
    for (index, ids) in parsed.routes.iter().enumerate() {
        let route = Route::new(instance, ids.clone())
            .map_err(|violation| format!("route {index}: {violation}"))?;
        routes.push(route);
    }
    let solution = evaluate(instance, routes).map_err(|e| e.to_string())?;
    if parsed.visit_counts != solution.visit_counts() {
        return Err("declared visit counts do not match a recount from the routes".to_string());
    }
    let drift = (parsed.objective - solution.objective()).abs();
    if drift > 1e-6 {
        return Err(format!(
            "declared objective {} differs from recomputed {} by {drift:e}",
            parsed.objective,
            solution.objective()
        ));
    }
    Ok(solution)
}

pub fn bench(args: &BenchArgs) -> Result<(), CliError> {
    let file = read_bench_spec(&args.spec)?;
    let base = args.spec.parent().unwrap_or_else(|| Path::new("."));
    let spec = resolve_spec(&file, base)?;
    let report = run_bench(&spec)?;
    println!("wrote {}", report.csv_path.display());
    for path in &report.plot_paths {
        println!("wrote {}", path.display());
    }
    print!("{}", report.csv);
    Ok(())
}

pub fn augment(args: &AugmentArgs) -> Result<(), CliError> {
    let network = read_network(&args.network)?;
    let arcs_file = read_arcs(&args.reward_arcs)?;

    let edges: Vec<graph::Edge> = network
        .edge
        .iter()
        .map(|e| graph::Edge { from: e.from, to: e.to, cost: e.cost, directed: e.directed })
        .collect();
    let matrix = from_edge_list(network.nodes, &edges).map_err(|e| CliError::Data(e.to_string()))?;

    // Positions are used only when every node carries one.
    let mut positions = vec![None; network.nodes];
    for row in &network.node {
        if row.id < network.nodes {
            positions[row.id] = Some([row.x, row.y]);
        }
    }
    let positions: Option<Vec<[f64; 2]>> = positions.into_iter().collect();

    let arcs: Vec<RewardArc> = arcs_file
        .arc
        .iter()
        .map(|a| RewardArc { from: a.from, to: a.to, weight: a.weight })
        .collect();
    let augmented = augment_arcs(&matrix, positions.as_deref(), &arcs, !args.drop_original)
        .map_err(|e| CliError::Data(e.to_string()))?;
    let closed = metric_closure(&augmented.travel);

    let pois: Vec<Poi> = augmented
        .weights
        .iter()
        .enumerate()
        .map(|(id, &weight)| Poi {
            id,
            weight,
            position: augmented.positions.as_ref().map(|p| p[id]),
        })
        .collect();
    let instance = Instance::new(pois, closed, args.fleet, args.budget, args.beta)
        .map_err(|e| CliError::Data(e.to_string()))?;
    write_instance(&args.out, &instance, Some(format!("augmented-{}", network.nodes)))?;
    println!(
        "augmented nodes={} reward_arcs={} pois={} out={}",
        network.nodes,
        arcs.len(),
        instance.n(),
        args.out.display()
    );
    Ok(())
}

pub fn convert_dataset(args: &ConvertDatasetArgs) -> Result<(), CliError> {
    let inputs: Vec<std::path::PathBuf> = if args.input.is_dir() {
        let mut entries: Vec<_> = std::fs::read_dir(&args.input)
            .map_err(|e| CliError::io(&args.input, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        entries.sort();
        entries
    } else {
        vec![args.input.clone()]
    };
    if inputs.is_empty() {
        return Err(CliError::Data(format!("{}: no files to convert", args.input.display())));
    }

    let single_file_out = inputs.len() == 1 && !args.input.is_dir();
    for input in &inputs {
        let text = formats::read_to_string(input)?;
        let rows = parse_poi_table(&text)
            .map_err(|m| CliError::Data(format!("{}: {m}", input.display())))?;
        let points: Vec<[f64; 2]> = rows.iter().map(|r| [r.0, r.1]).collect();
        let pois: Vec<Poi> = rows
            .iter()
            .enumerate()
            .map(|(i, &(_, _, w))| Poi::at(i, w, points[i]))
            .collect();
        let instance = Instance::new(
            pois,
            graph::euclidean_matrix(&points),
            args.fleet,
            args.budget,
            args.beta,
        )
        .map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;
        let stem = input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "instance".to_string());
        let out = if single_file_out { args.out.clone() } else { args.out.join(format!("{stem}.toml")) };
        write_instance(&out, &instance, Some(stem))?;
        println!("converted {} -> {} ({} POIs)", input.display(), out.display(), instance.n());
    }
    Ok(())
}

/// Parses a plain-text POI table: one POI per line as `x y weight` or
/// `id x y weight`, whitespace or comma separated. Comment lines start with
/// `#`; non-numeric header lines are skipped only before the first data row.
fn parse_poi_table(text: &str) -> Result<Vec<(f64, f64, f64)>, String> {
    let mut rows = Vec::new();
    for (number, line) in text.lines().enumerate() {
        let clean = line.trim();
        if clean.is_empty() || clean.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = clean.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        let values: Result<Vec<f64>, _> = tokens.iter().map(|t| t.parse::<f64>()).collect();
        match (values, rows.is_empty()) {
            (Ok(v), _) if v.len() == 3 => rows.push((v[0], v[1], v[2])),
            (Ok(v), _) if v.len() == 4 => rows.push((v[1], v[2], v[3])),
            (Ok(_), _) => {
                return Err(format!("line {}: expected 3 or 4 columns", number + 1));
            }
            // Header region: tolerate unparsable lines before any data.
            (Err(_), true) => continue,
            (Err(_), false) => {
                return Err(format!("line {}: unparsable row after data started", number + 1));
            }
        }
    }
    if rows.is_empty() {
        return Err("no POI rows found".to_string());
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poi_table_accepts_both_layouts_and_headers() {
        let three = "# comment\nx y w\n1.0 2.0 3.0\n4,5,6\n";
        let rows = parse_poi_table(three).unwrap();
        assert_eq!(rows, vec![(1.0, 2.0, 3.0), (4.0, 5.0, 6.0)]);

        let four = "0 1.0 2.0 3.0\n1 4.0 5.0 6.0\n";
        let rows = parse_poi_table(four).unwrap();
        assert_eq!(rows, vec![(1.0, 2.0, 3.0), (4.0, 5.0, 6.0)]);

        assert!(parse_poi_table("1 2\n").is_err());
        assert!(parse_poi_table("1 2 3\nbroken line\n").is_err());
        assert!(parse_poi_table("").is_err());
    }
}

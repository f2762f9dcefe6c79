//! Command-line surface of modqubo: dataset registry, partition, sweep and
//! time-study commands, and the benchmark suites.
//!
//! Exit codes: 0 success, 1 usage or data error, 2 infeasible result (or a
//! failed benchmark).

pub mod cli;
pub mod datasets;
pub mod record;
pub mod suites;

use std::io::Write;
use std::path::Path;

use clap::Parser;

use modqubo::{
    partition, sweep_k, time_study, ModularityParams, PartitionConfig, SolverConfig,
};

use cli::{Cli, Command, InputFormat, OutputFormat, SolveArgs};
use datasets::{FileFormat, LoadedGraph};
use record::RunRecord;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Core(#[from] modqubo::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl From<InputFormat> for FileFormat {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::EdgeList => FileFormat::EdgeList,
            InputFormat::BranchTable => FileFormat::BranchTable,
        }
    }
}

fn config_from(s: &SolveArgs) -> PartitionConfig {
    PartitionConfig {
        solver: SolverConfig {
            time_limit_sec: s.time_limit_sec,
            seed: s.seed,
            workers: s.workers,
            ..SolverConfig::default()
        },
        mode: s.mode.into(),
        lambda1: s.lambda1.0,
        lambda2: s.lambda2.0,
        params: ModularityParams { gamma: s.gamma },
        repair: !s.no_repair,
        ..PartitionConfig::default()
    }
}

fn load_graph(args: &cli::GraphArgs) -> Result<LoadedGraph, CliError> {
    datasets::load(&args.graph, args.weighted(), args.input_format.into())
}

fn check_k(g: &LoadedGraph, k: usize) -> Result<(), CliError> {
    let n = g.graph.node_count();
    if k == 0 || k > n {
        return Err(CliError::Data(format!(
            "K={k} out of range: {} has {n} nodes",
            g.id
        )));
    }
    Ok(())
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_partition(a: &cli::PartitionArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = load_graph(&a.graph)?;
    check_k(&g, a.k)?;
    let config = config_from(&a.solve);
    let r = partition(&g.graph, a.k, &config)?;
    let rec = RunRecord::new(&g.id, g.weighted, &g.graph, config.mode.as_str(), a.solve.gamma, &r);
    writeln!(
        out,
        "Q={} K={} feasible={} solve_time={:.3}",
        r.modularity, a.k, r.feasible, r.solve_time
    )?;
    if let Some(path) = &a.out {
        let text = match a.format {
            OutputFormat::Json => rec.to_json(),
            OutputFormat::Csv => rec.to_csv(),
        };
        std::fs::write(path, text)?;
    }
    Ok(if r.feasible { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn cmd_sweep(a: &cli::SweepArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.k_min == 0 || a.k_min > a.k_max {
        return Err(CliError::Usage(format!(
            "empty K range {}..={} (need 1 <= k-min <= k-max)",
            a.k_min, a.k_max
        )));
    }
    let g = load_graph(&a.graph)?;
    check_k(&g, a.k_max)?;
    let config = PartitionConfig {
        parallel_rows: a.parallel_rows,
        ..config_from(&a.solve)
    };
    let report = sweep_k(&g.graph, a.k_min..=a.k_max, &config);
    let mut csv = String::from("k,q,feasible,solve_time_sec,seed\n");
    let mut all_feasible = true;
    for row in &report.rows {
        let r = row.outcome.as_ref().map_err(|e| CliError::Data(format!("K={}: {e}", row.groups)))?;
        all_feasible &= r.feasible;
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.groups, r.modularity, r.feasible, r.solve_time, row.seed
        ));
    }
    emit(a.out.as_deref(), &csv, out)?;
    Ok(if all_feasible { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn cmd_bench(a: &cli::BenchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut config = PartitionConfig::default();
    config.solver.seed = a.seed;
    match a.suite {
        cli::Suite::Table1 => {
            if a.seeds == 0 {
                return Err(CliError::Usage("--seeds must be at least 1".into()));
            }
            config.solver.time_limit_sec = a.time_limit_sec.unwrap_or(10.0);
            let mut rows = Vec::new();
            for t in &suites::TABLE1 {
                rows.push(suites::run_table1_row(t, a.seeds, &config));
            }
            out.write_all(suites::format_table1(&rows).as_bytes())?;
            Ok(if rows.iter().all(|r| r.passed()) { EXIT_OK } else { EXIT_INFEASIBLE })
        }
        cli::Suite::Oracle => {
            config.solver.time_limit_sec = a.time_limit_sec.unwrap_or(2.0);
            let cases = suites::run_oracle(a.cases, &config)?;
            out.write_all(suites::format_oracle(&cases).as_bytes())?;
            Ok(if cases.iter().all(|c| c.matches()) { EXIT_OK } else { EXIT_INFEASIBLE })
        }
    }
}

fn cmd_timestudy(a: &cli::TimestudyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = load_graph(&a.graph)?;
    check_k(&g, a.k)?;
    let rows = time_study(&g.graph, a.k, &a.budgets.0, &config_from(&a.solve))?;
    let mut csv = String::from("time_limit_sec,solve_time_sec,q\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{}\n", r.time_limit_sec, r.solve_time, r.modularity));
    }
    emit(a.out.as_deref(), &csv, out)?;
    Ok(if rows.iter().all(|r| r.feasible) { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn cmd_datasets(a: &cli::DatasetsArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    writeln!(out, "data directory: {}", datasets::data_dir().display())?;
    let mut code = EXIT_OK;
    for d in datasets::REGISTRY {
        let status = if !d.is_present() {
            "missing".to_string()
        } else if a.verify {
            match d.verify() {
                Ok((n, m)) if (n, m) == (d.nodes, d.edges) => "verified".to_string(),
                Ok((n, m)) => {
                    code = EXIT_ERROR;
                    format!("MISMATCH: found {n} nodes, {m} edges")
                }
                Err(e) => {
                    code = EXIT_ERROR;
                    format!("ERROR: {e}")
                }
            }
        } else {
            "present".to_string()
        };
        writeln!(
            out,
            "{:<14} {:>5} nodes {:>5} edges  {:<10} {:<9} {}",
            d.name,
            d.nodes,
            d.edges,
            if d.weighted_available { "weighted" } else { "unweighted" },
            status,
            d.provenance
        )?;
    }
    Ok(code)
}

fn cmd_replay(a: &cli::ReplayArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let rec = RunRecord::parse(&std::fs::read_to_string(&a.record)?)?;
    let g = datasets::load(&rec.graph, Some(rec.weighted), a.input_format.into())?;
    rec.validate(&g.graph)?;
    let mode = rec.mode.parse().map_err(CliError::Data)?;
    let config = PartitionConfig {
        solver: SolverConfig {
            time_limit_sec: rec.time_limit_sec,
            seed: rec.seed,
            replay_steps: Some(rec.steps),
            ..SolverConfig::default()
        },
        mode,
        lambda1: Some(rec.lambda1),
        lambda2: Some(rec.lambda2),
        params: ModularityParams { gamma: rec.gamma },
        ..PartitionConfig::default()
    };
    let r = partition(&g.graph, rec.k, &config)?;
    let same = r.assignment.labels() == rec.assignment.as_slice();
    writeln!(
        out,
        "Q={} recorded_Q={} identical={}",
        r.modularity, rec.q, same
    )?;
    if !same {
        return Err(CliError::Data("replay diverged from the record".into()));
    }
    Ok(EXIT_OK)
}

fn cmd_export(a: &cli::ExportArgs) -> Result<i32, CliError> {
    let g = load_graph(&a.graph)?;
    check_k(&g, a.k)?;
    let config = PartitionConfig {
        mode: modqubo::ConstraintMode::Slack,
        lambda1: a.lambda1.0,
        lambda2: a.lambda2.0,
        params: ModularityParams { gamma: a.gamma },
        dense_term_limit: usize::MAX,
        ..PartitionConfig::default()
    };
    let model = config.build_model(&g.graph, a.k)?;
    let q = model
        .to_qubo()
        .ok_or_else(|| CliError::Data("model has no dense QUBO form".into()))?;
    std::fs::write(&a.out, q.to_text())?;
    Ok(EXIT_OK)
}

/// Runs a parsed command, reporting errors on `err`.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Partition(a) => cmd_partition(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Timestudy(a) => cmd_timestudy(a, out),
        Command::Datasets(a) => cmd_datasets(a, out),
        Command::Replay(a) => cmd_replay(a, out),
        Command::ExportQubo(a) => cmd_export(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, out, err),
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{}", e.render());
            EXIT_ERROR
        }
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            EXIT_OK
        }
    }
}

//! The `neurashed` command line.
//!
//! Exit codes: 0 on success, 1 on a domain error (invalid input files,
//! failed runs, refused output directory), 2 on a usage error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dynamics::{check_schedule_for, parse_config, run_training};
use crate::experiments::{
    build_scenario, describe, run_batch_comparison, run_elasticity_study, run_info_bottleneck,
    true_class_probabilities, BatchSize, Expectation, ExperimentError, MiCurve, Scenario, BUILTIN_NAMES,
};
use crate::graph::{parse_dataset, parse_graph_spec};
use crate::metrics::{DEFAULT_MC_SAMPLES, DEFAULT_SIGMA};
use crate::report::{emit_csv, emit_svg_plot, prepare_output_dir, Cell, PlotStyle, ReportError, RunManifest, Series, Table};

#[derive(Debug, Parser)]
#[command(name = "neurashed", version, about = "Leveled feature-pathway graph simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check graph, dataset and config files (or a scenario) and print OK.
    Validate {
        #[arg(short = 'g', long)]
        graph: Option<PathBuf>,
        #[arg(short = 'd', long)]
        dataset: Option<PathBuf>,
        #[arg(short = 'c', long)]
        config: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["graph", "dataset", "config"])]
        scenario: Option<String>,
    },
    /// Train and write snapshots, per-pattern progress and final predictions.
    Train(RunArgs),
    /// Information-bottleneck study: MI per level during training.
    Mi {
        #[command(flatten)]
        run: RunArgs,
        /// Noise standard deviation.
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
        #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
        mc_samples: usize,
    },
    /// Local elasticity between every pattern pair after training.
    Elasticity(RunArgs),
    /// Amplification sparsity under a small and a large batch size.
    CompareBatch(CompareArgs),
    /// List built-in scenarios, optionally exporting them as bundles.
    Scenarios {
        /// Write one bundle directory per scenario here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
}

#[derive(Debug, Args)]
struct Source {
    #[arg(short = 'g', long, required_unless_present = "scenario")]
    graph: Option<PathBuf>,
    #[arg(short = 'd', long, required_unless_present = "scenario")]
    dataset: Option<PathBuf>,
    #[arg(short = 'c', long, required_unless_present = "scenario")]
    config: Option<PathBuf>,
    /// Built-in scenario name or custom:<bundle dir>.
    #[arg(long, conflicts_with_all = ["graph", "dataset", "config"])]
    scenario: Option<String>,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long)]
    out: PathBuf,
    /// Reuse a non-empty output directory.
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iters: Option<u64>,
    /// Positive integer or "full".
    #[arg(long)]
    batch_size: Option<BatchSize>,
    /// Snapshot interval; for `mi` this is the evaluation interval.
    #[arg(long)]
    snapshot_every: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    source: Source,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    seed: Vec<u64>,
    #[arg(long)]
    iters: Option<u64>,
    /// Small and large batch size, e.g. `1,full`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    batch_size: Vec<BatchSize>,
    #[arg(long)]
    snapshot_every: Option<u64>,
    #[command(flatten)]
    output: Output,
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate {
            graph,
            dataset,
            config,
            scenario,
        } => validate(graph, dataset, config, scenario),
        Command::Train(run) => train(&argv, run),
        Command::Mi { run, sigma, mc_samples } => mi(&argv, run, sigma, mc_samples),
        Command::Elasticity(run) => elasticity(&argv, run),
        Command::CompareBatch(args) => compare_batch(&argv, args),
        Command::Scenarios { out, force } => scenarios(out, force),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nUsage: neurashed <COMMAND> [OPTIONS]\nFor more information, try '--help'.");
            2
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

enum Failure {
    Usage(String),
    Domain(ExperimentError),
}

impl<E: Into<ExperimentError>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.into())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| ReportError::io(path, e).into())
}

fn validate(
    graph: Option<PathBuf>,
    dataset: Option<PathBuf>,
    config: Option<PathBuf>,
    scenario: Option<String>,
) -> Result<(), Failure> {
    if let Some(name) = scenario {
        build_scenario(&name)?.check()?;
        println!("OK");
        return Ok(());
    }
    if graph.is_none() && dataset.is_none() && config.is_none() {
        return Err(Failure::Usage("validate needs at least one of -g, -d, -c or --scenario".into()));
    }
    let g = graph.map(|p| read(&p).and_then(|t| Ok(parse_graph_spec(&t)?))).transpose()?;
    let d = dataset.map(|p| read(&p).and_then(|t| Ok(parse_dataset(&t)?))).transpose()?;
    let c = config.map(|p| read(&p).and_then(|t| Ok(parse_config(&t)?))).transpose()?;
    if let Some(g) = &g {
        if let Some(d) = &d {
            d.validate_for(g)?;
        }
        if let Some((_, schedule)) = &c {
            check_schedule_for(schedule, g)?;
        }
    }
    println!("OK");
    Ok(())
}

/// A loaded scenario plus the manifest entries describing where it came from.
struct Loaded {
    scenario: Scenario,
    inputs: Vec<(String, Vec<u8>)>,
}

fn load(source: &Source) -> Result<Loaded, Failure> {
    if let Some(name) = &source.scenario {
        let scenario = build_scenario(name)?;
        let inputs = scenario
            .bundle_files()
            .into_iter()
            .map(|(f, t)| (format!("{}/{f}", scenario.name), t.into_bytes()))
            .collect();
        return Ok(Loaded { scenario, inputs });
    }
    let (g, d, c) = match (&source.graph, &source.dataset, &source.config) {
        (Some(g), Some(d), Some(c)) => (g, d, c),
        _ => return Err(Failure::Usage("either --scenario or all of -g, -d, -c are required".into())),
    };
    let (gt, dt, ct) = (read(g)?, read(d)?, read(c)?);
    let graph = parse_graph_spec(&gt)?;
    let dataset = parse_dataset(&dt)?;
    let (config, schedule) = parse_config(&ct)?;
    let groups = Scenario::level_groups(&graph);
    let scenario = Scenario::from_parts("custom", graph, dataset, config, schedule, groups, Vec::new())?;
    let inputs = [(g, gt), (d, dt), (c, ct)]
        .into_iter()
        .map(|(p, t)| (p.display().to_string(), t.into_bytes()))
        .collect();
    Ok(Loaded { scenario, inputs })
}

/// Applies the shared overrides and checks the result.
fn overridden(
    mut s: Scenario,
    iters: Option<u64>,
    batch: Option<BatchSize>,
    snapshot_every: Option<u64>,
) -> Result<Scenario, Failure> {
    if let Some(n) = iters {
        s.config.iterations = n;
    }
    if let Some(b) = batch {
        b.apply(&mut s.config);
    }
    if let Some(k) = snapshot_every {
        s.config.snapshot_every = k;
    }
    s.check()?;
    Ok(s)
}

struct Run {
    dir: PathBuf,
    manifest: RunManifest,
    outputs: Vec<&'static str>,
}

impl Run {
    fn start(argv: &[String], output: &Output, loaded: &Loaded, seeds: Vec<u64>) -> Result<Self, Failure> {
        prepare_output_dir(&output.out, output.force)?;
        let mut manifest = RunManifest::start(argv.to_vec());
        for (name, bytes) in &loaded.inputs {
            manifest.add_input(name.clone(), bytes);
        }
        manifest.seeds = seeds;
        Ok(Run {
            dir: output.out.clone(),
            manifest,
            outputs: Vec::new(),
        })
    }

    fn csv(&mut self, name: &'static str, table: &Table) -> Result<(), Failure> {
        emit_csv(table, &self.dir.join(name))?;
        self.outputs.push(name);
        Ok(())
    }

    fn svg(&mut self, name: &'static str, series: &[Series], style: &PlotStyle) -> Result<(), Failure> {
        emit_svg_plot(series, style, &self.dir.join(name))?;
        self.outputs.push(name);
        Ok(())
    }

    fn finish(self) -> Result<(), Failure> {
        self.manifest.finish(&self.dir, &self.outputs)?;
        println!("wrote {} files to {}", self.outputs.len() + 1, self.dir.display());
        Ok(())
    }
}

fn train(argv: &[String], a: RunArgs) -> Result<(), Failure> {
    let loaded = load(&a.source)?;
    let mut s = overridden(loaded.scenario.clone(), a.iters, a.batch_size, a.snapshot_every)?;
    if let Some(seed) = a.seed {
        s.config.seed = seed;
    }
    let mut run = Run::start(argv, &a.output, &loaded, vec![s.config.seed])?;
    let t = run_training(&s.graph, &s.dataset, &s.config, &s.schedule)?;
    run.csv("snapshots.csv", &t.snapshot_table(&s.graph))?;

    let mut progress = Table::new(["iteration", "pattern_id", "group", "p_label"]);
    let mut series: Vec<Series> = s
        .dataset
        .patterns
        .iter()
        .enumerate()
        .map(|(i, p)| Series::new(format!("pattern {i} ({})", p.group_name()), Vec::new()))
        .collect();
    for snap in &t.snapshots {
        let probs = true_class_probabilities(&s.graph, &snap.state, &s.dataset)?;
        for (i, p) in probs.iter().enumerate() {
            progress.push(vec![
                Cell::Int(snap.iteration as i64),
                Cell::Int(i as i64),
                Cell::text(&s.dataset.patterns[i].group_name()),
                Cell::Float(*p),
            ]);
            series[i].points.push((snap.iteration as f64, *p));
        }
    }
    run.csv("progress.csv", &progress)?;
    run.svg(
        "progress.svg",
        &series,
        &PlotStyle::line("True-class probability during training", "iteration", "p_label"),
    )?;

    let probs = true_class_probabilities(&s.graph, t.final_state(), &s.dataset)?;
    let mut predictions = Table::new(["pattern_id", "group", "label", "p_label"]);
    for (i, (p, prob)) in s.dataset.patterns.iter().zip(&probs).enumerate() {
        predictions.push(vec![
            Cell::Int(i as i64),
            Cell::text(&p.group_name()),
            Cell::Int(p.label as i64),
            Cell::Float(*prob),
        ]);
    }
    run.csv("predictions.csv", &predictions)?;
    run.finish()
}

fn mi(argv: &[String], a: RunArgs, sigma: f64, mc_samples: usize) -> Result<(), Failure> {
    let loaded = load(&a.source)?;
    let s = overridden(loaded.scenario.clone(), a.iters, a.batch_size, a.snapshot_every)?;
    let seed = a.seed.unwrap_or(s.config.seed);
    let mut run = Run::start(argv, &a.output, &loaded, vec![seed])?;
    let curve = run_info_bottleneck(&s, s.config.snapshot_every, sigma, mc_samples, seed)?;
    run.csv("mi_curve.csv", &curve.table())?;
    run.svg("mi_curve.svg", &curve.series(), &MiCurve::plot_style())?;
    run.finish()
}

fn elasticity(argv: &[String], a: RunArgs) -> Result<(), Failure> {
    let loaded = load(&a.source)?;
    let s = overridden(loaded.scenario.clone(), a.iters, a.batch_size, a.snapshot_every)?;
    let seed = a.seed.unwrap_or(s.config.seed);
    let mut run = Run::start(argv, &a.output, &loaded, vec![seed])?;
    let study = run_elasticity_study(&s, s.config.iterations, seed)?;
    run.csv("elasticity.csv", &study.table())?;
    run.csv("elasticity_medians.csv", &study.median_table())?;
    let (series, style) = study.plot();
    run.svg("elasticity.svg", &series, &style)?;
    run.finish()
}

fn compare_batch(argv: &[String], a: CompareArgs) -> Result<(), Failure> {
    let loaded = load(&a.source)?;
    let s = overridden(loaded.scenario.clone(), a.iters, None, a.snapshot_every)?;
    let declared = s.expectations.iter().find_map(|e| match e {
        Expectation::SparserWithSmallBatch {
            seeds,
            small_batch,
            large_batch,
            ..
        } => Some((seeds.clone(), *small_batch, *large_batch)),
        _ => None,
    });
    let (small, large) = match a.batch_size.as_slice() {
        [] => declared.as_ref().map_or((BatchSize::Size(1), BatchSize::Full), |d| (d.1, d.2)),
        [small, large] => (*small, *large),
        _ => return Err(Failure::Usage("--batch-size takes exactly two values: SMALL,LARGE".into())),
    };
    let seeds = if !a.seed.is_empty() {
        a.seed.clone()
    } else {
        declared.map_or(vec![s.config.seed], |d| d.0)
    };
    let mut run = Run::start(argv, &a.output, &loaded, seeds.clone())?;
    let cmp = run_batch_comparison(&s, small, large, &seeds)?;
    run.csv("sparsity.csv", &cmp.table())?;
    run.csv("sparsity_gap.csv", &cmp.gap_table())?;
    let (series, style) = cmp.plot();
    run.svg("sparsity.svg", &series, &style)?;
    run.finish()
}

fn scenarios(out: Option<PathBuf>, force: bool) -> Result<(), Failure> {
    for name in BUILTIN_NAMES {
        println!("{name}\t{}", describe(name).unwrap_or(""));
    }
    if let Some(dir) = out {
        prepare_output_dir(&dir, force)?;
        for name in BUILTIN_NAMES {
            build_scenario(name)?.write_dir(&dir.join(name))?;
        }
    }
    Ok(())
}

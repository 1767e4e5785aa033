//! `mlsynth` — generate transport-network instances, design MPLS overlays on
//! them, and run the baseline-vs-multilayer comparison suite.
//!
//! Exit codes: 0 success, 1 usage error, 2 infeasible input or failed
//! validation, 3 I/O error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mlsynth_core::{
    generate_instance, read_instance, run_comparison, solve_exact, solve_full_lsr_baseline,
    solve_multilayer, write_instance, BuilderParams, Error, ExactLimits, Instance, ReportFormat,
    SearchParams, Solution, SuiteConfig, VariantParams,
};

#[derive(Parser)]
#[command(name = "mlsynth", version, about = "Multilayer MPLS overlay design toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and write it as canonical JSON
    Gen {
        /// Number of transport nodes
        #[arg(long)]
        nodes: usize,
        /// Variant preset tag (e.g. "sparse-cheap-thin") or 1-based index
        #[arg(long)]
        variant: String,
        /// Generator seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Solve a single instance and print the resulting overlay design
    Solve {
        /// Instance file to read
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Which solver to run
        #[arg(long, value_enum, default_value_t = Solver::Multilayer)]
        solver: Solver,
        /// Search seed (multilayer solver only)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the full solution as JSON instead of a summary
        #[arg(long)]
        json: bool,
    },
    /// Run the comparison suite over a grid of generated instances
    Compare {
        /// Node counts as START:STOP:STEP (inclusive) or a single count
        #[arg(long, default_value = "20:50:5", value_parser = parse_grid)]
        grid: Grid,
        /// How many variant presets to include (1-8)
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u8).range(1..=8))]
        variants: u8,
        /// How many seeds per cell (runs seeds 1..=N)
        #[arg(long, default_value_t = 3)]
        seeds: usize,
        /// Report file (stdout if omitted)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Report format
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Zero out timing columns so repeated runs are byte-identical
        #[arg(long)]
        repro: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Multilayer,
    Baseline,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Pretty,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
            Format::Pretty => ReportFormat::Pretty,
        }
    }
}

/// Node counts expanded from a `START:STOP:STEP` range argument.
#[derive(Clone)]
struct Grid(Vec<u32>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    if let Ok(n) = s.parse::<u32>() {
        return Ok(Grid(vec![n]));
    }
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(format!("expected START:STOP:STEP or a single node count, got {s:?}"));
    };
    let start: u32 = start.parse().map_err(|_| format!("bad grid start {start:?}"))?;
    let stop: u32 = stop.parse().map_err(|_| format!("bad grid stop {stop:?}"))?;
    let step: u32 = step.parse().map_err(|_| format!("bad grid step {step:?}"))?;
    if step == 0 {
        return Err("grid step must be positive".into());
    }
    if start > stop {
        return Err(format!("grid start {start} exceeds stop {stop}"));
    }
    Ok(Grid((start..=stop).step_by(step as usize).collect()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version land here too; they print to stdout and exit 0.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // A closed stdout (e.g. piping into `head`) is normal termination.
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("mlsynth: {err}");
            match err {
                Error::Io(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gen { nodes, variant, seed, out } => gen(nodes, &variant, seed, &out),
        Command::Solve { input, solver, seed, json } => solve(&input, solver, seed, json),
        Command::Compare { grid, variants, seeds, out, format, repro } => {
            compare(grid.0, variants as usize, seeds, out.as_deref(), format.into(), repro)
        }
    }
}

fn gen(nodes: usize, variant: &str, seed: u64, out: &std::path::Path) -> Result<(), Error> {
    let params = VariantParams::preset(variant, nodes)?;
    let instance = generate_instance(nodes, &params, seed)?;
    write_instance(&instance, out)?;
    writeln!(
        io::stdout().lock(),
        "wrote {} nodes / {} edges / {} demands (variant {}, seed {}) to {}",
        instance.nodes.len(),
        instance.transport_edges.len(),
        instance.demands.len(),
        instance.meta.variant,
        instance.meta.seed,
        out.display()
    )?;
    Ok(())
}

fn solve(input: &std::path::Path, solver: Solver, seed: u64, json: bool) -> Result<(), Error> {
    let instance = read_instance(input)?;
    let solution = match solver {
        Solver::Baseline => solve_full_lsr_baseline(&instance)?,
        Solver::Multilayer => {
            let search = SearchParams { seed, ..SearchParams::default() };
            solve_multilayer(&instance, &BuilderParams::default(), &search)?
        }
        Solver::Exact => solve_exact(&instance, &ExactLimits::default())?,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if json {
        serde_json::to_writer_pretty(&mut out, &solution).map_err(io::Error::other)?;
        writeln!(out)?;
    } else {
        print_summary(&mut out, &instance, &solution)?;
    }
    Ok(())
}

fn print_summary(
    out: &mut impl Write,
    instance: &Instance,
    solution: &Solution,
) -> io::Result<()> {
    writeln!(
        out,
        "instance: {} nodes, {} demands (variant {}, seed {})",
        instance.nodes.len(),
        instance.demands.len(),
        instance.meta.variant,
        instance.meta.seed
    )?;
    let lsrs: Vec<&str> = solution.lsr_nodes.iter().map(|n| n.as_str()).collect();
    writeln!(out, "lsr nodes ({}): {}", lsrs.len(), lsrs.join(" "))?;
    writeln!(out, "logical links ({}):", solution.logical_links.len())?;
    for link in &solution.logical_links {
        let hops: Vec<&str> = link.realization.iter().map(|e| e.as_str()).collect();
        writeln!(
            out,
            "  {}  channels {}  load {}  via {}",
            link.id,
            link.channels,
            solution.flow.link_load.get(&link.id).copied().unwrap_or(0),
            hops.join(",")
        )?;
    }
    writeln!(
        out,
        "cost: lsr {} + channels {} = {}",
        solution.cost.lsr_total, solution.cost.channel_total, solution.cost.grand_total
    )
}

fn compare(
    node_counts: Vec<u32>,
    variants: usize,
    seeds: usize,
    out: Option<&std::path::Path>,
    format: ReportFormat,
    repro: bool,
) -> Result<(), Error> {
    let config = SuiteConfig {
        node_counts,
        variants: mlsynth_core::suite_variants(variants)?.iter().map(|t| t.to_string()).collect(),
        seeds: (1..=seeds as u64).collect(),
        measure_time: !repro,
        ..SuiteConfig::default()
    };
    let table = run_comparison(&config);
    if table.summary.is_none() {
        eprintln!("mlsynth: warning: no successful rows to summarize");
    }
    match out {
        Some(path) => {
            let file = File::create(path)?;
            let mut writer = BufWriter::new(file);
            mlsynth_core::emit_report(&table, format, &mut writer)?;
            writer.flush()?;
            eprintln!("wrote {} rows to {}", table.rows.len(), path.display());
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            mlsynth_core::emit_report(&table, format, &mut out)?;
        }
    }
    Ok(())
}

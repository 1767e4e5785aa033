//! Comparison harness: runs the baseline and multilayer solvers across a
//! grid of generated instances, collects per-row results, and renders
//! them as CSV, JSON, or an aligned text table with savings statistics.

use std::collections::BTreeMap;
use std::io::Write;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builder::{build_redundant_mlg, BuilderParams};
use crate::error::{Error, Result};
use crate::instance::{generate_instance, Instance, VariantParams, SUITE_VARIANTS};
use crate::optimizer::{
    evaluate_cost, solve_full_lsr_baseline, solve_multilayer, SearchParams, Solution,
};

/// Savings band highlighted in summaries: overlay designs in this range
/// are squarely in line with reported multilayer-vs-full-LSR results.
pub const REFERENCE_SAVINGS_BAND: RangeInclusive<f64> = 10.0..=16.0;

/// One comparison suite: the instance grid plus solver parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub node_counts: Vec<u32>,
    /// Variant preset tags; row order follows this list's order.
    pub variants: Vec<String>,
    pub seeds: Vec<u64>,
    pub builder: BuilderParams,
    pub search: SearchParams,
    /// When false, runtime columns are reported as 0 so that repeated
    /// runs produce byte-identical output.
    pub measure_time: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            node_counts: vec![20, 25, 30, 35, 40, 45, 50],
            variants: SUITE_VARIANTS.iter().map(|s| s.to_string()).collect(),
            seeds: vec![1, 2, 3],
            builder: BuilderParams::default(),
            search: SearchParams::default(),
            measure_time: true,
        }
    }
}

/// Result of one (node_count, variant, seed) cell. A row either carries
/// all cost/timing numbers, or `error` with every numeric field empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub node_count: u32,
    pub variant: String,
    pub seed: u64,
    pub baseline_cost: Option<u64>,
    pub multilayer_cost: Option<u64>,
    pub savings_pct: Option<f64>,
    pub baseline_ms: Option<u64>,
    pub multilayer_ms: Option<u64>,
    pub error: Option<String>,
}

/// Aggregate savings statistics over a table's successful rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavingsSummary {
    pub mean_savings_pct: f64,
    pub min_savings_pct: f64,
    pub max_savings_pct: f64,
    pub per_node_count: BTreeMap<u32, f64>,
    pub per_variant: BTreeMap<String, f64>,
    /// Whether the mean lies inside [`REFERENCE_SAVINGS_BAND`].
    pub within_reference_band: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    /// `None` when no row produced a savings number.
    pub summary: Option<SavingsSummary>,
}

/// Output encodings understood by [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Pretty,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "pretty" => Ok(ReportFormat::Pretty),
            other => Err(format!("unknown format {other:?}; expected csv, json, or pretty")),
        }
    }
}

/// Column header of the CSV encoding, fixed so downstream tooling can
/// rely on it.
pub const CSV_HEADER: &str =
    "node_count,variant,seed,baseline_cost,multilayer_cost,savings_pct,baseline_ms,multilayer_ms";

/// Independent feasibility audit of solver outputs: recomputes each
/// solution's cost breakdown from scratch (which re-verifies routing,
/// flow conservation, and the channel-coverage rule) and re-validates the
/// candidate multilayer graph the builder produces for the instance.
pub fn verify_feasibility(
    instance: &Instance,
    builder: &BuilderParams,
    solutions: &[&Solution],
) -> Result<()> {
    for sol in solutions {
        let recomputed = evaluate_cost(instance, sol)?;
        if recomputed != sol.cost {
            return Err(Error::InfeasibleSolution(format!(
                "stored cost breakdown {:?} disagrees with recomputation {:?}",
                sol.cost, recomputed
            )));
        }
    }
    let mlg = build_redundant_mlg(instance, builder)?;
    let violations = crate::mlg::validate(&mlg);
    if let Some(first) = violations.first() {
        return Err(Error::InfeasibleSolution(format!(
            "candidate graph failed validation with {} violation(s), first: {first}",
            violations.len()
        )));
    }
    Ok(())
}

fn compare_one(node_count: u32, variant: &str, seed: u64, config: &SuiteConfig) -> ComparisonRow {
    let mut row = ComparisonRow {
        node_count,
        variant: variant.to_string(),
        seed,
        baseline_cost: None,
        multilayer_cost: None,
        savings_pct: None,
        baseline_ms: None,
        multilayer_ms: None,
        error: None,
    };
    let outcome = (|| -> Result<(u64, u64, u64, u64)> {
        let params = VariantParams::preset(variant, node_count as usize)?;
        let instance = generate_instance(node_count as usize, &params, seed)?;

        let clock = Instant::now();
        let baseline = solve_full_lsr_baseline(&instance)?;
        let baseline_ms = clock.elapsed().as_millis() as u64;

        let search = SearchParams {
            seed,
            ..config.search
        };
        let clock = Instant::now();
        let multilayer = solve_multilayer(&instance, &config.builder, &search)?;
        let multilayer_ms = clock.elapsed().as_millis() as u64;

        verify_feasibility(&instance, &config.builder, &[&baseline, &multilayer])?;
        Ok((
            baseline.cost.grand_total,
            multilayer.cost.grand_total,
            baseline_ms,
            multilayer_ms,
        ))
    })();
    match outcome {
        Ok((baseline, multilayer, baseline_ms, multilayer_ms)) => {
            row.baseline_cost = Some(baseline);
            row.multilayer_cost = Some(multilayer);
            row.savings_pct = Some(if baseline == 0 {
                0.0
            } else {
                100.0 * (baseline - multilayer) as f64 / baseline as f64
            });
            let (b_ms, m_ms) = if config.measure_time {
                (baseline_ms, multilayer_ms)
            } else {
                (0, 0)
            };
            row.baseline_ms = Some(b_ms);
            row.multilayer_ms = Some(m_ms);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Runs `f` on a worker pool sized by the `MLSYNTH_THREADS` environment
/// variable, or on the default pool when the variable is unset/invalid.
fn with_worker_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let configured = std::env::var("MLSYNTH_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0);
    if let Some(threads) = configured {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            return pool.install(f);
        }
    }
    f()
}

/// Runs the full baseline-vs-multilayer comparison over the configured
/// grid. Rows are ordered by (node_count, variant position, seed);
/// individual failures are recorded in their row and never abort the
/// suite. Output is deterministic for a fixed config (with
/// `measure_time: false` even the timing columns are).
pub fn run_comparison(config: &SuiteConfig) -> ComparisonTable {
    let mut work: Vec<(u32, usize, u64)> = Vec::new();
    for &n in &config.node_counts {
        for vi in 0..config.variants.len() {
            for &seed in &config.seeds {
                work.push((n, vi, seed));
            }
        }
    }
    let mut keyed: Vec<((u32, usize, u64), ComparisonRow)> = with_worker_pool(|| {
        work.par_iter()
            .map(|&(n, vi, seed)| {
                ((n, vi, seed), compare_one(n, &config.variants[vi], seed, config))
            })
            .collect()
    });
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let rows: Vec<ComparisonRow> = keyed.into_iter().map(|(_, row)| row).collect();
    let summary = summarize_rows(&rows).ok();
    ComparisonTable { rows, summary }
}

fn summarize_rows(rows: &[ComparisonRow]) -> Result<SavingsSummary> {
    let usable: Vec<&ComparisonRow> = rows.iter().filter(|r| r.savings_pct.is_some()).collect();
    if usable.is_empty() {
        return Err(Error::NoData);
    }
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut by_nodes: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    let mut by_variant: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for row in &usable {
        let s = row.savings_pct.expect("filtered to Some above");
        sum += s;
        min = min.min(s);
        max = max.max(s);
        let slot = by_nodes.entry(row.node_count).or_insert((0.0, 0));
        slot.0 += s;
        slot.1 += 1;
        let slot = by_variant.entry(row.variant.clone()).or_insert((0.0, 0));
        slot.0 += s;
        slot.1 += 1;
    }
    let mean = sum / usable.len() as f64;
    Ok(SavingsSummary {
        mean_savings_pct: mean,
        min_savings_pct: min,
        max_savings_pct: max,
        per_node_count: by_nodes
            .into_iter()
            .map(|(k, (s, c))| (k, s / c as f64))
            .collect(),
        per_variant: by_variant
            .into_iter()
            .map(|(k, (s, c))| (k, s / c as f64))
            .collect(),
        within_reference_band: REFERENCE_SAVINGS_BAND.contains(&mean),
    })
}

/// Savings statistics for a table. Fails with `NO_DATA` when no row has
/// a savings number (empty table or all rows errored).
pub fn summarize_savings(table: &ComparisonTable) -> Result<SavingsSummary> {
    summarize_rows(&table.rows)
}

fn csv_cell_u64(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_cell_pct(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_default()
}

/// Writes `table` to `out` in the chosen encoding. CSV columns are
/// exactly [`CSV_HEADER`]; an empty table still gets the header line.
/// JSON mirrors [`ComparisonTable`]. The pretty encoding prints an
/// aligned node-count × variant table with a savings column and a
/// summary footer.
pub fn emit_report(
    table: &ComparisonTable,
    format: ReportFormat,
    out: &mut dyn Write,
) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in &table.rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.node_count,
                    r.variant,
                    r.seed,
                    csv_cell_u64(r.baseline_cost),
                    csv_cell_u64(r.multilayer_cost),
                    csv_cell_pct(r.savings_pct),
                    csv_cell_u64(r.baseline_ms),
                    csv_cell_u64(r.multilayer_ms),
                )?;
            }
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, table)
                .map_err(|e| Error::Io(e.into()))?;
            writeln!(out)?;
        }
        ReportFormat::Pretty => emit_pretty(table, out)?,
    }
    Ok(())
}

fn emit_pretty(table: &ComparisonTable, out: &mut dyn Write) -> Result<()> {
    if table.rows.is_empty() {
        writeln!(out, "(no rows: empty suite)")?;
        return Ok(());
    }
    let variant_width = table
        .rows
        .iter()
        .map(|r| r.variant.len())
        .chain(["variant".len()])
        .max()
        .unwrap_or(7);
    writeln!(
        out,
        "{:>5}  {:<variant_width$}  {:>4}  {:>12}  {:>12}  {:>9}",
        "nodes", "variant", "seed", "baseline", "multilayer", "savings%"
    )?;
    for r in &table.rows {
        match r.error.as_deref() {
            None => writeln!(
                out,
                "{:>5}  {:<variant_width$}  {:>4}  {:>12}  {:>12}  {:>9}",
                r.node_count,
                r.variant,
                r.seed,
                csv_cell_u64(r.baseline_cost),
                csv_cell_u64(r.multilayer_cost),
                r.savings_pct.map(|s| format!("{s:.2}")).unwrap_or_default(),
            )?,
            Some(err) => writeln!(
                out,
                "{:>5}  {:<variant_width$}  {:>4}  error: {err}",
                r.node_count, r.variant, r.seed
            )?,
        }
    }
    match &table.summary {
        Some(s) => {
            writeln!(out)?;
            writeln!(
                out,
                "savings: mean {:.2}%  min {:.2}%  max {:.2}%",
                s.mean_savings_pct, s.min_savings_pct, s.max_savings_pct
            )?;
            writeln!(
                out,
                "reference band {:.0}-{:.0}%: {}",
                REFERENCE_SAVINGS_BAND.start(),
                REFERENCE_SAVINGS_BAND.end(),
                if s.within_reference_band {
                    "inside"
                } else {
                    "outside"
                }
            )?;
            for (n, mean) in &s.per_node_count {
                writeln!(out, "  {n} nodes: mean {mean:.2}%")?;
            }
        }
        None => writeln!(out, "\n(no summary: all rows failed)")?,
    }
    Ok(())
}

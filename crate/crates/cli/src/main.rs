use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use gromov_core::census::{
    check_tables, registry_from_json, registry_to_json, run_census_with_progress, SamplerConfig, DEFAULT_MAX_WEIGHT,
};
use gromov_core::equivalence::decide_equivalence;
use gromov_core::metric::{extract_structure, gromov_product, minimal_products_at, MetricError};
use gromov_core::structure::{decompose_chains_cycles, pendant_free_adjacency, removed_edges, ComponentKind};
use gromov_core::{fingerprint, matrix_rep, parse_metric, GromovStructure, MetricFormat, MetricSpace};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "gromov", version, about = "Gromov product structures of finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Extra progress output on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the structure of a metric and report its invariants.
    Analyze {
        file: PathBuf,
        /// csv-full, csv-lower or json; detected from the contents when omitted.
        #[arg(long)]
        format: Option<MetricFormat>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether two structures are related by a relabeling.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample random metrics and collect the classes of their structures.
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Worker threads; 0 uses one per core.
        #[arg(long, env = "GROMOV_THREADS", default_value_t = 0)]
        threads: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_WEIGHT)]
        max_weight: u64,
        /// Where to write the registry JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the registry JSON on stdout after the summary line.
        #[arg(long)]
        json: bool,
    },
    /// Recompute the published reference structures and compare.
    CheckTables {
        #[arg(long)]
        n: usize,
        /// Census registry whose classes must match the reference rows.
        registry: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure with an exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

fn detect_format(text: &str) -> MetricFormat {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(first) if first.trim_start().starts_with('{') => MetricFormat::Json,
        Some(first) if first.split(',').count() == 1 => MetricFormat::CsvLower,
        _ => MetricFormat::CsvFull,
    }
}

fn matrix_lines(rows: &[Vec<u8>]) -> Vec<String> {
    rows.iter()
        .map(|r| r.iter().map(u8::to_string).collect::<Vec<_>>().join(" "))
        .collect()
}

fn analyze(file: &Path, format: Option<MetricFormat>, as_json: bool, out: Option<&Path>) -> Outcome {
    let text = read(file)?;
    let format = format.unwrap_or_else(|| detect_format(&text));
    let space: MetricSpace = parse_metric(&text, format).map_err(|e| Failure::input(e.to_string()))?;
    let extraction = match extract_structure(&space) {
        Ok(e) => e,
        Err(MetricError::NonGeneric { vertices }) => {
            let mut detail = Vec::new();
            for &v in &vertices {
                let minima = minimal_products_at(&space, v).map_err(|e| Failure::input(e.to_string()))?;
                let listed: Vec<String> = minima.iter().map(ToString::to_string).collect();
                detail.push(format!("vertex {}: {}", v + 1, listed.join(", ")));
            }
            let labels: Vec<String> = vertices.iter().map(|v| (v + 1).to_string()).collect();
            return Err(Failure {
                code: 3,
                message: format!(
                    "metric is not generic: tied minimal Gromov products at vertices {}\n{}",
                    labels.join(", "),
                    detail.join("\n")
                ),
            });
        }
        Err(e) => return Err(Failure::input(e.to_string())),
    };
    let s = &extraction.structure;
    let fp = fingerprint(s);
    let g = matrix_rep(s);
    let removed: Vec<[usize; 2]> = removed_edges(s).into_iter().map(|(a, b)| [a + 1, b + 1]).collect();
    let pendant = pendant_free_adjacency(s);
    let decomposition = decompose_chains_cycles(s);
    let zero: Vec<usize> = extraction.zero_minimum_vertices().into_iter().map(|v| v + 1).collect();
    let minima: Vec<String> = (0..s.n())
        .map(|i| {
            let (a, b) = s.pair(i);
            gromov_product(&space, i, a, b).expect("valid triple").value.to_string()
        })
        .collect();
    let k_factored = fp.char_poly.factored_string();
    let m_factored = fp.min_poly.factored_string();

    let report = if as_json {
        let components: Vec<_> = decomposition
            .components
            .iter()
            .map(|c| {
                json!({
                    "kind": match c.kind { ComponentKind::Chain => "chain", ComponentKind::Cycle => "cycle" },
                    "vertices": c.vertices.iter().map(|v| v + 1).collect::<Vec<_>>(),
                    "end_arrows": c.end_arrows.iter().map(|(a, b)| [a + 1, b + 1]).collect::<Vec<_>>(),
                })
            })
            .collect();
        to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "n": s.n(),
            "structure": s.to_json_triples(),
            "triples": s.triples_label(),
            "minimal_products": minima,
            "zero_minimum_vertices": zero,
            "matrix": g.rows(),
            "removed_edges": removed,
            "pendant_free_adjacency": pendant.rows(),
            "components": components,
            "fingerprint": fp,
            "char_poly_factored": k_factored,
            "min_poly_factored": m_factored,
        }))
    } else {
        let mut t = String::new();
        t.push_str(&format!("structure ({} points): {}\n", s.n(), s.triples_label()));
        t.push_str(&s.to_text());
        if !t.ends_with('\n') {
            t.push('\n');
        }
        for (i, value) in minima.iter().enumerate() {
            let (a, b) = s.pair(i);
            t.push_str(&format!("  minimum at {}: Δ{{{};{},{}}} = {value}\n", i + 1, i + 1, a + 1, b + 1));
        }
        if !zero.is_empty() {
            let labels: Vec<String> = zero.iter().map(ToString::to_string).collect();
            t.push_str(&format!("warning: zero minimal product at vertices {}\n", labels.join(", ")));
        }
        t.push_str("G_S:\n");
        for line in matrix_lines(&g.rows()) {
            t.push_str(&format!("  {line}\n"));
        }
        let removed_text: Vec<String> = removed.iter().map(|[a, b]| format!("{a}{b}")).collect();
        t.push_str(&format!("removed edges ({}): {}\n", removed.len(), removed_text.join(" ")));
        t.push_str("pendant-free adjacency:\n");
        for line in matrix_lines(&pendant.rows()) {
            t.push_str(&format!("  {line}\n"));
        }
        t.push_str(&format!("chains and cycles:\n{decomposition}"));
        t.push_str(&format!("rank: {}\n", fp.rank));
        t.push_str(&format!("ends: {}\n", fp.ends));
        t.push_str(&format!("irreducible: {}\n", fp.irreducible));
        let traces: Vec<String> = fp.trace_powers.iter().map(ToString::to_string).collect();
        t.push_str(&format!("traces of powers: {}\n", traces.join(" ")));
        t.push_str(&format!("k(t) = {k_factored} = {}\n", fp.char_poly));
        t.push_str(&format!("m(t) = {m_factored} = {}\n", fp.min_poly));
        t
    };
    emit(&report, out)?;
    Ok(0)
}

fn read_structure(path: &Path) -> Result<GromovStructure, Failure> {
    GromovStructure::parse(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn equiv(first: &Path, second: &Path, out: Option<&Path>) -> Outcome {
    let a = read_structure(first)?;
    let b = read_structure(second)?;
    let verdict = decide_equivalence(&a, &b).map_err(|e| Failure::input(e.to_string()))?;
    let mut value = serde_json::to_value(&verdict).expect("verdict serializes");
    value["schema_version"] = json!(SCHEMA_VERSION);
    emit(&to_json(&value), out)?;
    Ok(if verdict.equivalent { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn census(
    n: usize,
    samples: u64,
    seed: u64,
    threads: usize,
    max_weight: u64,
    out: Option<&Path>,
    print_json: bool,
    verbose: bool,
) -> Outcome {
    let cfg = SamplerConfig { max_weight, ..SamplerConfig::new(n, samples, seed) };
    let started = std::time::Instant::now();
    let progress = |done: u64, total: u64| {
        if verbose {
            eprintln!("progress {done}/{total}");
        }
    };
    let registry = run_census_with_progress(&cfg, threads, &progress).map_err(|e| Failure::input(e.to_string()))?;
    let text = registry_to_json(&registry, Some(&cfg));
    if let Some(path) = out {
        emit(&text, Some(path))?;
    }
    if registry.is_empty() {
        eprintln!("warning: no generic sample in {samples} draws; registry is empty");
    }
    println!("{}", registry.summary_line());
    if verbose {
        eprintln!(
            "drawn={} nongeneric_rate={:.4} elapsed={:.2?}",
            registry.samples_drawn,
            registry.nongeneric_rate(),
            started.elapsed()
        );
    }
    if print_json {
        print!("{text}");
    }
    let _ = std::io::stdout().flush();
    Ok(0)
}

fn tables(n: usize, registry: Option<&Path>, as_json: bool, out: Option<&Path>) -> Outcome {
    let registry = match registry {
        Some(path) => Some(registry_from_json(&read(path)?).map_err(|e| Failure::input(e.to_string()))?.0),
        None => None,
    };
    let report = check_tables(n, registry.as_ref()).map_err(|e| Failure::input(e.to_string()))?;
    let text = if as_json { to_json(&report) } else { report.to_table() };
    emit(&text, out)?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze { file, format, json, out } => analyze(&file, format, json, out.as_deref()),
        Command::Equiv { first, second, out } => equiv(&first, &second, out.as_deref()),
        Command::Census { n, samples, seed, threads, max_weight, out, json } => {
            census(n, samples, seed, threads, max_weight, out.as_deref(), json, cli.verbose)
        }
        Command::CheckTables { n, registry, json, out } => tables(n, registry.as_deref(), json, out.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

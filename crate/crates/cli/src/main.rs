//! `qk`: batch computation and verification reports for genus-zero quantum K-theory.
//!
//! Reports go to stdout (or `--output`) as JSON; a one-line human summary goes
//! to stderr. Exit codes: 0 success, 1 bad input or I/O, 2 some descendent
//! index was not reducible, 3 some residual is nonzero.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qk_core::correlators::{beta_zero_table, load_correlators, table_consistency_check, CorrelatorTable, Target};
use qk_core::descendents::{descendent_euler, DescendentError, DescendentIndex};
use qk_core::frobenius::{assemble_potential, frobenius_report, FrobeniusData};
use qk_core::kring::KRing;
use qk_core::qde::{assemble_fundamental_solution, qde_residual};

const EXIT_INPUT: u8 = 1;
const EXIT_NOT_REDUCIBLE: u8 = 2;
const EXIT_RESIDUAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qk", version, about = "Exact genus-zero quantum K-theory checks")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// point | projective:N | custom:PATH (a ring JSON document)
    #[arg(long, global = true, default_value = "point")]
    target: String,
    /// Truncation order in the t variables.
    #[arg(long = "t-order", global = true, default_value_t = 6)]
    t_order: u32,
    /// Truncation order in the Novikov variables.
    #[arg(long = "q-order", global = true, default_value_t = 0)]
    q_order: u32,
    /// Truncation order in the descendent variable q.
    #[arg(long = "desc-order", global = true, default_value_t = 4)]
    desc_order: u32,
    /// Correlator table (or, for `descendent`, a JSON array of exponent lists).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed recorded in reports; every command is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Descendent Euler characteristic of a point, e.g. `qk descendent 2,3,0,1`.
    Descendent {
        exponents: Option<String>,
    },
    /// Assemble the genus-zero potential and print it as a series document.
    Potential,
    /// WDVV, flatness, Levi-Civita, unit and classical-limit residuals.
    FrobeniusCheck,
    /// Quantum differential equation residuals for the fundamental solution.
    QdeCheck,
    /// Fundamental-class consistency of a correlator table.
    TableCheck,
    /// K-ring presentations.
    Kring {
        #[command(subcommand)]
        action: KringAction,
    },
}

#[derive(Subcommand, Debug)]
enum KringAction {
    /// Print rank, labels, structure constants and pairing.
    Info,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Descendent { exponents } => cmd_descendent(cfg, exponents.as_deref()),
        Command::Potential => cmd_potential(cfg),
        Command::FrobeniusCheck => cmd_frobenius(cfg),
        Command::QdeCheck => cmd_qde(cfg),
        Command::TableCheck => cmd_table(cfg),
        Command::Kring { action: KringAction::Info } => {
            let ring = parse_target(&cfg.target)?.ring();
            let mut doc = ring.to_json();
            doc["target"] = json!(cfg.target);
            emit(cfg, &doc)?;
            eprintln!("rank {} ring for {}", ring.rank(), cfg.target);
            Ok(0)
        }
    }
}

fn parse_target(s: &str) -> Result<Target> {
    if s == "point" {
        return Ok(Target::Point);
    }
    if let Some(n) = s.strip_prefix("projective:") {
        let n: u32 = n.parse().with_context(|| format!("bad projective dimension in {s:?}"))?;
        if n == 0 {
            bail!("projective target needs n >= 1");
        }
        return Ok(Target::Projective(n));
    }
    if let Some(path) = s.strip_prefix("custom:") {
        let doc = read_json(&PathBuf::from(path))?;
        return Ok(Target::Custom(KRing::from_json(&doc)?));
    }
    bail!("unknown target {s:?}; expected point, projective:N or custom:PATH")
}

fn read_json(path: &PathBuf) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))
}

/// The table named by `--input`, or an empty table of `--target` (degree-zero
/// values then come from the built-in formulas).
fn load_table(cfg: &RunConfig) -> Result<CorrelatorTable> {
    match &cfg.input {
        Some(path) => Ok(load_correlators(&read_json(path)?)?),
        None => {
            let target = parse_target(&cfg.target)?;
            let rank = target.default_degree_rank();
            Ok(CorrelatorTable::new(target, rank))
        }
    }
}

fn emit(cfg: &RunConfig, doc: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    match &cfg.output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn config_json(cfg: &RunConfig, command: &str, table: &CorrelatorTable) -> Value {
    json!({
        "command": command,
        "target": table.target().to_json(),
        "t_order": cfg.t_order,
        "q_order": cfg.q_order,
        "desc_order": cfg.desc_order,
        "seed": cfg.seed,
    })
}

fn require_t_order(cfg: &RunConfig) -> Result<()> {
    if cfg.t_order < 3 {
        bail!("--t-order must be at least 3 (got {})", cfg.t_order);
    }
    Ok(())
}

fn parse_exponents(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| anyhow!("bad exponent {x:?} in {s:?}")))
        .collect()
}

fn cmd_descendent(cfg: &RunConfig, exponents: Option<&str>) -> Result<u8> {
    let batch: Vec<Vec<u32>> = match (exponents, &cfg.input) {
        (Some(s), None) => vec![parse_exponents(s)?],
        (None, Some(path)) => serde_json::from_value(read_json(path)?)
            .context("batch file must be a JSON array of exponent arrays")?,
        _ => bail!("give either an exponent list or --input, not both"),
    };
    // Validate the whole batch before printing anything.
    let indices = batch.into_iter().map(DescendentIndex::new).collect::<Result<Vec<_>, _>>()?;
    let single = exponents.is_some();
    let mut lines = Vec::new();
    let mut unreduced = 0;
    for idx in &indices {
        let (value, line) = match descendent_euler(idx) {
            Ok(v) => (v.to_string(), json!({"index": idx.exponents(), "value": v.to_string()})),
            Err(DescendentError::NotReducible(_)) => {
                unreduced += 1;
                ("NotReducible".to_string(), json!({"index": idx.exponents(), "value": null, "error": "NotReducible"}))
            }
            Err(e) => return Err(e.into()),
        };
        lines.push(if single { value } else { line.to_string() });
    }
    let mut text = lines.join("\n");
    text.push('\n');
    match &cfg.output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    eprintln!("{} indices, {} not reducible", indices.len(), unreduced);
    Ok(if unreduced > 0 { EXIT_NOT_REDUCIBLE } else { 0 })
}

fn cmd_potential(cfg: &RunConfig) -> Result<u8> {
    require_t_order(cfg)?;
    let table = load_table(cfg)?;
    let p = assemble_potential(&table, cfg.t_order, cfg.q_order)?;
    emit(cfg, &p.series().to_json())?;
    eprintln!("potential with {} terms at orders {}", p.series().num_terms(), p.orders());
    Ok(0)
}

fn cmd_frobenius(cfg: &RunConfig) -> Result<u8> {
    require_t_order(cfg)?;
    let table = load_table(cfg)?;
    let fd = FrobeniusData::build(&assemble_potential(&table, cfg.t_order, cfg.q_order)?)?;
    let report = frobenius_report(&fd)?;
    let mut doc = serde_json::to_value(&report)?;
    doc["config"] = config_json(cfg, "frobenius-check", &table);
    emit(cfg, &doc)?;
    let ok = report.all_zero();
    eprintln!(
        "frobenius-check: {} (product certified to {})",
        if ok { "all residuals zero" } else { "NONZERO residuals" },
        report.certified_orders.product
    );
    Ok(if ok { 0 } else { EXIT_RESIDUAL })
}

fn cmd_qde(cfg: &RunConfig) -> Result<u8> {
    require_t_order(cfg)?;
    let table = load_table(cfg)?;
    let fd = FrobeniusData::build(&assemble_potential(&table, cfg.t_order, cfg.q_order)?)?;
    let sol = assemble_fundamental_solution(&table, cfg.t_order, cfg.q_order, cfg.desc_order)?;
    let report = qde_residual(&sol, &fd)?;
    let mut doc = serde_json::to_value(&report)?;
    doc["config"] = config_json(cfg, "qde-check", &table);
    emit(cfg, &doc)?;
    let ok = report.all_zero() && report.complete;
    eprintln!(
        "qde-check: {} on window {}",
        if ok { "all residuals zero" } else { "NONZERO residuals" },
        report.certified_window
    );
    Ok(if ok { 0 } else { EXIT_RESIDUAL })
}

fn cmd_table(cfg: &RunConfig) -> Result<u8> {
    let table = match &cfg.input {
        Some(path) => load_correlators(&read_json(path)?)?,
        None => beta_zero_table(parse_target(&cfg.target)?, cfg.t_order as usize),
    };
    let report = table_consistency_check(&table);
    let mut doc = serde_json::to_value(&report)?;
    doc["config"] = config_json(cfg, "table-check", &table);
    emit(cfg, &doc)?;
    eprintln!("table-check: {} pairs compared, {} violations", report.checked_pairs, report.violations.len());
    Ok(if report.is_consistent() { 0 } else { EXIT_RESIDUAL })
}

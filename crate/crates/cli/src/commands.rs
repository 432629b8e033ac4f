//! Subcommand implementations. Each returns the process exit status.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use evidence_core::agent::best_response;
use evidence_core::closed_form::optimal_closed_form;
use evidence_core::ic::{ic_check, revelation_transform};
use evidence_core::mechanism::{Mechanism, MechanismRecord};
use evidence_core::outcomes::play;
use evidence_core::sampling::random_params;
use evidence_core::search::{brute_force_optimum, region_csv, welfare, Mode, RegionReport};
use evidence_core::verify::{ids, verify_claims, VerificationReport};
use evidence_core::{Params, RegionLabel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::svg;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("invalid config: {0}")]
    Config(#[from] ConfigError),
    #[error("invalid input: {0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Config(_) | CliError::Input(_) => EXIT_INVALID,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn load_config(path: Option<&Path>) -> CliResult<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => Ok(read(p)?.parse()?),
    }
}

/// A mechanism given as a JSON record or as its integer index.
pub fn load_mechanism(path: &Path) -> CliResult<Mechanism> {
    let text = read(path)?;
    let trimmed = text.trim();
    if let Ok(index) = trimmed.parse::<u32>() {
        return Mechanism::decode(index).map_err(|e| CliError::Input(e.to_string()));
    }
    let record: MechanismRecord = serde_json::from_str(trimmed)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Mechanism::from_record(&record).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    params: &'a Params,
    thresholds: evidence_core::Thresholds,
    closed_form: evidence_core::closed_form::ClosedFormResult,
    strategic: &'a evidence_core::search::OptimumResult,
    no_agency: &'a evidence_core::search::OptimumResult,
    region: &'a RegionReport,
    #[serde(rename = "match")]
    matched: &'static str,
    best_response: evidence_core::agent::AgentStrategy,
    agent_value: evidence_core::Rat,
}

pub fn solve(cfg: &RunConfig, out: Option<&Path>) -> CliResult<u8> {
    let params = cfg.point()?;
    let strategic = brute_force_optimum(&params, Mode::Strategic);
    let no_agency = brute_force_optimum(&params, Mode::NoAgency);
    let region = RegionReport::from_optimum(&params, &strategic);
    let (br, table) = best_response(&params, &strategic.canonical);
    let dist = play(&params, &strategic.canonical, &br);

    println!("{params}");
    println!("label: {}", region.label);
    println!("strategic best_W: {} ({} optimal mechanisms, canonical {})", strategic.best_w, strategic.argmax.len(), region.canonical_index);
    println!("no-agency best_W: {} (canonical {})", no_agency.best_w, no_agency.canonical.encode());
    match region.closed_form_w {
        Some(w) => println!("closed-form W: {w}"),
        None => println!("closed-form W: n/a"),
    }
    println!("match: {}", region.match_field());
    if !region.notes.is_empty() {
        println!("notes: {}", region.notes);
    }
    println!("best response: {}", br.flat_string());

    if let Some(dir) = out {
        let output = SolveOutput {
            params: &params,
            thresholds: params.thresholds(),
            closed_form: optimal_closed_form(&params),
            strategic: &strategic,
            no_agency: &no_agency,
            region: &region,
            matched: region.match_field(),
            best_response: br,
            agent_value: table.v0,
        };
        write(dir, "solve.json", &to_json(&output))?;
        write(dir, "outcomes.csv", &dist.to_csv())?;
        write(dir, "region.csv", &region_csv(std::slice::from_ref(&region)))?;
    }
    Ok(if region.is_mismatch() { EXIT_MISMATCH } else { EXIT_OK })
}

fn print_mechanism_check(params: &Params, mech: &Mechanism) {
    println!("mechanism {}: W {}", mech.encode(), welfare(params, mech, Mode::Strategic));
    match ic_check(params, mech) {
        Ok(rep) => {
            println!("  incentive compatible: {}", rep.is_ic());
            for c in &rep.constraints {
                println!("  {:<24} slack {}", c.name.to_string(), c.slack);
            }
        }
        Err(e) => println!("  {e}"),
    }
    println!("  revelation transform: {}", revelation_transform(params, mech).encode());
}

pub fn verify(cfg: &RunConfig, mechanism: Option<&Path>, out: Option<&Path>) -> CliResult<u8> {
    let mech = mechanism.map(load_mechanism).transpose()?;
    let points: Vec<Params> = if cfg.is_point() {
        vec![cfg.point()?]
    } else {
        if mech.is_some() {
            return Err(CliError::Input("--mechanism needs a single parameter point".into()));
        }
        let (seed, n) = cfg.sampling()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| random_params(&mut rng)).collect()
    };
    let reports: Vec<VerificationReport> = points.par_iter().map(verify_claims).collect();

    if let [single] = reports.as_slice() {
        print!("{single}");
    } else {
        for (i, rep) in reports.iter().enumerate() {
            let failed: Vec<&str> = rep.failures().map(|c| c.id).collect();
            let status = if failed.is_empty() { "ok".to_string() } else { format!("FAIL {}", failed.join(",")) };
            println!("[{i:>3}] {} [{}] {status}", rep.params, rep.label);
        }
    }
    for rep in &reports {
        if let Some(remark) = rep.get(ids::GAMMA_BAR_REMARK).filter(|c| c.passed == Some(false)) {
            println!("{}", remark.detail.split(" (").next().unwrap_or(&remark.detail));
        }
    }
    if let (Some(m), [p]) = (&mech, points.as_slice()) {
        print_mechanism_check(p, m);
    }

    let mut failing: Vec<&str> = reports.iter().flat_map(|r| r.failures().map(|c| c.id)).collect();
    failing.sort_unstable();
    failing.dedup();
    let failed_points = reports.iter().filter(|r| !r.all_passed()).count();
    println!("verified {} point(s), {failed_points} with failures", reports.len());

    if let Some(dir) = out {
        write(dir, "verify.json", &to_json(&reports))?;
    }
    if failing.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("failing claims: {}", failing.join(", "));
        Ok(EXIT_MISMATCH)
    }
}

pub fn regions(cfg: &RunConfig, out: Option<&Path>) -> CliResult<u8> {
    let grid = cfg.grid()?;
    let reports: Vec<RegionReport> = grid.cells.par_iter().map(RegionReport::evaluate).collect();
    let csv = region_csv(&reports);
    match out {
        Some(dir) => {
            write(dir, "regions.csv", &csv)?;
            write(dir, "regions.svg", &svg::heatmap(&grid, &reports))?;
        }
        None => print!("{csv}"),
    }
    let mut counts: Vec<(RegionLabel, usize)> = Vec::new();
    for r in &reports {
        match counts.iter_mut().find(|(l, _)| *l == r.label) {
            Some((_, n)) => *n += 1,
            None => counts.push((r.label, 1)),
        }
    }
    let summary: Vec<String> = counts.iter().map(|(l, n)| format!("{l}={n}")).collect();
    let mismatches = reports.iter().filter(|r| r.is_mismatch()).count();
    eprintln!("{} cells: {}; {mismatches} mismatch(es)", reports.len(), summary.join(" "));
    Ok(if mismatches > 0 { EXIT_MISMATCH } else { EXIT_OK })
}

pub fn show_mech(index: &str, cfg: Option<&RunConfig>) -> CliResult<u8> {
    let index: u32 = index
        .parse()
        .map_err(|_| CliError::Input(format!("`{index}` is not a mechanism index")))?;
    let mech = Mechanism::decode(index).map_err(|e| CliError::Input(e.to_string()))?;
    println!("{}", serde_json::to_string(&mech).expect("serializable"));
    println!("{mech}");
    if let Some(cfg) = cfg {
        let params = cfg.point()?;
        let (br, table) = best_response(&params, &mech);
        println!("best response: {}", br.flat_string());
        println!("agent value: {}", table.v0);
        print_mechanism_check(&params, &mech);
        print!("{}", play(&params, &mech, &br).to_csv());
    }
    Ok(EXIT_OK)
}

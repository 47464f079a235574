use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use defect_tune::dataset::{build_triples, check_reference_counts, load_projects, Schema};
use defect_tune::harness::{emit_reports, read_records, run_plan_with, ExperimentPlan};
use defect_tune::learners::LearnerKind;
use defect_tune::metrics::Goal;
use defect_tune::tuner::DeConfig;

#[derive(Parser)]
#[command(name = "defect-tune", version, about = "Tune defect predictors with differential evolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run tuned and untuned experiments and write reports.
    Run {
        /// Directory of `*.manifest` files, or one manifest file.
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "where,cart,rf,lr")]
        learners: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "prec,f")]
        goals: Vec<String>,
        /// Population size; a comma list runs each value.
        #[arg(long, value_delimiter = ',', default_value = "10")]
        np: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        life: usize,
        #[arg(long, default_value_t = 0.75)]
        f: f64,
        #[arg(long, default_value_t = 0.3)]
        cr: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// Only run these triples (comma separated names).
        #[arg(long, value_delimiter = ',')]
        triples: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate reports from `records.jsonl` in a run directory.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Load every release and compare defect counts with the reference table.
    ValidateData {
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn parse_list<T: FromStr>(items: &[String]) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    let mut out = Vec::new();
    for item in items.iter().filter(|s| !s.trim().is_empty()) {
        out.push(item.parse()?);
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            manifest,
            learners,
            goals,
            np,
            life,
            f,
            cr,
            seed,
            repeats,
            triples,
            out,
        } => {
            let learners: Vec<LearnerKind> = parse_list(&learners)?;
            let goals: Vec<Goal> = parse_list(&goals)?;
            let mut all = Vec::new();
            for releases in load_projects(&manifest, &Schema::default())? {
                all.extend(build_triples(&releases)?);
            }
            if !triples.is_empty() {
                for name in &triples {
                    if !all.iter().any(|t| &t.name == name) {
                        bail!("unknown triple `{name}`");
                    }
                }
                all.retain(|t| triples.contains(&t.name));
            }
            let first_np = *np.first().context("--np needs a value")?;
            let plan = ExperimentPlan {
                triples: all,
                learners,
                goals,
                repeats,
                seed,
                de: DeConfig {
                    np: first_np,
                    f,
                    cr,
                    life,
                },
                nps: np,
            };
            let total = plan.cells().len();
            eprintln!("running {total} cells over {} triples", plan.triples.len());
            let done = std::sync::atomic::AtomicUsize::new(0);
            let records = run_plan_with(&plan, |r| {
                let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                let goal = r.goal.map_or("default".to_string(), |g| g.to_string());
                eprintln!("[{k}/{total}] {} {} {goal} r{}", r.triple, r.learner, r.repeat);
            })?;
            for p in emit_reports(&records, &out)? {
                println!("{}", p.display());
            }
        }
        Command::Report { input } => {
            let records = read_records(input.join("records.jsonl"))?;
            for p in emit_reports(&records, &input)? {
                println!("{}", p.display());
            }
        }
        Command::ValidateData { manifest } => {
            let mut triples = Vec::new();
            for releases in load_projects(&manifest, &Schema::default())? {
                triples.extend(build_triples(&releases)?);
            }
            let mut failures = 0;
            for check in check_reference_counts(&triples) {
                let fmt = |c: &[(usize, usize); 3]| {
                    c.iter().map(|(d, n)| format!("{d}/{n}")).collect::<Vec<_>>().join(" ")
                };
                let status = match check.expected {
                    None => "extra",
                    Some(_) if check.matches() => "ok",
                    Some(_) => {
                        failures += 1;
                        "MISMATCH"
                    }
                };
                let expected = check.expected.as_ref().map_or("-".to_string(), fmt);
                println!("{:<10} {status:<8} observed {}  expected {expected}", check.triple, fmt(&check.observed));
            }
            if failures > 0 {
                bail!("{failures} triple(s) do not match the reference counts");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

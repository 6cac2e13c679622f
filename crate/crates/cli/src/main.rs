mod config;
mod scenarios;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use config::Config;
use scenarios::{Check, Context, Scenario};

#[derive(Parser)]
#[command(name = "hypball", version, about = "Comparison geometry and hyperbolicity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a surface mesh from a [surface] block
    Build(Common),
    /// Ball profile of a surface with the comparison and topology checks
    BallProfile(Common),
    /// Four-point hyperbolicity of a metric
    Delta(Common),
    /// Validate a tree decomposition given by piece labels
    TreeDecomp(Common),
    /// Validate uniform separation of labelled sets
    Separation(Common),
    /// Estimate the handle distance across neighbourhoods of labelled sets
    Dstar(Common),
    /// Compare hyperbolicity of a surface with and without its holes
    SVsSstar(Common),
    /// Plane domain reports
    Domain(Common),
    /// Run every scenario on built-in configurations
    VerifyAll(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance override for the comparison checks
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads (defaults to all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Serialize)]
struct Summary<'a> {
    scenario: &'a str,
    exercises: &'a str,
    seed: u64,
    status: &'a str,
    failures: Vec<&'a str>,
    checks: &'a [Check],
    artifacts: Vec<&'a str>,
    report: &'a Value,
}

fn pretty(v: &impl Serialize) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("serializable");
    out.push(b'\n');
    out
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs one scenario and writes its artifacts and summary; returns whether all checks passed.
fn run(scenario: &Scenario, cfg: &Config, ctx: &Context, out: &Path) -> Result<(bool, Vec<u8>), String> {
    let outcome = (scenario.run)(cfg, ctx)?;
    for (name, bytes) in &outcome.artifacts {
        write(out, name, bytes)?;
    }
    let failures: Vec<&str> = outcome
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    let ok = failures.is_empty();
    let summary = Summary {
        scenario: scenario.name,
        exercises: scenario.exercises,
        seed: ctx.seed,
        status: if ok { "pass" } else { "fail" },
        failures,
        checks: &outcome.checks,
        artifacts: outcome.artifacts.iter().map(|(n, _)| n.as_str()).collect(),
        report: &outcome.report,
    };
    let bytes = pretty(&summary);
    write(out, &format!("{}.json", scenario.name), &bytes)?;
    Ok((ok, bytes))
}

fn failure(scenario: &str, msg: &str, out: &Path) -> ExitCode {
    let bytes = pretty(&json!({ "scenario": scenario, "status": "error", "error": msg }));
    // the failure report is best effort when the output directory itself is the problem
    let _ = write(out, "failure.json", &bytes);
    print!("{}", String::from_utf8_lossy(&bytes));
    ExitCode::from(2)
}

fn verify_all(common: &Common) -> Result<(bool, Vec<u8>), String> {
    if common.config.is_some() {
        return Err("verify-all uses its built-in configurations; --config is not accepted".into());
    }
    let mut results = Vec::new();
    let mut all_ok = true;
    for (name, text) in scenarios::BUILTIN {
        let scenario = scenarios::find(name).expect("built-in scenario exists");
        let cfg = Config::parse(text).expect("built-in config parses");
        let ctx = Context {
            seed: common.seed,
            tol: common.tol,
            base_dir: PathBuf::from("."),
        };
        let status = match run(scenario, &cfg, &ctx, &common.out.join(name)) {
            Ok((ok, _)) => {
                all_ok &= ok;
                if ok { "pass" } else { "fail" }.to_string()
            }
            Err(e) => {
                all_ok = false;
                format!("error: {e}")
            }
        };
        results.push(json!({ "scenario": name, "status": status }));
    }
    let bytes = pretty(&json!({
        "scenario": "verify-all",
        "seed": common.seed,
        "status": if all_ok { "pass" } else { "fail" },
        "scenarios": results,
    }));
    write(&common.out, "verify-all.json", &bytes)?;
    Ok((all_ok, bytes))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match &cli.command {
        Command::Build(c) => ("build", c),
        Command::BallProfile(c) => ("ball-profile", c),
        Command::Delta(c) => ("delta", c),
        Command::TreeDecomp(c) => ("tree-decomp", c),
        Command::Separation(c) => ("separation", c),
        Command::Dstar(c) => ("dstar", c),
        Command::SVsSstar(c) => ("s-vs-sstar", c),
        Command::Domain(c) => ("domain", c),
        Command::VerifyAll(c) => ("verify-all", c),
    };
    if let Some(n) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return failure(name, &e.to_string(), &common.out);
        }
    }
    let result = if name == "verify-all" {
        verify_all(common)
    } else {
        (|| {
            let path = common
                .config
                .as_ref()
                .ok_or_else(|| format!("{name} needs --config <file>"))?;
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let cfg = Config::parse(&text)?;
            let ctx = Context {
                seed: common.seed,
                tol: common.tol,
                base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
            };
            run(scenarios::find(name).expect("known scenario"), &cfg, &ctx, &common.out)
        })()
    };
    match result {
        Ok((ok, bytes)) => {
            print!("{}", String::from_utf8_lossy(&bytes));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => failure(name, &e, &common.out),
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use norman::builtin::{builtin_rulebase, builtin_scenario, SCENARIOS};
use norman::explain::{collect_anomalies, render_report, Format, RenderOptions};
use norman::{
    parse_rulebase, parse_scenario, run_strata, validate_crossrefs, RuleBase, RunOptions, RunStatus, Scenario,
};

const EXIT_ANOMALY: u8 = 0;
const EXIT_NO_ANOMALY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_ENGINE: u8 = 3;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

/// Explain a road accident scenario as violations of driving norms.
#[derive(Debug, Parser)]
#[command(name = "norman", version)]
struct Cli {
    /// Rule base file; defaults to the shipped car-crash rule base.
    #[arg(long, value_name = "FILE")]
    rules: Option<PathBuf>,
    /// Scenario file.
    #[arg(long, value_name = "FILE", conflicts_with = "builtin")]
    scenario: Option<PathBuf>,
    /// Name of a shipped scenario.
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Print the derivation tree of each anomaly.
    #[arg(long)]
    trace: bool,
    /// Enumerate extensions and report each one.
    #[arg(long)]
    all_extensions: bool,
    /// Run one global fixpoint instead of layer by layer.
    #[arg(long)]
    no_strata: bool,
    #[arg(long, value_name = "N", default_value_t = 8)]
    max_extensions: usize,
    /// Only parse and validate the inputs.
    #[arg(long)]
    check: bool,
}

fn read(path: &Path) -> Result<String, u8> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        EXIT_INPUT
    })
}

fn load_rules(cli: &Cli) -> Result<RuleBase, u8> {
    let Some(path) = &cli.rules else {
        return Ok(builtin_rulebase());
    };
    parse_rulebase(&read(path)?).map_err(|e| {
        for d in &e.diagnostics {
            eprintln!("{}:{d}", path.display());
        }
        EXIT_INPUT
    })
}

fn load_scenario(cli: &Cli) -> Result<Option<Scenario>, u8> {
    if let Some(name) = &cli.builtin {
        let Some(s) = builtin_scenario(name) else {
            let names: Vec<&str> = SCENARIOS.iter().map(|(n, _)| *n).collect();
            eprintln!("unknown built-in scenario `{name}`; available: {}", names.join(", "));
            return Err(EXIT_INPUT);
        };
        return Ok(Some(s));
    }
    let Some(path) = &cli.scenario else {
        return Ok(None);
    };
    parse_scenario(&read(path)?).map(Some).map_err(|e| {
        for d in &e.diagnostics {
            eprintln!("{}:{d}", path.display());
        }
        EXIT_INPUT
    })
}

fn run(cli: &Cli) -> Result<u8, u8> {
    let rb = load_rules(cli)?;
    let scenario = load_scenario(cli)?;
    let Some(scenario) = scenario else {
        if cli.check {
            return Ok(0);
        }
        eprintln!("a scenario is required: pass --scenario <FILE> or --builtin <NAME>");
        return Err(EXIT_INPUT);
    };
    let diags = validate_crossrefs(&rb, &scenario);
    if !diags.is_empty() {
        let origin = cli.scenario.as_ref().map_or_else(|| "<builtin>".to_string(), |p| p.display().to_string());
        for d in &diags {
            eprintln!("{origin}:{d}");
        }
        return Err(EXIT_INPUT);
    }
    if cli.check {
        return Ok(0);
    }

    let opts = RunOptions {
        strata: !cli.no_strata,
        all_extensions: cli.all_extensions,
        max_extensions: cli.max_extensions,
        ..RunOptions::default()
    };
    let result = run_strata(&rb, &scenario, &opts).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_ENGINE
    })?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let reports = collect_anomalies(&result);
    let format = match cli.format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Json => Format::Json,
    };
    let render = RenderOptions { trace: cli.trace, per_extension: cli.all_extensions };
    print!("{}", render_report(&result, &reports, format, render));
    Ok(match result.status {
        RunStatus::AnomalyFound => EXIT_ANOMALY,
        RunStatus::NoAnomaly => EXIT_NO_ANOMALY,
        RunStatus::InconsistentFacts => {
            if let Some(c) = &result.conflict {
                eprintln!("error: inconsistent facts: {c}");
            }
            EXIT_ENGINE
        }
        RunStatus::ExtensionLimitHit => {
            eprintln!("error: stopped after {} extensions without finding an anomaly", cli.max_extensions);
            EXIT_ENGINE
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    ExitCode::from(run(&cli).unwrap_or_else(|code| code))
}

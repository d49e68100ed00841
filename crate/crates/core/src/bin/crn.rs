use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crn_core::decomp::finest_independent_decomposition;
use crn_core::depone::{check_deficiency_one, check_mass_action};
use crn_core::equilib::{solve_equilibrium, ClassKind};
use crn_core::netio::{build_report, emit_report, emit_salt_report, parse_document, salt_report, Format};
use crn_core::network::MassActionSystem;
use crn_core::ratlin::parse_rat;
use crn_core::verify::verify_network;
use crn_core::Error;

/// Structural analysis, uniqueness verdicts and equilibria of mass-action
/// reaction networks.
#[derive(Parser)]
#[command(name = "crn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deficiency, dependency and the finest independent decomposition.
    Analyze {
        /// Network file (DSL or JSON); `-` reads stdin.
        file: String,
        #[arg(long)]
        json: bool,
    },
    /// Evaluates a theorem. Exit code 0 pass, 2 fail, 3 not applicable.
    Check {
        file: String,
        #[arg(long, value_enum)]
        theorem: Theorem,
        /// Override a rate constant, e.g. `--k k15=4`; repeatable.
        #[arg(long = "k", value_name = "NAME=VALUE")]
        rates: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Computes the unique positive equilibrium in the anchor's class.
    Solve {
        file: String,
        /// Positive anchor point, e.g. `X1=1,X2=2`, or values in species order.
        #[arg(long)]
        anchor: String,
        #[arg(long, value_enum, default_value = "stoich")]
        class: ClassArg,
        #[arg(long = "k", value_name = "NAME=VALUE")]
        rates: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Partial-sum certificates for the terminal strong components.
    Salt {
        file: String,
        #[arg(long = "k", value_name = "NAME=VALUE")]
        rates: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Randomized self-checks with random rates and anchors.
    Verify {
        file: String,
        /// Number of random trials.
        #[arg(long, default_value_t = 100)]
        fuzz: usize,
        /// RNG seed; the `CRN_SEED` environment variable takes precedence.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    Dep1,
    Def1,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Stoich,
    Kinetic,
}

fn format(json: bool) -> Format {
    if json {
        Format::Json
    } else {
        Format::Text
    }
}

fn load(file: &str, rates: &[String]) -> Result<MassActionSystem, Error> {
    let text = if file == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::InvalidNetwork(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(file).map_err(|e| Error::InvalidNetwork(format!("{file}: {e}")))?
    };
    let doc = parse_document(&text)?;
    for (line, msg) in &doc.diagnostics {
        if *line == 0 {
            eprintln!("warning: {msg}");
        } else {
            eprintln!("warning: line {line}: {msg}");
        }
    }
    let mut overrides = Vec::new();
    for item in rates.iter().flat_map(|r| r.split(',')) {
        let (name, value) =
            item.split_once('=').ok_or_else(|| Error::InvalidNetwork(format!("expected NAME=VALUE, got `{item}`")))?;
        overrides.push((name.trim().to_string(), parse_rat(value)?));
    }
    doc.system.with_rates(&overrides)
}

fn parse_anchor(text: &str, species: &[String]) -> Result<Vec<f64>, Error> {
    let bad = |msg: String| Error::Dimension(format!("anchor: {msg}"));
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(format!("`{s}` is not a number")));
    let values = if items.iter().all(|s| !s.contains('=')) {
        items.iter().map(|s| number(s)).collect::<Result<Vec<_>, _>>()?
    } else {
        let mut values = vec![None; species.len()];
        for item in &items {
            let (name, value) = item.split_once('=').ok_or_else(|| bad(format!("mixed forms in `{item}`")))?;
            let name = name.trim();
            let idx = species
                .iter()
                .position(|s| s == name)
                .or_else(|| species.iter().position(|s| s.eq_ignore_ascii_case(name)))
                .ok_or_else(|| bad(format!("unknown species `{name}`")))?;
            values[idx] = Some(number(value)?);
        }
        values
            .into_iter()
            .zip(species)
            .map(|(v, s)| v.ok_or_else(|| bad(format!("missing value for `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?
    };
    if values.len() != species.len() {
        return Err(bad(format!("expected {} values, got {}", species.len(), values.len())));
    }
    Ok(values)
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Analyze { file, json } => {
            let sys = load(&file, &[])?;
            emit(&emit_report(&build_report(&sys), format(json)));
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { file, theorem, rates, json } => {
            let sys = load(&file, &rates)?;
            let dec = finest_independent_decomposition(&sys);
            let verdict = match theorem {
                Theorem::Dep1 => check_mass_action(&dec),
                Theorem::Def1 => check_deficiency_one(&dec),
            };
            let code = verdict.outcome().exit_code();
            let mut report = build_report(&sys);
            report.verdicts.push(verdict);
            emit(&emit_report(&report, format(json)));
            Ok(ExitCode::from(code as u8))
        }
        Command::Solve { file, anchor, class, rates, json } => {
            let sys = load(&file, &rates)?;
            let anchor = parse_anchor(&anchor, sys.network().species())?;
            let dec = finest_independent_decomposition(&sys);
            let verdict = check_mass_action(&dec);
            let kind = match class {
                ClassArg::Stoich => ClassKind::Stoichiometric,
                ClassArg::Kinetic => ClassKind::Kinetic,
            };
            let mut report = build_report(&sys);
            let result = solve_equilibrium(&sys, &dec, &verdict, &anchor, kind);
            report.verdicts.push(verdict);
            match result {
                Ok(eq) => {
                    report.equilibrium = Some((&eq).into());
                    emit(&emit_report(&report, format(json)));
                    Ok(ExitCode::SUCCESS)
                }
                Err(e @ Error::Refused(_)) => {
                    emit(&emit_report(&report, format(json)));
                    eprintln!("error: {e}");
                    Ok(ExitCode::from(2))
                }
                Err(e) => Err(e),
            }
        }
        Command::Salt { file, rates, json } => {
            let sys = load(&file, &rates)?;
            match salt_report(&sys) {
                Ok(r) => {
                    emit(&emit_salt_report(&r, format(json)));
                    Ok(ExitCode::SUCCESS)
                }
                Err(e @ Error::Salt(_)) => {
                    eprintln!("error: {e}");
                    Ok(ExitCode::from(2))
                }
                Err(e) => Err(e),
            }
        }
        Command::Verify { file, fuzz, seed } => {
            let sys = load(&file, &[])?;
            let seed = match std::env::var("CRN_SEED") {
                Ok(s) => s.trim().parse().map_err(|_| Error::InvalidNetwork(format!("CRN_SEED `{s}` is not a u64")))?,
                Err(_) => seed,
            };
            let report = verify_network(&sys, fuzz, seed);
            let mut out = format!("seed = {seed}, trials = {fuzz}\n");
            for c in &report.checks {
                let status = if c.failed > 0 { "FAIL" } else { "ok" };
                out.push_str(&format!("[{status}] {}: {} passed, {} failed, {} skipped\n", c.name, c.passed, c.failed, c.skipped));
                if let Some(msg) = &c.first_failure {
                    out.push_str(&format!("       first failure: {msg}\n"));
                }
            }
            emit(&out);
            Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

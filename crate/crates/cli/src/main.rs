use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use morrey_core::discretize::GridFunction;
use morrey_core::harness::{run, run_report, summarize, write_csv, Agreement, ExperimentConfig, ExperimentRow};
use morrey_core::maximal::{maximal_fast, MaximalConfig};
use morrey_core::morrey::{morrey_norm, MorreyParams, Normalization};
use morrey_core::weights::Weight;

#[derive(Parser)]
#[command(name = "morrey", version, about = "Weighted Morrey space experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override a config entry, e.g. `--set grid.samples=4096` or `--set beta=[0,1]`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Morrey norms of the configured witnesses, or of a grid function from CSV.
    Norm {
        #[command(flatten)]
        common: Common,
        /// Grid function CSV (`x,value` or `x,y,value`).
        #[arg(long)]
        function: Option<PathBuf>,
    },
    /// Maximal-range experiment, or the maximal function of a CSV grid function.
    Maximal {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        function: Option<PathBuf>,
        /// Where to write `Mf` when `--function` is given; stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the configured experiment and prints CSV rows, or writes the
    /// report when the config names an output.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Runs the configured experiment and prints the agreement summary.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Runs the configured experiment and writes `<out>.csv` and `<out>.json`.
    Report {
        #[command(flatten)]
        common: Common,
        /// Report prefix; defaults to the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_sets(sets: &[String]) -> Result<Vec<(String, String)>> {
    sets.iter()
        .map(|s| {
            let (k, v) = s.split_once('=').with_context(|| format!("`{s}` is not KEY=VALUE"))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn load(common: &Common, extra: &[(&str, &str)]) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(&common.config)
        .with_context(|| format!("reading {}", common.config.display()))?;
    let mut sets: Vec<(String, String)> = extra.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    sets.extend(parse_sets(&common.set)?);
    ExperimentConfig::from_json_with_overrides(&text, &sets).context("invalid configuration")
}

fn read_function(path: &Path) -> Result<GridFunction> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    GridFunction::read_csv(BufReader::new(f)).with_context(|| format!("parsing {}", path.display()))
}

fn print_rows(rows: &[ExperimentRow]) -> Result<()> {
    let stdout = io::stdout();
    write_csv(rows, stdout.lock())?;
    Ok(())
}

fn status(rows: &[ExperimentRow]) -> ExitCode {
    let bad = rows.iter().filter(|r| r.agreement == Agreement::Disagree).count();
    if bad > 0 {
        log::warn!("{bad} rows disagree with the analytic verdict");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn function_norms(cfg: &ExperimentConfig, f: &GridFunction) -> Result<()> {
    let mut w = io::stdout().lock();
    writeln!(w, "p,lambda1,lambda2,beta,alpha,value,argmax_x,argmax_y,argmax_radius")?;
    for c in cfg.cells() {
        let params = MorreyParams::new(c.p, c.lambda1, c.lambda2, f.spec().n())?;
        let weight =
            if c.alpha == 0.0 { Weight::power(c.beta, params.n)? } else { Weight::shifted(c.alpha, c.beta, params.n)? };
        let est = morrey_norm(f, &weight, &params, &cfg.family, Normalization::RadiusPower)?;
        let (x, y, r) = est.argmax_ball.map_or((f64::NAN, f64::NAN, f64::NAN), |b| (b.center[0], b.center[1], b.radius));
        writeln!(w, "{},{},{},{},{},{},{x},{y},{r}", c.p, c.lambda1, c.lambda2, c.beta, c.alpha, est.value)?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Norm { common, function } => {
            let cfg = load(&common, &[("experiment", "norm")])?;
            if let Some(path) = function {
                function_norms(&cfg, &read_function(&path)?)?;
                return Ok(ExitCode::SUCCESS);
            }
            let rows = run(&cfg)?;
            print_rows(&rows)?;
            Ok(status(&rows))
        }
        Command::Maximal { common, function, out } => {
            let cfg = load(&common, &[("experiment", "maximal-range")])?;
            if let Some(path) = function {
                let f = read_function(&path)?;
                let mf = maximal_fast(&f, &MaximalConfig::for_dim(f.spec().n()))?;
                match out {
                    Some(o) => mf.write_csv(File::create(&o).with_context(|| format!("creating {}", o.display()))?)?,
                    None => mf.write_csv(io::stdout().lock())?,
                }
                return Ok(ExitCode::SUCCESS);
            }
            let rows = run(&cfg)?;
            print_rows(&rows)?;
            Ok(status(&rows))
        }
        Command::Sweep { common } => {
            let cfg = load(&common, &[])?;
            let rows = run(&cfg)?;
            match &cfg.output {
                Some(o) => {
                    let (csv, json) = run_report(&rows, Path::new(o))?;
                    log::info!("wrote {} and {}", csv.display(), json.display());
                }
                None => print_rows(&rows)?,
            }
            Ok(status(&rows))
        }
        Command::Verify { common } => {
            let cfg = load(&common, &[])?;
            let rows = run(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&summarize(&rows))?);
            for r in rows.iter().filter(|r| r.agreement == Agreement::Disagree) {
                eprintln!(
                    "disagree: p={} lambda=({}, {}) beta={} witness={} verdict={} {}",
                    r.p, r.lambda1, r.lambda2, r.beta, r.witness, r.analytic_verdict, r.note
                );
            }
            Ok(status(&rows))
        }
        Command::Report { common, out } => {
            let cfg = load(&common, &[])?;
            let Some(prefix) = out.or_else(|| cfg.output.as_ref().map(PathBuf::from)) else {
                bail!("no report path: pass --out or set `output` in the config");
            };
            let rows = run(&cfg)?;
            let (csv, json) = run_report(&rows, &prefix)?;
            println!("{}\n{}", csv.display(), json.display());
            Ok(status(&rows))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

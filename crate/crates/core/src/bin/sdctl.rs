use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spectral_dynamics::harness::{run, ExperimentConfig, ExperimentId, EXIT_ERROR};

/// Runs one experiment and writes data.csv, plot.svg, manifest.txt and
/// bounds.txt under <outdir>/<id>/.
///
/// Exit status: 0 when every property holds, 2 on a property violation,
/// 1 on error.
#[derive(Parser, Debug)]
#[command(name = "sdctl", version)]
struct Cli {
    /// fig1a | fig1b | fig2a | fig2b | figA1 | sandwich | bounds
    experiment: String,

    /// key=value config file; flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Config overrides as `--key value` pairs (e.g. `--n 200 --seeds 1,2`).
    #[arg(
        trailing_var_arg = true,
        allow_hyphen_values = true,
        value_name = "--KEY VALUE"
    )]
    overrides: Vec<String>,
}

fn pairs(args: &[String]) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| format!("expected `--key`, got `{flag}`"))?;
        if let Some((k, v)) = key.split_once('=') {
            out.push((k.to_string(), v.to_string()));
            continue;
        }
        let value = it
            .next()
            .ok_or_else(|| format!("missing value for `--{key}`"))?;
        out.push((key.to_string(), value.clone()));
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| -> Result<u8, String> {
        let id: ExperimentId = cli.experiment.parse().map_err(|e| format!("{e}"))?;
        let overrides = pairs(&cli.overrides)?;
        let config = ExperimentConfig::resolve(id, cli.config.as_deref(), &overrides)
            .map_err(|e| e.to_string())?;
        let outcome = run(&config).map_err(|e| e.to_string())?;
        for c in &outcome.checks {
            let verdict = if c.passed { "pass" } else { "FAIL" };
            println!("{verdict:4} {:28} {}", c.name, c.detail);
        }
        println!(
            "{} finished in {:.2}s -> {}",
            outcome.id,
            outcome.seconds,
            outcome.dir.display()
        );
        Ok(outcome.exit_code())
    })();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("sdctl: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

//! Reproducible experiment runs: each writes `data.csv`, `plot.svg`,
//! `manifest.txt` and, where applicable, `bounds.txt` under
//! `<outdir>/<id>/`.

mod config;
mod experiments;
mod svg;

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

pub use config::{ExperimentConfig, ExperimentId};
pub use experiments::{
    corollary_table, fig2b_curves, log_slope, sandwich_steps, Fig2bCurves, SandwichStep,
};
pub use svg::{parse_svg_points, render_svg, write_svg, Axes, Series};

use crate::error::Result;
use crate::io::key_values;

/// Exit status for a run whose properties all held.
pub const EXIT_PASS: u8 = 0;
/// Exit status for an error (bad config, I/O, numerical failure).
pub const EXIT_ERROR: u8 = 1;
/// Exit status for a completed run with at least one failed property.
pub const EXIT_VIOLATION: u8 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub id: ExperimentId,
    pub dir: PathBuf,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_VIOLATION
        }
    }
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let dir = config.outdir.join(config.id.as_str());
    fs::create_dir_all(&dir)?;
    let start = Instant::now();
    let art = match config.id {
        ExperimentId::Fig1a => experiments::fig1a(config)?,
        ExperimentId::Fig1b => experiments::fig1b(config)?,
        ExperimentId::Fig2a => experiments::fig2a(config)?,
        ExperimentId::Fig2b => experiments::fig2b(config)?,
        ExperimentId::FigA1 => experiments::fig_a1(config)?,
        ExperimentId::Sandwich => experiments::sandwich(config)?,
        ExperimentId::Bounds => experiments::bounds(config)?,
    };
    let seconds = start.elapsed().as_secs_f64();
    art.table.write(&dir.join("data.csv"))?;
    write_svg(&art.series, &art.axes, &dir.join("plot.svg"))?;
    if let Some(b) = &art.bounds {
        fs::write(dir.join("bounds.txt"), b)?;
    }
    let mut manifest = config.echo();
    manifest.push(("version", env!("CARGO_PKG_VERSION").to_string()));
    manifest.push(("wall_clock_s", format!("{seconds:.3}")));
    for c in &art.checks {
        let verdict = if c.passed { "pass" } else { "FAIL" };
        manifest.push((
            "check",
            format!("{} {verdict} {}", c.name, c.detail)
                .trim_end()
                .to_string(),
        ));
    }
    fs::write(dir.join("manifest.txt"), key_values(&manifest))?;
    Ok(RunOutcome {
        id: config.id,
        dir,
        checks: art.checks,
        seconds,
    })
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use majorasim_cli::{expand, run, ScenarioKind, Sweep, Variant};
use rayon::prelude::*;

/// Simulate braiding of Majorana zero modes in Kitaev wire networks.
#[derive(Debug, Parser)]
#[command(name = "majorasim", version)]
struct Cli {
    /// braid, braid-word, deutsch-jozsa or spectrum
    scenario: ScenarioKind,
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's `output`, else out/<scenario>)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run once per value: key=v1,v2,... (repeatable, dotted keys)
    #[arg(long)]
    sweep: Vec<Sweep>,
}

fn threads() -> Option<usize> {
    std::env::var("MAJORASIM_THREADS")
        .ok()?
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

fn run_variant(v: &Variant, root: &std::path::Path) -> Result<bool> {
    let outcome = run(&v.config).with_context(|| {
        format!(
            "running {}",
            if v.label.is_empty() {
                "config"
            } else {
                &v.label
            }
        )
    })?;
    let dir = if v.label.is_empty() {
        root.to_path_buf()
    } else {
        root.join(&v.label)
    };
    outcome.write(&dir)?;
    for c in &outcome.summary.checks {
        log::info!(
            "{} {}: {:.3e} (tolerance {:.1e})",
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        );
    }
    if let Some(w) = &outcome.summary.word {
        println!(
            "word: {} (operator order {})",
            w.time_order, w.operator_order
        );
    }
    println!(
        "{}: consistency {}, predictions {} -> {}",
        if v.label.is_empty() {
            outcome.summary.scenario.as_str()
        } else {
            &v.label
        },
        if outcome.summary.consistent {
            "ok"
        } else {
            "FAILED"
        },
        if outcome.summary.predictions_pass {
            "ok"
        } else {
            "FAILED"
        },
        dir.display()
    );
    Ok(outcome.summary.consistent)
}

fn main_inner(cli: Cli) -> Result<bool> {
    let variants = expand(&cli.config, &cli.sweep)?;
    let first = &variants[0].config;
    if first.scenario != cli.scenario {
        bail!(
            "config {} describes scenario {}, not {}",
            cli.config.display(),
            first.scenario.name(),
            cli.scenario.name()
        );
    }
    let root = cli
        .out
        .or_else(|| first.output.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(cli.scenario.name()));
    let results: Vec<Result<bool>> = if variants.len() == 1 {
        vec![run_variant(&variants[0], &root)]
    } else {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads() {
            builder = builder.num_threads(n);
        }
        let pool = builder.build()?;
        pool.install(|| variants.par_iter().map(|v| run_variant(v, &root)).collect())
    };
    let mut ok = true;
    for r in results {
        ok &= r?;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

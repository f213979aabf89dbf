use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use log::info;
use projective_energy::constructions::{standard_map, CATALOG};
use projective_energy::flow::{flow_minimize, FlowOptions, MeshMap};
use projective_energy::report::{
    self, read_suite_config, run_experiment, run_suite, ExperimentConfig, ExperimentReport, EXPERIMENTS,
};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "pelab", version, about = "Energies of maps between projective spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one named experiment.
    Verify {
        experiment: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
        /// Extra experiment parameter as key=value, the value parsed as JSON when possible.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Write the report array as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the CSV twin of the report.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run every experiment listed in a JSON config, or all of them with `--all`.
    Suite {
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "config")]
        all: bool,
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Inspect the map catalog and the experiment list.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Discrete harmonic map flow on an icosphere mesh.
    Flow {
        #[arg(long, default_value_t = 4)]
        mesh_level: usize,
        #[arg(long, default_value_t = 3000)]
        steps: usize,
        #[arg(long, default_value = "perturbed(S2,0.2)")]
        map: String,
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        /// Directory for log.csv, vertices.csv and triangles.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    List,
    Experiments,
}

fn parse_param(s: &str) -> Result<(String, Value)> {
    let Some((k, v)) = s.split_once('=') else {
        bail!("parameter {s} is not of the form key=value");
    };
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.to_string(), value))
}

fn emit(reports: &[ExperimentReport], out: Option<&Path>, csv: Option<&Path>) -> Result<bool> {
    for r in reports {
        let status = if r.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<22} estimate {:.6e} reference {:.6e} rel err {:.2e} ({:.1}s)",
            r.name, r.estimate, r.reference, r.rel_error, r.wall_time_s
        );
        if let Some(e) = &r.error {
            println!("    error: {e}");
        }
        for c in r.failed_checks() {
            println!("    failed: {} ({:.6e} vs {:.6e})", c.label, c.estimate, c.reference);
        }
    }
    if let Some(p) = out {
        report::write_json(
            reports,
            BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        )?;
    }
    if let Some(p) = csv {
        report::write_csv(
            reports,
            BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        )?;
    }
    Ok(reports.iter().all(|r| r.pass))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify {
            experiment,
            seed,
            resolution,
            p,
            tolerance,
            params,
            out,
            csv,
        } => {
            let mut cfg = ExperimentConfig::default();
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.resolution = resolution;
            cfg.p = p;
            cfg.tolerance = tolerance;
            for s in &params {
                let (k, v) = parse_param(s)?;
                cfg.extra.insert(k, v);
            }
            let r = run_experiment(&experiment, &cfg)?;
            emit(&[r], out.as_deref(), csv.as_deref())
        }
        Command::Suite {
            config,
            all,
            parallel,
            out,
            csv,
        } => {
            let cfg = match (config, all) {
                (Some(path), _) => read_suite_config(&path)?,
                (None, true) => report::default_suite(),
                (None, false) => bail!("give a config file or --all"),
            };
            let reports = run_suite(&cfg, parallel)?;
            let ok = emit(&reports, out.as_deref(), csv.as_deref())?;
            println!(
                "{} of {} experiments passed",
                reports.iter().filter(|r| r.pass).count(),
                reports.len()
            );
            Ok(ok)
        }
        Command::Corpus { action } => {
            let mut stdout = io::stdout().lock();
            match action {
                CorpusAction::List => {
                    for e in CATALOG {
                        writeln!(stdout, "{:<52} {}", e.key, e.description)?;
                    }
                }
                CorpusAction::Experiments => {
                    for e in EXPERIMENTS {
                        writeln!(stdout, "{:<22} {}", e.name, e.description)?;
                    }
                }
            }
            Ok(true)
        }
        Command::Flow {
            mesh_level,
            steps,
            map,
            step,
            tolerance,
            out,
        } => {
            let f = standard_map::<f64>(&map)?;
            let mesh = MeshMap::sample(&f, mesh_level)?;
            let d0 = mesh.conformality_defect().value;
            info!("{} vertices, {} triangles", mesh.vertices.len(), mesh.triangles.len());
            let r = flow_minimize(
                &mesh,
                FlowOptions {
                    step,
                    iterations: steps,
                    tolerance,
                },
            )?;
            let first = &r.log[0];
            let last = r.log.last().expect("flow log is never empty");
            println!("iterations {} stop {:?}", r.log.len() - 1, r.stop);
            println!("energy {:.8} -> {:.8}", first.energy, last.energy);
            println!("conformality defect {:.4e} -> {:.4e}", d0, last.defect);
            println!("sup tension {:.4e}", last.tension);
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                r.write_log(BufWriter::new(File::create(dir.join("log.csv"))?))?;
                r.map.write_csv(
                    BufWriter::new(File::create(dir.join("vertices.csv"))?),
                    BufWriter::new(File::create(dir.join("triangles.csv"))?),
                )?;
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

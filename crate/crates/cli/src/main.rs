use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use evac_core::bounds::{lemma_suite, ub_gap};
use evac_core::engine::trace::trace_json;
use evac_core::strategies::n_robot_deployment;
use evac_core::verify::{
    bound_for, figure1_table, fmt12, linspace, oracle_simulate, sweep, write_figure1_csv, write_sweep_row,
};
use evac_core::{simulate, Configuration, Model};

#[derive(Parser, Debug)]
#[command(name = "evac", version, about = "Two-robot treasure evacuation on the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one configuration and optionally write its trace.
    Simulate {
        #[arg(long)]
        model: Model,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        exit: String,
        /// +1 puts the treasure clockwise of the exit, -1 counter-clockwise.
        #[arg(long, default_value = "+1", allow_hyphen_values = true)]
        orient: i8,
        /// Also run the fixed-step oracle with this step.
        #[arg(long)]
        dt: Option<f64>,
        /// Trace JSON destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Worst-case evacuation time over exit placements, one row per alpha.
    Sweep {
        #[arg(long)]
        model: Model,
        /// Comma list or `lo:hi:n`; `pi` is accepted.
        #[arg(long, allow_hyphen_values = true)]
        alphas: String,
        #[arg(long, default_value_t = 8192)]
        grid: usize,
        #[arg(long, default_value_t = 40)]
        refine: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Upper and lower bound curves.
    Bounds {
        #[arg(long, allow_hyphen_values = true)]
        alphas: String,
        /// Append the f2f minus wireless gap column.
        #[arg(long)]
        gap: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid check of the appendix inequalities.
    Lemmas {
        #[arg(long, default_value_t = 20001)]
        grid: usize,
    },
    /// Start angles for an even team split into pairs.
    Deploy {
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
}

/// Parses `1.5`, `pi`, `2pi/3`, `2*pi/3`, `-pi/4`.
fn parse_angle(s: &str) -> Result<f64> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num = {
        let (neg, body) = match num.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, num),
        };
        let v = if let Some(k) = body.strip_suffix("pi") {
            let k = k.trim_end_matches('*').trim();
            let k: f64 = if k.is_empty() {
                1.0
            } else {
                k.parse().with_context(|| format!("bad angle `{s}`"))?
            };
            k * PI
        } else {
            body.parse().with_context(|| format!("bad angle `{s}`"))?
        };
        if neg {
            -v
        } else {
            v
        }
    };
    let v = match den {
        Some(d) => {
            let d: f64 = d.parse().with_context(|| format!("bad angle `{s}`"))?;
            ensure!(d != 0.0, "bad angle `{s}`: division by zero");
            num / d
        }
        None => num,
    };
    ensure!(v.is_finite(), "bad angle `{s}`");
    Ok(v)
}

/// Comma list of angles or an inclusive range `lo:hi:n` with `n + 1` points.
fn parse_alphas(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let alphas = match parts.as_slice() {
        [lo, hi, n] => {
            let n: usize = n.trim().parse().with_context(|| format!("bad step count in `{s}`"))?;
            linspace(parse_angle(lo)?, parse_angle(hi)?, n)
        }
        [_] => s.split(',').map(parse_angle).collect::<Result<_>>()?,
        _ => bail!("alpha range must be `lo:hi:n`, got `{s}`"),
    };
    for &a in &alphas {
        ensure!((0.0..=PI).contains(&a), "alpha {a} outside [0, π]");
    }
    Ok(alphas)
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("EVAC_THREADS") {
        let n: usize = v.parse().with_context(|| format!("EVAC_THREADS must be a positive integer, got `{v}`"))?;
        ensure!(n > 0, "EVAC_THREADS must be a positive integer, got `{v}`");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate { model, alpha, exit, orient, dt, out } => {
            let cfg = Configuration::new(model, parse_angle(&alpha)?, parse_angle(&exit)?, orient);
            let r = simulate(cfg)?;
            println!("evac_time {}", fmt12(r.evac_time));
            println!("bound {}", fmt12(bound_for(model, cfg.alpha)));
            if let Some(dt) = dt {
                println!("oracle {}", fmt12(oracle_simulate(cfg, dt)?));
            }
            if let Some(p) = out {
                let mut w = sink(&Some(p))?;
                serde_json::to_writer_pretty(&mut w, &trace_json(&r))?;
                writeln!(w)?;
                w.flush()?;
            }
            Ok(true)
        }
        Command::Sweep { model, alphas, grid, refine, format, out } => {
            let alphas = parse_alphas(&alphas)?;
            ensure!(grid >= 256, "grid must be at least 256, got {grid}");
            configure_threads()?;
            let mut w = sink(&out)?;
            let mut all_ok = true;
            let mut rows = Vec::new();
            if let Format::Csv = format {
                writeln!(w, "alpha,max_time,bound,argmax_exit_angle,ub_ok,tight")?;
            }
            for a in alphas {
                let r = match sweep(model, a, grid, refine) {
                    Ok(r) => r,
                    Err(e) => {
                        w.flush()?;
                        return Err(e.into());
                    }
                };
                all_ok &= r.ub_ok;
                match format {
                    Format::Csv => {
                        write_sweep_row(&mut w, &r)?;
                        w.flush()?;
                    }
                    Format::Json => rows.push(r),
                }
            }
            if let Format::Json = format {
                serde_json::to_writer_pretty(&mut w, &rows)?;
                writeln!(w)?;
            }
            w.flush()?;
            if !all_ok {
                eprintln!("error: sweep maximum exceeds the upper bound for at least one alpha");
            }
            Ok(all_ok)
        }
        Command::Bounds { alphas, gap, format, out } => {
            let rows = figure1_table(&parse_alphas(&alphas)?);
            let ordered = rows
                .iter()
                .all(|r| r[3] <= r[1] + 1e-12 && r[1] <= r[2] + 1e-12);
            let mut w = sink(&out)?;
            match format {
                Format::Csv => write_figure1_csv(&mut w, &rows, gap)?,
                Format::Json => {
                    let doc: Vec<_> = rows
                        .iter()
                        .map(|r| {
                            let mut m = serde_json::json!({
                                "alpha": r[0], "wireless_ub": r[1], "f2f_ub": r[2], "f2f_lb": r[3],
                            });
                            if gap {
                                m["ub_gap"] = ub_gap(r[0]).into();
                            }
                            m
                        })
                        .collect();
                    serde_json::to_writer_pretty(&mut w, &doc)?;
                    writeln!(w)?;
                }
            }
            w.flush()?;
            if !ordered {
                eprintln!("error: curve ordering f2f_lb <= wireless_ub <= f2f_ub violated");
            }
            Ok(ordered)
        }
        Command::Lemmas { grid } => {
            let reports = lemma_suite(grid)?;
            let mut all = true;
            for r in &reports {
                all &= r.pass;
                println!(
                    "({}) {} min slack {:+.3e} at alpha={:.7}",
                    r.item,
                    if r.pass { "pass" } else { "FAIL" },
                    r.min_slack,
                    r.argmin_alpha
                );
                if let Some(n) = &r.note {
                    println!("    {n}");
                }
            }
            println!("{} of {} items pass", reports.iter().filter(|r| r.pass).count(), reports.len());
            Ok(all)
        }
        Command::Deploy { n } => {
            let plan = n_robot_deployment(n)?;
            for (k, a) in plan.pair_starts.iter().enumerate() {
                println!("pair {k}: start {:.7}", a.radians());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

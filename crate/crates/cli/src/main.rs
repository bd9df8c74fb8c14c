//! Batch front end: reads a declarative TOML config and runs overlap
//! evaluations, parameter sweeps, orthogonality searches, causal
//! classification, Bell reports, and brute-force oracle validation.
//!
//! Exit codes: 0 success, 1 failed oracle checks, 2 config/usage errors,
//! 3 numeric failures (non-convergence, degenerate points).

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use cavity_switch::entanglement::protocol_bell_report;
use cavity_switch::kinematics::classify_separation;
use cavity_switch::optimize::nelder_mead;
use cavity_switch::oracle::checks::run_checks;
use cavity_switch::perturbation::overlap;
use cavity_switch::Error;

use config::{ParamName, Point, RunConfig};

/// Environment variable holding the default worker-thread count.
const THREADS_ENV: &str = "CAVITY_SWITCH_THREADS";

const EXIT_CHECKS_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cavity-switch",
    version,
    about = "Simulator of a time-dilation-driven cavity quantum switch"
)]
struct Cli {
    /// Path to the TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Override the cavity mode truncation from the config.
    #[arg(long, global = true, value_name = "N")]
    modes: Option<usize>,

    /// Worker threads for sweeps; defaults to CAVITY_SWITCH_THREADS, then
    /// to the number of cores.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Branch overlap, norm, and truncation diagnostics at the config point.
    Overlap,
    /// Grid sweep over the configured axes; CSV output.
    Sweep,
    /// Two-stage |overlap| minimization over the configured variables.
    Optimize,
    /// Causal classification of the two interaction regions.
    Classify,
    /// Concurrence and maximal CHSH value of the post-selected state.
    Bell,
    /// Brute-force oracle invariant checks.
    OracleCheck,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Usage(_) | Error::Domain(_) => EXIT_CONFIG,
                Error::Convergence { .. } | Error::TruncationCap { .. } | Error::Degenerate(_) => {
                    EXIT_NUMERIC
                }
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    init_threads(cli)?;
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Usage("--config <path> is required".into()))?;
    let cfg = RunConfig::load(path)?;
    let point = cfg.point(cli.modes)?;

    let output = match cli.command {
        Command::Overlap => cmd_overlap(&point)?,
        Command::Sweep => cmd_sweep(&cfg, &point)?,
        Command::Optimize => cmd_optimize(&cfg, &point)?,
        Command::Classify => cmd_classify(&point)?,
        Command::Bell => cmd_bell(&cfg, &point)?,
        Command::OracleCheck => {
            let (text, all_passed) = cmd_oracle_check(&cfg, &point)?;
            emit(cli, &text)?;
            return Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECKS_FAILED)
            });
        }
    };
    emit(cli, &output)?;
    Ok(ExitCode::SUCCESS)
}

fn init_threads(cli: &Cli) -> Result<(), Error> {
    let from_env = || {
        std::env::var(THREADS_ENV).ok().map(|v| {
            v.parse::<usize>().map_err(|_| {
                Error::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))
            })
        })
    };
    let n = match cli.threads {
        Some(n) => Some(n),
        None => from_env().transpose()?,
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Usage(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}

fn emit(cli: &Cli, content: &str) -> Result<(), Error> {
    match &cli.out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display()))),
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn cmd_overlap(point: &Point) -> Result<String, Error> {
    let p = point.protocol()?;
    let res = overlap(&p)?;
    let class = classify_separation(&p.regions);
    let mut s = String::new();
    if point.x1 == point.x2 {
        s.push_str(
            "# warning: coincident detector positions, the two interaction orders are \
             identical\n",
        );
    }
    s.push_str(&format!("abs_overlap = {}\n", fmt(res.overlap.norm())));
    s.push_str(&format!("overlap_re = {}\n", fmt(res.overlap.re)));
    s.push_str(&format!("overlap_im = {}\n", fmt(res.overlap.im)));
    s.push_str(&format!("overlap_phase = {}\n", fmt(res.overlap.arg())));
    s.push_str(&format!("norm_per_coupling = {}\n", fmt(res.norm)));
    s.push_str(&format!("n_modes_used = {}\n", res.n_modes_used));
    s.push_str(&format!("tail_estimate = {}\n", fmt(res.tail_estimate)));
    s.push_str(&format!("separation = {class}\n"));
    Ok(s)
}

fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    (0..points)
        .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
        .collect()
}

fn cmd_sweep(cfg: &RunConfig, base: &Point) -> Result<String, Error> {
    let axes: Vec<(ParamName, Vec<f64>)> = cfg
        .sweep
        .as_ref()
        .map(|s| {
            s.axis
                .iter()
                .map(|a| (a.name, linspace(a.start, a.stop, a.points)))
                .collect()
        })
        .unwrap_or_default();

    let mut header: Vec<String> = axes.iter().map(|(n, _)| n.column().to_string()).collect();
    header.extend(
        [
            "abs_overlap",
            "overlap_phase",
            "norm",
            "concurrence",
            "chsh_max",
            "separation",
            "n_modes_used",
            "tail_estimate",
        ]
        .map(String::from),
    );
    let mut out = header.join(",");
    out.push('\n');
    if axes.is_empty() {
        return Ok(out);
    }

    let sign = cfg.sign()?;
    let total: usize = axes.iter().map(|(_, v)| v.len()).product();
    // lexicographic order: last axis fastest
    let rows: Vec<Option<String>> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut idx = flat;
            let mut values = vec![0.0; axes.len()];
            for (k, (_, vals)) in axes.iter().enumerate().rev() {
                values[k] = vals[idx % vals.len()];
                idx /= vals.len();
            }
            let mut pt = *base;
            for (k, (name, _)) in axes.iter().enumerate() {
                pt = pt.with(*name, values[k]);
            }
            let p = pt.protocol().ok()?;
            let res = overlap(&p).ok()?;
            let bell = protocol_bell_report(&p, sign).ok()?;
            let class = classify_separation(&p.regions);
            let mut cols: Vec<String> = values.iter().map(|&v| fmt(v)).collect();
            cols.push(fmt(res.overlap.norm()));
            cols.push(fmt(res.overlap.arg()));
            cols.push(fmt(res.norm));
            cols.push(fmt(bell.concurrence));
            cols.push(fmt(bell.chsh_max));
            cols.push(class.to_string());
            cols.push(res.n_modes_used.to_string());
            cols.push(fmt(res.tail_estimate));
            Some(cols.join(","))
        })
        .collect();

    for row in rows.into_iter().flatten() {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

fn cmd_optimize(cfg: &RunConfig, base: &Point) -> Result<String, Error> {
    let opt = cfg
        .optimize
        .as_ref()
        .ok_or_else(|| Error::Usage("config has no [optimize] section".into()))?;
    let grids: Vec<Vec<f64>> = opt
        .vars
        .iter()
        .map(|v| linspace(v.min, v.max, v.points))
        .collect();

    let objective = |values: &[f64]| -> Option<f64> {
        let mut pt = *base;
        for (k, v) in opt.vars.iter().enumerate() {
            pt = pt.with(v.name, values[k]);
        }
        let p = pt.protocol().ok()?;
        Some(overlap(&p).ok()?.overlap.norm())
    };

    // stage 1: lexicographic grid scan, first strict improvement wins
    let total: usize = grids.iter().map(Vec::len).product();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for flat in 0..total {
        let mut idx = flat;
        let mut values = vec![0.0; grids.len()];
        for (k, g) in grids.iter().enumerate().rev() {
            values[k] = g[idx % g.len()];
            idx /= g.len();
        }
        if let Some(v) = objective(&values) {
            if best.as_ref().is_none_or(|(_, b)| v < *b) {
                best = Some((values, v));
            }
        }
    }
    let (grid_x, grid_val) = best.ok_or_else(|| {
        Error::Degenerate("every grid point is inadmissible or degenerate".into())
    })?;

    // stage 2: simplex refinement clamped to the bounds
    let (refined_x, refined_val, evals) = if opt.refine_iters > 0 {
        let clamp = |x: &[f64]| -> Vec<f64> {
            x.iter()
                .zip(&opt.vars)
                .map(|(&v, spec)| v.clamp(spec.min, spec.max))
                .collect()
        };
        let steps: Vec<f64> = opt
            .vars
            .iter()
            .map(|v| ((v.max - v.min) / (2.0 * v.points as f64)).max(1e-12))
            .collect();
        let r = nelder_mead(
            |x| objective(&clamp(x)).unwrap_or(f64::INFINITY),
            &grid_x,
            &steps,
            opt.refine_iters,
            1e-14,
        );
        let x = clamp(&r.xmin);
        match objective(&x) {
            Some(v) if v <= grid_val => (x, v, r.evals),
            _ => (grid_x.clone(), grid_val, r.evals),
        }
    } else {
        (grid_x.clone(), grid_val, 0)
    };

    let mut s = String::new();
    for (k, v) in opt.vars.iter().enumerate() {
        s.push_str(&format!("grid_{} = {}\n", v.name.column(), fmt(grid_x[k])));
    }
    s.push_str(&format!("grid_abs_overlap = {}\n", fmt(grid_val)));
    for (k, v) in opt.vars.iter().enumerate() {
        s.push_str(&format!("best_{} = {}\n", v.name.column(), fmt(refined_x[k])));
    }
    s.push_str(&format!("abs_overlap = {}\n", fmt(refined_val)));
    s.push_str(&format!("refine_evals = {evals}\n"));
    Ok(s)
}

fn cmd_classify(point: &Point) -> Result<String, Error> {
    let r = point.regions()?;
    Ok(format!("separation = {}\n", classify_separation(&r)))
}

fn cmd_bell(cfg: &RunConfig, point: &Point) -> Result<String, Error> {
    let p = point.protocol()?;
    let res = overlap(&p)?;
    let rep = protocol_bell_report(&p, cfg.sign()?)?;
    let mut s = String::new();
    s.push_str(&format!("sign = {}\n", cfg.sign()?));
    s.push_str(&format!("abs_overlap = {}\n", fmt(res.overlap.norm())));
    s.push_str(&format!("concurrence = {}\n", fmt(rep.concurrence)));
    s.push_str(&format!("chsh_max = {}\n", fmt(rep.chsh_max)));
    s.push_str(&format!("violates = {}\n", rep.violates));
    Ok(s)
}

fn cmd_oracle_check(cfg: &RunConfig, point: &Point) -> Result<(String, bool), Error> {
    let p = point.protocol()?;
    let checks = run_checks(&p, cfg.oracle.n_modes, cfg.oracle.max_excitations)?;
    let mut s = String::new();
    let mut all = true;
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        all &= c.passed;
        s.push_str(&format!("{status} {}: {}\n", c.name, c.detail));
    }
    s.push_str(&format!(
        "result = {}\n",
        if all { "all checks passed" } else { "checks failed" }
    ));
    Ok((s, all))
}

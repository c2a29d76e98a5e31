use std::f64::consts::PI;
use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ubootstrap::covers::{certify, overlay_ppm, run_cover_demo, CoverError, RenormParams};
use ubootstrap::dynamics::{step, Boundary, GridConfig};
use ubootstrap::family_file::load_family;
use ubootstrap::geometry::{classify, forbidden_set, is_symmetric, stable_set, witness_triple, GeometryError, UpdateFamily};
use ubootstrap::montecarlo::{estimate_pc, initial_config};

#[derive(Parser)]
#[command(name = "ubootstrap", version, about = "Two-dimensional U-bootstrap percolation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Torus,
    Free,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    None,
    Text,
    Pbm,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a family and list its stable and forbidden directions.
    Classify { family: String },
    /// Print the stable set as arcs, exactly and in degrees.
    StableSet { family: String },
    /// Run the dynamics from a random initial configuration.
    Simulate {
        family: String,
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "torus")]
        boundary: BoundaryArg,
        /// Stop after this many steps instead of running to the fixed point.
        #[arg(long)]
        steps: Option<usize>,
        /// Print every frame, starting with the initial one.
        #[arg(long, value_enum, default_value = "none")]
        emit: Emit,
    },
    /// Estimate the critical probability on a torus by bisection; prints CSV.
    EstimatePc {
        family: String,
        #[arg(long, default_value_t = 256)]
        size: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compute the numerical lower-bound certificate of a subcritical family.
    Certificate {
        family: String,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1.45)]
        beta: f64,
        #[arg(long, default_value_t = 0.01)]
        gamma: f64,
        /// Three witness angles in radians, e.g. "7pi/24,23pi/24,39pi/24".
        #[arg(long)]
        thetas: Option<String>,
    },
    /// Build the multi-scale cover collection for a random sparse configuration.
    CoverDemo {
        family: String,
        #[arg(long, default_value_t = 128)]
        size: usize,
        #[arg(long, default_value_t = 1e-4)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        delta1: u64,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1.45)]
        beta: f64,
        #[arg(long, default_value_t = 0.01)]
        gamma: f64,
        #[arg(long, default_value_t = 2)]
        max_level: usize,
        #[arg(long)]
        thetas: Option<String>,
        /// Skip the goodness hypotheses of barrier construction.
        #[arg(long)]
        toy: bool,
        /// Write a PPM overlay of covers and infected sites to this path.
        #[arg(long)]
        overlay: Option<String>,
    },
}

/// Outcome of a subcommand: text to print and the exit code.
type Outcome = Result<(String, u8), String>;

fn family(source: &str) -> Result<UpdateFamily, String> {
    load_family(source).map_err(|e| format!("{source}: {e}"))
}

/// Parses one angle: a plain number, or `[k]pi[/d]`.
fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let Some((k, rest)) = s.split_once("pi") else {
        return s.parse::<f64>().map_err(|_| format!("bad angle '{s}'"));
    };
    let k = match k.trim() {
        "" => 1.0,
        "-" => -1.0,
        k => k.parse::<f64>().map_err(|_| format!("bad angle '{s}'"))?,
    };
    let d = match rest.trim().strip_prefix('/') {
        None if rest.trim().is_empty() => 1.0,
        Some(d) => d.trim().parse::<f64>().map_err(|_| format!("bad angle '{s}'"))?,
        None => return Err(format!("bad angle '{s}'")),
    };
    Ok(k * PI / d)
}

fn parse_thetas(s: &Option<String>) -> Result<Option<[f64; 3]>, String> {
    let Some(s) = s else { return Ok(None) };
    let v = s.split(',').map(parse_angle).collect::<Result<Vec<_>, _>>()?;
    v.try_into().map(Some).map_err(|_| "expected three comma-separated angles".to_string())
}

fn cmd_classify(source: &str) -> Outcome {
    let f = family(source)?;
    let s = stable_set(&f);
    let mut out = String::new();
    let _ = writeln!(out, "family: {}", f.name().unwrap_or(source));
    let _ = writeln!(out, "classification: {}", classify(&f));
    let _ = writeln!(out, "stable set: {s}");
    let degrees: Vec<String> = s.arcs().iter().map(|a| a.degrees()).collect();
    let _ = writeln!(out, "stable set (degrees): {}", if degrees.is_empty() { "empty".into() } else { degrees.join(" u ") });
    let forbidden: Vec<String> = forbidden_set(&f).iter().map(|d| format!("({d})")).collect();
    let _ = writeln!(out, "forbidden: {}", if forbidden.is_empty() { "none".into() } else { forbidden.join(" ") });
    let _ = writeln!(out, "range: {:.6}", f.range());
    match is_symmetric(&f) {
        Some(u) => {
            let _ = writeln!(out, "symmetric: yes, witness ({u})");
        }
        None => {
            let _ = writeln!(out, "symmetric: no");
        }
    }
    Ok((out, 0))
}

fn cmd_stable_set(source: &str) -> Outcome {
    let f = family(source)?;
    let mut out = String::new();
    for a in stable_set(&f).arcs() {
        let _ = writeln!(out, "{a}\t{}", a.degrees());
    }
    if out.is_empty() {
        out.push_str("empty\n");
    }
    Ok((out, 0))
}

fn render(cfg: &GridConfig, emit: Emit) -> String {
    match emit {
        Emit::None => String::new(),
        Emit::Text => cfg.to_text() + "\n",
        Emit::Pbm => cfg.to_pbm_ascii(),
    }
}

fn cmd_simulate(source: &str, size: usize, p: f64, seed: u64, boundary: BoundaryArg, steps: Option<usize>, emit: Emit) -> Outcome {
    let f = family(source)?;
    if size == 0 || !(0.0..=1.0).contains(&p) {
        return Err("need --size > 0 and 0 <= --p <= 1".into());
    }
    let torus = initial_config(size, p, seed, 0);
    let mut cfg = match boundary {
        BoundaryArg::Torus => torus,
        BoundaryArg::Free => GridConfig::from_fn(size, size, Boundary::FreeHealthy, |i, j| torus.get(i, j)),
    };
    let mut out = render(&cfg, emit);
    let mut taken = 0;
    while steps.map_or(true, |s| taken < s) {
        let (next, report) = step(&f, &cfg);
        if report.newly_infected == 0 {
            break;
        }
        cfg = next;
        taken += 1;
        out.push_str(&render(&cfg, emit));
    }
    let _ = writeln!(out, "percolated={} density={} steps={taken}", cfg.is_full(), cfg.density());
    Ok((out, 0))
}

fn cmd_estimate_pc(source: &str, size: usize, trials: usize, tol: f64, seed: u64) -> Outcome {
    let f = family(source)?;
    let r = estimate_pc(&f, size, trials, tol, seed).map_err(|e| e.to_string())?;
    Ok((r.to_csv(), 0))
}

fn cmd_certificate(source: &str, alpha: f64, beta: f64, gamma: f64, thetas: &Option<String>) -> Outcome {
    let f = family(source)?;
    let c = match certify(&f, alpha, beta, gamma, parse_thetas(thetas)?) {
        Ok(c) => c,
        Err(e @ CoverError::NotSubcritical(_)) => return Ok((format!("{e}\n"), 1)),
        Err(e) => return Err(e.to_string()),
    };
    let code = if c.final_check { 0 } else { 1 };
    Ok((c.to_string(), code))
}

#[allow(clippy::too_many_arguments)]
fn cmd_cover_demo(
    source: &str,
    size: usize,
    p: f64,
    seed: u64,
    params: (u64, f64, f64, f64),
    max_level: usize,
    thetas: &Option<String>,
    toy: bool,
    overlay: &Option<String>,
) -> Outcome {
    let f = family(source)?;
    let (delta1, alpha, beta, gamma) = params;
    let w = match witness_triple(&f, parse_thetas(thetas)?) {
        Ok(w) => w,
        Err(e @ GeometryError::NotSubcritical(_)) => return Ok((format!("{e}\n"), 1)),
        Err(e) => return Err(e.to_string()),
    };
    let params = RenormParams::for_witness(alpha, beta, gamma, delta1, &w).map_err(|e| e.to_string())?;
    if size == 0 || max_level == 0 {
        return Err("need --size > 0 and --max-level > 0".into());
    }
    let torus = initial_config(size, p, seed, 0);
    let cfg = GridConfig::from_fn(size, size, Boundary::FreeHealthy, |i, j| torus.get(i, j));
    let (report, h) = run_cover_demo(&f, &w, &cfg, &params, max_level, !toy).map_err(|e| e.to_string())?;
    let mut out = String::new();
    let thetas: Vec<String> = w.thetas.iter().map(|t| format!("{t:.6}")).collect();
    let _ = writeln!(out, "thetas: {}", thetas.join(", "));
    let _ = writeln!(out, "epsilon: {:.6}", params.epsilon);
    let deltas: Vec<String> = (1..=max_level).map(|i| params.delta_i(i).to_string()).collect();
    let _ = writeln!(out, "side lengths: {}", deltas.join(", "));
    out.push_str(&report.to_text());
    if let Some(path) = overlay {
        std::fs::write(path, overlay_ppm(&h)).map_err(|e| format!("{path}: {e}"))?;
    }
    let checks_ok = report.laminar
        && report.contained != Some(false)
        && report.covers.iter().all(|c| c.barriers_valid && c.closed && c.fixed);
    Ok((out, if checks_ok { 0 } else { 1 }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify { family } => cmd_classify(family),
        Command::StableSet { family } => cmd_stable_set(family),
        Command::Simulate { family, size, p, seed, boundary, steps, emit } => {
            cmd_simulate(family, *size, *p, *seed, *boundary, *steps, *emit)
        }
        Command::EstimatePc { family, size, trials, tol, seed } => cmd_estimate_pc(family, *size, *trials, *tol, *seed),
        Command::Certificate { family, alpha, beta, gamma, thetas } => cmd_certificate(family, *alpha, *beta, *gamma, thetas),
        Command::CoverDemo { family, size, p, seed, delta1, alpha, beta, gamma, max_level, thetas, toy, overlay } => {
            cmd_cover_demo(family, *size, *p, *seed, (*delta1, *alpha, *beta, *gamma), *max_level, thetas, *toy, overlay)
        }
    };
    match result {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

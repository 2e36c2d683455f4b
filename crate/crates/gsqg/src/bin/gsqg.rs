use clap::{Parser, Subcommand, ValueEnum};
use gsqg::alignment::align;
use gsqg::config::SimConfig;
use gsqg::curve::resample_constant_speed;
use gsqg::dynamics::{run, RunStatus};
use gsqg::lab::check_suite;
use gsqg::metrics::{frechet_distance, hausdorff_distance, l2_deviation, pair_distance};
use gsqg::output::RunWriter;
use gsqg::{ClosedCurve, ParamKind};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_BREACH: u8 = 2;
const EXIT_CEILING: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "gsqg", version, about = "Contour dynamics for generalized SQG patches")]
struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "GSQG_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write diagnostics, snapshots and frames.
    Run {
        config: PathBuf,
        /// Output directory (default: `<config stem>_out` next to the config).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Distance between two curve files.
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = Metric::Frechet)]
        metric: Metric,
    },
    /// Align the second curve to the first and print the result as JSON.
    Align { a: PathBuf, b: PathBuf },
    /// Run the randomized inequality suite.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Rerun a scenario at ε, ε/2, ε/4 and tabulate Fréchet distances of the end states.
    RefineEpsilon { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Frechet,
    Hausdorff,
    Delta,
    #[value(name = "D")]
    D,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn load_curve(p: &Path) -> Result<ClosedCurve, String> {
    let s = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
    ClosedCurve::from_json(&s).map_err(|e| format!("{}: {e}", p.display()))
}

fn constant_speed(c: ClosedCurve) -> Result<ClosedCurve, String> {
    match c.param_kind() {
        ParamKind::ConstantSpeed => Ok(c),
        ParamKind::General => {
            let n = (c.len() + c.len() % 2).max(16);
            resample_constant_speed(&c, n).map_err(|e| e.to_string())
        }
    }
}

fn load_config(p: &Path) -> Result<SimConfig, String> {
    let c = SimConfig::from_path(p).map_err(|e| e.to_string())?;
    c.validate().map_err(|e| e.to_string())?;
    Ok(c)
}

fn cmd_run(config: &Path, out: Option<PathBuf>) -> ExitCode {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let family = match cfg.initial_family() {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let out = out.unwrap_or_else(|| {
        let stem = config.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        config.with_file_name(format!("{stem}_out"))
    });
    let mut writer = match RunWriter::create(&out, &family, cfg.snapshots) {
        Ok(w) => w,
        Err(e) => return fail(e),
    };
    let report = run(&cfg, |s, r| writer.record(&s.family, r));
    let report = match report {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let frames = writer.frames();
    if let Err(e) = writer.finish() {
        return fail(e);
    }
    let g = &report.growth_summary;
    println!("status: {:?}", report.status);
    println!("steps: {}, recorded: {frames}, t: {}", report.steps, report.final_state.t);
    println!(
        "growth constant: {:e} (first half {:e}, second half {:e}, stable: {})",
        g.fitted_c, g.first_half_max, g.second_half_max, g.stable
    );
    if !report.perturbed.is_empty() {
        println!("perturbed inward before start: {:?}", report.perturbed);
    }
    if let Some(b) = &report.breach {
        println!("breach: {b}");
    }
    println!("output: {}", out.display());
    match report.status {
        RunStatus::Ok => ExitCode::SUCCESS,
        RunStatus::TopologyBreach => ExitCode::from(EXIT_BREACH),
        RunStatus::CeilingHit => ExitCode::from(EXIT_CEILING),
    }
}

fn cmd_distance(a: &Path, b: &Path, metric: Metric) -> Result<f64, String> {
    let (a, b) = (load_curve(a)?, load_curve(b)?);
    Ok(match metric {
        Metric::Frechet => frechet_distance(&a, &b),
        Metric::Hausdorff => hausdorff_distance(&a, &b),
        Metric::Delta => pair_distance(&a, &b),
        Metric::D => l2_deviation(&constant_speed(a)?, &b).map_err(|e| e.to_string())?,
    })
}

fn cmd_align(a: &Path, b: &Path) -> Result<String, String> {
    let a = constant_speed(load_curve(a)?)?;
    let b = constant_speed(load_curve(b)?)?;
    let res = align(&a, &b).map_err(|e| e.to_string())?;
    serde_json::to_string_pretty(&res).map_err(|e| e.to_string())
}

fn cmd_check(seed: u64, trials: usize, json: Option<PathBuf>) -> ExitCode {
    let report = match check_suite(seed, trials) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    print!("{}", report.table());
    for c in report.checks.iter().filter(|c| !c.passed) {
        println!("{}: {} failures, first: {}", c.name, c.failures, c.witness.as_deref().unwrap_or("-"));
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match json {
        Some(p) => {
            if let Err(e) = std::fs::write(&p, text) {
                return fail(format!("{}: {e}", p.display()));
            }
        }
        None => println!("\n{text}"),
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn cmd_refine(config: &Path) -> Result<(), String> {
    let cfg = load_config(config)?;
    let family = cfg.initial_family().map_err(|e| e.to_string())?;
    let eps = cfg.kernel(&family).epsilon;
    let mut finals = Vec::new();
    for k in 0..3 {
        let mut c = cfg.clone();
        c.epsilon = Some(eps / f64::from(1u32 << k));
        let rep = run(&c, |_, _| Ok(())).map_err(|e| e.to_string())?;
        if rep.status != RunStatus::Ok {
            return Err(format!("run at epsilon {} ended with {:?}", c.epsilon.unwrap(), rep.status));
        }
        finals.push((c.epsilon.unwrap(), rep.final_state.family));
    }
    println!("{:>14} {:>14} {:>14}", "epsilon", "epsilon/2", "d_F");
    for w in finals.windows(2) {
        let d = w[0]
            .1
            .curves
            .iter()
            .zip(&w[1].1.curves)
            .map(|(a, b)| frechet_distance(a, b))
            .fold(0.0, f64::max);
        println!("{:>14.6e} {:>14.6e} {:>14.6e}", w[0].0, w[1].0, d);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return fail(e);
        }
    }
    match cli.command {
        Command::Run { config, out } => cmd_run(&config, out),
        Command::Distance { a, b, metric } => match cmd_distance(&a, &b, metric) {
            Ok(v) => {
                println!("{v}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Align { a, b } => match cmd_align(&a, &b) {
            Ok(s) => {
                println!("{s}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Check { seed, trials, json } => cmd_check(seed, trials, json),
        Command::RefineEpsilon { config } => match cmd_refine(&config) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
    }
}

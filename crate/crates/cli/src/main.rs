use clap::Parser;
use lyap_core::experiments::{self, ExperimentConfig, Report, EXPERIMENTS};
use lyap_core::parallel::{current_workers, with_workers};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const EXIT_ASSERTION: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "lyap", version, about = "Run a Lyapunov-exponent experiment from a JSON config")]
struct Cli {
    /// Experiment name.
    #[arg(required_unless_present = "list")]
    experiment: Option<String>,
    #[arg(long, required_unless_present = "list")]
    config: Option<PathBuf>,
    /// Overrides LYAP_SEED and the config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Print the bundled config templates and exit.
    #[arg(long)]
    list: bool,
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("config error: {msg}");
    ExitCode::from(EXIT_CONFIG)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        for (name, v) in experiments::templates() {
            println!("# {name}\n{}", serde_json::to_string_pretty(&v).expect("template serializes"));
        }
        return ExitCode::SUCCESS;
    }
    let (Some(name), Some(path)) = (cli.experiment.as_deref(), cli.config.as_ref()) else {
        return config_error("experiment and --config are required");
    };
    if !EXPERIMENTS.contains(&name) {
        return config_error(format!("unknown experiment `{name}`; expected one of {}", EXPERIMENTS.join(", ")));
    }
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return config_error(format!("{}: {e}", path.display())),
    };
    let value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return config_error(format!("{}: {e}", path.display())),
    };
    let env_seed = match std::env::var("LYAP_SEED") {
        Ok(s) => match s.trim().parse::<u64>() {
            Ok(v) => Some(v),
            Err(e) => return config_error(format!("LYAP_SEED={s:?}: {e}")),
        },
        Err(_) => None,
    };
    let (cfg, echo) = match ExperimentConfig::from_value(value, Some(name), cli.seed.or(env_seed)) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    let base = path.parent().map(PathBuf::from).unwrap_or_default();
    let start = Instant::now();
    let run = with_workers(cli.workers, || (experiments::run(&cfg, &base), current_workers()));
    let outcome = match run.0 {
        Ok(o) => o,
        Err(e) => return config_error(e),
    };
    eprintln!("{name}: {:.2}s on {} worker(s)", start.elapsed().as_secs_f64(), run.1);
    let report = Report::new(name, echo, &outcome);
    match experiments::write_outputs(&cli.out, &report, &outcome.tables) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    for c in &outcome.checks {
        println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ASSERTION)
    }
}

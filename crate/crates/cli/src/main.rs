use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use okounkov_cli::config::{Config, Overrides, Pipeline};
use okounkov_cli::{pipeline, OUT_DIR_VAR};

#[derive(Parser)]
#[command(
    name = "okounkov",
    version,
    about = "Okounkov bodies, concave transforms and adelic lattice experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Okounkov body, semigroup slices and ample-series diagnostic.
    Body(RunArgs),
    /// Concave transform, filtered volume and distribution table.
    Transform(RunArgs),
    /// Jump measures and their distance to the pushforward of Lebesgue measure.
    Measure(RunArgs),
    /// Successive minima, small sections, Euler characteristics and gap report.
    Adelic(RunArgs),
    /// Graded-piece degrees and their concave envelope.
    Envelope(RunArgs),
    /// G against H and the Legendre transform of the metric weight.
    Compare(RunArgs),
    /// The full acceptance suite.
    Acceptance(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    config: PathBuf,
    /// Artifact directory; defaults to $OKOUNKOV_OUT, then ./okounkov-out.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    enumeration_cap: Option<u64>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            k_max: self.k_max,
            grid: self.grid,
            levels: self.levels,
            samples: self.samples,
            depth: self.depth,
            enumeration: self.enumeration_cap,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (p, args) = match &cli.command {
        Command::Body(a) => (Pipeline::Body, a),
        Command::Transform(a) => (Pipeline::Transform, a),
        Command::Measure(a) => (Pipeline::Measure, a),
        Command::Adelic(a) => (Pipeline::Adelic, a),
        Command::Envelope(a) => (Pipeline::Envelope, a),
        Command::Compare(a) => (Pipeline::Compare, a),
        Command::Acceptance(a) => (Pipeline::Acceptance, a),
    };
    let started = Instant::now();
    let mut cfg = match Config::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(named) = cfg.pipeline {
        if named != p {
            eprintln!(
                "error: config is for the {} pipeline, not {}",
                named.name(),
                p.name()
            );
            return ExitCode::from(2);
        }
    }
    cfg.apply(&args.overrides());
    let dir = args
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_VAR).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("okounkov-out"));

    let bundle = pipeline::run(p, &cfg);
    for line in &bundle.lines {
        println!("{line}");
    }
    match pipeline::write(&bundle, &cfg, p, &dir, started) {
        Ok(m) => println!("manifest: {}", m.display()),
        Err(e) => {
            eprintln!("error: writing artifacts: {e}");
            return ExitCode::from(2);
        }
    }
    if let Some(e) = &bundle.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(bundle.exit_code() as u8)
}

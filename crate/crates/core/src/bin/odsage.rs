use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use odsage::pipeline::{Pipeline, PipelineConfig, Scale, Stage};
use odsage::Error;

#[derive(Parser)]
#[command(
    name = "odsage",
    version,
    about = "Short-term OD demand forecasting pipeline"
)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Preset used when no config file is given.
    #[arg(long, value_enum, global = true)]
    scale: Option<ScaleArg>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    show_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    TwelveOd,
    Tiny,
    Full,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Simulate trips and train events.
    Simulate,
    /// Build feature matrices and targets.
    Features,
    /// Build the four OD graphs.
    Graphs,
    /// Train mGraphSAGE and the baselines.
    Train,
    /// Score all methods on the test days.
    Evaluate,
    /// Run every stage in order.
    All,
}

fn load_config(cli: &Cli) -> odsage::Result<PipelineConfig> {
    let mut cfg = match (&cli.config, cli.scale) {
        (Some(path), _) => PipelineConfig::load(path)?,
        (None, Some(s)) => PipelineConfig::preset(match s {
            ScaleArg::TwelveOd => Scale::TwelveOd,
            ScaleArg::Tiny => Scale::Tiny,
            ScaleArg::Full => Scale::Full,
        }),
        (None, None) => PipelineConfig::preset(Scale::Tiny),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if cli.show_config {
        print!("{}", cfg.to_toml());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: no command given (try --help)");
        return ExitCode::from(1);
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let stage = match command {
        Command::Simulate => Stage::Simulate,
        Command::Features => Stage::Features,
        Command::Graphs => Stage::Graphs,
        Command::Train => Stage::Train,
        Command::Evaluate => Stage::Evaluate,
        Command::All => Stage::All,
    };
    let result = Pipeline::new(cfg).and_then(|p| p.run(stage));
    match result {
        Ok(Some(report)) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

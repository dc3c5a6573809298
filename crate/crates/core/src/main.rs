use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fundesign::cli::{self, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "fundesign", version, about = "A-optimal designs for scalar-on-function linear models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for one design and write design, summary and function-sample CSVs.
    Run(CommonArgs),
    /// Search every (runs, size) cell of the config's [sweep] section.
    Sweep(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML configuration file.
    config: PathBuf,
    /// Also run the exhaustive vertex-enumeration check (small instances only).
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    starts: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(args: &CommonArgs) -> fundesign::Result<RunConfig> {
    let mut cfg = RunConfig::from_path(&args.config)?;
    Overrides {
        seed: args.seed,
        starts: args.starts,
        out: args.out.clone(),
        oracle: args.oracle,
    }
    .apply(&mut cfg);
    // re-validate after overrides
    cfg.optimizer_config().validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => load(args).and_then(|cfg| {
            let report = cli::run(&cfg, args.oracle)?;
            let s = &report.summary;
            println!("criterion        {}", s.criterion);
            if let Some(e) = s.efficiency {
                println!("efficiency       {e:.4}");
            }
            println!("winning start    {}", s.winning_start_index);
            println!("sweeps           {}", s.sweeps);
            println!("feasible starts  {}/{}", s.feasible_starts, s.starts);
            if let Some((_, v)) = &report.oracle {
                println!("vertex oracle    {v}");
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }),
        Command::Sweep(args) => load(args).and_then(|cfg| {
            if args.oracle {
                eprintln!("note: --oracle is ignored by sweep");
            }
            let rows = cli::sweep(&cfg)?;
            println!("{:>6} {:>6} {:>14} {:>10}", "runs", "size", "A-opt", "A-eff");
            for r in &rows {
                println!("{:>6} {:>6} {:>14.3} {:>10.3}", r.runs, r.size, r.criterion, r.efficiency);
            }
            println!("wrote {}", cfg.output.dir.join("sweep.csv").display());
            Ok(())
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pva_tools::config::{Format, JobConfig};
use pva_tools::error::{CliError, Result};
use pva_tools::jobs::{self, Options, Outcome};

/// Exact λ-bracket computations for Poisson vertex algebras and classical
/// W-algebras.
///
/// Exit status: 0 when every check passes, 1 when a residual is nonzero or
/// compared flows differ, 2 on configuration or parse errors.
#[derive(Parser)]
#[command(name = "pva", version)]
struct Cli {
    /// Job file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format; overrides the job file.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Index table file.
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    /// Directory searched for `table-<n>.txt`.
    #[arg(long, global = true, env = "PVA_TABLE_DIR")]
    table_dir: Option<PathBuf>,
    /// Worker threads for residuals and brackets.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Skew-symmetry and Jacobi residuals of a bracket matrix.
    Check,
    /// `{f λ g}` by the Master Formula.
    Bracket,
    /// Hamiltonian flow of a density, optionally compared with a second pair.
    Flow,
    /// Runs the job named by the config's `mode`.
    Run,
    /// Classical affine W-algebras.
    Walg {
        #[command(subcommand)]
        command: WalgCommand,
    },
}

#[derive(Subcommand)]
enum WalgCommand {
    /// sl2-triple, graded bases, weights and s.
    Init,
    /// The generator brackets H.
    Brackets {
        /// Also verify skew-symmetry and the Jacobi identity.
        #[arg(long)]
        check: bool,
    },
    /// The Virasoro element.
    Virasoro,
    /// Index tables.
    Table {
        #[command(subcommand)]
        command: TableCommand,
    },
}

#[derive(Subcommand)]
enum TableCommand {
    /// Generates a table and writes it.
    Gen {
        #[arg(long)]
        depth: u32,
        /// Output file or directory; defaults to `--table`, then `<table-dir>/table-<n>.txt`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Loads, validates and summarizes a table.
    Info { path: Option<PathBuf> },
}

fn load_config(opts: &Options) -> Result<JobConfig> {
    match &opts.config_path {
        Some(p) => JobConfig::load(p),
        None => Err(CliError::config("--config is required")),
    }
}

fn run(cli: &Cli, opts: &mut Options) -> Result<Outcome> {
    let with_config = |opts: &mut Options| -> Result<JobConfig> {
        let cfg = load_config(opts)?;
        if opts.format.is_none() {
            opts.format = cfg.format;
        }
        Ok(cfg)
    };
    match &cli.command {
        Command::Check => jobs::run_check(&with_config(opts)?, opts),
        Command::Bracket => jobs::run_bracket(&with_config(opts)?, opts),
        Command::Flow => jobs::run_flow(&with_config(opts)?, opts),
        Command::Run => jobs::run_config(&with_config(opts)?, opts),
        Command::Walg { command } => match command {
            WalgCommand::Init => jobs::run_walg_init(&with_config(opts)?, opts),
            WalgCommand::Brackets { check } => {
                jobs::run_walg_brackets(&with_config(opts)?, opts, *check)
            }
            WalgCommand::Virasoro => jobs::run_walg_virasoro(&with_config(opts)?, opts),
            WalgCommand::Table { command } => match command {
                TableCommand::Gen { depth, out } => {
                    jobs::run_table_gen(opts, *depth, out.as_deref())
                }
                TableCommand::Info { path } => jobs::run_table_info(opts, path.as_deref()),
            },
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut opts = Options {
        config_path: cli.config.clone(),
        format: cli.format,
        table: cli.table.clone(),
        table_dir: cli.table_dir.clone(),
    };
    match run(&cli, &mut opts) {
        Ok(out) => {
            print!("{}", out.render(opts.format.unwrap_or_default()));
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

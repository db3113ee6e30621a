use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mskrylov_cli::config::{Overrides, RunConfig, Variant};
use mskrylov_cli::export::{self, figure};
use mskrylov_cli::presets::PRESETS;
use mskrylov_cli::record::{write_json, ErrorRecord, PairRecord, RunRecord, DEFAULT_OUTPUT_DIR};
use mskrylov_cli::runner::Runner;
use mskrylov_cli::verify::{self, Scale};

#[derive(Parser)]
#[command(
    name = "mskrylov",
    version,
    about = "Multiseed Krylov complexity plateaus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Allow L >= 6 or N, M >= 9.
    #[arg(long)]
    long_run: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Base RNG seed for random couplings.
    #[arg(long)]
    rng_seed: Option<u64>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            precision_bits: self.precision_bits,
            output_dir: self.output_dir.clone(),
            rng_seed: self.rng_seed,
        }
    }
}

/// Either a config file or a preset with a size.
#[derive(Args, Clone)]
struct Source {
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long, requires = "size")]
    preset: Option<String>,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, value_enum, default_value = "operator")]
    variant: VariantArg,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum VariantArg {
    Operator,
    State,
    Size,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Operator => Variant::Operator,
            VariantArg::State => Variant::State,
            VariantArg::Size => Variant::Size,
        }
    }
}

impl Source {
    fn load(&self, common: &Common) -> Result<RunConfig> {
        let mut c = match (&self.config, &self.preset, self.size) {
            (Some(path), _, _) => RunConfig::load(path)?,
            (None, Some(name), Some(size)) => RunConfig::preset(name, size, self.variant.into()),
            _ => bail!("give --config or --preset with --size"),
        };
        c.apply(&common.overrides());
        Ok(c)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its record.
    Run {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
    },
    /// Run an integrable/chaotic pair with a shared normalization.
    Pair {
        /// Integrable config, optionally followed by the chaotic one.
        #[arg(long, num_args = 1, action = clap::ArgAction::Append)]
        config: Vec<PathBuf>,
        #[arg(long)]
        chaotic: Option<PathBuf>,
        /// Integrable preset; its partner supplies the chaotic half.
        #[arg(long, conflicts_with = "config", requires = "size")]
        preset: Option<String>,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, value_enum, default_value = "operator")]
        variant: VariantArg,
        /// Chaotic realizations.
        #[arg(long)]
        count: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a chaotic ensemble.
    Ensemble {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Write a figure table from pair records.
    Export {
        #[arg(long)]
        figure: String,
        #[arg(long, default_value = DEFAULT_OUTPUT_DIR)]
        input_dir: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        integrable_preset: Option<String>,
    },
    /// List the named parameter points.
    Presets,
    /// Run the property checks, or the acceptance criteria.
    Verify {
        #[arg(long)]
        acceptance: bool,
        #[arg(long)]
        long_run: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Run { .. } => "run",
            Command::Pair { .. } => "pair",
            Command::Ensemble { .. } => "ensemble",
            Command::Export { .. } => "export",
            Command::Presets => "presets",
            Command::Verify { .. } => "verify",
        }
    }

    fn output_dir(&self) -> PathBuf {
        let dir = match self {
            Command::Run { common, .. }
            | Command::Pair { common, .. }
            | Command::Ensemble { common, .. } => common.output_dir.clone(),
            _ => None,
        };
        dir.unwrap_or_else(|| DEFAULT_OUTPUT_DIR.into())
    }
}

fn out_dir(c: &RunConfig) -> PathBuf {
    c.output_dir
        .clone()
        .unwrap_or_else(|| DEFAULT_OUTPUT_DIR.into())
}

fn save_run(record: &RunRecord) -> Result<PathBuf> {
    let path = out_dir(&record.config).join(format!("{}.json", record.config.stem()?));
    write_json(&path, record)?;
    Ok(path)
}

fn save_pair(record: &PairRecord) -> Result<PathBuf> {
    let stem = record.integrable.config.stem()?;
    let path = out_dir(&record.integrable.config).join(format!("pair-{stem}.json"));
    write_json(&path, record)?;
    Ok(path)
}

fn print_run(record: &RunRecord, path: &Path) {
    if let Some(s) = &record.summary {
        println!(
            "plateau {:.6} (M = {}, normalized {:.6}, sem {:.2e}) -> {}",
            s.value,
            s.levels,
            s.normalized,
            s.stats.std_error,
            path.display()
        );
    }
}

/// Config of the failing command, when one could be loaded.
fn failing_config(cmd: &Command) -> Option<RunConfig> {
    match cmd {
        Command::Run { source, common } | Command::Ensemble { source, common, .. } => {
            source.load(common).ok()
        }
        _ => None,
    }
}

fn execute(cmd: &Command) -> Result<bool> {
    match cmd {
        Command::Run { source, common } => {
            let config = source.load(common)?;
            let record = Runner::new(common.workers)?.run(&config, common.long_run)?;
            let path = save_run(&record)?;
            print_run(&record, &path);
        }
        Command::Ensemble {
            source,
            count,
            common,
        } => {
            let mut config = source.load(common)?;
            config.ensemble.count = *count;
            let record = Runner::new(common.workers)?.run(&config, common.long_run)?;
            let path = save_run(&record)?;
            print_run(&record, &path);
        }
        Command::Pair {
            config,
            chaotic,
            preset,
            size,
            variant,
            count,
            common,
        } => {
            let (mut a, mut b) = match (preset, config.as_slice(), chaotic) {
                (Some(name), [], None) => {
                    let p = mskrylov_cli::presets::find(name)?;
                    if !p.integrable {
                        bail!(
                            "`{name}` is not an integrable preset; its partner is `{}`",
                            p.partner
                        );
                    }
                    let size = size.expect("clap requires --size");
                    (
                        RunConfig::preset(p.name, size, (*variant).into()),
                        RunConfig::preset(p.partner, size, (*variant).into()),
                    )
                }
                (None, [int, cha], None) | (None, [int], Some(cha)) => {
                    (RunConfig::load(int)?, RunConfig::load(cha)?)
                }
                _ => bail!(
                    "give two --config files, --config with --chaotic, or --preset with --size"
                ),
            };
            for c in [&mut a, &mut b] {
                c.apply(&common.overrides());
            }
            if let Some(n) = count {
                b.ensemble.count = *n;
            }
            let record = Runner::new(common.workers)?.run_pair(&a, &b, common.long_run)?;
            let path = save_pair(&record)?;
            println!(
                "integrable {:.6}, chaotic {:.6} ± {:.2e} (M - 1 = {}), integrable lower: {} -> {}",
                record.normalized_integrable,
                record.normalized_chaotic.mean,
                record.normalized_chaotic.std_error,
                record.denominator,
                record.integrable_lower,
                path.display()
            );
        }
        Command::Export {
            figure: id,
            input_dir,
            output,
            sizes,
            integrable_preset,
        } => {
            let fig = figure(id)?;
            let pairs = export::load_pairs(input_dir)
                .with_context(|| format!("reading records in {}", input_dir.display()))?;
            let rows = export::export(fig, &pairs, sizes, integrable_preset.as_deref(), output)?;
            println!("{} rows -> {}", rows.len(), output.display());
        }
        Command::Presets => {
            for p in PRESETS {
                let side = if p.integrable {
                    "integrable"
                } else {
                    "chaotic"
                };
                println!(
                    "{:<24} {:<10} partner {:<24} {}",
                    p.name, side, p.partner, p.summary
                );
            }
        }
        Command::Verify {
            acceptance,
            long_run,
            workers,
        } => {
            let checks = if *acceptance {
                let scale = if *long_run {
                    Scale::long()
                } else {
                    Scale::desk()
                };
                verify::acceptance(&Runner::new(*workers)?, &scale)?
            } else {
                verify::quick_suite()?
            };
            for c in &checks {
                println!("{c}");
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            let record = ErrorRecord::new(
                cli.command.name(),
                failing_config(&cli.command),
                &format!("{err:#}"),
            );
            let path = cli.command.output_dir().join(format!(
                "error-{}-{}.json",
                cli.command.name(),
                record.started_unix
            ));
            match write_json(&path, &record) {
                Ok(()) => eprintln!("error record -> {}", path.display()),
                Err(e) => eprintln!("cannot write error record: {e}"),
            }
            ExitCode::FAILURE
        }
    }
}

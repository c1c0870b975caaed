use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use omanip::oracle::{OracleConfig, DEFAULT_NODE_CAP};
use omanip::reductions::Flavor;
use omanip_cli::crosscheck::{crosscheck, CrosscheckConfig};
use omanip_cli::gen::{generate, GenKind};
use omanip_cli::instance::InstanceFile;
use omanip_cli::solve::{decide_file, explain, profile_file, CliError, SolverChoice};

#[derive(Parser)]
#[command(name = "omanip", version, about = "Decide online coalitional manipulation instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Auto,
    Oracle,
    Poly,
    VetoPnp,
    Veto3,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Qbf,
    PartitionPlurality,
    PartitionVeto3,
    Maxsatasg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Destructive,
    Complement,
}

#[derive(clap::Args)]
struct SearchOpts {
    /// Give up after this many game-tree nodes (exit code 3).
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    node_cap: u64,
    /// Evaluate the current voter's ballots in parallel.
    #[arg(long)]
    parallel: bool,
}

impl SearchOpts {
    fn config(&self) -> OracleConfig {
        OracleConfig {
            node_cap: self.node_cap,
            parallel: self.parallel,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print YES or NO for an instance file.
    Decide {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        solver: SolverArg,
        /// Print the auto routing table and the chosen solver to stderr.
        #[arg(long)]
        explain: bool,
        #[command(flatten)]
        search: SearchOpts,
    },
    /// Print one bit per candidate, in declaration order.
    Profile {
        file: PathBuf,
        #[command(flatten)]
        search: SearchOpts,
    },
    /// Build a labelled instance file from a source problem.
    Gen {
        #[arg(value_enum)]
        kind: KindArg,
        source: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of candidates for partition-plurality.
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, value_enum, default_value = "destructive")]
        flavor: FlavorArg,
    },
    /// Compare every applicable solver with the oracle on random instances.
    Crosscheck {
        #[arg(long, default_value_t = 3)]
        max_candidates: usize,
        #[arg(long, default_value_t = 3)]
        max_voters: usize,
        #[arg(long, default_value_t = 3)]
        max_weight: u64,
        /// Comma-separated, e.g. `plurality,veto,approval 2,kveto 1`.
        #[arg(long, default_value = "plurality,veto")]
        rules: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, hide = true)]
        mutant: bool,
    },
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_rules(s: &str) -> Result<Vec<omanip::RuleId>, CliError> {
    s.split(',')
        .map(|r| {
            let src = format!("candidates:\nsigma:\nrule: {}\nvoters:\n", r.trim());
            Ok(InstanceFile::parse(&src)
                .map_err(|e| CliError::Input(format!("bad rule '{r}': {}", e.msg)))?
                .rule)
        })
        .collect()
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Decide {
            file,
            solver,
            explain: show,
            search,
        } => {
            let inst = InstanceFile::parse(&read(&file)?)?;
            let choice = match solver {
                SolverArg::Auto => SolverChoice::Auto,
                SolverArg::Oracle => SolverChoice::Oracle,
                SolverArg::Poly => SolverChoice::Poly,
                SolverArg::VetoPnp => SolverChoice::VetoPnp,
                SolverArg::Veto3 => SolverChoice::Veto3,
                SolverArg::Greedy => SolverChoice::Greedy,
            };
            let (yes, used) = decide_file(&inst, choice, &search.config())?;
            if show {
                eprint!("{}", explain(used));
            }
            Ok(format!("{}\nsolver: {used}\n", if yes { "YES" } else { "NO" }))
        }
        Command::Profile { file, search } => {
            let inst = InstanceFile::parse(&read(&file)?)?;
            let bits = profile_file(&inst, &search.config())?;
            let mut s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
            s.push('\n');
            Ok(s)
        }
        Command::Gen {
            kind,
            source,
            out,
            m,
            flavor,
        } => {
            let kind = match kind {
                KindArg::Qbf => GenKind::Qbf,
                KindArg::PartitionPlurality => GenKind::PartitionPlurality {
                    m,
                    flavor: match flavor {
                        FlavorArg::Destructive => Flavor::Destructive,
                        FlavorArg::Complement => Flavor::ConstructiveComplement,
                    },
                },
                KindArg::PartitionVeto3 => GenKind::PartitionVeto3,
                KindArg::Maxsatasg => GenKind::Maxsatasg,
            };
            let text = generate(kind, &read(&source)?)?;
            match out {
                Some(path) => {
                    fs::write(&path, text)?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Command::Crosscheck {
            max_candidates,
            max_voters,
            max_weight,
            rules,
            seed,
            samples,
            mutant,
        } => {
            let cfg = CrosscheckConfig {
                max_candidates,
                max_voters,
                max_weight,
                rules: parse_rules(&rules)?,
                seed,
                samples,
                mutant,
            };
            Ok(crosscheck(&cfg)?.to_string())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! `biaslab`: obstruction tables, bias computations and unitary certificates.

mod commands;
mod groups;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "biaslab", version, about = "Bias invariants of (G,n)-complexes and their doubles")]
struct Cli {
    /// Print a text summary instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    /// Worker threads for cell-level parallelism.
    #[arg(long, global = true, env = "BIASLAB_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Obstruction row: m, r, chi_min, e, s, |B|, |B_Q|, gamma, gamma'.
    Obstruction {
        /// `m^d`, `m^d x t`, `5,5` or `q8 x p^3`.
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 2)]
        n: u64,
    },
    /// Parities of e(d,n) and s(d,n) against their tables, with witnesses.
    Parity {
        #[arg(long, default_value_t = 2)]
        n_min: u64,
        #[arg(long, default_value_t = 10)]
        n_max: u64,
        #[arg(long, default_value_t = 2)]
        d_min: u64,
        #[arg(long, default_value_t = 10)]
        d_max: u64,
        /// Print the CSV table in human mode.
        #[arg(long)]
        csv: bool,
    },
    /// Bias of X^r against X^1 for a preset family.
    Bias {
        /// `abelian 5,5` or `q8p 17`.
        #[arg(long, num_args = 2, value_names = ["KIND", "ARG"])]
        preset: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
    },
    /// Elementary unitary word lifting diag(a^2, a^-2) on the first plane.
    LiftSquare {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        eps: i64,
    },
    /// Doubles of X^r and X^1 with the Tate-level comparison map.
    Double {
        #[arg(long, num_args = 2, value_names = ["KIND", "ARG"])]
        preset: Vec<String>,
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        r: i64,
        /// Also check homology and metabolic forms.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Group homology of an abelian group, or homology of a presentation.
    Homology {
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        presentation: Option<String>,
    },
    /// Structure of (Z/m)^x and its quotients.
    Units {
        #[arg(long)]
        m: u64,
        #[arg(long, allow_hyphen_values = true)]
        class: Option<i64>,
    },
    /// Counting bounds for the number of doubles.
    TableExamples {
        #[arg(long, default_value_t = 3000)]
        max_m: u64,
    },
}

fn run(cmd: &Command) -> Result<commands::Outcome, commands::Failure> {
    match cmd {
        Command::Obstruction { group, n } => commands::obstruction(group, *n),
        Command::Parity { n_min, n_max, d_min, d_max, csv } => commands::parity(*n_min, *n_max, *d_min, *d_max, *csv),
        Command::Bias { preset, r } => commands::bias(&preset[0], &preset[1], *r),
        Command::LiftSquare { a, m, d, eps } => commands::lift(*a, *m, *d, *eps),
        Command::Double { preset, r, verify, seed } => commands::double_cmd(&preset[0], &preset[1], *r, *verify, *seed),
        Command::Homology { group, n, presentation } => commands::homology(group.as_deref(), *n, presentation.as_deref()),
        Command::Units { m, class } => commands::units(*m, *class),
        Command::TableExamples { max_m } => commands::table_examples(*max_m),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("--jobs must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().expect("thread pool");
    }
    let command: Vec<String> = std::env::args().skip(1).filter(|a| a != "--human").collect();
    match run(&cli.command) {
        Ok(out) => {
            if cli.human {
                println!("{}", out.summary);
                if !out.ok {
                    println!("verification FAILED");
                }
            } else {
                let doc = json!({ "command": command, "ok": out.ok, "result": out.result });
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(f) => {
            if cli.human {
                eprintln!("error: {}", f.message);
            } else {
                let doc = json!({ "command": command, "ok": false, "error": f.message, "exit_code": f.code });
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            }
            ExitCode::from(f.code as u8)
        }
    }
}

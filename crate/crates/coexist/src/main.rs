use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coexist::cli::{
    cmd_certify, cmd_check_paper, cmd_complete, cmd_enumerate, cmd_witness, CertifyArgs,
    CommandResult, CompleteArgs, EnumerateArgs, WitnessArgs,
};

/// Feasible and stable coexistence of sign patterns in Lotka-Volterra systems.
///
/// PATTERN is a flat sign string (growth signs, then B row by row, e.g.
/// "--+--+"), a compact string of n^2 signs (growth signs, then the
/// off-diagonal of B, unit diagonal positive), a network such as "n=3; grow 1; mutual 2 3; pred 1>2; comp 1 3",
/// or a path to a pattern JSON file.
///
/// Exit codes: 0 done, 1 check failed, 2 input error, 3 node budget exhausted.
#[derive(Parser)]
#[command(name = "coexist", version)]
struct Cli {
    /// Print the JSON payload instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all sign completions of a pattern.
    Complete {
        #[arg(allow_hyphen_values = true)]
        pattern: String,
        #[arg(long)]
        no_feasibility: bool,
        #[arg(long)]
        no_stability: bool,
        /// Drop the det B > 0 normalization when both checks are off.
        #[arg(long)]
        free_det_sign: bool,
        #[arg(long, default_value_t = 50_000_000)]
        max_nodes: u64,
        #[arg(long)]
        first_only: bool,
        /// Seed the search with only the signs of single entries.
        #[arg(long)]
        trivial_init: bool,
        /// Branch on the lowest-ranked unknown basis.
        #[arg(long)]
        lowest_rank: bool,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[arg(long)]
        allow_negative_diagonal: bool,
    },
    /// Decide a pattern with every check on; report its symmetry class.
    Certify {
        #[arg(allow_hyphen_values = true)]
        pattern: String,
        #[arg(long, default_value_t = 50_000_000)]
        max_nodes: u64,
        /// Witness trials spent on a possible pattern (0 skips the search).
        #[arg(long, default_value_t = 10_000)]
        witness_trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
    /// Classify every positive-diagonal pattern with n species.
    Enumerate {
        n: usize,
        #[arg(long)]
        canonical_only: bool,
        #[arg(long)]
        with_witness: bool,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: bool,
        /// Node budget per pattern.
        #[arg(long, default_value_t = 1_000_000)]
        max_nodes: u64,
        /// Required above n = 3.
        #[arg(long)]
        allow_large: bool,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
    /// Search for a feasible-stable point, or verify one from a file.
    Witness {
        #[arg(required_unless_present = "check_point", allow_hyphen_values = true)]
        pattern: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw x* > 0 and B, then set a = Bx*.
        #[arg(long, conflicts_with = "direct")]
        fixed_equilibrium: bool,
        /// Draw a and B directly.
        #[arg(long)]
        direct: bool,
        /// Smallest sampled magnitude.
        #[arg(long, default_value_t = 1e-2)]
        low: f64,
        /// Largest sampled magnitude.
        #[arg(long, default_value_t = 1e2)]
        high: f64,
        /// Verify the point in this JSON file instead of sampling.
        #[arg(long, value_name = "FILE")]
        check_point: Option<String>,
        #[arg(long)]
        csv: bool,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
    /// Run the reference checks and print a pass/fail matrix.
    CheckPaper {
        /// One of n2, n3, n4, counts, samples, properties, scope.
        #[arg(long)]
        section: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut csv = false;
    let result: CommandResult = match cli.command {
        Command::Complete {
            pattern,
            no_feasibility,
            no_stability,
            free_det_sign,
            max_nodes,
            first_only,
            trivial_init,
            lowest_rank,
            parallel,
            allow_negative_diagonal,
        } => cmd_complete(&CompleteArgs {
            pattern,
            no_feasibility,
            no_stability,
            free_det_sign,
            max_nodes,
            first_only,
            trivial_init,
            lowest_rank,
            parallel,
            allow_negative_diagonal,
        }),
        Command::Certify {
            pattern,
            max_nodes,
            witness_trials,
            seed,
            parallel,
        } => cmd_certify(&CertifyArgs {
            pattern,
            max_nodes,
            witness_trials,
            seed,
            parallel,
        }),
        Command::Enumerate {
            n,
            canonical_only,
            with_witness,
            trials,
            seed,
            csv: want_csv,
            max_nodes,
            allow_large,
            parallel,
        } => {
            csv = want_csv;
            cmd_enumerate(&EnumerateArgs {
                n,
                canonical_only,
                with_witness,
                trials,
                seed,
                max_nodes,
                allow_large,
                parallel,
            })
        }
        Command::Witness {
            pattern,
            trials,
            seed,
            fixed_equilibrium,
            direct,
            low,
            high,
            check_point,
            csv: want_csv,
            parallel,
        } => {
            csv = want_csv;
            cmd_witness(&WitnessArgs {
                pattern,
                trials,
                seed,
                fixed_equilibrium,
                direct,
                low,
                high,
                check_point,
                parallel,
            })
        }
        Command::CheckPaper { section } => cmd_check_paper(section.as_deref()),
    };
    match (&result.csv, csv, cli.json) {
        (Some(text), true, false) => print!("{text}"),
        (_, _, true) => println!(
            "{}",
            serde_json::to_string_pretty(&result.payload).expect("valid json")
        ),
        _ if result.exit == coexist::cli::Exit::Input => eprintln!("{}", result.summary),
        _ => println!("{}", result.summary),
    }
    ExitCode::from(result.exit as u8)
}

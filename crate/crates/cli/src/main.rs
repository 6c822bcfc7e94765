use clap::{Parser, Subcommand};

use membed_cli::{cmd_check_fmt, cmd_embed_fmt, cmd_region, cmd_sample, OutputFormat, EXIT_ERROR, EXIT_OK};

/// Decide whether a stochastic matrix embeds in a Markov semigroup
/// (M = e^Q for a rate matrix Q), with constructive generators for the
/// structured matrix classes.
#[derive(Parser)]
#[command(name = "membed", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the necessary-condition battery on a matrix file.
    ///
    /// Exit code 0: all conditions pass (proves nothing further);
    /// 2: proven non-embeddable; 1: I/O or validation error.
    Check {
        /// Matrix file (JSON {"dim":d,"rows":[[..]]} or flat CSV).
        path: String,
        /// Validation tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Output format.
        #[arg(long, default_value = "json")]
        format: OutputFormat,
    },
    /// Decide embeddability and print a JSON verdict report.
    ///
    /// Exit code 0: embeddable; 2: proven non-embeddable; 3: undecided;
    /// 1: I/O or validation error.
    Embed {
        /// Matrix file (JSON or CSV).
        path: String,
        /// Winding window per conjugate eigenvalue pair in the branch
        /// search fallback.
        #[arg(long = "branch-window", default_value_t = 8)]
        branch_window: usize,
        /// Validation tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Output format.
        #[arg(long, default_value = "json")]
        format: OutputFormat,
    },
    /// Rasterize an embeddable region (circ3, circ4, or sym3) to CSV.
    Region {
        /// Region kind: circ3 | circ4 | sym3.
        kind: String,
        /// Grid points per axis (max 2000 for circ3/sym3, 200 for circ4).
        grid: usize,
        /// Output CSV path.
        out: String,
    },
    /// Emit n reproducible (Q, e^Q) pairs as a JSON stream.
    Sample {
        /// Number of pairs.
        n: usize,
        /// Dimension, 2..=16.
        d: usize,
        /// RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check { path, tol, format } => {
            let (code, output) = cmd_check_fmt(&path, tol, format);
            print!("{output}");
            code
        }
        Command::Embed {
            path,
            branch_window,
            tol,
            format,
        } => {
            let (code, output) = cmd_embed_fmt(&path, branch_window, tol, format);
            print!("{output}");
            code
        }
        Command::Region { kind, grid, out } => match cmd_region(&kind, grid, &out) {
            Ok(()) => {
                println!("wrote {out}");
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        Command::Sample { n, d, seed } => match cmd_sample(n, d, seed) {
            Ok(stream) => {
                print!("{stream}");
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
    };
    std::process::exit(code);
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

/// Sphere fibrations over highly connected Poincaré duality complexes.
#[derive(Parser)]
#[command(name = "spherefib", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Mode {
    /// `1/(1 - k t^{n-1} + t^{2n-2})`, loop homology of `M_k`.
    Manifold,
    /// Loop homology of `#^{k-1}(S^n x S^{2n-1})`.
    ConnectedSum,
    /// Both, with the rank comparison `f_d = l_d - [d = n-1]`.
    Compare,
}

#[derive(Subcommand)]
enum Command {
    /// Build and certify a fibration from a problem file.
    Construct {
        #[arg(long)]
        input: PathBuf,
        /// Certificate path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Read the written certificate back and re-validate it.
        #[arg(long)]
        verify: bool,
    },
    /// Re-validate a certificate by rebuilding it.
    Verify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Hilbert series and Lie ranks of the loop homology algebras.
    Hilbert {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 12)]
        order: usize,
        #[arg(long, value_enum, default_value = "compare")]
        mode: Mode,
    },
    /// Regression suite of worked examples with known outcomes.
    Examples {
        #[arg(long)]
        table_dir: Option<PathBuf>,
    },
    /// Rank-2 pair search over OP2 # -OP2 under both signs of the n = 8 table.
    SearchN8 {
        #[arg(long, default_value_t = 5)]
        bound: i64,
        #[arg(long)]
        table_dir: Option<PathBuf>,
    },
    /// Operations on integral symmetric forms.
    FormTools {
        #[command(subcommand)]
        op: FormOp,
    },
    /// Quick internal consistency run.
    Selftest,
}

#[derive(Subcommand)]
pub enum FormOp {
    /// A primitive vector v with m | <v,v> (m = 3 or 8).
    Primitive {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long)]
        m: u32,
    },
    /// A characteristic vector and a basis with it as last element.
    Characteristic {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
    /// Diagonal form over F_p.
    Diagonalize {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long)]
        p: u64,
    },
    /// A unimodular matrix with the given primitive vector as last column.
    Extend {
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Construct { input, out, verify } => commands::construct(&input, out.as_deref(), verify),
        Command::Verify { input } => commands::verify(&input),
        Command::Hilbert { n, k, order, mode } => commands::hilbert(n, k, order, mode),
        Command::Examples { table_dir } => commands::examples(table_dir.as_deref()),
        Command::SearchN8 { bound, table_dir } => commands::search_n8(bound, table_dir.as_deref()),
        Command::FormTools { op } => commands::form_tools(op),
        Command::Selftest => commands::selftest(),
    };
    ExitCode::from(code)
}

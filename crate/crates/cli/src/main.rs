mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, Output};

/// Largest prime factors of cubic polynomial values: ring arithmetic,
/// prime ideals, units, sieve weights and exponential sums.
#[derive(Debug, Parser)]
#[command(name = "cubic-lpf", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Coefficients `c2,c1,c0` of `X^3 + c2 X^2 + c1 X + c0`.
    #[arg(long, global = true, default_value = "0,0,2", allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true, env = "CUBIC_THREADS", default_value_t = 1)]
    pub threads: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write the command's table as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// `key = value` file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the cofactor and resultant identities.
    Identities {
        /// Fully symbolic coefficients instead of `--poly`.
        #[arg(long)]
        generic: bool,
    },
    /// Roots of f modulo a prime.
    Roots {
        #[arg(long)]
        p: u64,
    },
    /// Hensel lift of a simple root to p^k.
    Lift {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        k: u32,
    },
    /// `k_α` by cofactors and by the ideal factorization.
    Kalpha {
        /// `a0,a1,a2`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Also test these n against the class.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        n: Vec<i64>,
    },
    /// Build an ideal from `p:root:e` factors, or factor a principal ideal.
    Ideal {
        #[arg(long, value_delimiter = ',', conflicts_with = "alpha")]
        factors: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        /// Check `I | m ⟺ N(I) | m` for `m ≤` this.
        #[arg(long)]
        check_upto: Option<u64>,
    },
    /// Unit search, fundamental domain and the norm-size constant.
    Units {
        #[arg(long, default_value_t = 20)]
        bound: i64,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 1000)]
        coord_bound: i64,
        /// Also fit `Σ 1/N(α)` over principal ideals up to this norm.
        #[arg(long)]
        harmonic: Option<u64>,
    },
    /// Density of n in (X, 2X] with P⁺(f(n)) > n^(1+c).
    Scan {
        #[arg(long = "X")]
        x: u64,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        c: Vec<f64>,
    },
    /// Lower-bound sieve weights.
    Weights {
        #[arg(long = "D")]
        d: u64,
        #[arg(long)]
        z: u64,
        #[arg(long)]
        check_upto: Option<u64>,
        /// Include every nonzero weight in the report.
        #[arg(long)]
        list: bool,
    },
    /// Exponential sums.
    Expsum {
        #[command(subcommand)]
        kind: ExpsumKind,
    },
    /// Toy-scale `S = X·S0 + S1`.
    S0s1 {
        #[arg(long = "X")]
        x: u64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        q_constant: f64,
        #[arg(long, default_value_t = 1.0)]
        b13_constant: f64,
        /// Lower bound for P⁻(q); default max(256, |c0|).
        #[arg(long)]
        floor: Option<u64>,
        /// Drop the q1, q2 window condition.
        #[arg(long)]
        no_windows: bool,
        #[arg(long, default_value_t = 20)]
        unit_bound: i64,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExpsumKind {
    /// `Σⱼ(n)` and `Eⱼ(n)` over given or random elements.
    Sigma {
        /// Elements `a0,a1,a2` separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        alphas: Option<String>,
        /// Otherwise draw this many admissible elements.
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 100)]
        coord_bound: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
        n: i64,
        #[arg(long, default_value_t = 1)]
        j: i64,
        #[arg(long = "X", default_value_t = 10_000)]
        x: u64,
    },
    /// Incomplete Kloosterman-type sums `Σ e(h·U·B̄13/q)` against the envelope.
    Kloos {
        #[arg(long, default_value_t = 20)]
        rows: usize,
        #[arg(long, default_value_t = 60)]
        coord_bound: i64,
        #[arg(long, default_value_t = 256)]
        floor: u64,
    },
    /// Fourier cut-off residual of ψ.
    Psi {
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long = "H", default_value_t = 1000)]
        h: u64,
        /// Random `(t, H)` samples with `H ≤ --H`, when `--t` is absent.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

fn emit(cli: &Cli, out: Output) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&out.json).expect("json") + "\n";
    match &cli.global.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    if let Some(path) = &cli.global.csv {
        let Some(table) = out.table else {
            return Err(CliError::Validation(format!("{} has no tabular output", out.command)));
        };
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let write = |w: &mut csv::Writer<std::fs::File>| -> csv::Result<()> {
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
            Ok(())
        };
        write(&mut w).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let (args, used) = match config::merge(args) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            let msg = e.to_string();
            for entry in &used {
                if msg.contains(&format!("--{}", entry.key)) {
                    eprintln!("note: --{} came from config line {}", entry.key, entry.line);
                }
            }
            return ExitCode::from(1);
        }
    };
    let result = commands::run(&cli).and_then(|out| {
        let status = out.invariant_failure.clone();
        emit(&cli, out)?;
        match status {
            Some(msg) => Err(CliError::Invariant(msg)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Invariant(msg)) => {
            eprintln!("invariant violated: {msg}");
            ExitCode::from(2)
        }
    }
}

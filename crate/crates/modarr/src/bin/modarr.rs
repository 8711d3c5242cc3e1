use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use modarr::chi::{chi_cross_check, coprime_nodes};
use modarr::report::{InputDigest, Payload, ResultDocument};
use modarr::{
    build_lattice, char_quasi_poly, hasse_dot, io, oracle, verify, Arrangement, Error, Limits,
    Result,
};

/// Characteristic quasi-polynomials and intersection lattices of integral
/// hyperplane arrangements modulo q.
#[derive(Parser)]
#[command(name = "modarr", version)]
struct Cli {
    /// Print a JSON result document instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Largest number of column subsets any enumeration may visit.
    #[arg(long, global = true, default_value_t = Limits::default().max_subsets)]
    max_subsets: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Matrix file: "m n" header, then m rows of n integers.
    matrix: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Periods and one constituent per divisor of rho0.
    Quasipoly(Input),
    /// Characteristic polynomial of the real arrangement.
    Chi {
        #[command(flatten)]
        input: Input,
        /// Cross-check by interpolating brute-force counts.
        #[arg(long)]
        oracle: bool,
    },
    /// Size of the complement at a single modulus.
    Count {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        q: u64,
        /// Also count by enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// Intersection lattice at a single modulus.
    Lattice {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        q: u64,
        /// Write the Hasse diagram in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check formulas against enumeration and lattice periodicity.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Largest modulus checked (default: q0 bound + 2 rho0).
        #[arg(long)]
        qmax: Option<u64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Quasipoly(_) => "quasipoly",
            Command::Chi { .. } => "chi",
            Command::Count { .. } => "count",
            Command::Lattice { .. } => "lattice",
            Command::Verify { .. } => "verify",
        }
    }

    fn input(&self) -> &Input {
        match self {
            Command::Quasipoly(i) => i,
            Command::Chi { input, .. }
            | Command::Count { input, .. }
            | Command::Lattice { input, .. }
            | Command::Verify { input, .. } => input,
        }
    }

    fn arguments(&self) -> Vec<(String, String)> {
        let mut args = vec![(
            "matrix".to_string(),
            self.input().matrix.display().to_string(),
        )];
        let mut push = |k: &str, v: String| args.push((k.to_string(), v));
        match self {
            Command::Quasipoly(_) => {}
            Command::Chi { oracle, .. } => push("oracle", oracle.to_string()),
            Command::Count { q, oracle, .. } => {
                push("q", q.to_string());
                push("oracle", oracle.to_string());
            }
            Command::Lattice { q, dot, .. } => {
                push("q", q.to_string());
                if let Some(d) = dot {
                    push("dot", d.display().to_string());
                }
            }
            Command::Verify { qmax, .. } => {
                if let Some(q) = qmax {
                    push("qmax", q.to_string());
                }
            }
        }
        args
    }
}

/// Payload and exit code for a successfully loaded arrangement.
fn execute(command: &Command, arr: &Arrangement) -> Result<(Payload, i32)> {
    match command {
        Command::Quasipoly(_) => {
            let qp = char_quasi_poly(arr)?;
            Ok((
                Payload::QuasiPolynomial {
                    rho0: qp.period(),
                    rho_e: arr.period_rho_e()?,
                    minimum_period: qp.minimum_period(),
                    quasi_polynomial: qp,
                },
                0,
            ))
        }
        Command::Chi { oracle, .. } => {
            let qp = char_quasi_poly(arr)?;
            let chi = qp.constituent(1).expect("1 divides every period");
            let cross_check = if *oracle {
                let nodes = coprime_nodes(qp.period(), arr.dimension() + 1);
                Some(chi_cross_check(arr, &chi, &nodes)?)
            } else {
                None
            };
            let code = i32::from(cross_check.as_ref().is_some_and(|c| !c.agrees));
            Ok((
                Payload::Chi {
                    coefficients: chi.coeffs().to_vec(),
                    polynomial: chi.display("t"),
                    factored: chi.factored("t").filter(|_| chi.degree() > Some(1)),
                    cross_check,
                },
                code,
            ))
        }
        Command::Count {
            q,
            oracle: use_oracle,
            ..
        } => {
            if *q == 0 {
                return Err(Error::ZeroModulus);
            }
            let formula = char_quasi_poly(arr)?.evaluate(*q)?;
            let brute = if *use_oracle {
                Some(oracle::count_complement(
                    arr.matrix(),
                    *q,
                    arr.limits().oracle_budget,
                )?)
            } else {
                None
            };
            let agree = brute.map(|b| BigInt::from(b) == formula);
            let code = i32::from(agree == Some(false));
            Ok((
                Payload::Count {
                    q: *q,
                    formula,
                    oracle: brute,
                    agree,
                },
                code,
            ))
        }
        Command::Lattice { q, dot, .. } => {
            if *q == 0 {
                return Err(Error::ZeroModulus);
            }
            let lattice = build_lattice(arr, *q)?;
            if let Some(path) = dot {
                std::fs::write(path, hasse_dot(&lattice))?;
            }
            let dot_path = dot.as_ref().map(|p| p.display().to_string());
            Ok((Payload::Lattice { lattice, dot_path }, 0))
        }
        Command::Verify { qmax, .. } => {
            let q_max = match qmax {
                Some(q) => *q,
                None => verify::default_q_max(arr)?,
            };
            let qp = char_quasi_poly(arr)?;
            let report = verify::run(arr, &qp, q_max)?;
            let code = report.exit_code();
            Ok((Payload::Verify { report }, code))
        }
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

    let command = &cli.command;
    let arguments = command.arguments();
    let path = command.input().matrix.display().to_string();
    let limits = Limits {
        max_subsets: cli.max_subsets,
        ..Limits::default()
    };
    let doc = match io::read_matrix(&command.input().matrix) {
        Err(e) => ResultDocument::from_error(command.name(), arguments, None, &e),
        Ok(c) => {
            let digest = InputDigest::new(&path, &c);
            match Arrangement::with_limits(c, limits).and_then(|arr| execute(command, &arr)) {
                Ok((payload, code)) => {
                    ResultDocument::new(command.name(), arguments, Some(digest), payload, code)
                }
                Err(e) => ResultDocument::from_error(command.name(), arguments, Some(digest), &e),
            }
        }
    };

    if cli.json {
        print!("{}", doc.to_json());
    } else if matches!(doc.payload, Payload::Error { .. }) {
        eprint!("{}", doc.render_text());
    } else {
        print!("{}", doc.render_text());
    }
    ExitCode::from(doc.exit_code as u8)
}

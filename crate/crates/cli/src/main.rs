use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tropcert::certificate::{certify_curves, degree, degree_by_hyperplane, verify, Certificate};
use tropcert::mixedvol::{mixed_volume, mixed_volume_recursive};
use tropcert::polynomial::{parse_system, LaurentSystem};
use tropcert::solver::{embed_slack, solve_square_numeric_with, SolverOptions};
use tropcert::tropism::{cyclic_generator, enumerate_pretropisms_with, group_orbits, EnumerationOptions};
use tropcert::{catalog, Error};

const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Parser, Debug)]
#[command(name = "tropcert", version, about = "Tropisms, Puiseux series certificates and degrees of solution curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for every random choice.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true, value_parser = parse_seed)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Orbits {
    Cyclic,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MvMethod {
    Lifting,
    Recursive,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pretropisms of a system.
    Tropisms {
        /// System file or bundled example name.
        input: String,
        /// Group tropisms into orbits of the cyclic shift.
        #[arg(long, value_enum)]
        orbits: Option<Orbits>,
        /// Group tropisms into orbits of the permutations given as cycles, e.g. "(1 2 3 4)".
        #[arg(long = "symmetry")]
        symmetry: Vec<String>,
        /// Keep rays with non-positive first coordinate too.
        #[arg(long)]
        all: bool,
    },
    /// Certificates for the solution curves of a system.
    Certify {
        input: String,
    },
    /// Verifies certificates (JSON) against a system.
    Verify {
        input: String,
        /// Certificate JSON: one certificate, a list, or a `certify` report.
        certificate: String,
    },
    /// Degree of the curve of each certificate by both formulas.
    Degree {
        /// Certificate JSON: one certificate, a list, or a `certify` report.
        certificate: String,
        /// Number of initial roots along the tropism.
        #[arg(long, default_value_t = 1)]
        roots: usize,
    },
    /// Mixed volume of the Newton polytopes of a square system.
    Mixedvol {
        input: String,
        #[arg(long, value_enum, default_value_t = MvMethod::Lifting)]
        method: MvMethod,
    },
    /// Roots of a square system (or one equation more, through a slack variable).
    Solve {
        input: String,
        #[arg(long, default_value_t = SolverOptions::default().max_paths)]
        max_paths: usize,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Computation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateLifting | Error::PathFailure(_) | Error::Singular | Error::RankDeficient => {
                Failure::Computation(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read_system(input: &str) -> Result<LaurentSystem, Failure> {
    let text = if Path::new(input).exists() {
        std::fs::read_to_string(input).map_err(|e| Failure::Input(format!("{input}: {e}")))?
    } else if let Some(t) = catalog::bundled_text(input) {
        t
    } else {
        return Err(Failure::Input(format!(
            "{input}: no such file or bundled example ({})",
            catalog::BUNDLED.join(", ")
        )));
    };
    Ok(parse_system(&text)?)
}

fn read_certificates(path: &str) -> Result<Vec<Certificate>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    let items: Vec<&Value> = if let Some(ts) = value.get("tropisms").and_then(Value::as_array) {
        ts.iter().filter_map(|t| t.get("certificates")?.as_array()).flatten().collect()
    } else if let Some(list) = value.as_array() {
        list.iter().collect()
    } else {
        vec![&value]
    };
    Ok(items.into_iter().map(Certificate::from_json).collect::<Result<_, _>>()?)
}

/// Parses cycles like "(1 2 3)(4 5)" into the permutation `i -> p[i]`.
fn parse_cycles(text: &str, n: usize) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Input(format!("bad permutation {text:?}"));
    let mut p: Vec<usize> = (0..n).collect();
    for cycle in text.split(')') {
        let cycle = cycle.trim();
        if cycle.is_empty() {
            continue;
        }
        let body = cycle.strip_prefix('(').ok_or_else(bad)?;
        let pts: Vec<usize> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().ok().filter(|&k| k >= 1 && k <= n).map(|k| k - 1).ok_or_else(bad))
            .collect::<Result<_, _>>()?;
        for (i, &a) in pts.iter().enumerate() {
            p[a] = pts[(i + 1) % pts.len()];
        }
    }
    tropcert::tropism::check_permutation(&p, n)?;
    Ok(p)
}

fn print(format: Format, text: String, value: Value) {
    match format {
        Format::Text => print!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("serializable")),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| Failure::Computation(e.to_string()))?;
    }
    let seed = cli.seed;
    match cli.command {
        Command::Tropisms { input, orbits, symmetry, all } => {
            let s = read_system(&input)?;
            let n = s.nvars();
            let opts = EnumerationOptions { positive_first: !all };
            let ts = enumerate_pretropisms_with(&s, &opts)?;
            let vs: Vec<Vec<i64>> = ts.iter().map(|t| t.v.to_i64s().ok_or(Error::ExponentOverflow)).collect::<Result<_, _>>()?;
            let mut gens: Vec<Vec<usize>> = symmetry.iter().map(|c| parse_cycles(c, n)).collect::<Result<_, _>>()?;
            if orbits == Some(Orbits::Cyclic) {
                gens.push(cyclic_generator(n));
            }
            let groups = if gens.is_empty() { None } else { Some(group_orbits(&vs, &gens)?) };
            let mut text = format!("tropisms: {}\n", vs.len());
            if let Some(g) = &groups {
                let sizes: Vec<String> = g.iter().map(|o| o.len().to_string()).collect();
                text += &format!("orbits: {} (sizes {})\n", g.len(), sizes.join(" "));
                for (k, o) in g.iter().enumerate() {
                    for &i in o {
                        text += &format!("orbit {}: {}\n", k + 1, ts[i].v);
                    }
                }
            } else {
                for t in &ts {
                    text += &format!("{}\n", t.v);
                }
            }
            let value = json!({
                "tropisms": vs,
                "orbits": groups,
            });
            print(cli.format, text, value);
        }
        Command::Certify { input } => {
            let s = read_system(&input)?;
            let report = certify_curves(&s, seed)?;
            print(cli.format, report.to_string(), report.to_json());
        }
        Command::Verify { input, certificate } => {
            let s = read_system(&input)?;
            let certs = read_certificates(&certificate)?;
            let mut text = String::new();
            let mut results = Vec::new();
            let mut all_ok = true;
            for c in &certs {
                let g = verify(&s, c)?;
                all_ok &= g.certifies();
                text += &format!("tropism {}: order gain {g}{}\n", c.tropism, if g.certifies() { "" } else { " (not verified)" });
                results.push(json!({"tropism": c.exponents, "verified_order_gain": g}));
            }
            print(cli.format, text, json!({"certificates": results, "verified": all_ok}));
            if !all_ok {
                return Err(Failure::Computation("a certificate failed verification".into()));
            }
        }
        Command::Degree { certificate, roots } => {
            let certs = read_certificates(&certificate)?;
            let mut text = String::new();
            let mut results = Vec::new();
            let mut total = 0;
            for c in &certs {
                let by_formula = degree(c, roots);
                let by_hyperplane = degree_by_hyperplane(c, seed)? * roots as i64;
                total += by_formula;
                text += &format!("tropism {}: degree {by_formula} (hyperplane section {by_hyperplane})\n", c.tropism);
                results.push(json!({"tropism": c.exponents, "degree": by_formula, "hyperplane": by_hyperplane}));
            }
            text += &format!("total {total}\n");
            print(cli.format, text, json!({"certificates": results, "total": total}));
        }
        Command::Mixedvol { input, method } => {
            let s = read_system(&input)?;
            if s.len() != s.nvars() {
                return Err(Failure::Input(format!("{} equations in {} unknowns", s.len(), s.nvars())));
            }
            let supports = s.supports();
            let mv = match method {
                MvMethod::Lifting => mixed_volume(&supports, seed)?,
                MvMethod::Recursive => mixed_volume_recursive(&supports)?,
            };
            print(cli.format, format!("{mv}\n"), json!({"mixed_volume": mv.to_string()}));
        }
        Command::Solve { input, max_paths } => {
            let mut s = read_system(&input)?;
            let embedded = s.len() == s.nvars() + 1;
            if embedded {
                s = embed_slack(&s, seed)?;
            }
            let opts = SolverOptions { seed, max_paths, ..SolverOptions::default() };
            let report = solve_square_numeric_with(&s, &opts)?;
            let names = s.names().to_vec();
            let mut text = format!(
                "{} paths: {} roots, {} at infinity, {} failed\n",
                report.paths,
                report.roots.len(),
                report.at_infinity,
                report.failures
            );
            let mut roots = Vec::new();
            for r in &report.roots {
                let coords: Vec<String> =
                    names.iter().zip(&r.coords).map(|(x, z)| format!("{x} = {:.12}{:+.12}*i", z.re, z.im)).collect();
                text += &format!("[{:?}, residual {:.1e}] {}\n", r.flag, r.residual, coords.join(", "));
                roots.push(json!({
                    "coords": r.coords.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                    "residual": r.residual,
                    "flag": r.flag,
                }));
            }
            let value = json!({
                "variables": names,
                "slack": embedded,
                "paths": report.paths,
                "at_infinity": report.at_infinity,
                "failures": report.failures,
                "roots": roots,
            });
            print(cli.format, text, value);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Computation(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

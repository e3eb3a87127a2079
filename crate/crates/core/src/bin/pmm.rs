//! Command-line front end for the principal-minor toolkit.
//!
//! Exit codes: 0 = success / member (witness emitted); 1 = refuted
//! (certificate emitted); 2 = error (malformed input, unsupported
//! request, or resource bound exceeded).

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pmm::action::{act_on_matrix, act_on_poly, parse_group_element};
use pmm::counterexamples::verify_family_bounded;
use pmm::detrep::{
    algorithm1_with, charpoly, is_in_image_general_bounded, necessary_conditions_hermitian,
    principal_minors, DetRep, MinorVector, NecessaryMode,
};
use pmm::error::Error;
use pmm::exactfield::{parse_literal, FieldId, FieldValue};
use pmm::matrix::Mat;
use pmm::mpoly::{parse_infer, Poly};
use pmm::rayleigh::delta;
use pmm::squares::{hermitian_square_factor, hyperdet, Outcome};

#[derive(Parser)]
#[command(
    name = "pmm",
    about = "Exact principal-minor computations: minor vectors, determinantal \
             representations, membership tests, and the counterexample family",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Coefficient field (Q, Qi, F2, F4, F<p>, F<p>:2); defaults to the
    /// PMM_FIELD environment variable, then Q.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Output format.
    #[arg(long, global = true, default_value = "text", value_parser = ["text", "json"])]
    format: String,
    /// Search size bound for membership operations.
    #[arg(long, global = true, default_value_t = 6)]
    bound: usize,
    /// Seed for all randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Principal minors of a square matrix (JSON with bitmask keys).
    Minors {
        /// Matrix as a JSON array of rows of field literals, or a file path.
        matrix: String,
    },
    /// The polynomial det(diag(x) + A) of a square matrix.
    Charpoly { matrix: String },
    /// The Rayleigh difference of a multiaffine polynomial.
    Delta {
        /// Polynomial text (variables x1, x2, ...), or a file path.
        poly: String,
        /// First variable (1-based).
        #[arg(short)]
        i: usize,
        /// Second variable (1-based).
        #[arg(short)]
        j: usize,
    },
    /// Factor a polynomial over the fixed field as g * conj(g).
    FactorHermitian { poly: String },
    /// Construct a determinantal representation of a polynomial or
    /// minor vector.
    Detrep {
        /// Polynomial text, minor-vector JSON, or a file path.
        input: String,
        /// Search for a Hermitian representation over the quadratic
        /// extension instead of a general one over the field itself.
        #[arg(long)]
        hermitian: bool,
    },
    /// Decide membership of a minor vector in the image of the
    /// principal minor map.
    CheckImage {
        /// Minor vector JSON ({"n":..,"field":..,"minors":{..}} or a
        /// plain array of 2^n literals), or a file path.
        minors: String,
        #[arg(long)]
        hermitian: bool,
    },
    /// The 2x2x2 hyperdeterminant of an 8-entry minor vector (n = 3).
    Hyperdet { minors: String },
    /// Evaluate the sampled necessary conditions for Hermitian
    /// membership.
    Certify {
        minors: String,
        /// Number of sampled group elements (the first is the identity).
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Use sign conditions for the real closure instead of
        /// norm/square conditions.
        #[arg(long)]
        real: bool,
    },
    /// Apply a group element (per-variable Mobius + permutation) to a
    /// polynomial or matrix.
    Act {
        /// Group element, e.g. "perm=[2,1]; g1=[[1,1],[0,1]]".
        element: String,
        /// Polynomial text or matrix JSON, or a file path.
        target: String,
    },
    /// Verify the counterexample family member on 2n+1 variables.
    Counterexample {
        #[arg(long)]
        n: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn field_of(common: &Common) -> Result<FieldId, Error> {
    let name = common
        .field
        .clone()
        .or_else(|| std::env::var("PMM_FIELD").ok())
        .unwrap_or_else(|| "Q".to_string());
    FieldId::parse_name(&name)
}

/// Inline literal or file contents.
fn load(arg: &str) -> String {
    if std::path::Path::new(arg).is_file() {
        std::fs::read_to_string(arg).unwrap_or_else(|_| arg.to_string())
    } else {
        arg.to_string()
    }
}

fn literal_of_value(v: &serde_json::Value, field: FieldId) -> Result<FieldValue, Error> {
    match v {
        serde_json::Value::String(s) => parse_literal(s, field),
        serde_json::Value::Number(k) => parse_literal(&k.to_string(), field),
        _ => Err(Error::parse(
            "matrix entry: expected a field literal string or number".to_string(),
            0,
        )),
    }
}

fn parse_matrix(src: &str, field: FieldId) -> Result<Mat, Error> {
    let text = load(src);
    let v: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::parse(format!("matrix: invalid JSON array of rows: {e}"), 0))?;
    let rows = v
        .as_array()
        .ok_or_else(|| Error::parse("matrix: expected a JSON array of rows".to_string(), 0))?;
    let n = rows.len();
    let mut entries = Vec::with_capacity(n * n);
    for row in rows {
        let cells = row
            .as_array()
            .ok_or_else(|| Error::parse("matrix row: expected a JSON array".to_string(), 0))?;
        if cells.len() != n {
            return Err(Error::parse(
                format!("matrix row: expected {n} entries, got {}", cells.len()),
                0,
            ));
        }
        for c in cells {
            entries.push(literal_of_value(c, field)?);
        }
    }
    if n == 0 {
        return Err(Error::parse("matrix: empty".to_string(), 0));
    }
    Ok(Mat::new(field, n, entries))
}

fn parse_minors(src: &str, field: FieldId) -> Result<MinorVector, Error> {
    let text = load(src);
    let v: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::parse(format!("minor vector: invalid JSON: {e}"), 0))?;
    match &v {
        serde_json::Value::Object(_) => MinorVector::from_json(&v),
        serde_json::Value::Array(arr) => {
            let len = arr.len();
            let n = len.trailing_zeros() as usize;
            if len == 0 || 1usize << n != len {
                return Err(Error::parse(
                    format!("minor vector: array length {len} is not a power of two"),
                    0,
                ));
            }
            let minors = arr
                .iter()
                .map(|x| literal_of_value(x, field))
                .collect::<Result<Vec<_>, _>>()?;
            MinorVector::new(field, n, minors)
        }
        _ => Err(Error::parse(
            "minor vector: expected a JSON object or array".to_string(),
            0,
        )),
    }
}

fn parse_poly_arg(src: &str, field: FieldId) -> Result<Poly, Error> {
    parse_infer(load(src).trim(), field)
}

/// Polynomial text, or minor-vector JSON (object/array) converted to
/// its polynomial.
fn parse_poly_or_minors(src: &str, field: FieldId) -> Result<Poly, Error> {
    let text = load(src);
    let t = text.trim();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(parse_minors(t, field)?.poly())
    } else {
        parse_infer(t, field)
    }
}

fn emit_outcome(
    out: Outcome<DetRep>,
    format: &str,
) -> ExitCode {
    match out {
        Outcome::Witness(rep) => {
            if format == "json" {
                println!("{}", rep.to_json());
            } else {
                println!("member");
                println!("{}", rep.to_json());
            }
            ExitCode::SUCCESS
        }
        Outcome::Refuted { condition } => {
            if format == "json" {
                println!(
                    "{}",
                    serde_json::json!({ "member": false, "certificate": condition })
                );
            } else {
                println!("not a member");
                println!("{condition}");
            }
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let common = &cli.common;
    let field = field_of(common)?;
    match &cli.command {
        Command::Minors { matrix } => {
            let a = parse_matrix(matrix, field)?;
            println!("{}", principal_minors(&a).to_json());
            Ok(ExitCode::SUCCESS)
        }
        Command::Charpoly { matrix } => {
            let a = parse_matrix(matrix, field)?;
            let f = charpoly(&a);
            if common.format == "json" {
                println!("{}", serde_json::json!({ "poly": f.to_string() }));
            } else {
                println!("{f}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Delta { poly, i, j } => {
            let f = parse_poly_arg(poly, field)?;
            let nv = f.nvars;
            if *i < 1 || *j < 1 || *i > nv || *j > nv || i == j {
                return Err(Error::Unsupported(format!(
                    "delta needs distinct 1-based variable indices within 1..={nv}"
                )));
            }
            let d = delta(&f, i - 1, j - 1);
            if common.format == "json" {
                println!("{}", serde_json::json!({ "poly": d.to_string() }));
            } else {
                println!("{d}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::FactorHermitian { poly } => {
            let f = parse_poly_arg(poly, field)?;
            match hermitian_square_factor(&f)? {
                Outcome::Witness(w) => {
                    if common.format == "json" {
                        println!("{}", serde_json::json!({ "witness": w.to_string() }));
                    } else {
                        println!("witness: {w}");
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Outcome::Refuted { condition } => {
                    if common.format == "json" {
                        println!("{}", serde_json::json!({ "certificate": condition }));
                    } else {
                        println!("not a Hermitian square");
                        println!("{condition}");
                    }
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Detrep { input, hermitian } => {
            let f = parse_poly_or_minors(input, field)?;
            let out = if *hermitian {
                algorithm1_with(&f, 20)?
            } else {
                is_in_image_general_bounded(&pmm::detrep::poly_to_minors(&f)?, common.bound)?
            };
            Ok(emit_outcome(out, &common.format))
        }
        Command::CheckImage { minors, hermitian } => {
            let mv = parse_minors(minors, field)?;
            let out = if *hermitian {
                pmm::detrep::is_in_image_hermitian(&mv)?
            } else {
                is_in_image_general_bounded(&mv, common.bound)?
            };
            Ok(emit_outcome(out, &common.format))
        }
        Command::Hyperdet { minors } => {
            let mv = parse_minors(minors, field)?;
            if mv.n != 3 {
                return Err(Error::Unsupported(format!(
                    "hyperdet needs a 3-variable minor vector (got n = {})",
                    mv.n
                )));
            }
            let h = hyperdet(&mv.minors);
            if common.format == "json" {
                println!("{}", serde_json::json!({ "hyperdet": h.to_string() }));
            } else {
                println!("{h}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify {
            minors,
            samples,
            real,
        } => {
            let mv = parse_minors(minors, field)?;
            let mode = if *real {
                NecessaryMode::RealClosure
            } else {
                NecessaryMode::HermitianSquares
            };
            let report = necessary_conditions_hermitian(&mv, mode, common.seed, *samples)?;
            if common.format == "json" {
                let arr: Vec<serde_json::Value> = report
                    .conditions
                    .iter()
                    .map(|c| {
                        serde_json::json!({
                            "name": c.name,
                            "value": c.value,
                            "pass": c.pass,
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::json!({ "conditions": arr, "all_pass": report.all_pass() })
                );
            } else {
                for c in &report.conditions {
                    println!(
                        "{}: {} [{}]",
                        c.name,
                        c.value,
                        if c.pass { "pass" } else { "FAIL" }
                    );
                }
                println!("all: {}", if report.all_pass() { "pass" } else { "FAIL" });
            }
            Ok(if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Act { element, target } => {
            let text = load(target);
            let t = text.trim();
            if t.starts_with('[') {
                let a = parse_matrix(t, field)?;
                let g = parse_group_element(&load(element), field, a.n)?;
                let (beta, b) = act_on_matrix(&g, &a)?;
                let rep = DetRep::new(b);
                if common.format == "json" {
                    let mut j = rep.to_json();
                    j["beta"] = serde_json::Value::String(beta.to_string());
                    println!("{j}");
                } else {
                    println!("beta: {beta}");
                    println!("{}", rep.to_json());
                }
            } else {
                let f = parse_infer(t, field)?;
                let g = parse_group_element(&load(element), field, f.nvars)?;
                let degs: Vec<u32> = (0..f.nvars)
                    .map(|i| f.deg(i).unwrap_or(0).max(1))
                    .collect();
                let gf = act_on_poly(&g, &f, &degs)?;
                if common.format == "json" {
                    println!("{}", serde_json::json!({ "poly": gf.to_string() }));
                } else {
                    println!("{gf}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Counterexample { n } => {
            let report = verify_family_bounded(*n, common.bound.max(4))?;
            if common.format == "json" {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.render());
            }
            Ok(if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

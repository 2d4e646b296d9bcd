use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use skewpit::circuit::{PowerfulBP, PowerfulSkewCircuit};
use skewpit::oracle::{self, DEFAULT_MONOMIAL_BUDGET, DEFAULT_WORD_BUDGET};
use skewpit::pit::{self, Epsilon, PitParams, Verdict};
use skewpit::polyring::Ring;
use skewpit::slp::{slp_equal, NdSlp};
use skewpit::wreath::{circuit_to_wordslp, cwp, CwpVerdict, GroupSpec, WordSlp};
use skewpit::Error;

#[derive(Parser)]
#[command(name = "skewpit", version, about = "Identity testing for powerful skew circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct TestArgs {
    /// Rejection probability per trial, as `num/den`.
    #[arg(long, default_value = "1/2")]
    epsilon: Epsilon,
    /// Trials per prime.
    #[arg(long, default_value_t = 40)]
    trials: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the full result as JSON.
    #[arg(long)]
    json: bool,
}

impl TestArgs {
    fn params(&self) -> Result<PitParams, Error> {
        PitParams::new(self.epsilon, self.trials, self.seed)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Test whether a circuit or branching program computes zero.
    Pit {
        file: PathBuf,
        /// `z` or `fp:<p>`.
        #[arg(long, default_value = "z")]
        ring: Ring,
        #[command(flatten)]
        test: TestArgs,
    },
    /// Test whether two SLPs derive the same picture.
    SlpEq {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        test: TestArgs,
    },
    /// Test whether a compressed word is the identity of a wreath product.
    Cwp {
        file: PathBuf,
        /// For example `Z x Z_2 wr Z^2`.
        #[arg(long)]
        group: GroupSpec,
        #[command(flatten)]
        test: TestArgs,
    },
    /// Expand a circuit or program into a polynomial, picture or word.
    Expand {
        file: PathBuf,
        /// Monomial budget for circuits, cell budget for SLPs.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Multiply out a compressed word in a wreath product and print the
    /// element as JSON.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        group: GroupSpec,
        /// Maximum number of word symbols.
        #[arg(long, default_value_t = DEFAULT_WORD_BUDGET)]
        budget: u64,
    },
    /// Convert between circuits, branching programs and words.
    Convert {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Circuit,
    Bp,
    Word,
}

enum Input {
    Circuit(PowerfulSkewCircuit),
    Bp(PowerfulBP),
    Slp(NdSlp),
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidParam(format!("cannot read {}: {e}", path.display())))
}

fn first_keyword(text: &str) -> &str {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("")
}

fn load(path: &Path) -> Result<Input, Error> {
    let text = read(path)?;
    let head = first_keyword(&text);
    if head.starts_with("NODE") {
        Ok(Input::Bp(text.parse()?))
    } else if head.starts_with("DIM") || head.starts_with("ALPHABET") || head.contains("->") {
        Ok(Input::Slp(text.parse()?))
    } else {
        Ok(Input::Circuit(text.parse()?))
    }
}

fn load_circuit(path: &Path) -> Result<PowerfulSkewCircuit, Error> {
    match load(path)? {
        Input::Circuit(c) => Ok(c),
        Input::Bp(b) => b.to_circuit(),
        Input::Slp(_) => Err(Error::InvalidParam(format!(
            "{} holds an SLP, expected a circuit or branching program",
            path.display()
        ))),
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn code(ok: bool) -> ExitCode {
    ExitCode::from(if ok { 0 } else { 1 })
}

#[derive(Serialize)]
struct SlpEqJson {
    verdict: &'static str,
    epsilon: Epsilon,
    trials: u32,
    seed: u64,
    shapes_differ: bool,
    report: Option<pit::PitReport>,
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Pit { file, ring, test } => {
            let c = load_circuit(&file)?;
            let r = pit::pit(&c, ring, &test.params()?)?;
            if test.json {
                print_json(&r);
            } else {
                println!("{}", r.verdict);
            }
            Ok(code(r.verdict == Verdict::Zero))
        }
        Command::SlpEq { first, second, test } => {
            let s1: NdSlp = read(&first)?.parse()?;
            let s2: NdSlp = read(&second)?.parse()?;
            let params = test.params()?;
            let v = slp_equal(&s1, &s2, &params)?;
            let word = if v.equal { "equal" } else { "not-equal" };
            if test.json {
                print_json(&SlpEqJson {
                    verdict: word,
                    epsilon: params.epsilon,
                    trials: params.trials,
                    seed: params.seed,
                    shapes_differ: v.shapes_differ,
                    report: v.report,
                });
            } else {
                println!("{word}");
            }
            Ok(code(v.equal))
        }
        Command::Cwp { file, group, test } => {
            let w: WordSlp = read(&file)?.parse()?;
            let r = cwp(&w, &group, &test.params()?)?;
            if test.json {
                print_json(&r);
            } else {
                println!(
                    "{}",
                    match r.verdict {
                        CwpVerdict::Identity => "identity",
                        CwpVerdict::NotIdentity => "not-identity",
                    }
                );
            }
            Ok(code(r.verdict == CwpVerdict::Identity))
        }
        Command::Expand { file, budget } => {
            match load(&file)? {
                Input::Slp(s) => {
                    let p = s.expand(budget.unwrap_or(DEFAULT_WORD_BUDGET))?;
                    print!("{}", p.render(s.alphabet()));
                }
                Input::Circuit(c) => expand_circuit(&c, budget)?,
                Input::Bp(b) => expand_circuit(&b.to_circuit()?, budget)?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { file, group, budget } => {
            let w: WordSlp = read(&file)?.parse()?;
            let gens = w.generators(&group, budget)?;
            let e = oracle::simulate_word(&gens, &group, budget)?;
            print_json(&e.to_json());
            Ok(code(e.is_identity()))
        }
        Command::Convert { file, to } => {
            let out = match (load(&file)?, to) {
                (Input::Circuit(c), Target::Bp) => PowerfulBP::from_circuit(&c)?.to_text(),
                (Input::Circuit(c), Target::Word) => circuit_to_wordslp(&c)?.to_string(),
                (Input::Circuit(c), Target::Circuit) => {
                    c.check()?;
                    c.to_string()
                }
                (Input::Bp(b), Target::Circuit) => b.to_circuit()?.to_string(),
                (Input::Bp(b), Target::Bp) => b.to_text(),
                (Input::Bp(b), Target::Word) => circuit_to_wordslp(&b.to_circuit()?)?.to_string(),
                (Input::Slp(_), _) => {
                    return Err(Error::InvalidParam("SLPs cannot be converted".into()))
                }
            };
            print!("{out}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn expand_circuit(c: &PowerfulSkewCircuit, budget: Option<u64>) -> Result<(), Error> {
    let p = oracle::expand_circuit(c, budget.unwrap_or(DEFAULT_MONOMIAL_BUDGET))?;
    println!("{}", p.to_sparse(c.nvars()));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::BudgetExceeded(_) => 3,
                _ => 2,
            })
        }
    }
}

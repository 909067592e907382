use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use katlcl::domain::{builtin_domain, parse_domain_file, GaloisInsertion};
use katlcl::logic::sexp::{parse_derivation, print_derivation};
use katlcl::logic::{conclude, parse_triple, synthesize, translate, validity, verify, Direction, SynthError, System};
use katlcl::model::axioms::{check_kat_axioms, AxiomOptions, DEFAULT_SEED};
use katlcl::model::file::parse_model_file;
use katlcl::model::{ConcreteKind, Instance};
use katlcl::semantics::concrete_post;
use katlcl::Error;

mod examples;

const EXIT_FAIL: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_SEMANTIC: u8 = 3;
const EXIT_SYNTH: u8 = 4;

#[derive(Parser)]
#[command(name = "katlcl", version, about = "Local completeness logic over finite KAT models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Setting {
    /// Model file.
    #[arg(long)]
    model: PathBuf,
    /// Domain file, or the name of a built-in domain (trivial, parity, sign, interval).
    #[arg(long)]
    domain: String,
    #[arg(long, value_parser = parse_system)]
    system: System,
}

#[derive(Subcommand)]
enum Command {
    /// Prints the concrete postcondition of a term. A `top{..}` precondition
    /// selects the codomain semantics.
    Post {
        #[arg(long)]
        model: PathBuf,
        term: String,
        pre: String,
        /// Also print the err component.
        #[arg(long)]
        err: bool,
    },
    /// Checks the validity of a triple.
    Check {
        #[command(flatten)]
        setting: Setting,
        #[arg(long)]
        triple: String,
    },
    /// Checks a derivation file.
    Verify {
        #[command(flatten)]
        setting: Setting,
        #[arg(long)]
        derivation: PathBuf,
    },
    /// Builds a derivation for a valid triple.
    Prove {
        #[command(flatten)]
        setting: Setting,
        #[arg(long)]
        triple: String,
        /// Write the derivation here instead of standard output.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Moves a derivation between lck/ul or lcil/il.
    Translate {
        #[arg(long)]
        model: PathBuf,
        /// System of the input derivation.
        #[arg(long, value_parser = parse_system)]
        system: System,
        #[arg(long)]
        derivation: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Runs the bundled worked examples.
    Examples {
        #[arg(long)]
        only: Option<String>,
    },
    /// Checks the KAT and diamond laws on a model.
    Axioms {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn parse_system(s: &str) -> Result<System, String> {
    System::parse(s).ok_or_else(|| format!("unknown system `{s}` (expected lck, ul, lcil, il, lctk or lctil)"))
}

/// What went wrong, and the exit code that reports it.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_parse() { EXIT_PARSE } else { EXIT_SEMANTIC },
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_PARSE,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn load_model(path: &Path) -> Result<Instance, Failure> {
    parse_model_file(&read(path)?).map_err(|e| Failure::from(e.at(path.display())))
}

fn load_domain(spec: &str, inst: &Instance, kind: ConcreteKind) -> Result<GaloisInsertion, Failure> {
    let path = Path::new(spec);
    if path.exists() {
        parse_domain_file(&read(path)?, &inst.model, kind).map_err(|e| Failure::from(e.at(path.display())))
    } else {
        Ok(builtin_domain(spec, &inst.model, kind)?)
    }
}

fn load_setting(s: &Setting) -> Result<(Instance, GaloisInsertion), Failure> {
    let inst = load_model(&s.model)?;
    let d = load_domain(&s.domain, &inst, s.system.kind())?;
    Ok((inst, d))
}

fn emit(text: &str, to: Option<&Path>) -> Result<(), Failure> {
    match to {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| Failure {
            code: EXIT_SEMANTIC,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Post { model, term, pre, err } => {
            let inst = load_model(&model)?;
            let kind = if pre.trim_start().starts_with("top") { ConcreteKind::ToppCodomains } else { ConcreteKind::Tests };
            let t = inst.parse_term(&term)?;
            let p = inst.parse_set(&pre, kind)?;
            let post = concrete_post(&inst, kind, &t, &p)?;
            let mut line = format!("ok: {}", inst.format_set(&post.ok, kind));
            if err {
                line.push_str(&format!(" err: {}", inst.format_set(&post.err, kind)));
            }
            println!("{line}");
            Ok(0)
        }
        Command::Check { setting, triple } => {
            let (inst, d) = load_setting(&setting)?;
            let j = parse_triple(&inst, setting.system, &triple)?;
            let v = validity(setting.system, &d, &inst, &j)?;
            println!("{v}");
            Ok(if v.is_pass() { 0 } else { EXIT_FAIL })
        }
        Command::Verify { setting, derivation } => {
            let (inst, d) = load_setting(&setting)?;
            let src = read(&derivation)?;
            let dv = parse_derivation(&inst, setting.system, &src).map_err(|e| Failure::from(e.at(derivation.display())))?;
            let v = verify(setting.system, &d, &inst, &dv)?;
            println!("{v}");
            if let Ok(j) = conclude(setting.system, &d, &inst, &dv)? {
                println!("{}", j.display(&inst, setting.system.kind()));
            }
            Ok(if v.is_pass() { 0 } else { EXIT_FAIL })
        }
        Command::Prove { setting, triple, emit: to } => {
            let (inst, d) = load_setting(&setting)?;
            let j = parse_triple(&inst, setting.system, &triple)?;
            match synthesize(setting.system, &d, &inst, &j) {
                Ok(dv) => {
                    emit(&print_derivation(&inst, setting.system, &dv), to.as_deref())?;
                    Ok(0)
                }
                Err(SynthError::Invalid(v)) => {
                    println!("{v}");
                    Ok(EXIT_FAIL)
                }
                Err(SynthError::Core(e)) => Err(e.into()),
                Err(e) => Err(Failure {
                    code: EXIT_SYNTH,
                    message: e.to_string(),
                }),
            }
        }
        Command::Translate { model, system, derivation, emit: to } => {
            let inst = load_model(&model)?;
            let src = read(&derivation)?;
            let dv = parse_derivation(&inst, system, &src).map_err(|e| Failure::from(e.at(derivation.display())))?;
            let dir = if system.is_local() { Direction::ToUnder } else { Direction::ToLocal };
            let out = translate(system, dir, &inst, &dv)?;
            let target = match system {
                System::Lck => System::Ul,
                System::Ul => System::Lck,
                System::Lcil => System::Il,
                _ => System::Lcil,
            };
            emit(&print_derivation(&inst, target, &out), to.as_deref())?;
            Ok(0)
        }
        Command::Examples { only } => examples::run(only.as_deref()),
        Command::Axioms { model, seed } => {
            let inst = load_model(&model)?;
            let report = check_kat_axioms(
                &inst.model,
                AxiomOptions {
                    seed,
                    ..AxiomOptions::default()
                },
            )?;
            for f in &report.families {
                let mode = if f.exhaustive { "exhaustive" } else { "sampled" };
                match &f.witness {
                    None => println!("ok   {:<22} {} cases ({mode})", f.name, f.checked),
                    Some(w) => println!("FAIL {:<22} {w}", f.name),
                }
            }
            println!("seed {}", report.seed);
            Ok(if report.passed() { 0 } else { EXIT_FAIL })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

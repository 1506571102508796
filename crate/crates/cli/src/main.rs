use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};

mod config;
mod formula;
mod machine;
mod search;
mod util;

/// Exit status of a command: 0 yes, 1 no, 2 limit hit, 3 bad input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Yes = 0,
    No = 1,
    Limit = 2,
}

/// Build, run and check counter programs, VASS and counter automata.
#[derive(Parser, Debug)]
#[command(name = "vass-forge", version)]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// File of `key=value` lines supplying default flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compile a formula into a counter program and a manifest.
    Compile(formula::CompileArgs),
    /// Evaluate a formula by brute force.
    Eval(formula::EvalArgs),
    /// Initial configuration of a compiled formula.
    InitConfig(formula::InitConfigArgs),
    /// Zero-reachability for a counter program or a VASS.
    Reach(search::ReachArgs),
    /// Synthesize a witness run of a compiled formula.
    Witness(formula::WitnessArgs),
    /// Emit a gadget as a counter program.
    Gadget(formula::GadgetArgs),
    /// Run a Turing machine.
    TmRun(machine::TmRunArgs),
    /// Compile a Turing machine into a 3-counter automaton.
    TmCompile(machine::TmCompileArgs),
    /// Run a counter automaton.
    CaRun(machine::CaRunArgs),
    /// Simulate a counter automaton by a VASS.
    CaToVass(machine::CaToVassArgs),
    /// Convert a counter program into a VASS.
    ToVass(search::ToVassArgs),
    /// Graphviz export of a program, VASS or counter automaton.
    Dot(search::DotArgs),
}

fn dispatch(cli: &Cli) -> anyhow::Result<Status> {
    let json = cli.json;
    match &cli.command {
        Command::Compile(a) => formula::compile(a, json),
        Command::Eval(a) => formula::eval(a, json),
        Command::InitConfig(a) => formula::init_config(a, json),
        Command::Reach(a) => search::reach(a, json),
        Command::Witness(a) => formula::witness(a, json),
        Command::Gadget(a) => formula::gadget(a, json),
        Command::TmRun(a) => machine::tm_run(a, json),
        Command::TmCompile(a) => machine::tm_compile(a),
        Command::CaRun(a) => machine::ca_run(a, json),
        Command::CaToVass(a) => machine::ca_to_vass(a, json),
        Command::ToVass(a) => search::to_vass(a),
        Command::Dot(a) => search::dot(a),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match config::merge(&Cli::command(), argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(3);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let status = dispatch(&cli);
    let _ = std::io::stdout().flush();
    match status {
        Ok(s) => ExitCode::from(s as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

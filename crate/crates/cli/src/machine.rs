use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use serde_json::json;
use vass_forge::engine::{ReachResult, SearchLimits};
use vass_forge::tm::{self, ca_to_vass as to_vass, initial_vector, tm_to_ca, CaVerdict, CounterAutomaton, TmVerdict, TuringMachine};

use crate::util::{parse_count, parse_vector, pretty, print_json, read_input, write_output};
use crate::Status;

#[derive(Args, Debug)]
pub struct TmRunArgs {
    /// Machine as JSON (`-` for stdin).
    pub machine: PathBuf,
    #[arg(long, default_value = "")]
    pub input: String,
    /// Most tape cells the run may span.
    #[arg(long, default_value_t = 1_000_000)]
    pub space: usize,
    /// Most steps.
    #[arg(long, value_parser = parse_count, default_value_t = 10_000_000)]
    pub fuel: u64,
}

pub fn tm_run(a: &TmRunArgs, json: bool) -> anyhow::Result<Status> {
    let m = TuringMachine::from_json_str(&read_input(&a.machine)?)?;
    let out = tm::tm_run(&m, &a.input, a.space, a.fuel)?;
    if json {
        print_json(&serde_json::to_value(&out)?);
    } else {
        println!("{:?} after {} steps, space {}", out.verdict, out.steps, out.space);
    }
    Ok(match out.verdict {
        TmVerdict::Accept => Status::Yes,
        TmVerdict::Reject => Status::No,
        TmVerdict::SpaceExceeded | TmVerdict::FuelExceeded => Status::Limit,
    })
}

#[derive(Args, Debug)]
pub struct TmCompileArgs {
    /// Machine as JSON (`-` for stdin).
    pub machine: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub fn tm_compile(a: &TmCompileArgs) -> anyhow::Result<Status> {
    let m = TuringMachine::from_json_str(&read_input(&a.machine)?)?;
    write_output(a.out.as_deref(), &pretty(&tm_to_ca(&m).to_json()))?;
    Ok(Status::Yes)
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct CaInput {
    /// Input word, encoded as `(num(w), 0, 0)`. Needs an automaton compiled
    /// from a machine.
    #[arg(long)]
    pub input: Option<String>,
    /// Input vector, e.g. `7,0,0`.
    #[arg(long)]
    pub vector: Option<String>,
}

impl CaInput {
    fn vector(&self, a: &CounterAutomaton) -> anyhow::Result<Vec<u64>> {
        match (&self.input, &self.vector) {
            (Some(w), _) => {
                let Some(codec) = a.codec() else {
                    bail!("the automaton has no alphabet; give --vector");
                };
                Ok(initial_vector(w, codec)?)
            }
            (None, Some(v)) => parse_vector(v),
            (None, None) => bail!("give --input or --vector"),
        }
    }
}

fn load_ca(path: &Path) -> anyhow::Result<CounterAutomaton> {
    let text = read_input(path)?;
    CounterAutomaton::from_json_str(&text).with_context(|| format!("loading automaton {}", path.display()))
}

#[derive(Args, Debug)]
pub struct CaRunArgs {
    /// Automaton as JSON; stdin if absent or `-`.
    #[arg(default_value = "-")]
    pub automaton: PathBuf,
    #[command(flatten)]
    pub input: CaInput,
    #[arg(long, value_parser = parse_count, default_value_t = 100_000_000)]
    pub fuel: u64,
    /// Print every visited configuration.
    #[arg(long)]
    pub trace: bool,
}

pub fn ca_run(a: &CaRunArgs, json: bool) -> anyhow::Result<Status> {
    let ca = load_ca(&a.automaton)?;
    let input = a.input.vector(&ca)?;
    let run = tm::ca_run(&ca, &input, a.fuel)?;
    if json {
        let mut j = json!({
            "verdict": run.verdict,
            "steps": run.steps,
            "zero_tests": run.zero_tests,
            "max_counter": run.max_counter,
        });
        if a.trace {
            j["trace"] = run
                .trace
                .iter()
                .map(|(q, v)| json!({ "state": ca.states()[*q], "values": v }))
                .collect();
        }
        print_json(&j);
    } else {
        if a.trace {
            for (q, v) in &run.trace {
                println!("{} {:?}", ca.states()[*q], v);
            }
        }
        println!(
            "{:?} after {} steps ({} zero tests, largest counter {})",
            run.verdict, run.steps, run.zero_tests, run.max_counter
        );
    }
    Ok(match run.verdict {
        CaVerdict::Accept => Status::Yes,
        CaVerdict::Reject => Status::No,
        CaVerdict::FuelExceeded => Status::Limit,
    })
}

#[derive(Args, Debug)]
pub struct CaToVassArgs {
    /// Automaton as JSON (`-` for stdin).
    pub automaton: PathBuf,
    /// Bound on every counter of the automaton.
    #[arg(long)]
    pub n: u64,
    /// Zero tests to provision.
    #[arg(long)]
    pub tests: u64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Where to write the manifest.
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
    /// Input word, for the initial valuation in the manifest.
    #[arg(long, conflicts_with = "vector")]
    pub input: Option<String>,
    /// Input vector, for the initial valuation in the manifest.
    #[arg(long)]
    pub vector: Option<String>,
    /// Also decide zero reachability from that input.
    #[arg(long)]
    pub reach: bool,
    #[arg(long, value_parser = parse_count, default_value_t = 20_000_000)]
    pub max_states: u64,
}

pub fn ca_to_vass(a: &CaToVassArgs, json: bool) -> anyhow::Result<Status> {
    let ca = load_ca(&a.automaton)?;
    let v = to_vass(&ca, a.n, a.tests)?;
    let input = match (&a.input, &a.vector) {
        (None, None) => None,
        (input, vector) => Some(
            CaInput {
                input: input.clone(),
                vector: vector.clone(),
            }
            .vector(&ca)?,
        ),
    };
    let mut manifest = serde_json::to_value(v.manifest())?;
    if let Some(x) = &input {
        let vals: serde_json::Map<String, serde_json::Value> = v
            .vass
            .counters()
            .iter()
            .zip(v.initial(x)?)
            .map(|(c, k)| (c.clone(), json!(k)))
            .collect();
        manifest["values"] = serde_json::Value::Object(vals);
    }
    if let Some(p) = &a.manifest {
        std::fs::write(p, pretty(&manifest)).with_context(|| format!("writing {}", p.display()))?;
    }
    if !a.reach {
        write_output(a.out.as_deref(), &pretty(&v.vass.to_json()))?;
        return Ok(Status::Yes);
    }
    if let Some(p) = &a.out {
        std::fs::write(p, pretty(&v.vass.to_json())).with_context(|| format!("writing {}", p.display()))?;
    }
    let Some(x) = input else {
        bail!("--reach needs --input or --vector");
    };
    let limits = SearchLimits::states(usize::try_from(a.max_states).unwrap_or(usize::MAX));
    let (status, verdict) = match v.zero_reach(&x, &limits)? {
        ReachResult::Reachable(_) => (Status::Yes, "reachable"),
        ReachResult::Unreachable { .. } => (Status::No, "unreachable"),
        ReachResult::LimitExceeded(_) => (Status::Limit, "limit-exceeded"),
    };
    if json {
        print_json(&json!({ "verdict": verdict, "manifest": manifest }));
    } else {
        println!("{verdict}");
    }
    Ok(status)
}

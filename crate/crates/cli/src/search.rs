use std::path::PathBuf;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::Args;
use serde_json::json;
use vass_forge::engine::{zero_reach, ReachResult, SearchLimits, SlackPrune, System};
use vass_forge::program::{is_zero_terminating, parse_program, program_to_dot, validate_run, Run};
use vass_forge::tm::CounterAutomaton;
use vass_forge::vass::{program_to_vass, Vass};
use vass_forge::Program;

use crate::formula::{initial_from_manifest, load_manifest};
use crate::util::{parse_assignments, parse_bytes, parse_count, pretty, print_json, read_input, write_output};
use crate::Status;

const DEFAULT_MAX_STATES: u64 = 20_000_000;

/// A counter program, or a VASS when the file is JSON.
enum Model {
    Program(Program),
    Vass(Vass),
}

impl Model {
    fn load(text: &str) -> anyhow::Result<Model> {
        if text.trim_start().starts_with('{') {
            Ok(Model::Vass(Vass::from_json_str(text)?))
        } else {
            Ok(Model::Program(parse_program(text)?))
        }
    }

    fn system(&self) -> System {
        match self {
            Model::Program(p) => System::from(p),
            Model::Vass(v) => System::from(v),
        }
    }

    fn counters(&self) -> Vec<String> {
        match self {
            Model::Program(p) => p.counters().iter().cloned().collect(),
            Model::Vass(v) => v.counters().to_vec(),
        }
    }

    /// True iff `run` is a valid run from the start to the target with
    /// every counter zero at the end.
    fn certifies(&self, run: &Run<u64>) -> bool {
        match self {
            Model::Program(p) => validate_run(p, run.iter()) && is_zero_terminating(p, run.iter()),
            Model::Vass(v) => {
                let (Some(first), Some(last)) = (run.first(), run.last()) else {
                    return false;
                };
                first.line == v.initial() + 1
                    && last.line == v.final_state() + 1
                    && last.is_zero()
                    && run.configs.windows(2).all(|w| {
                        v.successors(w[0].line - 1, &w[0].values)
                            .iter()
                            .any(|(q, vals)| *q + 1 == w[1].line && *vals == w[1].values)
                    })
            }
        }
    }

    fn run_json(&self, run: &Run<u64>) -> serde_json::Value {
        match self {
            Model::Program(p) => run.to_json(p),
            Model::Vass(v) => run
                .iter()
                .map(|c| {
                    let vals: serde_json::Map<String, serde_json::Value> =
                        v.counters().iter().zip(&c.values).map(|(k, x)| (k.clone(), json!(x))).collect();
                    json!({ "state": v.states()[c.line - 1], "values": vals })
                })
                .collect(),
        }
    }
}

#[derive(Args, Debug)]
pub struct ReachArgs {
    /// Counter program, or VASS as JSON (`-` for stdin).
    pub program: PathBuf,
    /// Initial counter values, e.g. `x=2,y=3`; others start at 0.
    #[arg(long, value_name = "ASSIGNMENTS", conflicts_with = "n")]
    pub init: Option<String>,
    /// For compiled formulas: take the initial values from the manifest at
    /// this `N`.
    #[arg(long)]
    pub n: Option<u64>,
    /// Free variable values for `--n`.
    #[arg(long, value_name = "ASSIGNMENTS", requires = "n")]
    pub free: Option<String>,
    /// Manifest for `--n`. Defaults to the program path with a `.json`
    /// extension.
    #[arg(long, value_name = "PATH", requires = "n")]
    pub manifest: Option<PathBuf>,
    /// Most configurations to visit, e.g. `5e6`.
    #[arg(long, value_parser = parse_count, default_value_t = DEFAULT_MAX_STATES)]
    pub max_states: u64,
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Per-counter upper bounds, e.g. `x=10`.
    #[arg(long, value_name = "ASSIGNMENTS")]
    pub cap: Option<String>,
    /// Wall-clock budget in seconds.
    #[arg(long, value_name = "SECONDS")]
    pub time_limit: Option<f64>,
    /// Worker threads. The search itself is sequential, so any value gives
    /// the same verdict and certificate.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Write the certificate as JSON.
    #[arg(long, value_name = "PATH")]
    pub emit_run: Option<PathBuf>,
}

fn index_of(counters: &[String], name: &str) -> anyhow::Result<usize> {
    counters
        .iter()
        .position(|c| c == name)
        .ok_or_else(|| anyhow!("unknown counter `{name}`"))
}

/// Bytes per stored configuration, roughly: the values plus hash-set and
/// parent bookkeeping.
fn state_cost(dim: usize) -> u64 {
    dim as u64 * 8 + 64
}

pub fn reach(a: &ReachArgs, json: bool) -> anyhow::Result<Status> {
    if a.threads == 0 {
        bail!("--threads must be positive");
    }
    let model = Model::load(&read_input(&a.program)?)?;
    let counters = model.counters();
    let mut init = vec![0u64; counters.len()];
    let mut slack = None;
    if let Some(n) = a.n {
        let path = match &a.manifest {
            Some(p) => p.clone(),
            None if a.program.as_os_str() == "-" => bail!("reading the program from stdin needs --manifest"),
            None => a.program.with_extension("json"),
        };
        let m = load_manifest(&path)?;
        let values = initial_from_manifest(&m, n, a.free.as_deref())?;
        if values.len() != counters.len() {
            bail!("manifest lists {} counters, the program has {}", values.len(), counters.len());
        }
        for (c, v) in values {
            init[index_of(&counters, &c)?] = v;
        }
        let testing: Vec<&str> = m["layout"]["testing"]
            .as_array()
            .map(|t| t.iter().filter_map(|x| x.as_str()).collect())
            .unwrap_or_default();
        if let [u1, u2] = testing[..] {
            slack = Some(SlackPrune {
                u1: index_of(&counters, u1)?,
                u2: index_of(&counters, u2)?,
                n,
            });
        }
    } else {
        for (c, v) in parse_assignments(a.init.as_deref().unwrap_or(""))? {
            init[index_of(&counters, &c)?] = v;
        }
    }
    let caps = match &a.cap {
        None => None,
        Some(s) => {
            let mut caps = vec![None; counters.len()];
            for (c, v) in parse_assignments(s)? {
                caps[index_of(&counters, &c)?] = Some(v);
            }
            Some(caps)
        }
    };
    let mut max_states = a.max_states;
    if let Ok(mem) = std::env::var("VASS_FORGE_MAX_MEM") {
        let bytes = parse_bytes(&mem).ok_or_else(|| anyhow!("VASS_FORGE_MAX_MEM: bad size `{mem}`"))?;
        max_states = max_states.min(bytes / state_cost(counters.len()));
    }
    let limits = SearchLimits {
        max_states: Some(usize::try_from(max_states).unwrap_or(usize::MAX)),
        max_depth: a.max_depth,
        caps,
        time: a.time_limit.map(Duration::from_secs_f64),
        slack,
    };

    let result = zero_reach(&model.system(), &init, &limits);
    let (status, out) = match &result {
        ReachResult::Reachable(run) => {
            if !model.certifies(run) {
                bail!("internal error: the certificate does not validate");
            }
            if let Some(p) = &a.emit_run {
                std::fs::write(p, pretty(&model.run_json(run))).with_context(|| format!("writing {}", p.display()))?;
            }
            let text = format!("reachable: certificate of {} configurations", run.len());
            (Status::Yes, (text, json!({ "verdict": "reachable", "configurations": run.len() })))
        }
        ReachResult::Unreachable { explored, exhaustive } => {
            let text = format!("unreachable: {explored} configurations explored");
            let j = json!({ "verdict": "unreachable", "explored": explored, "exhaustive": exhaustive });
            (Status::No, (text, j))
        }
        ReachResult::LimitExceeded(stats) => {
            let by = stats.stopped_by.as_deref().unwrap_or("a limit");
            let text = format!("limit exceeded: stopped by {by} after {} configurations", stats.explored);
            (Status::Limit, (text, json!({ "verdict": "limit-exceeded", "stats": stats })))
        }
    };
    if json {
        print_json(&out.1);
    } else {
        println!("{}", out.0);
    }
    Ok(status)
}

#[derive(Args, Debug)]
pub struct ToVassArgs {
    /// Counter program (`-` for stdin).
    pub program: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub fn to_vass(a: &ToVassArgs) -> anyhow::Result<Status> {
    let p: Program = parse_program(&read_input(&a.program)?)?;
    let v = program_to_vass(&p)?;
    write_output(a.out.as_deref(), &pretty(&v.to_json()))?;
    Ok(Status::Yes)
}

#[derive(Args, Debug)]
pub struct DotArgs {
    /// Counter program, VASS JSON or counter automaton JSON (`-` for stdin).
    pub file: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub fn dot(a: &DotArgs) -> anyhow::Result<Status> {
    let text = read_input(&a.file)?;
    let dot = if text.trim_start().starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(&text).context("parsing JSON")?;
        if v.get("q0").is_some() {
            bail!("this is a Turing machine; compile it with tm-compile first");
        }
        let is_ca = v["transitions"]
            .as_array()
            .is_some_and(|ts| ts.iter().any(|t| t.get("zeta").is_some()));
        if is_ca {
            CounterAutomaton::from_json_str(&text)?.to_dot()
        } else {
            Vass::from_json_str(&text)?.to_dot()
        }
    } else {
        program_to_dot(&parse_program::<u64>(&text)?)
    };
    write_output(a.out.as_deref(), &dot)?;
    Ok(Status::Yes)
}

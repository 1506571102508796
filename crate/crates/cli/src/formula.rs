use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::Args;
use serde_json::json;
use vass_forge::engine::run_stats;
use vass_forge::fo::{compile as compile_query, eval_oracle, parse_query, CompiledProgram, Query};
use vass_forge::gadgets::{by_name, GADGET_NAMES};
use vass_forge::program::{is_zero_terminating, render_program, validate_run};
use vass_forge::Poly;

use crate::util::{parse_assignments, pretty, print_json, read_input, stdout, write_output};
use crate::Status;

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// File holding the formula (`-` for stdin).
    #[arg(long, value_name = "PATH")]
    pub formula: Option<PathBuf>,
    /// The formula itself.
    #[arg(long, value_name = "TEXT")]
    pub expr: Option<String>,
}

impl Source {
    pub fn query(&self) -> anyhow::Result<Query> {
        let text = match (&self.formula, &self.expr) {
            (Some(p), _) => read_input(p)?,
            (None, Some(t)) => t.clone(),
            (None, None) => bail!("give --formula or --expr"),
        };
        Ok(parse_query(&text)?)
    }
}

/// Values of the free variables of `free` in declaration order.
pub fn free_values(free: &[String], given: Option<&str>) -> anyhow::Result<Vec<u64>> {
    let given = parse_assignments(given.unwrap_or(""))?;
    if let Some((k, _)) = given.iter().find(|(k, _)| !free.contains(k)) {
        bail!("`{k}` is not a free variable");
    }
    free.iter()
        .map(|x| {
            given
                .iter()
                .find(|(k, _)| k == x)
                .map(|(_, v)| *v)
                .ok_or_else(|| anyhow!("no value for free variable `{x}` (use --free {x}=...)"))
        })
        .collect()
}

#[derive(Args, Debug)]
pub struct CompileArgs {
    #[command(flatten)]
    pub source: Source,
    /// Where to write the program; stdout if absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Where to write the manifest. Defaults to the program path with a
    /// `.json` extension.
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
}

pub fn compile(a: &CompileArgs, json: bool) -> anyhow::Result<Status> {
    let cp = compile_query(&a.source.query()?)?;
    let text = render_program(&cp.program);
    let manifest = serde_json::to_value(cp.manifest())?;
    let manifest_path = a
        .manifest
        .clone()
        .or_else(|| a.out.as_ref().map(|p| p.with_extension("json")));
    if let Some(p) = &manifest_path {
        std::fs::write(p, pretty(&manifest)).with_context(|| format!("writing {}", p.display()))?;
    }
    match &a.out {
        Some(p) => {
            write_output(Some(p), &text)?;
            let summary = json!({
                "program": p,
                "manifest": manifest_path,
                "lines": cp.program.len(),
                "counters": cp.program.counters().len(),
                "K": cp.k,
                "M": cp.m,
            });
            if json {
                print_json(&summary);
            } else {
                println!(
                    "wrote {} ({} lines, {} counters, K = {}, M = {})",
                    p.display(),
                    cp.program.len(),
                    cp.program.counters().len(),
                    cp.k,
                    cp.m
                );
            }
        }
        None if json => print_json(&json!({ "program": text, "manifest": manifest })),
        None => stdout(&text)?,
    }
    Ok(Status::Yes)
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub source: Source,
    /// Size of the segment `{0..N}`.
    #[arg(long)]
    pub n: u64,
    /// Free variable values, e.g. `x=2,y=3`.
    #[arg(long, value_name = "ASSIGNMENTS")]
    pub free: Option<String>,
}

pub fn eval(a: &EvalArgs, json: bool) -> anyhow::Result<Status> {
    let q = a.source.query()?;
    let vals = free_values(&q.free, a.free.as_deref())?;
    let v = eval_oracle(&q, a.n, &vals)?;
    if json {
        print_json(&json!({ "value": v }));
    } else {
        println!("{v}");
    }
    Ok(if v { Status::Yes } else { Status::No })
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("model").required(true).args(["formula", "expr", "manifest"])))]
pub struct InitConfigArgs {
    #[arg(long, value_name = "PATH")]
    pub formula: Option<PathBuf>,
    #[arg(long, value_name = "TEXT")]
    pub expr: Option<String>,
    /// Manifest written by `compile`, instead of a formula.
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_name = "ASSIGNMENTS")]
    pub free: Option<String>,
}

pub fn init_config(a: &InitConfigArgs, json: bool) -> anyhow::Result<Status> {
    let values: Vec<(String, u64)> = match &a.manifest {
        Some(p) => {
            let m = load_manifest(p)?;
            initial_from_manifest(&m, a.n, a.free.as_deref())?
        }
        None => {
            let src = Source {
                formula: a.formula.clone(),
                expr: a.expr.clone(),
            };
            let cp = compile_query(&src.query()?)?;
            let vals = free_values(&cp.query.free, a.free.as_deref())?;
            let init = cp.initial_configuration(a.n, &vals)?;
            cp.program.counters().iter().cloned().zip(init.values).collect()
        }
    };
    if json {
        let map: serde_json::Map<String, serde_json::Value> = values.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        print_json(&serde_json::Value::Object(map));
    } else {
        for (k, v) in &values {
            println!("{k} = {v}");
        }
    }
    Ok(Status::Yes)
}

pub fn load_manifest(path: &Path) -> anyhow::Result<serde_json::Value> {
    let text = read_input(path)?;
    serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
}

fn string_list(v: &serde_json::Value, what: &str) -> anyhow::Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| anyhow!("manifest: `{what}` is not a list"))?
        .iter()
        .map(|x| x.as_str().map(str::to_string).ok_or_else(|| anyhow!("manifest: `{what}` holds a non-string")))
        .collect()
}

/// Evaluates the reduction map of a manifest at `N = n` and the given
/// free values.
pub fn initial_from_manifest(m: &serde_json::Value, n: u64, free: Option<&str>) -> anyhow::Result<Vec<(String, u64)>> {
    let free_names = string_list(&m["layout"]["free"], "layout.free")?;
    let vals = free_values(&free_names, free)?;
    for (x, v) in free_names.iter().zip(&vals) {
        if *v > n {
            bail!("value {v} of `{x}` is outside 0..={n}");
        }
    }
    for c in string_list(&m["layout"]["constants"], "layout.constants")? {
        let a: u64 = c
            .trim_start_matches("_c")
            .parse()
            .with_context(|| format!("manifest: bad constant counter `{c}`"))?;
        if a > n {
            bail!("constant {a} exceeds N = {n}");
        }
    }
    let entries = m["reduction_map"]
        .as_array()
        .ok_or_else(|| anyhow!("manifest: missing reduction_map"))?;
    entries
        .iter()
        .map(|e| {
            let counter = e["counter"].as_str().ok_or_else(|| anyhow!("manifest: entry without counter"))?;
            let poly: Poly = e["poly"]
                .as_str()
                .ok_or_else(|| anyhow!("manifest: entry without poly"))?
                .parse()
                .with_context(|| format!("manifest: polynomial of `{counter}`"))?;
            let env = |v: &str| -> Option<i128> {
                if v == "N" {
                    return Some(n as i128);
                }
                free_names.iter().position(|x| x == v).map(|i| vals[i] as i128)
            };
            let value = poly
                .eval_with(env)
                .ok_or_else(|| anyhow!("cannot evaluate the polynomial of `{counter}`"))?;
            let value = u64::try_from(value).map_err(|_| anyhow!("initial value of `{counter}` is {value}"))?;
            Ok((counter.to_string(), value))
        })
        .collect()
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_name = "ASSIGNMENTS")]
    pub free: Option<String>,
    /// Write the run as JSON.
    #[arg(long, value_name = "PATH")]
    pub emit_run: Option<PathBuf>,
}


pub fn witness(a: &WitnessArgs, json: bool) -> anyhow::Result<Status> {
    let cp: CompiledProgram = compile_query(&a.source.query()?)?;
    let vals = free_values(&cp.query.free, a.free.as_deref())?;
    let Some(compact) = cp.witness_run(a.n, &vals)? else {
        if json {
            print_json(&json!({ "value": false }));
        } else {
            println!("false: no witness run");
        }
        return Ok(Status::No);
    };
    let run = compact.to_run(&cp.program);
    let valid = validate_run(&cp.program, run.iter());
    let terminating = is_zero_terminating(&cp.program, run.iter());
    let stats = run_stats(&cp.program, run.iter(), &cp.stats_meta(a.n));
    let component = stats.zero_tests - stats.drain_zero_tests;
    let budget = cp.test_budget.eval_n(a.n);
    if let Some(p) = &a.emit_run {
        std::fs::write(p, pretty(&run.to_json(&cp.program))).with_context(|| format!("writing {}", p.display()))?;
    }
    if !(valid && terminating) {
        bail!("synthesized run failed validation (valid: {valid}, zero-terminating: {terminating})");
    }
    if json {
        print_json(&json!({
            "value": true,
            "configurations": run.len(),
            "zero_tests": component,
            "drain_zero_tests": stats.drain_zero_tests,
            "budget": budget.map(|b| b.to_string()),
            "hat_violations": stats.hat_violations,
            "valid": valid,
            "zero_terminating": terminating,
        }));
    } else {
        println!("true: witness run of {} configurations", run.len());
        println!("zero tests: {component} (budget {}), drain: {}", budget.map_or("overflow".into(), |b| b.to_string()), stats.drain_zero_tests);
        println!("hat violations: {}", stats.hat_violations);
    }
    Ok(Status::Yes)
}

#[derive(Args, Debug)]
pub struct GadgetArgs {
    /// One of: zero-test, copy, addition, not-addition, multiplication,
    /// not-multiplication, exists.
    pub name: String,
    /// Evaluate the budget and the entry valuation at this `N`.
    #[arg(long)]
    pub n: Option<u64>,
    /// Entry values of the gadget's counters (needs `--n`).
    #[arg(long, value_name = "ASSIGNMENTS", requires = "n")]
    pub init: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Where to write the manifest; without it the manifest goes into a
    /// comment at the top of the program.
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
}

pub fn gadget(a: &GadgetArgs, json: bool) -> anyhow::Result<Status> {
    let comp = by_name(&a.name).map_err(|e| anyhow!("{e} (known: {})", GADGET_NAMES.join(", ")))?;
    let inst = comp.instantiate()?;
    let mut manifest = serde_json::to_value(comp.manifest(&inst.program))?;
    if let Some(n) = a.n {
        let tests = inst.default_tests(n);
        let given = parse_assignments(a.init.as_deref().unwrap_or(""))?;
        let given: Vec<(&str, u64)> = given.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        let init = inst.initial(n, &given, tests)?;
        let init: serde_json::Map<String, serde_json::Value> = inst
            .program
            .counters()
            .iter()
            .zip(init)
            .map(|(c, v)| (c.clone(), json!(v)))
            .collect();
        manifest["n"] = json!(n);
        manifest["budget"] = json!(tests);
        manifest["initial"] = serde_json::Value::Object(init);
    }
    let mut text = render_program(&inst.program);
    match &a.manifest {
        Some(p) => std::fs::write(p, pretty(&manifest)).with_context(|| format!("writing {}", p.display()))?,
        None if !json => text = format!("# manifest: {manifest}\n{text}"),
        None => {}
    }
    if json && a.out.is_none() {
        print_json(&json!({ "program": text, "manifest": manifest }));
    } else {
        write_output(a.out.as_deref(), &text)?;
    }
    Ok(Status::Yes)
}

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use gonal_core::tables::{
    diff_reference, emit, is_classified, Computed, Emit, Format, GammaTable, ReferenceData,
    ReferenceTable, TABLE_IDS,
};
use gonal_core::{
    criterion_set, minimality_witness, CoeffVector, CriterionSet, EscalationConfig,
    EscalationResult, Escalator, Truant,
};
use log::{info, warn};
use serde_json::json;

use crate::cache::{self, TruantCache};
use crate::{Command, RunArgs};

/// Bad arguments; exits with status 2 like clap's own usage errors.
#[derive(Debug)]
pub struct Failure(String);

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(2)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for Failure {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Failure(msg.into()).into()
}

pub fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Escalate(args) => {
            let (m, n) = pair(&args)?;
            let run = escalate(m, n, &args)?;
            write_result(&run, &args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Criterion {
            run: args,
            witnesses,
        } => {
            let (m, n) = pair(&args)?;
            let cs = criterion_set(&escalate(m, n, &args)?)?;
            if witnesses {
                check_witnesses(&cs)?;
            }
            write_result(&cs, &args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { run: args, vector } => verify(&args, &vector),
        Command::Tables {
            run: args,
            id,
            subset,
        } => tables(&args, id, &subset),
    }
}

fn pair(args: &RunArgs) -> Result<(u64, u64)> {
    match (args.m, args.n) {
        (Some(m), Some(n)) => Ok((m, n)),
        _ => Err(usage("both --m and --n are required")),
    }
}

fn config(m: u64, n: u64, args: &RunArgs) -> Result<EscalationConfig> {
    let jobs = match args.jobs {
        Some(j) => j as usize,
        None => std::thread::available_parallelism().map_or(1, |p| p.get()),
    };
    let mut config = EscalationConfig::new(m, n).bound(args.bound).jobs(jobs);
    if let Some(d) = args.max_depth {
        config = config.max_depth(d);
    }
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}

/// An escalator for `(m, n)` with the truant cache attached unless disabled.
fn escalator(m: u64, n: u64, args: &RunArgs) -> Result<Escalator> {
    let mut esc = Escalator::new(config(m, n, args)?)?;
    if args.no_cache {
        return Ok(esc);
    }
    let Some(dir) = cache::resolve_dir(args.cache_dir.as_deref()) else {
        return Ok(esc);
    };
    match TruantCache::open(&dir, m, n, args.bound) {
        Ok((cache, known)) => {
            info!(
                "cache {}: {} known truants",
                cache.path().display(),
                known.len()
            );
            esc.engine().seed(known);
            esc.engine_mut().set_sink(Arc::new(cache));
        }
        Err(e) => warn!("truant cache in {} unavailable: {e}", dir.display()),
    }
    Ok(esc)
}

fn escalate(m: u64, n: u64, args: &RunArgs) -> Result<EscalationResult> {
    let run = escalator(m, n, args)?.run()?;
    info!("m={m} n={n}: {} new universal", run.new_universal().count());
    Ok(run)
}

fn write_result<T: Emit>(value: &T, args: &RunArgs) -> Result<()> {
    write_text(&emit(value, args.format.into())?, args.output.as_deref())?;
    if let Some(path) = &args.json {
        let text = emit(value, Format::Json)?;
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn write_text(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_witnesses(cs: &CriterionSet) -> Result<()> {
    for &g in &cs.elements {
        let b = minimality_witness(cs.m, cs.n, g, cs, cs.bound)?;
        info!("witness for {g}: {b}");
    }
    info!("{} minimality witnesses verified", cs.elements.len());
    Ok(())
}

fn verify(args: &RunArgs, vector: &str) -> Result<ExitCode> {
    let (m, n) = pair(args)?;
    let a: CoeffVector = vector
        .parse()
        .map_err(|e| usage(format!("bad vector {vector:?}: {e}")))?;
    let engine = escalator(m, n, args)?;
    let engine = engine.engine();
    let tight = a.first().is_some_and(|a1| a1 >= n);
    let truant = engine.truant(&a);
    let universal = tight && truant.is_above_bound();
    let new = universal && engine.is_new(&a, &[]);
    let listed = reference_row(m, n, &a)?;

    let text = match args.format.into() {
        Format::Json => {
            let doc = json!({
                "schema": gonal_core::tables::JSON_SCHEMA_VERSION,
                "kind": "verify",
                "m": m,
                "n": n,
                "bound": args.bound,
                "vector": a,
                "tight": tight,
                "truant": Option::<u64>::from(truant),
                "universal": universal,
                "new": new,
                "reference": listed.as_ref().map(|(id, row)| json!({"table": id, "row": row})),
            });
            format!("{doc}\n")
        }
        Format::Markdown | Format::Csv => {
            let label = if is_classified(m, n) {
                "new"
            } else {
                "candidate for new"
            };
            let truant = match truant {
                Truant::Finite(t) => t.to_string(),
                Truant::AboveBound => format!("> {}", args.bound),
            };
            let mut s = format!(
                "vector    {a}\nm, n      {m}, {n}\nbound     {}\n",
                args.bound
            );
            s += &format!("tight     {}\n", yes(tight));
            s += &format!("truant    {truant}\n");
            s += &format!("universal {}\n", yes(universal));
            s += &format!("{label}: {}\n", yes(new));
            match &listed {
                Some((id, row)) => s += &format!("listed    table {id}, row \"{row}\"\n"),
                None => s += "listed    no\n",
            }
            s
        }
    };
    write_text(&text, args.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// The candidate-table row listing `a`, if any table covers `(m, n)`.
fn reference_row(m: u64, n: u64, a: &CoeffVector) -> Result<Option<(u32, String)>> {
    for id in TABLE_IDS {
        let table = ReferenceTable::load(id)?;
        if table.pair() != Some((m, n)) {
            continue;
        }
        if let ReferenceData::Candidates { rows, .. } = &table.data {
            if let Some(row) = rows.iter().find(|r| r.expand().contains(a)) {
                return Ok(Some((id, row.to_string())));
            }
        }
    }
    Ok(None)
}

fn tables(args: &RunArgs, id: u32, subset: &[u64]) -> Result<ExitCode> {
    let table = ReferenceTable::load(id).map_err(|e| usage(e.to_string()))?;
    let keep = |m: u64| subset.is_empty() || subset.contains(&m);
    let report = match &table.data {
        ReferenceData::Gamma { entries } => {
            let mut gammas = BTreeMap::new();
            for e in entries.iter().filter(|e| keep(e.m)) {
                let cs = criterion_set(&escalate(e.m, 1, args)?)?;
                gammas.insert(e.m, cs.gamma);
            }
            if gammas.is_empty() {
                return Err(usage("--subset matches no row"));
            }
            if let Some(path) = &args.json {
                let doc = GammaTable {
                    bound: args.bound,
                    gammas: gammas.clone(),
                };
                fs::write(path, emit(&doc, Format::Json)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            diff_reference(Computed::Gammas(&gammas), id)?
        }
        ReferenceData::CriterionSets { .. } => {
            let mut sets = Vec::new();
            for (m, n) in table.representative_pairs() {
                if keep(m) {
                    sets.push(criterion_set(&escalate(m, n, args)?)?);
                }
            }
            if sets.is_empty() {
                return Err(usage("--subset matches no row"));
            }
            diff_reference(Computed::Criteria(&sets), id)?
        }
        ReferenceData::Candidates { m, n, .. } => {
            let run = escalate(*m, *n, args)?;
            if let Some(path) = &args.json {
                fs::write(path, emit(&run, Format::Json)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            diff_reference(Computed::Candidates(&run), id)?
        }
    };
    write_text(&emit(&report, args.format.into())?, args.output.as_deref())?;
    eprintln!("{}", report.summary());
    Ok(if report.is_exact() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use serde::Serialize;
use starbdd::bdd::{make_ordering, VariableOrder};
use starbdd::oracle::brute_force;
use starbdd::reach::witness_trace;
use starbdd::report::{compare, Analysis, CompareOptions, RunRecord, RunReport, CSV_HEADER};
use starbdd::spec::load_model;
use starbdd::Result;

use crate::{Command, ModelArgs, OrderArgs};

const SAFE: u8 = 0;
const VIOLATED: u8 = 1;

pub fn run(command: Command) -> Result<ExitCode> {
    let code = match command {
        Command::Verify {
            model,
            json,
            proj,
            out,
            directions,
        } => verify(&model, json, proj.as_deref(), out.as_deref(), directions)?,
        Command::Characterize {
            model,
            order,
            reduce,
            equivalence,
            dot,
            show_t0,
            csv,
            witness,
            raw,
            json,
            no_timing,
        } => {
            let opts = CharacterizeOpts {
                equivalence: reduce.then_some(equivalence),
                dot: dot.as_deref(),
                show_t0,
                csv: csv.as_deref(),
                witness,
                raw,
                json,
                timing: !no_timing,
            };
            characterize(&model, &order, &opts)?
        }
        Command::Compare {
            model,
            seeds,
            equivalence,
            json,
            csv,
            no_timing,
        } => {
            let options = CompareOptions {
                seeds,
                equivalence,
                timing: !no_timing,
            };
            compare_cmd(&model, &options, json, csv.as_deref())?
        }
        Command::Oracle {
            model,
            order,
            naive,
            raw,
        } => oracle(&model, &order, naive, raw)?,
    };
    Ok(ExitCode::from(code))
}

fn analyze(args: &ModelArgs) -> Result<Analysis> {
    Analysis::new(load_model(&args.model)?, args.eps)
}

fn exit_for(analysis: &Analysis) -> u8 {
    if analysis.is_safe() {
        SAFE
    } else {
        VIOLATED
    }
}

fn resolve_order(args: &OrderArgs, k: usize) -> Result<(String, Option<u64>, VariableOrder)> {
    if let Some(text) = &args.order {
        let order = VariableOrder::parse_one_based(text)?;
        if order.len() != k {
            return Err(starbdd::Error::InvalidArgument(format!(
                "ordering has {} entries but there are {k} unsafe steps",
                order.len()
            )));
        }
        return Ok(("custom".to_string(), None, order));
    }
    let order = make_ordering(&args.ordering, k, args.seed)?;
    let seed = (args.ordering == "random").then_some(args.seed);
    Ok((args.ordering.clone(), seed, order))
}

fn join(indices: &[usize]) -> String {
    indices.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn fmt_vec(v: impl IntoIterator<Item = f64>) -> String {
    let parts: Vec<String> = v.into_iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    indices: &'a [usize],
    k: usize,
    safe: bool,
}

fn verify(
    args: &ModelArgs,
    json: bool,
    proj: Option<&[usize]>,
    out: Option<&Path>,
    directions: usize,
) -> Result<u8> {
    let analysis = analyze(args)?;
    if let (Some(&[i, j]), Some(out)) = (proj, out) {
        let polygons = analysis.reach.projection(i, j, directions)?;
        let mut text = String::from("step,x,y\n");
        for (step, poly) in polygons.iter().enumerate() {
            for (x, y) in poly {
                let _ = writeln!(text, "{step},{x:.9},{y:.9}");
            }
        }
        fs::write(out, text)?;
    }
    if json {
        let report = VerifyReport {
            indices: &analysis.indices,
            k: analysis.k(),
            safe: analysis.is_safe(),
        };
        println!("{}", to_json(&report));
    } else if analysis.is_safe() {
        println!("safe: no reachable state meets the unsafe set");
    } else {
        println!("violated at steps: {}", join(&analysis.indices));
    }
    Ok(exit_for(&analysis))
}

struct CharacterizeOpts<'a> {
    equivalence: Option<String>,
    dot: Option<&'a Path>,
    show_t0: bool,
    csv: Option<&'a Path>,
    witness: bool,
    raw: bool,
    json: bool,
    timing: bool,
}

#[derive(Serialize)]
struct PatternEntry {
    bits: String,
    raw: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize)]
struct CharacterizeReport {
    indices: Vec<usize>,
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    run: Option<RunRecord>,
    strings: Vec<PatternEntry>,
}

fn characterize(args: &ModelArgs, order_args: &OrderArgs, opts: &CharacterizeOpts) -> Result<u8> {
    let analysis = analyze(args)?;
    let mut report = CharacterizeReport {
        indices: analysis.indices.clone(),
        k: analysis.k(),
        order: None,
        run: None,
        strings: Vec::new(),
    };
    if analysis.is_safe() {
        if opts.json {
            println!("{}", to_json(&report));
        } else {
            println!("safe: nothing to characterize");
        }
        return Ok(SAFE);
    }
    let (label, seed, order) = resolve_order(order_args, analysis.k())?;
    let (bdd, mut paths) = analysis
        .characterize(&order, opts.equivalence.as_deref())?
        .expect("violated models have predicates");
    paths.sort_by(|a, b| a.bits.cmp(&b.bits));
    let record = RunRecord::from_bdd(&bdd, &label, seed, paths.len(), opts.timing);
    let last = *analysis.indices.last().expect("violated models have indices");

    if let Some(path) = opts.dot {
        fs::write(path, bdd.to_dot(opts.show_t0))?;
    }
    if let Some(path) = opts.csv {
        fs::write(path, format!("{CSV_HEADER}\n{}\n", record.csv_row()))?;
    }

    let mut text = String::new();
    let _ = writeln!(text, "violated at steps: {}", join(&analysis.indices));
    let _ = writeln!(text, "ordering: {} {order}", record.label());
    let _ = writeln!(
        text,
        "N = {}, W = {}, patterns = {}, build = {:.4}s",
        record.n, record.w, record.paths, record.seconds
    );
    for c in &paths {
        let mut entry = PatternEntry {
            bits: c.time_string(),
            raw: c.raw_string(),
            witness: None,
            trace: None,
        };
        let _ = write!(text, "{}", entry.bits);
        if opts.raw {
            let _ = write!(text, "  (level order {})", entry.raw);
        }
        if c.is_safe_modality() {
            let _ = write!(text, "  never unsafe");
        }
        text.push('\n');
        if opts.witness {
            let trace = witness_trace(&analysis.reach, &c.witness, last)?;
            let (init, inputs) = analysis.reach.split_valuation(&c.witness);
            let _ = writeln!(text, "  initial: {}", fmt_vec(init.iter().copied()));
            for (step, u) in inputs.iter().enumerate() {
                let _ = writeln!(text, "  input {step}: {}", fmt_vec(u.iter().copied()));
            }
            for (step, x) in trace.iter().enumerate() {
                let mark = if analysis.indices.contains(&step) { " *" } else { "" };
                let _ = writeln!(text, "  x{step} = {}{mark}", fmt_vec(x.iter().copied()));
            }
            entry.witness = Some(c.witness.clone());
            entry.trace = Some(trace.iter().map(|x| x.iter().copied().collect()).collect());
        }
        report.strings.push(entry);
    }

    if opts.json {
        report.order = Some(order.as_slice().iter().map(|p| p + 1).collect());
        report.run = Some(record);
        println!("{}", to_json(&report));
    } else {
        print!("{text}");
    }
    Ok(VIOLATED)
}

fn compare_cmd(args: &ModelArgs, options: &CompareOptions, json: bool, csv: Option<&Path>) -> Result<u8> {
    let analysis = analyze(args)?;
    let report: RunReport = compare(&analysis, options)?;
    if let Some(path) = csv {
        fs::write(path, report.to_csv())?;
    }
    if json {
        println!("{}", to_json(&report));
    } else if analysis.is_safe() {
        println!("safe: nothing to compare");
    } else {
        println!("violated at steps: {}", join(&analysis.indices));
        println!("{}", report.to_table());
    }
    Ok(exit_for(&analysis))
}

fn oracle(args: &ModelArgs, order_args: &OrderArgs, naive: bool, raw: bool) -> Result<u8> {
    let analysis = analyze(args)?;
    let Some(pp) = &analysis.predicates else {
        println!("safe: nothing to enumerate");
        return Ok(SAFE);
    };
    let (_, _, order) = resolve_order(order_args, analysis.k())?;
    let strings = brute_force(pp, &order, naive)?;
    let mut lines: Vec<(String, String)> = strings
        .iter()
        .map(|bits| {
            let s = |b: &[bool]| b.iter().map(|&x| if x { '1' } else { '0' }).collect::<String>();
            (s(&order.to_time_order(bits)), s(bits))
        })
        .collect();
    lines.sort();
    for (time, level) in lines {
        if raw {
            println!("{time}  (level order {level})");
        } else {
            println!("{time}");
        }
    }
    Ok(VIOLATED)
}

//! Command-line front end: parse a program, compute its exact semantics,
//! classify triples against the logic catalog, check single judgements, and
//! verify derivation files.
//!
//! Exit codes: 0 = holds/accepted, 1 = fails/rejected, 2 = usage or parse
//! error. Output is deterministic: all sets are ordered and JSON keys are
//! sorted.

use std::fs;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::lang::{eval_pred_assertional, eval_pred_relational, parse_predicate, parse_program, Program};
use crate::proofs::{check_ehl, check_pre, parse_ehl, parse_pre};
use crate::relsem::{interp_oracle, sem, SemTriple};
use crate::space::{Domain, Space};
use crate::theories::{catalog_entry, classify, holds, holds_ehl, holds_prelogic, Assn, CarrierKind, Verdict, Witness};

#[derive(Parser)]
#[command(name = "fixlogic", version, about = "Exact verification workbench over finite state spaces")]
struct Cli {
    /// Variable domain as LO..HI (inclusive)
    #[arg(long, global = true, default_value = "-8..7", allow_hyphen_values = true)]
    domain: String,
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized auxiliary runs (reserved; outputs stay deterministic)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress witnesses and failure details
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dump the exact fixpoint semantics (ok / break / nontermination parts)
    Sem { file: String },
    /// Dump the bounded-interpreter semantics (differential oracle)
    Oracle { file: String },
    /// Evaluate every catalog logic on a (pre, post) pair
    Classify {
        file: String,
        #[arg(long)]
        pre: String,
        #[arg(long)]
        post: String,
        #[arg(long)]
        br: Option<String>,
        /// Treat the predicates as relational (enables old(x))
        #[arg(long)]
        relational: bool,
    },
    /// Check one judgement: a catalog logic name, `ehl`, or `prelogic`
    Check {
        logic: String,
        file: String,
        #[arg(long)]
        pre: String,
        #[arg(long)]
        post: String,
        #[arg(long)]
        br: Option<String>,
        #[arg(long)]
        relational: bool,
    },
    /// Verify a derivation file against a judgement
    Prove {
        file: String,
        #[arg(long)]
        cert: String,
        #[arg(long, value_parser = ["ehl", "prelogic"])]
        logic: String,
        #[arg(long)]
        pre: String,
        #[arg(long)]
        post: String,
        #[arg(long)]
        br: Option<String>,
        #[arg(long)]
        relational: bool,
    },
}

/// Entry point: returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // keep --help/--version on stdout with success, errors on code 2
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn parse_domain(text: &str) -> Result<Domain, String> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| format!("bad domain {text}, expected LO..HI"))?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad domain bound {lo}"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad domain bound {hi}"))?;
    Domain::new(lo, hi).map_err(|e| e.to_string())
}

fn load(cli: &Cli, file: &str) -> Result<(Space, Program), String> {
    let text = fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?;
    let prog = parse_program(&text).map_err(|e| e.to_string())?;
    let sp = Space::new(parse_domain(&cli.domain)?, &prog.vars).map_err(|e| e.to_string())?;
    Ok((sp, prog))
}

fn parse_assn(sp: &Space, text: &str, relational: bool) -> Result<Assn, String> {
    let relational = relational || text.contains("old(");
    let p = parse_predicate(text, relational, sp.vars()).map_err(|e| e.to_string())?;
    Ok(if relational {
        Assn::R(eval_pred_relational(&p, sp))
    } else {
        Assn::A(eval_pred_assertional(&p, sp))
    })
}

fn triple_json(sp: &Space, t: &SemTriple) -> Value {
    let part = |r: &crate::space::Rel| -> Value {
        Value::Array(
            r.iter()
                .map(|&(a, b)| json!([sp.format_el(a), sp.format_el(b)]))
                .collect(),
        )
    };
    json!({ "e": part(&t.e), "b": part(&t.b), "bot": part(&t.bot) })
}

fn print_triple(cli: &Cli, sp: &Space, t: &SemTriple) {
    if cli.json {
        println!("{}", triple_json(sp, t));
        return;
    }
    for (name, r) in [("e", &t.e), ("b", &t.b), ("bot", &t.bot)] {
        println!("{name}:");
        for &(a, b) in r.iter() {
            println!("  {} -> {}", sp.format_el(a), sp.format_el(b));
        }
    }
}

fn witness_str(sp: &Space, w: &Witness) -> String {
    match w {
        Witness::State(e) => sp.format_el(*e),
        Witness::Pair(a, b) => format!("{} -> {}", sp.format_el(*a), sp.format_el(*b)),
    }
}

fn verdict_json(sp: &Space, v: &Verdict) -> Value {
    json!({
        "holds": v.holds,
        "witness": v.witness.as_ref().map(|w| witness_str(sp, w)),
    })
}

fn print_verdict(cli: &Cli, sp: &Space, v: &Verdict) -> i32 {
    if cli.json {
        println!("{}", verdict_json(sp, v));
    } else if v.holds {
        println!("holds");
    } else {
        println!("fails");
        if !cli.quiet {
            if let Some(w) = &v.witness {
                println!("witness: {}", witness_str(sp, w));
            }
        }
    }
    i32::from(!v.holds)
}

fn dispatch(cli: &Cli) -> Result<i32, String> {
    match &cli.cmd {
        Cmd::Sem { file } => {
            let (sp, prog) = load(cli, file)?;
            let t = sem(&sp, &prog.body).map_err(|e| e.to_string())?;
            print_triple(cli, &sp, &t);
            Ok(0)
        }
        Cmd::Oracle { file } => {
            let (sp, prog) = load(cli, file)?;
            let t = interp_oracle(&sp, &prog.body);
            print_triple(cli, &sp, &t);
            Ok(0)
        }
        Cmd::Classify { file, pre, post, br, relational } => {
            let (sp, prog) = load(cli, file)?;
            let t = sem(&sp, &prog.body).map_err(|e| e.to_string())?;
            let p = parse_assn(&sp, pre, *relational)?;
            let q = parse_assn(&sp, post, *relational)?;
            let _ = br;
            let rows = classify(&sp, &t, &p, &q);
            if cli.json {
                let mut map = serde_json::Map::new();
                for (name, v) in &rows {
                    map.insert(name.to_string(), verdict_json(&sp, v));
                }
                println!("{}", Value::Object(map));
            } else {
                for (name, v) in &rows {
                    if v.holds {
                        println!("{name}: holds");
                    } else if cli.quiet || v.witness.is_none() {
                        println!("{name}: fails");
                    } else {
                        println!(
                            "{name}: fails (witness {})",
                            witness_str(&sp, v.witness.as_ref().unwrap())
                        );
                    }
                }
            }
            Ok(0)
        }
        Cmd::Check { logic, file, pre, post, br, relational } => {
            let (sp, prog) = load(cli, file)?;
            let t = sem(&sp, &prog.body).map_err(|e| e.to_string())?;
            let empty = if *relational { "old(n) != old(n)" } else { "false" };
            let brt = br.as_deref().unwrap_or(empty);
            let v = match logic.as_str() {
                "ehl" => {
                    let p = parse_assn(&sp, pre, *relational)?;
                    let q = parse_assn(&sp, post, *relational)?;
                    // T must share the carrier of P and Q
                    let rel = matches!(q.kind(), CarrierKind::Relational);
                    let tb = match br {
                        Some(b) => parse_assn(&sp, b, rel)?,
                        None if rel => Assn::R(Default::default()),
                        None => Assn::A(Default::default()),
                    };
                    // lift mixed quadruples to the relational carrier
                    let (p, q, tb) = if [&p, &q, &tb]
                        .iter()
                        .any(|a| matches!(a.kind(), CarrierKind::Relational))
                    {
                        (
                            Assn::R(crate::proofs::lift_pre(&sp, &p)),
                            Assn::R(crate::proofs::lift_post(&sp, &q)),
                            Assn::R(crate::proofs::lift_post(&sp, &tb)),
                        )
                    } else {
                        (p, q, tb)
                    };
                    holds_ehl(&sp, &t, &p, &q, &tb).map_err(|e| e.to_string())?
                }
                "prelogic" => {
                    let ap = |s: &str| -> Result<_, String> {
                        let p = parse_predicate(s, false, sp.vars()).map_err(|e| e.to_string())?;
                        Ok(eval_pred_assertional(&p, &sp))
                    };
                    let tb = match br {
                        Some(b) => ap(b)?,
                        None => Default::default(),
                    };
                    holds_prelogic(&t, &ap(pre)?, &ap(post)?, &tb)
                }
                name => {
                    // common shorthand for the total-correctness entry
                    let name = if name == "manna-pnueli" { "manna-pnueli-total" } else { name };
                    let entry = catalog_entry(name)
                        .ok_or_else(|| format!("unknown logic {name}"))?;
                    let rel = *relational
                        || matches!(entry.spec.carrier, CarrierKind::Relational);
                    let p = parse_assn(&sp, pre, rel)?;
                    let q = parse_assn(&sp, post, rel)?;
                    let _ = brt;
                    holds(entry, &sp, &t, &p, &q).map_err(|e| e.to_string())?
                }
            };
            Ok(print_verdict(cli, &sp, &v))
        }
        Cmd::Prove { file, cert, logic, pre, post, br, relational } => {
            let (sp, prog) = load(cli, file)?;
            let cert_text = fs::read_to_string(cert).map_err(|e| format!("{cert}: {e}"))?;
            let v = match logic.as_str() {
                "ehl" => {
                    let p = parse_assn(&sp, pre, *relational)?;
                    let q = parse_assn(&sp, post, *relational)?;
                    let rel = matches!(q.kind(), CarrierKind::Relational);
                    let tb = match br {
                        Some(b) => parse_assn(&sp, b, rel)?,
                        None if rel => Assn::R(Default::default()),
                        None => Assn::A(Default::default()),
                    };
                    let d = parse_ehl(&sp, &cert_text).map_err(|e| e.to_string())?;
                    check_ehl(&sp, &prog.body, &p, &q, &tb, &d).map_err(|e| e.to_string())?
                }
                _ => {
                    let ap = |s: &str| -> Result<_, String> {
                        let p = parse_predicate(s, false, sp.vars()).map_err(|e| e.to_string())?;
                        Ok(eval_pred_assertional(&p, &sp))
                    };
                    let tb = match br {
                        Some(b) => ap(b)?,
                        None => Default::default(),
                    };
                    let d = parse_pre(&sp, &cert_text).map_err(|e| e.to_string())?;
                    check_pre(&sp, &prog.body, &ap(pre)?, &ap(post)?, &tb, &d)
                        .map_err(|e| e.to_string())?
                }
            };
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "accepted": v.accepted,
                        "failures": v.failures,
                        "notices": v.notices,
                    })
                );
            } else if v.accepted {
                println!("accepted");
                if !cli.quiet {
                    for n in &v.notices {
                        println!("notice: {n}");
                    }
                }
            } else {
                println!("rejected");
                if !cli.quiet {
                    for f in &v.failures {
                        println!("failure: {f}");
                    }
                }
            }
            Ok(i32::from(!v.accepted))
        }
    }
}

//! Python bindings: thin string-based wrappers over the core workbench.
//! Programs, predicates, and derivations are passed as source text; states
//! come back in the `{n=1}` / `BOT` notation.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use fixlogic::lang::{
    eval_pred_assertional, eval_pred_relational, parse_predicate, parse_program, Program,
};
use fixlogic::proofs;
use fixlogic::relsem::{interp_oracle, sem, SemTriple};
use fixlogic::space::{Domain, Pred, Space};
use fixlogic::theories::{self, Assn, CarrierKind};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn load(src: &str, lo: i64, hi: i64) -> PyResult<(Space, Program)> {
    let prog = parse_program(src).map_err(err)?;
    let sp = Space::new(Domain::new(lo, hi).map_err(err)?, &prog.vars).map_err(err)?;
    Ok((sp, prog))
}

fn assn(sp: &Space, text: &str, relational: bool) -> PyResult<Assn> {
    let relational = relational || text.contains("old(");
    let p = parse_predicate(text, relational, sp.vars()).map_err(err)?;
    Ok(if relational {
        Assn::R(eval_pred_relational(&p, sp))
    } else {
        Assn::A(eval_pred_assertional(&p, sp))
    })
}

fn apred(sp: &Space, text: &str) -> PyResult<Pred> {
    let p = parse_predicate(text, false, sp.vars()).map_err(err)?;
    Ok(eval_pred_assertional(&p, sp))
}

/// Lift a mixed EHL quadruple to the relational carrier (diagonal
/// precondition, any-pin postconditions) when any side is relational.
fn unify_carriers(sp: &Space, p: Assn, q: Assn, tb: Assn) -> (Assn, Assn, Assn) {
    let any_rel = [&p, &q, &tb]
        .iter()
        .any(|a| matches!(a.kind(), CarrierKind::Relational));
    if any_rel {
        (
            Assn::R(proofs::lift_pre(sp, &p)),
            Assn::R(proofs::lift_post(sp, &q)),
            Assn::R(proofs::lift_post(sp, &tb)),
        )
    } else {
        (p, q, tb)
    }
}

fn triple_dict(sp: &Space, t: &SemTriple) -> BTreeMap<String, Vec<(String, String)>> {
    let part = |r: &fixlogic::space::Rel| -> Vec<(String, String)> {
        r.iter().map(|&(a, b)| (sp.format_el(a), sp.format_el(b))).collect()
    };
    [
        ("e".to_string(), part(&t.e)),
        ("b".to_string(), part(&t.b)),
        ("bot".to_string(), part(&t.bot)),
    ]
    .into()
}

/// Exact fixpoint semantics of a program: {"e"|"b"|"bot": [(from, to), ...]}.
#[pyfunction]
#[pyo3(signature = (src, lo=-8, hi=7))]
fn semantics(src: &str, lo: i64, hi: i64) -> PyResult<BTreeMap<String, Vec<(String, String)>>> {
    let (sp, prog) = load(src, lo, hi)?;
    let t = sem(&sp, &prog.body).map_err(err)?;
    Ok(triple_dict(&sp, &t))
}

/// Bounded-interpreter semantics, same shape as [`semantics`].
#[pyfunction]
#[pyo3(signature = (src, lo=-8, hi=7))]
fn oracle(src: &str, lo: i64, hi: i64) -> PyResult<BTreeMap<String, Vec<(String, String)>>> {
    let (sp, prog) = load(src, lo, hi)?;
    Ok(triple_dict(&sp, &interp_oracle(&sp, &prog.body)))
}

/// Names of all catalog logics, in declaration order.
#[pyfunction]
fn catalog() -> Vec<String> {
    theories::CATALOG.iter().map(|l| l.name.to_string()).collect()
}

/// Evaluate every catalog logic whose carrier matches: {name: holds}.
#[pyfunction]
#[pyo3(signature = (src, pre, post, lo=-8, hi=7, relational=false))]
fn classify(
    src: &str,
    pre: &str,
    post: &str,
    lo: i64,
    hi: i64,
    relational: bool,
) -> PyResult<BTreeMap<String, bool>> {
    let (sp, prog) = load(src, lo, hi)?;
    let t = sem(&sp, &prog.body).map_err(err)?;
    let p = assn(&sp, pre, relational)?;
    let q = assn(&sp, post, relational)?;
    Ok(theories::classify(&sp, &t, &p, &q)
        .into_iter()
        .map(|(n, v)| (n.to_string(), v.holds))
        .collect())
}

/// Check one judgement (a catalog name, "ehl", or "prelogic"); returns
/// (holds, witness-or-None).
#[pyfunction]
#[pyo3(signature = (logic, src, pre, post, br=None, lo=-8, hi=7, relational=false))]
#[allow(clippy::too_many_arguments)]
fn check(
    logic: &str,
    src: &str,
    pre: &str,
    post: &str,
    br: Option<&str>,
    lo: i64,
    hi: i64,
    relational: bool,
) -> PyResult<(bool, Option<String>)> {
    let (sp, prog) = load(src, lo, hi)?;
    let t = sem(&sp, &prog.body).map_err(err)?;
    let wit = |w: &theories::Witness| match *w {
        theories::Witness::State(e) => sp.format_el(e),
        theories::Witness::Pair(a, b) => format!("{} -> {}", sp.format_el(a), sp.format_el(b)),
    };
    let v = match logic {
        "ehl" => {
            let p = assn(&sp, pre, relational)?;
            let q = assn(&sp, post, relational)?;
            let rel = matches!(q.kind(), CarrierKind::Relational);
            let tb = match br {
                Some(b) => assn(&sp, b, rel)?,
                None if rel => Assn::R(Default::default()),
                None => Assn::A(Default::default()),
            };
            let (p, q, tb) = unify_carriers(&sp, p, q, tb);
            theories::holds_ehl(&sp, &t, &p, &q, &tb).map_err(err)?
        }
        "prelogic" => {
            let tb = match br {
                Some(b) => apred(&sp, b)?,
                None => Default::default(),
            };
            theories::holds_prelogic(&t, &apred(&sp, pre)?, &apred(&sp, post)?, &tb)
        }
        name => {
            let entry = theories::catalog_entry(name)
                .ok_or_else(|| err(format!("unknown logic {name}")))?;
            let rel = relational || matches!(entry.spec.carrier, CarrierKind::Relational);
            let p = assn(&sp, pre, rel)?;
            let q = assn(&sp, post, rel)?;
            theories::holds(entry, &sp, &t, &p, &q).map_err(err)?
        }
    };
    Ok((v.holds, v.witness.as_ref().map(|w| wit(w))))
}

/// Verify a derivation text; returns (accepted, failures, notices).
#[pyfunction]
#[pyo3(signature = (logic, src, cert, pre, post, br=None, lo=-8, hi=7, relational=false))]
#[allow(clippy::too_many_arguments)]
fn prove(
    logic: &str,
    src: &str,
    cert: &str,
    pre: &str,
    post: &str,
    br: Option<&str>,
    lo: i64,
    hi: i64,
    relational: bool,
) -> PyResult<(bool, Vec<String>, Vec<String>)> {
    let (sp, prog) = load(src, lo, hi)?;
    let v = match logic {
        "ehl" => {
            let p = assn(&sp, pre, relational)?;
            let q = assn(&sp, post, relational)?;
            let rel = matches!(q.kind(), CarrierKind::Relational);
            let tb = match br {
                Some(b) => assn(&sp, b, rel)?,
                None if rel => Assn::R(Default::default()),
                None => Assn::A(Default::default()),
            };
            let d = proofs::parse_ehl(&sp, cert).map_err(err)?;
            proofs::check_ehl(&sp, &prog.body, &p, &q, &tb, &d).map_err(err)?
        }
        "prelogic" => {
            let tb = match br {
                Some(b) => apred(&sp, b)?,
                None => Default::default(),
            };
            let d = proofs::parse_pre(&sp, cert).map_err(err)?;
            proofs::check_pre(&sp, &prog.body, &apred(&sp, pre)?, &apred(&sp, post)?, &tb, &d)
                .map_err(err)?
        }
        other => return Err(err(format!("unknown derivation logic {other}"))),
    };
    Ok((v.accepted, v.failures, v.notices))
}

#[pymodule]
fn fixlogic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(semantics, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(prove, m)?)?;
    Ok(())
}

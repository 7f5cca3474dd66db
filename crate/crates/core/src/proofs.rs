//! Checkers for the two derived proof systems — the extended Hoare logic
//! (EHL) over quadruples {P} S {ok:Q, br:T}, and the backward
//! possible-accessibility logic {P} S ⃖{ok:Q, br:T} — plus canonical
//! certificate synthesis for completeness testing.
//!
//! EHL derivations are checked in the relational carrier Σ×Σ_⊥ whose first
//! component is the pinned reference state (`old(x)`), one pinning per while
//! node at loop entry. The while rule's termination condition is enforced
//! per pinned state: rows whose pin has its ⊥-pair in Q are exempt; the
//! remaining rows need a variant strictly decreasing across every guarded
//! body step. With no ⊥-pair in Q this is exactly the rule's variant
//! condition; with every pin covered it is exactly the "⊥ ∈ Q" case.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::induction::Verdict;
use crate::lang::{parse_predicate, eval_pred_assertional, eval_pred_relational, Stmt};
use crate::relsem::{bstates, sem, RelsemError};
use crate::space::{compose, El, Pred, Rel, Space, SpaceError};
use crate::theories::{holds_prelogic, Assn};
use crate::transformers::pre;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ProofsError {
    #[error("quadruple is not in the theory")]
    NotInTheory,
    #[error("derivation shape mismatch: {0}")]
    Shape(String),
    #[error("derivation parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Relsem(#[from] RelsemError),
}

// ---------------------------------------------------------------------------
// EHL derivations
// ---------------------------------------------------------------------------

/// An EHL derivation tree mirroring the statement structure. `Atomic` checks
/// the exact-post axiom plus consequence on any while-free region (always
/// sound for arbitrary statements).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EhlNode {
    Atomic,
    Seq { mid: Rel, first: Box<EhlNode>, rest: Box<EhlNode> },
    If { thn: Box<EhlNode>, els: Box<EhlNode> },
    While {
        inv: Rel,
        body_ok: Rel,
        body_br: Rel,
        variant: Option<BTreeMap<(El, El), u64>>,
        body: Box<EhlNode>,
    },
}

fn rel_ang(r: &Rel) -> Rel {
    r.iter().filter(|(_, b)| !b.is_bot()).copied().collect()
}

fn rel_bot(r: &Rel) -> Rel {
    r.iter().filter(|(_, b)| b.is_bot()).copied().collect()
}

fn guard_rows(r: &Rel, b: &BTreeSet<u32>, inside: bool) -> Rel {
    r.iter()
        .filter(|(_, cur)| match cur.state() {
            Some(s) => b.contains(&s) == inside,
            None => false,
        })
        .copied()
        .collect()
}

/// Guarded body steps within the pinned frame: (σ̲,σ) → (σ̲,σ′) for every
/// body transition (σ,σ′), σ in the guard.
fn guarded_step(rows: &Rel, body_e: &Rel) -> Vec<((El, El), (El, El))> {
    let mut out = Vec::new();
    for &(pin, cur) in rows {
        if let Some(c) = cur.state() {
            for &(x, y) in body_e {
                if x.state() == Some(c) && !y.is_bot() {
                    out.push(((pin, cur), (pin, y)));
                }
            }
        }
    }
    out
}

/// Longest-path rank over the guarded-step graph restricted to the given
/// rows; `None` when a cycle makes the rank (and hence any variant)
/// impossible.
fn synth_rank(
    rows: &Rel,
    edges: &[((El, El), (El, El))],
) -> Option<BTreeMap<(El, El), u64>> {
    let mut succ: BTreeMap<(El, El), Vec<(El, El)>> = BTreeMap::new();
    for (a, b) in edges {
        succ.entry(*a).or_default().push(*b);
    }
    let mut memo: BTreeMap<(El, El), Option<u64>> = BTreeMap::new();
    fn height(
        e: (El, El),
        succ: &BTreeMap<(El, El), Vec<(El, El)>>,
        memo: &mut BTreeMap<(El, El), Option<u64>>,
        on_path: &mut BTreeSet<(El, El)>,
    ) -> Option<u64> {
        if let Some(h) = memo.get(&e) {
            return *h;
        }
        if !on_path.insert(e) {
            return None; // cycle
        }
        let mut h = 0;
        if let Some(ss) = succ.get(&e) {
            for &s in ss {
                h = h.max(1 + height(s, succ, memo, on_path)?);
            }
        }
        on_path.remove(&e);
        memo.insert(e, Some(h));
        Some(h)
    }
    let mut ranks = BTreeMap::new();
    let mut nodes: BTreeSet<(El, El)> = rows.iter().copied().collect();
    nodes.extend(edges.iter().map(|(_, b)| *b));
    for n in nodes {
        let mut on_path = BTreeSet::new();
        let h = height(n, &succ, &mut memo, &mut on_path);
        match h {
            Some(h) => {
                ranks.insert(n, h);
            }
            None => {
                memo.insert(n, None);
                return None;
            }
        }
    }
    Some(ranks)
}

/// Check an EHL derivation against a relational quadruple (P, Q, T ⊆ Σ×Σ_⊥
/// with the pinned state first). See the module docs for the while rule.
pub fn check_ehl_rel(
    sp: &Space,
    stmts: &[Stmt],
    p: &Rel,
    q: &Rel,
    tbr: &Rel,
    node: &EhlNode,
) -> Result<Verdict, ProofsError> {
    let mut v = Verdict::new();
    match node {
        EhlNode::Atomic => {
            let t = sem(sp, stmts)?;
            // exact post axiom + consequence; compose keeps ⊥-rows of P
            for &(a, b) in &compose(p, &t.natural()) {
                if !q.contains(&(a, b)) {
                    v.fail(format!(
                        "ok-outcome outside Q at {}->{}",
                        sp.format_el(a),
                        sp.format_el(b)
                    ));
                }
            }
            for &(a, b) in &compose(&rel_ang(p), &t.b) {
                if !tbr.contains(&(a, b)) {
                    v.fail(format!(
                        "break-outcome outside T at {}->{}",
                        sp.format_el(a),
                        sp.format_el(b)
                    ));
                }
            }
        }
        EhlNode::Seq { mid, first, rest } => {
            if stmts.len() < 2 {
                return Err(ProofsError::Shape("seq node on a short statement".into()));
            }
            let a = check_ehl_rel(sp, &stmts[..1], p, mid, tbr, first)?;
            let b = check_ehl_rel(sp, &stmts[1..], mid, q, tbr, rest)?;
            merge(&mut v, a, "seq.first");
            merge(&mut v, b, "seq.rest");
        }
        EhlNode::If { thn, els } => {
            let (cond, t_s, e_s) = match stmts {
                [Stmt::If { cond, then_b, else_b }] => (cond, then_b, else_b),
                _ => return Err(ProofsError::Shape("if node on a non-conditional".into())),
            };
            let b = bstates(sp, cond);
            if !rel_bot(p).is_subset(q) {
                v.fail("⊥-row of P outside Q at conditional");
            }
            let pt = guard_rows(p, &b, true);
            let pe = guard_rows(p, &b, false);
            let a = check_ehl_rel(sp, t_s, &pt, q, tbr, thn)?;
            let c = check_ehl_rel(sp, e_s, &pe, q, tbr, els)?;
            merge(&mut v, a, "if.then");
            merge(&mut v, c, "if.else");
        }
        EhlNode::While { inv, body_ok, body_br, variant, body } => {
            let (cond, body_s) = match stmts {
                [Stmt::While { cond, body }] => (cond, body),
                _ => return Err(ProofsError::Shape("while node on a non-loop".into())),
            };
            let b = bstates(sp, cond);
            let bt = sem(sp, body_s)?;
            if !rel_bot(p).is_subset(q) {
                v.fail("⊥-row of P outside Q at loop");
            }
            // entry diagonal ⊆ I
            let entries: BTreeSet<El> =
                p.iter().filter(|(_, s)| !s.is_bot()).map(|&(_, s)| s).collect();
            for &e in &entries {
                if !inv.contains(&(e, e)) {
                    v.fail(format!("entry diagonal outside I at {}", sp.format_el(e)));
                }
            }
            let i_ang = rel_ang(inv);
            let guarded = guard_rows(&i_ang, &b, true);
            // body judgement {ℬ⟦B⟧ ∩ I_angelic} S {ok:R, br:T_w}
            let bv = check_ehl_rel(sp, body_s, &guarded, body_ok, body_br, body)?;
            merge(&mut v, bv, "while.body");
            // R_angelic ⊆ I
            if !rel_ang(body_ok).is_subset(inv) {
                v.fail("R_angelic ⊄ I");
            }
            // exits composed back to the ambient frame
            let exit = guard_rows(&i_ang, &b, false);
            if !compose(&rel_ang(p), &exit).is_subset(q) {
                v.fail("(ℬ⟦¬B⟧ ∩ I_angelic) exit outside Q");
            }
            if !compose(&rel_ang(p), body_br).is_subset(q) {
                v.fail("break exit T ⊄ Q");
            }
            if !compose(&rel_ang(p), &rel_bot(body_ok)).is_subset(q) {
                v.fail("R_⊥ ⊄ Q");
            }
            // per-pin termination: exempt pins whose ⊥-pair is in Q
            let covered = |pin: El| -> bool {
                p.iter()
                    .filter(|&&(_, s)| s == pin)
                    .all(|&(a, _)| q.contains(&(a, El::Bot)))
            };
            let need: Rel = guarded
                .iter()
                .filter(|&&(pin, _)| entries.contains(&pin) && !covered(pin))
                .copied()
                .collect();
            if !need.is_empty() {
                let edges = guarded_step(&need, &bt.e);
                match variant {
                    Some(nu) => {
                        for ((a, edge_src), dst) in
                            edges.iter().map(|(s, d)| ((s.0, s.1), d))
                        {
                            let src = (a, edge_src);
                            match (nu.get(&src), nu.get(dst)) {
                                (Some(x), Some(y)) if x > y => {}
                                (Some(_), Some(_)) => v.fail(format!(
                                    "variant not strictly decreasing at ({},{})",
                                    sp.format_el(src.0),
                                    sp.format_el(src.1)
                                )),
                                _ => v.fail("variant not total on I"),
                            }
                        }
                    }
                    None => match synth_rank(&need, &edges) {
                        Some(_) => v.notice(
                            "variant omitted; synthesized from the exact iteration rank",
                        ),
                        None => v.fail(
                            "no variant exists: guarded iteration admits a cycle",
                        ),
                    },
                }
            }
        }
    }
    Ok(v)
}

fn merge(v: &mut Verdict, sub: Verdict, ctx: &str) {
    for f in sub.failures {
        v.fail(format!("{ctx}: {f}"));
    }
    for n in sub.notices {
        v.notice(format!("{ctx}: {n}"));
    }
}

/// Relational reading of a precondition: relational as-is, assertional as
/// the pinned diagonal.
pub fn lift_pre(_sp: &Space, p: &Assn) -> Rel {
    match p {
        Assn::R(r) => r.clone(),
        Assn::A(a) => a
            .iter()
            .filter(|e| !e.is_bot())
            .map(|&e| (e, e))
            .collect(),
    }
}

/// Relational reading of a postcondition: relational as-is, assertional
/// paired with every pin.
pub fn lift_post(sp: &Space, q: &Assn) -> Rel {
    match q {
        Assn::R(r) => r.clone(),
        Assn::A(a) => {
            let mut out = Rel::new();
            for s in sp.states() {
                for &e in a.iter() {
                    out.insert((El::St(s), e));
                }
            }
            out
        }
    }
}

/// Check an EHL derivation for a quadruple in either carrier; assertional
/// quadruples are lifted (diagonal precondition, any-pin postcondition).
pub fn check_ehl(
    sp: &Space,
    stmts: &[Stmt],
    p: &Assn,
    q: &Assn,
    tbr: &Assn,
    d: &EhlNode,
) -> Result<Verdict, ProofsError> {
    check_ehl_rel(
        sp,
        stmts,
        &lift_pre(sp, p),
        &lift_post(sp, q),
        &lift_post(sp, tbr),
        d,
    )
}

/// Synthesize the canonical EHL derivation (exact strongest sets, iteration
/// ranks as variants). Errors with [`ProofsError::NotInTheory`] when the
/// quadruple does not hold.
pub fn synth_ehl(
    sp: &Space,
    stmts: &[Stmt],
    p: &Assn,
    q: &Assn,
    tbr: &Assn,
) -> Result<EhlNode, ProofsError> {
    let pr = lift_pre(sp, p);
    let qr = lift_post(sp, q);
    let tr = lift_post(sp, tbr);
    let d = synth_ehl_rel(sp, stmts, &pr)?;
    let v = check_ehl_rel(sp, stmts, &pr, &qr, &tr, &d)?;
    if v.accepted {
        Ok(d)
    } else {
        Err(ProofsError::NotInTheory)
    }
}

fn synth_ehl_rel(sp: &Space, stmts: &[Stmt], p: &Rel) -> Result<EhlNode, ProofsError> {
    let has_while = stmts.iter().any(stmt_has_while);
    if !has_while {
        return Ok(EhlNode::Atomic);
    }
    if stmts.len() > 1 {
        let t0 = sem(sp, &stmts[..1])?;
        let mid = compose(p, &t0.natural());
        let first = synth_ehl_rel(sp, &stmts[..1], p)?;
        let rest = synth_ehl_rel(sp, &stmts[1..], &mid)?;
        return Ok(EhlNode::Seq { mid, first: first.into(), rest: rest.into() });
    }
    match &stmts[0] {
        Stmt::If { cond, then_b: thn, else_b: els } => {
            let b = bstates(sp, cond);
            let pt = guard_rows(&rel_ang(p), &b, true);
            let pe = guard_rows(&rel_ang(p), &b, false);
            Ok(EhlNode::If {
                thn: synth_ehl_rel(sp, thn, &pt)?.into(),
                els: synth_ehl_rel(sp, els, &pe)?.into(),
            })
        }
        Stmt::While { cond, body } => {
            let b = bstates(sp, cond);
            let bt = sem(sp, body)?;
            // strongest invariant: per-pin closure of the entry diagonal
            // under guarded body steps
            let mut inv: Rel = p
                .iter()
                .filter(|(_, s)| !s.is_bot())
                .map(|&(_, s)| (s, s))
                .collect();
            loop {
                let guarded = guard_rows(&inv, &b, true);
                let step: Rel = compose(&guarded, &bt.e);
                let next: Rel = inv.union(&step).copied().collect();
                if next == inv {
                    break;
                }
                inv = next;
            }
            let guarded = guard_rows(&inv, &b, true);
            let body_ok = compose(&guarded, &bt.natural());
            let body_br = compose(&guarded, &bt.b);
            let edges = guarded_step(&guarded, &bt.e);
            let variant = synth_rank(&guarded, &edges);
            Ok(EhlNode::While {
                inv,
                body_ok,
                body_br,
                variant,
                body: synth_ehl_rel(sp, body, &guarded)?.into(),
            })
        }
        _ => Ok(EhlNode::Atomic),
    }
}

fn stmt_has_while(s: &Stmt) -> bool {
    match s {
        Stmt::While { .. } => true,
        Stmt::If { then_b: thn, else_b: els, .. } => {
            thn.iter().any(stmt_has_while) || els.iter().any(stmt_has_while)
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Possible-accessibility (pre-) derivations
// ---------------------------------------------------------------------------

/// A backward possible-accessibility derivation (assertional carrier
/// ℘(Σ_⊥)). The while node carries the increasing sequence I⁰..Iˡ, the
/// per-step sets Rᵉₙ, the break/divergence sets Rᵇ and R^⊥, and — when
/// ⊥ ∈ Q — the co-invariant triple (J, R^⊥ₗ, P^⊥ₗ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PreNode {
    Atomic,
    Seq { mid: Pred, first: Box<PreNode>, rest: Box<PreNode> },
    If { thn: Box<PreNode>, els: Box<PreNode> },
    While {
        iseq: Vec<Pred>,
        re: Vec<Pred>,
        rb: Pred,
        rbot: Pred,
        j: Option<(Pred, Pred, Pred)>, // (J, R^⊥_ℓ, P^⊥_ℓ)
        body_rb: Box<PreNode>,
        body_rbot: Box<PreNode>,
        body_re: Vec<PreNode>,
        body_j: Option<Box<PreNode>>,
    },
}

/// Check a possible-accessibility derivation for {P} S ⃖{ok:Q, br:T}.
pub fn check_pre(
    sp: &Space,
    stmts: &[Stmt],
    p: &Pred,
    q: &Pred,
    tbr: &Pred,
    node: &PreNode,
) -> Result<Verdict, ProofsError> {
    let mut v = Verdict::new();
    if p.contains(&El::Bot) {
        v.fail("⊥ in the precondition");
        return Ok(v);
    }
    match node {
        PreNode::Atomic => {
            let t = sem(sp, stmts)?;
            let sem_v = holds_prelogic(&t, p, q, tbr);
            if !sem_v.holds {
                v.fail("exact-pre axiom fails");
            }
        }
        PreNode::Seq { mid, first, rest } => {
            if stmts.len() < 2 {
                return Err(ProofsError::Shape("seq node on a short statement".into()));
            }
            let a = check_pre(sp, &stmts[..1], p, mid, tbr, first)?;
            merge(&mut v, a, "seq.first");
            if mid.contains(&El::Bot) && !q.contains(&El::Bot) {
                v.fail("⊥ in the midcondition but ⊥ ∉ Q");
            }
            let mid_ang: Pred = mid.iter().filter(|e| !e.is_bot()).copied().collect();
            let b = check_pre(sp, &stmts[1..], &mid_ang, q, tbr, rest)?;
            merge(&mut v, b, "seq.rest");
        }
        PreNode::If { thn, els } => {
            let (cond, t_s, e_s) = match stmts {
                [Stmt::If { cond, then_b, else_b }] => (cond, then_b, else_b),
                _ => return Err(ProofsError::Shape("if node on a non-conditional".into())),
            };
            let b = bstates(sp, cond);
            let pt: Pred = p.iter().filter(|e| e.state().is_some_and(|s| b.contains(&s))).copied().collect();
            let pe: Pred = p.difference(&pt).copied().collect();
            let a = check_pre(sp, t_s, &pt, q, tbr, thn)?;
            let c = check_pre(sp, e_s, &pe, q, tbr, els)?;
            merge(&mut v, a, "if.then");
            merge(&mut v, c, "if.else");
        }
        PreNode::While { iseq, re, rb, rbot, j, body_rb, body_rbot, body_re, body_j } => {
            let (cond, body_s) = match stmts {
                [Stmt::While { cond, body }] => (cond, body),
                _ => return Err(ProofsError::Shape("while node on a non-loop".into())),
            };
            let b = bstates(sp, cond);
            let q_ang: Pred = q.iter().filter(|e| !e.is_bot()).copied().collect();
            let bot_in_q = q.contains(&El::Bot);
            let empty = Pred::new();
            let bot_only: Pred =
                if bot_in_q { [El::Bot].into_iter().collect() } else { Pred::new() };
            if iseq.first().map(|s| !s.is_empty()).unwrap_or(true) {
                v.fail("I⁰ ≠ ∅");
            }
            if re.len() + 1 != iseq.len() || body_re.len() != re.len() {
                return Err(ProofsError::Shape("one Rᵉₙ (and derivation) per step".into()));
            }
            // {Rᵇ} S ⃖{ok:∅, br:Q_angelic}
            merge(&mut v, check_pre(sp, body_s, rb, &empty, &q_ang, body_rb)?, "while.rb");
            // {R^⊥} S ⃖{ok:{⊥ | ⊥∈Q}, br:∅}
            merge(
                &mut v,
                check_pre(sp, body_s, rbot, &bot_only, &empty, body_rbot)?,
                "while.rbot",
            );
            let in_b = |e: &El| e.state().is_some_and(|s| b.contains(&s));
            for n in 0..re.len() {
                // {Rᵉₙ} S ⃖{ok:Iⁿ, br:∅}
                merge(
                    &mut v,
                    check_pre(sp, body_s, &re[n], &iseq[n], &empty, &body_re[n])?,
                    &format!("while.re[{n}]"),
                );
                if !iseq[n].is_subset(&iseq[n + 1]) {
                    v.fail(format!("I^{} ⊄ I^{}", n, n + 1));
                }
                // I^{n+1} ⊆ (ℬ⟦¬B⟧∩Q_ang) ∪ (ℬ⟦B⟧∩Rᵇ) ∪ (ℬ⟦B⟧∩R^⊥) ∪ (ℬ⟦B⟧∩Rᵉₙ)
                for e in &iseq[n + 1] {
                    let ok = if in_b(e) {
                        rb.contains(e) || rbot.contains(e) || re[n].contains(e)
                    } else {
                        !e.is_bot() && q_ang.contains(e)
                    };
                    if !ok {
                        v.fail(format!(
                            "I^{} element {} outside the one-step bound",
                            n + 1,
                            sp.format_el(*e)
                        ));
                    }
                }
            }
            let i_last = iseq.last().cloned().unwrap_or_default();
            match j {
                None => {
                    if !p.is_subset(&i_last) {
                        v.fail("P ⊄ Iˡ");
                    }
                }
                Some((jset, rbl, pbot)) => {
                    if !bot_in_q && !pbot.is_empty() {
                        v.fail("P^⊥_ℓ ≠ ∅ although ⊥ ∉ Q");
                    }
                    let p_fin: Pred = p.difference(pbot).copied().collect();
                    if !p_fin.is_subset(&i_last) {
                        v.fail("P ∖ P^⊥_ℓ ⊄ Iˡ");
                    }
                    if bot_in_q {
                        // {R^⊥_ℓ} S ⃖{ok:J, br:∅}; J ⊆ ℬ⟦B⟧ ∩ R^⊥_ℓ; P^⊥_ℓ ⊆ J
                        let bd = body_j.as_ref().ok_or_else(|| {
                            ProofsError::Shape("missing J sub-derivation".into())
                        })?;
                        merge(
                            &mut v,
                            check_pre(sp, body_s, rbl, jset, &empty, bd)?,
                            "while.j",
                        );
                        if !jset.iter().all(|e| in_b(e) && rbl.contains(e)) {
                            v.fail("J ⊄ ℬ⟦B⟧ ∩ R^⊥_ℓ");
                        }
                        if !pbot.is_subset(jset) {
                            v.fail("P^⊥_ℓ ⊄ J");
                        }
                    }
                }
            }
            let _ = tbr; // the while conclusion's break component is ∅ ⊆ T
        }
    }
    Ok(v)
}

/// Synthesize the canonical possible-accessibility derivation: exact
/// backward iterates for the I-sequence, the greatest iterable set for J.
pub fn synth_pre(
    sp: &Space,
    stmts: &[Stmt],
    p: &Pred,
    q: &Pred,
    tbr: &Pred,
) -> Result<PreNode, ProofsError> {
    let d = synth_pre_node(sp, stmts, q, tbr)?;
    let v = check_pre(sp, stmts, p, q, tbr, &d)?;
    if v.accepted {
        Ok(d)
    } else {
        Err(ProofsError::NotInTheory)
    }
}

fn synth_pre_node(
    sp: &Space,
    stmts: &[Stmt],
    q: &Pred,
    tbr: &Pred,
) -> Result<PreNode, ProofsError> {
    let has_while = stmts.iter().any(stmt_has_while);
    if !has_while {
        return Ok(PreNode::Atomic);
    }
    if stmts.len() > 1 {
        // backward: the mid is the exact pre of the rest
        let t_rest = sem(sp, &stmts[1..])?;
        let mut mid: Pred = pre(&t_rest.natural(), q);
        mid.extend(pre(&t_rest.b, tbr));
        if q.contains(&El::Bot) {
            mid.insert(El::Bot);
        }
        let first = synth_pre_node(sp, &stmts[..1], &mid, tbr)?;
        let rest = synth_pre_node(sp, &stmts[1..], q, tbr)?;
        return Ok(PreNode::Seq { mid, first: first.into(), rest: rest.into() });
    }
    match &stmts[0] {
        Stmt::If { then_b, else_b, .. } => Ok(PreNode::If {
            thn: synth_pre_node(sp, then_b, q, tbr)?.into(),
            els: synth_pre_node(sp, else_b, q, tbr)?.into(),
        }),
        Stmt::While { cond, body } => {
            let b = bstates(sp, cond);
            let bt = sem(sp, body)?;
            let q_ang: Pred = q.iter().filter(|e| !e.is_bot()).copied().collect();
            let bot_in_q = q.contains(&El::Bot);
            let rb = pre(&bt.b, &q_ang);
            let bot_only: Pred =
                if bot_in_q { [El::Bot].into_iter().collect() } else { Pred::new() };
            let rbot = pre(&bt.natural(), &bot_only);
            let in_b = |e: &El| e.state().is_some_and(|s| b.contains(&s));
            let mut iseq = vec![Pred::new()];
            let mut re = Vec::new();
            loop {
                let prev = iseq.last().unwrap().clone();
                let re_n = pre(&bt.natural(), &prev);
                let mut next = Pred::new();
                for s in sp.states() {
                    let e = El::St(s);
                    let ok = if in_b(&e) {
                        rb.contains(&e) || rbot.contains(&e) || re_n.contains(&e)
                    } else {
                        q_ang.contains(&e)
                    };
                    if ok {
                        next.insert(e);
                    }
                }
                if next == prev {
                    break;
                }
                re.push(re_n);
                iseq.push(next);
            }
            // greatest set that can iterate forever: gfp of B ∩ pre⟦S⟧ᵉ(·)
            let mut jset: Pred = sp.sigma().iter().filter(|e| in_b(e)).copied().collect();
            loop {
                let next: Pred = jset
                    .iter()
                    .filter(|e| pre(&bt.e, &jset).contains(e))
                    .copied()
                    .collect();
                if next == jset {
                    break;
                }
                jset = next;
            }
            let (j, body_j) = if bot_in_q {
                let rbl = pre(&bt.natural(), &jset);
                let bd = synth_pre_node(sp, body, &jset, &Pred::new())?;
                (Some((jset.clone(), rbl, jset.clone())), Some(Box::new(bd)))
            } else {
                (None, None)
            };
            // each body sub-derivation targets its own postcondition
            let body_rb = synth_pre_node(sp, body, &Pred::new(), &q_ang)?;
            let body_rbot = synth_pre_node(sp, body, &bot_only, &Pred::new())?;
            let body_re = iseq[..re.len()]
                .iter()
                .map(|i| synth_pre_node(sp, body, i, &Pred::new()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PreNode::While {
                iseq,
                re,
                rb,
                rbot,
                j,
                body_rb: Box::new(body_rb),
                body_rbot: Box::new(body_rbot),
                body_re,
                body_j,
            })
        }
        _ => Ok(PreNode::Atomic),
    }
}

// ---------------------------------------------------------------------------
// Derivation files
// ---------------------------------------------------------------------------

fn parse_pred_sec(sp: &Space, text: &str) -> Result<Pred, ProofsError> {
    let t = text.trim();
    if t == "empty" {
        return Ok(Pred::new());
    }
    if t.starts_with('{') || t.starts_with("BOT") {
        return t
            .split_whitespace()
            .map(|tok| sp.parse_el(tok).map_err(ProofsError::from))
            .collect();
    }
    let p = parse_predicate(t, false, sp.vars())
        .map_err(|e| ProofsError::Parse(e.to_string()))?;
    Ok(eval_pred_assertional(&p, sp))
}

fn parse_rel_sec(sp: &Space, text: &str) -> Result<Rel, ProofsError> {
    let t = text.trim();
    if t == "empty" {
        return Ok(Rel::new());
    }
    if t.starts_with('{') {
        let mut out = Rel::new();
        for tok in t.split_whitespace() {
            let (a, b) = tok
                .split_once("->")
                .ok_or_else(|| ProofsError::Parse(format!("expected a->b, got {tok}")))?;
            out.insert((sp.parse_el(a)?, sp.parse_el(b)?));
        }
        return Ok(out);
    }
    let p = parse_predicate(t, true, sp.vars())
        .map_err(|e| ProofsError::Parse(e.to_string()))?;
    Ok(eval_pred_relational(&p, sp))
}

/// Parse an EHL derivation file: an indented tree mirroring the statement
/// structure; node headers `atomic`, `seq`, `if`, `while`; section lines
/// `NAME = value` where a value is `empty`, explicit `{..}->{..}`/`BOT`
/// tokens, or predicate text (with `old(x)` for relational sections).
/// While sections: INVARIANT, BODYOK, BODYBR, optional
/// `VARIANT = {..}->{..}:rank ; ...`; seq section: MID.
pub fn parse_ehl(sp: &Space, text: &str) -> Result<EhlNode, ProofsError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim().starts_with('#'))
        .map(|l| (l.len() - l.trim_start().len(), l.trim()))
        .collect();
    let (node, used) = parse_ehl_node(sp, &lines, 0)?;
    if used != lines.len() {
        return Err(ProofsError::Parse("trailing content".into()));
    }
    Ok(node)
}

fn parse_ehl_node(
    sp: &Space,
    lines: &[(usize, &str)],
    at: usize,
) -> Result<(EhlNode, usize), ProofsError> {
    let (indent, header) = *lines
        .get(at)
        .ok_or_else(|| ProofsError::Parse("missing node".into()))?;
    let mut sections: BTreeMap<String, String> = BTreeMap::new();
    let mut ix = at + 1;
    while ix < lines.len() && lines[ix].0 > indent && lines[ix].1.contains('=') {
        // a section line; child headers never contain '='
        let (name, val) = lines[ix].1.split_once('=').unwrap();
        sections.insert(name.trim().to_string(), val.trim().to_string());
        ix += 1;
    }
    let mut children = Vec::new();
    while ix < lines.len() && lines[ix].0 > indent {
        let (c, nx) = parse_ehl_node(sp, lines, ix)?;
        children.push(c);
        ix = nx;
    }
    let node = match header {
        "atomic" => EhlNode::Atomic,
        "seq" => {
            let mid = parse_rel_sec(
                sp,
                sections.get("MID").ok_or_else(|| ProofsError::Parse("seq needs MID".into()))?,
            )?;
            let mut it = children.into_iter();
            let (first, rest) = (
                it.next().ok_or_else(|| ProofsError::Parse("seq needs 2 children".into()))?,
                it.next().ok_or_else(|| ProofsError::Parse("seq needs 2 children".into()))?,
            );
            EhlNode::Seq { mid, first: first.into(), rest: rest.into() }
        }
        "if" => {
            let mut it = children.into_iter();
            let (thn, els) = (
                it.next().ok_or_else(|| ProofsError::Parse("if needs 2 children".into()))?,
                it.next().ok_or_else(|| ProofsError::Parse("if needs 2 children".into()))?,
            );
            EhlNode::If { thn: thn.into(), els: els.into() }
        }
        "while" => {
            let get = |k: &str| -> Result<Rel, ProofsError> {
                parse_rel_sec(
                    sp,
                    sections
                        .get(k)
                        .ok_or_else(|| ProofsError::Parse(format!("while needs {k}")))?,
                )
            };
            let variant = match sections.get("VARIANT") {
                None => None,
                Some(s) => {
                    let mut m = BTreeMap::new();
                    for ent in s.split(';').filter(|e| !e.trim().is_empty()) {
                        let (pair, rank) = ent.rsplit_once(':').ok_or_else(|| {
                            ProofsError::Parse(format!("bad variant entry {ent}"))
                        })?;
                        let (a, b) = pair.trim().split_once("->").ok_or_else(|| {
                            ProofsError::Parse(format!("bad variant pair {pair}"))
                        })?;
                        let r: u64 = rank.trim().parse().map_err(|_| {
                            ProofsError::Parse(format!("bad rank in {ent}"))
                        })?;
                        m.insert((sp.parse_el(a)?, sp.parse_el(b)?), r);
                    }
                    Some(m)
                }
            };
            let body = children
                .into_iter()
                .next()
                .ok_or_else(|| ProofsError::Parse("while needs a body child".into()))?;
            EhlNode::While {
                inv: get("INVARIANT")?,
                body_ok: get("BODYOK")?,
                body_br: get("BODYBR")?,
                variant,
                body: body.into(),
            }
        }
        other => return Err(ProofsError::Parse(format!("unknown node {other}"))),
    };
    Ok((node, ix))
}

/// Parse a possible-accessibility derivation file; while sections: SEQUENCE
/// (sets separated by `;`), RE (same), RB, RBOT, and optionally J, RBL,
/// PBOT. Body sub-derivations in files are the exact-pre axiom.
pub fn parse_pre(sp: &Space, text: &str) -> Result<PreNode, ProofsError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim().starts_with('#'))
        .map(|l| (l.len() - l.trim_start().len(), l.trim()))
        .collect();
    let (node, used) = parse_pre_node(sp, &lines, 0)?;
    if used != lines.len() {
        return Err(ProofsError::Parse("trailing content".into()));
    }
    Ok(node)
}

fn parse_pre_node(
    sp: &Space,
    lines: &[(usize, &str)],
    at: usize,
) -> Result<(PreNode, usize), ProofsError> {
    let (indent, header) = *lines
        .get(at)
        .ok_or_else(|| ProofsError::Parse("missing node".into()))?;
    let mut sections: BTreeMap<String, String> = BTreeMap::new();
    let mut ix = at + 1;
    while ix < lines.len() && lines[ix].0 > indent && lines[ix].1.contains('=') {
        let (name, val) = lines[ix].1.split_once('=').unwrap();
        sections.insert(name.trim().to_string(), val.trim().to_string());
        ix += 1;
    }
    let mut children = Vec::new();
    while ix < lines.len() && lines[ix].0 > indent {
        let (c, nx) = parse_pre_node(sp, lines, ix)?;
        children.push(c);
        ix = nx;
    }
    let node = match header {
        "atomic" => PreNode::Atomic,
        "seq" => {
            let mid = parse_pred_sec(
                sp,
                sections.get("MID").ok_or_else(|| ProofsError::Parse("seq needs MID".into()))?,
            )?;
            let mut it = children.into_iter();
            let (first, rest) = (
                it.next().ok_or_else(|| ProofsError::Parse("seq needs 2 children".into()))?,
                it.next().ok_or_else(|| ProofsError::Parse("seq needs 2 children".into()))?,
            );
            PreNode::Seq { mid, first: first.into(), rest: rest.into() }
        }
        "if" => {
            let mut it = children.into_iter();
            let (thn, els) = (
                it.next().ok_or_else(|| ProofsError::Parse("if needs 2 children".into()))?,
                it.next().ok_or_else(|| ProofsError::Parse("if needs 2 children".into()))?,
            );
            PreNode::If { thn: thn.into(), els: els.into() }
        }
        "while" => {
            let seq_of = |k: &str| -> Result<Vec<Pred>, ProofsError> {
                sections
                    .get(k)
                    .ok_or_else(|| ProofsError::Parse(format!("while needs {k}")))?
                    .split(';')
                    .map(|s| parse_pred_sec(sp, s))
                    .collect()
            };
            let set_of = |k: &str| -> Result<Pred, ProofsError> {
                parse_pred_sec(
                    sp,
                    sections
                        .get(k)
                        .ok_or_else(|| ProofsError::Parse(format!("while needs {k}")))?,
                )
            };
            let iseq = seq_of("SEQUENCE")?;
            let re = if sections.contains_key("RE") { seq_of("RE")? } else { Vec::new() };
            let j = if sections.contains_key("J") {
                Some((set_of("J")?, set_of("RBL")?, set_of("PBOT")?))
            } else {
                None
            };
            let n = re.len();
            PreNode::While {
                iseq,
                re,
                rb: set_of("RB")?,
                rbot: set_of("RBOT")?,
                j,
                body_rb: Box::new(PreNode::Atomic),
                body_rbot: Box::new(PreNode::Atomic),
                body_re: vec![PreNode::Atomic; n],
                body_j: Some(Box::new(PreNode::Atomic)),
            }
        }
        other => return Err(ProofsError::Parse(format!("unknown node {other}"))),
    };
    Ok((node, ix))
}

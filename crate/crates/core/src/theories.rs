//! Exact membership deciders for the taxonomy of transformational logic
//! theories: each theory is a decidable predicate over (program semantics,
//! precondition, postcondition[, break condition]).

use std::collections::BTreeSet;

use thiserror::Error;

use crate::relsem::{angelic, SemTriple};
use crate::space::{union, El, Pred, Rel, RelPred, Space};
use crate::transformers::{
    post, post_rel, post_tilde, post_tilde_rel, pre, pre_rel, pre_tilde, pre_tilde_rel,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TheoryError {
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
}

/// Which transformer the theory compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum TransformerSel {
    Post,
    Pre,
    PostTilde,
    PreTilde,
}

/// Which semantics the transformer is taken of: the angelic relation e ∪ b
/// (restricted to Σ×Σ) or the natural relation e ∪ bot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SemSel {
    Angelic,
    Natural,
}

/// How the transformer result is compared against the other predicate. "Arg"
/// is the predicate not fed to the transformer (Q for post-like, P for
/// pre-like theories), "result" the transformer output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Cmp {
    /// arg ⊆ result
    ArgSubsetResult,
    /// result ⊆ arg
    ResultSubsetArg,
    /// arg ∩ result = ∅
    Disjoint,
    /// arg ∩ result ≠ ∅
    Meets,
}

/// Whether predicates are assertional (sets of states) or relational (sets of
/// pairs of an initial and a current state).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CarrierKind {
    Assertional,
    Relational,
}

/// A point in the taxonomy: transformer × semantics × comparison × carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct LogicSpec {
    pub transformer: TransformerSel,
    pub semantics: SemSel,
    pub comparison: Cmp,
    pub carrier: CarrierKind,
}

/// A catalog entry. `forbids_bot` marks theories whose postcondition carrier
/// excludes ⊥ (total-correctness logics).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NamedLogic {
    pub name: &'static str,
    pub spec: LogicSpec,
    pub forbids_bot: bool,
}

const fn spec(
    transformer: TransformerSel,
    semantics: SemSel,
    comparison: Cmp,
    carrier: CarrierKind,
) -> LogicSpec {
    LogicSpec { transformer, semantics, comparison, carrier }
}

/// The named catalog, in stable declaration order (the `classify` output
/// order). The broader taxonomy is reachable through [`LogicSpec`] directly.
pub const CATALOG: &[NamedLogic] = &[
    // partial correctness: post⟦S⟧P ⊆ Q
    NamedLogic {
        name: "hoare",
        spec: spec(TransformerSel::Post, SemSel::Angelic, Cmp::ResultSubsetArg, CarrierKind::Assertional),
        forbids_bot: false,
    },
    // the adjoint route: P ⊆ p̃re⟦S⟧Q (equivalent to hoare)
    NamedLogic {
        name: "subgoal-induction",
        spec: spec(TransformerSel::PreTilde, SemSel::Angelic, Cmp::ArgSubsetResult, CarrierKind::Assertional),
        forbids_bot: false,
    },
    // relational partial correctness: Post⟦S⟧P ⊆ Q on Σ×Σ carriers
    NamedLogic {
        name: "manna-partial",
        spec: spec(TransformerSel::Post, SemSel::Angelic, Cmp::ResultSubsetArg, CarrierKind::Relational),
        forbids_bot: true,
    },
    // relational total correctness: Post⟦S⟧_⊥P ⊆ Q with ⊥ excluded from Q
    NamedLogic {
        name: "manna-pnueli-total",
        spec: spec(TransformerSel::Post, SemSel::Natural, Cmp::ResultSubsetArg, CarrierKind::Relational),
        forbids_bot: true,
    },
    // assertional total correctness: post⟦S⟧_⊥P ⊆ Q
    NamedLogic {
        name: "apt-plotkin-assertional",
        spec: spec(TransformerSel::Post, SemSel::Natural, Cmp::ResultSubsetArg, CarrierKind::Assertional),
        forbids_bot: true,
    },
    // reverse Hoare / incorrectness: Q ⊆ post⟦S⟧P
    NamedLogic {
        name: "incorrectness",
        spec: spec(TransformerSel::Post, SemSel::Angelic, Cmp::ArgSubsetResult, CarrierKind::Assertional),
        forbids_bot: false,
    },
    // possible accessibility of Q or nontermination: P ⊆ pre⟦S⟧_⊥Q
    NamedLogic {
        name: "possible-accessibility",
        spec: spec(TransformerSel::Pre, SemSel::Natural, Cmp::ArgSubsetResult, CarrierKind::Assertional),
        forbids_bot: false,
    },
    // natural transformational over approximation: Post⟦S⟧_⊥P ⊆ Q, ⊥ allowed
    NamedLogic {
        name: "natural-over-relational",
        spec: spec(TransformerSel::Post, SemSel::Natural, Cmp::ResultSubsetArg, CarrierKind::Relational),
        forbids_bot: false,
    },
    // natural transformational under approximation: Q ⊆ Post⟦S⟧_⊥P
    NamedLogic {
        name: "natural-under-relational",
        spec: spec(TransformerSel::Post, SemSel::Natural, Cmp::ArgSubsetResult, CarrierKind::Relational),
        forbids_bot: false,
    },
    // contrapositive family (disproofs)
    // possible reachability witness: post⟦S⟧P ∩ Q ≠ ∅ (¬hoare on ¬Q)
    NamedLogic {
        name: "reach-meets",
        spec: spec(TransformerSel::Post, SemSel::Angelic, Cmp::Meets, CarrierKind::Assertional),
        forbids_bot: false,
    },
    // definite unreachability: post⟦S⟧P ∩ Q = ∅
    NamedLogic {
        name: "reach-empty",
        spec: spec(TransformerSel::Post, SemSel::Angelic, Cmp::Disjoint, CarrierKind::Assertional),
        forbids_bot: false,
    },
    // inaccessibility of Q outside P: pre⟦S⟧Q ⊆ P
    NamedLogic {
        name: "inaccess-all",
        spec: spec(TransformerSel::Pre, SemSel::Angelic, Cmp::ResultSubsetArg, CarrierKind::Assertional),
        forbids_bot: false,
    },
    // some state of Q inaccessible from outside P: p̃ost⟦S⟧P ∩ Q ≠ ∅
    NamedLogic {
        name: "inaccess-some",
        spec: spec(TransformerSel::PostTilde, SemSel::Angelic, Cmp::Meets, CarrierKind::Assertional),
        forbids_bot: false,
    },
    // definite accessibility from some initial state: pre⟦S⟧Q ∩ P ≠ ∅
    NamedLogic {
        name: "access-some",
        spec: spec(TransformerSel::Pre, SemSel::Angelic, Cmp::Meets, CarrierKind::Assertional),
        forbids_bot: false,
    },
    // possible non-accessibility: p̃re⟦S⟧Q ⊆ P
    NamedLogic {
        name: "nonaccess-all",
        spec: spec(TransformerSel::PreTilde, SemSel::Angelic, Cmp::ResultSubsetArg, CarrierKind::Assertional),
        forbids_bot: false,
    },
];

/// Look up a catalog entry by name.
pub fn catalog_entry(name: &str) -> Option<&'static NamedLogic> {
    CATALOG.iter().find(|l| l.name == name)
}

/// A carried predicate: assertional or relational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assn {
    A(Pred),
    R(RelPred),
}

impl Assn {
    pub fn kind(&self) -> CarrierKind {
        match self {
            Assn::A(_) => CarrierKind::Assertional,
            Assn::R(_) => CarrierKind::Relational,
        }
    }

    fn has_bot(&self) -> bool {
        match self {
            Assn::A(p) => p.contains(&El::Bot),
            Assn::R(r) => r.iter().any(|&(_, y)| y.is_bot()),
        }
    }
}

/// A counterexample to a failed membership check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    State(El),
    Pair(El, El),
}

/// Result of a membership check, with a witness when it fails (no witness for
/// failed ∩ ≠ ∅ checks: the failure is the emptiness itself).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn ok() -> Self {
        Verdict { holds: true, witness: None }
    }

    fn fail(witness: Option<Witness>) -> Self {
        Verdict { holds: false, witness }
    }
}

fn rel_of(t: &SemTriple, sem: SemSel) -> Rel {
    match sem {
        SemSel::Angelic => angelic(t),
        SemSel::Natural => t.natural(),
    }
}

fn cmp_preds(cmp: Cmp, arg: &Pred, result: &Pred) -> Verdict {
    match cmp {
        Cmp::ArgSubsetResult => match arg.difference(result).next() {
            None => Verdict::ok(),
            Some(&w) => Verdict::fail(Some(Witness::State(w))),
        },
        Cmp::ResultSubsetArg => match result.difference(arg).next() {
            None => Verdict::ok(),
            Some(&w) => Verdict::fail(Some(Witness::State(w))),
        },
        Cmp::Disjoint => match arg.intersection(result).next() {
            None => Verdict::ok(),
            Some(&w) => Verdict::fail(Some(Witness::State(w))),
        },
        Cmp::Meets => {
            if arg.intersection(result).next().is_some() {
                Verdict::ok()
            } else {
                Verdict::fail(None)
            }
        }
    }
}

fn cmp_rels(cmp: Cmp, arg: &RelPred, result: &RelPred) -> Verdict {
    match cmp {
        Cmp::ArgSubsetResult => match arg.difference(result).next() {
            None => Verdict::ok(),
            Some(&(a, b)) => Verdict::fail(Some(Witness::Pair(a, b))),
        },
        Cmp::ResultSubsetArg => match result.difference(arg).next() {
            None => Verdict::ok(),
            Some(&(a, b)) => Verdict::fail(Some(Witness::Pair(a, b))),
        },
        Cmp::Disjoint => match arg.intersection(result).next() {
            None => Verdict::ok(),
            Some(&(a, b)) => Verdict::fail(Some(Witness::Pair(a, b))),
        },
        Cmp::Meets => {
            if arg.intersection(result).next().is_some() {
                Verdict::ok()
            } else {
                Verdict::fail(None)
            }
        }
    }
}

/// Decide membership of (P,Q) in the theory described by `spec`, on the exact
/// semantics `t` of a program over `sp`.
pub fn holds_spec(
    spec: &LogicSpec,
    sp: &Space,
    t: &SemTriple,
    p: &Assn,
    q: &Assn,
) -> Result<Verdict, TheoryError> {
    if p.kind() != spec.carrier || q.kind() != spec.carrier {
        return Err(TheoryError::CarrierMismatch(format!(
            "theory carrier is {:?} but predicates are {:?}/{:?}",
            spec.carrier,
            p.kind(),
            q.kind()
        )));
    }
    let r = rel_of(t, spec.semantics);
    Ok(match (p, q) {
        (Assn::A(pp), Assn::A(qq)) => match spec.transformer {
            TransformerSel::Post => cmp_preds(spec.comparison, qq, &post(&r, pp)),
            TransformerSel::PostTilde => {
                let codomain = match spec.semantics {
                    SemSel::Angelic => sp.sigma(),
                    SemSel::Natural => sp.sigma_bot(),
                };
                cmp_preds(spec.comparison, qq, &post_tilde(&r, pp, &codomain))
            }
            TransformerSel::Pre => cmp_preds(spec.comparison, pp, &pre(&r, qq)),
            TransformerSel::PreTilde => {
                cmp_preds(spec.comparison, pp, &pre_tilde(&r, qq, &sp.sigma()))
            }
        },
        (Assn::R(pp), Assn::R(qq)) => match spec.transformer {
            TransformerSel::Post => cmp_rels(spec.comparison, qq, &post_rel(&r, pp)),
            TransformerSel::PostTilde => {
                cmp_rels(spec.comparison, qq, &post_tilde_rel(&r, pp, sp))
            }
            TransformerSel::Pre => cmp_rels(spec.comparison, pp, &pre_rel(&r, qq)),
            TransformerSel::PreTilde => cmp_rels(spec.comparison, pp, &pre_tilde_rel(&r, qq, sp)),
        },
        _ => unreachable!("carriers checked above"),
    })
}

/// Decide membership for a named catalog logic, enforcing its ⊥ carrier
/// restriction.
pub fn holds(
    logic: &NamedLogic,
    sp: &Space,
    t: &SemTriple,
    p: &Assn,
    q: &Assn,
) -> Result<Verdict, TheoryError> {
    if logic.forbids_bot && q.has_bot() {
        return Err(TheoryError::CarrierMismatch(format!(
            "{} forbids ⊥ in the postcondition",
            logic.name
        )));
    }
    holds_spec(&logic.spec, sp, t, p, q)
}

/// Run every catalog entry whose carrier matches the given predicates, in
/// declaration order.
pub fn classify(sp: &Space, t: &SemTriple, p: &Assn, q: &Assn) -> Vec<(&'static str, Verdict)> {
    CATALOG
        .iter()
        .filter_map(|l| holds(l, sp, t, p, q).ok().map(|v| (l.name, v)))
        .collect()
}

/// The extended-Hoare-logic judgement {P} S {ok: Q, br: T}:
/// post(e ∪ bot)P ⊆ Q ∧ post(b)P ⊆ T.
pub fn holds_ehl(
    sp: &Space,
    t: &SemTriple,
    p: &Assn,
    q: &Assn,
    tbr: &Assn,
) -> Result<Verdict, TheoryError> {
    let _ = sp;
    let natural = t.natural();
    match (p, q, tbr) {
        (Assn::A(pp), Assn::A(qq), Assn::A(tt)) => {
            let v = cmp_preds(Cmp::ResultSubsetArg, qq, &post(&natural, pp));
            if !v.holds {
                return Ok(v);
            }
            Ok(cmp_preds(Cmp::ResultSubsetArg, tt, &post(&t.b, pp)))
        }
        (Assn::R(pp), Assn::R(qq), Assn::R(tt)) => {
            let v = cmp_rels(Cmp::ResultSubsetArg, qq, &post_rel(&natural, pp));
            if !v.holds {
                return Ok(v);
            }
            Ok(cmp_rels(Cmp::ResultSubsetArg, tt, &post_rel(&t.b, pp)))
        }
        _ => Err(TheoryError::CarrierMismatch(
            "P, Q and T must share a carrier".to_string(),
        )),
    }
}

/// The backward possible-accessibility judgement {P} S⃖ {ok: Q, br: T}:
/// (P ⊆ pre(e ∪ bot)Q) ∨ (P ⊆ pre(b)T), evaluated literally — P may not be
/// split between the two disjuncts.
pub fn holds_prelogic(t: &SemTriple, p: &Pred, q: &Pred, tbr: &Pred) -> Verdict {
    let ok_route = cmp_preds(Cmp::ArgSubsetResult, p, &pre(&t.natural(), q));
    if ok_route.holds {
        return ok_route;
    }
    let br_route = cmp_preds(Cmp::ArgSubsetResult, p, &pre(&t.b, tbr));
    if br_route.holds {
        br_route
    } else {
        // report the ok-route witness: a P state with no accepted execution
        ok_route
    }
}

// ---------------------------------------------------------------------------
// The Hoare theory as a composed abstraction chain
// ---------------------------------------------------------------------------

/// Membership of assertional (P,Q) in the Hoare theory computed step by step
/// through the abstraction chain α_{↓2} ∘ α²_⊥ ∘ post(⊇,⊆) ∘ α_G ∘ Post
/// instead of the direct formula. Each step is reduced exactly:
///
/// 1. α_G(Post r) membership: (A,B) iff B = Post(r)A.
/// 2. post(⊇,⊆) closure: (A,B) iff ∃A′ ⊇ A. Post(r)A′ ⊆ B, and by
///    monotony of Post the optimal choice is A′ = A.
/// 3. α²_⊥: (A,B) iff Σ×{⊥} ⊆ B and (A, B) was already in the closure
///    (upward closure in B absorbs the added ⊥ rows).
/// 4. α̇_{↓2}: assertional (P,Q) iff some relational (A,B) with projections
///    P and Q ∪ {⊥} is a member; by monotony the maximal lift A = Σ×P,
///    B = Σ×(Q ∪ {⊥}) is optimal.
pub fn hoare_via_chain(sp: &Space, t: &SemTriple, p: &Pred, q: &Pred) -> bool {
    let r = t.natural();
    // step 4: maximal relational lift of the assertional query
    let lift_p: RelPred =
        sp.states().flat_map(|s0| p.iter().map(move |&e| (El::St(s0), e))).collect();
    let mut q_bot = q.clone();
    q_bot.insert(El::Bot);
    let lift_q: RelPred =
        sp.states().flat_map(|s0| q_bot.iter().map(move |&e| (El::St(s0), e))).collect();
    // step 3: the lifted postcondition already contains all ⊥ rows
    debug_assert!(sp.states().all(|s0| lift_q.contains(&(El::St(s0), El::Bot))));
    // steps 1-2: graph membership up to consequence = transformer inclusion
    post_rel(&r, &lift_p).is_subset(&lift_q)
}

/// The Hoare theory fully materialized through the set-level combinators of
/// [`crate::galois`], for tiny spaces (|Σ| ≤ 2): enumerates the relational
/// graph, closes under consequence, applies the termination-inclusion and
/// projection abstractions, and returns the assertional theory.
pub fn hoare_theory_materialized(
    sp: &Space,
    t: &SemTriple,
) -> Result<BTreeSet<(Pred, Pred)>, TheoryError> {
    let n_states = sp.states().count();
    if n_states > 2 {
        return Err(TheoryError::CarrierMismatch(
            "materialized chain limited to |Σ| ≤ 2".to_string(),
        ));
    }
    let r = t.natural();
    let dom_pairs: Vec<(El, El)> = sp.full_rel().into_iter().collect();
    let cod_pairs: Vec<(El, El)> = sp.full_rel_bot().into_iter().collect();
    // α_G(Post r): the graph over all relational preconditions
    let mut graph: BTreeSet<(RelPred, RelPred)> = BTreeSet::new();
    for mask in 0u64..(1 << dom_pairs.len()) {
        let pp: RelPred = crate::galois::set_of(&dom_pairs, mask);
        graph.insert((pp.clone(), post_rel(&r, &pp)));
    }
    // post(⊇,⊆) consequence closure over ℘(dom) × ℘(cod)
    let mut closed: BTreeSet<(RelPred, RelPred)> = BTreeSet::new();
    for pmask in 0u64..(1 << dom_pairs.len()) {
        let pp: RelPred = crate::galois::set_of(&dom_pairs, pmask);
        for qmask in 0u64..(1 << cod_pairs.len()) {
            let qq: RelPred = crate::galois::set_of(&cod_pairs, qmask);
            if graph.iter().any(|(a, b)| pp.is_subset(a) && b.is_subset(&qq)) {
                closed.insert((pp.clone(), qq));
            }
        }
    }
    // α²_⊥ then α̇_{↓2}
    let with_bot = crate::galois::termination_incl_rel(&closed, sp);
    Ok(with_bot
        .into_iter()
        .map(|(pp, qq)| {
            let proj_q: Pred =
                crate::galois::proj2(&qq).into_iter().filter(|e| !e.is_bot()).collect();
            (crate::galois::proj2(&pp), proj_q)
        })
        .collect())
}

/// The angelic relation including breaks, exposed for reuse.
pub fn angelic_with_breaks(t: &SemTriple) -> Rel {
    union(&t.e, &t.b)
}

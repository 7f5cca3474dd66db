//! The structural fixpoint natural relational semantics
//! ⟦S⟧ = (⟦S⟧ᵉ, ⟦S⟧ᵇ, ⟦S⟧^⊥): normal exit, break exit, and nontermination,
//! plus an independent exhaustive-execution oracle and the termination lemma
//! check (gfp F^⊥ = ∅ ⇔ no infinite ⟦B⟧⨟⟦S⟧ᵉ-chain).
//!
//! Iteration: with F
//! ᵉ(X) = id ∪ (⟦B⟧⨟⟦S⟧ᵉ⨟X) and F^⊥(X) = ⟦B⟧⨟⟦S⟧ᵉ⨟X,
//!
//!   ⟦while (B) S⟧ᵉ  = lfp(Fᵉ) ⨟ (⟦¬B⟧ ∪ ⟦B⟧⨟⟦S⟧ᵇ)
//!   ⟦while (B) S⟧ᵇ  = ∅
//!   ⟦while (B) S⟧^⊥ = (lfp(Fᵉ) ⨟ ⟦B⟧⨟⟦S⟧^⊥) ∪ gfp(F^⊥)
//!
//! with lfp computed by increasing iteration from ∅ over ℘(Σ×Σ) and gfp by
//! decreasing iteration from Σ×{⊥} (finite lattices stabilize below ω).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::lang::{eval_aexpr, eval_bexpr, BExpr, Bound, Stmt};
use crate::space::{self, compose, diff, union, El, Rel, Space, SpaceError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RelsemError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("nonterm_empty_check requires a while statement")]
    NotAWhile,
}

/// The three semantic components of a statement: `e` (normal exit, ⊆ Σ×Σ),
/// `b` (break exit, ⊆ Σ×Σ), `bot` (nontermination, ⊆ Σ×{⊥}).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemTriple {
    pub e: Rel,
    pub b: Rel,
    pub bot: Rel,
}

impl SemTriple {
    pub fn empty() -> Self {
        SemTriple { e: Rel::new(), b: Rel::new(), bot: Rel::new() }
    }

    /// The natural (⊥-aware) exit relation e ∪ bot, with b kept separate.
    pub fn natural(&self) -> Rel {
        union(&self.e, &self.bot)
    }

    /// e ∪ b ∪ bot, the union used by Dijkstra's wp/sp.
    pub fn all(&self) -> Rel {
        union(&union(&self.e, &self.b), &self.bot)
    }
}

/// The angelic semantics: e ∪ b restricted to Σ × Σ (nontermination ignored).
pub fn angelic(t: &SemTriple) -> Rel {
    union(&t.e, &t.b)
        .into_iter()
        .filter(|(_, y)| !y.is_bot())
        .collect()
}

/// ⟦B⟧ = {(σ,σ) | σ ∈ 𝓑⟦B⟧} as a test relation.
pub fn bsem(sp: &Space, b: &BExpr) -> Rel {
    sp.states()
        .filter(|&s| eval_bexpr(b, sp, s))
        .map(|s| (El::St(s), El::St(s)))
        .collect()
}

/// States satisfying B.
pub fn bstates(sp: &Space, b: &BExpr) -> BTreeSet<u32> {
    sp.states().filter(|&s| eval_bexpr(b, sp, s)).collect()
}

fn clamp_bounds(sp: &Space, lo: Bound, hi: Bound) -> (i64, i64) {
    let d = sp.domain();
    let lo = match lo {
        Bound::Int(v) => d.clamp(v),
        Bound::NegInf => d.lo,
        Bound::PosInf => d.hi + 1, // empty range marker when paired with any hi
    };
    let hi = match hi {
        Bound::Int(v) => d.clamp(v),
        Bound::PosInf => d.hi,
        Bound::NegInf => d.lo - 1,
    };
    (lo, hi)
}

/// Sequential composition of semantic triples:
/// e = e₁⨟e₂, b = b₁ ∪ e₁⨟b₂, bot = bot₁ ∪ e₁⨟bot₂.
pub fn seq_compose(t1: &SemTriple, t2: &SemTriple) -> SemTriple {
    SemTriple {
        e: compose(&t1.e, &t2.e),
        b: union(&t1.b, &compose(&t1.e, &t2.b)),
        bot: union(&t1.bot, &compose(&t1.e, &t2.bot)),
    }
}

fn sem_stmt(sp: &Space, s: &Stmt) -> Result<SemTriple, RelsemError> {
    match s {
        Stmt::Assign { var, expr } => {
            let ix = sp.var_index(var).expect("validated variable");
            let e = sp
                .states()
                .map(|s| (El::St(s), El::St(sp.update(s, ix, eval_aexpr(expr, sp, s)))))
                .collect();
            Ok(SemTriple { e, b: Rel::new(), bot: Rel::new() })
        }
        Stmt::Nondet { var, lo, hi } => {
            let ix = sp.var_index(var).expect("validated variable");
            let (lo, hi) = clamp_bounds(sp, *lo, *hi);
            let mut e = Rel::new();
            for s in sp.states() {
                for v in lo..=hi {
                    e.insert((El::St(s), El::St(sp.update(s, ix, v))));
                }
            }
            Ok(SemTriple { e, b: Rel::new(), bot: Rel::new() })
        }
        Stmt::Skip => Ok(SemTriple { e: sp.id_rel(), b: Rel::new(), bot: Rel::new() }),
        Stmt::Break => Ok(SemTriple { e: Rel::new(), b: sp.id_rel(), bot: Rel::new() }),
        Stmt::If { cond, then_b, else_b } => {
            let bt = bsem(sp, cond);
            let bf = diff(&sp.id_rel(), &bt);
            let t1 = sem(sp, then_b)?;
            let t2 = sem(sp, else_b)?;
            Ok(SemTriple {
                e: union(&compose(&bt, &t1.e), &compose(&bf, &t2.e)),
                b: union(&compose(&bt, &t1.b), &compose(&bf, &t2.b)),
                bot: union(&compose(&bt, &t1.bot), &compose(&bf, &t2.bot)),
            })
        }
        Stmt::While { cond, body } => {
            let bt = bsem(sp, cond);
            let nbt = diff(&sp.id_rel(), &bt);
            let tb = sem(sp, body)?;
            let r = compose(&bt, &tb.e);
            let lfp_fe = space::lfp(|x: &Rel| union(&sp.id_rel(), &compose(&r, x)), &sp.full_rel())
                .map_err(RelsemError::Space)?
                .fix;
            let gfp_fbot = space::gfp(|x: &Rel| compose(&r, x), &sp.sigma_times_bot())
                .map_err(RelsemError::Space)?
                .fix;
            let e = compose(&lfp_fe, &union(&nbt, &compose(&bt, &tb.b)));
            let bot = union(&compose(&lfp_fe, &compose(&bt, &tb.bot)), &gfp_fbot);
            Ok(SemTriple { e, b: Rel::new(), bot })
        }
    }
}

/// Fixpoint semantics of a statement sequence over `sp`.
pub fn sem(sp: &Space, stmts: &[Stmt]) -> Result<SemTriple, RelsemError> {
    let mut acc = SemTriple { e: sp.id_rel(), b: Rel::new(), bot: Rel::new() };
    for s in stmts {
        acc = seq_compose(&acc, &sem_stmt(sp, s)?);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Independent oracle: exhaustive exploration of the configuration graph
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Outcome {
    Ok(u32),
    Brk(u32),
    Div,
}

fn exec_seq(sp: &Space, stmts: &[Stmt], s: u32) -> BTreeSet<Outcome> {
    let mut cur: BTreeSet<Outcome> = [Outcome::Ok(s)].into_iter().collect();
    for st in stmts {
        let mut next = BTreeSet::new();
        for o in cur {
            match o {
                Outcome::Ok(t) => next.extend(exec_stmt(sp, st, t)),
                other => {
                    next.insert(other);
                }
            }
        }
        cur = next;
    }
    cur
}

fn exec_stmt(sp: &Space, st: &Stmt, s: u32) -> BTreeSet<Outcome> {
    match st {
        Stmt::Assign { var, expr } => {
            let ix = sp.var_index(var).expect("validated variable");
            [Outcome::Ok(sp.update(s, ix, eval_aexpr(expr, sp, s)))].into_iter().collect()
        }
        Stmt::Nondet { var, lo, hi } => {
            let ix = sp.var_index(var).expect("validated variable");
            let (lo, hi) = clamp_bounds(sp, *lo, *hi);
            (lo..=hi).map(|v| Outcome::Ok(sp.update(s, ix, v))).collect()
        }
        Stmt::Skip => [Outcome::Ok(s)].into_iter().collect(),
        Stmt::Break => [Outcome::Brk(s)].into_iter().collect(),
        Stmt::If { cond, then_b, else_b } => {
            if eval_bexpr(cond, sp, s) {
                exec_seq(sp, then_b, s)
            } else {
                exec_seq(sp, else_b, s)
            }
        }
        Stmt::While { cond, body } => exec_while(sp, cond, body, s),
    }
}

/// Execute a while loop from `s` by exploring the graph of loop-head states:
/// an infinite execution exists iff a cycle (over B-states, stepping through
/// one body execution per edge) is reachable from `s`, or some reachable body
/// run itself diverges.
fn exec_while(sp: &Space, cond: &BExpr, body: &[Stmt], s: u32) -> BTreeSet<Outcome> {
    // explore reachable loop-head states, caching body outcomes per head
    let mut body_out: BTreeMap<u32, BTreeSet<Outcome>> = BTreeMap::new();
    let mut edges: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    let mut reach: BTreeSet<u32> = [s].into_iter().collect();
    let mut work = vec![s];
    let mut out = BTreeSet::new();
    while let Some(h) = work.pop() {
        if !eval_bexpr(cond, sp, h) {
            out.insert(Outcome::Ok(h));
            continue;
        }
        let outs = body_out.entry(h).or_insert_with(|| exec_seq(sp, body, h)).clone();
        for o in outs {
            match o {
                Outcome::Ok(t) => {
                    edges.entry(h).or_default().insert(t);
                    if reach.insert(t) {
                        work.push(t);
                    }
                }
                Outcome::Brk(t) => {
                    out.insert(Outcome::Ok(t));
                }
                Outcome::Div => {
                    out.insert(Outcome::Div);
                }
            }
        }
    }
    if has_cycle(&edges, &reach) {
        out.insert(Outcome::Div);
    }
    out
}

/// Does the directed graph restricted to `nodes` contain a cycle?
fn has_cycle(edges: &BTreeMap<u32, BTreeSet<u32>>, nodes: &BTreeSet<u32>) -> bool {
    // iterative three-color DFS
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color: BTreeMap<u32, Color> = nodes.iter().map(|&n| (n, Color::White)).collect();
    for &start in nodes {
        if color[&start] != Color::White {
            continue;
        }
        let mut stack: Vec<(u32, Vec<u32>)> = vec![(
            start,
            edges.get(&start).map(|e| e.iter().copied().collect()).unwrap_or_default(),
        )];
        color.insert(start, Color::Gray);
        while let Some((node, succs)) = stack.last_mut() {
            match succs.pop() {
                Some(next) => match color.get(&next).copied() {
                    Some(Color::Gray) => return true,
                    Some(Color::White) => {
                        color.insert(next, Color::Gray);
                        stack.push((
                            next,
                            edges.get(&next).map(|e| e.iter().copied().collect()).unwrap_or_default(),
                        ));
                    }
                    _ => {}
                },
                None => {
                    color.insert(*node, Color::Black);
                    stack.pop();
                }
            }
        }
    }
    false
}

/// Independent oracle: run the exhaustive interpreter from every state.
pub fn interp_oracle(sp: &Space, stmts: &[Stmt]) -> SemTriple {
    let mut t = SemTriple::empty();
    for s in sp.states() {
        for o in exec_seq(sp, stmts, s) {
            match o {
                Outcome::Ok(x) => {
                    t.e.insert((El::St(s), El::St(x)));
                }
                Outcome::Brk(x) => {
                    t.b.insert((El::St(s), El::St(x)));
                }
                Outcome::Div => {
                    t.bot.insert((El::St(s), El::Bot));
                }
            }
        }
    }
    t
}

/// Both sides of the termination lemma for one while loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NontermReport {
    /// gfp(F^⊥) = ∅, computed by decreasing iteration.
    pub gfp_empty: bool,
    /// No infinite ⟦B⟧⨟⟦S⟧ᵉ-chain exists (finite case: the relation has no cycle).
    pub no_infinite_chain: bool,
}

impl NontermReport {
    pub fn agree(&self) -> bool {
        self.gfp_empty == self.no_infinite_chain
    }
}

/// Check the termination lemma on a while statement: gfp(F^⊥) = ∅ ⇔ no
/// infinite ⟦B⟧⨟⟦S⟧ᵉ-chain. Both sides are computed independently (fixpoint
/// iteration vs. graph cycle detection) and returned.
pub fn nonterm_empty_check(sp: &Space, s: &Stmt) -> Result<NontermReport, RelsemError> {
    let Stmt::While { cond, body } = s else {
        return Err(RelsemError::NotAWhile);
    };
    let bt = bsem(sp, cond);
    let tb = sem(sp, body)?;
    let r = compose(&bt, &tb.e);
    let gfp_fbot = space::gfp(|x: &Rel| compose(&r, x), &sp.sigma_times_bot())
        .map_err(RelsemError::Space)?
        .fix;
    // infinite chains in a finite graph exist iff the graph has a cycle
    let mut edges: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    let mut nodes: BTreeSet<u32> = BTreeSet::new();
    for (x, y) in &r {
        let (Some(x), Some(y)) = (x.state(), y.state()) else { continue };
        edges.entry(x).or_default().insert(y);
        nodes.insert(x);
        nodes.insert(y);
    }
    Ok(NontermReport {
        gfp_empty: gfp_fbot.is_empty(),
        no_infinite_chain: !has_cycle(&edges, &nodes),
    })
}

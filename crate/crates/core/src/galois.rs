//! The abstraction combinators as executable maps on finite carriers, plus a
//! generic Galois-connection verifier.
//!
//! Carriers are finite powerset-shaped posets: a powerset (possibly with the
//! dual order), a powerset sublattice above a fixed set, or finite products of
//! those. Elements are addressed by index; for powersets the index is the
//! bitmask over the base.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::space::{El, Pred, Rel, RelPred, Space};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GaloisError {
    #[error("carrier too large to enumerate ({0} elements) and no sampling budget")]
    CarrierTooLarge(u64),
    #[error("base set too large to enumerate subsets ({0} elements)")]
    BaseTooLarge(usize),
}

/// A finite powerset-shaped poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Carrier {
    /// ℘(base) over `n` atoms, ordered by ⊆ (or ⊇ when `dual`); element index
    /// = bitmask.
    Pow { n: u32, dual: bool },
    /// {X | fixed ⊆ X ⊆ base}: the sublattice of ℘(base) above `fixed`;
    /// element index = bitmask (always containing `fixed`).
    PowAbove { n: u32, fixed: u64, dual: bool },
    /// Componentwise product; element index is mixed-radix over the factors.
    Prod(Vec<Carrier>),
}

impl Carrier {
    pub fn pow(n: u32) -> Self {
        Carrier::Pow { n, dual: false }
    }

    pub fn pow_dual(n: u32) -> Self {
        Carrier::Pow { n, dual: true }
    }

    pub fn len(&self) -> u64 {
        match self {
            Carrier::Pow { n, .. } => 1u64 << n,
            Carrier::PowAbove { n, fixed, .. } => 1u64 << (n - fixed.count_ones()),
            Carrier::Prod(cs) => cs.iter().map(|c| c.len()).product(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Decode an element index to its denotation: for powersets the bitmask,
    /// for products the component indices (flattened left to right).
    pub fn decode(&self, ix: u64) -> Vec<u64> {
        match self {
            Carrier::Pow { .. } => vec![ix],
            Carrier::PowAbove { n, fixed, .. } => {
                // spread index over the free bit positions, then add fixed
                let mut mask = *fixed;
                let mut rem = ix;
                for bit in 0..*n {
                    if fixed >> bit & 1 == 0 {
                        if rem & 1 == 1 {
                            mask |= 1 << bit;
                        }
                        rem >>= 1;
                    }
                }
                vec![mask]
            }
            Carrier::Prod(cs) => {
                let mut rem = ix;
                let mut out = Vec::new();
                for c in cs.iter().rev() {
                    let l = c.len();
                    out.push(c.decode(rem % l));
                    rem /= l;
                }
                out.reverse();
                out.into_iter().flatten().collect()
            }
        }
    }

    /// Inverse of [`Carrier::decode`].
    pub fn encode(&self, denote: &[u64]) -> u64 {
        match self {
            Carrier::Pow { .. } => denote[0],
            Carrier::PowAbove { n, fixed, .. } => {
                let mask = denote[0];
                let mut ix = 0u64;
                let mut pos = 0;
                for bit in 0..*n {
                    if fixed >> bit & 1 == 0 {
                        if mask >> bit & 1 == 1 {
                            ix |= 1 << pos;
                        }
                        pos += 1;
                    }
                }
                ix
            }
            Carrier::Prod(cs) => {
                let mut ix = 0u64;
                let mut offset = 0;
                for c in cs {
                    let w = c.width();
                    ix = ix * c.len() + c.encode(&denote[offset..offset + w]);
                    offset += w;
                }
                ix
            }
        }
    }

    fn width(&self) -> usize {
        match self {
            Carrier::Pow { .. } | Carrier::PowAbove { .. } => 1,
            Carrier::Prod(cs) => cs.iter().map(|c| c.width()).sum(),
        }
    }

    /// Partial order on element indices.
    pub fn leq(&self, x: u64, y: u64) -> bool {
        match self {
            Carrier::Pow { dual, .. } | Carrier::PowAbove { dual, .. } => {
                let (a, b) = (self.decode(x)[0], self.decode(y)[0]);
                if *dual {
                    b & !a == 0
                } else {
                    a & !b == 0
                }
            }
            Carrier::Prod(cs) => {
                let mut rx = x;
                let mut ry = y;
                for c in cs.iter().rev() {
                    let l = c.len();
                    if !c.leq(rx % l, ry % l) {
                        return false;
                    }
                    rx /= l;
                    ry /= l;
                }
                true
            }
        }
    }
}

/// A Galois connection candidate between two carriers: α(x) ≤ y ⇔ x ≤ γ(y).
pub struct GaloisPair<'a> {
    pub src: Carrier,
    pub dst: Carrier,
    pub alpha: Box<dyn Fn(u64) -> u64 + 'a>,
    pub gamma: Box<dyn Fn(u64) -> u64 + 'a>,
}

/// First violating pair found by [`verify_gc`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcViolation {
    pub x: u64,
    pub y: u64,
    pub alpha_leq: bool,
    pub gamma_leq: bool,
}

const EXHAUSTIVE_CARRIER_LIMIT: u64 = 1 << 12;
const SAMPLE_BUDGET: u64 = 10_000;

/// Verify α(x) ≤ y ⇔ x ≤ γ(y): exhaustively when both carriers have at most
/// 2¹² elements, by 10⁴ seeded random pairs otherwise. Returns the first
/// counterexample on failure.
pub fn verify_gc(g: &GaloisPair<'_>, seed: u64) -> Result<(), GcViolation> {
    let check = |x: u64, y: u64| -> Result<(), GcViolation> {
        let alpha_leq = g.dst.leq((g.alpha)(x), y);
        let gamma_leq = g.src.leq(x, (g.gamma)(y));
        if alpha_leq != gamma_leq {
            Err(GcViolation { x, y, alpha_leq, gamma_leq })
        } else {
            Ok(())
        }
    };
    if g.src.len() <= EXHAUSTIVE_CARRIER_LIMIT && g.dst.len() <= EXHAUSTIVE_CARRIER_LIMIT {
        for x in 0..g.src.len() {
            for y in 0..g.dst.len() {
                check(x, y)?;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SAMPLE_BUDGET {
            let x = rng.gen_range(0..g.src.len());
            let y = rng.gen_range(0..g.dst.len());
            check(x, y)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Set-level combinators
// ---------------------------------------------------------------------------

const SUBSET_BASE_LIMIT: usize = 16;

/// All subsets of a base set (error above 16 elements).
pub fn subsets(base: &Pred) -> Result<Vec<Pred>, GaloisError> {
    let elems: Vec<El> = base.iter().copied().collect();
    if elems.len() > SUBSET_BASE_LIMIT {
        return Err(GaloisError::BaseTooLarge(elems.len()));
    }
    let mut out = Vec::with_capacity(1 << elems.len());
    for mask in 0u32..(1 << elems.len()) {
        out.push(
            elems
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, e)| *e)
                .collect(),
        );
    }
    Ok(out)
}

/// The over-approximation (consequence) closure post(⊇,⊆):
/// {(P′,Q′) | ∃(P,Q) ∈ R. P′ ⊆ P ∧ Q ⊆ Q′}, enumerated over ℘(u1) × ℘(u2).
pub fn consequence_over(
    r: &BTreeSet<(Pred, Pred)>,
    u1: &Pred,
    u2: &Pred,
) -> Result<BTreeSet<(Pred, Pred)>, GaloisError> {
    let mut out = BTreeSet::new();
    for p2 in subsets(u1)? {
        for q2 in subsets(u2)? {
            if r.iter().any(|(p, q)| p2.is_subset(p) && q.is_subset(&q2)) {
                out.insert((p2.clone(), q2));
            }
        }
    }
    Ok(out)
}

/// The under-approximation closure post(⊆,⊇):
/// {(P′,Q′) | ∃(P,Q) ∈ R. P ⊆ P′ ∧ Q′ ⊆ Q}.
pub fn consequence_under(
    r: &BTreeSet<(Pred, Pred)>,
    u1: &Pred,
    u2: &Pred,
) -> Result<BTreeSet<(Pred, Pred)>, GaloisError> {
    let mut out = BTreeSet::new();
    for p2 in subsets(u1)? {
        for q2 in subsets(u2)? {
            if r.iter().any(|(p, q)| p.is_subset(&p2) && q2.is_subset(q)) {
                out.insert((p2.clone(), q2));
            }
        }
    }
    Ok(out)
}

/// α²_¬⊥ — excluding ⊥ from the postcondition: keeps the pairs whose
/// postcondition contains no ⊥.
pub fn termination_excl(r: &BTreeSet<(Pred, Pred)>) -> BTreeSet<(Pred, Pred)> {
    r.iter().filter(|(_, q)| !q.contains(&El::Bot)).cloned().collect()
}

/// α²_⊥ — allowing the possibility of nontermination: adds ⊥ to every
/// postcondition.
pub fn termination_incl(r: &BTreeSet<(Pred, Pred)>) -> BTreeSet<(Pred, Pred)> {
    r.iter()
        .map(|(p, q)| {
            let mut q = q.clone();
            q.insert(El::Bot);
            (p.clone(), q)
        })
        .collect()
}

/// Relational α²_⊥: adds Σ × {⊥} to every relational postcondition.
pub fn termination_incl_rel(
    r: &BTreeSet<(RelPred, RelPred)>,
    sp: &Space,
) -> BTreeSet<(RelPred, RelPred)> {
    r.iter()
        .map(|(p, q)| {
            let mut q = q.clone();
            q.extend(sp.states().map(|s| (El::St(s), El::Bot)));
            (p.clone(), q)
        })
        .collect()
}

/// α_{↓2} — projection on the second component.
pub fn proj2(r: &RelPred) -> Pred {
    r.iter().map(|&(_, y)| y).collect()
}

/// α_{↓1} — projection on the first component (α_{↓2} ∘ α^{-1}).
pub fn proj1(r: &RelPred) -> Pred {
    proj2(&invert(r))
}

/// γ_{↓2} — concretization of a projection: Σ × Q.
pub fn proj2_gamma(q: &Pred, sp: &Space) -> RelPred {
    let mut out = RelPred::new();
    for s in sp.states() {
        for &y in q {
            out.insert((El::St(s), y));
        }
    }
    out
}

/// α_G — the graph of a transformer: {(P, f(P)) | P ⊆ u1}.
pub fn graph(
    f: impl Fn(&Pred) -> Pred,
    u1: &Pred,
) -> Result<BTreeSet<(Pred, Pred)>, GaloisError> {
    Ok(subsets(u1)?.into_iter().map(|p| (p.clone(), f(&p))).collect())
}

/// α^{-1} — relation inverse.
pub fn invert(r: &Rel) -> Rel {
    crate::space::inverse(r)
}

/// α^~ — the complement-dual of a transformer: λX. ¬f(¬X), complements
/// relative to the given universes.
pub fn complement_dual<'a>(
    f: impl Fn(&Pred) -> Pred + 'a,
    u_in: Pred,
    u_out: Pred,
) -> impl Fn(&Pred) -> Pred + 'a {
    move |x: &Pred| {
        let nx: Pred = u_in.difference(x).copied().collect();
        u_out.difference(&f(&nx)).copied().collect()
    }
}

/// α^¬ — set complement relative to a universe.
pub fn negate(s: &Pred, universe: &Pred) -> Pred {
    universe.difference(s).copied().collect()
}

/// α_C — the degenerate singleton-collecting abstraction: union of the
/// collected semantics (always a singleton here).
pub fn alpha_c(collected: &BTreeSet<Pred>) -> Pred {
    collected.iter().flatten().copied().collect()
}

/// The four emptiness/non-emptiness abstractions of a transformer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmptinessVariant {
    /// {(P,Q) | Q ∩ τ(P) = ∅}
    FwdEmpty,
    /// {(P,Q) | Q ∩ τ(P) ≠ ∅}
    FwdMeets,
    /// {(P,Q) | P ∩ τ(Q) = ∅}
    BwdEmpty,
    /// {(P,Q) | P ∩ τ(Q) ≠ ∅}
    BwdMeets,
}

/// Emptiness abstraction of a transformer τ over ℘(u1) × ℘(u2).
pub fn emptiness_abs(
    tau: impl Fn(&Pred) -> Pred,
    variant: EmptinessVariant,
    u1: &Pred,
    u2: &Pred,
) -> Result<BTreeSet<(Pred, Pred)>, GaloisError> {
    let mut out = BTreeSet::new();
    for p in subsets(u1)? {
        for q in subsets(u2)? {
            let keep = match variant {
                EmptinessVariant::FwdEmpty => q.intersection(&tau(&p)).next().is_none(),
                EmptinessVariant::FwdMeets => q.intersection(&tau(&p)).next().is_some(),
                EmptinessVariant::BwdEmpty => p.intersection(&tau(&q)).next().is_none(),
                EmptinessVariant::BwdMeets => p.intersection(&tau(&q)).next().is_some(),
            };
            if keep {
                out.insert((p.clone(), q));
            }
        }
    }
    Ok(out)
}

/// Pointwise meet of two transformers.
pub fn combine_meet<'a>(
    t1: impl Fn(&Pred) -> Pred + 'a,
    t2: impl Fn(&Pred) -> Pred + 'a,
) -> impl Fn(&Pred) -> Pred + 'a {
    move |x: &Pred| t1(x).intersection(&t2(x)).copied().collect()
}

/// Pointwise join of two transformers.
pub fn combine_join<'a>(
    t1: impl Fn(&Pred) -> Pred + 'a,
    t2: impl Fn(&Pred) -> Pred + 'a,
) -> impl Fn(&Pred) -> Pred + 'a {
    move |x: &Pred| t1(x).union(&t2(x)).copied().collect()
}

/// Cartesian combination: pair of results.
pub fn combine_cartesian<'a>(
    t1: impl Fn(&Pred) -> Pred + 'a,
    t2: impl Fn(&Pred) -> Pred + 'a,
) -> impl Fn(&Pred) -> (Pred, Pred) + 'a {
    move |x: &Pred| (t1(x), t2(x))
}

// ---------------------------------------------------------------------------
// Bitmask ↔ set helpers for building GaloisPairs over concrete carriers
// ---------------------------------------------------------------------------

/// Encode a subset of an indexed base as a bitmask.
pub fn mask_of<T: Ord>(base: &[T], s: &BTreeSet<T>) -> u64 {
    base.iter()
        .enumerate()
        .filter(|(_, e)| s.contains(e))
        .fold(0u64, |m, (i, _)| m | 1 << i)
}

/// Decode a bitmask to a subset of an indexed base.
pub fn set_of<T: Ord + Clone>(base: &[T], mask: u64) -> BTreeSet<T> {
    base.iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| e.clone())
        .collect()
}

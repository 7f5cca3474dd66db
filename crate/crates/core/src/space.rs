//! Finite value domains, state enumeration, predicates, relation algebra, and
//! generic lfp/gfp iteration over finite powerset lattices.
//!
//! Everything downstream computes on the types defined here: a [`Space`] fixes
//! a finite set of states Σ (total maps from declared variables to a bounded
//! integer [`Domain`]), predicates are finite subsets of Σ ∪ {⊥}, and
//! relations are finite sets of ordered pairs whose composition absorbs ⊥:
//! (σ,⊥) ∈ r₁ implies (σ,⊥) ∈ r₁⨟r₂.

use std::collections::BTreeSet;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Default cap on the number of enumerated states.
pub const DEFAULT_STATE_CAP: usize = 4096;

/// Errors produced by the state-space substrate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SpaceError {
    #[error("state space of {states} states exceeds cap of {cap}")]
    CapExceeded { states: usize, cap: usize },
    #[error("domain is empty: lo {lo} > hi {hi}")]
    EmptyDomain { lo: i64, hi: i64 },
    #[error("monotonicity violation during fixpoint iteration at step {step}: iterates are not a chain")]
    IterationNotChain { step: usize },
    #[error("fixpoint iteration failed to stabilize within {0} steps")]
    NoStabilization(usize),
    #[error("function is not monotone: f({x}) ⊄ f({y}) although {x} ⊆ {y}")]
    NotMonotone { x: String, y: String },
    #[error("malformed element literal: {0}")]
    BadLiteral(String),
}

/// A finite inclusive integer interval with saturating (clamping) arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Domain {
    pub lo: i64,
    pub hi: i64,
}

impl Domain {
    pub fn new(lo: i64, hi: i64) -> Result<Self, SpaceError> {
        if lo > hi {
            return Err(SpaceError::EmptyDomain { lo, hi });
        }
        Ok(Domain { lo, hi })
    }

    /// Number of values in the domain.
    pub fn width(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    /// Saturate a value to the domain bounds.
    pub fn clamp(&self, v: i64) -> i64 {
        v.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// An element of Σ ∪ {⊥}: either a state (by canonical index) or the
/// distinguished nontermination marker ⊥.
///
/// The derived order places all states (in lexicographic index order) before
/// ⊥, which fixes the deterministic serialization order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum El {
    St(u32),
    Bot,
}

impl El {
    pub fn is_bot(&self) -> bool {
        matches!(self, El::Bot)
    }

    pub fn state(&self) -> Option<u32> {
        match self {
            El::St(s) => Some(*s),
            El::Bot => None,
        }
    }
}

/// An assertional predicate: a finite subset of Σ ∪ {⊥}.
pub type Pred = BTreeSet<El>;

/// A finite binary relation over (Σ ∪ {⊥}) × (Σ ∪ {⊥}).
///
/// Most relations in this crate keep the first component in Σ; relational
/// predicates (initial-state, current-state-or-⊥) share this representation.
pub type Rel = BTreeSet<(El, El)>;

/// A relational predicate: pairs (initial state, current state or ⊥).
pub type RelPred = Rel;

/// A finite state space: declared variables over a common [`Domain`].
///
/// States are total maps variable → value, enumerated lexicographically with
/// the first declared variable most significant; the enumeration index is the
/// canonical state identity used by [`El::St`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    vars: Vec<String>,
    dom: Domain,
    n: usize,
}

impl Space {
    pub fn new(dom: Domain, vars: &[String]) -> Result<Self, SpaceError> {
        Self::with_cap(dom, vars, DEFAULT_STATE_CAP)
    }

    pub fn with_cap(dom: Domain, vars: &[String], cap: usize) -> Result<Self, SpaceError> {
        let mut n: usize = 1;
        for _ in vars {
            n = match n.checked_mul(dom.width()) {
                Some(m) if m <= cap => m,
                _ => return Err(SpaceError::CapExceeded { states: n.saturating_mul(dom.width()), cap }),
            };
        }
        Ok(Space { vars: vars.to_vec(), dom, n })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn domain(&self) -> Domain {
        self.dom
    }

    pub fn n_states(&self) -> usize {
        self.n
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Decode a state index to its value vector (in declared-variable order).
    pub fn values(&self, s: u32) -> Vec<i64> {
        let w = self.dom.width() as u64;
        let mut rem = s as u64;
        let mut out = vec![0i64; self.vars.len()];
        for i in (0..self.vars.len()).rev() {
            out[i] = self.dom.lo + (rem % w) as i64;
            rem /= w;
        }
        out
    }

    /// Value of variable `var_ix` in state `s`.
    pub fn value(&self, s: u32, var_ix: usize) -> i64 {
        let w = self.dom.width() as u64;
        let pos = self.vars.len() - 1 - var_ix;
        let v = (s as u64 / w.pow(pos as u32)) % w;
        self.dom.lo + v as i64
    }

    /// Encode a value vector to its state index.
    pub fn index(&self, vals: &[i64]) -> u32 {
        debug_assert_eq!(vals.len(), self.vars.len());
        let w = self.dom.width() as u64;
        let mut ix: u64 = 0;
        for &v in vals {
            debug_assert!(self.dom.contains(v));
            ix = ix * w + (v - self.dom.lo) as u64;
        }
        ix as u32
    }

    /// The state obtained from `s` by assigning `v` (clamped) to `var_ix`.
    pub fn update(&self, s: u32, var_ix: usize, v: i64) -> u32 {
        let mut vals = self.values(s);
        vals[var_ix] = self.dom.clamp(v);
        self.index(&vals)
    }

    /// All states, in canonical (lexicographic) order.
    pub fn states(&self) -> impl Iterator<Item = u32> {
        0..self.n as u32
    }

    /// Σ as a predicate.
    pub fn sigma(&self) -> Pred {
        self.states().map(El::St).collect()
    }

    /// Σ ∪ {⊥} as a predicate.
    pub fn sigma_bot(&self) -> Pred {
        let mut p = self.sigma();
        p.insert(El::Bot);
        p
    }

    /// The identity relation on Σ.
    pub fn id_rel(&self) -> Rel {
        self.states().map(|s| (El::St(s), El::St(s))).collect()
    }

    /// Σ × {⊥} as a relation.
    pub fn sigma_times_bot(&self) -> Rel {
        self.states().map(|s| (El::St(s), El::Bot)).collect()
    }

    /// Σ × Σ as a relation.
    pub fn full_rel(&self) -> Rel {
        let mut r = Rel::new();
        for a in self.states() {
            for b in self.states() {
                r.insert((El::St(a), El::St(b)));
            }
        }
        r
    }

    /// Σ × (Σ ∪ {⊥}).
    pub fn full_rel_bot(&self) -> Rel {
        let mut r = self.full_rel();
        for a in self.states() {
            r.insert((El::St(a), El::Bot));
        }
        r
    }

    /// Format a single element: `{x=0,n=-1}` or `BOT`.
    pub fn format_el(&self, e: El) -> String {
        match e {
            El::Bot => "BOT".to_string(),
            El::St(s) => {
                let vals = self.values(s);
                let inner: Vec<String> = self
                    .vars
                    .iter()
                    .zip(vals.iter())
                    .map(|(v, x)| format!("{v}={x}"))
                    .collect();
                format!("{{{}}}", inner.join(","))
            }
        }
    }

    /// Format a predicate, one element per line, deterministic order.
    pub fn format_pred(&self, p: &Pred) -> String {
        p.iter().map(|e| self.format_el(*e)).collect::<Vec<_>>().join("\n")
    }

    /// Format a relation, one `sigma -> sigma'` pair per line.
    pub fn format_rel(&self, r: &Rel) -> String {
        r.iter()
            .map(|(a, b)| format!("{} -> {}", self.format_el(*a), self.format_el(*b)))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Parse an element literal produced by [`Space::format_el`].
    pub fn parse_el(&self, text: &str) -> Result<El, SpaceError> {
        let t = text.trim();
        if t == "BOT" {
            return Ok(El::Bot);
        }
        let inner = t
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| SpaceError::BadLiteral(text.to_string()))?;
        let mut vals = vec![None; self.vars.len()];
        if !inner.trim().is_empty() {
            for part in inner.split(',') {
                let (name, val) = part
                    .split_once('=')
                    .ok_or_else(|| SpaceError::BadLiteral(text.to_string()))?;
                let ix = self
                    .var_index(name.trim())
                    .ok_or_else(|| SpaceError::BadLiteral(text.to_string()))?;
                let v: i64 = val
                    .trim()
                    .parse()
                    .map_err(|_| SpaceError::BadLiteral(text.to_string()))?;
                if !self.dom.contains(v) {
                    return Err(SpaceError::BadLiteral(text.to_string()));
                }
                vals[ix] = Some(v);
            }
        }
        let vals: Option<Vec<i64>> = vals.into_iter().collect();
        let vals = vals.ok_or_else(|| SpaceError::BadLiteral(text.to_string()))?;
        Ok(El::St(self.index(&vals)))
    }
}

/// Left composition of relations, absorbing ⊥ on the left:
/// r₁⨟r₂ = {(x,⊥) | (x,⊥) ∈ r₁} ∪ {(x,z) | ∃y ∈ Σ. (x,y) ∈ r₁ ∧ (y,z) ∈ r₂}.
pub fn compose(r1: &Rel, r2: &Rel) -> Rel {
    let mut out = Rel::new();
    for &(x, y) in r1 {
        match y {
            El::Bot => {
                out.insert((x, El::Bot));
            }
            El::St(_) => {
                for &(a, z) in r2.range((y, El::St(0))..=(y, El::Bot)) {
                    debug_assert_eq!(a, y);
                    out.insert((x, z));
                }
            }
        }
    }
    out
}

/// Relation inverse (pairs swapped).
pub fn inverse(r: &Rel) -> Rel {
    r.iter().map(|&(a, b)| (b, a)).collect()
}

pub fn union(a: &Rel, b: &Rel) -> Rel {
    a.union(b).copied().collect()
}

pub fn inter(a: &Rel, b: &Rel) -> Rel {
    a.intersection(b).copied().collect()
}

pub fn diff(a: &Rel, b: &Rel) -> Rel {
    a.difference(b).copied().collect()
}

/// Reflexive-transitive closure of a relation restricted to Σ × Σ, with
/// identity taken over `space`.
pub fn star(space: &Space, r: &Rel) -> Rel {
    let mut acc = space.id_rel();
    loop {
        let next = union(&acc, &compose(&acc, r));
        if next == acc {
            return acc;
        }
        acc = next;
    }
}

/// Result of a fixpoint computation: the fixpoint and the full iterate trace
/// (trace\[0\] is the starting point, the last entry is the fixpoint).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixResult<T: Ord + Clone> {
    pub fix: BTreeSet<T>,
    pub trace: Vec<BTreeSet<T>>,
}

/// Least fixpoint by increasing iteration from ∅.
///
/// Errors if the iterates fail to form an increasing chain (which a monotone
/// function started at ⊥ guarantees) or fail to stabilize within |U| + 1
/// steps.
pub fn lfp<T, F>(f: F, universe: &BTreeSet<T>) -> Result<FixResult<T>, SpaceError>
where
    T: Ord + Clone,
    F: Fn(&BTreeSet<T>) -> BTreeSet<T>,
{
    let mut x = BTreeSet::new();
    let mut trace = vec![x.clone()];
    for step in 0..=universe.len() + 1 {
        let next = f(&x);
        if !x.is_subset(&next) {
            return Err(SpaceError::IterationNotChain { step });
        }
        if next == x {
            return Ok(FixResult { fix: x, trace });
        }
        trace.push(next.clone());
        x = next;
    }
    Err(SpaceError::NoStabilization(universe.len() + 2))
}

/// Greatest fixpoint by decreasing iteration from the universe.
pub fn gfp<T, F>(f: F, universe: &BTreeSet<T>) -> Result<FixResult<T>, SpaceError>
where
    T: Ord + Clone,
    F: Fn(&BTreeSet<T>) -> BTreeSet<T>,
{
    let mut x = universe.clone();
    let mut trace = vec![x.clone()];
    for step in 0..=universe.len() + 1 {
        let next = f(&x);
        if !next.is_subset(&x) {
            return Err(SpaceError::IterationNotChain { step });
        }
        if next == x {
            return Ok(FixResult { fix: x, trace });
        }
        trace.push(next.clone());
        x = next;
    }
    Err(SpaceError::NoStabilization(universe.len() + 2))
}

/// A monotone function on subsets of a finite universe, with a monotonicity
/// self-check (exhaustive below 2¹⁰ subsets, sampled above).
#[derive(Clone)]
pub struct SetFn<T: Ord + Clone> {
    universe: BTreeSet<T>,
    f: Rc<dyn Fn(&BTreeSet<T>) -> BTreeSet<T>>,
}

impl<T: Ord + Clone + std::fmt::Debug> SetFn<T> {
    pub fn new(universe: BTreeSet<T>, f: impl Fn(&BTreeSet<T>) -> BTreeSet<T> + 'static) -> Self {
        SetFn { universe, f: Rc::new(f) }
    }

    pub fn universe(&self) -> &BTreeSet<T> {
        &self.universe
    }

    pub fn apply(&self, x: &BTreeSet<T>) -> BTreeSet<T> {
        (self.f)(x)
    }

    /// Check X ⊆ Y ⇒ f(X) ⊆ f(Y).
    ///
    /// Exhaustive when 2^|U| ≤ 2¹⁰, using the equivalent adjacent-pair form
    /// (f(X) ⊆ f(X ∪ {x}) for every X and x ∉ X); otherwise 10³ random
    /// ordered pairs X ⊆ Y drawn from the seeded generator.
    pub fn check_monotone(&self, seed: u64) -> Result<(), SpaceError> {
        let elems: Vec<&T> = self.universe.iter().collect();
        let n = elems.len();
        if n <= 10 {
            for mask in 0u32..(1 << n) {
                let x: BTreeSet<T> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| elems[i].clone())
                    .collect();
                let fx = self.apply(&x);
                for (i, e) in elems.iter().enumerate() {
                    if mask >> i & 1 == 0 {
                        let mut y = x.clone();
                        y.insert((*e).clone());
                        if !fx.is_subset(&self.apply(&y)) {
                            return Err(SpaceError::NotMonotone {
                                x: format!("{x:?}"),
                                y: format!("{y:?}"),
                            });
                        }
                    }
                }
            }
            Ok(())
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..1000 {
                let x: BTreeSet<T> = elems
                    .iter()
                    .filter(|_| rng.gen_bool(0.5))
                    .map(|e| (**e).clone())
                    .collect();
                let extra = rng.gen_range(0..=n);
                let mut y = x.clone();
                let mut pool: Vec<&T> = elems.iter().copied().filter(|e| !x.contains(e)).collect();
                pool.shuffle(&mut rng);
                for e in pool.into_iter().take(extra) {
                    y.insert(e.clone());
                }
                if !self.apply(&x).is_subset(&self.apply(&y)) {
                    return Err(SpaceError::NotMonotone {
                        x: format!("{x:?}"),
                        y: format!("{y:?}"),
                    });
                }
            }
            Ok(())
        }
    }

    /// lfp of this function over its universe.
    pub fn lfp(&self) -> Result<FixResult<T>, SpaceError> {
        lfp(|x| self.apply(x), &self.universe)
    }

    /// gfp of this function over its universe.
    pub fn gfp(&self) -> Result<FixResult<T>, SpaceError> {
        gfp(|x| self.apply(x), &self.universe)
    }
}

/// Complement of a set relative to a universe.
pub fn complement<T: Ord + Clone>(s: &BTreeSet<T>, universe: &BTreeSet<T>) -> BTreeSet<T> {
    universe.difference(s).cloned().collect()
}

/// Deterministically draw a random subset of `universe`.
pub fn random_subset<T: Ord + Clone>(universe: &BTreeSet<T>, rng: &mut impl Rng) -> BTreeSet<T> {
    universe.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

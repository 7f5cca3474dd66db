//! Certificate checkers for the fixpoint-induction principles, over finite
//! powerset lattices.
//!
//! Each checker verifies the side conditions of one induction theorem exactly
//! on the finite lattice and reports failed conditions by name. Soundness
//! (acceptance implies the conclusion, computed directly from the fixpoint)
//! is exercised by the test suite, not assumed.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lang::{eval_pred_assertional, parse_predicate};
use crate::space::{complement, El, Pred, Rel, SetFn, Space};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum InductionError {
    #[error("certificate parse error: {0}")]
    Parse(String),
}

/// Outcome of a certificate check: failed side conditions are reported by
/// name; notices record benign normalizations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    pub failures: Vec<String>,
    pub notices: Vec<String>,
}

impl Verdict {
    pub(crate) fn new() -> Self {
        Verdict { accepted: true, failures: Vec::new(), notices: Vec::new() }
    }

    pub(crate) fn fail(&mut self, msg: impl Into<String>) {
        self.accepted = false;
        self.failures.push(msg.into());
    }

    pub(crate) fn notice(&mut self, msg: impl Into<String>) {
        self.notices.push(msg.into());
    }
}

/// Park induction certificate: an inductive invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParkCert<T: Ord + Clone> {
    pub invariant: BTreeSet<T>,
}

/// Under-approximation certificate: a finite sequence X⁰..Xˡ of sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqCert<T: Ord + Clone> {
    pub seq: Vec<BTreeSet<T>>,
}

/// Invariant plus a variant function given as ranks on lattice atoms (set
/// elements); ranks lift to sets by maximum, with max ∅ = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantCert<T: Ord + Clone> {
    pub invariant: BTreeSet<T>,
    pub ranks: BTreeMap<T, u64>,
}

/// Under-approximation sequence with one rank per iterate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnderVariantCert<T: Ord + Clone> {
    pub seq: Vec<BTreeSet<T>>,
    pub ranks: Vec<u64>,
}

/// Lift element ranks to sets by maximum. The empty set ranks strictly above
/// every other set (the induction hypotheses never need ⊥ to make progress,
/// since ⊥ ⊓ Q = ⊥ holds trivially).
fn lift_rank<T: Ord + Clone>(ranks: &BTreeMap<T, u64>, x: &BTreeSet<T>) -> Option<u64> {
    if x.is_empty() {
        return Some(ranks.values().max().copied().unwrap_or(0) + 1);
    }
    let mut m = 0;
    for e in x {
        m = m.max(*ranks.get(e)?);
    }
    Some(m)
}

const EXHAUSTIVE_SUBSET_LIMIT: usize = 12;
const SAMPLE_BUDGET: usize = 10_000;

/// Visit every subset of `base` when 2^|base| ≤ 2¹², otherwise 10⁴ seeded
/// random subsets. Stops early when the visitor returns false.
fn for_subsets<T: Ord + Clone>(
    base: &BTreeSet<T>,
    seed: u64,
    mut visit: impl FnMut(&BTreeSet<T>) -> bool,
) {
    let elems: Vec<T> = base.iter().cloned().collect();
    if elems.len() <= EXHAUSTIVE_SUBSET_LIMIT {
        for mask in 0u64..(1 << elems.len()) {
            let x: BTreeSet<T> = elems
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, e)| e.clone())
                .collect();
            if !visit(&x) {
                return;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SAMPLE_BUDGET {
            let x: BTreeSet<T> =
                elems.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            if !visit(&x) {
                return;
            }
        }
    }
}

/// f preserves non-empty joins iff f(X) = ⋃_{x∈X} f({x}) for all X ≠ ∅.
pub fn preserves_joins<T: Ord + Clone + std::fmt::Debug>(f: &SetFn<T>) -> bool {
    let singles: BTreeMap<T, BTreeSet<T>> = f
        .universe()
        .iter()
        .map(|e| (e.clone(), f.apply(&[e.clone()].into_iter().collect())))
        .collect();
    let mut ok = true;
    for_subsets(f.universe(), 0xA11, |x| {
        if x.is_empty() {
            return true;
        }
        let mut u = BTreeSet::new();
        for e in x {
            u.extend(singles[e].iter().cloned());
        }
        ok = f.apply(x) == u;
        ok
    });
    ok
}

/// f preserves non-empty meets iff f(X) = ⋂_{x∉X} f(U∖{x}) for all X ≠ U.
pub fn preserves_meets<T: Ord + Clone + std::fmt::Debug>(f: &SetFn<T>) -> bool {
    let co: BTreeMap<T, BTreeSet<T>> = f
        .universe()
        .iter()
        .map(|e| {
            let mut s = f.universe().clone();
            s.remove(e);
            (e.clone(), f.apply(&s))
        })
        .collect();
    let mut ok = true;
    for_subsets(f.universe(), 0xB22, |x| {
        if x == f.universe() {
            return true;
        }
        let mut m: Option<BTreeSet<T>> = None;
        for e in f.universe().iter().filter(|e| !x.contains(e)) {
            m = Some(match m {
                None => co[e].clone(),
                Some(acc) => acc.intersection(&co[e]).cloned().collect(),
            });
        }
        ok = f.apply(x) == m.unwrap();
        ok
    });
    ok
}

/// Park induction: f(I) ⊆ I ∧ I ⊆ p concludes lfp(f) ⊆ p.
pub fn check_park<T: Ord + Clone + std::fmt::Debug>(
    f: &SetFn<T>,
    p: &BTreeSet<T>,
    cert: &ParkCert<T>,
) -> Verdict {
    let mut v = Verdict::new();
    if f.check_monotone(0).is_err() {
        v.fail("f is not monotone");
        return v;
    }
    let i = &cert.invariant;
    if !f.apply(i).is_subset(i) {
        v.fail("f(I) ⊄ I");
    }
    if !i.is_subset(p) {
        v.fail("I ⊄ p");
    }
    v
}

/// Fixpoint under-approximation by iterates: X⁰ = ∅, X^{k+1} ⊆ f(X^k),
/// increasing, p ⊆ Xˡ concludes p ⊆ lfp(f). A non-increasing but otherwise
/// valid sequence is normalized to the exact iterates (with a notice), per
/// the complete-lattice normalization lemma.
pub fn check_under_seq<T: Ord + Clone + std::fmt::Debug>(
    f: &SetFn<T>,
    p: &BTreeSet<T>,
    cert: &SeqCert<T>,
) -> Verdict {
    let mut v = Verdict::new();
    if f.check_monotone(0).is_err() {
        v.fail("f is not monotone");
        return v;
    }
    let seq = &cert.seq;
    if seq.is_empty() {
        v.fail("sequence is empty");
        return v;
    }
    if !seq[0].is_empty() {
        v.fail("X⁰ ≠ ∅");
    }
    for k in 0..seq.len() - 1 {
        if !seq[k + 1].is_subset(&f.apply(&seq[k])) {
            v.fail(format!("X^{} ⊄ f(X^{})", k + 1, k));
        }
    }
    let increasing = seq.windows(2).all(|w| w[0].is_subset(&w[1]));
    if !increasing && v.failures.is_empty() {
        // normalize: the exact iterates Y^k = f^k(∅) dominate X^k pointwise
        v.notice("sequence is not increasing; normalized to the exact iterates");
        let mut y = BTreeSet::new();
        for _ in 0..seq.len() - 1 {
            y = f.apply(&y);
        }
        if !p.is_subset(&y) {
            v.fail("p ⊄ Yˡ (normalized)");
        }
        return v;
    }
    if !increasing {
        v.fail("sequence is not increasing");
    }
    if !p.is_subset(&seq[seq.len() - 1]) {
        v.fail("p ⊄ Xˡ");
    }
    v
}

/// Under-approximation with a variant: the sequence conditions of
/// [`check_under_seq`] plus ranks on the iterates such that β < δ and
/// p ⊄ X^β imply rank(β) > rank(δ), and p ⊆ X^δ for some δ.
pub fn check_under_variant<T: Ord + Clone + std::fmt::Debug>(
    f: &SetFn<T>,
    p: &BTreeSet<T>,
    cert: &UnderVariantCert<T>,
) -> Verdict {
    let mut v = Verdict::new();
    if f.check_monotone(0).is_err() {
        v.fail("f is not monotone");
        return v;
    }
    let seq = &cert.seq;
    if seq.len() != cert.ranks.len() {
        v.fail("one rank per iterate required");
        return v;
    }
    if seq.is_empty() || !seq[0].is_empty() {
        v.fail("X⁰ ≠ ∅");
    }
    for k in 0..seq.len().saturating_sub(1) {
        if !seq[k + 1].is_subset(&f.apply(&seq[k])) {
            v.fail(format!("X^{} ⊄ f(X^{})", k + 1, k));
        }
    }
    for b in 0..seq.len() {
        for d in b + 1..seq.len() {
            if !p.is_subset(&seq[b]) && cert.ranks[b] <= cert.ranks[d] {
                v.fail(format!("rank(X^{b}) ⊁ rank(X^{d}) although p ⊄ X^{b}"));
            }
        }
    }
    if !seq.iter().any(|x| p.is_subset(x)) {
        v.fail("no iterate contains p");
    }
    v
}

/// Void intersection with the least fixpoint: f preserves non-empty joins,
/// f(I) ⊆ I, and for all x ⊆ I either the lifted rank strictly decreases
/// from x to f(x), or x = f(x), and whenever it does not decrease x ∩ Q = ∅.
/// Concludes lfp(f) ∩ Q = ∅.
pub fn check_void_lfp<T: Ord + Clone + std::fmt::Debug>(
    f: &SetFn<T>,
    q: &BTreeSet<T>,
    cert: &VariantCert<T>,
) -> Verdict {
    let mut v = Verdict::new();
    if !preserves_joins(f) {
        v.fail("f does not preserve non-empty joins");
        return v;
    }
    let i = &cert.invariant;
    if !f.apply(i).is_subset(i) {
        v.fail("f(I) ⊄ I");
        return v;
    }
    if i.iter().any(|e| !cert.ranks.contains_key(e)) {
        v.fail("variant is not total on I");
        return v;
    }
    let mut ok = true;
    for_subsets(i, 0xC33, |x| {
        let fx = f.apply(x);
        let (nx, nfx) = match (lift_rank(&cert.ranks, x), lift_rank(&cert.ranks, &fx)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                ok = false;
                return false;
            }
        };
        let decreases = nx > nfx;
        if *x != fx && !decreases {
            ok = false;
            return false;
        }
        if !decreases && x.intersection(q).next().is_some() {
            ok = false;
            return false;
        }
        true
    });
    if !ok {
        v.fail("variant/void condition fails for some x ⊆ I");
    }
    v
}

/// Void intersection with the greatest fixpoint: the meet-preserving dual of
/// [`check_void_lfp`] with I ⊆ f(I), quantified over x ⊇ I. Ranks must be
/// total on the universe. Concludes gfp(f) ∩ Q = ∅.
pub fn check_void_gfp<T: Ord + Clone + std::fmt::Debug>(
    f: &SetFn<T>,
    q: &BTreeSet<T>,
    cert: &VariantCert<T>,
) -> Verdict {
    let mut v = Verdict::new();
    if !preserves_meets(f) {
        v.fail("f does not preserve non-empty meets");
        return v;
    }
    let i = &cert.invariant;
    if !i.is_subset(&f.apply(i)) {
        v.fail("I ⊄ f(I)");
        return v;
    }
    if f.universe().iter().any(|e| !cert.ranks.contains_key(e)) {
        v.fail("variant is not total on the universe");
        return v;
    }
    let rest: BTreeSet<T> = f.universe().difference(i).cloned().collect();
    let mut ok = true;
    for_subsets(&rest, 0xD44, |extra| {
        let x: BTreeSet<T> = i.union(extra).cloned().collect();
        let fx = f.apply(&x);
        let nx = lift_rank(&cert.ranks, &x).unwrap();
        let nfx = lift_rank(&cert.ranks, &fx).unwrap_or(nx + 1);
        let decreases = nx > nfx;
        if x != fx && !decreases {
            ok = false;
            return false;
        }
        if !decreases && x.intersection(q).next().is_some() {
            ok = false;
            return false;
        }
        true
    });
    if !ok {
        v.fail("variant/void condition fails for some x ⊇ I");
    }
    v
}

/// Greatest-fixpoint non-emptiness: a decreasing witness chain
/// U = X⁰ ⊇ … ⊇ Xˡ with f(X^k) ⊆ X^{k+1} and Xˡ = f(Xˡ), Xˡ ∩ p ≠ ∅.
/// A fixpoint reached by a decreasing iteration dominated from above by the
/// exact iterates is the greatest fixpoint, so gfp(f) ∩ p ≠ ∅.
pub fn check_gfp_nonempty<T: Ord + Clone + std::fmt::Debug>(
    f: &SetFn<T>,
    p: &BTreeSet<T>,
    chain: &[BTreeSet<T>],
) -> Verdict {
    let mut v = Verdict::new();
    if f.check_monotone(0).is_err() {
        v.fail("f is not monotone");
        return v;
    }
    if chain.is_empty() {
        v.fail("chain is empty");
        return v;
    }
    if &chain[0] != f.universe() {
        v.fail("X⁰ ≠ universe");
    }
    for k in 0..chain.len() - 1 {
        if !chain[k + 1].is_subset(&chain[k]) {
            v.fail(format!("X^{} ⊄ X^{}", k + 1, k));
        }
        if !f.apply(&chain[k]).is_subset(&chain[k + 1]) {
            v.fail(format!("f(X^{}) ⊄ X^{}", k, k + 1));
        }
    }
    let last = &chain[chain.len() - 1];
    if f.apply(last) != *last {
        v.fail("Xˡ is not a fixpoint");
    }
    if last.intersection(p).next().is_none() {
        v.fail("Xˡ ∩ p = ∅");
    }
    v
}

/// Over-approximation of a least fixpoint image: α(∅) ⊆ I, the inductive
/// step α(X) ⊆ I ⇒ α(F(X)) ⊆ I (verified on every subset up to the cap, and
/// always on the exact iterates, which the soundness proof needs), and I ⊆ p
/// conclude α(lfp F) ⊆ p.
pub fn check_image_over<T, U>(
    f: &SetFn<T>,
    alpha: impl Fn(&BTreeSet<T>) -> BTreeSet<U>,
    p: &BTreeSet<U>,
    i: &BTreeSet<U>,
) -> Verdict
where
    T: Ord + Clone + std::fmt::Debug,
    U: Ord + Clone + std::fmt::Debug,
{
    let mut v = Verdict::new();
    if f.check_monotone(0).is_err() {
        v.fail("F is not monotone");
        return v;
    }
    if !alpha(&BTreeSet::new()).is_subset(i) {
        v.fail("α(∅) ⊄ I");
    }
    // inductive step on the exact iterates (what soundness consumes)
    let mut x = BTreeSet::new();
    loop {
        if alpha(&x).is_subset(i) && !alpha(&f.apply(&x)).is_subset(i) {
            v.fail("α(X) ⊆ I but α(F(X)) ⊄ I on an iterate");
            break;
        }
        let nx = f.apply(&x);
        if nx == x {
            break;
        }
        x = nx;
    }
    // inductive step on general subsets, exhaustively below the cap
    let mut ok = true;
    for_subsets(f.universe(), 0xE55, |s| {
        if alpha(s).is_subset(i) && !alpha(&f.apply(s)).is_subset(i) {
            ok = false;
            return false;
        }
        true
    });
    if !ok {
        v.fail("α(X) ⊆ I but α(F(X)) ⊄ I for some X");
    }
    if !i.is_subset(p) {
        v.fail("I ⊄ p");
    }
    v
}

/// Turing/Floyd: p ∪ post(r)I ⊆ I, ν total on I, and ν strictly decreasing
/// across every r-step from I conclude that no infinite r-chain starts in p.
pub fn check_turing_floyd(r: &Rel, p: &Pred, cert: &VariantCert<El>) -> Verdict {
    let mut v = Verdict::new();
    let i = &cert.invariant;
    if !p.is_subset(i) {
        v.fail("p ⊄ I");
    }
    if !crate::transformers::post(r, i).is_subset(i) {
        v.fail("post(r)I ⊄ I");
    }
    if i.iter().any(|e| !cert.ranks.contains_key(e)) {
        v.fail("variant is not total on I");
        return v;
    }
    for &(y, y2) in r {
        if i.contains(&y) {
            let ny = cert.ranks[&y];
            // successors of I stay in I when the previous conditions hold
            let ny2 = cert.ranks.get(&y2).copied().unwrap_or(0);
            if ny <= ny2 {
                v.fail(format!("ν does not decrease across ({y:?},{y2:?})"));
            }
        }
    }
    v
}

/// Direct oracle for the Turing/Floyd conclusion: true iff no infinite
/// r-chain starts in p — on a finite carrier, iff no cycle (or self-loop) is
/// reachable from p via r.
pub fn no_infinite_chain(r: &Rel, p: &Pred) -> bool {
    let mut succ: BTreeMap<El, Vec<El>> = BTreeMap::new();
    for &(a, b) in r {
        succ.entry(a).or_default().push(b);
    }
    // iterative 3-color DFS from each start
    let mut color: BTreeMap<El, u8> = BTreeMap::new(); // 1 = on stack, 2 = done
    for &start in p {
        if color.get(&start) == Some(&2) {
            continue;
        }
        let mut stack: Vec<(El, usize)> = vec![(start, 0)];
        color.insert(start, 1);
        while let Some(&mut (node, ref mut ix)) = stack.last_mut() {
            let next = succ.get(&node).and_then(|s| s.get(*ix).copied());
            *ix += 1;
            match next {
                Some(ch) => match color.get(&ch) {
                    Some(1) => return false, // back edge: cycle
                    Some(2) => {}
                    _ => {
                        color.insert(ch, 1);
                        stack.push((ch, 0));
                    }
                },
                None => {
                    color.insert(node, 2);
                    stack.pop();
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Canonical certificates (completeness witnesses)
// ---------------------------------------------------------------------------

/// Canonical Park certificate: I = lfp(f).
pub fn canonical_park<T: Ord + Clone + std::fmt::Debug>(
    f: &SetFn<T>,
) -> Result<ParkCert<T>, crate::space::SpaceError> {
    Ok(ParkCert { invariant: f.lfp()?.fix })
}

/// Canonical under-approximation sequence: the exact iterate trace.
pub fn canonical_under_seq<T: Ord + Clone + std::fmt::Debug>(
    f: &SetFn<T>,
) -> Result<SeqCert<T>, crate::space::SpaceError> {
    Ok(SeqCert { seq: f.lfp()?.trace })
}

/// Canonical under-approximation variant: the exact iterates ranked by
/// distance to the end of the trace.
pub fn canonical_under_variant<T: Ord + Clone + std::fmt::Debug>(
    f: &SetFn<T>,
) -> Result<UnderVariantCert<T>, crate::space::SpaceError> {
    let trace = f.lfp()?.trace;
    let n = trace.len();
    Ok(UnderVariantCert { seq: trace, ranks: (0..n as u64).rev().collect() })
}

/// Canonical decreasing witness chain for [`check_gfp_nonempty`]: the exact
/// decreasing iterates from the universe.
pub fn canonical_gfp_chain<T: Ord + Clone + std::fmt::Debug>(
    f: &SetFn<T>,
) -> Result<Vec<BTreeSet<T>>, crate::space::SpaceError> {
    Ok(f.gfp()?.trace)
}

/// Canonical Turing/Floyd certificate per the completeness proof:
/// I = post(r*)p and ν(x) = length of the longest r-path from x within I
/// (well defined exactly when no infinite chain starts in p).
pub fn canonical_turing_floyd(sp: &Space, r: &Rel, p: &Pred) -> Option<VariantCert<El>> {
    let star = crate::space::star(sp, r);
    let mut i = p.clone();
    i.extend(crate::transformers::post(&star, p));
    if !no_infinite_chain(r, p) {
        return None;
    }
    // longest-path rank by memoized DFS (acyclic within the reachable part)
    let mut succ: BTreeMap<El, Vec<El>> = BTreeMap::new();
    for &(a, b) in r {
        if i.contains(&a) {
            succ.entry(a).or_default().push(b);
        }
    }
    let mut memo: BTreeMap<El, u64> = BTreeMap::new();
    fn height(e: El, succ: &BTreeMap<El, Vec<El>>, memo: &mut BTreeMap<El, u64>) -> u64 {
        if let Some(&h) = memo.get(&e) {
            return h;
        }
        let h = succ
            .get(&e)
            .map(|ss| ss.iter().map(|&s| 1 + height(s, succ, memo)).max().unwrap_or(0))
            .unwrap_or(0);
        memo.insert(e, h);
        h
    }
    let ranks: BTreeMap<El, u64> =
        i.iter().map(|&e| (e, height(e, &succ, &mut memo))).collect();
    Some(VariantCert { invariant: i, ranks })
}

/// A random monotone set function: a union of premise ⇒ conclusion rules,
/// f(X) = ⋃ { Tᵢ | Sᵢ ⊆ X }. Every monotone function on a finite powerset
/// has this shape.
pub fn random_monotone<T: Ord + Clone + std::fmt::Debug + 'static>(
    universe: &BTreeSet<T>,
    n_rules: usize,
    rng: &mut impl Rng,
) -> SetFn<T> {
    let mut rules: Vec<(BTreeSet<T>, BTreeSet<T>)> = Vec::new();
    for _ in 0..n_rules {
        let s = crate::space::random_subset(universe, rng);
        let t = crate::space::random_subset(universe, rng);
        rules.push((s, t));
    }
    SetFn::new(universe.clone(), move |x| {
        let mut out = BTreeSet::new();
        for (s, t) in &rules {
            if s.is_subset(x) {
                out.extend(t.iter().cloned());
            }
        }
        out
    })
}

// ---------------------------------------------------------------------------
// Certificate files
// ---------------------------------------------------------------------------

/// One parsed certificate section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SectionData {
    Set(Pred),
    Seq(Vec<Pred>),
    Ranks(BTreeMap<El, u64>),
}

/// A certificate file: named sections (INVARIANT, VARIANT, SEQUENCE, J, RB,
/// RBOT) whose bodies are predicate text in the language's predicate grammar
/// or explicit state lists like `{n=0} {n=1} BOT`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertFile {
    pub sections: BTreeMap<String, SectionData>,
}

const SECTION_NAMES: &[&str] = &["INVARIANT", "VARIANT", "SEQUENCE", "J", "RB", "RBOT"];

fn parse_set_line(line: &str, sp: &Space, vars: &[String]) -> Result<Pred, InductionError> {
    let line = line.trim();
    if line == "empty" {
        return Ok(Pred::new());
    }
    if line.starts_with('{') || line == "BOT" || line.starts_with("BOT") {
        line.split_whitespace()
            .map(|tok| sp.parse_el(tok).map_err(|e| InductionError::Parse(e.to_string())))
            .collect()
    } else {
        let p = parse_predicate(line, false, vars)
            .map_err(|e| InductionError::Parse(e.to_string()))?;
        Ok(eval_pred_assertional(&p, sp))
    }
}

/// Parse a certificate file against a state space.
pub fn parse_cert(text: &str, sp: &Space) -> Result<CertFile, InductionError> {
    let vars: Vec<String> = sp.vars().to_vec();
    let mut sections: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if SECTION_NAMES.contains(&line) {
            current = Some(line.to_string());
            sections.entry(line.to_string()).or_default();
            continue;
        }
        match &current {
            Some(name) => sections.get_mut(name).unwrap().push(line.to_string()),
            None => {
                return Err(InductionError::Parse(format!(
                    "content before any section header: {line}"
                )))
            }
        }
    }
    let mut out = BTreeMap::new();
    for (name, lines) in sections {
        let data = match name.as_str() {
            "VARIANT" => {
                let mut ranks = BTreeMap::new();
                for line in &lines {
                    let (el, rank) = line.rsplit_once(':').ok_or_else(|| {
                        InductionError::Parse(format!("expected `state: rank`, got {line}"))
                    })?;
                    let e = sp
                        .parse_el(el.trim())
                        .map_err(|e| InductionError::Parse(e.to_string()))?;
                    let r: u64 = rank.trim().parse().map_err(|_| {
                        InductionError::Parse(format!("bad rank in {line}"))
                    })?;
                    ranks.insert(e, r);
                }
                SectionData::Ranks(ranks)
            }
            "SEQUENCE" => {
                let mut seq = Vec::new();
                for line in &lines {
                    seq.push(parse_set_line(line, sp, &vars)?);
                }
                SectionData::Seq(seq)
            }
            _ => {
                if lines.is_empty() {
                    SectionData::Set(Pred::new())
                } else if lines.len() == 1 {
                    SectionData::Set(parse_set_line(&lines[0], sp, &vars)?)
                } else {
                    let mut set = Pred::new();
                    for line in &lines {
                        set.extend(parse_set_line(line, sp, &vars)?);
                    }
                    SectionData::Set(set)
                }
            }
        };
        out.insert(name, data);
    }
    Ok(CertFile { sections: out })
}

/// Park duality: lfp(¬ ∘ f ∘ ¬) = ¬ gfp(f), for monotone f.
pub fn complement_dual_fn<T: Ord + Clone + std::fmt::Debug + 'static>(
    f: SetFn<T>,
) -> SetFn<T> {
    let u = f.universe().clone();
    SetFn::new(u.clone(), move |x| {
        let nx = complement(x, &u);
        complement(&f.apply(&nx), &u)
    })
}

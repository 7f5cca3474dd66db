//! Finite deductive systems, their consequence operators, and the
//! inductive / co-inductive / bi-inductive interpretations, with
//! proof-sequence checking and the rules ⇄ operator round trip.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::lang::{BExpr, Stmt};
use crate::relsem::{bsem, bstates, sem, RelsemError};
use crate::space::{compose, El, SetFn, Space, SpaceError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DeductError {
    #[error("rule file parse error: {0}")]
    Parse(String),
    #[error("term outside the universe: {0}")]
    OutsideUniverse(String),
    #[error("bi-inductive iteration does not stabilize")]
    NotStabilizing,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Relsem(#[from] RelsemError),
}

/// One rule: a finite premise set and a conclusion, both drawn from the
/// system's universe.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rule {
    pub premise: BTreeSet<String>,
    pub conclusion: String,
}

/// A finite deductive system over a finite universe of terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSystem {
    universe: BTreeSet<String>,
    rules: Vec<Rule>,
}

impl RuleSystem {
    pub fn new(universe: BTreeSet<String>, rules: Vec<Rule>) -> Result<Self, DeductError> {
        for r in &rules {
            for t in r.premise.iter().chain(std::iter::once(&r.conclusion)) {
                if !universe.contains(t) {
                    return Err(DeductError::OutsideUniverse(t.clone()));
                }
            }
        }
        Ok(RuleSystem { universe, rules })
    }

    pub fn universe(&self) -> &BTreeSet<String> {
        &self.universe
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// The consequence operator F(X) = {c | ∃(P/c)∈R. P ⊆ X}, monotone by
    /// construction.
    pub fn consequence_op(&self) -> SetFn<String> {
        let rules = self.rules.clone();
        SetFn::new(self.universe.clone(), move |x| {
            rules
                .iter()
                .filter(|r| r.premise.is_subset(x))
                .map(|r| r.conclusion.clone())
                .collect()
        })
    }
}

/// Interpretation mode: least fixpoint, greatest fixpoint, or the
/// bi-inductive mix (inductive on V, co-inductive on its complement).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Interp {
    Inductive,
    Coinductive,
    Bi(BTreeSet<String>),
}

/// Interpret the system: lfp / gfp of the consequence operator, or for
/// `Bi(V)` the stationary point of iteration from X⁰ = U ∖ V, the bottom of
/// the mixed order (⊆ on V, ⊇ off V). The mixed iteration can cycle when
/// the operator is not monotone in the mixed order; that is reported as
/// [`DeductError::NotStabilizing`].
pub fn interp(r: &RuleSystem, mode: &Interp) -> Result<BTreeSet<String>, DeductError> {
    let f = r.consequence_op();
    match mode {
        Interp::Inductive => Ok(f.lfp()?.fix),
        Interp::Coinductive => Ok(f.gfp()?.fix),
        Interp::Bi(v) => {
            for t in v {
                if !r.universe.contains(t) {
                    return Err(DeductError::OutsideUniverse(t.clone()));
                }
            }
            let mut x: BTreeSet<String> = r.universe.difference(v).cloned().collect();
            let mut seen = BTreeSet::new();
            loop {
                let nx = f.apply(&x);
                if nx == x {
                    return Ok(x);
                }
                if !seen.insert(x.clone()) {
                    return Err(DeductError::NotStabilizing);
                }
                x = nx;
            }
        }
    }
}

/// Proof-sequence verdict; rejection pinpoints the first invalid step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofVerdict {
    pub accepted: bool,
    pub first_bad_step: Option<(usize, String)>,
}

/// Check a finite proof sequence t₁…tₙ: each tₖ must be the conclusion of a
/// rule whose premise lies in {t₁..tₖ₋₁}.
pub fn check_proof(r: &RuleSystem, seq: &[String]) -> ProofVerdict {
    let mut proved: BTreeSet<String> = BTreeSet::new();
    for (k, t) in seq.iter().enumerate() {
        let ok = r
            .rules
            .iter()
            .any(|rule| rule.conclusion == *t && rule.premise.is_subset(&proved));
        if !ok {
            return ProofVerdict {
                accepted: false,
                first_bad_step: Some((k + 1, t.clone())),
            };
        }
        proved.insert(t.clone());
    }
    ProofVerdict { accepted: true, first_bad_step: None }
}

/// All terms provable by some proof sequence — equal to the inductive
/// interpretation (proof-theoretic = model-theoretic).
pub fn provable_terms(r: &RuleSystem) -> Result<BTreeSet<String>, DeductError> {
    // saturation: exactly the lfp iteration, but via check_proof's closure
    let mut proved = BTreeSet::new();
    loop {
        let mut grew = false;
        for rule in &r.rules {
            if rule.premise.is_subset(&proved) && proved.insert(rule.conclusion.clone()) {
                grew = true;
            }
        }
        if !grew {
            return Ok(proved);
        }
    }
}

/// Recover a deductive system from a monotone operator: {P/c | c ∈ F(P)}
/// restricted to ⊆-minimal premises per conclusion. The lfp round trip is
/// the contract, not premise canonicity. Universe size is capped at 16.
pub fn rules_from_operator(f: &SetFn<String>) -> Result<RuleSystem, DeductError> {
    let elems: Vec<String> = f.universe().iter().cloned().collect();
    if elems.len() > 16 {
        return Err(DeductError::Parse("universe too large for enumeration".into()));
    }
    let mut by_concl: BTreeMap<String, Vec<BTreeSet<String>>> = BTreeMap::new();
    for mask in 0u32..(1 << elems.len()) {
        let p: BTreeSet<String> = elems
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| e.clone())
            .collect();
        for c in f.apply(&p) {
            by_concl.entry(c).or_default().push(p.clone());
        }
    }
    let mut rules = Vec::new();
    for (c, premises) in by_concl {
        for p in &premises {
            if !premises.iter().any(|q| q.is_subset(p) && q != p) {
                rules.push(Rule { premise: p.clone(), conclusion: c.clone() });
            }
        }
    }
    RuleSystem::new(f.universe().clone(), rules)
}

/// Transport a system through an on-universe map α: premises and conclusions
/// map pointwise. The abstract defined set over-approximates α of the
/// original (equality when α is a bijection).
pub fn abstract_rules(
    r: &RuleSystem,
    alpha: &BTreeMap<String, String>,
) -> Result<RuleSystem, DeductError> {
    let map = |t: &String| -> Result<String, DeductError> {
        alpha.get(t).cloned().ok_or_else(|| DeductError::OutsideUniverse(t.clone()))
    };
    let universe: BTreeSet<String> =
        r.universe.iter().map(map).collect::<Result<_, _>>()?;
    let rules = r
        .rules
        .iter()
        .map(|rule| {
            Ok(Rule {
                premise: rule.premise.iter().map(map).collect::<Result<_, _>>()?,
                conclusion: map(&rule.conclusion)?,
            })
        })
        .collect::<Result<Vec<_>, DeductError>>()?;
    RuleSystem::new(universe, rules)
}

// ---------------------------------------------------------------------------
// Rule files
// ---------------------------------------------------------------------------

/// Parse a rule file: a `universe: a b c` header, then one rule per line in
/// the form `premise: a b c => d` (empty premise lists are axioms).
pub fn parse_rules(text: &str) -> Result<RuleSystem, DeductError> {
    let mut universe: Option<BTreeSet<String>> = None;
    let mut rules = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("universe:") {
            universe = Some(rest.split_whitespace().map(str::to_string).collect());
        } else if let Some(rest) = line.strip_prefix("premise:") {
            let (prem, concl) = rest
                .split_once("=>")
                .ok_or_else(|| DeductError::Parse(format!("missing `=>` in {line}")))?;
            let conclusion = concl.trim();
            if conclusion.split_whitespace().count() != 1 {
                return Err(DeductError::Parse(format!(
                    "expected one conclusion in {line}"
                )));
            }
            rules.push(Rule {
                premise: prem.split_whitespace().map(str::to_string).collect(),
                conclusion: conclusion.to_string(),
            });
        } else {
            return Err(DeductError::Parse(format!("unrecognized line: {line}")));
        }
    }
    let universe =
        universe.ok_or_else(|| DeductError::Parse("missing universe header".into()))?;
    RuleSystem::new(universe, rules)
}

/// Serialize a system in the rule-file format; `parse_rules` round-trips it.
pub fn format_rules(r: &RuleSystem) -> String {
    let mut out = String::from("universe:");
    for t in &r.universe {
        out.push(' ');
        out.push_str(t);
    }
    out.push('\n');
    for rule in &r.rules {
        out.push_str("premise:");
        for t in &rule.premise {
            out.push(' ');
            out.push_str(t);
        }
        out.push_str(" => ");
        out.push_str(&rule.conclusion);
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// The while-loop rules as a deductive system
// ---------------------------------------------------------------------------

/// The while-loop rule system over the finite judgement universe, plus the
/// inductive part V for the bi-inductive interpretation (the ∞-marked rule
/// is co-inductive, everything else inductive).
///
/// Judgements: `i:a->b` (b reachable from a by 0+ iterations), `e:a->b`
/// (loop exits from a into b), `inf:a` (the loop diverges from a). Body
/// facts — established by structural induction — are baked into rule
/// enumeration rather than added as judgements.
pub struct WhileSystem {
    pub system: RuleSystem,
    pub inductive_part: BTreeSet<String>,
}

pub fn while_rule_system(
    sp: &Space,
    cond: &BExpr,
    body: &[Stmt],
) -> Result<WhileSystem, DeductError> {
    let bt = sem(sp, body)?;
    let b = bstates(sp, cond);
    let guarded_e = compose(&bsem(sp, cond), &bt.e);
    let ji = |a: u32, c: u32| format!("i:{a}->{c}");
    let je = |a: u32, c: u32| format!("e:{a}->{c}");
    let jinf = |a: u32| format!("inf:{a}");

    let mut universe = BTreeSet::new();
    let mut inductive_part = BTreeSet::new();
    for a in sp.states() {
        universe.insert(jinf(a));
        for c in sp.states() {
            universe.insert(ji(a, c));
            universe.insert(je(a, c));
            inductive_part.insert(ji(a, c));
            inductive_part.insert(je(a, c));
        }
    }
    let mut rules = Vec::new();
    // σ ⊢ W ⇒ⁱ σ (axiom)
    for a in sp.states() {
        rules.push(Rule { premise: BTreeSet::new(), conclusion: ji(a, a) });
    }
    for &(a, s1) in &guarded_e {
        if let (Some(a), Some(s1)) = (a.state(), s1.state()) {
            for c in sp.states() {
                // ℬ⟦B⟧σ, σ⊢S⇒ᵉσ′, σ′⊢W⇒ⁱσ″ / σ⊢W⇒ⁱσ″
                rules.push(Rule {
                    premise: [ji(s1, c)].into_iter().collect(),
                    conclusion: ji(a, c),
                });
            }
            // ℬ⟦B⟧σ, σ⊢S⇒ᵉσ′, σ′⊢W⇒^∞ / σ⊢W⇒^∞ (co-inductive, ∞-marked)
            rules.push(Rule {
                premise: [jinf(s1)].into_iter().collect(),
                conclusion: jinf(a),
            });
        }
    }
    for a in sp.states() {
        for c in sp.states() {
            // σ⊢W⇒ⁱσ′, ℬ⟦¬B⟧σ′ / σ⊢W⇒ᵉσ′
            if !b.contains(&c) {
                rules.push(Rule {
                    premise: [ji(a, c)].into_iter().collect(),
                    conclusion: je(a, c),
                });
            } else {
                // σ⊢W⇒ⁱσ′, ℬ⟦B⟧σ′, σ′⊢S⇒ᵇσ″ / σ⊢W⇒ᵉσ″
                for &(s1, s2) in &bt.b {
                    if s1.state() == Some(c) {
                        if let Some(s2) = s2.state() {
                            rules.push(Rule {
                                premise: [ji(a, c)].into_iter().collect(),
                                conclusion: je(a, s2),
                            });
                        }
                    }
                }
                // σ⊢W⇒ⁱσ′, ℬ⟦B⟧σ′, σ′⊢S⇒^∞ / σ⊢W⇒^∞
                if bt.bot.iter().any(|&(s1, _)| s1.state() == Some(c)) {
                    rules.push(Rule {
                        premise: [ji(a, c)].into_iter().collect(),
                        conclusion: jinf(a),
                    });
                }
            }
        }
    }
    let system = RuleSystem::new(universe, rules)?;
    Ok(WhileSystem { system, inductive_part })
}

/// Extract the `e` pairs and `inf` states from a while-system interpretation.
pub fn while_components(terms: &BTreeSet<String>) -> (BTreeSet<(El, El)>, BTreeSet<El>) {
    let mut e = BTreeSet::new();
    let mut inf = BTreeSet::new();
    for t in terms {
        if let Some(rest) = t.strip_prefix("e:") {
            let (a, c) = rest.split_once("->").unwrap();
            e.insert((El::St(a.parse().unwrap()), El::St(c.parse().unwrap())));
        } else if let Some(a) = t.strip_prefix("inf:") {
            inf.insert(El::St(a.parse().unwrap()));
        }
    }
    (e, inf)
}

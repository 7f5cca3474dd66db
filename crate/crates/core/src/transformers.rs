//! The four classic assertional transformers (post, pre, p̃ost, p̃re), the
//! relational Post/Pre pair with their complement-duals, and Dijkstra's
//! wp/wlp/sp/slp — all as exact finite-set computations.
//!
//! Adjunctions: post(r) ⊣ p̃re(r) (post(r)P ⊆ Q ⇔ P ⊆ p̃re(r)Q) and
//! pre(r) ⊣ p̃ost(r) (pre(r)Q ⊆ P ⇔ Q ⊆ p̃ost(r)P); the universal
//! transformers quantify over an explicit carrier argument since states with
//! no r-edge satisfy the condition vacuously.

use crate::relsem::SemTriple;
use crate::space::{compose, union, El, Pred, Rel, RelPred, Space};

/// post(r)P = {y | ∃x ∈ P. (x,y) ∈ r}.
pub fn post(r: &Rel, p: &Pred) -> Pred {
    r.iter().filter(|(x, _)| p.contains(x)).map(|&(_, y)| y).collect()
}

/// pre(r)Q = {x | ∃y ∈ Q. (x,y) ∈ r}.
pub fn pre(r: &Rel, q: &Pred) -> Pred {
    r.iter().filter(|(_, y)| q.contains(y)).map(|&(x, _)| x).collect()
}

/// p̃ost(r)P = {y ∈ codomain | ∀x. (x,y) ∈ r ⇒ x ∈ P}.
pub fn post_tilde(r: &Rel, p: &Pred, codomain: &Pred) -> Pred {
    codomain
        .iter()
        .filter(|&&y| r.iter().all(|&(x, z)| z != y || p.contains(&x)))
        .copied()
        .collect()
}

/// p̃re(r)Q = {x ∈ domain | ∀y. (x,y) ∈ r ⇒ y ∈ Q}.
pub fn pre_tilde(r: &Rel, q: &Pred, domain: &Pred) -> Pred {
    domain
        .iter()
        .filter(|&&x| r.iter().all(|&(z, y)| z != x || q.contains(&y)))
        .copied()
        .collect()
}

/// Relational Post(r)P = {(σ₀,σ′) | ∃σ. (σ₀,σ) ∈ P ∧ (σ,σ′) ∈ r}, i.e. P⨟r
/// with the ⊥-absorbing composition (a (σ₀,⊥) row of P persists).
pub fn post_rel(r: &Rel, p: &RelPred) -> RelPred {
    compose(p, r)
}

/// Relational Pre(r)Q = {(σ₀,σ) | ∃σ′. (σ,σ′) ∈ r ∧ (σ₀,σ′) ∈ Q}.
pub fn pre_rel(r: &Rel, q: &RelPred) -> RelPred {
    let mut out = RelPred::new();
    for &(s, s2) in r {
        for &(s0, t) in q {
            if t == s2 {
                out.insert((s0, s));
            }
        }
    }
    out
}

/// Relational p̃ost(r)P = {(σ₀,σ′) | ∀σ. (σ,σ′) ∈ r ⇒ (σ₀,σ) ∈ P}, with σ₀
/// over Σ and σ′ over Σ ∪ {⊥}.
pub fn post_tilde_rel(r: &Rel, p: &RelPred, sp: &Space) -> RelPred {
    let mut out = RelPred::new();
    for s0 in sp.states() {
        for s2 in sp.sigma_bot() {
            if r.iter().all(|&(x, y)| y != s2 || p.contains(&(El::St(s0), x))) {
                out.insert((El::St(s0), s2));
            }
        }
    }
    out
}

/// Relational p̃re(r)Q = {(σ₀,σ) | ∀σ′. (σ,σ′) ∈ r ⇒ (σ₀,σ′) ∈ Q}.
pub fn pre_tilde_rel(r: &Rel, q: &RelPred, sp: &Space) -> RelPred {
    let mut out = RelPred::new();
    for s0 in sp.states() {
        for s in sp.states() {
            if r.iter().all(|&(x, y)| x != El::St(s) || q.contains(&(El::St(s0), y))) {
                out.insert((El::St(s0), El::St(s)));
            }
        }
    }
    out
}

/// Dijkstra's weakest precondition: wp(S,Q) = pre(r)Q ∩ p̃re(r)Q with
/// r = e ∪ b ∪ bot (some execution reaches Q and all executions stay in Q).
pub fn wp(t: &SemTriple, q: &Pred, sp: &Space) -> Pred {
    let r = t.all();
    pre(&r, q).intersection(&pre_tilde(&r, q, &sp.sigma())).copied().collect()
}

/// Weakest liberal precondition: wlp(S,Q) = wp(S, Q ∪ {⊥}).
pub fn wlp(t: &SemTriple, q: &Pred, sp: &Space) -> Pred {
    let mut qb = q.clone();
    qb.insert(El::Bot);
    wp(t, &qb, sp)
}

/// Strongest postcondition: sp(S,P) = post(r)P ∩ p̃ost(r)P with r = e ∪ b ∪ bot.
pub fn sp(t: &SemTriple, p: &Pred, space: &Space) -> Pred {
    let r = t.all();
    post(&r, p).intersection(&post_tilde(&r, p, &space.sigma_bot())).copied().collect()
}

/// Strongest liberal postcondition: sp with ⊥ removed.
pub fn slp(t: &SemTriple, p: &Pred, space: &Space) -> Pred {
    sp(t, p, space).into_iter().filter(|e| !e.is_bot()).collect()
}

/// The natural relation e ∪ bot used by ⊥-aware transformer-based theories.
pub fn natural_rel(t: &SemTriple) -> Rel {
    union(&t.e, &t.bot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_program;
    use crate::relsem::sem;
    use crate::space::{random_subset, Domain};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cd() -> (Space, SemTriple) {
        let p = parse_program("vars n; while (n != 0) { n = n - 1; }").unwrap();
        let sp = Space::new(Domain::new(-2, 3).unwrap(), &p.vars).unwrap();
        let t = sem(&sp, &p.body).unwrap();
        (sp, t)
    }

    #[test]
    fn post_incrementation() {
        let p = parse_program("vars x; x = x + 1;").unwrap();
        let sp = Space::new(Domain::new(-2, 3).unwrap(), &p.vars).unwrap();
        let t = sem(&sp, &p.body).unwrap();
        let zero: Pred = [El::St(sp.index(&[0]))].into_iter().collect();
        let one: Pred = [El::St(sp.index(&[1]))].into_iter().collect();
        assert_eq!(post(&t.e, &zero), one);
        assert_eq!(post(&t.e, &Pred::new()), Pred::new());
    }

    #[test]
    fn cd_examples() {
        let (sp, t) = cd();
        let neg1: Pred = [El::St(sp.index(&[-1]))].into_iter().collect();
        let bot: Pred = [El::Bot].into_iter().collect();
        // post(e ∪ bot, {n=-1}) = {⊥}
        assert_eq!(post(&t.natural(), &neg1), bot);
        // pre(natural, {⊥}) = {n=-1, n=-2}
        let expect: Pred =
            [El::St(sp.index(&[-1])), El::St(sp.index(&[-2]))].into_iter().collect();
        assert_eq!(pre(&t.natural(), &bot), expect);
        // p̃re(r, full codomain) = full domain
        assert_eq!(pre_tilde(&t.natural(), &sp.sigma_bot(), &sp.sigma()), sp.sigma());
    }

    #[test]
    fn pre_meets_counterexample() {
        // r = {(1,2),(1,3)}: pre(r,{2}) ∩ pre(r,{3}) = {1} ≠ pre(r, {2}∩{3}) = ∅
        let r: Rel = [(El::St(1), El::St(2)), (El::St(1), El::St(3))].into_iter().collect();
        let two: Pred = [El::St(2)].into_iter().collect();
        let three: Pred = [El::St(3)].into_iter().collect();
        let both: Pred = pre(&r, &two).intersection(&pre(&r, &three)).copied().collect();
        assert_eq!(both, [El::St(1)].into_iter().collect::<Pred>());
        let meet: Pred = two.intersection(&three).copied().collect();
        assert_eq!(pre(&r, &meet), Pred::new());
    }

    #[test]
    fn adjunctions_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sp = Space::new(Domain::new(0, 3).unwrap(), &["x".to_string()]).unwrap();
        for _ in 0..40 {
            let r = random_subset(&sp.full_rel_bot(), &mut rng);
            let p = random_subset(&sp.sigma(), &mut rng);
            let q = random_subset(&sp.sigma_bot(), &mut rng);
            // post ⊣ p̃re
            assert_eq!(
                post(&r, &p).is_subset(&q),
                p.is_subset(&pre_tilde(&r, &q, &sp.sigma()))
            );
            // pre ⊣ p̃ost
            assert_eq!(
                pre(&r, &q).is_subset(&p),
                q.is_subset(&post_tilde(&r, &p, &sp.sigma_bot()))
            );
        }
    }

    #[test]
    fn relational_adjunctions_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sp = Space::new(Domain::new(0, 2).unwrap(), &["x".to_string()]).unwrap();
        for _ in 0..25 {
            let r = random_subset(&sp.full_rel_bot(), &mut rng);
            // P ranges over Σ̄ × Σ̄ — ⊥ enters postconditions only through r
            let p = random_subset(&sp.full_rel(), &mut rng);
            let q = random_subset(&sp.full_rel_bot(), &mut rng);
            // Post(r) ⊣ P̃re(r)
            assert_eq!(
                post_rel(&r, &p).is_subset(&q),
                p.is_subset(&pre_tilde_rel(&r, &q, &sp)),
                "Post/P̃re adjunction"
            );
            // Pre(r) ⊣ P̃ost(r) — restrict q to the Σ×Σ part Pre ranges over
            let qa: RelPred = q.iter().filter(|(_, y)| !y.is_bot()).copied().collect();
            assert_eq!(
                pre_rel(&r, &p).is_subset(&qa),
                p.is_subset(&post_tilde_rel(&r, &qa, &sp)),
                "Pre/P̃ost adjunction"
            );
        }
    }

    #[test]
    fn complement_dual_transport() {
        // p̃ost = ¬ ∘ post ∘ ¬ and p̃re = ¬ ∘ pre ∘ ¬ pointwise
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sp = Space::new(Domain::new(0, 4).unwrap(), &["x".to_string()]).unwrap();
        let sigma = sp.sigma();
        let sigma_bot = sp.sigma_bot();
        for _ in 0..40 {
            let r = random_subset(&sp.full_rel_bot(), &mut rng);
            let p = random_subset(&sigma, &mut rng);
            let q = random_subset(&sigma_bot, &mut rng);
            let not_p: Pred = sigma.difference(&p).copied().collect();
            let not_q: Pred = sigma_bot.difference(&q).copied().collect();
            let lhs: Pred = sigma_bot.difference(&post(&r, &not_p)).copied().collect();
            assert_eq!(lhs, post_tilde(&r, &p, &sigma_bot));
            let lhs: Pred = sigma.difference(&pre(&r, &not_q)).copied().collect();
            assert_eq!(lhs, pre_tilde(&r, &q, &sigma));
        }
    }

    #[test]
    fn join_meet_preservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let sp = Space::new(Domain::new(0, 3).unwrap(), &["x".to_string()]).unwrap();
        for _ in 0..25 {
            let r = random_subset(&sp.full_rel_bot(), &mut rng);
            let p1 = random_subset(&sp.sigma(), &mut rng);
            let p2 = random_subset(&sp.sigma(), &mut rng);
            let q1 = random_subset(&sp.sigma_bot(), &mut rng);
            let q2 = random_subset(&sp.sigma_bot(), &mut rng);
            let u: Pred = p1.union(&p2).copied().collect();
            assert_eq!(
                post(&r, &u),
                post(&r, &p1).union(&post(&r, &p2)).copied().collect::<Pred>()
            );
            let u: Pred = q1.union(&q2).copied().collect();
            assert_eq!(
                pre(&r, &u),
                pre(&r, &q1).union(&pre(&r, &q2)).copied().collect::<Pred>()
            );
            let m: Pred = q1.intersection(&q2).copied().collect();
            assert_eq!(
                pre_tilde(&r, &m, &sp.sigma()),
                pre_tilde(&r, &q1, &sp.sigma())
                    .intersection(&pre_tilde(&r, &q2, &sp.sigma()))
                    .copied()
                    .collect::<Pred>()
            );
        }
    }

    #[test]
    fn dijkstra_cd() {
        let (sp, t) = cd();
        let zero: Pred = [El::St(sp.index(&[0]))].into_iter().collect();
        let nonneg: Pred = (0..=3).map(|v| El::St(sp.index(&[v]))).collect();
        assert_eq!(wp(&t, &zero, &sp), nonneg);
        assert_eq!(wlp(&t, &zero, &sp), sp.sigma());
        // sp from {n≥0} is exactly {n=0}
        assert_eq!(sp_from(&t, &nonneg, &sp), zero);
    }

    fn sp_from(t: &SemTriple, p: &Pred, space: &Space) -> Pred {
        sp(t, p, space)
    }

    #[test]
    fn wlp_is_wp_with_bot() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (space, t) = cd();
        for _ in 0..50 {
            let q = random_subset(&space.sigma(), &mut rng);
            let mut qb = q.clone();
            qb.insert(El::Bot);
            assert_eq!(wlp(&t, &q, &space), wp(&t, &qb, &space));
        }
    }
}

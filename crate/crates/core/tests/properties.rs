//! Property tests for the core algebraic invariants.

use std::collections::BTreeSet;

use proptest::prelude::*;

use fixlogic::space::{compose, star, Domain, El, Pred, Rel, Space};
use fixlogic::transformers::{post, post_tilde, pre, pre_tilde};

fn space() -> Space {
    Space::new(Domain::new(0, 3).unwrap(), &["x".to_string()]).unwrap()
}

fn els(sp: &Space) -> Vec<El> {
    sp.sigma_bot().into_iter().collect()
}

prop_compose! {
    fn arb_pred()(mask in 0u32..32) -> u32 { mask }
}

prop_compose! {
    fn arb_rel()(mask in 0u32..(1 << 25)) -> u32 { mask }
}

fn pred_of(sp: &Space, mask: u32) -> Pred {
    els(sp)
        .into_iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| e)
        .collect()
}

fn rel_of(sp: &Space, mask: u32) -> Rel {
    let e = els(sp);
    let mut out = Rel::new();
    for (i, &a) in e.iter().enumerate() {
        for (j, &b) in e.iter().enumerate() {
            if mask >> (i * e.len() + j) & 1 == 1 {
                out.insert((a, b));
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn post_preserves_joins(r in arb_rel(), p1 in arb_pred(), p2 in arb_pred()) {
        let sp = space();
        let r = rel_of(&sp, r);
        let (p1, p2) = (pred_of(&sp, p1), pred_of(&sp, p2));
        let both: Pred = p1.union(&p2).copied().collect();
        let joined: Pred = post(&r, &p1).union(&post(&r, &p2)).copied().collect();
        prop_assert_eq!(post(&r, &both), joined);
    }

    #[test]
    fn adjunctions_hold(r in arb_rel(), p in arb_pred(), q in arb_pred()) {
        let sp = space();
        let r = rel_of(&sp, r);
        let (p, q) = (pred_of(&sp, p), pred_of(&sp, q));
        let u = sp.sigma_bot();
        prop_assert_eq!(
            post(&r, &p).is_subset(&q),
            p.is_subset(&pre_tilde(&r, &q, &u))
        );
        prop_assert_eq!(
            pre(&r, &q).is_subset(&p),
            q.is_subset(&post_tilde(&r, &p, &u))
        );
    }

    #[test]
    fn pre_is_post_of_inverse(r in arb_rel(), q in arb_pred()) {
        let sp = space();
        let r = rel_of(&sp, r);
        let q = pred_of(&sp, q);
        let inv: Rel = r.iter().map(|&(a, b)| (b, a)).collect();
        prop_assert_eq!(pre(&r, &q), post(&inv, &q));
    }

    #[test]
    fn star_is_a_closure(r in arb_rel()) {
        let sp = space();
        // ⊥-rows are absorbing under compose, so keep to Σ×Σ for this law
        let r: Rel = rel_of(&sp, r)
            .into_iter()
            .filter(|(a, b)| !a.is_bot() && !b.is_bot())
            .collect();
        let s = star(&sp, &r);
        prop_assert_eq!(star(&sp, &s), s.clone());
        prop_assert!(r.is_subset(&s));
        prop_assert!(compose(&s, &s).is_subset(&s));
    }

    #[test]
    fn compose_is_associative(a in arb_rel(), b in arb_rel(), c in arb_rel()) {
        let sp = space();
        let (a, b, c) = (rel_of(&sp, a), rel_of(&sp, b), rel_of(&sp, c));
        prop_assert_eq!(compose(&compose(&a, &b), &c), compose(&a, &compose(&b, &c)));
    }

    #[test]
    fn transformers_are_monotone(r in arb_rel(), p1 in arb_pred(), p2 in arb_pred()) {
        let sp = space();
        let r = rel_of(&sp, r);
        let small: Pred = pred_of(&sp, p1 & p2);
        let big: Pred = pred_of(&sp, p1 | p2);
        prop_assert!(post(&r, &small).is_subset(&post(&r, &big)));
        prop_assert!(pre(&r, &small).is_subset(&pre(&r, &big)));
        let u: BTreeSet<El> = sp.sigma_bot();
        prop_assert!(pre_tilde(&r, &small, &u).is_subset(&pre_tilde(&r, &big, &u)));
        prop_assert!(post_tilde(&r, &small, &u).is_subset(&post_tilde(&r, &big, &u)));
    }
}

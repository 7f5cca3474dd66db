//! End-to-end acceptance gate: one pass/fail line per criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use fixlogic::deduct::{
    interp, provable_terms, rules_from_operator, while_components, while_rule_system, Interp,
    Rule, RuleSystem,
};
use fixlogic::galois::{
    invert, mask_of, negate, proj2, proj2_gamma, set_of, subsets, verify_gc, Carrier,
    GaloisPair,
};
use fixlogic::induction::{
    canonical_gfp_chain, canonical_park, canonical_turing_floyd, canonical_under_seq,
    canonical_under_variant, check_gfp_nonempty, check_image_over, check_park,
    check_turing_floyd, check_under_seq, check_under_variant, check_void_gfp, check_void_lfp,
    complement_dual_fn, no_infinite_chain, random_monotone, ParkCert, SeqCert,
    UnderVariantCert, VariantCert,
};
use fixlogic::lang::{eval_pred_assertional, parse_predicate, parse_program, Program, Stmt};
use fixlogic::proofs::{check_ehl, check_pre, synth_ehl, synth_pre, EhlNode, ProofsError};
use fixlogic::relsem::{angelic, bsem, interp_oracle, nonterm_empty_check, sem};
use fixlogic::space::{compose, random_subset, Domain, El, Pred, Rel, SetFn, Space};
use fixlogic::theories::{
    catalog_entry, holds, holds_ehl, holds_prelogic, hoare_via_chain, Assn,
};
use fixlogic::transformers::{post, post_tilde, pre, pre_tilde, wlp, wp};

fn corpus() -> Vec<(String, Space, Program)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut names: Vec<_> = fs::read_dir(&dir)
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "prog"))
        .collect();
    names.sort();
    let out: Vec<_> = names
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            let prog = parse_program(&text).unwrap();
            let sp = Space::new(Domain::new(-8, 7).unwrap(), &prog.vars).unwrap();
            (p.file_name().unwrap().to_string_lossy().into_owned(), sp, prog)
        })
        .collect();
    assert!(out.len() >= 25, "corpus must have at least 25 programs");
    out
}

fn small_corpus() -> Vec<(String, Space, Program)> {
    // the same programs over a smaller domain, for the quadratic suites
    corpus()
        .into_iter()
        .map(|(n, _, prog)| {
            let sp = Space::new(Domain::new(-4, 3).unwrap(), &prog.vars).unwrap();
            (n, sp, prog)
        })
        .collect()
}

fn report<F: FnOnce() -> Result<(), String>>(n: u32, name: &str, f: F) {
    let t0 = Instant::now();
    let r = f();
    let dt = t0.elapsed().as_secs_f64();
    match r {
        Ok(()) => println!("ACCEPTANCE {n} ({name}): pass ({dt:.1}s)"),
        Err(e) => {
            println!("ACCEPTANCE {n} ({name}): fail ({dt:.1}s) — {e}");
            panic!("acceptance criterion {n} failed: {e}");
        }
    }
}

fn pred(sp: &Space, text: &str) -> Pred {
    eval_pred_assertional(&parse_predicate(text, false, sp.vars()).unwrap(), sp)
}

#[test]
fn criterion_1_semantics_oracle() {
    report(1, "semantics-oracle equivalence", || {
        for (name, sp, prog) in corpus() {
            let t = sem(&sp, &prog.body).map_err(|e| format!("{name}: {e}"))?;
            let o = interp_oracle(&sp, &prog.body);
            if t.e != o.e || t.b != o.b || t.bot != o.bot {
                return Err(format!("{name}: sem and interpreter disagree"));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_2_adjunctions() {
    report(2, "transformer adjunctions", || {
        // exhaustive for |Σ| = 5
        let sp = Space::new(Domain::new(0, 4).unwrap(), &["x".to_string()]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut rels = vec![Rel::new(), sp.id_rel(), sp.full_rel_bot()];
        for _ in 0..20 {
            rels.push(random_subset(&sp.full_rel_bot(), &mut rng));
        }
        let ps = subsets(&sp.sigma()).unwrap();
        let qs = subsets(&sp.sigma_bot()).unwrap();
        for r in &rels {
            for p in &ps {
                for q in &qs {
                    let a1 = post(r, p).is_subset(q);
                    let b1 = p.is_subset(&pre_tilde(r, q, &sp.sigma()));
                    if a1 != b1 {
                        return Err("post/p̃re adjunction violated".into());
                    }
                    let a2 = pre(r, q).is_subset(p);
                    let b2 = q.is_subset(&post_tilde(r, p, &sp.sigma_bot()));
                    if a2 != b2 {
                        return Err("pre/p̃ost adjunction violated".into());
                    }
                }
            }
        }
        // 10^3 random relations for |Σ| = 8
        let sp8 = Space::new(Domain::new(0, 7).unwrap(), &["x".to_string()]).unwrap();
        for _ in 0..1000 {
            let r = random_subset(&sp8.full_rel_bot(), &mut rng);
            for _ in 0..5 {
                let p = random_subset(&sp8.sigma(), &mut rng);
                let q = random_subset(&sp8.sigma_bot(), &mut rng);
                if post(&r, &p).is_subset(&q) != p.is_subset(&pre_tilde(&r, &q, &sp8.sigma()))
                {
                    return Err("post/p̃re adjunction violated (random)".into());
                }
                if pre(&r, &q).is_subset(&p)
                    != q.is_subset(&post_tilde(&r, &p, &sp8.sigma_bot()))
                {
                    return Err("pre/p̃ost adjunction violated (random)".into());
                }
            }
        }
        // pre does not preserve binary meets: r = {(1,2),(1,3)}
        let sp3 = Space::new(Domain::new(1, 3).unwrap(), &["x".to_string()]).unwrap();
        let e = |v: i64| El::St(sp3.states().find(|&s| sp3.value(s, 0) == v).unwrap());
        let r: Rel = [(e(1), e(2)), (e(1), e(3))].into_iter().collect();
        let q2: Pred = [e(2)].into_iter().collect();
        let q3: Pred = [e(3)].into_iter().collect();
        let meet: Pred = q2.intersection(&q3).copied().collect();
        let lhs = pre(&r, &meet);
        let rhs: Pred = pre(&r, &q2).intersection(&pre(&r, &q3)).copied().collect();
        if lhs == rhs || !lhs.is_empty() || rhs != [e(1)].into_iter().collect() {
            return Err("pre-meets counterexample not reproduced".into());
        }
        Ok(())
    });
}

#[test]
fn criterion_3_galois_verifier() {
    report(3, "Galois connections and the Hoare chain", || {
        let sp = Space::new(Domain::new(0, 3).unwrap(), &["x".to_string()]).unwrap();
        let sigma: Vec<El> = sp.sigma().into_iter().collect();
        let sigma_bot: Vec<El> = sp.sigma_bot().into_iter().collect();
        let pairs: Vec<(El, El)> = sp.full_rel_bot().into_iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..10u64 {
            let r = random_subset(&sp.full_rel_bot(), &mut rng);
            // post ⊣ p̃re
            let g = GaloisPair {
                src: Carrier::pow(sigma.len() as u32),
                dst: Carrier::pow(sigma_bot.len() as u32),
                alpha: Box::new({
                    let (r, sigma, sigma_bot) = (r.clone(), sigma.clone(), sigma_bot.clone());
                    move |x| mask_of(&sigma_bot, &post(&r, &set_of(&sigma, x)))
                }),
                gamma: Box::new({
                    let (r, sigma, sigma_bot, s) =
                        (r.clone(), sigma.clone(), sigma_bot.clone(), sp.sigma());
                    move |y| mask_of(&sigma, &pre_tilde(&r, &set_of(&sigma_bot, y), &s))
                }),
            };
            verify_gc(&g, seed).map_err(|v| format!("post/p̃re GC: {v:?}"))?;
            // pre ⊣ p̃ost
            let g = GaloisPair {
                src: Carrier::pow(sigma_bot.len() as u32),
                dst: Carrier::pow(sigma.len() as u32),
                alpha: Box::new({
                    let (r, sigma, sigma_bot) = (r.clone(), sigma.clone(), sigma_bot.clone());
                    move |x| mask_of(&sigma, &pre(&r, &set_of(&sigma_bot, x)))
                }),
                gamma: Box::new({
                    let (r, sigma, sigma_bot, s) =
                        (r.clone(), sigma.clone(), sigma_bot.clone(), sp.sigma_bot());
                    move |y| mask_of(&sigma_bot, &post_tilde(&r, &set_of(&sigma, y), &s))
                }),
            };
            verify_gc(&g, seed).map_err(|v| format!("pre/p̃ost GC: {v:?}"))?;
        }
        // projection α_↓2 ⊣ γ
        let g = GaloisPair {
            src: Carrier::pow(pairs.len() as u32),
            dst: Carrier::pow(sigma_bot.len() as u32),
            alpha: Box::new({
                let (pairs, sigma_bot) = (pairs.clone(), sigma_bot.clone());
                move |x| mask_of(&sigma_bot, &proj2(&set_of(&pairs, x)))
            }),
            gamma: Box::new({
                let (pairs, sigma_bot, sp) = (pairs.clone(), sigma_bot.clone(), sp.clone());
                move |y| mask_of(&pairs, &proj2_gamma(&set_of(&sigma_bot, y), &sp))
            }),
        };
        verify_gc(&g, 0).map_err(|v| format!("proj2 GC: {v:?}"))?;
        // complement α^¬ into the dual order
        let n = sigma_bot.len() as u32;
        let full = (1u64 << n) - 1;
        let g = GaloisPair {
            src: Carrier::pow(n),
            dst: Carrier::pow_dual(n),
            alpha: Box::new(move |x| !x & full),
            gamma: Box::new(move |y| !y & full),
        };
        verify_gc(&g, 0).map_err(|v| format!("negate GC: {v:?}"))?;
        let u = sp.sigma_bot();
        let s = random_subset(&u, &mut rng);
        if negate(&negate(&s, &u), &u) != s {
            return Err("negate is not involutive".into());
        }
        // inversion isomorphism
        let mut flipped: Vec<(El, El)> = pairs.iter().map(|&(a, b)| (b, a)).collect();
        flipped.sort();
        let g = GaloisPair {
            src: Carrier::pow(pairs.len() as u32),
            dst: Carrier::pow(pairs.len() as u32),
            alpha: Box::new({
                let (pairs, flipped) = (pairs.clone(), flipped.clone());
                move |x| mask_of(&flipped, &invert(&set_of(&pairs, x)))
            }),
            gamma: Box::new({
                let (pairs, flipped) = (pairs.clone(), flipped.clone());
                move |y| mask_of(&pairs, &invert(&set_of(&flipped, y)))
            }),
        };
        verify_gc(&g, 0).map_err(|v| format!("invert GC: {v:?}"))?;
        // α_↑{⊥} into the sublattice above {⊥}, and α_↓Σ back down
        let nb = 4u32;
        let bot_bit = 1u64;
        let g = GaloisPair {
            src: Carrier::pow(nb),
            dst: Carrier::PowAbove { n: nb, fixed: bot_bit, dual: false },
            alpha: Box::new({
                let dst = Carrier::PowAbove { n: nb, fixed: bot_bit, dual: false };
                move |x| dst.encode(&[x | bot_bit])
            }),
            gamma: Box::new({
                let dst = Carrier::PowAbove { n: nb, fixed: bot_bit, dual: false };
                move |y| dst.decode(y)[0]
            }),
        };
        verify_gc(&g, 0).map_err(|v| format!("α_↑⊥ GC: {v:?}"))?;
        let g = GaloisPair {
            src: Carrier::pow(nb),
            dst: Carrier::pow(nb - 1),
            alpha: Box::new(move |x| x >> 1),
            gamma: Box::new(move |y| (y << 1) | bot_bit),
        };
        verify_gc(&g, 0).map_err(|v| format!("α_↓Σ GC: {v:?}"))?;
        // function-graph isomorphism α_G
        let nx = 3usize;
        let ny = 3u32;
        let fc = Carrier::Prod(vec![Carrier::pow(ny); nx]);
        let g = GaloisPair {
            src: Carrier::pow(nx as u32 * ny),
            dst: fc.clone(),
            alpha: Box::new({
                let fc = fc.clone();
                move |r| {
                    let images: Vec<u64> =
                        (0..nx).map(|x| (r >> (x as u32 * ny)) & ((1 << ny) - 1)).collect();
                    fc.encode(&images)
                }
            }),
            gamma: Box::new({
                let fc = fc.clone();
                move |f| {
                    fc.decode(f)
                        .iter()
                        .enumerate()
                        .fold(0u64, |r, (x, img)| r | (img << (x as u32 * ny)))
                }
            }),
        };
        verify_gc(&g, 0).map_err(|v| format!("α_G GC: {v:?}"))?;
        // the composed Hoare chain equals the direct formula on corpus triples
        let hoare = catalog_entry("hoare").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for (name, sp, prog) in small_corpus() {
            let t = sem(&sp, &prog.body).unwrap();
            for _ in 0..20 {
                let p = random_subset(&sp.sigma(), &mut rng);
                let q = random_subset(&sp.sigma(), &mut rng);
                let direct =
                    holds(hoare, &sp, &t, &Assn::A(p.clone()), &Assn::A(q.clone()))
                        .unwrap()
                        .holds;
                if hoare_via_chain(&sp, &t, &p, &q) != direct {
                    return Err(format!("{name}: chain and direct Hoare disagree"));
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_4_taxonomy_coherence() {
    report(4, "taxonomy coherence", || {
        let total = catalog_entry("apt-plotkin-assertional").unwrap();
        let hoare = catalog_entry("hoare").unwrap();
        let incor = catalog_entry("incorrectness").unwrap();
        let mpt = catalog_entry("manna-pnueli-total").unwrap();
        let mp = catalog_entry("manna-partial").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut wlp_checked = 0;
        for (name, sp, prog) in small_corpus() {
            let t = sem(&sp, &prog.body).unwrap();
            for _ in 0..10 {
                let p = random_subset(&sp.sigma(), &mut rng);
                let q = random_subset(&sp.sigma(), &mut rng);
                let pa = Assn::A(p.clone());
                let qa = Assn::A(q.clone());
                // total correctness implies partial correctness
                if holds(total, &sp, &t, &pa, &qa).unwrap().holds
                    && !holds(hoare, &sp, &t, &pa, &qa).unwrap().holds
                {
                    return Err(format!("{name}: Manna–Pnueli holds but Hoare fails"));
                }
                // and relationally
                let pr = Assn::R(random_subset(&sp.full_rel(), &mut rng));
                let qr = Assn::R(random_subset(&sp.full_rel(), &mut rng));
                if holds(mpt, &sp, &t, &pr, &qr).unwrap().holds
                    && !holds(mp, &sp, &t, &pr, &qr).unwrap().holds
                {
                    return Err(format!("{name}: relational total ⇏ partial"));
                }
                // Hoare ∧ incorrectness pin the exact post
                if holds(hoare, &sp, &t, &pa, &qa).unwrap().holds
                    && holds(incor, &sp, &t, &pa, &qa).unwrap().holds
                    && q != post(&angelic(&t), &p)
                {
                    return Err(format!("{name}: Q is not the exact post"));
                }
                // wlp(Q) = wp(Q ∪ {⊥})
                if wlp_checked < 200 {
                    let mut qb = q.clone();
                    qb.insert(El::Bot);
                    if wlp(&t, &q, &sp) != wp(&t, &qb, &sp) {
                        return Err(format!("{name}: wlp(Q) ≠ wp(Q∪{{⊥}})"));
                    }
                    wlp_checked += 1;
                }
            }
        }
        if wlp_checked < 200 {
            return Err("fewer than 200 wlp/wp samples".into());
        }
        // while(true) skip over |Σ| = 3: Hoare is universal, Manna–Pnueli empty
        let prog = parse_program("vars x; while (true) { skip; }").unwrap();
        let sp = Space::new(Domain::new(0, 2).unwrap(), &prog.vars).unwrap();
        let t = sem(&sp, &prog.body).unwrap();
        for p in subsets(&sp.sigma()).unwrap() {
            for q in subsets(&sp.sigma()).unwrap() {
                let pa = Assn::A(p.clone());
                let qa = Assn::A(q.clone());
                if !holds(hoare, &sp, &t, &pa, &qa).unwrap().holds {
                    return Err("Hoare not universal on while(true) skip".into());
                }
                let tot = holds(total, &sp, &t, &pa, &qa).unwrap().holds;
                if tot != p.is_empty() {
                    return Err("Manna–Pnueli theory not empty on while(true) skip".into());
                }
            }
        }
        Ok(())
    });
}

fn universe(n: u32) -> BTreeSet<u32> {
    (0..n).collect()
}

/// A join-preserving operator from a singleton image map.
fn join_fn(map: BTreeMap<u32, BTreeSet<u32>>, u: BTreeSet<u32>) -> SetFn<u32> {
    SetFn::new(u, move |x| x.iter().flat_map(|e| map[e].iter().copied()).collect())
}

/// A meet-preserving operator from a co-singleton image map.
fn meet_fn(map: BTreeMap<u32, BTreeSet<u32>>, u: BTreeSet<u32>) -> SetFn<u32> {
    SetFn::new(u.clone(), move |x| {
        let mut acc: Option<BTreeSet<u32>> = None;
        for e in u.iter().filter(|e| !x.contains(e)) {
            acc = Some(match acc {
                None => map[e].clone(),
                Some(a) => a.intersection(&map[e]).copied().collect(),
            });
        }
        acc.unwrap_or_else(|| u.clone())
    })
}

fn random_map(u: &BTreeSet<u32>, rng: &mut impl Rng) -> BTreeMap<u32, BTreeSet<u32>> {
    u.iter().map(|&e| (e, random_subset(u, rng))).collect()
}

fn random_ranks(u: &BTreeSet<u32>, rng: &mut impl Rng) -> BTreeMap<u32, u64> {
    u.iter().map(|&e| (e, rng.gen_range(0..6))).collect()
}

#[test]
fn criterion_5_induction_checkers() {
    report(5, "fixpoint-induction checkers", || {
        let u6 = universe(6);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // Park
        {
            let f = random_monotone(&u6, 4, &mut rng);
            let lfp = f.lfp().unwrap().fix;
            let c = canonical_park(&f).unwrap();
            if !check_park(&f, &lfp, &c).accepted {
                return Err("Park canonical rejected".into());
            }
            let mut rejected = 0;
            while rejected < 100 {
                let f = random_monotone(&u6, rng.gen_range(1..5), &mut rng);
                let p = random_subset(&u6, &mut rng);
                let cert = ParkCert { invariant: random_subset(&u6, &mut rng) };
                let v = check_park(&f, &p, &cert);
                if v.accepted {
                    if !f.lfp().unwrap().fix.is_subset(&p) {
                        return Err("Park soundness violation".into());
                    }
                } else {
                    rejected += 1;
                }
            }
        }
        // under-approximation by iterates
        {
            let f = random_monotone(&u6, 4, &mut rng);
            let lfp = f.lfp().unwrap().fix;
            let c = canonical_under_seq(&f).unwrap();
            if !check_under_seq(&f, &lfp, &c).accepted {
                return Err("under-seq canonical rejected".into());
            }
            let mut rejected = 0;
            while rejected < 100 {
                let f = random_monotone(&u6, rng.gen_range(1..5), &mut rng);
                let p = random_subset(&u6, &mut rng);
                let len = rng.gen_range(1..5);
                let seq: Vec<_> = (0..len).map(|_| random_subset(&u6, &mut rng)).collect();
                let v = check_under_seq(&f, &p, &SeqCert { seq });
                if v.accepted {
                    if !p.is_subset(&f.lfp().unwrap().fix) {
                        return Err("under-seq soundness violation".into());
                    }
                } else {
                    rejected += 1;
                }
            }
        }
        // under-approximation with a variant
        {
            let f = random_monotone(&u6, 4, &mut rng);
            let lfp = f.lfp().unwrap().fix;
            let c = canonical_under_variant(&f).unwrap();
            if !check_under_variant(&f, &lfp, &c).accepted {
                return Err("under-variant canonical rejected".into());
            }
            let mut rejected = 0;
            while rejected < 100 {
                let f = random_monotone(&u6, rng.gen_range(1..5), &mut rng);
                let p = random_subset(&u6, &mut rng);
                let len = rng.gen_range(1..5);
                let seq: Vec<_> = (0..len).map(|_| random_subset(&u6, &mut rng)).collect();
                let ranks: Vec<u64> = (0..len).map(|_| rng.gen_range(0..6)).collect();
                let v = check_under_variant(&f, &p, &UnderVariantCert { seq, ranks });
                if v.accepted {
                    if !p.is_subset(&f.lfp().unwrap().fix) {
                        return Err("under-variant soundness violation".into());
                    }
                } else {
                    rejected += 1;
                }
            }
        }
        // void lfp intersection
        {
            let f = join_fn(
                u6.iter().map(|&e| (e, [0u32].into_iter().collect())).collect(),
                u6.clone(),
            );
            let q: BTreeSet<u32> = [3].into_iter().collect();
            let cert = VariantCert {
                invariant: f.lfp().unwrap().fix,
                ranks: u6.iter().map(|&e| (e, 0)).collect(),
            };
            if !check_void_lfp(&f, &q, &cert).accepted {
                return Err("void-lfp canonical rejected".into());
            }
            let mut rejected = 0;
            while rejected < 100 {
                let f = join_fn(random_map(&u6, &mut rng), u6.clone());
                let q = random_subset(&u6, &mut rng);
                let cert = VariantCert {
                    invariant: random_subset(&u6, &mut rng),
                    ranks: random_ranks(&u6, &mut rng),
                };
                let v = check_void_lfp(&f, &q, &cert);
                if v.accepted {
                    if f.lfp().unwrap().fix.intersection(&q).next().is_some() {
                        return Err("void-lfp soundness violation".into());
                    }
                } else {
                    rejected += 1;
                }
            }
        }
        // void gfp intersection
        {
            // identity is meet-preserving; gfp = U, so only Q = ∅ is voidable
            let f = meet_fn(
                u6.iter().map(|&e| (e, u6.iter().copied().filter(|&x| x != e).collect())).collect(),
                u6.clone(),
            );
            let cert = VariantCert {
                invariant: u6.clone(),
                ranks: u6.iter().map(|&e| (e, 0)).collect(),
            };
            if !check_void_gfp(&f, &BTreeSet::new(), &cert).accepted {
                return Err("void-gfp canonical rejected".into());
            }
            let mut rejected = 0;
            while rejected < 100 {
                let f = meet_fn(random_map(&u6, &mut rng), u6.clone());
                let q = random_subset(&u6, &mut rng);
                let cert = VariantCert {
                    invariant: random_subset(&u6, &mut rng),
                    ranks: random_ranks(&u6, &mut rng),
                };
                let v = check_void_gfp(&f, &q, &cert);
                if v.accepted {
                    if f.gfp().unwrap().fix.intersection(&q).next().is_some() {
                        return Err("void-gfp soundness violation".into());
                    }
                } else {
                    rejected += 1;
                }
            }
        }
        // gfp non-emptiness
        {
            let mut canonical_done = false;
            while !canonical_done {
                let f = random_monotone(&u6, 4, &mut rng);
                let gfp = f.gfp().unwrap().fix;
                if gfp.is_empty() {
                    continue;
                }
                let chain = canonical_gfp_chain(&f).unwrap();
                if !check_gfp_nonempty(&f, &gfp, &chain).accepted {
                    return Err("gfp-nonempty canonical rejected".into());
                }
                canonical_done = true;
            }
            let mut rejected = 0;
            while rejected < 100 {
                let f = random_monotone(&u6, rng.gen_range(1..5), &mut rng);
                let p = random_subset(&u6, &mut rng);
                let len = rng.gen_range(1..4);
                let chain: Vec<_> = (0..len).map(|_| random_subset(&u6, &mut rng)).collect();
                let v = check_gfp_nonempty(&f, &p, &chain);
                if v.accepted {
                    if f.gfp().unwrap().fix.intersection(&p).next().is_none() {
                        return Err("gfp-nonempty soundness violation".into());
                    }
                } else {
                    rejected += 1;
                }
            }
        }
        // image over-approximation
        {
            let f = random_monotone(&u6, 4, &mut rng);
            let a: BTreeSet<u32> = [0, 2, 4].into_iter().collect();
            let alpha =
                |x: &BTreeSet<u32>| -> BTreeSet<u32> { x.intersection(&a).copied().collect() };
            let img = alpha(&f.lfp().unwrap().fix);
            if !check_image_over(&f, alpha, &img, &img).accepted {
                return Err("image-over canonical rejected".into());
            }
            let mut rejected = 0;
            while rejected < 100 {
                let f = random_monotone(&u6, rng.gen_range(1..5), &mut rng);
                let p = random_subset(&u6, &mut rng);
                let i = random_subset(&u6, &mut rng);
                let v = check_image_over(&f, alpha, &p, &i);
                if v.accepted {
                    if !alpha(&f.lfp().unwrap().fix).is_subset(&p) {
                        return Err("image-over soundness violation".into());
                    }
                } else {
                    rejected += 1;
                }
            }
        }
        // Turing/Floyd on relations
        {
            let prog = parse_program("vars n; while (n != 0) { n = n - 1; }").unwrap();
            let sp = Space::new(Domain::new(-2, 3).unwrap(), &prog.vars).unwrap();
            let Stmt::While { cond, body } = &prog.body[0] else { unreachable!() };
            let bt = sem(&sp, body).unwrap();
            let r = compose(&bsem(&sp, cond), &bt.e);
            let p = pred(&sp, "n >= 0");
            let cert = canonical_turing_floyd(&sp, &r, &p)
                .ok_or("Turing/Floyd canonical missing")?;
            if !check_turing_floyd(&r, &p, &cert).accepted {
                return Err("Turing/Floyd canonical rejected".into());
            }
            let mut rejected = 0;
            let full: Rel = sp
                .full_rel()
                .into_iter()
                .filter(|(a, b)| !a.is_bot() && !b.is_bot())
                .collect();
            while rejected < 100 {
                let r = random_subset(&full, &mut rng);
                let p = random_subset(&sp.sigma(), &mut rng);
                let cert = VariantCert {
                    invariant: random_subset(&sp.sigma(), &mut rng),
                    ranks: sp
                        .sigma()
                        .iter()
                        .map(|&e| (e, rng.gen_range(0..8)))
                        .collect(),
                };
                let v = check_turing_floyd(&r, &p, &cert);
                if v.accepted {
                    if !no_infinite_chain(&r, &p) {
                        return Err("Turing/Floyd soundness violation".into());
                    }
                } else {
                    rejected += 1;
                }
            }
        }
        // Park duality lfp(α^~ f) = ¬ gfp(f)
        for n in 1..=4u32 {
            let un = universe(n);
            for _ in 0..100 {
                let f = random_monotone(&un, rng.gen_range(1..4), &mut rng);
                let gfp = f.gfp().unwrap().fix;
                let dual = complement_dual_fn(f);
                let lfp = dual.lfp().unwrap().fix;
                let co: BTreeSet<u32> = un.difference(&gfp).copied().collect();
                if lfp != co {
                    return Err(format!("Park duality fails at |U|={n}"));
                }
            }
        }
        let u = universe(6);
        for _ in 0..50 {
            let f = random_monotone(&u, rng.gen_range(1..5), &mut rng);
            let gfp = f.gfp().unwrap().fix;
            let dual = complement_dual_fn(f);
            let co: BTreeSet<u32> = u.difference(&gfp).copied().collect();
            if dual.lfp().unwrap().fix != co {
                return Err("Park duality fails at |U|=6".into());
            }
        }
        Ok(())
    });
}

fn random_system(n: u32, rng: &mut impl Rng) -> RuleSystem {
    let universe: BTreeSet<String> = (0..n).map(|i| format!("t{i}")).collect();
    let terms: Vec<String> = universe.iter().cloned().collect();
    let n_rules = rng.gen_range(0..(2 * n as usize + 1));
    let rules: Vec<Rule> = (0..n_rules)
        .map(|_| {
            let premise: BTreeSet<String> = terms
                .iter()
                .filter(|_| rng.gen_bool(0.3))
                .cloned()
                .collect();
            let conclusion = terms[rng.gen_range(0..terms.len())].clone();
            Rule { premise, conclusion }
        })
        .collect();
    RuleSystem::new(universe, rules).unwrap()
}

#[test]
fn criterion_6_aczel_roundtrips() {
    report(6, "deductive-system correspondence", || {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let rs = random_system(8, &mut rng);
            let lfp = rs.consequence_op().lfp().unwrap().fix;
            if provable_terms(&rs).unwrap() != lfp
                || interp(&rs, &Interp::Inductive).unwrap() != lfp
            {
                return Err("provable terms ≠ lfp(consequence)".into());
            }
        }
        let u5: BTreeSet<String> = (0..5).map(|i| format!("t{i}")).collect();
        for _ in 0..100 {
            let f = random_monotone(&u5, rng.gen_range(1..5), &mut rng);
            let rs = rules_from_operator(&f).unwrap();
            if rs.consequence_op().lfp().unwrap().fix != f.lfp().unwrap().fix {
                return Err("rules_from_operator lfp round-trip fails".into());
            }
        }
        // while-rule systems interpreted bi-inductively match sem
        for (src, lo, hi) in [
            ("vars n; while (n != 0) { n = n - 1; }", -2i64, 3i64),
            ("vars x; while (true) { skip; }", 0, 1),
            (
                "vars x; while (true) { if (x <= 0) { if (x == 0) { break; } else { skip; } } else { x = x - 1; } }",
                -1,
                2,
            ),
        ] {
            let prog = parse_program(src).unwrap();
            let sp = Space::new(Domain::new(lo, hi).unwrap(), &prog.vars).unwrap();
            let Stmt::While { cond, body } = &prog.body[0] else { unreachable!() };
            let ws = while_rule_system(&sp, cond, body).unwrap();
            let terms = interp(&ws.system, &Interp::Bi(ws.inductive_part.clone())).unwrap();
            let (e, inf) = while_components(&terms);
            let t = sem(&sp, &prog.body).unwrap();
            let sem_e: BTreeSet<(El, El)> = t.e.iter().copied().collect();
            let sem_inf: BTreeSet<El> = t.bot.iter().map(|&(a, _)| a).collect();
            if e != sem_e || inf != sem_inf {
                return Err(format!("while-rule system mismatch for {src}"));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_7_derived_proof_systems() {
    report(7, "derived proof systems", || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (name, sp, prog) in small_corpus() {
            let t = sem(&sp, &prog.body).unwrap();
            let v0 = sp.vars()[0].clone();
            let quads = [
                ("true".to_string(), format!("{v0} == 0")),
                (format!("{v0} >= 0"), format!("{v0} == 0")),
                (format!("{v0} >= 0"), format!("{v0} == 0 || bot")),
                ("true".to_string(), "true || bot".to_string()),
                ("false".to_string(), "false".to_string()),
                (format!("{v0} < 0"), "bot".to_string()),
            ];
            for (pt, qt) in &quads {
                let p = pred(&sp, pt);
                let q = pred(&sp, qt);
                let none = Pred::new();
                // EHL: synthesis succeeds exactly on theory members
                let h = holds_ehl(
                    &sp,
                    &t,
                    &Assn::A(p.clone()),
                    &Assn::A(q.clone()),
                    &Assn::A(none.clone()),
                )
                .unwrap()
                .holds;
                match synth_ehl(
                    &sp,
                    &prog.body,
                    &Assn::A(p.clone()),
                    &Assn::A(q.clone()),
                    &Assn::A(none.clone()),
                ) {
                    Ok(d) => {
                        if !h {
                            return Err(format!("{name}: EHL synthesized a false quadruple"));
                        }
                        let v = check_ehl(
                            &sp,
                            &prog.body,
                            &Assn::A(p.clone()),
                            &Assn::A(q.clone()),
                            &Assn::A(none.clone()),
                            &d,
                        )
                        .unwrap();
                        if !v.accepted {
                            return Err(format!("{name}: canonical EHL derivation rejected"));
                        }
                    }
                    Err(ProofsError::NotInTheory) => {
                        if h {
                            return Err(format!("{name}: EHL synthesis failed on a member"));
                        }
                    }
                    Err(e) => return Err(format!("{name}: {e}")),
                }
                // pre-logic likewise
                let h = holds_prelogic(&t, &p, &q, &none).holds;
                match synth_pre(&sp, &prog.body, &p, &q, &none) {
                    Ok(d) => {
                        if !h {
                            return Err(format!("{name}: pre-logic synthesized falsely"));
                        }
                        let v = check_pre(&sp, &prog.body, &p, &q, &none, &d).unwrap();
                        if !v.accepted {
                            return Err(format!("{name}: canonical pre derivation rejected"));
                        }
                    }
                    Err(ProofsError::NotInTheory) => {
                        if h {
                            return Err(format!("{name}: pre-logic synthesis failed on a member"));
                        }
                    }
                    Err(e) => return Err(format!("{name}: {e}")),
                }
            }
        }
        // fuzzed derivations on the countdown loop never accept a false quadruple
        let prog = parse_program("vars n; while (n != 0) { n = n - 1; }").unwrap();
        let sp = Space::new(Domain::new(-2, 3).unwrap(), &prog.vars).unwrap();
        let t = sem(&sp, &prog.body).unwrap();
        for _ in 0..300 {
            let p = random_subset(&sp.sigma(), &mut rng);
            let q = random_subset(&sp.sigma_bot(), &mut rng);
            let none = Pred::new();
            let d = EhlNode::While {
                inv: random_subset(&sp.full_rel_bot(), &mut rng),
                body_ok: random_subset(&sp.full_rel_bot(), &mut rng),
                body_br: Rel::new(),
                variant: if rng.gen_bool(0.5) {
                    None
                } else {
                    Some(
                        sp.full_rel()
                            .into_iter()
                            .map(|pr| (pr, rng.gen_range(0..6)))
                            .collect(),
                    )
                },
                body: Box::new(EhlNode::Atomic),
            };
            let v = check_ehl(
                &sp,
                &prog.body,
                &Assn::A(p.clone()),
                &Assn::A(q.clone()),
                &Assn::A(none.clone()),
                &d,
            )
            .unwrap();
            if v.accepted {
                let h = holds_ehl(
                    &sp,
                    &t,
                    &Assn::A(p.clone()),
                    &Assn::A(q.clone()),
                    &Assn::A(none.clone()),
                )
                .unwrap()
                .holds;
                if !h {
                    return Err("fuzzed EHL derivation accepted a false quadruple".into());
                }
            }
            // fuzz the pre-logic while certificate too
            let len = rng.gen_range(1..4);
            let iseq: Vec<Pred> = std::iter::once(Pred::new())
                .chain((0..len).map(|_| random_subset(&sp.sigma(), &mut rng)))
                .collect();
            let re: Vec<Pred> =
                (0..len).map(|_| random_subset(&sp.sigma(), &mut rng)).collect();
            let d = fixlogic::proofs::PreNode::While {
                iseq,
                re: re.clone(),
                rb: random_subset(&sp.sigma(), &mut rng),
                rbot: random_subset(&sp.sigma(), &mut rng),
                j: None,
                body_rb: Box::new(fixlogic::proofs::PreNode::Atomic),
                body_rbot: Box::new(fixlogic::proofs::PreNode::Atomic),
                body_re: vec![fixlogic::proofs::PreNode::Atomic; re.len()],
                body_j: None,
            };
            let v = check_pre(&sp, &prog.body, &p, &q, &none, &d).unwrap();
            if v.accepted && !holds_prelogic(&t, &p, &q, &none).holds {
                return Err("fuzzed pre derivation accepted a false quadruple".into());
            }
        }
        // the mixed termination/nontermination relational contract, end to end
        let q = fixlogic::lang::eval_pred_relational(
            &parse_predicate(
                "(old(n) >= 0 && n == 0) || (old(n) < 0 && bot)",
                true,
                sp.vars(),
            )
            .unwrap(),
            &sp,
        );
        let d = synth_ehl(
            &sp,
            &prog.body,
            &Assn::A(sp.sigma()),
            &Assn::R(q.clone()),
            &Assn::R(Rel::new()),
        )
        .map_err(|e| format!("mixed contract synthesis: {e}"))?;
        let v = check_ehl(
            &sp,
            &prog.body,
            &Assn::A(sp.sigma()),
            &Assn::R(q),
            &Assn::R(Rel::new()),
            &d,
        )
        .unwrap();
        if !v.accepted {
            return Err("mixed contract derivation rejected".into());
        }
        Ok(())
    });
}

fn collect_loops<'a>(stmts: &'a [Stmt], out: &mut Vec<&'a Stmt>) {
    for s in stmts {
        match s {
            Stmt::While { body, .. } => {
                out.push(s);
                collect_loops(body, out);
            }
            Stmt::If { then_b, else_b, .. } => {
                collect_loops(then_b, out);
                collect_loops(else_b, out);
            }
            _ => {}
        }
    }
}

#[test]
fn criterion_8_termination_lemma() {
    report(8, "nontermination emptiness lemma", || {
        let mut seen = 0;
        for (name, sp, prog) in corpus() {
            let mut loops = Vec::new();
            collect_loops(&prog.body, &mut loops);
            for l in loops {
                let rep = nonterm_empty_check(&sp, l).map_err(|e| format!("{name}: {e}"))?;
                if !rep.agree() {
                    return Err(format!("{name}: gfp-emptiness and chain oracle disagree"));
                }
                seen += 1;
            }
        }
        if seen == 0 {
            return Err("no loops in the corpus".into());
        }
        Ok(())
    });
}

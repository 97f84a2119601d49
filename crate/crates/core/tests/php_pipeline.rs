use std::time::Instant;

use proxdyn::config::RunConfig;
use proxdyn::exact::rational::int;
use proxdyn::flag::Flag;
use proxdyn::group::{enumerate_ball, GroupPresentation, Word};
use proxdyn::php::verify::{Condition1, Condition2};
use proxdyn::php::{
    construct_witness, pullback_hat, verify_witness, ArcSet, PhpInstance, PhpWitness, SetDescriptor,
};
use proxdyn::proj::ProjPoint;

fn sanov(eps: i64) -> PhpInstance {
    let f = ["a", "b", "A", "B"].iter().map(|s| s.parse().unwrap()).collect();
    PhpInstance::new(GroupPresentation::sanov(), f, int(eps)).unwrap()
}

#[test]
fn sanov_witnesses_verify_for_twenty_seeds() {
    let inst = sanov(1);
    for seed in 0..20 {
        let start = Instant::now();
        let cfg = RunConfig::with_seed(seed);
        let w = construct_witness(&inst, &cfg).unwrap();
        assert_eq!(w.n, 5);
        assert_eq!(w.provenance.k, 1);
        let text = w.to_json();
        let back = PhpWitness::parse_json(&text).unwrap();
        assert_eq!(back, w);
        let r = verify_witness(&back, &inst.f, &inst.epsilon, &cfg).unwrap();
        assert!(r.passes(), "seed {seed}: {}", r.summary());
        match &r.condition2 {
            Condition2::Pass(f) => assert!(f.m <= 2),
            other => panic!("{other:?}"),
        }
        assert!(start.elapsed().as_secs() < 60);
        // deterministic per seed
        assert_eq!(construct_witness(&inst, &cfg).unwrap(), w);
    }
}

#[test]
fn tampered_witnesses_fail_condition_one() {
    let inst = sanov(1);
    let cfg = RunConfig::with_seed(3);
    let w = construct_witness(&inst, &cfg).unwrap();

    let mut enlarged = w.clone();
    let (c0, c1) = (w.c[0].as_arcs().unwrap(), w.c[1].as_arcs().unwrap());
    let d0 = w.d[0].as_arcs().unwrap();
    enlarged.c[0] = SetDescriptor::ArcUnion(c0.union(c1));
    enlarged.d[0] = SetDescriptor::ArcUnion(d0.union(c1));
    let r = verify_witness(&enlarged, &inst.f, &inst.epsilon, &cfg).unwrap();
    match r.condition1 {
        Condition1::Fail { first, second, point } => {
            assert!(point.is_some());
            assert!(first.index == 1 || second.index == 1);
        }
        other => panic!("expected overlap, got {other:?}"),
    }

    let mut dup = w.clone();
    dup.gammas[1] = w.gammas[0].clone();
    dup.c[1] = w.c[0].clone();
    dup.d[1] = w.d[0].clone();
    let r = verify_witness(&dup, &inst.f, &inst.epsilon, &cfg).unwrap();
    assert!(matches!(r.condition1, Condition1::Fail { .. }));

    // enlarging a D-set never repairs a condition (1) failure
    let mut both = dup.clone();
    both.d[2] = SetDescriptor::ArcUnion(ArcSet::full());
    let r = verify_witness(&both, &inst.f, &inst.epsilon, &cfg).unwrap();
    assert!(matches!(r.condition1, Condition1::Fail { .. }));

    let mut short = w.clone();
    short.c.pop();
    assert!(verify_witness(&short, &inst.f, &inst.epsilon, &cfg).is_err());
}

#[test]
fn single_pair_witness_for_large_epsilon() {
    let inst = sanov(3);
    let cfg = RunConfig::with_seed(11);
    let w = construct_witness(&inst, &cfg).unwrap();
    assert_eq!(w.n, 1);
    let r = verify_witness(&w, &inst.f, &inst.epsilon, &cfg).unwrap();
    assert!(r.passes());
}

/// Oracle for the hat transport: pull back every set, count memberships word by word.
#[test]
fn hat_sets_inherit_disjointness_and_multiplicity() {
    let inst = sanov(1);
    let cfg = RunConfig::with_seed(5);
    let w = construct_witness(&inst, &cfg).unwrap();
    let g = &inst.group;
    let ball = enumerate_ball(g, 5);
    let words: Vec<Word> = ball.entries.iter().map(|e| e.word.clone()).collect();
    let x = Flag::from_line(&ProjPoint::from_i64(3, 7));

    let inv: Vec<_> = w.gammas.iter().map(|e| e.matrix.inverse().unwrap()).collect();
    let mut family1 = Vec::new();
    for a in &inst.f {
        let am = g.eval(a).unwrap();
        for i in 0..w.c.len() {
            family1.push(w.c[i].as_arcs().unwrap().image(&am));
        }
    }
    let mut family2 = Vec::new();
    for i in 0..w.c.len() {
        family2.push(w.d[i].as_arcs().unwrap().clone());
        family2.push(w.c[i].as_arcs().unwrap().complement().image(&inv[i]));
    }
    let (m, _, _) = proxdyn::php::max_multiplicity_arcs(&family2);

    let hats1: Vec<Vec<Word>> = family1
        .iter()
        .map(|s| pullback_hat(&SetDescriptor::ArcUnion(s.clone()), &x, &words, g).unwrap())
        .collect();
    for i in 0..hats1.len() {
        for j in i + 1..hats1.len() {
            assert!(hats1[i].iter().all(|u| !hats1[j].contains(u)));
        }
    }
    let hats2: Vec<Vec<Word>> = family2
        .iter()
        .map(|s| pullback_hat(&SetDescriptor::ArcUnion(s.clone()), &x, &words, g).unwrap())
        .collect();
    for u in &words {
        let count = hats2.iter().filter(|h| h.contains(u)).count();
        assert!(count <= m);
    }
}

use finmodel::logic::{add_defined_relation, parse, AxiomSuite};
use finmodel::relzoo::*;
use finmodel::structures::build::*;
use finmodel::structures::{are_isomorphic, for_each_tuple, Signature, Structure};
use proptest::prelude::*;

/// Leaf intervals of non-root nodes; leaves are numbered left to right.
fn intervals(s: &Shape) -> Vec<(usize, usize)> {
    fn go(s: &Shape, start: usize, out: &mut Vec<(usize, usize)>) -> usize {
        match s {
            Shape::Leaf => {
                out.push((start, start + 1));
                start + 1
            }
            Shape::Node(a, b) => {
                let mid = go(a, start, out);
                let end = go(b, mid, out);
                out.push((start, end));
                end
            }
        }
    }
    let mut out = Vec::new();
    go(s, 0, &mut out);
    out.pop();
    out
}

// Split oracle: some edge separates {a,b} from {c,d}.
fn oracle_d(iv: &[(usize, usize)], a: usize, b: usize, c: usize, d: usize) -> bool {
    let inside = |x: usize, (i, j): (usize, usize)| i <= x && x < j;
    iv.iter().any(|&v| {
        (inside(a, v) && inside(b, v) && !inside(c, v) && !inside(d, v))
            || (inside(c, v) && inside(d, v) && !inside(a, v) && !inside(b, v))
    })
}

fn oracle_c(iv: &[(usize, usize)], a: usize, b: usize, c: usize) -> bool {
    let inside = |x: usize, (i, j): (usize, usize)| i <= x && x < j;
    iv.iter().any(|&v| inside(b, v) && inside(c, v) && !inside(a, v))
}

fn all_shapes(max: usize) -> Vec<Shape> {
    (1..=max).flat_map(Shape::all).collect()
}

#[test]
fn tree_relations_match_split_oracle() {
    for s in all_shapes(6) {
        let t = BinaryTree::from_shape(&s);
        let iv = intervals(&s);
        let n = t.leaves();
        for_each_tuple(n, 4, |q| assert_eq!(t.d(q[0], q[1], q[2], q[3]), oracle_d(&iv, q[0], q[1], q[2], q[3]), "{s:?} {q:?}"));
        for_each_tuple(n, 3, |q| assert_eq!(t.c(q[0], q[1], q[2]), oracle_c(&iv, q[0], q[1], q[2])));
    }
}

#[test]
fn shape_counts_are_catalan() {
    let counts: Vec<usize> = (1..=7).map(|n| Shape::all(n).len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 5, 14, 42, 132]);
}

#[test]
fn generator_examples() {
    let lo = gen(Kind::Lo, 4, 0).unwrap();
    assert_eq!(lo.relation(0).tuples(), linear_order(4).relation(0).tuples());
    let t = BinaryTree::from_shape(&Shape::parse("((a,b),(c,d))").unwrap());
    let cod = cod_from_tree(&t);
    let d = cod.rel_index("D").unwrap();
    assert!(cod.holds(d, &[0, 1, 2, 3]));
    assert!(!cod.holds(d, &[0, 2, 1, 3]));
    assert!(gen(Kind::Cod, 2, 0).is_err());
    assert_eq!("oh3".parse::<Kind>().unwrap(), Kind::Oh(3));
    assert_eq!("coD".parse::<Kind>().unwrap(), Kind::Cod);
    assert!("xy".parse::<Kind>().is_err());
    // Same seed, same structure.
    assert_eq!(gen(Kind::Og, 7, 3).unwrap().to_json_string(), gen(Kind::Og, 7, 3).unwrap().to_json_string());
}

#[test]
fn generated_instances_satisfy_their_axioms() {
    for kind in [Kind::Lo, Kind::Co, Kind::Og, Kind::Oh(3), Kind::Oc, Kind::Cod] {
        let suite = axioms::axioms(kind);
        for seed in 0..24u64 {
            let m = gen(kind, 3 + (seed as usize % 8), seed).unwrap();
            for r in suite.check(&m).unwrap() {
                assert!(r.holds, "{kind} seed {seed} fails {}: {:?}", r.axiom, r.witness);
            }
        }
    }
}

#[test]
fn tree_relations_satisfy_c_and_d_axioms() {
    let c = axioms::c_relation();
    let d = axioms::d_relation();
    for s in all_shapes(6) {
        let t = BinaryTree::from_shape(&s);
        assert!(c.holds(&oc_from_tree(&t).reduct(&["C"]).unwrap()).unwrap());
        assert!(d.holds(&d_from_tree(&t)).unwrap());
    }
}

#[test]
fn axiom_suites_reject_broken_instances() {
    let mut lo = linear_order(4);
    lo.insert(0, &[3, 0]).unwrap();
    let rep = axioms::axioms(Kind::Lo).check(&lo).unwrap();
    assert!(rep.iter().any(|r| !r.holds && r.axiom == "transitive"));
    // K3 read as a ternary relation on distinct triples.
    let mut sig = Signature::one_sorted();
    sig.add_relation("C", vec![0, 0, 0]).unwrap();
    let mut k3 = Structure::one_sorted("K3c", sig, 3).unwrap();
    let mut t = Vec::new();
    for_each_tuple(3, 3, |x| {
        if x[0] != x[1] && x[1] != x[2] && x[0] != x[2] {
            t.push(x.to_vec());
        }
    });
    k3.set_relation(0, t).unwrap();
    let rep = axioms::c_relation().check(&k3).unwrap();
    let c2 = rep.iter().find(|r| r.axiom == "c2").unwrap();
    assert!(!c2.holds);
    let w = c2.witness.as_ref().unwrap();
    assert_eq!(w.len(), 3);
}

#[test]
fn scrambled_cyclic_order_breaks_convexity() {
    let cod = gen(Kind::Cod, 8, 42).unwrap();
    let perm = [0usize, 5, 2, 7, 1, 6, 3, 4];
    let co: Vec<Vec<usize>> = cod.relation(1).tuples().iter().map(|t| t.iter().map(|&x| perm[x]).collect()).collect();
    let mut bad = cod.clone();
    bad.set_relation(1, co).unwrap();
    let rep = axioms::axioms(Kind::Cod).check(&bad).unwrap();
    let convex = rep.iter().find(|r| r.axiom == "convex").unwrap();
    assert!(!convex.holds);
    let names: Vec<&str> = convex.witness.as_ref().unwrap().iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, vec!["x", "a", "b", "c"]);
    // The cyclic order itself is still fine.
    assert!(rep.iter().filter(|r| r.axiom.starts_with("CO")).all(|r| r.holds));
}

#[test]
fn d_c_round_trip_on_all_small_trees() {
    for s in all_shapes(6) {
        let d = d_from_tree(&BinaryTree::from_shape(&s));
        for a in 0..d.len() {
            let (c, kept) = d_to_c_pointed(&d, a).unwrap();
            assert!(axioms::c_relation().holds(&c).unwrap());
            let back = c_to_d(&c).unwrap();
            // New point n-1 stands for a; the rest follow `kept`.
            let mut ids = kept.clone();
            ids.push(a);
            let relabelled: Vec<Vec<usize>> =
                back.relation(0).tuples().iter().map(|t| t.iter().map(|&x| ids[x]).collect()).collect();
            let mut expect = d.relation(0).tuples().to_vec();
            let mut got = relabelled;
            expect.sort();
            got.sort();
            assert_eq!(got, expect, "{s:?} at {a}");
        }
    }
}

#[test]
fn ordered_d_to_c_agrees_with_pointing_and_the_definition() {
    let def = parse("forall a. exists b. (b <= a & D(b, x, y, z))").unwrap();
    for s in all_shapes(6) {
        let t = BinaryTree::from_shape(&s);
        let od = cut_cyclic_order(&cod_from_tree(&t), 0).unwrap();
        assert!(axioms::ordered_d_relation().holds(&od).unwrap(), "{s:?}");
        let (oc, m, kept) = od_to_oc(&od).unwrap();
        assert_eq!(m, 0);
        assert!(axioms::axioms(Kind::Oc).holds(&oc).unwrap(), "{s:?}");
        let (c0, kept0) = d_to_c_pointed(&od.reduct(&["D"]).unwrap(), m).unwrap();
        assert_eq!(kept, kept0);
        assert_eq!(oc.relation(0).tuples(), c0.relation(0).tuples());
        // The quantified definition gives the same triples away from m.
        let with = add_defined_relation(&od, "Cdef", &def).unwrap();
        let cdef = with.relation_by_name("Cdef").unwrap();
        for_each_tuple(kept.len(), 3, |q| {
            let orig: Vec<usize> = q.iter().map(|&i| kept[i]).collect();
            assert_eq!(cdef.contains(&orig), oc.holds(0, q));
        });
    }
}

#[test]
fn literal_order_convexity_fails_on_a_planar_order() {
    // Leaves w < x < y < z with cherries {x, y} and {w, z}: the tree ((w, (x, y)), z)
    // puts x, y in a cherry; w and z hang off the path to the root.
    let t = BinaryTree::from_shape(&Shape::parse("((w,(x,y)),z)").unwrap());
    let od = cut_cyclic_order(&cod_from_tree(&t), 0).unwrap();
    let literal = AxiomSuite::parse(
        "literal",
        "[convex]\nforall x. forall y. forall z. forall w. x <= y & x <= z & D(x, y; z, w) -> (x < z & x < w & y < z & y < w) | (x < z & x < w & z < y & w < y)",
    )
    .unwrap();
    assert!(!literal.holds(&od).unwrap());
    assert!(axioms::ordered_d_relation().holds(&od).unwrap());
}

#[test]
fn claim_holds_on_cod_instances() {
    let claim = parse(
        "forall a. forall b. forall c. forall x.
           a != b & a != c & a != x & b != c & b != x & c != x & CO(a, b, c) & D(x, a; b, c)
           -> (D(x, a; b, c) & CO(c, x, a)) | (D(b, c; a, x) & CO(a, x, b))",
    )
    .unwrap();
    for n in 3..=10 {
        for seed in 0..6 {
            let m = gen(Kind::Cod, n, seed).unwrap();
            assert!(claim.compile(m.signature()).unwrap().holds(&m).unwrap());
        }
    }
}

#[test]
fn small_d_lemma_on_ordered_instances() {
    let lemma = parse(
        "forall x. forall x'. forall x''. forall y. forall z. forall w.
           x'' <= x' & x' <= x & x <= y & x <= z & D(x, y; z, w) & D(x'', y; z, w) -> D(x', y; z, w)",
    )
    .unwrap();
    for n in 3..=8 {
        for seed in 0..5 {
            let od = cut_cyclic_order(&gen(Kind::Cod, n, seed).unwrap(), 0).unwrap();
            let c = lemma.compile(od.signature()).unwrap();
            assert_eq!(c.counterexample(&od).unwrap(), None, "n={n} seed={seed}");
        }
    }
}

#[test]
fn literal_systems() {
    let m = gen(Kind::Cod, 8, 1).unwrap();
    // CO(2, x, 4) pins x to 3.
    let s = LiteralSystem { p: vec![(2, 4)], q: vec![2, 4], ..Default::default() };
    let r = solve_literal_system(&m, &s).unwrap();
    assert_eq!(r.solution, Some(3));
    let s = LiteralSystem { p: vec![(2, 4)], q: vec![2, 3, 4], ..Default::default() };
    let r = solve_literal_system(&m, &s).unwrap();
    assert_eq!(r.solution, None);
    // The density criterion predicts a solution that a finite model lacks.
    assert!(r.density_criterion && !r.criterion_agrees);
    let malformed = LiteralSystem { p: vec![(2, 4)], q: vec![2], ..Default::default() };
    assert!(solve_literal_system(&m, &malformed).is_err());
}

fn cod_instance() -> impl Strategy<Value = Structure> {
    (3usize..=9, any::<u64>()).prop_map(|(n, s)| gen(Kind::Cod, n, s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn full_solutions_solve_the_reduced_system(m in cod_instance(), picks in prop::collection::vec(0usize..9, 2..7), sides in prop::collection::vec(any::<bool>(), 6)) {
        let n = m.len();
        let co = m.rel_index("CO").unwrap();
        let pts: Vec<usize> = picks.iter().map(|p| p % n).collect();
        let mut s = LiteralSystem::default();
        for w in pts.windows(2) {
            if w[0] != w[1] {
                s.p.push((w[0], w[1]));
            }
        }
        for (k, w) in pts.windows(3).enumerate() {
            if m.holds(co, &[w[0], w[1], w[2]]) {
                if sides[k % sides.len()] {
                    s.l.push((w[0], w[1], w[2]));
                } else {
                    s.r.push((w[0], w[1], w[2]));
                }
            }
        }
        s.q = pts.clone();
        s.q.sort();
        s.q.dedup();
        let r = solve_literal_system(&m, &s).unwrap();
        if let Some(x) = r.solution {
            prop_assert!(r.reduced_solution.is_some_and(|y| y <= x));
        }
        prop_assert_eq!(r.reduction_agrees, r.solution.is_some() == r.reduced_solution.is_some());
    }

    #[test]
    fn isomorphic_generators_for_same_shape(n in 1usize..7, seed in any::<u64>()) {
        let a = gen(Kind::Oc, n, seed).unwrap();
        let b = gen(Kind::Oc, n, seed).unwrap();
        prop_assert!(are_isomorphic(&a, &b).unwrap());
    }
}

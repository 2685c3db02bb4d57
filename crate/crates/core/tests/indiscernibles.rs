use std::collections::{HashMap, HashSet};

use finmodel::classes::{age, generate};
use finmodel::error::Error;
use finmodel::indiscernibles::*;
use finmodel::logic::{evaluate, parse};
use finmodel::products::{full_product, lex_sum, with_rib_types};
use finmodel::relzoo::{cod_from_tree, gen, oc_from_tree, BinaryTree, Kind, Shape};
use finmodel::structures::build::*;
use finmodel::structures::{automorphism_group, canonical_form, for_each_tuple, Elem, Signature, Structure};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Brute-force oracles, written against the raw relations only.

/// Equalities and atomic facts among the entries of `t`.
fn diagram(m: &Structure, t: &[usize]) -> Vec<bool> {
    let mut d = Vec::new();
    for a in t {
        for b in t {
            d.push(a == b);
        }
    }
    for (r, sym) in m.signature().relations().iter().enumerate() {
        for_each_tuple(t.len(), sym.arity(), |p| {
            let args: Vec<usize> = p.iter().map(|&q| t[q]).collect();
            d.push(m.holds(r, &args));
        });
    }
    d
}

/// All index tuples with repetition, lengths up to `|I|`.
fn naive_indiscernible(index: &Structure, target: &Structure, map: &[Vec<usize>]) -> bool {
    let n = index.len();
    for len in 1..=n {
        let mut seen: HashMap<Vec<bool>, Vec<bool>> = HashMap::new();
        let mut ok = true;
        for_each_tuple(n, len, |t| {
            let img: Vec<usize> = t.iter().flat_map(|&i| map[i].iter().copied()).collect();
            let want = diagram(target, &img);
            ok &= *seen.entry(diagram(index, t)).or_insert_with(|| want.clone()) == want;
        });
        if !ok {
            return false;
        }
    }
    true
}

fn all_maps(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_tuple(t, n, |m| out.push(m.to_vec()));
    out
}

fn singletons(map: &[usize]) -> Vec<Vec<usize>> {
    map.iter().map(|&x| vec![x]).collect()
}

fn find(p: &mut [usize], x: usize) -> usize {
    if p[x] != x {
        let r = find(p, p[x]);
        p[x] = r;
    }
    p[x]
}

/// Every assignment on `{0,1} x I` spelled out edge by edge.
fn naive_reasonable(m: &Structure) -> bool {
    let n = m.len();
    let mut types: Vec<Vec<bool>> = Vec::new();
    let ty = |i: usize, j: usize, types: &mut Vec<Vec<bool>>| {
        let d = diagram(m, &[i, j]);
        match types.iter().position(|t| *t == d) {
            Some(p) => p,
            None => {
                types.push(d);
                types.len() - 1
            }
        }
    };
    let mut keys: Vec<(usize, u8, u8)> = Vec::new();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for e0 in 0..2u8 {
                for e1 in 0..2u8 {
                    if i == j && e0 == e1 {
                        continue;
                    }
                    let key = (ty(i, j, &mut types), e0, e1);
                    let conv = (ty(j, i, &mut types), e1, e0);
                    let c = match keys.iter().position(|k| *k == key || *k == conv) {
                        Some(c) => c,
                        None => {
                            keys.push(key);
                            keys.len() - 1
                        }
                    };
                    edges.push((c, e0 as usize * n + i, e1 as usize * n + j));
                }
            }
        }
    }
    (0..1u64 << keys.len()).all(|mask| {
        let on: Vec<&(usize, usize, usize)> = edges.iter().filter(|e| mask >> e.0 & 1 == 1).collect();
        let mut p: Vec<usize> = (0..2 * n).collect();
        for &&(_, a, b) in &on {
            let (x, y) = (find(&mut p, a), find(&mut p, b));
            p[x] = y;
        }
        let root = find(&mut p, 0);
        let connected = (0..2 * n).all(|v| find(&mut p, v) == root);
        let in_c = on.iter().all(|&&(_, a, b)| a % n == b % n);
        let in_d = on.iter().all(|&&(_, a, b)| a / n == b / n);
        connected || in_c || in_d
    })
}

fn is_automorphism(m: &Structure, p: &[usize]) -> bool {
    m.signature().relations().iter().enumerate().all(|(r, _)| {
        m.relation(r).tuples().iter().all(|t| m.holds(r, &t.iter().map(|&x| p[x]).collect::<Vec<_>>()))
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    injective_tuples(n, n, &mut |t: &[usize]| out.push(t.to_vec()));
    out
}

/// Tries every equivalence relation against every automorphism.
fn naive_primitive(m: &Structure) -> bool {
    let n = m.len();
    let auts: Vec<Vec<usize>> = permutations(n).into_iter().filter(|p| is_automorphism(m, p)).collect();
    let mut blocks = vec![0usize; n];
    fn go(n: usize, at: usize, top: usize, blocks: &mut [usize], auts: &[Vec<usize>]) -> bool {
        if at == n {
            if top == 1 || top == n {
                return true;
            }
            return !auts.iter().all(|p| {
                (0..n).all(|x| (0..n).all(|y| (blocks[x] == blocks[y]) == (blocks[p[x]] == blocks[p[y]])))
            });
        }
        (0..=top.min(n - 1)).all(|b| {
            blocks[at] = b;
            go(n, at + 1, top.max(b + 1), blocks, auts)
        })
    }
    go(n, 0, 0, &mut blocks, &auts)
}

fn og(n: usize, e: &[(usize, usize)]) -> Structure {
    let mut m = Structure::one_sorted(format!("og{n}"), Kind::Og.signature(), n).unwrap();
    m.set_relation(0, finmodel::structures::subsets(n, 2)).unwrap();
    let mut t = Vec::new();
    for &(a, b) in e {
        t.push(vec![a, b]);
        t.push(vec![b, a]);
    }
    m.set_relation(1, t).unwrap();
    m
}

/// A reflexive equivalence relation `E` whose classes are given in order.
fn with_equivalence(m: &Structure, classes: &[Vec<usize>]) -> Structure {
    let mut t = Vec::new();
    for c in classes {
        for &a in c {
            for &b in c {
                t.push(vec![a, b]);
            }
        }
    }
    m.with_relation("E", vec![0, 0], t).unwrap()
}

fn equivalence(classes: &[Vec<usize>]) -> Structure {
    let n = classes.iter().map(Vec::len).sum();
    with_equivalence(&pure_set(n), classes)
}

fn reasonable_indices() -> Vec<Structure> {
    vec![pure_set(1), pure_set(3), complete_graph(3), empty_graph(3), gen(Kind::Co, 3, 0).unwrap()]
}

fn small_structures() -> Vec<Structure> {
    vec![
        pure_set(1),
        pure_set(2),
        linear_order(2),
        complete_graph(2),
        empty_graph(2),
        pure_set(3),
        linear_order(3),
        path_graph(3),
        complete_graph(3),
        graph("K2+K1", 3, &[(0, 1)]),
    ]
}

// Sequences.

#[test]
fn constant_sequences_are_indiscernible() {
    for m in [linear_order(4), cycle_graph(5), gen(Kind::Oc, 5, 3).unwrap()] {
        for index in [linear_order(4), cycle_graph(4), pure_set(3)] {
            for x in 0..m.len() {
                let s = IndexedSequence::from_main(index.clone(), m.clone(), vec![vec![x]; index.len()]).unwrap();
                assert!(is_indiscernible(&s).unwrap().indiscernible);
                assert!(is_indiscernible(&s.clone().with_mode(Pattern::Orbit)).unwrap().indiscernible);
            }
        }
    }
}

#[test]
fn identity_chain() {
    let c = linear_order(3);
    let s = IndexedSequence::from_main(c.clone(), c.clone(), singletons(&[0, 1, 2])).unwrap();
    let r = is_indiscernible(&s).unwrap();
    assert!(r.indiscernible && r.witness.is_none());
    let s = IndexedSequence::from_main(c.clone(), c, singletons(&[0, 2, 1])).unwrap();
    let r = is_indiscernible(&s).unwrap();
    // (0,1) and (1,2) are both increasing; their images are not.
    assert_eq!(r.witness, Some(Violation { first: vec![0, 1], second: vec![1, 2] }));
}

#[test]
fn minimal_witness_comes_first_by_arity() {
    // Unary images already differ.
    let m = linear_order(3).with_relation("P", vec![0], vec![vec![2]]).unwrap();
    let s = IndexedSequence::from_main(pure_set(3), m, singletons(&[0, 1, 2])).unwrap();
    assert_eq!(is_indiscernible(&s).unwrap().witness, Some(Violation { first: vec![0], second: vec![2] }));
}

#[test]
fn orbit_mode_on_a_transitive_target() {
    let c5 = cycle_graph(5);
    let idx = pure_set(2);
    let s = IndexedSequence::from_main(idx.clone(), c5.clone(), singletons(&[0, 1])).unwrap().with_mode(Pattern::Orbit);
    assert!(is_indiscernible(&s).unwrap().indiscernible);
    // 0-1 is an edge but 1-0 is the same orbit: symmetric pairs agree.
    let s = IndexedSequence::from_main(idx, c5.clone(), singletons(&[0, 2])).unwrap().with_mode(Pattern::Orbit);
    assert!(is_indiscernible(&s).unwrap().indiscernible);
    let s = IndexedSequence::from_main(linear_order(3), c5, singletons(&[0, 1, 3])).unwrap().with_mode(Pattern::Orbit);
    assert!(!is_indiscernible(&s).unwrap().indiscernible);
}

#[test]
fn malformed_sequences_are_rejected() {
    assert!(IndexedSequence::from_main(pure_set(3), pure_set(2), singletons(&[0, 1])).is_err());
    assert!(IndexedSequence::from_main(pure_set(2), pure_set(2), vec![vec![0], vec![0, 1]]).is_err());
    assert!(IndexedSequence::from_main(pure_set(2), pure_set(2), singletons(&[0, 2])).is_err());
}

#[test]
fn agrees_with_brute_force_on_small_targets() {
    let mut checked = 0;
    for index in small_structures() {
        for m in small_structures() {
            for map in all_maps(index.len(), m.len()) {
                let s = IndexedSequence::from_main(index.clone(), m.clone(), singletons(&map)).unwrap();
                assert_eq!(
                    is_indiscernible(&s).unwrap().indiscernible,
                    naive_indiscernible(&index, &m, &singletons(&map)),
                    "{} into {} by {map:?}",
                    index.name(),
                    m.name()
                );
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 1112);
}

#[test]
fn pairs_of_coordinates() {
    let c = linear_order(4);
    let idx = linear_order(3);
    let up = vec![vec![0, 1], vec![1, 2], vec![2, 3]];
    let s = IndexedSequence::from_main(idx.clone(), c.clone(), up.clone()).unwrap();
    assert!(!is_indiscernible(&s).unwrap().indiscernible);
    assert!(!naive_indiscernible(&idx, &c, &up));
    let apart = vec![vec![0, 3], vec![1, 3], vec![2, 3]];
    let s = IndexedSequence::from_main(idx.clone(), c.clone(), apart.clone()).unwrap();
    assert!(is_indiscernible(&s).unwrap().indiscernible);
    assert!(naive_indiscernible(&idx, &c, &apart));
}

/// The 3-by-4 version of the counterexample in which a sequence indexed by
/// the sum itself forgets its second equivalence relation.
#[test]
fn sum_indexed_sequence_loses_indiscernibility_in_its_reduct() {
    let n = equivalence(&[vec![0, 1], vec![2, 3]]);
    let ribs = vec![n.clone(), n.clone(), n];
    let sum = lex_sum(&pure_set(3), &ribs).unwrap();
    let sig = Signature::relational(&[("E1", 2), ("E2", 2)]);
    let mut j = Structure::one_sorted("J", sig, 12).unwrap();
    let same = |q: usize| -> Vec<Vec<usize>> {
        let mut t = Vec::new();
        for x in 0..12 {
            for y in 0..12 {
                if x / q == y / q {
                    t.push(vec![x, y]);
                }
            }
        }
        t
    };
    j.set_relation(0, same(4)).unwrap();
    j.set_relation(1, same(2)).unwrap();
    let i = j.reduct(&["E1"]).unwrap();
    let identity: Vec<usize> = (0..12).collect();

    let by_j = IndexedSequence::from_main(j.clone(), sum.clone(), singletons(&identity)).unwrap();
    assert!(is_indiscernible(&by_j).unwrap().indiscernible);
    let by_i = IndexedSequence::from_main(i.clone(), sum.clone(), singletons(&identity)).unwrap();
    let r = is_indiscernible(&by_i).unwrap();
    assert!(!r.indiscernible);
    let w = r.witness.unwrap();
    // Two E1-related pairs, one inside an E2-class and one across.
    assert_eq!(w.first.len(), 2);
    assert_eq!(w.first[0] / 4, w.first[1] / 4);
    assert_eq!(w.second[0] / 4, w.second[1] / 4);
    assert_ne!(w.first[0] / 2 == w.first[1] / 2, w.second[0] / 2 == w.second[1] / 2);

    assert!(!is_reasonable(&i).unwrap().reasonable);
    assert!(!is_primitive(&i).unwrap().primitive);
    // The spine part on its own is fine: v agrees exactly on E1-classes.
    let enriched = with_rib_types(&sum, &ribs).unwrap();
    let spine = enriched.sort_restriction(enriched.signature().sort_index("spine").unwrap()).unwrap();
    let s = IndexedSequence::from_main(i, enriched, singletons(&identity)).unwrap();
    let parts = lex_parts(&s, &spine, &ribs).unwrap();
    assert!(is_indiscernible(&parts.spine).unwrap().indiscernible);
    assert!(parts.types_constant);
    let v = lex_verdict(&s, &spine, &ribs).unwrap();
    assert!(!v.indiscernible && !v.part_a);
}

// Products.

#[test]
fn full_product_verdict_is_the_conjunction_of_its_projections() {
    let mut seen = [0u64; 2];
    let factors = small_structures();
    for index in small_structures() {
        for m1 in &factors {
            for m2 in &factors {
                let p = full_product(m1, m2).unwrap();
                let w = m2.len();
                for map in all_maps(index.len(), m1.len() * w) {
                    let s = IndexedSequence::from_main(index.clone(), p.clone(), singletons(&map)).unwrap();
                    let left: Vec<usize> = map.iter().map(|x| x / w).collect();
                    let right: Vec<usize> = map.iter().map(|x| x % w).collect();
                    let want = naive_indiscernible(&index, m1, &singletons(&left))
                        && naive_indiscernible(&index, m2, &singletons(&right));
                    let got = is_indiscernible(&s).unwrap().indiscernible;
                    assert_eq!(got, want, "{} into {} x {} by {map:?}", index.name(), m1.name(), m2.name());
                    seen[got as usize] += 1;
                }
            }
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0);
}

#[test]
fn projections_match_coordinates() {
    let (m1, m2) = (linear_order(3), cycle_graph(4));
    let p = full_product(&m1, &m2).unwrap();
    let map = vec![vec![0, 5], vec![11, 7]];
    let s = IndexedSequence::from_main(pure_set(2), p, map).unwrap();
    let (a, b) = project(&s, &m1, &m2).unwrap();
    let ids = |s: &IndexedSequence| -> Vec<Vec<usize>> { s.map.iter().map(|t| t.iter().map(|e| e.id).collect()).collect() };
    assert_eq!(ids(&a), vec![vec![0, 1], vec![2, 1]]);
    assert_eq!(ids(&b), vec![vec![0, 1], vec![3, 3]]);
    assert!(project(&a, &m1, &m2).is_err());
}

struct LexCase {
    sum: Structure,
    spine: Structure,
    ribs: Vec<Structure>,
    fibre_of: Vec<usize>,
}

fn lex_case(spine: &Structure, ribs: Vec<Structure>) -> LexCase {
    let sum = with_rib_types(&lex_sum(spine, &ribs).unwrap(), &ribs).unwrap();
    let enriched = sum.sort_restriction(sum.signature().sort_index("spine").unwrap()).unwrap();
    let fibre_of = ribs.iter().enumerate().flat_map(|(a, r)| std::iter::repeat_n(a, r.len())).collect();
    LexCase { sum, spine: enriched, ribs, fibre_of }
}

fn rib_choices(spine: usize, pool: &[Structure]) -> Vec<Vec<Structure>> {
    all_maps(spine, pool.len()).into_iter().map(|c| c.iter().map(|&r| pool[r].clone()).collect()).collect()
}

/// Runs both parts of the lexicographic characterisation on every map.
fn check_lex(index: &Structure, case: &LexCase, k: usize) -> [u64; 2] {
    let n = case.sum.size(0);
    let coded = all_maps(k, n);
    let mut tally = [0u64; 2];
    for code in all_maps(index.len(), coded.len()) {
        let map: Vec<Vec<usize>> = code.iter().map(|&c| coded[c].clone()).collect();
        let s = IndexedSequence::from_main(index.clone(), case.sum.clone(), map.clone()).unwrap();
        let v = lex_verdict(&s, &case.spine, &case.ribs).unwrap();
        assert_eq!(v.indiscernible, v.components, "{} in {} by {map:?}", index.name(), case.sum.name());
        if v.indiscernible {
            // Part (A), straight from the fibre map.
            for c in 0..k {
                let col: Vec<usize> = map.iter().map(|t| case.fibre_of[t[c]]).collect();
                let meets = (0..col.len()).any(|i| (i + 1..col.len()).any(|j| col[i] == col[j]));
                if meets {
                    assert!(col.iter().all(|&a| a == col[0]), "{} in {} by {map:?}", index.name(), case.sum.name());
                }
            }
            assert!(v.part_a);
            let spine_map: Vec<Vec<usize>> =
                map.iter().map(|t| t.iter().map(|&x| case.fibre_of[x]).collect()).collect();
            assert!(naive_indiscernible(index, &case.spine, &spine_map));
        }
        tally[v.indiscernible as usize] += 1;
    }
    tally
}

fn lex_spines() -> Vec<Structure> {
    let mut v = vec![pure_set(1), pure_set(2), linear_order(2), complete_graph(2), pure_set(3), linear_order(3)];
    v.extend(generate("graphs", 3).unwrap().members().iter().filter(|g| g.len() == 3).cloned());
    v
}

#[test]
fn lex_sum_characterisation_single_coordinates() {
    let pool = vec![empty_graph(1), empty_graph(2), complete_graph(2)];
    let mut tally = [0u64; 2];
    for index in reasonable_indices() {
        assert!(is_reasonable(&index).unwrap().reasonable);
        for spine in lex_spines() {
            for ribs in rib_choices(spine.len(), &pool) {
                let t = check_lex(&index, &lex_case(&spine, ribs), 1);
                tally[0] += t[0];
                tally[1] += t[1];
            }
        }
    }
    assert!(tally[0] > 0 && tally[1] > 0);
}

#[test]
fn lex_sum_characterisation_pairs() {
    let pool = vec![empty_graph(1), empty_graph(2), complete_graph(2)];
    for index in [pure_set(3), complete_graph(3), gen(Kind::Co, 3, 0).unwrap()] {
        for spine in [pure_set(2), linear_order(2)] {
            for ribs in rib_choices(2, &pool) {
                if ribs.iter().map(Structure::len).sum::<usize>() <= 3 {
                    check_lex(&index, &lex_case(&spine, ribs), 2);
                }
            }
        }
    }
}

#[test]
fn lex_parts_split_coordinates() {
    let ribs = vec![complete_graph(2), empty_graph(2)];
    let case = lex_case(&linear_order(2), ribs);
    // Coordinate 0 stays in fibre 0, coordinate 1 moves along the spine.
    let map = vec![vec![0, 1], vec![1, 3]];
    let s = IndexedSequence::from_main(linear_order(2), case.sum.clone(), map).unwrap();
    let parts = lex_parts(&s, &case.spine, &case.ribs).unwrap();
    assert_eq!(parts.constant, vec![Some(0), None]);
    assert_eq!(parts.fibres.len(), 1);
    let (a, f) = &parts.fibres[0];
    assert_eq!(*a, 0);
    assert_eq!(f.map, vec![vec![Elem::main(0)], vec![Elem::main(1)]]);
    assert_eq!(parts.spine.map[1], vec![Elem::main(0), Elem::main(1)]);
}

// Collapse.

#[test]
fn ordered_path_template_collapses_to_its_order() {
    let i = og(4, &[(0, 1), (1, 2), (2, 3)]);
    let j = i.reduct(&["<"]).unwrap();
    let r = collapse_scan(&i, &j, &linear_order(6), &ScanOptions::default()).unwrap();
    assert!(r.collapses);
    assert_eq!(r.maps, 6u64.pow(4));
    assert_eq!(r.maps, r.by_image_size.iter().map(|c| c.maps).sum::<u64>());
    assert!(r.indiscernible > 0);
    assert_eq!(r.scale, "no uncollapsed witnesses among all maps with |I| = 4, |M| = 6, k = 1");
}

/// Not every ordered-graph template collapses into a chain: a complete
/// bipartite edge set can be read off from equalities alone.
#[test]
fn bipartite_ordered_template_does_not_collapse() {
    let i = og(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]);
    let j = i.reduct(&["<"]).unwrap();
    let m = linear_order(6);
    let r = collapse_scan(&i, &j, &m, &ScanOptions::default()).unwrap();
    assert!(!r.collapses);
    let naive = all_maps(4, 6)
        .into_iter()
        .filter(|f| naive_indiscernible(&i, &m, &singletons(f)) && !naive_indiscernible(&j, &m, &singletons(f)))
        .count();
    assert_eq!(r.uncollapsed, naive as u64);
    assert_eq!(r.uncollapsed, 60);
    for w in &r.witnesses {
        assert!(naive_indiscernible(&i, &m, &w.map));
        assert!(!naive_indiscernible(&j, &m, &w.map));
        // Non-edges inside a side move alike; edges across go up.
        let a: Vec<usize> = w.map.iter().map(|t| t[0]).collect();
        assert_eq!(a[0] < a[1], a[2] < a[3]);
        assert!(a[0].max(a[1]) < a[2].min(a[3]));
    }
}

#[test]
fn tree_templates_collapse_on_ordered_graphs() {
    let targets = generate("ordered_graphs", 5).unwrap();
    for shape in Shape::all(4) {
        let i = oc_from_tree(&BinaryTree::from_shape(&shape));
        let j = i.reduct(&["<"]).unwrap();
        for m in targets.members() {
            assert!(collapse_scan(&i, &j, m, &ScanOptions::default()).unwrap().collapses, "{shape:?} into {}", m.name());
        }
    }
}

#[test]
fn tree_templates_collapse_on_sampled_six_point_ordered_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let i = oc_from_tree(&BinaryTree::from_shape(&Shape::all(4)[2]));
    let j = i.reduct(&["<"]).unwrap();
    for _ in 0..40 {
        let mask: u64 = rng.gen_range(0..1 << 15);
        let m = og(6, &edges(&graph_from_mask(6, mask)));
        assert!(collapse_scan(&i, &j, &m, &ScanOptions::default()).unwrap().collapses, "mask {mask}");
    }
}

#[test]
fn cyclic_tree_inclusion_is_uncollapsed() {
    for shape in Shape::all(4) {
        let i = cod_from_tree(&BinaryTree::from_shape(&shape));
        let j = i.reduct(&["CO"]).unwrap();
        let r = collapse_scan(&i, &j, &i, &ScanOptions::default()).unwrap();
        assert!(!r.collapses);
        let w = &r.witnesses[0];
        assert!(naive_indiscernible(&i, &i, &w.map));
        assert!(!naive_indiscernible(&j, &i, &w.map));
    }
}

fn nary_templates() -> Vec<Structure> {
    let mut v = Vec::new();
    for n in 3..=4 {
        for s in Shape::all(n) {
            v.push(oc_from_tree(&BinaryTree::from_shape(&s)));
            v.push(cod_from_tree(&BinaryTree::from_shape(&s)));
        }
        v.push(gen(Kind::Co, n, 0).unwrap());
        for seed in 0..3 {
            v.push(gen(Kind::Oh(3), n, seed).unwrap());
        }
    }
    v
}

#[test]
fn nary_templates_collapse_to_their_binary_part() {
    let mut targets: Vec<Structure> = generate("graphs", 4).unwrap().members().to_vec();
    targets.extend([linear_order(5), directed_cycle(5), cycle_graph(6)]);
    for t in nary_templates() {
        let i = irreflexive_version(&t).unwrap();
        let j = arity_reduct(&i, 2).unwrap();
        for m in &targets {
            let r = collapse_scan(&i, &j, m, &ScanOptions::default()).unwrap();
            assert!(r.collapses, "{} into {}: {:?}", t.name(), m.name(), r.witnesses.first());
        }
    }
}

#[test]
fn irreflexive_version_keeps_types() {
    let m = gen(Kind::Oc, 4, 1).unwrap().with_relation("T", vec![0, 0, 0], vec![vec![0, 0, 1], vec![2, 2, 2]]).unwrap();
    let irr = irreflexive_version(&m).unwrap();
    assert_eq!(irr.name(), format!("{}_irr", m.name()));
    for r in irr.signature().relations() {
        let rel = irr.relation_by_name(&r.name).unwrap();
        assert!(rel.tuples().iter().all(|t| t.iter().collect::<HashSet<_>>().len() == t.len()));
    }
    assert_eq!(irr.relation_by_name("T_001").unwrap().tuples(), &[vec![0, 1]]);
    assert_eq!(irr.relation_by_name("T_000").unwrap().tuples(), &[vec![2]]);
    for len in 1..=4 {
        let mut classes: HashMap<Vec<bool>, Vec<bool>> = HashMap::new();
        for_each_tuple(4, len, |t| {
            let a = diagram(&m, t);
            let b = diagram(&irr, t);
            assert_eq!(*classes.entry(a).or_insert_with(|| b.clone()), b);
        });
    }
    let le2 = arity_reduct(&irr, 2).unwrap();
    assert!(le2.signature().relations().iter().all(|r| r.arity() <= 2));
    assert!(le2.relation_by_name("T_001").is_some() && le2.relation_by_name("T").is_none());
}

#[test]
fn exhaustive_scans_respect_the_budget() {
    let opts = ScanOptions { budget: 1000, ..ScanOptions::default() };
    let e = collapse_scan(&linear_order(4), &pure_set(4), &linear_order(6), &opts).unwrap_err();
    assert!(matches!(e, Error::Budget { .. }));
    assert!(collapse_scan(&linear_order(3), &pure_set(4), &linear_order(6), &ScanOptions::default()).is_err());
}

#[test]
fn sampled_scans_are_reproducible() {
    let i = og(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]);
    let j = i.reduct(&["<"]).unwrap();
    let m = cycle_graph(7);
    let opts = ScanOptions { mode: ScanMode::Sample { count: 3000, seed: 11 }, ..ScanOptions::default() };
    let a = collapse_scan(&i, &j, &m, &opts).unwrap();
    let b = collapse_scan(&i, &j, &m, &opts).unwrap();
    assert_eq!(a.maps, 3000);
    assert_eq!(a.by_image_size, b.by_image_size);
    assert_eq!(a.witnesses, b.witnesses);
    let inj = ScanOptions { injective: true, ..opts };
    let c = collapse_scan(&i, &j, &m, &inj).unwrap();
    assert!(c.by_image_size.iter().all(|x| x.size == 4));
}

#[test]
fn pair_terms_in_a_scan() {
    let i = linear_order(3);
    let opts = ScanOptions { k: 2, injective: true, ..ScanOptions::default() };
    let r = collapse_scan(&i, &pure_set(3), &linear_order(3), &opts).unwrap();
    assert_eq!(r.maps, 9 * 8 * 7);
    assert!(!r.collapses);
    for w in &r.witnesses {
        assert!(naive_indiscernible(&i, &linear_order(3), &w.map));
    }
}

// Reasonable and primitive index structures.

#[test]
fn reasonableness_matches_brute_force() {
    let mut fixtures = vec![
        pure_set(1),
        pure_set(2),
        pure_set(3),
        linear_order(2),
        linear_order(4),
        complete_graph(4),
        cycle_graph(5),
        cycle_graph(6),
        directed_cycle(3),
        disjoint_cliques(2, 2),
        equivalence(&[vec![0, 1, 2], vec![3, 4, 5]]),
        gen(Kind::Co, 4, 0).unwrap(),
        gen(Kind::Co, 5, 0).unwrap(),
    ];
    fixtures.push(with_equivalence(&linear_order(6), &[vec![0, 1, 2], vec![3, 4, 5]]));
    for m in &fixtures {
        assert_eq!(is_reasonable(m).unwrap().reasonable, naive_reasonable(m), "{}", m.name());
    }
}

#[test]
fn four_chain_is_not_reasonable() {
    let r = is_reasonable(&linear_order(4)).unwrap();
    assert!(!r.reasonable);
    // One rung class, and over `<` two row classes and two cross classes.
    assert_eq!(r.classes, 5);
    let w = r.witness.unwrap();
    let check = check_assignment(&linear_order(4), |i, j, e0, e1| {
        w.on.iter().any(|c| {
            let same = |a: usize, b: usize| (a < b) == (c.pair[0] < c.pair[1]) && (a == b) == (c.pair[0] == c.pair[1]);
            (same(i, j) && [e0, e1] == c.eps) || (same(j, i) && [e1, e0] == c.eps)
        })
    })
    .unwrap();
    assert!(check.consistent && check.violates());
    assert_eq!(check.mask, Some(w.mask));
}

#[test]
fn convex_equivalence_on_a_chain_is_not_reasonable() {
    let m = with_equivalence(&linear_order(6), &[vec![0, 1, 2], vec![3, 4, 5]]);
    let class = |x: usize| x / 3;
    let check = check_assignment(&m, |i, j, e0, e1| class(i) == class(j) && e0 != e1).unwrap();
    assert!(check.consistent);
    assert!(!check.connected && !check.within_c && !check.within_d);
    assert!(check.violates());
    let r = is_reasonable(&m).unwrap();
    assert!(!r.reasonable && r.violations > 1);
    // A relation that ignores pair types is caught as inconsistent.
    assert!(!check_assignment(&m, |i, j, _, _| i == 0 && j == 1).unwrap().consistent);
}

#[test]
fn single_point_is_reasonable() {
    let r = is_reasonable(&pure_set(1)).unwrap();
    assert!(r.reasonable);
    assert_eq!(r.assignments, 2);
}

#[test]
fn class_budget() {
    let m = gen(Kind::Og, 5, 2).unwrap().with_relation("P", vec![0], vec![vec![0], vec![3]]).unwrap();
    assert!(matches!(is_reasonable_with(&m, 4), Err(Error::Budget { .. })));
}

#[test]
fn primitivity_examples() {
    assert!(is_primitive(&cycle_graph(5)).unwrap().primitive);
    let r = is_primitive(&disjoint_cliques(2, 2)).unwrap();
    assert!(!r.primitive);
    assert_eq!(r.congruence, Some(vec![vec![0, 1], vec![2, 3]]));
    let r = is_primitive(&linear_order(4)).unwrap();
    assert!(!r.primitive);
    assert_eq!(r.pair, Some([0, 1]));
    assert_eq!(r.congruence, Some(vec![vec![0, 1], vec![2], vec![3]]));
}

#[test]
fn primitivity_matches_brute_force() {
    let mut fixtures: Vec<Structure> = generate("graphs", 5).unwrap().members().to_vec();
    fixtures.extend([linear_order(4), directed_cycle(6), hypercube(2), gen(Kind::Co, 6, 0).unwrap(), circulant(6, &[1, 3])]);
    for m in &fixtures {
        assert_eq!(is_primitive(m).unwrap().primitive, naive_primitive(m), "{}", m.name());
    }
}

#[test]
fn homogeneity_examples() {
    for m in [complete_graph(5), empty_graph(4), cycle_graph(5), disjoint_cliques(2, 3), complete_multipartite(3, 2), directed_cycle(3)] {
        assert!(is_homogeneous(&m).unwrap().homogeneous, "{}", m.name());
    }
    for m in [cycle_graph(6), path_graph(3), hypercube(3), gen(Kind::Co, 4, 0).unwrap()] {
        let r = is_homogeneous(&m).unwrap();
        assert!(!r.homogeneous, "{}", m.name());
        let [a, b] = r.witness.unwrap();
        assert_eq!(diagram(&m, &a), diagram(&m, &b));
        let g = automorphism_group(&m).unwrap();
        let ea: Vec<Elem> = a.iter().map(|&x| Elem::main(x)).collect();
        let eb: Vec<Elem> = b.iter().map(|&x| Elem::main(x)).collect();
        assert!(!g.tuple_orbit(&ea).contains(&eb));
    }
}

/// All directed circulants on up to eight points, up to isomorphism.
fn circulant_zoo() -> Vec<Structure> {
    let mut zoo = Vec::new();
    let mut seen = HashSet::new();
    for n in 2..=8usize {
        for mask in 0u32..1 << (n - 1) {
            let jumps: Vec<usize> = (1..n).filter(|d| mask >> (d - 1) & 1 == 1).collect();
            let s = directed_circulant(n, &jumps);
            if seen.insert((n, canonical_form(&s).unwrap().0)) {
                zoo.push(s);
            }
        }
    }
    zoo
}

/// On homogeneous structures every invariant equivalence is quantifier-free
/// definable, so an imprimitive one yields a bad assignment at any size.
#[test]
fn reasonable_homogeneous_structures_are_primitive() {
    let mut count = 0;
    for m in circulant_zoo() {
        if is_homogeneous(&m).unwrap().homogeneous && is_reasonable(&m).unwrap().reasonable {
            assert!(is_primitive(&m).unwrap().primitive, "{}", m.name());
            count += 1;
        }
    }
    assert!(count >= 5);
}

/// The converse fails at finite size when the successor of a prime cycle is
/// invariant: the matching `(0, i) - (1, i + 1)` is disconnected, yet the
/// group has no blocks.
#[test]
fn prime_directed_cycles_are_primitive_but_not_reasonable() {
    let dc3 = directed_cycle(3);
    assert!(is_homogeneous(&dc3).unwrap().homogeneous);
    assert!(is_primitive(&dc3).unwrap().primitive);
    let check = check_assignment(&dc3, |i, j, e0, e1| e0 != e1 && (if e0 == 0 { (i + 1) % 3 == j } else { (j + 1) % 3 == i })).unwrap();
    assert!(check.consistent && check.violates());
    assert!(!is_reasonable(&dc3).unwrap().reasonable);
    for n in [5, 7] {
        let dc = directed_cycle(n);
        assert!(is_primitive(&dc).unwrap().primitive && !is_reasonable(&dc).unwrap().reasonable);
    }
}

/// Without homogeneity an invariant equivalence need not be visible to pair types.
#[test]
fn four_point_cyclic_order_is_reasonable_but_imprimitive() {
    let co4 = gen(Kind::Co, 4, 0).unwrap();
    assert!(is_reasonable(&co4).unwrap().reasonable);
    let p = is_primitive(&co4).unwrap();
    assert!(!p.primitive);
    assert_eq!(p.congruence.unwrap().len(), 2);
    assert!(!is_homogeneous(&co4).unwrap().homogeneous);
}

// Configurations.

#[test]
fn two_chain_configures_in_a_chain() {
    let m = linear_order(6);
    let a = linear_order(2);
    let r = find_configuration(&m, &a, &ConfigOptions::default()).unwrap();
    let c = r.found.unwrap();
    let phi = parse(&c.interpretation[0].formula).unwrap();
    assert!(c.interpretation[0].formula.contains('<'));
    for x in 0..2 {
        for y in 0..2 {
            let got =
                evaluate(&m, &phi, &[("x1", Elem::main(c.map[x][0])), ("x2", Elem::main(c.map[y][0]))]).unwrap();
            assert_eq!(got, x < y);
        }
    }
}

#[test]
fn triangle_does_not_configure_in_a_chain() {
    let opts = ConfigOptions { templates: TemplateSet::Literals, ..ConfigOptions::default() };
    let r = find_configuration(&linear_order(6), &complete_graph(3), &opts).unwrap();
    assert!(r.found.is_none());
    // `x1 < x1` and `x2 < x2` share a table.
    assert_eq!(r.templates_per_symbol, vec![6]);
}

#[test]
fn age_is_coded_by_identity_templates() {
    let m = gen(Kind::Og, 7, 4).unwrap();
    let opts = ConfigOptions { templates: TemplateSet::Identity, ..ConfigOptions::default() };
    for a in age(&m, 3).unwrap().members() {
        let c = find_configuration(&m, a, &opts).unwrap().found.unwrap_or_else(|| panic!("{}", a.name()));
        let image: Vec<usize> = c.map.iter().map(|t| t[0]).collect();
        assert_eq!(diagram(a, &(0..a.len()).collect::<Vec<_>>()), diagram(&m, &image));
    }
    // Something outside the age is not coded.
    let k4 = og(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    let empty = gen(Kind::Og, 5, 0).unwrap().reduct(&["<"]).unwrap().with_relation("E", vec![0, 0], vec![]).unwrap();
    assert!(find_configuration(&empty, &k4, &opts).unwrap().found.is_none());
}

#[test]
fn pairs_code_a_cycle_in_an_order() {
    // Points as pairs: n = 2 lets the order code more than it can alone.
    let opts = ConfigOptions { n: 2, templates: TemplateSet::Literals, ..ConfigOptions::default() };
    let r = find_configuration(&linear_order(3), &linear_order(3), &opts).unwrap();
    let c = r.found.unwrap();
    assert_eq!(c.map.len(), 3);
    assert!(c.map.iter().all(|t| t.len() == 2));
    assert_eq!(c.interpretation[0].vars, vec!["x1_1", "x1_2", "x2_1", "x2_2"]);
}

#[test]
fn configuration_inputs() {
    let p = full_product(&pure_set(2), &pure_set(2)).unwrap();
    assert!(find_configuration(&p, &linear_order(2), &ConfigOptions::default()).is_err());
    let opts = ConfigOptions { n: 0, ..ConfigOptions::default() };
    assert!(find_configuration(&linear_order(3), &linear_order(2), &opts).is_err());
    let tight = ConfigOptions { budget: 3, ..ConfigOptions::default() };
    assert!(matches!(find_configuration(&linear_order(6), &complete_graph(3), &tight), Err(Error::Budget { .. })));
}

// Independence patterns.

fn verify_ip(m: &Structure, rel: &str, w: &IpWitness, d: usize) {
    let r = m.rel_index(rel).unwrap();
    let n = w.a.len();
    let cells = finmodel::structures::grid(&vec![d; n]);
    assert_eq!(w.b.len(), 1 << cells.len());
    let mut seen = HashSet::new();
    for s in &w.b {
        for cell in &cells {
            let mut args = vec![s.b];
            args.extend(cell.iter().enumerate().map(|(j, &i)| w.a[j][i]));
            assert_eq!(m.holds(r, &args), s.cells.contains(cell));
        }
        seen.insert(s.cells.clone());
    }
    assert_eq!(seen.len(), w.b.len());
}

#[test]
fn random_graph_shatters_two_points() {
    let mut found = 0;
    for seed in 0..4 {
        let g = gen(Kind::Og, 24, seed).unwrap().reduct(&["E"]).unwrap();
        let r = find_ip_pattern(&g, "E", 2, &IpOptions::default()).unwrap();
        if let Some(w) = &r.found {
            verify_ip(&g, "E", w, 2);
            let mut all: Vec<usize> = w.a.concat();
            all.extend(w.b.iter().map(|s| s.b));
            assert_eq!(all.iter().collect::<HashSet<_>>().len(), all.len());
            found += 1;
        }
    }
    assert!(found > 0);
}

#[test]
fn chains_do_not_shatter_two_points() {
    let r = find_ip_pattern(&linear_order(8), "<", 2, &IpOptions::default()).unwrap();
    assert!(r.found.is_none());
    assert!(r.nodes > 1);
}

#[test]
fn single_cells_are_easy() {
    for m in [linear_order(3), cycle_graph(5), directed_cycle(4)] {
        let rel = m.signature().relations()[0].name.clone();
        let w = find_ip_pattern(&m, &rel, 1, &IpOptions::default()).unwrap().found.unwrap();
        verify_ip(&m, &rel, &w, 1);
    }
}

#[test]
fn ternary_patterns() {
    let m = gen(Kind::Oh(3), 12, 5).unwrap();
    let r = find_ip_pattern(&m, "R", 1, &IpOptions::default()).unwrap();
    verify_ip(&m, "R", r.found.as_ref().unwrap(), 1);
    assert_eq!(r.n, 2);
    assert!(matches!(
        find_ip_pattern(&linear_order(5), "<", 2, &IpOptions::default()),
        Err(Error::Precondition(_))
    ));
    assert!(find_ip_pattern(&m, "R", 3, &IpOptions::default()).is_err());
}

// Properties.

fn fixture(i: usize) -> Structure {
    match i % 6 {
        0 => linear_order(4),
        1 => cycle_graph(4),
        2 => gen(Kind::Co, 4, 0).unwrap(),
        3 => path_graph(4),
        4 => gen(Kind::Og, 4, 7).unwrap(),
        _ => pure_set(4),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_brute_force_on_random_graphs(i in 0usize..6, mask in 0u64..1 << 15, map in prop::collection::vec(0usize..6, 4)) {
        let index = fixture(i);
        let m = graph_from_mask(6, mask);
        let s = IndexedSequence::from_main(index.clone(), m.clone(), singletons(&map)).unwrap();
        prop_assert_eq!(is_indiscernible(&s).unwrap().indiscernible, naive_indiscernible(&index, &m, &singletons(&map)));
    }

    #[test]
    fn renaming_the_index_keeps_the_verdict(i in 0usize..6, seed in any::<u64>(), map in prop::collection::vec(0usize..5, 4)) {
        let index = fixture(i);
        let m = cycle_graph(5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perm = rand::seq::index::sample(&mut rng, 4, 4).into_vec();
        let renamed = index.permuted(std::slice::from_ref(&perm)).unwrap();
        let mut moved = vec![0; 4];
        for (old, &new) in perm.iter().enumerate() {
            moved[new] = map[old];
        }
        let a = IndexedSequence::from_main(index, m.clone(), singletons(&map)).unwrap();
        let b = IndexedSequence::from_main(renamed, m, singletons(&moved)).unwrap();
        prop_assert_eq!(is_indiscernible(&a).unwrap().indiscernible, is_indiscernible(&b).unwrap().indiscernible);
    }

    #[test]
    fn isomorphic_copies_agree_on_reasonableness(mask in 0u64..1 << 10, seed in any::<u64>()) {
        let g = graph_from_mask(5, mask);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perm = rand::seq::index::sample(&mut rng, 5, 5).into_vec();
        let h = g.permuted(&[perm]).unwrap();
        prop_assert_eq!(is_reasonable(&g).unwrap().reasonable, is_reasonable(&h).unwrap().reasonable);
        prop_assert_eq!(is_primitive(&g).unwrap().primitive, is_primitive(&h).unwrap().primitive);
    }

    #[test]
    fn scan_witnesses_are_genuine(mask in 0u64..64, target in 0u64..1 << 10) {
        let i = og(4, &edges(&graph_from_mask(4, mask)));
        let j = i.reduct(&["<"]).unwrap();
        let m = graph_from_mask(5, target);
        let r = collapse_scan(&i, &j, &m, &ScanOptions::default()).unwrap();
        prop_assert_eq!(r.maps, 625);
        prop_assert!(r.uncollapsed <= r.indiscernible);
        for w in &r.witnesses {
            prop_assert!(naive_indiscernible(&i, &m, &w.map));
            prop_assert!(!naive_indiscernible(&j, &m, &w.map));
        }
    }

    #[test]
    fn found_configurations_hold(mask in 0u64..1 << 6, seed in any::<u64>()) {
        let a = graph_from_mask(4, mask);
        let m = gen(Kind::Og, 6, seed).unwrap();
        let opts = ConfigOptions { templates: TemplateSet::Literals, ..ConfigOptions::default() };
        if let Some(c) = find_configuration(&m, &a, &opts).unwrap().found {
            let phi = parse(&c.interpretation[0].formula).unwrap();
            for x in 0..4 {
                for y in 0..4 {
                    let got = evaluate(&m, &phi, &[("x1", Elem::main(c.map[x][0])), ("x2", Elem::main(c.map[y][0]))]).unwrap();
                    prop_assert_eq!(got, a.holds(0, &[x, y]));
                }
            }
        }
    }
}

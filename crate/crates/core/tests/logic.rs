use std::collections::HashMap;

use finmodel::logic::*;
use finmodel::structures::build::*;
use finmodel::structures::*;
use finmodel::Error;
use proptest::prelude::*;

#[test]
fn evaluation_examples() {
    assert!(!satisfies(&linear_order(3), "forall x. exists y. x < y").unwrap());
    assert!(satisfies(&complete_graph(3), "forall x. forall y. (!(x=y) -> E(x,y))").unwrap());
    assert!(!satisfies(&path_graph(3), "forall x. forall y. (!(x=y) -> E(x,y))").unwrap());
    assert!(satisfies(&linear_order(3), "exists x. forall y. (x = y | x < y)").unwrap());
    assert!(satisfies(&linear_order(3), "forall x. forall y. x <= y | y < x # totality").unwrap());
}

#[test]
fn sort_annotations_and_inference() {
    let text = r#"{"sorts": {"main": 2, "aux": 3},
        "signature": {"relations": [{"name": "R", "arity": 2, "sorts": ["main", "aux"]}]},
        "relations": {"R": [[0, 0], [1, 2]]}}"#;
    let m = Structure::from_json_str(text).unwrap();
    assert!(satisfies(&m, "forall x:main. exists y:aux. R(x; y)").unwrap());
    assert!(!satisfies(&m, "forall y:aux. exists x:main. R(x, y)").unwrap());
    // The sort of y is inferred from its use in R.
    assert!(satisfies(&m, "forall x:main. exists y. R(x, y)").unwrap());
    assert!(matches!(parse("exists y. y = y").unwrap().compile(m.signature()), Err(Error::Sort(_))));
    assert!(matches!(parse("forall x:aux. exists y. R(x, y)").unwrap().compile(m.signature()), Err(Error::Sort(_))));
    assert!(matches!(parse("forall x:nope. x = x").unwrap().compile(m.signature()), Err(Error::Sort(_))));
}

#[test]
fn parse_errors_carry_positions() {
    match parse("R(x,y") {
        Err(Error::Parse { line, col, msg }) => {
            assert_eq!((line, col), (1, 6));
            assert!(msg.contains("unbalanced parenthesis"), "{msg}");
        }
        other => panic!("{other:?}"),
    }
    match parse("forall x.\n  (E(x, x) & )") {
        Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 14)),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse("E(x,y))"), Err(Error::Parse { col: 7, .. })));
    assert!(matches!(parse("forall . x"), Err(Error::Parse { col: 8, .. })));
    assert!(matches!(parse("x $ y"), Err(Error::Parse { col: 3, .. })));
}

#[test]
fn well_formedness_errors() {
    let sig = complete_graph(2).signature().clone();
    assert!(matches!(parse("F(x, y)").unwrap().compile(&sig), Err(Error::Signature(_))));
    assert!(matches!(parse("E(x)").unwrap().compile(&sig), Err(Error::Signature(_))));
    assert!(matches!(
        parse("forall x. exists x. E(x, x)").unwrap().compile(&sig),
        Err(Error::Sort(_))
    ));
    // Sibling scopes may reuse a name.
    assert!(parse("(exists x. E(x, x)) | (forall x. x = x)").unwrap().compile(&sig).is_ok());
}

#[test]
fn free_variables_and_defined_relations() {
    let g = path_graph(4);
    let phi = parse("exists z. E(x, z) & E(z, y) & x != y").unwrap();
    assert_eq!(phi.free_vars(), vec!["x".to_string(), "y".to_string()]);
    let m = add_defined_relation(&g, "D2", &phi).unwrap();
    assert_eq!(
        m.relation_by_name("D2").unwrap().tuples(),
        &[vec![0, 2], vec![1, 3], vec![2, 0], vec![3, 1]]
    );
    assert!(evaluate(&g, &phi, &[("x", Elem::main(0)), ("y", Elem::main(2))]).unwrap());
    assert!(evaluate(&g, &phi, &[("x", Elem::main(0))]).is_err());
}

#[test]
fn counterexamples_name_the_universal_block() {
    let c = parse("forall x. forall y. x = y | E(x, y)").unwrap().compile(complete_graph(1).signature()).unwrap();
    assert_eq!(c.counterexample(&path_graph(3)).unwrap(), Some(vec![("x".into(), Elem::main(0)), ("y".into(), Elem::main(2))]));
    assert_eq!(c.counterexample(&complete_graph(4)).unwrap(), None);
}

#[test]
fn axiom_suite_stanzas() {
    let text = "# orders\n[irreflexive]\nforall x. !(x < x)\n\n[transitive]\nforall x. forall y. forall z.\n  x < y & y < z -> x < z\n";
    let s = AxiomSuite::parse("lo", text).unwrap();
    assert_eq!(s.axioms.len(), 2);
    assert!(s.holds(&linear_order(4)).unwrap());
    let bad = AxiomSuite::parse("x", "[a]\nforall x. (x < x\n");
    assert!(matches!(bad, Err(Error::Parse { line: 3, .. })));
}

#[test]
fn reduct_specs() {
    let spec = ReductSpec::from_json_str(r#"{"define": [{"name": "S", "formula": "x < y | y < x"}]}"#).unwrap();
    let j = spec.apply(&linear_order(3)).unwrap();
    assert_eq!(j.relation_by_name("S").unwrap().len(), 6);
    let keep = ReductSpec::from_json_str(r#"{"keep": ["<"]}"#).unwrap();
    assert_eq!(keep.apply(&linear_order(3)).unwrap().relation(0).len(), 3);
    let quant = ReductSpec::from_json_str(r#"{"define": [{"name": "S", "formula": "exists z. x < z"}]}"#).unwrap();
    assert!(quant.apply(&linear_order(3)).is_err());
}

// An independent evaluator over the syntax tree, by name lookup.
fn naive(m: &Structure, f: &Formula, env: &mut HashMap<String, usize>) -> bool {
    match f {
        Formula::Const(b) => *b,
        Formula::Atom { rel, args } => {
            let t: Vec<usize> = args.iter().map(|a| env[a]).collect();
            m.relation_by_name(rel).unwrap().tuples().contains(&t)
        }
        Formula::Eq(a, b) => env[a] == env[b],
        Formula::Not(a) => !naive(m, a, env),
        Formula::And(a, b) => naive(m, a, env) && naive(m, b, env),
        Formula::Or(a, b) => naive(m, a, env) || naive(m, b, env),
        Formula::Implies(a, b) => !naive(m, a, env) || naive(m, b, env),
        Formula::Iff(a, b) => naive(m, a, env) == naive(m, b, env),
        Formula::Forall { var, body, .. } | Formula::Exists { var, body, .. } => {
            let all = matches!(f, Formula::Forall { .. });
            let saved = env.get(var).copied();
            let mut res = all;
            for x in 0..m.len() {
                env.insert(var.clone(), x);
                if naive(m, body, env) != all {
                    res = !all;
                    break;
                }
            }
            match saved {
                Some(v) => env.insert(var.clone(), v),
                None => env.remove(var),
            };
            res
        }
    }
}

fn formula(depth: u32, bound: Vec<&'static str>) -> BoxedStrategy<Formula> {
    let vars = ["x", "y", "z", "w"];
    let free: Vec<&'static str> = vars.iter().copied().filter(|v| !bound.contains(v)).collect();
    let all = vars.to_vec();
    let atom = (prop::sample::select(all.clone()), prop::sample::select(all.clone()), 0..3u8)
        .prop_map(|(a, b, k)| match k {
            0 => Formula::atom("E", &[a, b]),
            1 => Formula::eq(a, b),
            _ => Formula::atom("E", &[a, a]).not(),
        });
    if depth == 0 {
        return atom.boxed();
    }
    let sub = formula(depth - 1, bound.clone());
    let mut options: Vec<BoxedStrategy<Formula>> = vec![
        atom.boxed(),
        sub.clone().prop_map(Formula::not).boxed(),
        (sub.clone(), sub.clone(), 0..4u8)
            .prop_map(|(a, b, k)| match k {
                0 => a.and(b),
                1 => a.or(b),
                2 => a.implies(b),
                _ => a.iff(b),
            })
            .boxed(),
    ];
    if !free.is_empty() {
        let b2 = bound.clone();
        options.push(
            (prop::sample::select(free), any::<bool>())
                .prop_flat_map(move |(v, all)| {
                    let mut b = b2.clone();
                    b.push(v);
                    formula(depth - 1, b).prop_map(move |body| {
                        if all {
                            Formula::forall(v, body)
                        } else {
                            Formula::exists(v, body)
                        }
                    })
                })
                .boxed(),
        );
    }
    prop::strategy::Union::new(options).boxed()
}

fn random_graph() -> impl Strategy<Value = Structure> {
    (1usize..=5).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (Just(n), 0u64..(1u64 << pairs)).prop_map(|(n, mask)| graph_from_mask(n, mask))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn compiled_evaluation_matches_naive(f in formula(4, vec![]), g in random_graph(), vals in prop::collection::vec(0usize..5, 4)) {
        let c = f.compile(g.signature()).unwrap();
        let args: Vec<usize> = c.free_vars().iter().enumerate().map(|(i, _)| vals[i] % g.len()).collect();
        let mut env: HashMap<String, usize> = c.free_vars().iter().zip(&args).map(|((n, _), &v)| (n.clone(), v)).collect();
        prop_assert_eq!(c.eval(&g, &args).unwrap(), naive(&g, &f, &mut env));
    }

    #[test]
    fn display_round_trips(f in formula(4, vec![])) {
        let text = f.to_string();
        let back = parse(&text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        let g = path_graph(3);
        let a = f.compile(g.signature()).unwrap();
        let b = back.compile(g.signature()).unwrap();
        prop_assert_eq!(a.satisfying_tuples(&g).unwrap(), b.satisfying_tuples(&g).unwrap());
    }

    #[test]
    fn qftypes_agree_with_partial_isomorphism(g in random_graph(), a in prop::collection::vec(0usize..5, 0..4), b in prop::collection::vec(0usize..5, 0..4)) {
        let a: Vec<usize> = a.iter().map(|x| x % g.len()).collect();
        let b: Vec<usize> = b.iter().map(|x| x % g.len()).collect();
        // a ~ b iff a_i -> b_i is a well-defined, injective, E-preserving and reflecting map.
        let partial_iso = a.len() == b.len()
            && (0..a.len()).all(|i| (0..a.len()).all(|j| {
                (a[i] == a[j]) == (b[i] == b[j]) && g.holds(0, &[a[i], a[j]]) == g.holds(0, &[b[i], b[j]])
            }));
        prop_assert_eq!(qf_type_main(&g, &a) == qf_type_main(&g, &b), partial_iso);
    }
}

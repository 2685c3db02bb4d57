//! The acceptance battery. Each criterion returns a pass flag, a scale
//! stamp and enough detail to see why it failed.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use finmodel::classes::{arrow, generate, refutes_arrow, ArrowMode, Verdict as ArrowVerdict, DEFAULT_ARROW_BUDGET};
use finmodel::indiscernibles::{
    arity_reduct, check_assignment, collapse_scan, irreflexive_version, is_homogeneous, is_indiscernible, is_primitive,
    is_reasonable, lex_verdict, project, IndexedSequence, ScanOptions,
};
use finmodel::products::{full_product, lex_sum, with_rib_types};
use finmodel::relzoo::{
    c_to_d, check_axioms, cod_from_tree, cut_cyclic_order, d_from_tree, d_to_c_pointed, gen, oc_from_tree,
    od_to_oc, BinaryTree, Kind, Shape,
};
use finmodel::structures::build::{
    complete_graph, cycle_graph, directed_circulant, directed_cycle, empty_graph, graph, hypercube,
    linear_order, path_graph, pure_set,
};
use finmodel::structures::{canonical_form, CanonicalForm, Structure};
use finmodel::twinwidth::{transfer_experiment, twin_width, SolverOptions, Trigraph, TwinWidth};
use finmodel::Signature;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::without_timing;

pub const CRITERIA: usize = 10;

/// Criteria whose failure is expected and explained in the project notes.
pub const EXPECTED_FAILURES: &[usize] = &[7];

#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub scale: String,
    pub detail: Value,
}

/// Runs the listed criteria, or all of them when `only` is empty.
pub fn run(only: &[usize]) -> Vec<Criterion> {
    (1..=CRITERIA).filter(|i| only.is_empty() || only.contains(i)).map(criterion).collect()
}

pub fn criterion(id: usize) -> Criterion {
    let (title, outcome) = match id {
        1 => ("axiom suites on generated instances", axiom_battery()),
        2 => ("D and C relations are interdefinable", interdefinability()),
        3 => ("partition arrows on chains", arrow_anchors()),
        4 => ("full-product indiscernibility", full_product_oracle()),
        5 => ("lexicographic-sum characterisation", lex_characterisation()),
        6 => ("n-ary collapse", nary_collapse()),
        7 => ("reasonable index structures", reasonableness()),
        8 => ("exact twin-width", twin_width_battery()),
        9 => ("twin-width of lexicographic sums", transfer()),
        10 => ("deterministic reports", determinism()),
        _ => ("unknown criterion", Err(format!("there is no criterion {id}"))),
    };
    match outcome {
        Ok((pass, scale, detail)) => Criterion { id, title, pass, scale, detail },
        Err(e) => Criterion { id, title, pass: false, scale: "not completed".into(), detail: json!({ "error": e }) },
    }
}

type Outcome = Result<(bool, String, Value), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn axiom_battery() -> Outcome {
    let kinds = [Kind::Lo, Kind::Co, Kind::Og, Kind::Oh(3), Kind::Oc, Kind::Cod];
    let mut failures = Vec::new();
    for kind in kinds {
        for i in 0..100u64 {
            let n = 3 + (i as usize % 8);
            let m = gen(kind, n, i).map_err(err)?;
            for r in check_axioms(kind, &m).map_err(err)? {
                if !r.holds {
                    failures.push(json!({ "kind": kind.to_string(), "seed": i, "size": n, "axiom": r.axiom }));
                }
            }
        }
    }
    let scale = "100 seeded instances of sizes 3 to 10 for each of 6 kinds".to_string();
    Ok((failures.is_empty(), scale, json!({ "failures": failures })))
}

fn sorted(mut t: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    t.sort();
    t
}

fn interdefinability() -> Outcome {
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for n in 1..=6 {
        for s in Shape::all(n) {
            let t = BinaryTree::from_shape(&s);
            let d = d_from_tree(&t);
            for a in 0..d.len() {
                let (c, kept) = d_to_c_pointed(&d, a).map_err(err)?;
                let back = c_to_d(&c).map_err(err)?;
                let mut ids = kept.clone();
                ids.push(a);
                let relabelled = back.relation(0).tuples().iter().map(|t| t.iter().map(|&x| ids[x]).collect()).collect();
                checked += 1;
                if sorted(relabelled) != sorted(d.relation(0).tuples().to_vec()) {
                    mismatches.push(json!({ "leaves": n, "tree": format!("{s:?}"), "point": a, "check": "round trip" }));
                }
            }
            let od = cut_cyclic_order(&cod_from_tree(&t), 0).map_err(err)?;
            let (oc, m, kept) = od_to_oc(&od).map_err(err)?;
            let (c0, kept0) = d_to_c_pointed(&od.reduct(&["D"]).map_err(err)?, m).map_err(err)?;
            checked += 1;
            if kept != kept0 || oc.relation(0).tuples() != c0.relation(0).tuples() {
                mismatches.push(json!({ "leaves": n, "tree": format!("{s:?}"), "check": "ordered" }));
            }
        }
    }
    let scale = format!("all binary trees with at most 6 leaves, {checked} comparisons");
    Ok((mismatches.is_empty(), scale, json!({ "mismatches": mismatches })))
}

fn arrow_anchors() -> Outcome {
    let (a, b) = (linear_order(2), linear_order(3));
    let six = arrow(&linear_order(6), &b, &a, 2, ArrowMode::Exhaustive, DEFAULT_ARROW_BUDGET).map_err(err)?;
    let c5 = linear_order(5);
    let five = arrow(&c5, &b, &a, 2, ArrowMode::Exhaustive, DEFAULT_ARROW_BUDGET).map_err(err)?;
    let refuted = match &five.witness {
        Some(w) => refutes_arrow(&c5, &b, &a, w).map_err(err)?,
        None => false,
    };
    let pass = six.verdict == ArrowVerdict::Holds && five.verdict == ArrowVerdict::Fails && refuted;
    let scale = format!("exhaustive over 2^{} and 2^{} colourings", six.positions - 1, five.positions - 1);
    Ok((pass, scale, json!({ "six_chain": six.verdict, "five_chain": five.verdict, "witness_refutes": refuted, "witness": five.witness })))
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

fn all_maps(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    finmodel::structures::for_each_tuple(t, n, |m| out.push(m.to_vec()));
    out
}

fn singletons(map: &[usize]) -> Vec<Vec<usize>> {
    map.iter().map(|&x| vec![x]).collect()
}

fn full_product_oracle() -> Outcome {
    let factors = small_structures();
    let (mut checked, mut disagreements) = (0u64, Vec::new());
    for index in small_structures() {
        for m1 in &factors {
            for m2 in &factors {
                let p = full_product(m1, m2).map_err(err)?;
                for map in all_maps(index.len(), p.size(0)) {
                    let s = IndexedSequence::from_main(index.clone(), p.clone(), singletons(&map)).map_err(err)?;
                    let (l, r) = project(&s, m1, m2).map_err(err)?;
                    let want = is_indiscernible(&l).map_err(err)?.indiscernible
                        && is_indiscernible(&r).map_err(err)?.indiscernible;
                    checked += 1;
                    if is_indiscernible(&s).map_err(err)?.indiscernible != want {
                        disagreements.push(json!({ "index": index.name(), "m1": m1.name(), "m2": m2.name(), "map": map }));
                    }
                }
            }
        }
    }
    let scale = format!("{checked} sequences, |I|, |M1|, |M2| at most 3, k = 1");
    Ok((disagreements.is_empty(), scale, json!({ "disagreements": disagreements })))
}

fn equivalence_classes(n: usize, class: impl Fn(usize) -> usize) -> Vec<Vec<usize>> {
    let mut t = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if class(x) == class(y) {
                t.push(vec![x, y]);
            }
        }
    }
    t
}

/// The index structures the characterisation is stated for.
fn reasonable_indices() -> Result<Vec<Structure>, String> {
    let v = vec![pure_set(1), pure_set(3), complete_graph(3), empty_graph(3), gen(Kind::Co, 3, 0).map_err(err)?];
    for i in &v {
        if !is_reasonable(i).map_err(err)?.reasonable {
            return Err(format!("fixture {} is not reasonable", i.name()));
        }
    }
    Ok(v)
}

fn lex_characterisation() -> Outcome {
    let pool = [empty_graph(1), empty_graph(2), complete_graph(2)];
    let mut spines = vec![pure_set(1), pure_set(2), linear_order(2), complete_graph(2), pure_set(3), linear_order(3)];
    spines.extend(generate("graphs", 3).map_err(err)?.members().iter().filter(|g| g.len() == 3).cloned());
    let (mut checked, mut violations) = (0u64, Vec::new());
    for index in reasonable_indices()? {
        for spine in &spines {
            for choice in all_maps(spine.len(), pool.len()) {
                let ribs: Vec<Structure> = choice.iter().map(|&r| pool[r].clone()).collect();
                let sum = with_rib_types(&lex_sum(spine, &ribs).map_err(err)?, &ribs).map_err(err)?;
                let enriched = sum.sort_restriction(sum.signature().sort_index("spine").expect("spine sort")).map_err(err)?;
                let fibre_of: Vec<usize> =
                    ribs.iter().enumerate().flat_map(|(a, r)| std::iter::repeat_n(a, r.len())).collect();
                for map in all_maps(index.len(), sum.size(0)) {
                    let s = IndexedSequence::from_main(index.clone(), sum.clone(), singletons(&map)).map_err(err)?;
                    let v = lex_verdict(&s, &enriched, &ribs).map_err(err)?;
                    checked += 1;
                    let mut ok = v.indiscernible == v.components;
                    if v.indiscernible {
                        let col: Vec<usize> = map.iter().map(|&x| fibre_of[x]).collect();
                        let meets = (0..col.len()).any(|i| (i + 1..col.len()).any(|j| col[i] == col[j]));
                        ok &= v.part_a && (!meets || col.iter().all(|&a| a == col[0]));
                        let spine_seq = IndexedSequence::from_main(index.clone(), enriched.clone(), singletons(&col)).map_err(err)?;
                        ok &= is_indiscernible(&spine_seq).map_err(err)?.indiscernible;
                    }
                    if !ok {
                        violations.push(json!({ "index": index.name(), "sum": sum.name(), "map": map }));
                    }
                }
            }
        }
    }
    let example = sum_indexed_example()?;
    let pass = violations.is_empty() && example["reproduced"] == true;
    let scale = format!("{checked} sequences, |I| at most 3, spines at most 3, ribs at most 2, k = 1");
    Ok((pass, scale, json!({ "violations": violations, "example": example })))
}

/// The identity on `3 x 2 x 2` points: indiscernible for the fibre and rib
/// equivalences together, not for the fibre equivalence alone.
fn sum_indexed_example() -> Result<Value, String> {
    let sig = Signature::relational(&[("E", 2)]);
    let mut rib = Structure::one_sorted("N", sig, 4).map_err(err)?;
    rib.set_relation(0, equivalence_classes(4, |x| x / 2)).map_err(err)?;
    let sum = lex_sum(&pure_set(3), &[rib.clone(), rib.clone(), rib]).map_err(err)?;
    let mut j = Structure::one_sorted("J", Signature::relational(&[("E1", 2), ("E2", 2)]), 12).map_err(err)?;
    j.set_relation(0, equivalence_classes(12, |x| x / 4)).map_err(err)?;
    j.set_relation(1, equivalence_classes(12, |x| x / 2)).map_err(err)?;
    let i = j.reduct(&["E1"]).map_err(err)?;
    let id: Vec<usize> = (0..12).collect();
    let by_j = is_indiscernible(&IndexedSequence::from_main(j, sum.clone(), singletons(&id)).map_err(err)?).map_err(err)?;
    let by_i = is_indiscernible(&IndexedSequence::from_main(i.clone(), sum, singletons(&id)).map_err(err)?).map_err(err)?;
    let i_reasonable = is_reasonable(&i).map_err(err)?.reasonable;
    Ok(json!({
        "reproduced": by_j.indiscernible && !by_i.indiscernible && !i_reasonable,
        "indiscernible_for_J": by_j.indiscernible,
        "indiscernible_for_I": by_i.indiscernible,
        "I_reasonable": i_reasonable,
        "witness": by_i.witness,
    }))
}

fn nary_collapse() -> Outcome {
    let mut templates = Vec::new();
    for n in 3..=4 {
        for s in Shape::all(n) {
            templates.push(oc_from_tree(&BinaryTree::from_shape(&s)));
            templates.push(cod_from_tree(&BinaryTree::from_shape(&s)));
        }
        templates.push(gen(Kind::Co, n, 0).map_err(err)?);
        for seed in 0..3 {
            templates.push(gen(Kind::Oh(3), n, seed).map_err(err)?);
        }
    }
    let mut targets: Vec<Structure> = generate("graphs", 4).map_err(err)?.members().to_vec();
    targets.extend([linear_order(5), linear_order(6), directed_cycle(5), directed_cycle(6), cycle_graph(5), cycle_graph(6)]);
    for seed in 0..4 {
        targets.push(gen(Kind::Og, 5 + seed as usize % 2, seed).map_err(err)?);
    }
    let (mut maps, mut uncollapsed, mut witnesses) = (0u64, 0u64, Vec::new());
    for t in &templates {
        let i = irreflexive_version(t).map_err(err)?;
        let j = arity_reduct(&i, 2).map_err(err)?;
        for m in &targets {
            let r = collapse_scan(&i, &j, m, &ScanOptions::default()).map_err(err)?;
            maps += r.maps;
            uncollapsed += r.uncollapsed;
            if let Some(w) = r.witnesses.first() {
                witnesses.push(json!({ "template": t.name(), "target": m.name(), "map": w.map }));
            }
        }
    }
    let scale = format!(
        "{} templates on 3 or 4 points, {} binary targets on at most 6 points, {maps} maps, qftype",
        templates.len(),
        targets.len()
    );
    Ok((uncollapsed == 0, scale, json!({ "uncollapsed": uncollapsed, "witnesses": witnesses })))
}

/// Directed circulants on 2 to 8 points up to isomorphism, cyclic orders,
/// pure sets and the 3-cube: all vertex-transitive.
fn vertex_transitive_zoo() -> Result<Vec<Structure>, String> {
    let mut zoo = Vec::new();
    let mut seen = HashSet::new();
    for n in 2..=8usize {
        for mask in 0u32..1 << (n - 1) {
            let jumps: Vec<usize> = (1..n).filter(|d| mask >> (d - 1) & 1 == 1).collect();
            let s = directed_circulant(n, &jumps);
            if seen.insert((n, canonical_form(&s).map_err(err)?.0)) {
                zoo.push(s);
            }
        }
    }
    for n in 3..=8 {
        zoo.push(gen(Kind::Co, n, 0).map_err(err)?);
    }
    zoo.extend((1..=6).map(pure_set));
    zoo.push(hypercube(3));
    Ok(zoo)
}

fn reasonableness() -> Outcome {
    let mut m = linear_order(6);
    m = m.with_relation("E", vec![0, 0], equivalence_classes(6, |x| x / 3)).map_err(err)?;
    let check = check_assignment(&m, |i, j, e0, e1| i / 3 == j / 3 && e0 != e1).map_err(err)?;
    let r = is_reasonable(&m).map_err(err)?;
    let rejected = check.consistent && check.violates() && !r.reasonable;

    let zoo = vertex_transitive_zoo()?;
    let (mut compared, mut skipped, mut disagreements) = (0, 0, Vec::new());
    for s in &zoo {
        let (Ok(r), Ok(p)) = (is_reasonable(s), is_primitive(s)) else {
            skipped += 1;
            continue;
        };
        compared += 1;
        if r.reasonable != p.primitive {
            let homogeneous = is_homogeneous(s).map_err(err)?.homogeneous;
            disagreements.push(json!({
                "structure": s.name(),
                "size": s.len(),
                "reasonable": r.reasonable,
                "primitive": p.primitive,
                "homogeneous": homogeneous,
            }));
        }
    }
    let scale = format!("{compared} vertex-transitive structures on at most 8 points, {skipped} incomplete");
    let detail = json!({
        "convex_equivalence_rejected": rejected,
        "witness_assignment_consistent": check.consistent,
        "disagreements": disagreements,
    });
    Ok((rejected && disagreements.is_empty(), scale, detail))
}

const TWW_BASELINE: &str = include_str!("../../core/data/tww_baseline.json");
const TRANSFER_BASELINE: &str = include_str!("../../core/data/transfer_baseline.json");

fn twin_width_battery() -> Outcome {
    let opts = SolverOptions::default();
    let mut problems: Vec<Value> = Vec::new();
    let mut certificates = 0;
    let mut solve = |g: &Structure, problems: &mut Vec<Value>| -> Result<TwinWidth, String> {
        let w = twin_width(g, &opts).map_err(err)?;
        certificates += 1;
        if !w.is_exact() {
            problems.push(json!({ "graph": g.name(), "problem": "not exact" }));
        }
        if !w.certificate.verify(&Trigraph::from_graph(g).map_err(err)?) || w.certificate.width != w.width {
            problems.push(json!({ "graph": g.name(), "problem": "certificate does not replay" }));
        }
        Ok(w)
    };
    for n in 1..=8 {
        if solve(&complete_graph(n), &mut problems)?.width != 0 {
            problems.push(json!({ "graph": format!("K{n}"), "problem": "nonzero width" }));
        }
    }
    if solve(&path_graph(4), &mut problems)?.width != 1 {
        problems.push(json!({ "graph": "P4", "problem": "width is not 1" }));
    }
    let rows: Vec<Value> = serde_json::from_str(TWW_BASELINE).map_err(err)?;
    let mut baseline: HashMap<CanonicalForm, u64> = HashMap::new();
    for row in &rows {
        let n = row["n"].as_u64().unwrap_or(0) as usize;
        let e: Vec<(usize, usize)> = serde_json::from_value(row["edges"].clone()).map_err(err)?;
        baseline.insert(canonical_form(&graph("baseline", n, &e)).map_err(err)?, row["width"].as_u64().unwrap_or(u64::MAX));
    }
    let graphs = generate("graphs", 7).map_err(err)?;
    let mut widths: HashMap<CanonicalForm, usize> = HashMap::new();
    for (i, g) in graphs.members().iter().enumerate() {
        let w = solve(g, &mut problems)?.width;
        if g.len() <= 6 && baseline.get(graphs.key(i)) != Some(&(w as u64)) {
            problems.push(json!({ "graph": g.name(), "problem": "differs from the baseline", "width": w }));
        }
        widths.insert(graphs.key(i).clone(), w);
    }
    if baseline.len() != graphs.members().iter().filter(|g| g.len() <= 6).count() {
        problems.push(json!({ "problem": "baseline does not cover the graphs on at most 6 vertices" }));
    }
    let mut deletions = 0;
    for (i, g) in graphs.members().iter().enumerate() {
        for v in 0..g.len() {
            if g.len() < 2 {
                break;
            }
            let keep: Vec<usize> = (0..g.len()).filter(|&x| x != v).collect();
            let h = g.induced_main(&keep).map_err(err)?;
            deletions += 1;
            if widths[&canonical_form(&h).map_err(err)?] > widths[graphs.key(i)] {
                problems.push(json!({ "graph": g.name(), "problem": "vertex deletion raises the width", "vertex": v }));
            }
        }
    }
    let scale = format!(
        "{} graphs on at most 7 vertices, {} baseline rows, {deletions} vertex deletions, {certificates} certificates",
        graphs.len(),
        rows.len()
    );
    Ok((problems.is_empty(), scale, json!({ "problems": problems })))
}

fn transfer() -> Outcome {
    let opts = SolverOptions { max_vertices: 12, ..Default::default() };
    let left = generate("graphs", 4).map_err(err)?;
    let right = generate("graphs", 3).map_err(err)?;
    let r = transfer_experiment(left.members(), right.members(), &opts).map_err(err)?;
    let base: Value = serde_json::from_str(TRANSFER_BASELINE).map_err(err)?;
    let mut profile: BTreeMap<String, usize> = BTreeMap::new();
    for row in &r.rows {
        *profile.entry(format!("{}/{}/{}", row.spine_width, row.rib_width, row.sum_width)).or_insert(0) += 1;
    }
    let excess = serde_json::to_value(&r.excess).map_err(err)?;
    let matches = base["excess"] == excess
        && base["rows"] == json!(r.rows.len())
        && base["profile"] == serde_json::to_value(&profile).map_err(err)?;
    let pass = matches && r.bound_failures == 0;
    Ok((pass, r.scale.clone(), json!({ "excess": excess, "bound_failures": r.bound_failures, "matches_baseline": matches })))
}

/// One invocation of every subcommand, run twice in process.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    write_fixtures(dir.path())?;
    let runs: Vec<(&str, Vec<String>)> = vec![
        ("gen", vec!["gen", "--kind", "cod", "--size", "8", "--seed", "42"].into_iter().map(String::from).collect()),
        ("check-axioms", args(&["check-axioms", "--kind", "cod"], &[("--input", path("cod8.json"))])),
        (
            "arrow",
            args(
                &["arrow", "--k", "2", "--mode", "exhaustive"],
                &[("--C", path("lo6.json")), ("--B", path("lo3.json")), ("--A", path("lo2.json"))],
            ),
        ),
        ("product", vec!["product".into(), "--kind".into(), "full".into(), path("lo3.json"), path("k2.json")]),
        ("product", vec!["product".into(), "--kind".into(), "lex".into(), path("lo3.json"), path("k2.json")]),
        (
            "indisc-scan",
            args(
                &["indisc-scan", "--k", "1", "--mode", "exhaust"],
                &[("--index", path("oc4.json")), ("--reduct", path("keep_lt.json")), ("--target", path("og5.json"))],
            ),
        ),
        (
            "indisc-scan",
            args(
                &["indisc-scan", "--mode", "sample", "--samples", "200", "--seed", "7"],
                &[("--index", path("oc4.json")), ("--reduct", path("keep_lt.json")), ("--target", path("og5.json"))],
            ),
        ),
        ("reasonable", args(&["reasonable"], &[("--input", path("co4.json"))])),
        ("primitive", args(&["primitive"], &[("--input", path("co4.json"))])),
        ("ipn", args(&["ipn", "--relation", "E", "--d", "1"], &[("--input", path("og12.json"))])),
        ("config-search", args(&["config-search"], &[("--source", path("lo2.json")), ("--target", path("lo6.json"))])),
        ("tww", args(&["tww", "--exact"], &[("--input", path("c7.json"))])),
        ("tww", args(&["tww", "--heuristic"], &[("--input", path("c7.json"))])),
        ("tww-transfer", args(&["tww-transfer"], &[("--left", path("left")), ("--right", path("right"))])),
        // one cheap criterion; criterion 10 would recurse
        ("suite", args(&["suite", "--only", "3"], &[])),
    ];
    let mut differing = Vec::new();
    let mut covered = BTreeMap::new();
    for (name, argv) in &runs {
        let mut outputs = Vec::new();
        for threads in ["1", "1", "4"] {
            let mut full = vec!["finmodel".to_string(), "--threads".into(), threads.into()];
            full.extend(argv.iter().cloned());
            let (mut out, mut diag) = (Vec::new(), Vec::new());
            let code = crate::run(&full, &mut out, &mut diag);
            let text = String::from_utf8_lossy(&out).into_owned();
            outputs.push((code, without_timing(&text).map(|v| v.to_string()), text));
        }
        // the thread count is part of the argument echo, so compare the results
        let strip = |o: &Option<String>| -> Option<Value> {
            let mut v: Value = serde_json::from_str(o.as_ref()?).ok()?;
            let map = v.as_object_mut()?;
            map.remove("args");
            map.remove("config_hash");
            Some(v)
        };
        let same = outputs[0].0 == 0
            && outputs[0].1.is_some()
            && outputs[0].0 == outputs[1].0
            && outputs[0].1 == outputs[1].1
            && outputs[0].0 == outputs[2].0
            && strip(&outputs[0].1) == strip(&outputs[2].1);
        *covered.entry(*name).or_insert(0) += 1;
        if !same {
            differing.push(json!({ "command": name, "args": argv, "exit_codes": [outputs[0].0, outputs[1].0, outputs[2].0] }));
        }
    }
    let scale = format!("{} invocations of {} subcommands, each run twice with 1 thread and once with 4", runs.len(), covered.len());
    Ok((differing.is_empty(), scale, json!({ "differing": differing, "covered": covered })))
}

fn args(fixed: &[&str], named: &[(&str, String)]) -> Vec<String> {
    let mut v: Vec<String> = fixed.iter().map(|s| s.to_string()).collect();
    for (k, p) in named {
        v.push(k.to_string());
        v.push(p.clone());
    }
    v
}

fn write_fixtures(dir: &Path) -> Result<(), String> {
    let save = |name: &str, m: &Structure| m.save(dir.join(name)).map_err(err);
    save("lo2.json", &linear_order(2))?;
    save("lo3.json", &linear_order(3))?;
    save("lo6.json", &linear_order(6))?;
    save("k2.json", &complete_graph(2))?;
    save("c7.json", &cycle_graph(7))?;
    save("cod8.json", &gen(Kind::Cod, 8, 42).map_err(err)?)?;
    save("co4.json", &gen(Kind::Co, 4, 0).map_err(err)?)?;
    save("oc4.json", &gen(Kind::Oc, 4, 1).map_err(err)?)?;
    save("og5.json", &gen(Kind::Og, 5, 3).map_err(err)?)?;
    save("og12.json", &gen(Kind::Og, 12, 0).map_err(err)?)?;
    std::fs::write(dir.join("keep_lt.json"), r#"{"keep": ["<"]}"#).map_err(err)?;
    for (sub, n) in [("left", 3), ("right", 2)] {
        std::fs::create_dir_all(dir.join(sub)).map_err(err)?;
        for g in generate("graphs", n).map_err(err)?.members() {
            save(&format!("{sub}/{}.json", g.name()), g)?;
        }
    }
    Ok(())
}

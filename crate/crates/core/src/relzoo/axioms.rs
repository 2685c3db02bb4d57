use super::gen::Kind;
use crate::error::Result;
use crate::logic::AxiomSuite;

pub const LO: &str = include_str!("../../axioms/lo.ax");
pub const CO: &str = include_str!("../../axioms/co.ax");
pub const GRAPH: &str = include_str!("../../axioms/graph.ax");
pub const C: &str = include_str!("../../axioms/c.ax");
pub const OC: &str = include_str!("../../axioms/oc.ax");
pub const D: &str = include_str!("../../axioms/d.ax");
pub const COD: &str = include_str!("../../axioms/cod.ax");
pub const OD: &str = include_str!("../../axioms/od.ax");

fn suite(name: &str, parts: &[&str]) -> AxiomSuite {
    let mut s = AxiomSuite { name: name.into(), axioms: Vec::new() };
    for p in parts {
        s = s.extend(&AxiomSuite::parse(name, p).expect("shipped axiom files parse"));
    }
    s
}

/// Uniformity and symmetry of an `n`-ary hyperedge relation `R`.
pub fn hypergraph_text(n: usize) -> String {
    let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let head: String = vars.iter().map(|v| format!("forall {v}. ")).collect();
    let atom = |v: &[String]| format!("R({})", v.join(", "));
    let mut distinct = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            distinct.push(format!("{} != {}", vars[i], vars[j]));
        }
    }
    let distinct = if distinct.is_empty() { "true".to_string() } else { distinct.join(" & ") };
    let mut text = format!("[uniform]\n{head}{} -> {distinct}\n", atom(&vars));
    for i in 0..n.saturating_sub(1) {
        let mut w = vars.clone();
        w.swap(i, i + 1);
        text += &format!("\n[symmetric_{}]\n{head}{} -> {}\n", i + 1, atom(&vars), atom(&w));
    }
    text
}

/// The defining axioms of a generated kind.
pub fn axioms(kind: Kind) -> AxiomSuite {
    let name = kind.to_string();
    match kind {
        Kind::Lo => suite(&name, &[LO]),
        Kind::Co => suite(&name, &[CO]),
        Kind::Og => suite(&name, &[LO, GRAPH]),
        Kind::Oh(n) => {
            let h = hypergraph_text(n);
            suite(&name, &[LO, &h])
        }
        Kind::Oc => suite(&name, &[C, LO, OC]),
        Kind::Cod => suite(&name, &[D, CO, COD]),
    }
}

pub fn c_relation() -> AxiomSuite {
    suite("c", &[C])
}

pub fn d_relation() -> AxiomSuite {
    suite("d", &[D])
}

/// Binary branching D-relations with a convex linear order.
pub fn ordered_d_relation() -> AxiomSuite {
    suite("od", &[D, LO, OD])
}

/// Parses a user-supplied suite.
pub fn parse_suite(name: &str, text: &str) -> Result<AxiomSuite> {
    AxiomSuite::parse(name, text)
}

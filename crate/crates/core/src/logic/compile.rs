//! Name resolution, sort inference and slot-indexed evaluation.

use std::collections::HashMap;

use super::ast::Formula;
use crate::error::{Error, Result};
use crate::structures::{Elem, Signature, SortId, Structure};

#[derive(Clone, Debug)]
enum Op {
    Const(bool),
    Atom(usize, Box<[usize]>),
    Eq(usize, usize),
    Not(Box<Op>),
    And(Box<Op>, Box<Op>),
    Or(Box<Op>, Box<Op>),
    Imp(Box<Op>, Box<Op>),
    Iff(Box<Op>, Box<Op>),
    All(usize, SortId, Box<Op>),
    Ex(usize, SortId, Box<Op>),
}

/// A formula checked against a signature, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Compiled {
    sig: Signature,
    free: Vec<(String, SortId)>,
    slots: usize,
    root: Op,
    source: Formula,
}

struct Resolver<'a> {
    sig: &'a Signature,
    // Per slot: union-find parent and known sort.
    parent: Vec<usize>,
    sort: Vec<Option<SortId>>,
    names: Vec<String>,
    free: Vec<(String, usize)>,
    scope: Vec<(String, usize)>,
}

enum Raw {
    Const(bool),
    Atom(usize, Vec<usize>),
    Eq(usize, usize),
    Not(Box<Raw>),
    Bin(u8, Box<Raw>, Box<Raw>),
    Q(bool, usize, Box<Raw>),
}

impl Resolver<'_> {
    fn fresh(&mut self, name: &str, sort: Option<SortId>) -> usize {
        self.parent.push(self.parent.len());
        self.sort.push(sort);
        self.names.push(name.to_string());
        self.parent.len() - 1
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        self.parent[x] = r;
        r
    }

    fn constrain(&mut self, slot: usize, s: SortId) -> Result<()> {
        let r = self.find(slot);
        match self.sort[r] {
            Some(t) if t != s => Err(Error::Sort(format!(
                "variable `{}` used at sorts `{}` and `{}`",
                self.names[slot],
                self.sig.sorts()[t],
                self.sig.sorts()[s]
            ))),
            _ => {
                self.sort[r] = Some(s);
                Ok(())
            }
        }
    }

    fn unify(&mut self, a: usize, b: usize) -> Result<()> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return Ok(());
        }
        self.parent[rb] = ra;
        if let Some(s) = self.sort[rb] {
            self.constrain(ra, s)?;
        }
        Ok(())
    }

    fn lookup(&mut self, name: &str) -> usize {
        if let Some(&(_, s)) = self.scope.iter().rev().find(|(n, _)| n == name) {
            return s;
        }
        if let Some(&(_, s)) = self.free.iter().find(|(n, _)| n == name) {
            return s;
        }
        let s = self.fresh(name, None);
        self.free.push((name.to_string(), s));
        s
    }

    fn go(&mut self, f: &Formula) -> Result<Raw> {
        Ok(match f {
            Formula::Const(b) => Raw::Const(*b),
            Formula::Atom { rel, args } => {
                let r = self
                    .sig
                    .relation_index(rel)
                    .ok_or_else(|| Error::Signature(format!("unknown relation symbol `{rel}`")))?;
                let sym = &self.sig.relations()[r];
                if sym.arity() != args.len() {
                    return Err(Error::Signature(format!(
                        "`{rel}` has arity {} but is applied to {} arguments",
                        sym.arity(),
                        args.len()
                    )));
                }
                let sorts = sym.sorts.clone();
                let mut slots = Vec::new();
                for (a, s) in args.iter().zip(sorts) {
                    let slot = self.lookup(a);
                    self.constrain(slot, s)?;
                    slots.push(slot);
                }
                Raw::Atom(r, slots)
            }
            Formula::Eq(a, b) => {
                let (x, y) = (self.lookup(a), self.lookup(b));
                self.unify(x, y)?;
                Raw::Eq(x, y)
            }
            Formula::Not(a) => Raw::Not(Box::new(self.go(a)?)),
            Formula::And(a, b) => Raw::Bin(0, Box::new(self.go(a)?), Box::new(self.go(b)?)),
            Formula::Or(a, b) => Raw::Bin(1, Box::new(self.go(a)?), Box::new(self.go(b)?)),
            Formula::Implies(a, b) => Raw::Bin(2, Box::new(self.go(a)?), Box::new(self.go(b)?)),
            Formula::Iff(a, b) => Raw::Bin(3, Box::new(self.go(a)?), Box::new(self.go(b)?)),
            Formula::Forall { var, sort, body } | Formula::Exists { var, sort, body } => {
                if self.scope.iter().any(|(n, _)| n == var) {
                    return Err(Error::Sort(format!("variable `{var}` is bound twice on one path")));
                }
                let s = match sort {
                    None => None,
                    Some(name) => Some(
                        self.sig
                            .sort_index(name)
                            .ok_or_else(|| Error::Sort(format!("unknown sort `{name}`")))?,
                    ),
                };
                let slot = self.fresh(var, s);
                self.scope.push((var.clone(), slot));
                let body = self.go(body);
                self.scope.pop();
                Raw::Q(matches!(f, Formula::Forall { .. }), slot, Box::new(body?))
            }
        })
    }

    fn sort_of(&mut self, slot: usize) -> Result<SortId> {
        let r = self.find(slot);
        match self.sort[r] {
            Some(s) => Ok(s),
            None if self.sig.is_one_sorted() => Ok(0),
            None => Err(Error::Sort(format!("cannot infer the sort of `{}`", self.names[slot]))),
        }
    }

    fn lower(&mut self, raw: Raw) -> Result<Op> {
        Ok(match raw {
            Raw::Const(b) => Op::Const(b),
            Raw::Atom(r, s) => Op::Atom(r, s.into_boxed_slice()),
            Raw::Eq(a, b) => Op::Eq(a, b),
            Raw::Not(a) => Op::Not(Box::new(self.lower(*a)?)),
            Raw::Bin(k, a, b) => {
                let (a, b) = (Box::new(self.lower(*a)?), Box::new(self.lower(*b)?));
                match k {
                    0 => Op::And(a, b),
                    1 => Op::Or(a, b),
                    2 => Op::Imp(a, b),
                    _ => Op::Iff(a, b),
                }
            }
            Raw::Q(all, slot, body) => {
                let s = self.sort_of(slot)?;
                let body = Box::new(self.lower(*body)?);
                if all {
                    Op::All(slot, s, body)
                } else {
                    Op::Ex(slot, s, body)
                }
            }
        })
    }
}

impl Formula {
    pub fn compile(&self, sig: &Signature) -> Result<Compiled> {
        let mut r = Resolver {
            sig,
            parent: Vec::new(),
            sort: Vec::new(),
            names: Vec::new(),
            free: Vec::new(),
            scope: Vec::new(),
        };
        let raw = r.go(self)?;
        let root = r.lower(raw)?;
        let free_slots = r.free.clone();
        let mut free = Vec::new();
        let mut remap: HashMap<usize, usize> = HashMap::new();
        for (i, (name, slot)) in free_slots.iter().enumerate() {
            free.push((name.clone(), r.sort_of(*slot)?));
            remap.insert(*slot, i);
        }
        // Free variables occupy the first slots, in order of first occurrence.
        let total = r.parent.len();
        let mut order: Vec<usize> = vec![usize::MAX; total];
        for (&old, &new) in &remap {
            order[old] = new;
        }
        let mut next = free.len();
        for o in order.iter_mut() {
            if *o == usize::MAX {
                *o = next;
                next += 1;
            }
        }
        Ok(Compiled { sig: sig.clone(), free, slots: total, root: renumber(root, &order), source: self.clone() })
    }
}

fn renumber(op: Op, map: &[usize]) -> Op {
    let b = |o: Box<Op>| Box::new(renumber(*o, map));
    match op {
        Op::Const(c) => Op::Const(c),
        Op::Atom(r, s) => Op::Atom(r, s.iter().map(|&x| map[x]).collect()),
        Op::Eq(a, c) => Op::Eq(map[a], map[c]),
        Op::Not(a) => Op::Not(b(a)),
        Op::And(x, y) => Op::And(b(x), b(y)),
        Op::Or(x, y) => Op::Or(b(x), b(y)),
        Op::Imp(x, y) => Op::Imp(b(x), b(y)),
        Op::Iff(x, y) => Op::Iff(b(x), b(y)),
        Op::All(s, t, x) => Op::All(map[s], t, b(x)),
        Op::Ex(s, t, x) => Op::Ex(map[s], t, b(x)),
    }
}

fn eval(op: &Op, m: &Structure, env: &mut [usize], buf: &mut Vec<usize>) -> bool {
    match op {
        Op::Const(b) => *b,
        Op::Atom(r, slots) => {
            let start = buf.len();
            buf.extend(slots.iter().map(|&s| env[s]));
            let v = m.holds(*r, &buf[start..]);
            buf.truncate(start);
            v
        }
        Op::Eq(a, b) => env[*a] == env[*b],
        Op::Not(a) => !eval(a, m, env, buf),
        Op::And(a, b) => eval(a, m, env, buf) && eval(b, m, env, buf),
        Op::Or(a, b) => eval(a, m, env, buf) || eval(b, m, env, buf),
        Op::Imp(a, b) => !eval(a, m, env, buf) || eval(b, m, env, buf),
        Op::Iff(a, b) => eval(a, m, env, buf) == eval(b, m, env, buf),
        Op::All(s, t, body) => (0..m.size(*t)).all(|x| {
            env[*s] = x;
            eval(body, m, env, buf)
        }),
        Op::Ex(s, t, body) => (0..m.size(*t)).any(|x| {
            env[*s] = x;
            eval(body, m, env, buf)
        }),
    }
}

impl Compiled {
    pub fn free_vars(&self) -> &[(String, SortId)] {
        &self.free
    }

    pub fn formula(&self) -> &Formula {
        &self.source
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    fn check(&self, m: &Structure) -> Result<()> {
        if m.signature() != &self.sig {
            return Err(Error::Signature(format!(
                "formula compiled for another signature than that of `{}`",
                m.name()
            )));
        }
        Ok(())
    }

    /// Evaluates with the free variables bound, in order, to `args`.
    pub fn eval(&self, m: &Structure, args: &[usize]) -> Result<bool> {
        self.check(m)?;
        if args.len() != self.free.len() {
            return Err(Error::input(format!(
                "{} values for {} free variables",
                args.len(),
                self.free.len()
            )));
        }
        for (&a, (name, s)) in args.iter().zip(&self.free) {
            if a >= m.size(*s) {
                return Err(Error::input(format!("value {a} for `{name}` out of range")));
            }
        }
        let mut env = vec![0; self.slots];
        env[..args.len()].copy_from_slice(args);
        Ok(eval(&self.root, m, &mut env, &mut Vec::new()))
    }

    /// Tuples over the free variables that satisfy the formula, lexicographically.
    pub fn satisfying_tuples(&self, m: &Structure) -> Result<Vec<Vec<usize>>> {
        self.check(m)?;
        let sizes: Vec<usize> = self.free.iter().map(|(_, s)| m.size(*s)).collect();
        let mut env = vec![0; self.slots];
        let mut buf = Vec::new();
        let mut out = Vec::new();
        for t in crate::structures::grid(&sizes) {
            env[..t.len()].copy_from_slice(&t);
            if eval(&self.root, m, &mut env, &mut buf) {
                out.push(t);
            }
        }
        if sizes.is_empty() && eval(&self.root, m, &mut env, &mut buf) {
            out.push(Vec::new());
        }
        Ok(out)
    }

    /// For a sentence, the first assignment to its leading universal block that
    /// falsifies the matrix. Other sentences yield an empty witness when false.
    pub fn counterexample(&self, m: &Structure) -> Result<Option<Vec<(String, Elem)>>> {
        self.check(m)?;
        if !self.free.is_empty() {
            return Err(Error::Precondition("counterexample needs a sentence".into()));
        }
        let mut prefix = Vec::new();
        let mut op = &self.root;
        while let Op::All(s, t, body) = op {
            prefix.push((*s, *t));
            op = body;
        }
        let names = leading_names(&self.source);
        let sizes: Vec<usize> = prefix.iter().map(|&(_, t)| m.size(t)).collect();
        let mut env = vec![0; self.slots];
        let mut buf = Vec::new();
        if sizes.is_empty() {
            return Ok((!eval(op, m, &mut env, &mut buf)).then(Vec::new));
        }
        for t in crate::structures::grid(&sizes) {
            for (&(s, _), &v) in prefix.iter().zip(&t) {
                env[s] = v;
            }
            if !eval(op, m, &mut env, &mut buf) {
                let w = prefix
                    .iter()
                    .zip(&t)
                    .zip(&names)
                    .map(|((&(_, sort), &v), n)| (n.clone(), Elem::new(sort, v)))
                    .collect();
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    pub fn holds(&self, m: &Structure) -> Result<bool> {
        self.eval(m, &[])
    }
}

fn leading_names(f: &Formula) -> Vec<String> {
    let mut out = Vec::new();
    let mut f = f;
    while let Formula::Forall { var, body, .. } = f {
        out.push(var.clone());
        f = body;
    }
    out
}
